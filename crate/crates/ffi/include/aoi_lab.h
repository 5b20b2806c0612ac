#ifndef AOI_LAB_H
#define AOI_LAB_H

#include <stdbool.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum AoiStatus {
  AOI_STATUS_OK = 0,
  AOI_STATUS_NULL_POINTER = 1,
  AOI_STATUS_INVALID_ARGUMENT = 2,
  AOI_STATUS_PARSE_ERROR = 3,
  AOI_STATUS_UNSTABLE = 4,
  AOI_STATUS_INFINITE_MOMENT = 5,
  AOI_STATUS_NUMERICAL_FAILURE = 6,
  AOI_STATUS_UNSUPPORTED = 7,
  AOI_STATUS_CONFIG = 8,
  AOI_STATUS_IO = 9,
  AOI_STATUS_PANIC = 10,
} AoiStatus;

typedef enum AoiDiscipline {
  AOI_DISCIPLINE_FCFS = 0,
  AOI_DISCIPLINE_LCFS_PREEMPTIVE = 1,
  AOI_DISCIPLINE_INFINITE_SERVER = 2,
} AoiDiscipline;

typedef enum AoiMethod {
  AOI_METHOD_CLOSED_FORM = 0,
  AOI_METHOD_QUADRATURE = 1,
  AOI_METHOD_MONTE_CARLO = 2,
} AoiMethod;

typedef enum AoiStopKind {
  AOI_STOP_KIND_PACKETS = 0,
  AOI_STOP_KIND_HORIZON = 1,
} AoiStopKind;

// Opaque distribution handle.
typedef struct AoiDistribution AoiDistribution;

// Analytic ages. A missing value is NaN with its `has_` flag cleared.
typedef struct AoiAnalyticResult {
  double peak;
  double average;
  bool has_peak;
  bool has_average;
  enum AoiMethod method;
  double error_estimate;
  bool budget_exhausted;
} AoiAnalyticResult;

typedef struct AoiSimConfig {
  enum AoiDiscipline discipline;
  enum AoiStopKind stop_kind;
  // Used when `stop_kind` is `Horizon`.
  double horizon;
  // Used when `stop_kind` is `Packets`.
  uint64_t packets;
  double warmup_fraction;
  uint64_t seed;
  uint32_t replications;
} AoiSimConfig;

typedef struct AoiSimResult {
  double average_age;
  double peak_age;
  double delay_mean;
  double delay_variance;
  double informative_fraction;
  uint64_t preemption_count;
  double ci_halfwidth_average;
  double ci_halfwidth_peak;
  uint64_t seed;
  uint32_t replications;
  uint64_t departures;
} AoiSimResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *aoi_last_error(void);

// Library version as a static NUL-terminated string.
const char *aoi_version(void);

// Parses a literal such as `"pareto:1.5"` with mean `1/rate`.
//
// # Safety
// `literal` must be a NUL-terminated string; `out` must be writable.
enum AoiStatus aoi_distribution_new(const char *literal, double rate, struct AoiDistribution **out);

// Releases a handle; null is ignored.
//
// # Safety
// `d` must come from [`aoi_distribution_new`] and not be freed twice.
void aoi_distribution_free(struct AoiDistribution *d);

// # Safety
// `d` must be a live handle and `out` writable.
enum AoiStatus aoi_distribution_mean(const struct AoiDistribution *d, double *out);

// Infinite when the second moment diverges.
//
// # Safety
// `d` must be a live handle and `out` writable.
enum AoiStatus aoi_distribution_second_moment(const struct AoiDistribution *d, double *out);

// E[e^{−sX}] for `s ≥ 0`.
//
// # Safety
// `d` must be a live handle and `out` writable.
enum AoiStatus aoi_distribution_laplace(const struct AoiDistribution *d, double s, double *out);

// d/ds E[e^{−sX}] = −E[X e^{−sX}].
//
// # Safety
// `d` must be a live handle and `out` writable.
enum AoiStatus aoi_distribution_laplace_derivative(const struct AoiDistribution *d,
                                                   double s,
                                                   double *out);

// P(X > x).
//
// # Safety
// `d` must be a live handle and `out` writable.
enum AoiStatus aoi_distribution_tail(const struct AoiDistribution *d, double x, double *out);

// E[X·1{X < x}].
//
// # Safety
// `d` must be a live handle and `out` writable.
enum AoiStatus aoi_distribution_truncated_mean(const struct AoiDistribution *d,
                                               double x,
                                               double *out);

// Analytic peak and average age. `samples` and `seed` drive the
// infinite-server Monte Carlo and are ignored otherwise.
//
// # Safety
// `arrival` and `service` must be live handles and `out` writable.
enum AoiStatus aoi_analytic(enum AoiDiscipline discipline,
                            const struct AoiDistribution *arrival,
                            const struct AoiDistribution *service,
                            uint64_t samples,
                            uint64_t seed,
                            struct AoiAnalyticResult *out);

// Defaults: FCFS, 10⁶ packets, warmup 0.1, seed 1, one replication.
struct AoiSimConfig aoi_sim_config_default(void);

// Runs the simulator.
//
// # Safety
// `arrival`, `service` and `config` must be valid pointers and `out` writable.
enum AoiStatus aoi_simulate(const struct AoiDistribution *arrival,
                            const struct AoiDistribution *service,
                            const struct AoiSimConfig *config,
                            struct AoiSimResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AOI_LAB_H */
