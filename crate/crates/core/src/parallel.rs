//! Worker pool sizing.

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "AOI_LAB_THREADS";

/// Worker cap from the environment, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs `f` on a pool limited by [`THREADS_ENV`], or on the global pool.
pub fn install<R, F>(f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    let Some(n) = thread_cap() else {
        return f();
    };
    match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
