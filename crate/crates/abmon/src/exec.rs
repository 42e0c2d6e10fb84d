//! Three-way fork-join that honors both the compile-time `parallel` feature
//! and a runtime switch, so benchmarks can compare the two schedules in one
//! binary.

#[cfg(feature = "parallel")]
pub fn join3<A, B, C>(
    parallel: bool,
    fa: impl FnOnce() -> A + Send,
    fb: impl FnOnce() -> B + Send,
    fc: impl FnOnce() -> C + Send,
) -> (A, B, C)
where
    A: Send,
    B: Send,
    C: Send,
{
    if parallel {
        let ((a, b), c) = rayon::join(|| rayon::join(fa, fb), fc);
        (a, b, c)
    } else {
        (fa(), fb(), fc())
    }
}

#[cfg(not(feature = "parallel"))]
pub fn join3<A, B, C>(
    _parallel: bool,
    fa: impl FnOnce() -> A,
    fb: impl FnOnce() -> B,
    fc: impl FnOnce() -> C,
) -> (A, B, C) {
    (fa(), fb(), fc())
}
