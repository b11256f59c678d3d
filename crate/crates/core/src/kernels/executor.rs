//! Fork-join execution of element-chunk jobs over a fixed thread count.
//!
//! Jobs are pulled from an atomic counter, so assignment to threads is
//! dynamic, but every job writes only element slots it owns: results are
//! independent of the thread count and of scheduling.

use std::marker::PhantomData;
use std::sync::atomic::{AtomicUsize, Ordering};

/// Data-parallel executor with a fixed worker count.
#[derive(Debug, Clone)]
pub struct Executor {
    threads: usize,
}

impl Executor {
    pub fn new(threads: usize) -> Self {
        Executor { threads: threads.max(1) }
    }

    /// Worker count honoring, in order: the explicit request, the
    /// SWELLDG_THREADS variable, the machine parallelism.
    pub fn from_request(threads: Option<usize>) -> Self {
        let n = threads
            .or_else(|| std::env::var("SWELLDG_THREADS").ok().and_then(|v| v.parse().ok()))
            .unwrap_or_else(|| {
                std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
            });
        Executor::new(n)
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// Run `njobs` jobs, blocking until all complete.
    pub fn run<F: Fn(usize) + Sync>(&self, njobs: usize, job: F) {
        if njobs == 0 {
            return;
        }
        if self.threads == 1 || njobs == 1 {
            for j in 0..njobs {
                job(j);
            }
            return;
        }
        let next = AtomicUsize::new(0);
        let workers = self.threads.min(njobs);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let j = next.fetch_add(1, Ordering::Relaxed);
                    if j >= njobs {
                        break;
                    }
                    job(j);
                });
            }
        });
    }
}

/// Raw shared-mutable view of a slice for disjoint per-element writes from
/// parallel jobs.
pub(crate) struct SharedMut<'a> {
    ptr: *mut f64,
    len: usize,
    _marker: PhantomData<&'a mut [f64]>,
}

// Safety: access goes through `slice_mut`, whose contract requires callers
// to touch disjoint ranges.
unsafe impl Send for SharedMut<'_> {}
unsafe impl Sync for SharedMut<'_> {}

impl<'a> SharedMut<'a> {
    pub fn new(slice: &'a mut [f64]) -> Self {
        SharedMut { ptr: slice.as_mut_ptr(), len: slice.len(), _marker: PhantomData }
    }

    /// # Safety
    /// Concurrent callers must request disjoint ranges.
    #[inline]
    pub unsafe fn slice_mut(&self, offset: usize, len: usize) -> &mut [f64] {
        debug_assert!(offset + len <= self.len);
        std::slice::from_raw_parts_mut(self.ptr.add(offset), len)
    }
}

/// Split `items` into chunks of `chunk` elements; job j handles chunk j.
pub(crate) fn chunk_count(nitems: usize, chunk: usize) -> usize {
    nitems.div_ceil(chunk.max(1))
}

pub(crate) fn chunk_range(nitems: usize, chunk: usize, job: usize) -> std::ops::Range<usize> {
    let chunk = chunk.max(1);
    let start = job * chunk;
    start..((start + chunk).min(nitems))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_jobs_run_once() {
        let exec = Executor::new(4);
        let n = 1000;
        let flags: Vec<AtomicUsize> = (0..n).map(|_| AtomicUsize::new(0)).collect();
        exec.run(n, |j| {
            flags[j].fetch_add(1, Ordering::Relaxed);
        });
        assert!(flags.iter().all(|f| f.load(Ordering::Relaxed) == 1));
    }

    #[test]
    fn disjoint_writes_deterministic() {
        let n = 257;
        let run = |threads: usize| {
            let mut data = vec![0.0f64; n];
            let shared = SharedMut::new(&mut data);
            Executor::new(threads).run(chunk_count(n, 16), |job| {
                let range = chunk_range(n, 16, job);
                let s = unsafe { shared.slice_mut(range.start, range.len()) };
                for (i, v) in s.iter_mut().enumerate() {
                    *v = ((range.start + i) as f64).sqrt();
                }
            });
            data
        };
        assert_eq!(run(1), run(8));
    }

    #[test]
    fn chunk_ranges_cover() {
        for n in [1, 7, 16, 33] {
            for c in [1, 4, 16] {
                let mut seen = vec![false; n];
                for j in 0..chunk_count(n, c) {
                    for i in chunk_range(n, c, j) {
                        assert!(!seen[i]);
                        seen[i] = true;
                    }
                }
                assert!(seen.iter().all(|&s| s));
            }
        }
    }
}
