//! Rolling-window supervision: `q` consecutive snapshots in, the next `p`
//! snapshots out, offset one between successive windows, never crossing a
//! split boundary. Splits are contiguous in time: training first, then
//! validation, then test.

use nalgebra::DMatrix;

use crate::error::{NnError, Result};
use crate::feature::Feature;

/// Contiguous train/validation/test fractions of the snapshot axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Split {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Split {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Split> {
        let s = Split { train, val, test };
        if [train, val, test].iter().any(|&x| !(0.0..=1.0).contains(&x))
            || (train + val + test - 1.0).abs() > 1e-9
            || train <= 0.0
        {
            return Err(NnError::InvalidOptions(format!(
                "split fractions must be in [0,1], sum to 1 and include training data, got {s:?}"
            )));
        }
        Ok(s)
    }

    /// Snapshot counts `(k_train, k_val, k_test)`; training and validation
    /// round down, test takes the remainder, so the blocks partition `k`.
    pub fn counts(&self, k: usize) -> (usize, usize, usize) {
        let k_train = (self.train * k as f64).floor() as usize;
        let k_val = (self.val * k as f64).floor() as usize;
        let k_test = k - k_train - k_val;
        (k_train, k_val, k_test)
    }
}

/// One supervised sample.
#[derive(Clone, Debug)]
pub struct Window {
    /// `q x n` block of consecutive snapshots.
    pub input: Feature,
    /// The following `p x n` snapshots.
    pub target: Feature,
    /// Index of the first input snapshot in the full matrix.
    pub start: usize,
}

/// Windowed dataset split into contiguous blocks.
#[derive(Clone, Debug)]
pub struct RollingWindowDataset {
    pub q: usize,
    pub p: usize,
    /// Variables per snapshot.
    pub n: usize,
    pub train: Vec<Window>,
    pub val: Vec<Window>,
    pub test: Vec<Window>,
    /// Block boundaries `(k_train, k_val, k_test)`.
    pub counts: (usize, usize, usize),
}

/// Build rolling windows over the columns of an `n x K` matrix.
pub fn make_windows(
    data: &DMatrix<f64>,
    q: usize,
    p: usize,
    split: &Split,
) -> Result<RollingWindowDataset> {
    if q == 0 || p == 0 {
        return Err(NnError::InvalidOptions("q and p must be >= 1".into()));
    }
    let (n, k) = data.shape();
    let counts = split.counts(k);
    let (k_train, k_val, k_test) = counts;
    let blocks = [
        ("train", 0usize, k_train),
        ("val", k_train, k_val),
        ("test", k_train + k_val, k_test),
    ];
    let mut out: [Vec<Window>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (b, (name, start, len)) in blocks.iter().enumerate() {
        if *len == 0 {
            continue;
        }
        if *len < q + p {
            return Err(NnError::BlockTooSmall {
                block: match *name {
                    "train" => "train",
                    "val" => "val",
                    _ => "test",
                },
                len: *len,
                q,
                p,
            });
        }
        let count = len - q - p + 1;
        for s in 0..count {
            let s0 = start + s;
            let mut input = Feature::zeros(q, n);
            for r in 0..q {
                for c in 0..n {
                    input.set(r, c, data[(c, s0 + r)]);
                }
            }
            let mut target = Feature::zeros(p, n);
            for r in 0..p {
                for c in 0..n {
                    target.set(r, c, data[(c, s0 + q + r)]);
                }
            }
            out[b].push(Window {
                input,
                target,
                start: s0,
            });
        }
    }
    let [train, val, test] = out;
    Ok(RollingWindowDataset {
        q,
        p,
        n,
        train,
        val,
        test,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(n: usize, k: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, k, |r, c| (c * 10 + r) as f64)
    }

    #[test]
    fn window_count_formula() {
        // K_block = 12, q = 10, p = 1 gives 12 - 10 - 1 + 1 = 2 windows.
        let data = matrix(3, 12);
        let split = Split::new(1.0, 0.0, 0.0).unwrap();
        let ds = make_windows(&data, 10, 1, &split).unwrap();
        assert_eq!(ds.train.len(), 2);
        assert_eq!(ds.val.len() + ds.test.len(), 0);
    }

    #[test]
    fn six_step_ahead_window_count() {
        // q = 10 inputs with p = 6 targets: every block yields len - 15
        // windows.
        let data = matrix(4, 100);
        let split = Split::new(1.0, 0.0, 0.0).unwrap();
        let ds = make_windows(&data, 10, 6, &split).unwrap();
        assert_eq!(ds.train.len(), 100 - 15);
    }

    #[test]
    fn windows_never_cross_split_boundary() {
        let data = matrix(2, 40);
        let split = Split::new(0.5, 0.25, 0.25).unwrap();
        let ds = make_windows(&data, 4, 2, &split).unwrap();
        let (k_train, k_val, _) = ds.counts;
        for w in &ds.train {
            assert!(w.start + 4 + 2 <= k_train);
        }
        for w in &ds.val {
            assert!(w.start >= k_train && w.start + 6 <= k_train + k_val);
        }
        for w in &ds.test {
            assert!(w.start >= k_train + k_val && w.start + 6 <= 40);
        }
        // Offset one between successive windows.
        for pair in ds.train.windows(2) {
            assert_eq!(pair[1].start, pair[0].start + 1);
        }
    }

    #[test]
    fn window_contents_match_columns() {
        let data = matrix(3, 15);
        let split = Split::new(1.0, 0.0, 0.0).unwrap();
        let ds = make_windows(&data, 5, 2, &split).unwrap();
        let w = &ds.train[3];
        for r in 0..5 {
            for c in 0..3 {
                assert_eq!(w.input.get(r, c), data[(c, 3 + r)]);
            }
        }
        for r in 0..2 {
            for c in 0..3 {
                assert_eq!(w.target.get(r, c), data[(c, 3 + 5 + r)]);
            }
        }
    }

    #[test]
    fn too_small_block_is_an_error() {
        let data = matrix(2, 20);
        let split = Split::new(0.8, 0.1, 0.1).unwrap();
        match make_windows(&data, 4, 2, &split) {
            Err(NnError::BlockTooSmall { block, len, .. }) => {
                assert_eq!(block, "val");
                assert_eq!(len, 2);
            }
            other => panic!("expected BlockTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn counts_partition_k() {
        let split = Split::new(0.65, 0.15, 0.2).unwrap();
        for k in [10usize, 37, 999] {
            let (a, b, c) = split.counts(k);
            assert_eq!(a + b + c, k);
        }
    }
}
