use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::EvalError;

/// Seeded random partition of `0..n` into `folds` disjoint sets whose sizes
/// differ by at most one; the first `n % folds` folds take the extra index.
/// Each fold is returned sorted.
pub fn k_fold_split(n: usize, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>, EvalError> {
    if folds == 0 || n < folds {
        return Err(EvalError::DatasetTooSmall { n, needed: folds.max(1) });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let (base, extra) = (n / folds, n % folds);
    let mut out = Vec::with_capacity(folds);
    let mut rest = order.as_slice();
    for f in 0..folds {
        let size = base + usize::from(f < extra);
        let (head, tail) = rest.split_at(size);
        let mut fold = head.to_vec();
        fold.sort_unstable();
        out.push(fold);
        rest = tail;
    }
    Ok(out)
}

pub fn five_fold_split(n: usize, seed: u64) -> Result<Vec<Vec<usize>>, EvalError> {
    k_fold_split(n, 5, seed)
}
