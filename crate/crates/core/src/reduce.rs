//! Deterministic reductions.
//!
//! Sums over cells use a fixed pairwise tree so the result depends only on
//! the data, never on how work was split across threads.

const LEAF: usize = 32;

/// Pairwise (cascade) summation with a fixed split point.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    let (lo, hi) = values.split_at(mid);
    if values.len() >= 1 << 14 {
        let (a, b) = rayon::join(|| pairwise_sum(lo), || pairwise_sum(hi));
        a + b
    } else {
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

/// Pairwise sum of `f(i)` for `i in 0..n`.
pub fn pairwise_sum_by(n: usize, f: impl Fn(usize) -> f64 + Sync) -> f64 {
    fn go(lo: usize, hi: usize, f: &(impl Fn(usize) -> f64 + Sync)) -> f64 {
        let len = hi - lo;
        if len <= LEAF {
            return (lo..hi).map(f).sum();
        }
        let mid = lo + len / 2;
        if len >= 1 << 14 {
            let (a, b) = rayon::join(|| go(lo, mid, f), || go(mid, hi, f));
            a + b
        } else {
            go(lo, mid, f) + go(mid, hi, f)
        }
    }
    go(0, n, &f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_on_exact_data() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
        assert_eq!(pairwise_sum_by(1000, |i| i as f64), 499_500.0);
    }

    #[test]
    fn closure_and_slice_agree_bitwise() {
        let v: Vec<f64> = (0..70_001).map(|i| ((i as f64) * 0.37).sin()).collect();
        assert_eq!(
            pairwise_sum(&v).to_bits(),
            pairwise_sum_by(v.len(), |i| v[i]).to_bits()
        );
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
