//! Logical error rate of the bounded-distance decoder.

/// `ln C(n, j)` as a sum of logarithms.
fn ln_binomial(n: u64, j: u64) -> f64 {
    let j = j.min(n - j);
    (0..j).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Probability that a decoder correcting every pattern of weight below
/// `2^{r−1}` fails on `4^r` qubits flipped independently with probability `p`:
/// `1 − Σ_{j<2^{r−1}} C(4^r, j) p^j (1−p)^{4^r−j}`.
///
/// The upper tail is summed directly in log space, so the result keeps full
/// relative precision even when it is far below machine epsilon.
pub fn bd_logical_rate(level: usize, p: f64) -> f64 {
    assert!(level >= 1, "level must be at least 1");
    assert!((0.0..=1.0).contains(&p), "p must lie in [0, 1], got {p}");
    let n = 4u64.pow(level as u32);
    let t = 1u64 << (level - 1);
    if p == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return 1.0;
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    (t..=n)
        .map(|j| (ln_binomial(n, j) + j as f64 * lp + (n - j) as f64 * lq).exp())
        .sum::<f64>()
        .min(1.0)
}

/// Local log-log slope `d ln P / d ln p` by a central difference in `ln p`.
pub fn bd_log_slope(level: usize, p: f64) -> f64 {
    let h: f64 = 1e-4;
    let (lo, hi) = (p * (-h).exp(), p * h.exp());
    (bd_logical_rate(level, hi).ln() - bd_logical_rate(level, lo).ln()) / (2.0 * h)
}
