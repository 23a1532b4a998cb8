//! Small statistical building blocks: the Kolmogorov–Smirnov one-sample
//! test and exact binomial tail bounds in log space.

/// One-sample Kolmogorov–Smirnov statistic D_n against a reference CDF.
///
/// D_n = sup_x |F_emp(x) − F(x)|, computed over both one-sided gaps at each
/// order statistic. `sample` need not be sorted.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    assert!(!sample.is_empty(), "ks_statistic on empty sample");
    let mut xs = sample.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        let upper = (i as f64 + 1.0) / n - f;
        let lower = f - i as f64 / n;
        d = d.max(upper).max(lower);
    }
    d
}

/// Asymptotic two-sided critical value for D_n at significance `alpha`:
/// c(α)/√n with c(α) = √(ln(2/α)/2).
pub fn ks_critical_value(alpha: f64, n: usize) -> f64 {
    assert!(alpha > 0.0 && alpha < 1.0);
    assert!(n > 0);
    ((2.0 / alpha).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// ln(n!) by direct summation; fine for the small n used here.
fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// ln C(n, k).
pub fn ln_choose(n: u64, k: u64) -> f64 {
    assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Upper binomial tail P[Bin(n, p) ≥ k], computed in log space so that
/// astronomically small bounds stay meaningful.
///
/// Returns the probability (possibly subnormal or 0.0 after exponentiation);
/// use [`binomial_tail_ln`] when the log itself is wanted.
pub fn binomial_tail(n: u64, k: u64, p: f64) -> f64 {
    binomial_tail_ln(n, k, p).exp()
}

/// ln P[Bin(n, p) ≥ k].
pub fn binomial_tail_ln(n: u64, k: u64, p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p));
    if k == 0 {
        return 0.0; // ln 1
    }
    if k > n || p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return 0.0;
    }
    let lp = p.ln();
    let lq = (-p).ln_1p(); // ln(1 - p), accurate for tiny p
    let terms: Vec<f64> = (k..=n)
        .map(|j| ln_choose(n, j) + j as f64 * lp + (n - j) as f64 * lq)
        .collect();
    log_sum_exp(&terms).min(0.0)
}

/// log(Σ exp(x_i)) without overflow.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_zero_for_perfect_grid() {
        // Points at (i - 0.5)/n of U(0,1): D_n = 1/(2n).
        let n = 100;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.005).abs() < 1e-12, "d = {d}");
    }

    #[test]
    fn ks_detects_constant_sample() {
        // All mass at 0 against U(-1, 1): empirical jumps 0→1 at 0 where F=0.5.
        let xs = vec![0.0; 1000];
        let d = ks_statistic(&xs, |x| ((x + 1.0) / 2.0).clamp(0.0, 1.0));
        assert!((d - 0.5).abs() < 1e-9, "d = {d}");
    }

    #[test]
    fn ks_critical_value_alpha_ordering() {
        // Stricter alpha → larger critical value.
        assert!(ks_critical_value(0.01, 1000) > ks_critical_value(0.05, 1000));
    }

    #[test]
    fn binomial_tail_exact_small_cases() {
        // P[Bin(2, 0.5) >= 1] = 0.75
        assert!((binomial_tail(2, 1, 0.5) - 0.75).abs() < 1e-12);
        // P[Bin(3, 0.5) >= 3] = 0.125
        assert!((binomial_tail(3, 3, 0.5) - 0.125).abs() < 1e-12);
        // k = 0 tail is 1
        assert_eq!(binomial_tail(5, 0, 0.1), 1.0);
        // k > n is impossible
        assert_eq!(binomial_tail(5, 6, 0.9), 0.0);
    }

    #[test]
    fn binomial_tail_tiny_p_stays_in_log_range() {
        // n=16, k=4, p=2^-64: bound below 2^-240 but far above f64 underflow
        // in log space.
        let p = (2.0f64).powi(-64);
        let ln_tail = binomial_tail_ln(16, 4, p);
        let log2_tail = ln_tail / std::f64::consts::LN_2;
        assert!(log2_tail < -240.0, "log2 tail = {log2_tail}");
    }

    #[test]
    fn log_sum_exp_matches_direct() {
        let xs = [0.0f64, -1.0, -2.0];
        let direct: f64 = xs.iter().map(|x| x.exp()).sum();
        assert!((log_sum_exp(&xs) - direct.ln()).abs() < 1e-12);
    }
}
