//! Scalar q-series primitives: q-numbers, q-factorials, q-Pochhammer symbols,
//! the q-gamma function and the two q-exponentials.
//!
//! Bases are passed explicitly and must lie in `(0, 1)`. Infinite objects are
//! truncated according to [`TruncationConfig`]: a series stops once two
//! consecutive terms fall below `series_tol` relative to the partial sum, a
//! product once two consecutive factors differ from one by less than
//! `series_tol`.

use crate::config::TruncationConfig;
use crate::error::{QError, Result};
use crate::real::{powi, pow_real, to_f64, CompensatedSum, Real};

pub(crate) fn check_base<S: Real>(base: S) -> Result<()> {
    if base > S::zero() && base < S::one() {
        Ok(())
    } else {
        Err(QError::domain(format!("base must lie in (0, 1) (got {base})")))
    }
}

/// Stop rule shared by series and products: two consecutive small terms.
#[derive(Debug)]
pub(crate) struct StopRule<S> {
    tol: S,
    run: u32,
}

impl<S: Real> StopRule<S> {
    pub(crate) fn new(cfg: &TruncationConfig) -> Self {
        Self {
            tol: cfg.tol(),
            run: 0,
        }
    }

    /// Records the size of the latest term relative to `scale`.
    pub(crate) fn settled(&mut self, term: S, scale: S) -> bool {
        if term.abs() <= self.tol * scale.abs() {
            self.run += 1;
        } else {
            self.run = 0;
        }
        self.run >= 2
    }
}

/// The q-number `[x]_b = (1 - b^x) / (1 - b)`.
///
/// With `b = q^-2` and integer `x` this is the deformed integer `[n]`;
/// half-integer `x` is needed for the q-gamma recursion.
pub fn q_bracket<S: Real>(x: S, base: S) -> Result<S> {
    check_base(base)?;
    Ok((S::one() - pow_real(base, x)) / (S::one() - base))
}

/// Integer q-number, the common case.
pub fn q_int<S: Real>(n: i64, base: S) -> Result<S> {
    check_base(base)?;
    Ok((S::one() - powi(base, n)) / (S::one() - base))
}

/// `[n]_b! = [1]_b [2]_b ... [n]_b`, with the empty product equal to one.
pub fn q_factorial<S: Real>(n: u32, base: S) -> Result<S> {
    check_base(base)?;
    let one_minus = S::one() - base;
    let mut power = S::one();
    let mut acc = S::one();
    for _ in 0..n {
        power = power * base;
        acc = acc * ((S::one() - power) / one_minus);
    }
    Ok(acc)
}

/// Finite q-Pochhammer symbol `(a; b)_n = prod_{k<n} (1 - a b^k)`.
pub fn qpoch_finite<S: Real>(a: S, base: S, n: u32) -> S {
    let mut power = a;
    let mut acc = S::one();
    for _ in 0..n {
        acc = acc * (S::one() - power);
        power = power * base;
    }
    acc
}

/// Infinite q-Pochhammer symbol `(a; b)_inf`.
pub fn qpoch_infinite<S: Real>(a: S, base: S, cfg: &TruncationConfig) -> Result<S> {
    check_base(base)?;
    if a == S::zero() {
        return Ok(S::one());
    }
    let mut rule = StopRule::new(cfg);
    let mut power = a;
    let mut acc = S::one();
    for _ in 0..cfg.max_terms() {
        acc = acc * (S::one() - power);
        if rule.settled(power, S::one()) {
            return Ok(acc);
        }
        power = power * base;
    }
    Err(QError::Convergence {
        what: "infinite q-Pochhammer product",
        terms: cfg.max_terms(),
        partial: to_f64(acc),
    })
}

/// `1 / (a; b)_inf`, accumulated factor by factor so that a huge product
/// underflows gracefully to zero instead of overflowing.
pub fn qpoch_infinite_recip<S: Real>(a: S, base: S, cfg: &TruncationConfig) -> Result<S> {
    check_base(base)?;
    let mut rule = StopRule::new(cfg);
    let mut power = a;
    let mut acc = S::one();
    for _ in 0..cfg.max_terms() {
        acc = acc / (S::one() - power);
        if acc == S::zero() || rule.settled(power, S::one()) {
            return Ok(acc);
        }
        power = power * base;
    }
    Err(QError::Convergence {
        what: "reciprocal q-Pochhammer product",
        terms: cfg.max_terms(),
        partial: to_f64(acc),
    })
}

/// The q-gamma function `Gamma_b(x) = (b;b)_inf / (b^x;b)_inf * (1-b)^(1-x)`
/// for `x > 0`.
pub fn q_gamma<S: Real>(x: S, base: S, cfg: &TruncationConfig) -> Result<S> {
    check_base(base)?;
    if x.is_nan() || x <= S::zero() {
        return Err(QError::domain(format!(
            "q-gamma is only provided for positive arguments (got {x})"
        )));
    }
    let num = qpoch_infinite(base, base, cfg)?;
    let den = qpoch_infinite(pow_real(base, x), base, cfg)?;
    Ok(num / den * pow_real(S::one() - base, S::one() - x))
}

/// The entire q-exponential `E_b(t) = sum_n b^C(n,2) t^n / (b;b)_n`.
///
/// Equal to `(-t; b)_inf`.
pub fn q_exp_entire<S: Real>(t: S, base: S, cfg: &TruncationConfig) -> Result<S> {
    check_base(base)?;
    let mut sum = CompensatedSum::new();
    let mut rule = StopRule::new(cfg);
    let mut term = S::one();
    let mut bn = S::one(); // b^n
    for n in 0..cfg.max_terms() {
        sum += term;
        if rule.settled(term, sum.value()) {
            return Ok(sum.value());
        }
        // term_{n+1} = term_n * b^n t / (1 - b^{n+1})
        let next_power = bn * base;
        term = term * bn * t / (S::one() - next_power);
        bn = next_power;
        if n > 0 && term == S::zero() {
            return Ok(sum.value());
        }
    }
    Err(QError::Convergence {
        what: "entire q-exponential",
        terms: cfg.max_terms(),
        partial: to_f64(sum.value()),
    })
}

/// The small q-exponential `e_b(t) = sum_n t^n / (b;b)_n` for `|t| < 1`.
///
/// Equal to `1 / (t; b)_inf`.
pub fn q_exp_disc<S: Real>(t: S, base: S, cfg: &TruncationConfig) -> Result<S> {
    check_base(base)?;
    if t.is_nan() || t.abs() >= S::one() {
        return Err(QError::domain(format!(
            "the small q-exponential needs |t| < 1 (got {t})"
        )));
    }
    let mut sum = CompensatedSum::new();
    let mut rule = StopRule::new(cfg);
    let mut term = S::one();
    let mut bn = S::one();
    for _ in 0..cfg.max_terms() {
        sum += term;
        if rule.settled(term, sum.value()) {
            return Ok(sum.value());
        }
        bn = bn * base;
        term = term * t / (S::one() - bn);
    }
    Err(QError::Convergence {
        what: "small q-exponential",
        terms: cfg.max_terms(),
        partial: to_f64(sum.value()),
    })
}

/// `(b; b)_n` for `n = 0..=max`, a table reused by several series.
pub(crate) fn qpoch_table<S: Real>(base: S, max: usize) -> Vec<S> {
    let mut table = Vec::with_capacity(max + 1);
    let mut acc = S::one();
    let mut power = S::one();
    table.push(acc);
    for _ in 0..max {
        power = power * base;
        acc = acc * (S::one() - power);
        table.push(acc);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> TruncationConfig {
        TruncationConfig::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(q_bracket(2.0, 0.5).unwrap(), 1.5);
        assert_eq!(q_bracket(3.0, 0.5).unwrap(), 1.75);
        let b = 1.0 - 1e-8;
        for n in 1..10 {
            assert!((q_bracket(n as f64, b).unwrap() - n as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn bracket_rejects_bad_base() {
        for b in [0.0, 1.0, 1.5, -0.2] {
            assert!(matches!(q_bracket(2.0, b), Err(QError::Domain(_))));
        }
    }

    #[test]
    fn bracket_recursion() {
        for &b in &[0.1, 0.5, 0.93] {
            for n in 0..30 {
                let lhs = q_int(n + 1, b).unwrap();
                let rhs = 1.0 + b * q_int(n, b).unwrap();
                assert!(rel(lhs, rhs) < 4.0 * f64::EPSILON, "n={n} b={b}");
            }
        }
    }

    #[test]
    fn factorial_examples() {
        assert_eq!(q_factorial(0, 0.3).unwrap(), 1.0);
        assert_eq!(q_factorial(3, 0.5).unwrap(), 2.625);
        assert!((q_factorial(4, 1.0f64 - 1e-8).unwrap() - 24.0).abs() < 1e-5);
        for n in 1..15 {
            let lhs = q_factorial(n, 0.7).unwrap();
            let rhs = q_int(n as i64, 0.7).unwrap() * q_factorial(n - 1, 0.7).unwrap();
            assert!(rel(lhs, rhs) < 1e-15);
        }
    }

    #[test]
    fn finite_pochhammer() {
        assert_eq!(qpoch_finite(7.0, 0.3, 0), 1.0);
        assert_eq!(qpoch_finite(0.5, 0.5, 2), 0.375);
        for n in 0..=12u32 {
            let b = 0.6;
            let lhs = qpoch_finite(b, b, n);
            let rhs = (1.0f64 - b).powi(n as i32) * q_factorial(n, b).unwrap();
            assert!(rel(lhs, rhs) < 1e-14);
        }
    }

    #[test]
    fn infinite_pochhammer() {
        assert_eq!(qpoch_infinite(0.0, 0.4, &cfg()).unwrap(), 1.0);
        // Euler's function at 1/2, reference value to 20 digits.
        let phi = qpoch_infinite(0.5, 0.5, &cfg()).unwrap();
        assert!(rel(phi, 0.288_788_095_086_602_42) < 1e-15);
    }

    #[test]
    fn infinite_pochhammer_reports_partial_value() {
        let tight = TruncationConfig::new(1e-15, 8, 60).unwrap();
        match qpoch_infinite(0.5, 0.9, &tight) {
            Err(QError::Convergence { terms, partial, .. }) => {
                assert_eq!(terms, 8);
                assert!(partial > 0.0 && partial < 1.0);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn gamma_examples() {
        let c = cfg();
        assert!((q_gamma(1.0f64, 0.3, &c).unwrap() - 1.0).abs() < 1e-15);
        assert!((q_gamma(2.0f64, 0.25, &c).unwrap() - 1.0).abs() < 1e-15);
        assert!((q_gamma(3.0f64, 0.25, &c).unwrap() - 1.25).abs() < 1e-14);
        assert!(matches!(q_gamma(0.0, 0.5, &c), Err(QError::Domain(_))));
        assert!(matches!(q_gamma(-1.5, 0.5, &c), Err(QError::Domain(_))));
    }

    #[test]
    fn exponential_examples() {
        let c = cfg();
        assert_eq!(q_exp_entire(0.0, 0.4, &c).unwrap(), 1.0);
        assert_eq!(q_exp_disc(0.0, 0.4, &c).unwrap(), 1.0);
        assert!(matches!(q_exp_disc(1.0, 0.4, &c), Err(QError::Domain(_))));
        let b = 1.0 - 1e-6;
        // Both q-exponentials tend to exp once the argument is scaled by 1 - b.
        let e = q_exp_entire(0.3 * (1.0 - b), b, &c).unwrap();
        assert!((e - 0.3f64.exp()).abs() < 1e-5);
        let e = q_exp_disc(0.3 * (1.0 - b), b, &c).unwrap();
        assert!((e - 0.3f64.exp()).abs() < 1e-5);
        let t = 0.4;
        let prod = qpoch_infinite(-t, 0.5, &c).unwrap();
        assert!(rel(q_exp_entire(t, 0.5, &c).unwrap(), prod) < 1e-15);
        let recip = qpoch_infinite_recip(t, 0.5, &c).unwrap();
        assert!(rel(q_exp_disc(t, 0.5, &c).unwrap(), recip) < 1e-15);
        let mut prev = 0.0;
        for i in 0..=9 {
            let v = q_exp_disc(0.1 * i as f64, 0.5, &c).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }
}
