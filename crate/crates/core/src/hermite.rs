//! The q-deformed Hermite polynomials `H_n(xi)`.
//!
//! They are fixed by the three-term recursion
//! `H_{n+1} = 2 q^{-1/2} q^{-2n} xi H_n - 2 q^{-2} [n] H_{n-1}` with
//! `H_0 = 1`, `H_1 = 2 q^{-1/2} xi` and `[n]` in base `q^-2`. Every routine
//! here works internally on [`Scaled`] values, since factors such as
//! `q^{-2 C(n,2)}` leave the double range long before the polynomial values
//! do.

use serde::{Deserialize, Serialize};

use crate::config::QParameter;
use crate::error::{QError, Result};
use crate::qcore::{q_factorial, q_int, qpoch_finite};
use crate::real::{choose2, lit, powi, CompensatedSum, Real, Scaled};

/// Largest supported degree.
pub const MAX_DEGREE: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMethod {
    Recursion,
    ClosedForm,
}

pub(crate) fn check_degree(n: u32) -> Result<()> {
    if n > MAX_DEGREE {
        Err(QError::domain(format!(
            "degree {n} exceeds the supported maximum {MAX_DEGREE}"
        )))
    } else {
        Ok(())
    }
}

/// Converts a scaled value, failing only when it is too large to represent.
pub(crate) fn finish<S: Real>(v: Scaled<S>, what: &'static str) -> Result<S> {
    if v.log2_abs() > 1020.0 {
        return Err(QError::Overflow { what });
    }
    Ok(v.to_scalar())
}

/// `H_0(xi), ..., H_nmax(xi)` by the recursion.
pub fn hermite_sequence<S: Real>(nmax: u32, xi: S, qp: &QParameter<S>) -> Result<Vec<Scaled<S>>> {
    check_degree(nmax.saturating_sub(1))?;
    let q = qp.q();
    let x = Scaled::new(xi);
    let two = lit::<S>(2.0);
    let mut out = Vec::with_capacity(nmax as usize + 1);
    out.push(Scaled::one());
    if nmax == 0 {
        return Ok(out);
    }
    out.push(Scaled::pow_half(q, -1) * two * x);
    let b_scale = two * qp.p2();
    for n in 1..nmax as usize {
        let a = Scaled::pow_half(q, -1 - 4 * n as i64) * two;
        let b = Scaled::new(b_scale * q_int(n as i64, qp.p2())?);
        let next = a * x * out[n] - b * out[n - 1];
        out.push(next);
    }
    Ok(out)
}

/// `H_n(xi)` in scaled form.
pub fn hermite_eval_scaled<S: Real>(
    n: u32,
    xi: S,
    qp: &QParameter<S>,
    method: EvalMethod,
) -> Result<Scaled<S>> {
    check_degree(n)?;
    match method {
        EvalMethod::Recursion => Ok(hermite_sequence(n, xi, qp)?[n as usize]),
        EvalMethod::ClosedForm => hermite_coefficients(n, qp)?.eval_scaled(xi),
    }
}

/// `H_n(xi)`.
pub fn hermite_eval<S: Real>(n: u32, xi: S, qp: &QParameter<S>, method: EvalMethod) -> Result<S> {
    finish(hermite_eval_scaled(n, xi, qp, method)?, "q-Hermite polynomial value")
}

/// Dense coefficients of `H_n` in powers of `xi`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialCoeffs<S> {
    degree: u32,
    coeffs: Vec<Scaled<S>>,
}

impl<S: Real> PolynomialCoeffs<S> {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Coefficient of `xi^k` in scaled form.
    pub fn scaled(&self, k: usize) -> Scaled<S> {
        self.coeffs.get(k).copied().unwrap_or_else(Scaled::zero)
    }

    /// Coefficient of `xi^k`; may underflow to zero for large degrees.
    pub fn coefficient(&self, k: usize) -> S {
        self.scaled(k).to_scalar()
    }

    /// All coefficients, lowest power first.
    pub fn to_vec(&self) -> Vec<S> {
        self.coeffs.iter().map(Scaled::to_scalar).collect()
    }

    pub fn leading(&self) -> Scaled<S> {
        self.scaled(self.degree as usize)
    }

    pub fn eval_scaled(&self, xi: S) -> Result<Scaled<S>> {
        let terms: Vec<_> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, &c)| c * Scaled::powi(xi, k as i64))
            .collect();
        Ok(Scaled::sum(&terms))
    }

    pub fn eval(&self, xi: S) -> Result<S> {
        finish(self.eval_scaled(xi)?, "q-Hermite polynomial value")
    }
}

/// Explicit coefficients of `H_n`: the power `xi^{n-2k}` carries
/// `q^{-n/2} q^{-k} q^{-2C(n-2k,2)} 2^{n-k} (-1)^k [n]! / ([2]^k [n-2k]! [k]_{q^-4}!)`.
pub fn hermite_coefficients<S: Real>(n: u32, qp: &QParameter<S>) -> Result<PolynomialCoeffs<S>> {
    check_degree(n)?;
    let q = qp.q();
    let p2 = qp.p2();
    let p4 = qp.p4();
    let n_i = n as i64;
    let two_bracket = q_int(2, p2)?;
    let mut coeffs = vec![Scaled::zero(); n as usize + 1];
    for k in 0..=n_i / 2 {
        let j = n_i - 2 * k;
        // [n]! / [n-2k]! as a product of the top 2k brackets.
        let mut ratio = Scaled::one();
        for i in (j + 1)..=n_i {
            ratio = ratio * q_int(i, p2)?;
        }
        ratio = ratio / Scaled::powi(two_bracket, k);
        ratio = ratio / Scaled::new(q_factorial(k as u32, p4)?);
        let mut c = Scaled::pow_half(q, -n_i - 2 * k - 4 * choose2(j))
            * Scaled::powi(lit::<S>(2.0), n_i - k)
            * ratio;
        if k % 2 == 1 {
            c = -c;
        }
        coeffs[j as usize] = c;
    }
    Ok(PolynomialCoeffs { degree: n, coeffs })
}

/// Coefficient of `t^n` in `E_{q^-2}(xi t) e_{q^-4}(t^2 q / (2(1-q^2)))`,
/// from the Cauchy product of the two series.
///
/// Equals `q^{n/2} 2^{-n} H_n(xi) / (q^-2; q^-2)_n`. Both factor series are
/// entire in the relevant variable here, and only finitely many terms enter
/// a given coefficient, so no truncation policy is needed.
pub fn generating_coefficient<S: Real>(n: u32, xi: S, qp: &QParameter<S>) -> Result<S> {
    check_degree(n)?;
    let q = qp.q();
    let p = qp.p2();
    let p4 = qp.p4();
    let a = q / (lit::<S>(2.0) * (S::one() - q * q));
    let mut sum = CompensatedSum::new();
    for i in 0..=(n / 2) {
        let j = n - 2 * i;
        let e_coeff = powi(p, choose2(j as i64)) * powi(xi, j as i64) / qpoch_finite(p, p, j);
        let small_coeff = powi(a, i as i64) / qpoch_finite(p4, p4, i);
        sum += e_coeff * small_coeff;
    }
    Ok(sum.value())
}

/// The right-hand side `q^{n/2} 2^{-n} H_n(xi) / (q^-2; q^-2)_n` that
/// [`generating_coefficient`] should reproduce.
pub fn generating_target<S: Real>(n: u32, xi: S, qp: &QParameter<S>) -> Result<S> {
    let h = hermite_eval_scaled(n, xi, qp, EvalMethod::Recursion)?;
    let pref = Scaled::pow_half(qp.q(), n as i64) * Scaled::powi(lit::<S>(0.5), n as i64)
        / Scaled::new(qpoch_finite(qp.p2(), qp.p2(), n));
    finish(pref * h, "generating function coefficient")
}

/// Both sides of the Christoffel-Darboux identity
/// `sum_{m<=n} H_m(x) H_m(y) / (2^m [m]!)
///  = q^{1/2} q^{2n} / (2^{n+1} [n]!) (H_{n+1}(x) H_n(y) - H_{n+1}(y) H_n(x)) / (x - y)`.
pub fn christoffel_darboux_sides<S: Real>(
    n: u32,
    xi1: S,
    xi2: S,
    qp: &QParameter<S>,
) -> Result<(S, S)> {
    check_degree(n)?;
    if xi1 == xi2 {
        return Err(QError::domain(
            "Christoffel-Darboux needs two distinct points",
        ));
    }
    let h1 = hermite_sequence(n + 1, xi1, qp)?;
    let h2 = hermite_sequence(n + 1, xi2, qp)?;
    let two = lit::<S>(2.0);
    let p2 = qp.p2();
    let mut lhs = Vec::with_capacity(n as usize + 1);
    for m in 0..=n as usize {
        let norm = Scaled::powi(two, m as i64) * q_factorial(m as u32, p2)?;
        lhs.push(h1[m] * h2[m] / norm);
    }
    let lhs = finish(Scaled::sum(&lhs), "Christoffel-Darboux sum")?;
    let k = n as usize;
    let numerator = h1[k + 1] * h2[k] - h2[k + 1] * h1[k];
    let pref = Scaled::pow_half(qp.q(), 1 + 4 * n as i64)
        / (Scaled::powi(two, n as i64 + 1) * q_factorial(n, p2)?);
    let rhs = finish(pref * numerator, "Christoffel-Darboux kernel")? / (xi1 - xi2);
    Ok((lhs, rhs))
}

/// `|LHS - RHS|` of the Christoffel-Darboux identity.
pub fn christoffel_darboux_residual<S: Real>(
    n: u32,
    xi1: S,
    xi2: S,
    qp: &QParameter<S>,
) -> Result<S> {
    let (l, r) = christoffel_darboux_sides(n, xi1, xi2, qp)?;
    Ok((l - r).abs())
}

/// `h~_n(x'; q^-2) = H_n(xi) (1 - q^-2)^{n/2} q^{n^2} / 2^{n/2}` with
/// `xi = x' / sqrt(2 (q - 1/q))`.
pub fn to_hermite_ii<S: Real>(n: u32, xprime: S, qp: &QParameter<S>) -> Result<S> {
    check_degree(n)?;
    let xi = xprime / (lit::<S>(2.0) * qp.gap()).sqrt();
    let h = hermite_eval_scaled(n, xi, qp, EvalMethod::Recursion)?;
    let ni = n as i64;
    let factor = Scaled::pow_half(S::one() - qp.p2(), ni)
        * Scaled::powi(qp.q(), ni * ni)
        * Scaled::pow_half(lit::<S>(0.5), ni);
    finish(h * factor, "q-Hermite II value")
}

/// `2^n [n]!` in base `q^-2`, the squared norm of `H_n`.
pub fn norm_squared<S: Real>(n: u32, qp: &QParameter<S>) -> Result<Scaled<S>> {
    Ok(Scaled::powi(lit::<S>(2.0), n as i64) * q_factorial(n, qp.p2())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(q: f64) -> QParameter<f64> {
        QParameter::from_f64(q).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn low_degrees() {
        let q = qp(2f64.sqrt());
        for m in [EvalMethod::Recursion, EvalMethod::ClosedForm] {
            assert_eq!(hermite_eval(0, 3.3, &q, m).unwrap(), 1.0);
            let h2 = hermite_eval(2, 1.0, &q, m).unwrap();
            assert!((h2 - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn methods_agree() {
        let q = qp(1.2);
        let r = hermite_eval(4, 0.7, &q, EvalMethod::Recursion).unwrap();
        let c = hermite_eval(4, 0.7, &q, EvalMethod::ClosedForm).unwrap();
        assert!(rel(r, c) < 1e-12);
    }

    #[test]
    fn reference_values() {
        let v = hermite_eval(6, 0.7, &qp(1.2), EvalMethod::Recursion).unwrap();
        assert!(rel(v, 4.471_129_783_776_003) < 1e-13);
        let v = hermite_eval(20, 2.5, &qp(2.0), EvalMethod::Recursion).unwrap();
        assert!(rel(v, -0.070_882_231_580_658_185) < 1e-12);
        let v = hermite_eval(20, 2.5, &qp(2.0), EvalMethod::ClosedForm).unwrap();
        assert!(rel(v, -0.070_882_231_580_658_185) < 1e-10);
    }

    #[test]
    fn degree_cap() {
        let q = qp(1.3);
        assert!(hermite_eval(MAX_DEGREE, 0.5, &q, EvalMethod::Recursion).is_ok());
        assert!(matches!(
            hermite_eval(MAX_DEGREE + 1, 0.5, &q, EvalMethod::Recursion),
            Err(QError::Domain(_))
        ));
    }

    #[test]
    fn coefficient_structure() {
        let q = qp(1.3);
        let h1 = hermite_coefficients(1, &q).unwrap().to_vec();
        assert_eq!(h1[0], 0.0);
        assert!(rel(h1[1], 2.0 / 1.3f64.sqrt()) < 1e-15);
        let c = hermite_coefficients(7, &q).unwrap();
        for k in (0..=7).step_by(2) {
            assert!(c.scaled(k).is_zero());
        }
        let classical = hermite_coefficients(2, &qp(1.0 + 1e-7)).unwrap().to_vec();
        assert!((classical[0] + 2.0).abs() < 1e-5);
        assert!(classical[1].abs() == 0.0);
        assert!((classical[2] - 4.0).abs() < 1e-5);
    }

    #[test]
    fn leading_coefficient_survives_underflow() {
        let q = qp(2.0);
        let c = hermite_coefficients(64, &q).unwrap();
        // 2^64 q^{-32} q^{-64*63}
        let expected = 64.0 - 32.0 - 64.0 * 63.0;
        assert!((c.leading().log2_abs() - expected).abs() < 1e-9);
        assert_eq!(c.coefficient(64), 0.0);
    }

    #[test]
    fn generating_examples() {
        let q = qp(1.3);
        assert_eq!(generating_coefficient(0, 0.9, &q).unwrap(), 1.0);
        let g = generating_coefficient(1, 0.5, &q).unwrap();
        let h1 = hermite_eval(1, 0.5, &q, EvalMethod::Recursion).unwrap();
        assert!(rel(g, 1.3f64.sqrt() * 0.5 * h1 / (1.0 - q.p2())) < 1e-12);
        let q = qp(1.5);
        let g = generating_coefficient(6, 1.1, &q).unwrap();
        assert!(rel(g, generating_target(6, 1.1, &q).unwrap()) < 1e-10);
    }

    #[test]
    fn christoffel_darboux_examples() {
        let q = qp(1.7);
        assert!(christoffel_darboux_residual(0, 1.0, -1.0, &q).unwrap() < 1e-15);
        let q = qp(1.2);
        let (l, _) = christoffel_darboux_sides(5, 0.3, 1.7, &q).unwrap();
        let r = christoffel_darboux_residual(5, 0.3, 1.7, &q).unwrap();
        assert!(r < 1e-10 * l.abs());
        assert_eq!(r, christoffel_darboux_residual(5, 1.7, 0.3, &q).unwrap());
        assert!(matches!(
            christoffel_darboux_residual(3, 0.4, 0.4, &q),
            Err(QError::Domain(_))
        ));
    }

    #[test]
    fn hermite_ii_low_degrees() {
        let q = qp(1.3);
        assert_eq!(to_hermite_ii(0, 0.8, &q).unwrap(), 1.0);
        assert!((to_hermite_ii(1, 1.0, &q).unwrap() - 1.0).abs() < 1e-15);
        for n in 0..8 {
            let a = to_hermite_ii(n, 0.6, &q).unwrap();
            let b = to_hermite_ii(n, -0.6, &q).unwrap();
            assert_eq!(a, if n % 2 == 0 { b } else { -b });
        }
    }
}
