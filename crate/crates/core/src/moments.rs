//! Moments of the oscillator measures and the expansion of powers in the
//! q-Hermite basis.
use serde::Serialize;

use crate::config::{QParameter, TruncationConfig};
use crate::error::{QError, Result};
use crate::hermite::{check_degree, finish, hermite_sequence};
use crate::oscillator::{DiscreteMeasure, LatticeSite, OscillatorModel, Sign, XiScaling};
use crate::qcore::{q_gamma, q_int, qpoch_finite};
use crate::real::{choose2, lit, to_f64, CompensatedSum, Real, Scaled};

/// `xi^k = sum_j b_j H_{k-2j}(xi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteExpansion<S> {
    power: u32,
    coeffs: Vec<Scaled<S>>,
}

impl<S: Real> HermiteExpansion<S> {
    pub fn power(&self) -> u32 {
        self.power
    }

    /// `b_j`, the coefficient of `H_{k-2j}`.
    pub fn coefficient(&self, j: usize) -> S {
        self.coeffs[j].to_scalar()
    }

    pub fn scaled(&self, j: usize) -> Scaled<S> {
        self.coeffs[j]
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `H_0`; zero for odd powers.
    pub fn constant_term(&self) -> S {
        if self.power % 2 == 1 {
            S::zero()
        } else {
            self.coefficient(self.coeffs.len() - 1)
        }
    }

    /// `sum_j b_j H_{k-2j}(xi)`.
    pub fn reconstruct(&self, xi: S, qp: &QParameter<S>) -> Result<S> {
        let h = hermite_sequence(self.power, xi, qp)?;
        let terms: Vec<Scaled<S>> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &b)| b * h[self.power as usize - 2 * j])
            .collect();
        finish(Scaled::sum(&terms), "power reconstruction")
    }
}

/// Expands `xi^k` with
/// `b_j = q^{k^2 - 2j^2 - k/2} 2^{j-k} (p;p)_k / ((p;p)_{k-2j} (p^2;p^2)_j (1-p)^j)`,
/// `p = q^-2`.
pub fn expand_power<S: Real>(k: u32, qp: &QParameter<S>) -> Result<HermiteExpansion<S>> {
    check_degree(k)?;
    let p = qp.p2();
    let p4 = qp.p4();
    let ki = k as i64;
    let top = Scaled::new(qpoch_finite(p, p, k));
    let coeffs = (0..=k / 2)
        .map(|j| {
            let ji = j as i64;
            Scaled::pow_half(qp.q(), 2 * ki * ki - 4 * ji * ji - ki)
                * Scaled::powi(lit::<S>(2.0), ji - ki)
                * top
                / (Scaled::new(qpoch_finite(p, p, k - 2 * j))
                    * Scaled::new(qpoch_finite(p4, p4, j))
                    * Scaled::powi(S::one() - p, ji))
        })
        .collect();
    Ok(HermiteExpansion { power: k, coeffs })
}

fn check_even(order: u32) -> Result<u32> {
    if order % 2 == 1 {
        return Err(QError::domain(format!(
            "closed-form moments need an even order (got {order})"
        )));
    }
    check_degree(order)?;
    Ok(order / 2)
}

/// `L[xi^{2n}] = q^{C(2n,2)} 2^{-n} [1][3]...[2n-1]`, brackets in base `q^-2`.
pub fn moment_closed<S: Real>(order: u32, qp: &QParameter<S>) -> Result<S> {
    let n = check_even(order)?;
    let mut v = Scaled::pow_half(qp.q(), 2 * choose2(order as i64))
        * Scaled::powi(lit::<S>(0.5), n as i64);
    for i in 1..=n as i64 {
        v = v * q_int(2 * i - 1, qp.p2())?;
    }
    finish(v, "closed-form moment")
}

/// `L[xi^{2n}] = q^{C(2n,2)} 2^{-n} [2]^n Gamma_{q^-4}(n + 1/2) / Gamma_{q^-4}(1/2)`.
pub fn moment_qgamma<S: Real>(order: u32, qp: &QParameter<S>, cfg: &TruncationConfig) -> Result<S> {
    let n = check_even(order)?;
    let half = lit::<S>(0.5);
    let ratio = q_gamma(lit::<S>(n as f64) + half, qp.p4(), cfg)? / q_gamma(half, qp.p4(), cfg)?;
    let v = Scaled::pow_half(qp.q(), 2 * choose2(order as i64))
        * Scaled::powi(half, n as i64)
        * Scaled::powi(q_int(2, qp.p2())?, n as i64)
        * ratio;
    finish(v, "q-gamma moment")
}

/// The moment functional on any order: [`moment_closed`] for even orders,
/// zero for odd ones.
pub fn moment_exact<S: Real>(order: u32, qp: &QParameter<S>) -> Result<S> {
    if order % 2 == 1 {
        check_degree(order)?;
        Ok(S::zero())
    } else {
        moment_closed(order, qp)
    }
}

/// A moment evaluated as a lattice sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentSum<S> {
    pub value: S,
    /// Largest single term divided by `|value|`.
    pub peak_ratio: f64,
    /// Set for even orders when `peak_ratio` exceeds the inverse series
    /// tolerance.
    pub cancellation: bool,
}

/// `sum_{nu,tau} xi^order mu^r(nu)` with `xi` the Hermite argument.
///
/// Terms are added in increasing `|xi|`, that is increasing `nu`, with the
/// two signs adjacent so odd orders cancel pairwise.
pub fn moment_measure<S: Real>(
    order: u32,
    model: &OscillatorModel<S>,
    measure: &DiscreteMeasure<S>,
) -> Result<MomentSum<S>> {
    check_degree(order)?;
    let qp = model.qp();
    let mut sum = CompensatedSum::new();
    let mut peak = S::zero();
    let mut mass = S::zero();
    let mut last = S::zero();
    for (nu, w) in measure.iter() {
        if w == S::zero() {
            continue;
        }
        for tau in [Sign::Plus, Sign::Minus] {
            let xi = XiScaling::Hermite.xi(LatticeSite::new(nu, tau), qp);
            let t = xi.powi(order as i32) * w;
            if !t.is_finite() {
                return Err(QError::Overflow { what: "moment summand" });
            }
            sum += t;
            peak = peak.max(t.abs());
            mass = mass + t.abs();
            last = t.abs();
        }
    }
    // The integrand must have died out at the large-|xi| end of the window.
    if last > lit::<S>(model.cfg().series_tol()) * mass {
        return Err(QError::Convergence {
            what: "moment lattice sum",
            terms: measure.iter().count(),
            partial: to_f64(sum.value()),
        });
    }
    let value = sum.value();
    let peak_ratio = to_f64(peak / value.abs());
    let cancellation = order.is_multiple_of(2) && peak_ratio * model.cfg().series_tol() > 1.0;
    Ok(MomentSum {
        value,
        peak_ratio,
        cancellation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::Parity;

    fn qp(q: f64) -> QParameter<f64> {
        QParameter::from_f64(q).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn low_power_expansions() {
        let q = qp(1.7);
        let e0 = expand_power(0, &q).unwrap();
        assert_eq!(e0.len(), 1);
        assert!((e0.coefficient(0) - 1.0).abs() < 1e-15);
        let e1 = expand_power(1, &q).unwrap();
        assert_eq!(e1.len(), 1);
        assert!(rel(e1.coefficient(0), 1.7f64.sqrt() / 2.0) < 1e-15);
        assert_eq!(e1.constant_term(), 0.0);
    }

    #[test]
    fn reconstruction_recovers_fourth_power() {
        let q = qp(1.3);
        let e = expand_power(4, &q).unwrap();
        for xi in [0.2, 1.0, 2.0] {
            assert!(rel(e.reconstruct(xi, &q).unwrap(), xi.powi(4)) < 1e-10);
        }
    }

    #[test]
    fn reconstruction_error_tracks_term_size() {
        use crate::dd::DoubleDouble;
        use num_traits::Float;
        for (q, kmax) in [(1.3, 12), (1.2, 12), (2.0, 9)] {
            let q = QParameter::<DoubleDouble>::from_f64(q).unwrap();
            for k in 0..=kmax {
                let e = expand_power(k, &q).unwrap();
                for xi in [0.2, 1.0, 2.0, -1.4] {
                    let x = DoubleDouble::from_f64(xi);
                    let h = hermite_sequence(k, x, &q).unwrap();
                    let scale: DoubleDouble = (0..e.len())
                        .map(|j| (e.scaled(j) * h[k as usize - 2 * j]).to_scalar().abs())
                        .fold(DoubleDouble::from_f64(0.0), |a, b| a + b);
                    let err = (e.reconstruct(x, &q).unwrap() - x.powi(k as i32)).abs();
                    assert!((err / scale).hi() < 1e-28, "q={} k={k} xi={xi}", q.as_f64());
                }
            }
        }
    }

    #[test]
    fn closed_moment_examples() {
        let q = qp(2f64.sqrt());
        assert_eq!(moment_closed(0, &q).unwrap(), 1.0);
        assert!(rel(moment_closed(2, &q).unwrap(), 0.707_106_781_186_547_5) < 1e-14);
        assert!(rel(moment_closed(4, &q).unwrap(), 3.5) < 1e-14);
        assert!(moment_closed(3, &q).is_err());
        assert_eq!(moment_exact(5, &q).unwrap(), 0.0);
    }

    #[test]
    fn qgamma_route_agrees() {
        let cfg = TruncationConfig::default();
        for q in [1.2, 2f64.sqrt(), 2.0] {
            let q = qp(q);
            for order in (0..=12).step_by(2) {
                let a = moment_closed(order, &q).unwrap();
                let b = moment_qgamma(order, &q, &cfg).unwrap();
                assert!(rel(a, b) < 1e-10, "q={} order={order}", q.q());
            }
        }
    }

    #[test]
    fn constant_term_is_the_moment() {
        let q = qp(1.3);
        for order in (0..=14).step_by(2) {
            let e = expand_power(order, &q).unwrap();
            assert!(rel(e.constant_term(), moment_closed(order, &q).unwrap()) < 1e-13);
        }
    }

    #[test]
    fn gaussian_limit() {
        let q = qp(1.0 + 1e-7);
        let mut dfact = 1.0;
        for n in 1..=5u32 {
            dfact *= (2 * n - 1) as f64;
            let target = dfact / 2f64.powi(n as i32);
            assert!(rel(moment_closed(2 * n, &q).unwrap(), target) < 1e-4);
        }
    }

    #[test]
    fn both_measures_give_the_same_moments() {
        let cfg = TruncationConfig::default();
        let model = OscillatorModel::new(qp(1.3), cfg).unwrap();
        for r in Parity::BOTH {
            let mu = model.measure(r);
            for order in 0..=12 {
                let m = moment_measure(order, &model, &mu).unwrap();
                let exact = moment_exact(order, model.qp()).unwrap();
                if order % 2 == 0 {
                    assert!(rel(m.value, exact) < 1e-6, "r={r:?} order={order}");
                    assert!(!m.cancellation);
                } else {
                    assert!(m.value.abs() < 1e-8);
                }
            }
        }
    }
}
