use serde::{Deserialize, Serialize};

use crate::config::{QParameter, TruncationConfig};
use crate::error::{QError, Result};
use crate::real::{lit, pow_half, powi, to_f64, CompensatedSum, Real};

/// A sign label `sigma` or `tau`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn scalar<S: Real>(self) -> S {
        match self {
            Sign::Plus => S::one(),
            Sign::Minus => -S::one(),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn from_value(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(QError::domain(format!("sign label must be +1 or -1 (got {v})"))),
        }
    }
}

/// A lattice site: index `l` with sign `sigma` for momentum, index `nu` with
/// sign `tau` for position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeSite {
    pub index: i64,
    pub sign: Sign,
}

impl LatticeSite {
    pub fn new(index: i64, sign: Sign) -> Self {
        Self { index, sign }
    }
}

/// Degeneracy label `r` of the oscillator ground states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub const BOTH: [Parity; 2] = [Parity::Even, Parity::Odd];

    pub fn r(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn from_r(r: u8) -> Result<Self> {
        match r {
            0 => Ok(Parity::Even),
            1 => Ok(Parity::Odd),
            _ => Err(QError::domain(format!("parity label r must be 0 or 1 (got {r})"))),
        }
    }

    /// Whether a position index lies on this parity's sublattice.
    pub fn contains(self, index: i64) -> bool {
        index.rem_euclid(2) == self.r() as i64
    }
}

/// Eigenvalue of `X` at a position site: `-tau q^{nu - 1/2} / (q - 1/q)`.
pub fn position_eigenvalue<S: Real>(site: LatticeSite, qp: &QParameter<S>) -> S {
    -site.sign.scalar::<S>() * pow_half(qp.q(), 2 * site.index - 1) / qp.gap()
}

/// The argument at which the Hermite polynomials are evaluated on a
/// position site: `-tau q^{nu - 1} / sqrt(2 (q - 1/q))`.
///
/// This is the position eigenvalue multiplied by `sqrt((1 - q^-2) / 2)`. With
/// it `sqrt(2 (q - 1/q)) xi` runs over the points `-tau q^{nu-1}`, and the
/// polynomials are orthogonal under both ground-state measures with norms
/// `2^n [n]!`.
pub fn hermite_argument<S: Real>(site: LatticeSite, qp: &QParameter<S>) -> S {
    -site.sign.scalar::<S>() * powi(qp.q(), site.index - 1) / (lit::<S>(2.0) * qp.gap()).sqrt()
}

/// Eigenvalue of `P` at a momentum site: `sigma q^l`.
pub fn momentum_eigenvalue<S: Real>(site: LatticeSite, qp: &QParameter<S>) -> S {
    site.sign.scalar::<S>() * powi(qp.q(), site.index)
}

/// Ground-state normalization `c0 = (sum_{l=-L..L} q^{-(l^2+l)})^{-1/2}`.
pub fn ground_c0<S: Real>(qp: &QParameter<S>, cfg: &TruncationConfig) -> Result<S> {
    let cutoff = cfg.lattice_cutoff();
    let mut sum = CompensatedSum::new();
    // Add from the outside in so that the small tail terms are not absorbed.
    let mut order: Vec<i64> = (-cutoff..=cutoff).collect();
    order.sort_by_key(|l| std::cmp::Reverse(l * l + l));
    for &l in &order {
        sum += powi(qp.q(), -(l * l + l));
    }
    let total = sum.value();
    let edge = powi(qp.q(), -(cutoff * cutoff - cutoff));
    if edge > cfg.tol::<S>() * total {
        return Err(QError::Convergence {
            what: "ground-state normalization sum",
            terms: (2 * cutoff + 1) as usize,
            partial: to_f64(total),
        });
    }
    Ok(S::one() / total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(q: f64) -> QParameter<f64> {
        QParameter::from_f64(q).unwrap()
    }

    #[test]
    fn position_eigenvalue_examples() {
        let q = qp(2f64.sqrt());
        let x = position_eigenvalue(LatticeSite::new(0, Sign::Plus), &q);
        assert!((x + 1.189_207_115_002_721).abs() < 1e-12);
        for nu in -5..5 {
            let a = position_eigenvalue(LatticeSite::new(nu, Sign::Plus), &q);
            let b = position_eigenvalue(LatticeSite::new(nu, Sign::Minus), &q);
            assert_eq!(a, -b);
            let next = position_eigenvalue(LatticeSite::new(nu + 1, Sign::Plus), &q);
            assert!(next < a);
        }
        let mut last = f64::INFINITY;
        for i in 0..20 {
            let q = qp(1.05 + 0.05 * i as f64);
            let x = position_eigenvalue(LatticeSite::new(0, Sign::Minus), &q);
            assert!(x < last);
            last = x;
        }
    }

    #[test]
    fn hermite_argument_rescales_position() {
        let q = qp(1.3);
        let scale = ((1.0 - q.p2()) / 2.0).sqrt();
        for nu in -4..6 {
            for s in Sign::BOTH {
                let site = LatticeSite::new(nu, s);
                let a = hermite_argument(site, &q);
                let b = position_eigenvalue(site, &q) * scale;
                assert!((a - b).abs() < 1e-14 * b.abs());
            }
        }
    }

    #[test]
    fn momentum_eigenvalue_examples() {
        let q = qp(1.5);
        assert_eq!(momentum_eigenvalue(LatticeSite::new(0, Sign::Plus), &q), 1.0);
        assert_eq!(momentum_eigenvalue(LatticeSite::new(2, Sign::Minus), &q), -2.25);
    }

    #[test]
    fn c0_examples() {
        let cfg = TruncationConfig::default();
        let c = ground_c0(&qp(2f64.sqrt()), &cfg).unwrap();
        assert!((c - 0.551_883_008_918_660_5).abs() < 1e-15);
        let c = ground_c0(&qp(10.0), &cfg).unwrap();
        assert!((c - 0.703_597_196_414_585_99).abs() < 1e-15);
        let wide = cfg.with_lattice_cutoff(120).unwrap();
        let a = ground_c0(&qp(1.3), &cfg).unwrap();
        let b = ground_c0(&qp(1.3), &wide).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn parity_and_sign_labels() {
        assert!(Parity::Even.contains(-4));
        assert!(Parity::Odd.contains(-3));
        assert!(Parity::from_r(2).is_err());
        assert!(Sign::from_value(0).is_err());
        assert_eq!(Sign::Plus.flip(), Sign::Minus);
    }
}
