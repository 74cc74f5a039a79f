use serde::Serialize;

use crate::config::{QParameter, TruncationConfig};
use crate::error::Result;
use crate::hermite::{check_degree, to_hermite_ii};
use crate::qcore::{qpoch_finite, qpoch_infinite_recip};
use crate::real::{powi, Real, Scaled};

/// Which lattice points `+-Q^k` enter the q-Hermite II orthogonality sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SummationRange {
    /// `k` over all integers (truncated at the lattice cutoff).
    AllIntegers,
    /// `k >= 0` only.
    NonNegative,
}

/// Result of the q-Hermite II orthogonality sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HermiteIiSum<S> {
    pub sum: S,
    /// `sum Q^{n^2} / (Q;Q)_n`, reported on the diagonal only.
    pub n_tilde: Option<S>,
}

/// `omega(Q^k) = 1 / (-Q^{2k}; Q^2)_inf` for `k` in `[lo, hi]`, with `Q = q^-2`.
///
/// Grows with `k` towards 1. Negative `k` use the ratio
/// `omega(k) = omega(k+1) / (1 + Q^{2k})`, kept in scaled form since that
/// side underflows quickly.
pub fn hermite_ii_weights<S: Real>(
    lo: i64,
    hi: i64,
    qp: &QParameter<S>,
    cfg: &TruncationConfig,
) -> Result<Vec<Scaled<S>>> {
    let big_q = qp.p2();
    let base = big_q * big_q;
    let w0 = Scaled::new(qpoch_infinite_recip(-S::one(), base, cfg)?);
    let span = (hi - lo + 1).max(0) as usize;
    let mut out = vec![Scaled::zero(); span];
    for k in lo.max(0)..=hi {
        out[(k - lo) as usize] =
            Scaled::new(qpoch_infinite_recip(-powi(big_q, 2 * k), base, cfg)?);
    }
    let mut w = w0;
    for k in (lo..0).rev() {
        w = w / (S::one() + powi(big_q, 2 * k));
        if k <= hi {
            out[(k - lo) as usize] = w;
        }
    }
    Ok(out)
}

/// `sum_k sum_{x = +-Q^k} h~_n(x) h~_m(x) omega(Q^k) Q^k` with `Q = q^-2`.
pub fn hermite_ii_orthogonality<S: Real>(
    n: u32,
    m: u32,
    range: SummationRange,
    qp: &QParameter<S>,
    cfg: &TruncationConfig,
) -> Result<HermiteIiSum<S>> {
    check_degree(n.max(m))?;
    let cutoff = cfg.lattice_cutoff();
    let lo = match range {
        SummationRange::AllIntegers => -cutoff,
        SummationRange::NonNegative => 0,
    };
    let big_q = qp.p2();
    let weights = hermite_ii_weights(lo, cutoff, qp, cfg)?;
    let mut terms = Vec::with_capacity(2 * weights.len());
    for (i, w) in weights.iter().enumerate() {
        let k = lo + i as i64;
        let x = powi(big_q, k);
        for point in [x, -x] {
            let a = to_hermite_ii(n, point, qp)?;
            let b = to_hermite_ii(m, point, qp)?;
            terms.push(*w * Scaled::new(a * b) * Scaled::powi(big_q, k));
        }
    }
    let sum = Scaled::sum(&terms).to_scalar();
    let n_tilde = (n == m).then(|| {
        let ni = n as i64;
        sum * powi(big_q, ni * ni) / qpoch_finite(big_q, big_q, n)
    });
    Ok(HermiteIiSum { sum, n_tilde })
}
