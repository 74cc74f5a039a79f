use num_complex::Complex;
use serde::Serialize;

use super::lattice::{position_eigenvalue, LatticeSite, Sign};
use super::model::OscillatorModel;
use crate::config::{QParameter, TruncationConfig};
use crate::error::Result;
use crate::real::{powi, to_f64, Real};

/// Residual of `q^{1/2} X P - q^{-1/2} P X - i U` at one lattice cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlgebraResidual {
    pub cutoff: i64,
    pub residual: f64,
}

/// Residuals at increasing cutoffs on the same interior block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgebraReport {
    pub interior: i64,
    pub rows: Vec<AlgebraResidual>,
    /// Whether the largest cutoff gives a smaller residual than the smallest.
    pub decreasing: bool,
}

/// `<mu1,t1| P |mu2,t2>` with `P = sum sigma q^l |l,sigma><l,sigma|` over the
/// retained momentum indices.
fn momentum_element<S: Real>(model: &OscillatorModel<S>, a: LatticeSite, b: LatticeSite) -> Complex<S> {
    let (lo, hi) = model.momentum_window();
    let q = model.qp().q();
    let mut acc = Complex::new(S::zero(), S::zero());
    for l in lo..=hi {
        for sigma in Sign::BOTH {
            let m = LatticeSite::new(l, sigma);
            let w = sigma.scalar::<S>() * powi(q, l);
            acc = acc + model.fourier_amplitude(m, a) * model.fourier_amplitude(m, b).conj() * w;
        }
    }
    acc
}

/// Largest entry of `q^{1/2} X P - q^{-1/2} P X - i U` between position
/// sites with `|nu| <= interior`. `X` is diagonal in this basis and
/// `U |nu,tau> = |nu+1,tau>`.
pub fn heisenberg_residual<S: Real>(model: &OscillatorModel<S>, interior: i64) -> S {
    let qp = model.qp();
    let sq = qp.q().sqrt();
    let sites: Vec<LatticeSite> = (-interior..=interior)
        .flat_map(|nu| Sign::BOTH.map(|t| LatticeSite::new(nu, t)))
        .collect();
    let mut worst = S::zero();
    for &a in &sites {
        for &b in &sites {
            let p = momentum_element(model, a, b);
            let xa = position_eigenvalue(a, qp);
            let xb = position_eigenvalue(b, qp);
            let mut v = p * (sq * xa - xb / sq);
            if a.index == b.index + 1 && a.sign == b.sign {
                v.im = v.im - S::one();
            }
            worst = worst.max(v.norm());
        }
    }
    worst
}

/// Runs [`heisenberg_residual`] for each cutoff.
pub fn algebra_report<S: Real>(
    qp: &QParameter<S>,
    cfg: &TruncationConfig,
    cutoffs: &[i64],
    interior: i64,
) -> Result<AlgebraReport> {
    let mut rows = Vec::with_capacity(cutoffs.len());
    for &cutoff in cutoffs {
        let model = OscillatorModel::new(*qp, cfg.with_lattice_cutoff(cutoff)?)?;
        let residual = to_f64(heisenberg_residual(&model, interior));
        rows.push(AlgebraResidual { cutoff, residual });
    }
    let decreasing = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) if rows.len() > 1 => b.residual < a.residual,
        _ => false,
    };
    Ok(AlgebraReport {
        interior,
        rows,
        decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_small_on_interior() {
        let qp = QParameter::<f64>::from_f64(1.3).unwrap();
        let cfg = TruncationConfig::default().with_lattice_cutoff(40).unwrap();
        let model = OscillatorModel::new(qp, cfg).unwrap();
        assert!(heisenberg_residual(&model, 4) < 1e-9);
    }

    #[test]
    fn report_shrinks_with_cutoff() {
        let qp = QParameter::<f64>::from_f64(1.3).unwrap();
        let r = algebra_report(&qp, &TruncationConfig::default(), &[40, 80], 6).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.decreasing, "{r:?}");
    }
}
