use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use super::report::CheckRecord;
use super::Decimal;
use crate::config::{QParameter, TruncationConfig};
use crate::error::Result;
use crate::hermite::{
    christoffel_darboux_sides, generating_coefficient, generating_target, hermite_coefficients,
    hermite_eval, EvalMethod,
};
use crate::moments::{moment_closed, moment_measure, moment_qgamma};
use crate::oscillator::{
    hermite_ii_orthogonality, OscillatorModel, Parity, SummationRange, XiScaling,
};
use crate::qcore::q_int;
use crate::qtrig::{convention_validation, trig_orthogonality_relative, TrigConvention, TrigKind};
use crate::real::{lit, pow_half, powi, to_f64, Real};

/// Named groups of identity checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Recursion,
    Generating,
    Cd,
    Trig,
    Fourier,
    Orthogonality,
    Moments,
    All,
}

impl Suite {
    pub const PARTS: [Suite; 7] = [
        Suite::Recursion,
        Suite::Generating,
        Suite::Cd,
        Suite::Trig,
        Suite::Fourier,
        Suite::Orthogonality,
        Suite::Moments,
    ];
}

/// Inputs shared by every suite.
#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub q: Decimal,
    pub cfg: TruncationConfig,
    /// Highest degree in the orthogonality checks; moments run to `2 nmax`.
    pub nmax: u32,
    /// Replaces every per-check threshold when set.
    pub tol: Option<f64>,
}

impl SuiteParams {
    pub fn new(q: impl Into<Decimal>, cfg: TruncationConfig, nmax: u32) -> Self {
        Self {
            q: q.into(),
            cfg,
            nmax,
            tol: None,
        }
    }

    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

type Task<'a> = Box<dyn Fn() -> CheckRecord + Send + Sync + 'a>;

fn task<'a, F>(name: String, tag: &'a str, tol: f64, f: F) -> Task<'a>
where
    F: Fn() -> Result<f64> + Send + Sync + 'a,
{
    Box::new(move || match f() {
        Ok(r) => CheckRecord::new(name.clone(), tag, r, tol),
        Err(e) => CheckRecord::failed(name.clone(), tag, tol, &e),
    })
}

fn rel_diff<S: Real>(a: S, b: S) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == S::zero() {
        0.0
    } else {
        to_f64((a - b).abs() / scale)
    }
}

const XI_GRID: [f64; 6] = [-2.5, -1.0, -0.3, 0.4, 1.1, 2.5];
const CD_POINTS: [f64; 5] = [-1.3, -0.4, 0.2, 0.9, 1.7];

/// Runs a suite and returns its records sorted by name. Fails only when the
/// shared inputs cannot be built; individual check failures are recorded.
pub fn run_suite<S: Real>(suite: Suite, params: &SuiteParams) -> Result<Vec<CheckRecord>> {
    let qp = QParameter::<S>::new(params.q.get())?;
    let needs_model = matches!(
        suite,
        Suite::Fourier | Suite::Orthogonality | Suite::Moments | Suite::All
    );
    let model = if needs_model {
        Some(OscillatorModel::new(qp, params.cfg)?)
    } else {
        None
    };
    let parts: Vec<Suite> = if suite == Suite::All {
        Suite::PARTS.to_vec()
    } else {
        vec![suite]
    };
    let mut tasks: Vec<Task<'_>> = Vec::new();
    for part in parts {
        match part {
            Suite::Recursion => recursion_tasks(&qp, params, &mut tasks),
            Suite::Generating => generating_tasks(&qp, params, &mut tasks),
            Suite::Cd => cd_tasks(&qp, params, &mut tasks),
            Suite::Trig => trig_tasks(&qp, params, &mut tasks),
            Suite::Fourier => fourier_tasks(model.as_ref().expect("model"), params, &mut tasks),
            Suite::Orthogonality => {
                orthogonality_tasks(model.as_ref().expect("model"), params, &mut tasks)
            }
            Suite::Moments => moment_tasks(model.as_ref().expect("model"), params, &mut tasks),
            Suite::All => unreachable!(),
        }
    }
    let mut records: Vec<CheckRecord> = tasks.par_iter().map(|t| t()).collect();
    records.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(records)
}

fn recursion_tasks<'a, S: Real>(qp: &'a QParameter<S>, p: &SuiteParams, out: &mut Vec<Task<'a>>) {
    for n in 0..=20u32 {
        out.push(task(
            format!("recursion-closed-form-n{n:02}"),
            "recursion-closed-form",
            p.tol(1e-10),
            move || {
                let mut worst = 0.0f64;
                for xi in XI_GRID {
                    let x = lit::<S>(xi);
                    let a = hermite_eval(n, x, qp, EvalMethod::Recursion)?;
                    let b = hermite_eval(n, x, qp, EvalMethod::ClosedForm)?;
                    worst = worst.max(to_f64((a - b).abs() / a.abs().max(S::one())));
                }
                Ok(worst)
            },
        ));
    }
    for n in 0..=4u32 {
        out.push(task(
            format!("explicit-polynomial-n{n}"),
            "explicit-polynomials",
            p.tol(1e-12),
            move || {
                let got = hermite_coefficients(n, qp)?.to_vec();
                let want = explicit_polynomial(n, qp)?;
                let mut worst = 0.0f64;
                for (g, w) in got.iter().zip(&want) {
                    let r = if *w == S::zero() {
                        to_f64(g.abs())
                    } else {
                        rel_diff(*g, *w)
                    };
                    worst = worst.max(r);
                }
                Ok(worst)
            },
        ));
    }
}

/// Coefficients of `H_0 .. H_4` in increasing powers, written out by hand.
pub fn explicit_polynomial<S: Real>(n: u32, qp: &QParameter<S>) -> Result<Vec<S>> {
    let q = qp.q();
    let b3 = q_int(3, qp.p2())?;
    let z = S::zero();
    let c = |x: f64| lit::<S>(x);
    Ok(match n {
        0 => vec![S::one()],
        1 => vec![z, c(2.0) * pow_half(q, -1)],
        2 => vec![-c(2.0) * powi(q, -2), z, c(4.0) * powi(q, -3)],
        3 => vec![
            z,
            -c(4.0) * pow_half(q, -1) * powi(q, -2) * b3,
            z,
            c(8.0) * pow_half(q, -1) * powi(q, -7),
        ],
        4 => vec![
            c(4.0) * powi(q, -4) * b3,
            z,
            -c(8.0) * powi(q, -5) * b3 * (powi(q, -4) + S::one()),
            z,
            c(16.0) * powi(q, -14),
        ],
        _ => {
            return Err(crate::error::QError::domain(format!(
                "explicit polynomials are written out up to degree 4 (got {n})"
            )))
        }
    })
}

fn generating_tasks<'a, S: Real>(qp: &'a QParameter<S>, p: &SuiteParams, out: &mut Vec<Task<'a>>) {
    for n in 0..=10u32 {
        out.push(task(
            format!("generating-function-n{n:02}"),
            "generating-function",
            p.tol(1e-10),
            move || {
                let mut worst = 0.0f64;
                for xi in [0.5, 1.1] {
                    let x = lit::<S>(xi);
                    let a = generating_coefficient(n, x, qp)?;
                    let b = generating_target(n, x, qp)?;
                    worst = worst.max(rel_diff(a, b));
                }
                Ok(worst)
            },
        ));
    }
}

fn cd_tasks<'a, S: Real>(qp: &'a QParameter<S>, p: &SuiteParams, out: &mut Vec<Task<'a>>) {
    for n in 0..=12u32 {
        out.push(task(
            format!("christoffel-darboux-n{n:02}"),
            "christoffel-darboux",
            p.tol(1e-10),
            move || {
                let mut worst = 0.0f64;
                for x in CD_POINTS {
                    for y in CD_POINTS {
                        if x == y {
                            continue;
                        }
                        let (l, r) = christoffel_darboux_sides(n, lit::<S>(x), lit::<S>(y), qp)?;
                        worst = worst.max(rel_diff(l, r));
                    }
                }
                Ok(worst)
            },
        ));
    }
}

fn trig_tasks<'a, S: Real>(qp: &'a QParameter<S>, p: &SuiteParams, out: &mut Vec<Task<'a>>) {
    let cfg = p.cfg;
    out.push(task(
        "trig-convention-selection".into(),
        "trig-convention",
        p.tol(0.0),
        || {
            let v = convention_validation();
            Ok(if v.validated.is_some() { 0.0 } else { 1.0 })
        },
    ));
    for kind in [TrigKind::Cos, TrigKind::Sin] {
        let label = match kind {
            TrigKind::Cos => "cos",
            TrigKind::Sin => "sin",
        };
        for k in -3..=3i64 {
            out.push(task(
                format!("trig-orthogonality-{label}-k{k:+}"),
                "trig-orthogonality",
                p.tol(1e-8),
                move || {
                    let conv = TrigConvention::validated()?;
                    let mut worst = 0.0f64;
                    for l in -3..=3 {
                        let r = trig_orthogonality_relative(k, l, kind, qp, conv, &cfg)?;
                        worst = worst.max(to_f64(r));
                    }
                    Ok(worst)
                },
            ));
        }
    }
}

fn fourier_tasks<'a, S: Real>(
    model: &'a OscillatorModel<S>,
    p: &SuiteParams,
    out: &mut Vec<Task<'a>>,
) {
    let half = p.cfg.lattice_cutoff() / 2;
    out.push(task(
        format!("fourier-gram-w{half}"),
        "fourier-unitarity",
        p.tol(1e-7),
        move || Ok(to_f64(model.fourier_gram_residual(half)?)),
    ));
}

fn orthogonality_tasks<'a, S: Real>(
    model: &'a OscillatorModel<S>,
    p: &SuiteParams,
    out: &mut Vec<Task<'a>>,
) {
    let nmax = p.nmax;
    out.push(task(
        "ground-normalization".into(),
        "ground-normalization",
        p.tol(1e-10),
        move || {
            let (lo, hi) = model.momentum_window();
            let s: S = (lo..=hi).map(|l| model.c(l) * model.c(l)).fold(S::zero(), |a, b| a + b);
            Ok(to_f64((s - S::one()).abs()))
        },
    ));
    for r in Parity::BOTH {
        let rl = r.r();
        out.push(task(
            format!("measure-mass-r{rl}"),
            "measure-mass",
            p.tol(1e-8),
            move || Ok(to_f64((model.measure(r).total_mass() - S::one()).abs())),
        ));
        out.push(task(
            format!("measure-support-r{rl}"),
            "measure-support",
            p.tol(0.0),
            move || Ok(if model.measure(r).support_matches_parity() { 0.0 } else { 1.0 }),
        ));
        let tag: &'static str = if rl == 0 {
            "hermite-orthogonality-r0"
        } else {
            "hermite-orthogonality-r1"
        };
        for n in 0..=nmax {
            out.push(task(
                format!("hermite-orthogonality-r{rl}-n{n}"),
                tag,
                p.tol(1e-6),
                move || {
                    let mu = model.measure(r);
                    let mut worst = 0.0f64;
                    for m in 0..=nmax {
                        let res = model.hermite_orthogonality_residual(n, m, &mu, XiScaling::Hermite)?;
                        worst = worst.max(to_f64(res));
                    }
                    Ok(worst)
                },
            ));
        }
    }
    out.push(task(
        "cross-parity-overlap".into(),
        "cross-parity-overlap",
        p.tol(1e-8),
        move || {
            let mut worst = 0.0f64;
            for m in 0..=nmax.min(3) {
                for n in 0..=nmax.min(3) {
                    let o = model.overlap(m, Parity::Even, n, Parity::Odd)?;
                    worst = worst.max(to_f64(o.norm()));
                }
            }
            Ok(worst)
        },
    ));
    let qp = *model.qp();
    let cfg = *model.cfg();
    let top = nmax.min(5);
    out.push(task(
        "hermite-ii-off-diagonal".into(),
        "hermite-ii-orthogonality",
        p.tol(1e-6),
        move || {
            let diag: Vec<S> = (0..=top)
                .map(|n| {
                    hermite_ii_orthogonality(n, n, SummationRange::AllIntegers, &qp, &cfg)
                        .map(|d| d.sum.abs())
                })
                .collect::<Result<_>>()?;
            let mut worst = 0.0f64;
            for n in 0..=top {
                for m in 0..=top {
                    if n != m {
                        let s = hermite_ii_orthogonality(n, m, SummationRange::AllIntegers, &qp, &cfg)?.sum;
                        let scale = diag[n as usize].max(diag[m as usize]);
                        worst = worst.max(to_f64(s.abs() / scale));
                    }
                }
            }
            Ok(worst)
        },
    ));
    out.push(task(
        "hermite-ii-normalization".into(),
        "hermite-ii-orthogonality",
        p.tol(1e-5),
        move || {
            let nt = |n: u32| -> Result<S> {
                let d = hermite_ii_orthogonality(n, n, SummationRange::AllIntegers, &qp, &cfg)?;
                Ok(d.n_tilde.expect("diagonal"))
            };
            let first = nt(0)?;
            let mut worst = 0.0f64;
            for n in 1..=top {
                worst = worst.max(rel_diff(nt(n)?, first));
            }
            Ok(worst)
        },
    ));
}

fn moment_tasks<'a, S: Real>(
    model: &'a OscillatorModel<S>,
    p: &SuiteParams,
    out: &mut Vec<Task<'a>>,
) {
    let qp = *model.qp();
    let cfg = *model.cfg();
    for order in 0..=2 * p.nmax {
        if order % 2 == 1 {
            for r in Parity::BOTH {
                out.push(task(
                    format!("moment-odd-o{order:02}-r{}", r.r()),
                    "moment-odd",
                    p.tol(1e-8),
                    move || {
                        let mu = model.measure(r);
                        Ok(to_f64(moment_measure(order, model, &mu)?.value.abs()))
                    },
                ));
            }
            continue;
        }
        out.push(task(
            format!("moment-qgamma-o{order:02}"),
            "moment-closed-qgamma",
            p.tol(1e-10),
            move || Ok(rel_diff(moment_closed(order, &qp)?, moment_qgamma(order, &qp, &cfg)?)),
        ));
        for r in Parity::BOTH {
            let tag: &'static str = if r == Parity::Even {
                "moment-measure-r0"
            } else {
                "moment-measure-r1"
            };
            out.push(task(
                format!("moment-measure-o{order:02}-r{}", r.r()),
                tag,
                p.tol(1e-6),
                move || {
                    let mu = model.measure(r);
                    let m = moment_measure(order, model, &mu)?;
                    Ok(rel_diff(m.value, moment_closed(order, &qp)?))
                },
            ));
        }
    }
}
