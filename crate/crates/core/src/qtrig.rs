//! q-trigonometric functions, the normalization constant `N_q`, and the
//! lattice orthogonality relations they satisfy.
//!
//! Two coefficient conventions are implemented for `cos(x; b)`, `sin(x; b)`:
//!
//! * [`TrigConvention::A`]: `(-1)^k b^{k(k+1)} x^{2k} / (b;b)_{2k}` and
//!   `(-1)^k b^{k(k+1)} x^{2k+1} / (b;b)_{2k+1}`;
//! * [`TrigConvention::B`]: the same with `b^{k^2}`.
//!
//! The lattice relation
//! `sum_n q^{-2n} f(q^{-2(k+n)}) f(q^{-2(l+n)}) = q^{2l} delta_kl / N_q^2`
//! decides between them at first use (see [`convention_validation`]).
//!
//! The alternating power series loses digits for large `|x|`. Past the point
//! where the largest term exceeds the result by a factor `10^6`, convention A
//! is evaluated through a transformed series free of cancellation, and
//! convention B through its relation to A. On the lattice `x = b^m` an exact
//! rewrite of that transformed series is used, see [`lattice_trig`].

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::config::{QParameter, TruncationConfig};
use crate::error::{QError, Result};
use crate::qcore::{check_base, qpoch_infinite, qpoch_table, StopRule};
use crate::real::{lit, powi, to_f64, CompensatedSum, Real};

/// Coefficient convention for the q-trigonometric power series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrigConvention {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrigKind {
    Cos,
    Sin,
}

impl TrigKind {
    fn offset(self) -> i64 {
        match self {
            TrigKind::Cos => 0,
            TrigKind::Sin => 1,
        }
    }
}

/// Cancellation ratio beyond which the plain power series is abandoned.
const CANCELLATION_LIMIT: f64 = 1e6;

/// `cos(x; base)` under the given convention.
pub fn q_cos<S: Real>(x: S, base: S, conv: TrigConvention, cfg: &TruncationConfig) -> Result<S> {
    q_trig(TrigKind::Cos, x, base, conv, cfg)
}

/// `sin(x; base)` under the given convention.
pub fn q_sin<S: Real>(x: S, base: S, conv: TrigConvention, cfg: &TruncationConfig) -> Result<S> {
    q_trig(TrigKind::Sin, x, base, conv, cfg)
}

pub fn q_trig<S: Real>(
    kind: TrigKind,
    x: S,
    base: S,
    conv: TrigConvention,
    cfg: &TruncationConfig,
) -> Result<S> {
    check_base(base)?;
    if !x.is_finite() {
        return Err(QError::domain(format!("argument must be finite (got {x})")));
    }
    let z = x * x;
    let even = match direct_even_part(kind, z, base, conv, cfg) {
        Ok((sum, peak)) if sum.is_finite() && peak <= lit::<S>(CANCELLATION_LIMIT) * sum.abs() => {
            sum
        }
        Ok(_) => transformed_even_part(kind, z, base, conv, cfg)?,
        Err(e @ QError::Convergence { .. }) => match transformed_even_part(kind, z, base, conv, cfg)
        {
            Ok(v) => v,
            Err(_) => return Err(e),
        },
        Err(e) => return Err(e),
    };
    Ok(match kind {
        TrigKind::Cos => even,
        TrigKind::Sin => x * even,
    })
}

/// The power series in `z = x^2` (for sine, after removing one factor `x`).
/// Returns the sum and the largest term magnitude.
fn direct_even_part<S: Real>(
    kind: TrigKind,
    z: S,
    base: S,
    conv: TrigConvention,
    cfg: &TruncationConfig,
) -> Result<(S, S)> {
    let s = kind.offset();
    let delta = match conv {
        TrigConvention::A => 1,
        TrigConvention::B => 0,
    };
    let mut sum = CompensatedSum::new();
    let mut rule = StopRule::new(cfg);
    let mut term = match kind {
        TrigKind::Cos => S::one(),
        TrigKind::Sin => S::one() / (S::one() - base),
    };
    let mut peak = term.abs();
    for k in 0..cfg.max_terms() as i64 {
        sum += term;
        peak = peak.max(term.abs());
        if !term.is_finite() {
            return Ok((term, S::infinity()));
        }
        if rule.settled(term, sum.value()) {
            return Ok((sum.value(), peak));
        }
        let num = powi(base, 2 * k + 1 + delta) * z;
        let den = (S::one() - powi(base, 2 * k + 1 + s)) * (S::one() - powi(base, 2 * k + 2 + s));
        term = -term * num / den;
    }
    Err(QError::Convergence {
        what: "q-trigonometric power series",
        terms: cfg.max_terms(),
        partial: to_f64(sum.value()),
    })
}

/// Convention A through `1phi1(0; c; Q, Q z)` with `Q = b^2`, `c = b` (cosine)
/// or `c = b^3` (sine), rewritten as
/// `1 / (c;Q)_inf * sum_k (-1)^k Q^C(k,2) c^k (Q^{k+1} z; Q)_inf / (Q;Q)_k`.
/// Every term has a definite sign pattern that decays fast for large `z`.
fn transformed_even_part<S: Real>(
    kind: TrigKind,
    z: S,
    base: S,
    conv: TrigConvention,
    cfg: &TruncationConfig,
) -> Result<S> {
    if conv == TrigConvention::B {
        // cos_B(x) = cos_A(x b^{-1/2}); sin_B(x) = b^{1/2} sin_A(x b^{-1/2}).
        // In terms of the even parts both read f_B(z) = f_A(z / b).
        return transformed_even_part(kind, z / base, base, TrigConvention::A, cfg);
    }
    let big_q = base * base;
    let c = match kind {
        TrigKind::Cos => base,
        TrigKind::Sin => base * base * base,
    };
    let prefactor = S::one() / qpoch_infinite(c, big_q, cfg)?;
    let mut sum = CompensatedSum::new();
    let mut rule = StopRule::new(cfg);
    let mut weight = S::one(); // (-1)^k Q^C(k,2) c^k / (Q;Q)_k
    let mut qk1 = big_q; // Q^{k+1}
    for k in 0..cfg.max_terms() {
        let tail = qpoch_infinite(qk1 * z, big_q, cfg)?;
        let term = weight * tail;
        sum += term;
        if !sum.value().is_finite() {
            return Err(QError::Overflow {
                what: "q-trigonometric function at large argument",
            });
        }
        if rule.settled(term, sum.value()) {
            let even = prefactor * sum.value();
            return Ok(match kind {
                TrigKind::Cos => even,
                TrigKind::Sin => even / (S::one() - base),
            });
        }
        weight = -weight * powi(big_q, k as i64) * c / (S::one() - qk1);
        qk1 = qk1 * big_q;
    }
    Err(QError::Convergence {
        what: "transformed q-trigonometric series",
        terms: cfg.max_terms(),
        partial: to_f64(sum.value()),
    })
}

/// Convention A evaluated exactly on the lattice point `x = base^m`.
///
/// For `m >= 0` the argument is at most one and the power series is summed
/// with integer exponents. For `m < 0` the transformed series terminates from
/// below and becomes
/// `cos(b^m) = (Q;Q)_inf/(b;Q)_inf * sum_{k>=-m} (-1)^k b^{k^2} / ((Q;Q)_k (Q;Q)_{k+m})`
/// and
/// `sin(b^m) = b^m/(1-b) (Q;Q)_inf/(b^3;Q)_inf * sum_{k>=-m} (-1)^k b^{k^2+2k} / ((Q;Q)_k (Q;Q)_{k+m})`,
/// which keeps full relative precision even where the value is tiny.
pub fn lattice_trig<S: Real>(
    kind: TrigKind,
    m: i64,
    base: S,
    cfg: &TruncationConfig,
) -> Result<S> {
    check_base(base)?;
    let s = kind.offset();
    if m >= 0 {
        let mut sum = CompensatedSum::new();
        let mut rule = StopRule::new(cfg);
        let mut table = qpoch_table(base, 32);
        for k in 0..cfg.max_terms() as i64 {
            let idx = (2 * k + s) as usize;
            extend_table(&mut table, base, idx);
            let mut term = powi(base, k * k + k + (2 * k + s) * m) / table[idx];
            if k % 2 == 1 {
                term = -term;
            }
            sum += term;
            if rule.settled(term, sum.value()) {
                return Ok(sum.value());
            }
        }
        return Err(QError::Convergence {
            what: "lattice q-trigonometric series",
            terms: cfg.max_terms(),
            partial: to_f64(sum.value()),
        });
    }

    let big_q = base * base;
    let start = -m;
    let c = match kind {
        TrigKind::Cos => base,
        TrigKind::Sin => base * base * base,
    };
    let mut prefactor = qpoch_infinite(big_q, big_q, cfg)? / qpoch_infinite(c, big_q, cfg)?;
    if kind == TrigKind::Sin {
        prefactor = prefactor / (S::one() - base);
    }
    let mut sum = CompensatedSum::new();
    let mut rule = StopRule::new(cfg);
    // (Q;Q)_k and (Q;Q)_{k+m} grow into the tail extending from k = start.
    let mut table = qpoch_table(big_q, start as usize + 64);
    for k in start..start + cfg.max_terms() as i64 {
        extend_table(&mut table, big_q, k as usize);
        let e = match kind {
            TrigKind::Cos => k * k,
            TrigKind::Sin => k * k + 2 * k + m,
        };
        let mut term = powi(base, e) / (table[k as usize] * table[(k + m) as usize]);
        if k % 2 == 1 {
            term = -term;
        }
        sum += term;
        if term == S::zero() || rule.settled(term, sum.value()) {
            return Ok(prefactor * sum.value());
        }
    }
    Err(QError::Convergence {
        what: "lattice q-trigonometric series",
        terms: cfg.max_terms(),
        partial: to_f64(sum.value()),
    })
}

/// Grows a `(b;b)_n` table so that index `n` is present.
fn extend_table<S: Real>(table: &mut Vec<S>, base: S, n: usize) {
    while table.len() <= n {
        let i = table.len() as i64;
        let last = *table.last().expect("non-empty");
        table.push(last * (S::one() - powi(base, i)));
    }
}

/// `cos(q^{2j}; q^-4)` in the oscillator's notation, i.e. the convention-A
/// cosine in base `q^-2` at lattice index `m = -j`.
pub fn cos_q2<S: Real>(j: i64, qp: &QParameter<S>, cfg: &TruncationConfig) -> Result<S> {
    lattice_trig(TrigKind::Cos, -j, qp.p2(), cfg)
}

/// `sin(q^{2j}; q^-4)`, see [`cos_q2`].
pub fn sin_q2<S: Real>(j: i64, qp: &QParameter<S>, cfg: &TruncationConfig) -> Result<S> {
    lattice_trig(TrigKind::Sin, -j, qp.p2(), cfg)
}

/// `N_q = (q^-2; q^-4)_inf / (q^-4; q^-4)_inf`.
pub fn n_q<S: Real>(qp: &QParameter<S>, cfg: &TruncationConfig) -> Result<S> {
    Ok(qpoch_infinite(qp.p2(), qp.p4(), cfg)? / qpoch_infinite(qp.p4(), qp.p4(), cfg)?)
}

fn lattice_value<S: Real>(
    kind: TrigKind,
    m: i64,
    qp: &QParameter<S>,
    conv: TrigConvention,
    cfg: &TruncationConfig,
) -> Result<S> {
    match conv {
        TrigConvention::A => lattice_trig(kind, m, qp.p2(), cfg),
        TrigConvention::B => q_trig(kind, powi(qp.p2(), m), qp.p2(), conv, cfg),
    }
}

/// `sum_n q^{-2n} f(q^{-2(k+n)}) f(q^{-2(l+n)})` over `n` in `[-L, L]`,
/// extended on either side while the outermost term still exceeds
/// `series_tol` times the running sum.
pub fn trig_orthogonality_sum<S: Real>(
    k: i64,
    l: i64,
    kind: TrigKind,
    qp: &QParameter<S>,
    conv: TrigConvention,
    cfg: &TruncationConfig,
) -> Result<S> {
    let b = qp.p2();
    let tol = cfg.tol::<S>();
    let term = |n: i64| -> Result<S> {
        let fk = lattice_value(kind, k + n, qp, conv, cfg)?;
        let fl = lattice_value(kind, l + n, qp, conv, cfg)?;
        Ok(powi(b, n) * (fk * fl))
    };
    let cutoff = cfg.lattice_cutoff();
    let mut sum = CompensatedSum::new();
    let mut lo_term = S::zero();
    let mut hi_term = S::zero();
    for n in -cutoff..=cutoff {
        let t = term(n)?;
        if n == -cutoff {
            lo_term = t;
        }
        if n == cutoff {
            hi_term = t;
        }
        sum += t;
    }
    let budget = cfg.max_terms() as i64;
    let mut lo = -cutoff;
    let mut hi = cutoff;
    while hi_term.abs() > tol * sum.value().abs() {
        if hi - cutoff >= budget {
            return Err(QError::Convergence {
                what: "lattice orthogonality sum (upper tail)",
                terms: (hi - lo + 1) as usize,
                partial: to_f64(sum.value()),
            });
        }
        hi += 1;
        hi_term = term(hi)?;
        sum += hi_term;
        if !hi_term.is_finite() {
            break;
        }
    }
    while lo_term.abs() > tol * sum.value().abs() {
        if -cutoff - lo >= budget {
            return Err(QError::Convergence {
                what: "lattice orthogonality sum (lower tail)",
                terms: (hi - lo + 1) as usize,
                partial: to_f64(sum.value()),
            });
        }
        lo -= 1;
        lo_term = term(lo)?;
        sum += lo_term;
        if !lo_term.is_finite() {
            break;
        }
    }
    Ok(sum.value())
}

/// Right-hand side `q^{2l} delta_kl / N_q^2`.
pub fn trig_orthogonality_target<S: Real>(
    k: i64,
    l: i64,
    qp: &QParameter<S>,
    cfg: &TruncationConfig,
) -> Result<S> {
    if k != l {
        return Ok(S::zero());
    }
    let nq = n_q(qp, cfg)?;
    Ok(powi(qp.q(), 2 * l) / (nq * nq))
}

/// Absolute residual of the lattice orthogonality relation.
pub fn trig_orthogonality_residual<S: Real>(
    k: i64,
    l: i64,
    kind: TrigKind,
    qp: &QParameter<S>,
    conv: TrigConvention,
    cfg: &TruncationConfig,
) -> Result<S> {
    let sum = trig_orthogonality_sum(k, l, kind, qp, conv, cfg)?;
    Ok((sum - trig_orthogonality_target(k, l, qp, cfg)?).abs())
}

/// Residual divided by the diagonal scale `q^{2l} / N_q^2`.
pub fn trig_orthogonality_relative<S: Real>(
    k: i64,
    l: i64,
    kind: TrigKind,
    qp: &QParameter<S>,
    conv: TrigConvention,
    cfg: &TruncationConfig,
) -> Result<S> {
    let r = trig_orthogonality_residual(k, l, kind, qp, conv, cfg)?;
    Ok(r / trig_orthogonality_target(l, l, qp, cfg)?)
}

/// Outcome of checking both conventions against the orthogonality relation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConventionValidation {
    /// Largest relative residual over `k, l` in `[-2, 2]`, both kinds, at
    /// `q = 1.3`. Infinite when the sums could not be evaluated.
    pub max_residual_a: f64,
    pub max_residual_b: f64,
    pub validated: Option<TrigConvention>,
}

const VALIDATION_Q: f64 = 1.3;
const VALIDATION_LIMIT: f64 = 1e-6;

fn max_relative_residual(conv: TrigConvention) -> f64 {
    let qp = QParameter::<f64>::from_f64(VALIDATION_Q).expect("valid q");
    let cfg = TruncationConfig::default();
    let mut worst = 0.0f64;
    for kind in [TrigKind::Cos, TrigKind::Sin] {
        for k in -2..=2 {
            for l in -2..=2 {
                match trig_orthogonality_relative(k, l, kind, &qp, conv, &cfg) {
                    Ok(r) if r.is_finite() => worst = worst.max(r),
                    _ => return f64::INFINITY,
                }
            }
        }
    }
    worst
}

/// Validates both conventions once and caches the outcome.
pub fn convention_validation() -> &'static ConventionValidation {
    static CELL: OnceLock<ConventionValidation> = OnceLock::new();
    CELL.get_or_init(|| {
        let a = max_relative_residual(TrigConvention::A);
        let b = max_relative_residual(TrigConvention::B);
        let validated = match (a < VALIDATION_LIMIT, b < VALIDATION_LIMIT) {
            (true, false) => Some(TrigConvention::A),
            (false, true) => Some(TrigConvention::B),
            _ => None,
        };
        ConventionValidation {
            max_residual_a: a,
            max_residual_b: b,
            validated,
        }
    })
}

impl TrigConvention {
    /// The convention singled out by the orthogonality relation.
    pub fn validated() -> Result<Self> {
        convention_validation().validated.ok_or_else(|| {
            QError::domain("no q-trigonometric convention satisfies the lattice orthogonality")
        })
    }
}
