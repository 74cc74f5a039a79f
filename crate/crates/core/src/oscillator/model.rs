use num_complex::Complex;
use serde::Serialize;

use super::lattice::{ground_c0, hermite_argument, position_eigenvalue, LatticeSite, Parity, Sign};
use crate::config::{QParameter, TruncationConfig};
use crate::error::{QError, Result};
use crate::hermite::{check_degree, hermite_sequence, norm_squared};
use crate::qtrig::{lattice_trig, n_q, q_trig, TrigConvention, TrigKind};
use crate::real::{lit, powi, to_f64, CompensatedSum, Real, Scaled};

/// Which value on a position site feeds the Hermite polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum XiScaling {
    /// [`hermite_argument`], under which the polynomials are orthogonal.
    Hermite,
    /// The bare eigenvalue of `X`, [`position_eigenvalue`].
    Position,
}

impl XiScaling {
    pub fn xi<S: Real>(self, site: LatticeSite, qp: &QParameter<S>) -> S {
        match self {
            XiScaling::Hermite => hermite_argument(site, qp),
            XiScaling::Position => position_eigenvalue(site, qp),
        }
    }
}

/// `cos_q2(j)`, `sin_q2(j)` for a contiguous range of `j`.
#[derive(Clone, Debug)]
struct TrigTable<S> {
    first: i64,
    cos: Vec<S>,
    sin: Vec<S>,
}

impl<S: Real> TrigTable<S> {
    fn build(
        first: i64,
        last: i64,
        qp: &QParameter<S>,
        conv: TrigConvention,
        cfg: &TruncationConfig,
    ) -> Result<Self> {
        let value = |kind: TrigKind, j: i64| -> Result<S> {
            match conv {
                TrigConvention::A => lattice_trig(kind, -j, qp.p2(), cfg),
                TrigConvention::B => q_trig(kind, powi(qp.q(), 2 * j), qp.p2(), conv, cfg),
            }
        };
        let mut cos = Vec::with_capacity((last - first + 1) as usize);
        let mut sin = Vec::with_capacity(cos.capacity());
        for j in first..=last {
            cos.push(value(TrigKind::Cos, j)?);
            sin.push(value(TrigKind::Sin, j)?);
        }
        Ok(Self { first, cos, sin })
    }

    fn covers(&self, j: i64) -> bool {
        j >= self.first && j < self.first + self.cos.len() as i64
    }

    fn cos(&self, j: i64) -> S {
        self.cos[(j - self.first) as usize]
    }

    fn sin(&self, j: i64) -> S {
        self.sin[(j - self.first) as usize]
    }
}

/// Squared ground-state amplitudes on the position lattice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteMeasure<S> {
    r: Parity,
    first: i64,
    #[serde(skip)]
    weights: Vec<S>,
    /// Weight at the outermost retained sites relative to the largest weight.
    tail_ratio: f64,
}

impl<S: Real> DiscreteMeasure<S> {
    pub fn parity(&self) -> Parity {
        self.r
    }

    /// Smallest and largest retained position index.
    pub fn window(&self) -> (i64, i64) {
        (self.first, self.first + self.weights.len() as i64 - 1)
    }

    /// Weight of a site; independent of the sign label.
    pub fn weight(&self, site: LatticeSite) -> S {
        let i = site.index - self.first;
        if i < 0 || i >= self.weights.len() as i64 {
            S::zero()
        } else {
            self.weights[i as usize]
        }
    }

    /// `(nu, weight)` for every retained index, including zero weights.
    pub fn iter(&self) -> impl Iterator<Item = (i64, S)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, &w)| (self.first + i as i64, w))
    }

    /// Sum of the weights over all sites and both sign labels.
    pub fn total_mass(&self) -> S {
        // Small weights first.
        let mut w: Vec<S> = self.weights.clone();
        w.sort_by(|a, b| a.partial_cmp(b).expect("finite weights"));
        lit::<S>(2.0) * crate::real::compensated_sum(w)
    }

    pub fn tail_ratio(&self) -> f64 {
        self.tail_ratio
    }

    /// Whether every nonzero weight sits on this measure's sublattice.
    pub fn support_matches_parity(&self) -> bool {
        self.iter()
            .all(|(nu, w)| w == S::zero() || self.r.contains(nu))
    }
}

/// The oscillator on a truncated lattice.
///
/// Momentum indices run over `[-L, L]` where `L` is the lattice cutoff.
/// Position indices run over a window reaching at least `[-2L, 2L + 1]`,
/// widened on the slowly decaying side (small `|xi|`, where the ground-state
/// weights fall off like `q^nu`) until that decay has reached the series
/// tolerance.
#[derive(Clone, Debug)]
pub struct OscillatorModel<S> {
    qp: QParameter<S>,
    cfg: TruncationConfig,
    conv: TrigConvention,
    nq: S,
    c0: S,
    nu_lo: i64,
    nu_hi: i64,
    table: TrigTable<S>,
}

impl<S: Real> OscillatorModel<S> {
    /// Builds the model with the validated trigonometric convention.
    pub fn new(qp: QParameter<S>, cfg: TruncationConfig) -> Result<Self> {
        Self::with_convention(qp, TrigConvention::validated()?, cfg)
    }

    pub fn with_convention(
        qp: QParameter<S>,
        conv: TrigConvention,
        cfg: TruncationConfig,
    ) -> Result<Self> {
        let cutoff = cfg.lattice_cutoff();
        let nq = n_q(&qp, &cfg)?;
        let c0 = ground_c0(&qp, &cfg)?;
        // q^nu < tol at nu = ln(tol) / ln(q).
        let decay = (cfg.series_tol().max(f64::EPSILON).ln() / to_f64(qp.q()).ln()).floor() as i64;
        let nu_lo = (decay - 4).min(-2 * cutoff);
        if -nu_lo > cfg.max_terms() as i64 {
            return Err(QError::Convergence {
                what: "position lattice window",
                terms: cfg.max_terms(),
                partial: f64::NAN,
            });
        }
        let nu_hi = 2 * cutoff + 1;
        let table = TrigTable::build(
            nu_lo.div_euclid(2) - cutoff - 2,
            nu_hi.div_euclid(2) + cutoff + 2,
            &qp,
            conv,
            &cfg,
        )?;
        Ok(Self {
            qp,
            cfg,
            conv,
            nq,
            c0,
            nu_lo,
            nu_hi,
            table,
        })
    }

    pub fn qp(&self) -> &QParameter<S> {
        &self.qp
    }

    pub fn cfg(&self) -> &TruncationConfig {
        &self.cfg
    }

    pub fn convention(&self) -> TrigConvention {
        self.conv
    }

    pub fn n_q(&self) -> S {
        self.nq
    }

    pub fn c0(&self) -> S {
        self.c0
    }

    /// Retained position indices.
    pub fn position_window(&self) -> (i64, i64) {
        (self.nu_lo, self.nu_hi)
    }

    /// Retained momentum indices.
    pub fn momentum_window(&self) -> (i64, i64) {
        let l = self.cfg.lattice_cutoff();
        (-l, l)
    }

    /// `c_l = q^{-(l^2 + l)/2} c0`.
    pub fn c(&self, l: i64) -> S {
        powi(self.qp.q(), -(l * l + l) / 2) * self.c0
    }

    fn cos_q2(&self, j: i64) -> S {
        if self.table.covers(j) {
            self.table.cos(j)
        } else if j > 0 {
            // Far beyond the table both functions vanish to working precision
            // relative to their prefactors.
            S::zero()
        } else {
            S::one()
        }
    }

    fn sin_q2(&self, j: i64) -> S {
        if self.table.covers(j) {
            self.table.sin(j)
        } else {
            S::zero()
        }
    }

    /// `<position | momentum>`.
    ///
    /// For even momentum index `2l`, the amplitude at `2nu` is
    /// `(N_q/2) q^{nu+l} cos_q2(nu+l)` and at `2nu+1` it is
    /// `-i sigma tau (N_q/2) q^{nu+l} sin_q2(nu+l)`. Odd momentum states are
    /// `|2l+1> = U^{-1} |2l>`, so `<mu|2l+1> = <mu+1|2l>`.
    pub fn fourier_amplitude(&self, momentum: LatticeSite, position: LatticeSite) -> Complex<S> {
        let (lambda, mu) = if momentum.index.rem_euclid(2) == 1 {
            (momentum.index - 1, position.index + 1)
        } else {
            (momentum.index, position.index)
        };
        let l = lambda.div_euclid(2);
        let nu = mu.div_euclid(2);
        let j = nu + l;
        let half_n = self.nq / lit::<S>(2.0);
        let pref = half_n * powi(self.qp.q(), j);
        if mu.rem_euclid(2) == 0 {
            Complex::new(pref * self.cos_q2(j), S::zero())
        } else {
            let st = momentum.sign.scalar::<S>() * position.sign.scalar::<S>();
            Complex::new(S::zero(), -st * pref * self.sin_q2(j))
        }
    }

    /// Position-space ground state amplitude from the closed sums
    /// `<2nu,tau|0>^0 = N_q/sqrt2 sum_l q^{nu+l} (c_{2l} cos_q2(nu+l) + i tau c_{2l+1} sin_q2(nu+l))`
    /// and
    /// `<2nu+1,tau|0>^1 = -N_q/sqrt2 sum_l q^{nu+l} (c_{2l+1} q cos_q2(nu+l+1) + i tau c_{2l} sin_q2(nu+l))`,
    /// with exact zeros on the other sublattice.
    pub fn ground_amplitude(&self, r: Parity, position: LatticeSite) -> Complex<S> {
        if !r.contains(position.index) {
            return Complex::new(S::zero(), S::zero());
        }
        let nu = position.index.div_euclid(2);
        let tau = position.sign.scalar::<S>();
        let q = self.qp.q();
        let (lo, hi) = self.momentum_window();
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for l in lo..=hi {
            let j = nu + l;
            let pref = powi(q, j);
            match r {
                Parity::Even => {
                    re += pref * self.c(2 * l) * self.cos_q2(j);
                    im += pref * self.c(2 * l + 1) * self.sin_q2(j);
                }
                Parity::Odd => {
                    re += pref * self.c(2 * l + 1) * q * self.cos_q2(j + 1);
                    im += pref * self.c(2 * l) * self.sin_q2(j);
                }
            }
        }
        let mut scale = self.nq / lit::<S>(2.0).sqrt();
        if r == Parity::Odd {
            scale = -scale;
        }
        Complex::new(scale * re.value(), scale * tau * im.value())
    }

    /// Ground state amplitude by transforming
    /// `|0>^r = 2^{-1/2} sum_{l,sigma} (-1)^l sigma^{l+r} c_l |l,sigma>` term by term.
    pub fn ground_amplitude_via_momentum(&self, r: Parity, position: LatticeSite) -> Complex<S> {
        let (lo, hi) = self.momentum_window();
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for lambda in 2 * lo..=2 * hi + 1 {
            for sigma in Sign::BOTH {
                let mut coeff = self.c(lambda);
                if lambda.rem_euclid(2) == 1 {
                    coeff = -coeff;
                }
                if (lambda + r.r() as i64).rem_euclid(2) == 1 && sigma == Sign::Minus {
                    coeff = -coeff;
                }
                let a = self.fourier_amplitude(LatticeSite::new(lambda, sigma), position);
                re += coeff * a.re;
                im += coeff * a.im;
            }
        }
        let s = S::one() / lit::<S>(2.0).sqrt();
        Complex::new(s * re.value(), s * im.value())
    }

    /// `mu^r(nu) = |<nu,tau|0>^r|^2` on the position window.
    pub fn measure(&self, r: Parity) -> DiscreteMeasure<S> {
        let weights: Vec<S> = (self.nu_lo..=self.nu_hi)
            .map(|nu| self.ground_amplitude(r, LatticeSite::new(nu, Sign::Plus)).norm_sqr())
            .collect();
        let max = weights.iter().copied().fold(S::zero(), S::max);
        let edge = weights[..2]
            .iter()
            .chain(weights[weights.len() - 2..].iter())
            .copied()
            .fold(S::zero(), S::max);
        DiscreteMeasure {
            r,
            first: self.nu_lo,
            weights,
            tail_ratio: to_f64(edge / max),
        }
    }

    /// `<nu,tau|n>^r = H_n(xi) <nu,tau|0>^r / sqrt(2^n [n]!)`.
    pub fn excited_amplitude(
        &self,
        n: u32,
        r: Parity,
        position: LatticeSite,
        scaling: XiScaling,
    ) -> Result<Complex<S>> {
        check_degree(n)?;
        let g = self.ground_amplitude(r, position);
        let xi = scaling.xi(position, &self.qp);
        let h = hermite_sequence(n, xi, &self.qp)?[n as usize];
        let f = (h / norm_squared(n, &self.qp)?.pow_sqrt()).to_scalar();
        Ok(g * f)
    }

    /// `sum_{nu,tau} H_n(xi) H_m(xi) mu^r(nu)`.
    pub fn hermite_moment_sum(
        &self,
        n: u32,
        m: u32,
        measure: &DiscreteMeasure<S>,
        scaling: XiScaling,
    ) -> Result<S> {
        let top = n.max(m);
        check_degree(top)?;
        let mut terms = Vec::new();
        for (nu, w) in measure.iter() {
            if w == S::zero() {
                continue;
            }
            for tau in Sign::BOTH {
                let xi = scaling.xi(LatticeSite::new(nu, tau), &self.qp);
                let h = hermite_sequence(top, xi, &self.qp)?;
                terms.push(h[n as usize] * h[m as usize] * w);
            }
        }
        Ok(Scaled::sum(&terms).to_scalar())
    }

    /// `|sum H_n H_m mu^r - 2^n [n]! delta_nm| / max(1, 2^n [n]!)`.
    pub fn hermite_orthogonality_residual(
        &self,
        n: u32,
        m: u32,
        measure: &DiscreteMeasure<S>,
        scaling: XiScaling,
    ) -> Result<S> {
        let sum = self.hermite_moment_sum(n, m, measure, scaling)?;
        let norm = norm_squared(n, &self.qp)?.to_scalar();
        let target = if n == m { norm } else { S::zero() };
        Ok((sum - target).abs() / norm.max(S::one()))
    }

    /// `<m|n>` between excited states, possibly of different parity.
    pub fn overlap(&self, m: u32, rm: Parity, n: u32, rn: Parity) -> Result<Complex<S>> {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for nu in self.nu_lo..=self.nu_hi {
            for tau in Sign::BOTH {
                let site = LatticeSite::new(nu, tau);
                let a = self.excited_amplitude(m, rm, site, XiScaling::Hermite)?;
                let b = self.excited_amplitude(n, rn, site, XiScaling::Hermite)?;
                let p = a.conj() * b;
                re += p.re;
                im += p.im;
            }
        }
        Ok(Complex::new(re.value(), im.value()))
    }

    /// Largest deviation of the Gram matrix of the transform columns
    /// `|lambda, sigma>`, `|lambda| <= half_width`, from the identity.
    pub fn fourier_gram_residual(&self, half_width: i64) -> Result<S> {
        let (lo, hi) = self.momentum_window();
        if half_width < 0 || 2 * half_width > hi - lo {
            return Err(QError::domain(format!(
                "Gram check half-width {half_width} must lie in [0, {}]",
                (hi - lo) / 2
            )));
        }
        let columns: Vec<LatticeSite> = (-half_width..=half_width)
            .flat_map(|l| Sign::BOTH.map(|s| LatticeSite::new(l, s)))
            .collect();
        let rows: Vec<LatticeSite> = (self.nu_lo..=self.nu_hi)
            .flat_map(|nu| Sign::BOTH.map(|t| LatticeSite::new(nu, t)))
            .collect();
        let matrix: Vec<Vec<Complex<S>>> = columns
            .iter()
            .map(|&c| rows.iter().map(|&p| self.fourier_amplitude(c, p)).collect())
            .collect();
        let mut worst = S::zero();
        for (a, col_a) in matrix.iter().enumerate() {
            for (b, col_b) in matrix.iter().enumerate().skip(a) {
                let mut re = CompensatedSum::new();
                let mut im = CompensatedSum::new();
                for (x, y) in col_a.iter().zip(col_b) {
                    let p = x.conj() * y;
                    re += p.re;
                    im += p.im;
                }
                let target = if a == b { S::one() } else { S::zero() };
                let dev = Complex::new(re.value() - target, im.value()).norm();
                worst = worst.max(dev);
            }
        }
        Ok(worst)
    }
}

trait PowSqrt {
    fn pow_sqrt(self) -> Self;
}

impl<S: Real> PowSqrt for Scaled<S> {
    /// Square root of a positive scaled value.
    fn pow_sqrt(self) -> Self {
        let e = self.exponent();
        let (m, e) = if e.rem_euclid(2) == 1 {
            (self.mantissa() * lit::<S>(2.0), e - 1)
        } else {
            (self.mantissa(), e)
        };
        Scaled::new(m.sqrt()) * Scaled::powi(lit::<S>(2.0), e / 2)
    }
}
