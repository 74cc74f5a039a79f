//! Acceptance criteria, one line each. Criterion 11 is a report without a
//! pass threshold and does not affect the exit status.
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qhermite::hermite::{
    christoffel_darboux_sides, generating_coefficient, generating_target, hermite_coefficients,
    hermite_eval, EvalMethod,
};
use qhermite::moments::{moment_closed, moment_measure, moment_qgamma};
use qhermite::oscillator::{
    algebra_report, hermite_ii_orthogonality, OscillatorModel, Parity, SummationRange, XiScaling,
};
use qhermite::qcore::q_int;
use qhermite::qtrig::{convention_validation, trig_orthogonality_relative, TrigConvention, TrigKind};
use qhermite::{QParam, TruncationConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn qp(q: f64) -> QParam {
    QParam::from_f64(q).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

fn cfg60() -> TruncationConfig {
    TruncationConfig::default()
}

fn c1() -> Outcome {
    let grid = [-2.5, -1.0, -0.3, 0.4, 1.1, 2.5];
    let mut worst = 0.0f64;
    for q in [1.05, 1.2, 2f64.sqrt(), 2.0] {
        let q = qp(q);
        for n in 0..=20 {
            for xi in grid {
                let a = hermite_eval(n, xi, &q, EvalMethod::Recursion).unwrap();
                let b = hermite_eval(n, xi, &q, EvalMethod::ClosedForm).unwrap();
                worst = worst.max((a - b).abs() / a.abs().max(1.0));
            }
        }
    }
    Outcome {
        pass: worst < 1e-10,
        detail: format!("max scaled difference {worst:.2e} (limit 1e-10)"),
    }
}

fn c2() -> Outcome {
    let q = qp(2f64.sqrt());
    let s = q.q();
    let b3 = q_int(3, q.p2()).unwrap();
    let expected: [Vec<f64>; 5] = [
        vec![1.0],
        vec![0.0, 2.0 * s.powf(-0.5)],
        vec![-2.0 * s.powi(-2), 0.0, 4.0 * s.powi(-3)],
        vec![
            0.0,
            -4.0 * s.powf(-0.5) * s.powi(-2) * b3,
            0.0,
            8.0 * s.powf(-0.5) * s.powi(-7),
        ],
        vec![
            4.0 * s.powi(-4) * b3,
            0.0,
            -8.0 * s.powi(-5) * b3 * (s.powi(-4) + 1.0),
            0.0,
            16.0 * s.powi(-14),
        ],
    ];
    let mut worst = 0.0f64;
    for (n, want) in expected.iter().enumerate() {
        let got = hermite_coefficients(n as u32, &q).unwrap().to_vec();
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            worst = worst.max(if *w == 0.0 { g.abs() } else { rel(*g, *w) });
        }
    }
    Outcome {
        pass: worst < 1e-12,
        detail: format!("H_0..H_4 coefficients, max rel. error {worst:.2e} (limit 1e-12)"),
    }
}

fn c3() -> Outcome {
    let mut worst = 0.0f64;
    for q in [1.2, 1.5] {
        let q = qp(q);
        for n in 0..=10 {
            for xi in [0.5, 1.1] {
                let a = generating_coefficient(n, xi, &q).unwrap();
                let b = generating_target(n, xi, &q).unwrap();
                worst = worst.max(rel(a, b));
            }
        }
    }
    Outcome {
        pass: worst < 1e-10,
        detail: format!("max rel. error {worst:.2e} (limit 1e-10)"),
    }
}

fn c4() -> Outcome {
    let points = [-1.3, -0.4, 0.2, 0.9, 1.7];
    let mut worst = 0.0f64;
    for q in [1.2, 2.0] {
        let q = qp(q);
        for n in 0..=12 {
            for x in points {
                for y in points {
                    if x != y {
                        let (l, r) = christoffel_darboux_sides(n, x, y, &q).unwrap();
                        worst = worst.max(rel(l, r));
                    }
                }
            }
        }
    }
    Outcome {
        pass: worst < 1e-10,
        detail: format!("max rel. residual {worst:.2e} (limit 1e-10)"),
    }
}

fn c5() -> Outcome {
    let v = convention_validation();
    let exactly_one = v.validated.is_some();
    let conv = TrigConvention::validated().unwrap();
    let q = qp(1.3);
    let cfg = cfg60();
    let mut worst = 0.0f64;
    for kind in [TrigKind::Cos, TrigKind::Sin] {
        for k in -3..=3 {
            for l in -3..=3 {
                worst = worst.max(trig_orthogonality_relative(k, l, kind, &q, conv, &cfg).unwrap());
            }
        }
    }
    Outcome {
        pass: exactly_one && worst < 1e-8,
        detail: format!(
            "validated {:?} (other convention residual {:.2e}); max rel. residual {worst:.2e} (limit 1e-8)",
            conv, v.max_residual_b
        ),
    }
}

fn c6() -> Outcome {
    let model = OscillatorModel::new(qp(1.3), cfg60()).unwrap();
    let half = cfg60().lattice_cutoff() / 2;
    let r = model.fourier_gram_residual(half).unwrap();
    Outcome {
        pass: r < 1e-7,
        detail: format!("columns |l| <= {half}, max Gram deviation {r:.2e} (limit 1e-7)"),
    }
}

fn c7() -> Outcome {
    let model = OscillatorModel::new(qp(1.3), cfg60()).unwrap();
    let mut worst = 0.0f64;
    let mut mass_err = 0.0f64;
    let measures: Vec<_> = Parity::BOTH.iter().map(|&r| model.measure(r)).collect();
    for mu in &measures {
        mass_err = mass_err.max((mu.total_mass() - 1.0).abs());
        for n in 0..=6 {
            for m in 0..=6 {
                let res = model
                    .hermite_orthogonality_residual(n, m, mu, XiScaling::Hermite)
                    .unwrap();
                worst = worst.max(res);
            }
        }
    }
    let disjoint = measures[0]
        .iter()
        .zip(measures[1].iter())
        .all(|((_, a), (_, b))| a == 0.0 || b == 0.0);
    let parity = measures.iter().all(|m| m.support_matches_parity());
    Outcome {
        pass: worst < 1e-6 && mass_err < 1e-8 && disjoint && parity,
        detail: format!(
            "max rel. residual {worst:.2e} (limit 1e-6), mass error {mass_err:.2e} (limit 1e-8), disjoint supports {disjoint}"
        ),
    }
}

/// The second moment at q = sqrt 2 as quoted to four digits.
#[allow(clippy::approx_constant)]
const PRINTED_M2: f64 = 0.7071;

fn c8() -> Outcome {
    let cfg = cfg60();
    let mut closed_vs_gamma = 0.0f64;
    let mut closed_vs_measure = 0.0f64;
    let mut odd = 0.0f64;
    for q in [1.2, 2f64.sqrt()] {
        let q = qp(q);
        let model = OscillatorModel::new(q, cfg).unwrap();
        let measures: Vec<_> = Parity::BOTH.iter().map(|&r| model.measure(r)).collect();
        for order in 0..=12 {
            if order % 2 == 0 {
                let c = moment_closed(order, &q).unwrap();
                closed_vs_gamma = closed_vs_gamma.max(rel(c, moment_qgamma(order, &q, &cfg).unwrap()));
                for mu in &measures {
                    let m = moment_measure(order, &model, mu).unwrap().value;
                    closed_vs_measure = closed_vs_measure.max(rel(c, m));
                }
            } else {
                for mu in &measures {
                    odd = odd.max(moment_measure(order, &model, mu).unwrap().value.abs());
                }
            }
        }
    }
    let s2 = qp(2f64.sqrt());
    let m2 = moment_closed(2, &s2).unwrap();
    let m4 = moment_closed(4, &s2).unwrap();
    let values = (m2 - PRINTED_M2).abs() < 5e-5 && (m4 - 3.5).abs() < 1e-12;
    Outcome {
        pass: closed_vs_gamma < 1e-10 && closed_vs_measure < 1e-6 && odd < 1e-8 && values,
        detail: format!(
            "closed/q-gamma {closed_vs_gamma:.2e} (1e-10), closed/measure {closed_vs_measure:.2e} (1e-6), odd {odd:.2e} (1e-8), q=sqrt2: {m2:.7}, {m4:.7}"
        ),
    }
}

fn classical_hermite(n: u32, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, 2.0 * x);
    if n == 0 {
        return 1.0;
    }
    for k in 1..n {
        let c = 2.0 * x * b - 2.0 * k as f64 * a;
        a = b;
        b = c;
    }
    b
}

fn c9() -> Outcome {
    let q = qp(1.0 + 1e-7);
    let grid: Vec<f64> = (0..=24).map(|i| -3.0 + 0.25 * i as f64).collect();
    let mut worst = 0.0f64;
    let mut pointwise = 0.0f64;
    for n in 0..=10 {
        let sup = grid
            .iter()
            .map(|&x| classical_hermite(n, x).abs())
            .fold(0.0, f64::max);
        for &x in &grid {
            let a = hermite_eval(n, x, &q, EvalMethod::Recursion).unwrap();
            let b = classical_hermite(n, x);
            worst = worst.max((a - b).abs() / sup);
            pointwise = pointwise.max((a - b).abs() / b.abs());
        }
    }
    let mut moments = 0.0f64;
    let mut dfact = 1.0;
    for n in 1..=5u32 {
        dfact *= (2 * n - 1) as f64;
        let target = dfact / 2f64.powi(n as i32);
        moments = moments.max(rel(moment_closed(2 * n, &q).unwrap(), target));
    }
    Outcome {
        pass: worst < 1e-4 && moments < 1e-4,
        detail: format!(
            "H_n error relative to sup |H_n| on [-3,3] {worst:.2e} (pointwise worst {pointwise:.2e}), moments {moments:.2e} (limit 1e-4)"
        ),
    }
}

fn c10() -> Outcome {
    let q = qp(1.3);
    let cfg = cfg60();
    let sums: Vec<Vec<_>> = (0..=5)
        .map(|n| {
            (0..=5)
                .map(|m| hermite_ii_orthogonality(n, m, SummationRange::AllIntegers, &q, &cfg).unwrap())
                .collect()
        })
        .collect();
    let mut off = 0.0f64;
    for n in 0..=5 {
        for m in 0..=5 {
            if n != m {
                let scale = sums[n][n].sum.abs().max(sums[m][m].sum.abs());
                off = off.max(sums[n][m].sum.abs() / scale);
            }
        }
    }
    let nt: Vec<f64> = (0..=5).map(|n| sums[n][n].n_tilde.unwrap()).collect();
    let spread = nt.iter().map(|&x| rel(x, nt[0])).fold(0.0, f64::max);
    Outcome {
        pass: off < 1e-6 && spread < 1e-5,
        detail: format!(
            "off-diagonal {off:.2e} (limit 1e-6), normalization {:.12} with spread {spread:.2e} (limit 1e-5)",
            nt[0]
        ),
    }
}

fn c11() -> Outcome {
    let report = algebra_report(&qp(1.3), &TruncationConfig::default(), &[40, 60, 80], 6).unwrap();
    let rows: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("L={}: {:.2e}", r.cutoff, r.residual))
        .collect();
    Outcome {
        pass: report.decreasing,
        detail: format!("interior |nu| <= {}, {}", report.interior, rows.join(", ")),
    }
}

type Criterion = (u32, fn() -> Outcome, Option<Duration>, bool);

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria: [Criterion; 11] = [
        (1, c1, Some(secs(1)), true),
        (2, c2, None, true),
        (3, c3, Some(secs(1)), true),
        (4, c4, Some(secs(1)), true),
        (5, c5, Some(secs(10)), true),
        (6, c6, Some(secs(20)), true),
        (7, c7, Some(secs(30)), true),
        (8, c8, Some(secs(30)), true),
        (9, c9, None, true),
        (10, c10, None, true),
        (11, c11, None, false),
    ];
    let mut failed = 0;
    for (id, f, budget, gating) in criteria {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed < b);
        let pass = out.pass && in_time;
        let label = match (gating, pass) {
            (true, true) => "PASS",
            (true, false) => "FAIL",
            (false, true) => "PASS (report only)",
            (false, false) => "FAIL (report only)",
        };
        let budget_text = budget.map_or(String::new(), |b| format!(" / {}s", b.as_secs()));
        println!(
            "criterion {id:2}: {label} [{:.3}s{budget_text}] {}",
            elapsed.as_secs_f64(),
            out.detail
        );
        if gating && !pass {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("acceptance: all gating criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} gating criteria failed");
        ExitCode::FAILURE
    }
}
