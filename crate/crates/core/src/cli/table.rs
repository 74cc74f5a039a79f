use std::io::Write;

use clap::ValueEnum;
use serde::ser::{Serialize, SerializeStruct, Serializer};
use serde_json::value::RawValue;

use crate::config::{QParameter, TruncationConfig};
use crate::error::{QError, Result};
use crate::hermite::hermite_coefficients;
use crate::moments::{moment_exact, moment_measure, moment_qgamma};
use crate::oscillator::{
    hermite_argument, position_eigenvalue, LatticeSite, OscillatorModel, Parity, Sign,
};
use crate::real::{to_f64, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    /// Ground-state weights on the position lattice.
    Measure,
    /// Coefficients of H_0 .. H_nmax in increasing powers.
    Polynomial,
    /// Moments by every available route.
    Moments,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A table cell. Numbers are carried as text so that high-precision values
/// keep all their digits.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(String),
    Missing,
}

impl Cell {
    pub fn num<S: Real>(x: S) -> Self {
        if x.is_finite() {
            Cell::Num(x.to_sci())
        } else {
            Cell::Missing
        }
    }

    fn text(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Int(i) => s.serialize_i64(*i),
            Cell::Num(t) => RawValue::from_string(t.clone())
                .map_err(serde::ser::Error::custom)?
                .serialize(s),
            Cell::Missing => s.serialize_none(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub what: &'static str,
    pub q: f64,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub converged: bool,
    /// The error that stopped the table early, if any.
    pub error: Option<QError>,
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Table", 6)?;
        st.serialize_field("what", self.what)?;
        st.serialize_field("q", &Cell::Num(format!("{:.16e}", self.q)))?;
        st.serialize_field("converged", &self.converged)?;
        st.serialize_field("error", &self.error.as_ref().map(|e| e.to_string()))?;
        st.serialize_field("columns", &self.columns)?;
        st.serialize_field("rows", &self.rows)?;
        st.end()
    }
}

impl Table {
    fn new(what: &'static str, q: f64, columns: &[&str]) -> Self {
        Self {
            what,
            q,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            converged: true,
            error: None,
        }
    }

    fn fail(&mut self, e: QError) {
        self.converged = false;
        self.error.get_or_insert(e);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let mut header = self.columns.clone();
                header.push("converged".into());
                w.write_record(&header)?;
                for row in &self.rows {
                    let mut rec: Vec<String> = row.iter().map(Cell::text).collect();
                    rec.push(self.converged.to_string());
                    w.write_record(&rec)?;
                }
                w.flush()
            }
        }
    }
}

/// `(nu, tau, x, xi, weight)` for every retained position site.
pub fn measure_table<S: Real>(r: Parity, qp: QParameter<S>, cfg: TruncationConfig) -> Table {
    let mut t = Table::new("measure", qp.as_f64(), &["nu", "tau", "x", "xi", "weight"]);
    let model = match OscillatorModel::new(qp, cfg) {
        Ok(m) => m,
        Err(e) => {
            t.fail(e);
            return t;
        }
    };
    let mu = model.measure(r);
    for (nu, w) in mu.iter() {
        for tau in [Sign::Plus, Sign::Minus] {
            let site = LatticeSite::new(nu, tau);
            t.rows.push(vec![
                Cell::Int(nu),
                Cell::Int(tau.value()),
                Cell::num(position_eigenvalue(site, &qp)),
                Cell::num(hermite_argument(site, &qp)),
                Cell::num(w),
            ]);
        }
    }
    if mu.tail_ratio() > cfg.series_tol() {
        t.fail(QError::Convergence {
            what: "ground-state measure window",
            terms: mu.iter().count(),
            partial: to_f64(mu.total_mass()),
        });
    }
    t
}

/// One row per degree: `n, c0, c1, ..., c_nmax`.
pub fn polynomial_table<S: Real>(nmax: u32, qp: QParameter<S>) -> Table {
    let mut columns = vec!["n".to_string()];
    columns.extend((0..=nmax).map(|k| format!("c{k}")));
    let mut t = Table::new("polynomial", qp.as_f64(), &[]);
    t.columns = columns;
    for n in 0..=nmax {
        match hermite_coefficients(n, &qp) {
            Ok(c) => {
                let mut row = vec![Cell::Int(n as i64)];
                for k in 0..=nmax as usize {
                    let v = if k <= n as usize { c.coefficient(k) } else { S::zero() };
                    row.push(Cell::num(v));
                }
                t.rows.push(row);
            }
            Err(e) => {
                t.fail(e);
                break;
            }
        }
    }
    t
}

/// One row per order `0 ..= 2 nmax`.
pub fn moments_table<S: Real>(nmax: u32, qp: QParameter<S>, cfg: TruncationConfig) -> Table {
    let mut t = Table::new(
        "moments",
        qp.as_f64(),
        &["order", "closed", "qgamma", "measure_r0", "measure_r1", "max_rel_diff"],
    );
    let model = match OscillatorModel::new(qp, cfg) {
        Ok(m) => m,
        Err(e) => {
            t.fail(e);
            return t;
        }
    };
    let measures = [model.measure(Parity::Even), model.measure(Parity::Odd)];
    for order in 0..=2 * nmax {
        let closed = moment_exact(order, &qp);
        let qgamma = if order % 2 == 0 {
            moment_qgamma(order, &qp, &cfg)
        } else {
            Ok(S::zero())
        };
        let by_measure: Vec<Result<S>> = measures
            .iter()
            .map(|mu| moment_measure(order, &model, mu).map(|m| m.value))
            .collect();
        let mut values = vec![closed, qgamma];
        values.extend(by_measure);
        let mut row = vec![Cell::Int(order as i64)];
        let mut ok = Vec::new();
        for v in values {
            match v {
                Ok(x) => {
                    row.push(Cell::num(x));
                    ok.push(x);
                }
                Err(e) => {
                    row.push(Cell::Missing);
                    t.fail(e);
                }
            }
        }
        let scale = ok
            .first()
            .map(|c| c.abs())
            .filter(|c| *c > S::zero())
            .unwrap_or_else(S::one);
        let mut worst = S::zero();
        for (i, a) in ok.iter().enumerate() {
            for b in &ok[i + 1..] {
                worst = worst.max((*a - *b).abs() / scale);
            }
        }
        row.push(Cell::num(worst));
        t.rows.push(row);
    }
    t
}
