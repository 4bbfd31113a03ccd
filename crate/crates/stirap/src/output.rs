//! CSV and JSON writers.
//!
//! Every float is printed as `{:.16e}` (17 significant digits), so identical
//! results give byte-identical files. CSV uses LF line endings and writes
//! failed values as `NaN`; JSON writes them as `null`.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use stirap_core::{CrossingReport, DressedFrame, SweepResult, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}` (expected csv or json)")),
        }
    }
}

/// serde_json formatter printing floats with 17 significant digits.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sci17;

impl serde_json::ser::Formatter for Sci17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes `value` as compact JSON with [`Sci17`] floats and a final newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(w: &mut W, value: &T) -> io::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut *w, Sci17);
    value.serialize(&mut ser).map_err(io::Error::other)?;
    w.write_all(b"\n")
}

/// Named columns of equal length.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<(String, Vec<f64>)>,
    /// Extra top-level JSON fields; not written to CSV.
    pub meta: Vec<(String, serde_json::Value)>,
}

impl Table {
    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) {
        self.columns.push((name.into(), values));
    }

    pub fn header(&self) -> String {
        self.columns
            .iter()
            .map(|(n, _)| n.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.1.len())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "{}", self.header())?;
        for r in 0..self.rows() {
            for (k, (_, col)) in self.columns.iter().enumerate() {
                if k > 0 {
                    w.write_all(b",")?;
                }
                write!(w, "{:.16e}", col[r])?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn write<W: Write>(&self, w: &mut W, format: Format) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => write_json(w, self),
        }
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.columns.len() + self.meta.len()))?;
        for (name, values) in &self.columns {
            map.serialize_entry(name, values)?;
        }
        for (name, value) in &self.meta {
            map.serialize_entry(name, value)?;
        }
        map.end()
    }
}

/// `t, re_a1, im_a1, …, rho11, …, rhoNN, abs_rho12, …, norm`.
pub fn trajectory_table(tr: &Trajectory) -> Table {
    let n = tr.dim;
    let k = 0..tr.len();
    let mut t = Table::default();
    t.push("t", tr.times.clone());
    for i in 0..n {
        t.push(
            format!("re_a{}", i + 1),
            k.clone().map(|s| tr.amplitudes[s][i].re).collect(),
        );
        t.push(
            format!("im_a{}", i + 1),
            k.clone().map(|s| tr.amplitudes[s][i].im).collect(),
        );
    }
    for i in 0..n {
        t.push(format!("rho{0}{0}", i + 1), tr.populations(i));
    }
    for i in 0..n {
        for j in i + 1..n {
            t.push(
                format!("abs_rho{}{}", i + 1, j + 1),
                k.clone().map(|s| tr.coherence(s, i, j).norm()).collect(),
            );
        }
    }
    t.push("norm", k.map(|s| tr.norm(s)).collect());
    t
}

/// `t, lambda1…N, pop_d1…N, V_12, V_13, …`.
pub fn dressed_table(df: &DressedFrame) -> Table {
    let n = df.dim;
    let mut t = Table::default();
    t.push("t", df.times.clone());
    for i in 0..n {
        t.push(format!("lambda{}", i + 1), df.eigenvalue_series(i));
    }
    for i in 0..n {
        t.push(format!("pop_d{}", i + 1), df.population_series(i));
    }
    for i in 0..n {
        for j in i + 1..n {
            t.push(format!("V_{}{}", i + 1, j + 1), df.coupling_series(i, j));
        }
    }
    t
}

/// `x, y, value` in row-major order, with axis names, constraint lines and
/// failed cells as JSON metadata.
pub fn sweep_table(r: &SweepResult) -> Table {
    let (nx, ny) = (r.nx(), r.ny());
    let (xs, ys) = (r.x.values(), r.y.values());
    let mut t = Table::default();
    t.push("x", (0..nx * ny).map(|i| xs[i % nx]).collect());
    t.push("y", (0..nx * ny).map(|i| ys[i / nx]).collect());
    t.push("value", r.grid.clone());
    t.meta = vec![
        ("x_param".into(), r.x.param.name().into()),
        ("y_param".into(), r.y.param.name().into()),
        ("nx".into(), nx.into()),
        ("ny".into(), ny.into()),
        ("observable".into(), r.observable.to_string().into()),
        ("constraint_lines".into(), constraint_lines_json(r)),
        ("failures".into(), failures_json(r)),
    ];
    t
}

pub fn constraint_lines_json(r: &SweepResult) -> serde_json::Value {
    r.constraint_lines
        .iter()
        .map(|l| serde_json::json!({"label": l.label, "slope": l.slope, "intercept": l.intercept}))
        .collect()
}

pub fn failures_json(r: &SweepResult) -> serde_json::Value {
    r.failures
        .iter()
        .map(|(ix, iy, e)| serde_json::json!({"ix": ix, "iy": iy, "error": e.to_string()}))
        .collect()
}

pub fn crossings_json(reports: &[CrossingReport]) -> serde_json::Value {
    reports
        .iter()
        .map(|c| {
            serde_json::json!({
                "pair": [c.pair.0 + 1, c.pair.1 + 1],
                "time": c.time,
                "gap": c.gap,
                "gap_slope": c.gap_slope,
                "coupling_peak": c.coupling_peak,
                "p_lz": c.p_lz,
                "p_lz_gap": c.p_lz_gap,
                "lorentz_hwhm": c.lorentz_hwhm,
                "lorentz_fwhm": c.lorentz_fwhm,
                "coupling_area": c.coupling_area,
            })
        })
        .collect()
}
