//! Result rows and their CSV and newline-delimited JSON encodings.
//!
//! Numbers are written in scientific notation with 17 significant digits,
//! which round-trips every `f64`. Missing values are empty CSV fields and
//! JSON `null`.

use std::io::Write;

use serde::Deserialize;

/// Column order of every table.
pub const COLUMNS: [&str; 13] = [
    "model", "family", "p", "rho", "ell", "lambda1", "lambda2", "gamma", "sigma2", "Lambda", "method", "stderr",
    "diagnostics",
];

/// Extra columns appended by `sweep --mc-check`.
pub const MC_COLUMNS: [&str; 4] = ["mc_gamma", "mc_gamma_stderr", "mc_sigma2", "mc_sigma2_stderr"];

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
pub struct ResultRow {
    pub model: String,
    pub family: String,
    pub p: Option<f64>,
    pub rho: Option<f64>,
    /// `re` or `re,im`, in the same grammar as the `--ell` flag.
    pub ell: String,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub gamma: Option<f64>,
    pub sigma2: Option<f64>,
    #[serde(rename = "Lambda")]
    pub big_lambda: Option<f64>,
    pub method: String,
    pub stderr: Option<f64>,
    pub diagnostics: String,
}

/// Monte Carlo values attached to a sweep row.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct McColumns {
    pub gamma: Option<f64>,
    pub gamma_stderr: Option<f64>,
    pub sigma2: Option<f64>,
    pub sigma2_stderr: Option<f64>,
}

impl McColumns {
    fn values(&self) -> [Option<f64>; 4] {
        [self.gamma, self.gamma_stderr, self.sigma2, self.sigma2_stderr]
    }
}

/// 17 significant digits in scientific notation.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

fn json_num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => fmt17(v),
        _ => "null".into(),
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialise")
}

/// Formats `l` for the `ell` column.
pub fn fmt_ell(re: f64, im: f64) -> String {
    if im == 0.0 {
        fmt17(re)
    } else {
        format!("{},{}", fmt17(re), fmt17(im))
    }
}

impl ResultRow {
    pub fn fields(&self) -> [String; 13] {
        [
            self.model.clone(),
            self.family.clone(),
            opt(self.p),
            opt(self.rho),
            self.ell.clone(),
            opt(self.lambda1),
            opt(self.lambda2),
            opt(self.gamma),
            opt(self.sigma2),
            opt(self.big_lambda),
            self.method.clone(),
            opt(self.stderr),
            self.diagnostics.clone(),
        ]
    }

    fn json_pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("model", json_str(&self.model)),
            ("family", json_str(&self.family)),
            ("p", json_num(self.p)),
            ("rho", json_num(self.rho)),
            ("ell", json_str(&self.ell)),
            ("lambda1", json_num(self.lambda1)),
            ("lambda2", json_num(self.lambda2)),
            ("gamma", json_num(self.gamma)),
            ("sigma2", json_num(self.sigma2)),
            ("Lambda", json_num(self.big_lambda)),
            ("method", json_str(&self.method)),
            ("stderr", json_num(self.stderr)),
            ("diagnostics", json_str(&self.diagnostics)),
        ]
    }

    /// One JSON object on a single line.
    pub fn to_json(&self, mc: Option<&McColumns>) -> String {
        let mut pairs = self.json_pairs();
        if let Some(mc) = mc {
            for (name, v) in MC_COLUMNS.iter().zip(mc.values()) {
                pairs.push((name, json_num(v)));
            }
        }
        let body: Vec<String> = pairs.into_iter().map(|(k, v)| format!("{}:{v}", json_str(k))).collect();
        format!("{{{}}}", body.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Writes rows in either format, with a header line for CSV.
pub struct RowWriter<W: Write> {
    format: Format,
    with_mc: bool,
    csv: Option<csv::Writer<W>>,
    json: Option<W>,
}

impl<W: Write> RowWriter<W> {
    pub fn new(out: W, format: Format, with_mc: bool) -> std::io::Result<Self> {
        let mut w = match format {
            Format::Csv => RowWriter { format, with_mc, csv: Some(csv::Writer::from_writer(out)), json: None },
            Format::Json => RowWriter { format, with_mc, csv: None, json: Some(out) },
        };
        if let Some(csv) = w.csv.as_mut() {
            let mut header: Vec<&str> = COLUMNS.to_vec();
            if with_mc {
                header.extend(MC_COLUMNS);
            }
            csv.write_record(&header)?;
        }
        Ok(w)
    }

    pub fn write(&mut self, row: &ResultRow, mc: Option<&McColumns>) -> std::io::Result<()> {
        match self.format {
            Format::Csv => {
                let csv = self.csv.as_mut().expect("csv writer");
                let mut rec: Vec<String> = row.fields().to_vec();
                if self.with_mc {
                    let empty = McColumns::default();
                    rec.extend(mc.unwrap_or(&empty).values().map(opt));
                }
                csv.write_record(&rec)?;
                Ok(())
            }
            Format::Json => {
                let out = self.json.as_mut().expect("json writer");
                let mc = if self.with_mc { Some(mc.copied().unwrap_or_default()) } else { None };
                writeln!(out, "{}", row.to_json(mc.as_ref()))
            }
        }
    }

    pub fn finish(self) -> std::io::Result<()> {
        if let Some(mut csv) = self.csv {
            csv.flush()?;
        }
        if let Some(mut out) = self.json {
            out.flush()?;
        }
        Ok(())
    }
}
