use std::io::Write;

use serde::Serialize;

use crate::domain::io::fmt_f64;
use crate::error::Result;

pub const CSV_HEADER: &str = "experiment,graphon,filter_or_scnn,n,m,trial,seed,metric,value";

/// One measurement. Empty optional columns are written as empty fields.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub experiment: String,
    pub graphon: String,
    pub filter_or_scnn: String,
    pub n: usize,
    pub m: Option<usize>,
    pub trial: Option<usize>,
    pub seed: Option<u64>,
    pub metric: String,
    pub value: f64,
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

impl Row {
    pub fn to_csv(&self) -> String {
        [
            field(&self.experiment),
            field(&self.graphon),
            field(&self.filter_or_scnn),
            self.n.to_string(),
            opt(self.m),
            opt(self.trial),
            opt(self.seed),
            field(&self.metric),
            fmt_f64(self.value),
        ]
        .join(",")
    }
}

pub fn write_csv(rows: &[Row], mut out: impl Write) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.to_csv())?;
    }
    Ok(())
}

pub fn csv_string(rows: &[Row]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}
