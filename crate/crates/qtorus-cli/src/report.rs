use std::io::{self, Write};

use serde_json::Value;

use crate::args::Format;

/// One result in all three output formats.
pub struct Output {
    pub json: Value,
    pub pretty: String,
    pub csv_header: Vec<String>,
    pub csv_rows: Vec<Vec<String>>,
}

impl Output {
    pub fn new(json: Value, pretty: impl Into<String>) -> Self {
        Output { json, pretty: pretty.into(), csv_header: Vec::new(), csv_rows: Vec::new() }
    }

    pub fn with_csv(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.csv_header = header.iter().map(|s| s.to_string()).collect();
        self.csv_rows = rows;
        self
    }

    pub fn emit(&self, format: Format) -> io::Result<()> {
        let stdout = io::stdout();
        let mut out = stdout.lock();
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.json)?;
                writeln!(out)
            }
            Format::Pretty => writeln!(out, "{}", self.pretty.trim_end()),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.csv_header).map_err(csv_io)?;
                for row in &self.csv_rows {
                    w.write_record(row).map_err(csv_io)?;
                }
                w.flush()
            }
        }
    }
}

fn csv_io(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

/// `a+bi` with twelve decimals.
pub fn approx(re: f64, im: f64) -> String {
    format!("{re:.12}{im:+.12}i")
}
