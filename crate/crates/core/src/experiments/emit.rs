use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tables::TableResult;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Serialized form of a table: one row per cell plus the seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDocument {
    pub name: String,
    pub dim: usize,
    pub base_seed: u64,
    pub seeds: Vec<u64>,
    pub resamples: usize,
    pub cells: Vec<CellRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRow {
    pub param: String,
    pub steps: usize,
    pub mean: f64,
    pub max: f64,
    pub trials: usize,
}

impl From<&TableResult> for TableDocument {
    fn from(t: &TableResult) -> Self {
        Self {
            name: t.name.clone(),
            dim: t.dim,
            base_seed: t.base_seed,
            seeds: t.seeds.clone(),
            resamples: t.resamples,
            cells: t
                .cells
                .iter()
                .map(|c| CellRow {
                    param: c.param.clone(),
                    steps: c.steps,
                    mean: c.mean,
                    max: c.max,
                    trials: c.values.len(),
                })
                .collect(),
        }
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_table<W: Write>(t: &TableResult, format: OutputFormat, w: W) -> Result<()> {
    let doc = TableDocument::from(t);
    match format {
        OutputFormat::Csv => {
            let mut out = csv::Writer::from_writer(w);
            out.write_record(["param", "steps", "mean", "max", "trials"])?;
            for c in &doc.cells {
                out.write_record([
                    c.param.clone(),
                    c.steps.to_string(),
                    fmt_f64(c.mean),
                    fmt_f64(c.max),
                    c.trials.to_string(),
                ])?;
            }
            out.flush().map_err(csv::Error::from)?;
        }
        OutputFormat::Json => {
            let mut w = w;
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w).map_err(csv::Error::from)?;
        }
    }
    Ok(())
}

/// Writes to `path`, or to standard output when `path` is `None`.
pub fn emit_table(t: &TableResult, format: OutputFormat, path: Option<&Path>) -> Result<()> {
    match path {
        None => write_table(t, format, io::stdout().lock()),
        Some(p) => {
            let file = File::create(p).map_err(|source| Error::Io {
                path: p.to_path_buf(),
                source,
            })?;
            write_table(t, format, BufWriter::new(file)).map_err(|e| match e {
                Error::Csv(c) if c.is_io_error() => Error::Io {
                    path: p.to_path_buf(),
                    source: io::Error::other(c.to_string()),
                },
                other => other,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::TableCell;

    fn table(cells: Vec<TableCell>) -> TableResult {
        TableResult {
            name: "t".into(),
            dim: 2,
            trials: 2,
            base_seed: 1,
            seeds: vec![10, 11],
            resamples: 0,
            cells,
        }
    }

    fn cell() -> TableCell {
        TableCell {
            param: "lambda=0.5".into(),
            steps: 10,
            mean: 1e-12,
            max: 0.1 + 0.2,
            median: 1e-12,
            values: vec![1e-12, 1e-12],
        }
    }

    fn csv_of(t: &TableResult) -> String {
        let mut buf = Vec::new();
        write_table(t, OutputFormat::Csv, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn one_cell_two_lines() {
        let s = csv_of(&table(vec![cell()]));
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(
            lines,
            vec![
                "param,steps,mean,max,trials",
                "lambda=0.5,10,1e-12,0.30000000000000004,2"
            ]
        );
    }

    #[test]
    fn empty_grid_is_header_only() {
        assert_eq!(csv_of(&table(vec![])), "param,steps,mean,max,trials\n");
    }

    #[test]
    fn json_round_trip() {
        let t = table(vec![cell()]);
        let mut buf = Vec::new();
        write_table(&t, OutputFormat::Json, &mut buf).unwrap();
        let doc: TableDocument = serde_json::from_slice(&buf).unwrap();
        assert_eq!(doc, TableDocument::from(&t));
        assert_eq!(doc.seeds, vec![10, 11]);
    }

    #[test]
    fn bad_path_has_context() {
        let err = emit_table(
            &table(vec![]),
            OutputFormat::Csv,
            Some(Path::new("/nonexistent/dir/t.csv")),
        )
        .unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/t.csv"));
    }
}
