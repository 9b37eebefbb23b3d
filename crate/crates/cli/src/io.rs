use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use tdakernel::fmt::g17;
use tdakernel::persistence::{diagram_of_degree, read_diagram_csv};
use tdakernel::{KernelSpecJson, PersistenceDiagram};

use crate::commands::CliError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn read_diagrams(
    paths: &[PathBuf],
    degree: usize,
) -> Result<Vec<PersistenceDiagram>, CliError> {
    paths
        .iter()
        .map(|p| {
            let all = read_diagram_csv(p).map_err(|e| CliError::from(e).context(p))?;
            Ok(diagram_of_degree(&all, degree).reduced())
        })
        .collect()
}

/// Accepts a path to a JSON file or an inline JSON object.
pub fn read_spec(arg: &str) -> Result<KernelSpecJson, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        read_text(Path::new(arg))?
    };
    Ok(serde_json::from_str(&text)?)
}

/// `+1`/`-1` per line; blank lines and `#` comments are skipped.
pub fn parse_labels(text: &str) -> Result<Vec<i8>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "1" | "+1" => out.push(1),
            "-1" => out.push(-1),
            _ => {
                return Err(CliError::Input(format!(
                    "line {}: bad label {line:?}",
                    i + 1
                )))
            }
        }
    }
    Ok(out)
}

/// Rectangular numeric CSV.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>, CliError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CliError::Input(format!("line {}: non-numeric entry", i + 1)))?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(CliError::Input(format!("line {}: ragged row", i + 1)));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Input("empty matrix file".into()));
    }
    let (n, m) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_row_iterator(n, m, rows.into_iter().flatten()))
}

pub fn matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| g17(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
