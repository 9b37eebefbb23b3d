use std::path::Path;

use crate::error::{Error, Result};
use crate::fmt::g17;

use super::{PersistenceDiagram, PersistencePair};

pub const DIAGRAM_CSV_HEADER: &str = "degree,birth,death";

/// Serializes diagrams as `degree,birth,death` rows with 17 significant
/// digits; essential deaths are written as `inf`.
pub fn write_diagram_csv(diagrams: &[PersistenceDiagram]) -> String {
    let mut out = String::from(DIAGRAM_CSV_HEADER);
    out.push('\n');
    for d in diagrams {
        for p in d.pairs() {
            out.push_str(&format!(
                "{},{},{}\n",
                d.degree(),
                g17(p.birth),
                g17(p.death)
            ));
        }
    }
    out
}

fn parse_value(tok: &str, line: usize, what: &str) -> Result<f64> {
    match tok {
        "inf" | "+inf" | "Inf" | "infinity" => Ok(f64::INFINITY),
        _ => tok
            .parse::<f64>()
            .map_err(|_| Error::parse(line, format!("bad {what} {tok:?}"))),
    }
}

/// Parses diagram CSV into one diagram per degree `0..=max degree present`.
pub fn parse_diagram_csv(text: &str) -> Result<Vec<PersistenceDiagram>> {
    let mut rows: Vec<(usize, PersistencePair)> = Vec::new();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        if !seen_header && rows.is_empty() && line.replace(' ', "") == DIAGRAM_CSV_HEADER {
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                lineno,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let degree: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad degree {:?}", fields[0])))?;
        let birth = parse_value(fields[1], lineno, "birth")?;
        let death = parse_value(fields[2], lineno, "death")?;
        let pair =
            PersistencePair::new(birth, death).map_err(|e| Error::parse(lineno, e.to_string()))?;
        rows.push((degree, pair));
    }
    let max_degree = rows.iter().map(|r| r.0).max();
    let mut out: Vec<PersistenceDiagram> = match max_degree {
        Some(q) => (0..=q).map(PersistenceDiagram::empty).collect(),
        None => Vec::new(),
    };
    for (q, pair) in rows {
        out[q].push(pair);
    }
    Ok(out)
}

pub fn read_diagram_csv(path: impl AsRef<Path>) -> Result<Vec<PersistenceDiagram>> {
    parse_diagram_csv(&std::fs::read_to_string(path)?)
}

/// The diagram of degree `q`, or an empty one if the set has none.
pub fn diagram_of_degree(diagrams: &[PersistenceDiagram], q: usize) -> PersistenceDiagram {
    diagrams
        .get(q)
        .cloned()
        .unwrap_or_else(|| PersistenceDiagram::empty(q))
}
