use std::fmt::Write as _;

use super::IoError;
use crate::connection::{ChristoffelField, TorsionField};
use crate::grid::Grid;

pub const CHRISTOFFEL_FORMAT: &str = "mgroupoid-christoffel/1";
pub const TORSION_FORMAT: &str = "mgroupoid-torsion/1";

fn header(tag: &str, symbol: char, extra: &str) -> String {
    let mut s = format!("{tag}\n");
    if !extra.is_empty() {
        let _ = writeln!(s, "# {extra}");
    }
    s.push_str("# node x1 x2 x3");
    for i in 1..=3 {
        for j in 1..=3 {
            for k in 1..=3 {
                let _ = write!(s, " {symbol}{i}{j}{k}");
            }
        }
    }
    s.push('\n');
    s
}

fn rows(out: &mut String, grid: &Grid, values: &[[f64; 27]]) {
    for (node, v) in values.iter().enumerate() {
        let x = grid.coords(node);
        let _ = write!(out, "{node} {:e} {:e} {:e}", x[0], x[1], x[2]);
        for c in v {
            let _ = write!(out, " {c:e}");
        }
        out.push('\n');
    }
}

/// Columnar dump: tag line, comment lines, then `node x1 x2 x3` and 27 components per row.
pub fn christoffel_dump(gamma: &ChristoffelField) -> String {
    let mut s = header(
        CHRISTOFFEL_FORMAT,
        'G',
        &format!("convention: {}", gamma.convention_sign.as_str()),
    );
    rows(&mut s, gamma.grid(), gamma.values());
    s
}

pub fn torsion_dump(t: &TorsionField) -> String {
    let mut s = header(
        TORSION_FORMAT,
        'T',
        &format!("T^I_JK = G^I_JK - G^I_KJ; max_abs = {:e}", t.max_abs),
    );
    rows(&mut s, t.grid(), t.values());
    s
}

/// A parsed dump.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub format: String,
    pub nodes: Vec<usize>,
    pub coords: Vec<[f64; 3]>,
    pub values: Vec<[f64; 27]>,
}

pub fn parse_dump(text: &str) -> Result<FieldDump, IoError> {
    let mut lines = text.lines().enumerate();
    let format = match lines.next() {
        Some((_, l)) if l == CHRISTOFFEL_FORMAT || l == TORSION_FORMAT => l.to_string(),
        Some((_, l)) => return Err(IoError::parse(Some(1), format!("unknown dump tag `{l}`"))),
        None => return Err(IoError::parse(Some(1), "empty dump")),
    };
    let mut dump = FieldDump {
        format,
        nodes: Vec::new(),
        coords: Vec::new(),
        values: Vec::new(),
    };
    for (n, line) in lines {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 31 {
            return Err(IoError::parse(Some(n + 1), format!("expected 31 columns, found {}", cols.len())));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| IoError::parse(Some(n + 1), format!("`{s}`: {e}")))
        };
        dump.nodes.push(
            cols[0]
                .parse()
                .map_err(|e| IoError::parse(Some(n + 1), format!("node index: {e}")))?,
        );
        dump.coords.push([num(cols[1])?, num(cols[2])?, num(cols[3])?]);
        let mut v = [0.0; 27];
        for (slot, c) in v.iter_mut().zip(&cols[4..]) {
            *slot = num(c)?;
        }
        dump.values.push(v);
    }
    Ok(dump)
}
