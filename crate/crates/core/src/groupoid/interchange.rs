//! Line-oriented text interchange format for finite groupoids.
//!
//! ```text
//! mgroupoid-groupoid/1
//! objects 2
//! arrow 0 0 0 id0        # id source target [label]
//! arrow 1 1 1 id1
//! arrow 2 0 1
//! arrow 3 1 0
//! inverse 0 0
//! inverse 1 1
//! inverse 2 3            # each pair listed once; both directions are registered
//! compose 3 2 0          # g f result: "f then g"
//! ```
//!
//! Blank lines and `#` comments are ignored. There is no identity keyword: the identity at `m`
//! is the loop `e` at `m` with `e ∘ e = e`. Every arrow needs an inverse line, so
//! self-inverse arrows, identities included, are written `inverse z z`.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Arrow, ArrowId, FiniteGroupoid, GroupoidError, ObjectId};

pub const VERSION_TAG: &str = "mgroupoid-groupoid/1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterchangeError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
}

fn parse_err(line: usize, message: impl Into<String>) -> InterchangeError {
    InterchangeError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse(text: &str) -> Result<FiniteGroupoid, InterchangeError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, first)) if first.trim() == VERSION_TAG => {}
        Some((n, first)) => {
            return Err(parse_err(
                n,
                format!("expected version tag `{VERSION_TAG}`, found `{}`", first.trim()),
            ))
        }
        None => return Err(parse_err(1, "empty document")),
    }

    let mut num_objects: Option<usize> = None;
    let mut arrows: Vec<(usize, Arrow)> = Vec::new();
    let mut inverse_pairs: Vec<(usize, usize, usize)> = Vec::new();
    let mut composition = HashMap::new();
    let mut last_line = 1;

    for (n, raw) in lines {
        last_line = n;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        let keyword = words.next().unwrap();
        let rest: Vec<&str> = words.collect();
        let num = |s: &str| -> Result<usize, InterchangeError> {
            s.parse::<usize>()
                .map_err(|_| parse_err(n, format!("`{s}` is not a non-negative integer")))
        };
        match keyword {
            "objects" => {
                if rest.len() != 1 {
                    return Err(parse_err(n, "`objects` takes one count"));
                }
                if num_objects.is_some() {
                    return Err(parse_err(n, "`objects` given twice"));
                }
                num_objects = Some(num(rest[0])?);
            }
            "arrow" => {
                if !(3..=4).contains(&rest.len()) {
                    return Err(parse_err(n, "`arrow` takes: id source target [label]"));
                }
                arrows.push((
                    n,
                    Arrow {
                        id: ArrowId(num(rest[0])?),
                        source: ObjectId(num(rest[1])?),
                        target: ObjectId(num(rest[2])?),
                        label: rest.get(3).map(|s| s.to_string()),
                    },
                ));
            }
            "inverse" => {
                if rest.len() != 2 {
                    return Err(parse_err(n, "`inverse` takes two arrow ids"));
                }
                inverse_pairs.push((n, num(rest[0])?, num(rest[1])?));
            }
            "compose" => {
                if rest.len() != 3 {
                    return Err(parse_err(n, "`compose` takes: g f result"));
                }
                let key = (ArrowId(num(rest[0])?), ArrowId(num(rest[1])?));
                if composition.insert(key, ArrowId(num(rest[2])?)).is_some() {
                    return Err(parse_err(n, "duplicate composition entry"));
                }
            }
            other => return Err(parse_err(n, format!("unknown keyword `{other}`"))),
        }
    }

    let num_objects = num_objects.ok_or_else(|| parse_err(last_line, "missing `objects` line"))?;
    arrows.sort_by_key(|(_, a)| a.id);
    for (i, (n, a)) in arrows.iter().enumerate() {
        if a.id.0 != i {
            return Err(parse_err(*n, format!("arrow ids must be 0..{} without gaps", arrows.len())));
        }
        if a.source.0 >= num_objects || a.target.0 >= num_objects {
            return Err(parse_err(*n, "arrow endpoint outside the object set"));
        }
    }
    let count = arrows.len();
    let mut inverse: Vec<Option<ArrowId>> = vec![None; count];
    for &(n, a, b) in &inverse_pairs {
        if a >= count || b >= count {
            return Err(parse_err(n, "inverse refers to an unknown arrow"));
        }
        for (x, y) in [(a, b), (b, a)] {
            match inverse[x] {
                Some(prev) if prev.0 != y => {
                    return Err(parse_err(n, format!("arrow {x} given two inverses")))
                }
                _ => inverse[x] = Some(ArrowId(y)),
            }
        }
    }
    let inverse = inverse
        .into_iter()
        .enumerate()
        .map(|(i, z)| z.ok_or_else(|| parse_err(last_line, format!("arrow {i} has no inverse"))))
        .collect::<Result<Vec<_>, _>>()?;

    let arrows: Vec<Arrow> = arrows.into_iter().map(|(_, a)| a).collect();
    let mut identities = Vec::with_capacity(num_objects);
    for m in 0..num_objects {
        let e = arrows
            .iter()
            .find(|a| {
                a.source.0 == m
                    && a.target.0 == m
                    && composition.get(&(a.id, a.id)) == Some(&a.id)
                    && inverse[a.id.0] == a.id
            })
            .map(|a| a.id)
            .ok_or_else(|| parse_err(last_line, format!("object {m} has no identity loop")))?;
        identities.push(e);
    }
    Ok(FiniteGroupoid::from_parts(
        num_objects,
        arrows,
        inverse,
        identities,
        composition,
    )?)
}

/// Serialise in the interchange format; entries are emitted in sorted order.
pub fn write(groupoid: &FiniteGroupoid) -> String {
    let mut out = String::new();
    writeln!(out, "{VERSION_TAG}").unwrap();
    writeln!(out, "objects {}", groupoid.num_objects()).unwrap();
    for a in groupoid.arrows() {
        match &a.label {
            Some(l) => writeln!(out, "arrow {} {} {} {l}", a.id.0, a.source.0, a.target.0),
            None => writeln!(out, "arrow {} {} {}", a.id.0, a.source.0, a.target.0),
        }
        .unwrap();
    }
    for a in groupoid.arrows() {
        let inv = groupoid.inverse(a.id).expect("registered arrow");
        if a.id <= inv {
            writeln!(out, "inverse {} {}", a.id.0, inv.0).unwrap();
        }
    }
    let mut entries: Vec<_> = groupoid.composition_table().iter().collect();
    entries.sort_unstable();
    for (&(g, f), &r) in entries {
        writeln!(out, "compose {} {} {}", g.0, f.0, r.0).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::FiniteGroup;

    #[test]
    fn round_trip_of_constructed_groupoids() {
        for g in [
            FiniteGroupoid::pair(3),
            FiniteGroupoid::trivial(2, &FiniteGroup::dihedral(3)),
            FiniteGroupoid::identities_only(4),
        ] {
            let text = write(&g);
            assert_eq!(parse(&text).unwrap(), g);
        }
    }

    #[test]
    fn hand_written_document() {
        let doc = "mgroupoid-groupoid/1\n\
                   objects 2\n\
                   arrow 0 0 0 id0\n\
                   arrow 1 1 1 id1\n\
                   arrow 2 0 1\n\
                   arrow 3 1 0 # back\n\
                   inverse 0 0\n\
                   inverse 1 1\n\
                   inverse 2 3\n\
                   compose 0 0 0\ncompose 1 1 1\ncompose 2 0 2\ncompose 1 2 2\n\
                   compose 3 1 3\ncompose 0 3 3\ncompose 3 2 0\ncompose 2 3 1\n";
        let g = parse(doc).unwrap();
        assert!(g.validate_axioms().is_valid());
        assert!(g.orbit_decomposition().is_transitive);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(
            parse("wrong-tag\n"),
            Err(InterchangeError::Parse { line: 1, .. })
        ));
        let doc = "mgroupoid-groupoid/1\nobjects 1\narrow 0 0 x\n";
        assert!(matches!(parse(doc), Err(InterchangeError::Parse { line: 3, .. })));
        let doc = "mgroupoid-groupoid/1\nobjects 1\narrow 0 0 0\nfrobnicate\n";
        assert!(matches!(parse(doc), Err(InterchangeError::Parse { line: 4, .. })));
        let truncated = "mgroupoid-groupoid/1\nobjects 1\narrow 0 0 0\n";
        assert!(matches!(parse(truncated), Err(InterchangeError::Parse { .. })));
    }
}
