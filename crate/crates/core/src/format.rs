//! Plain-text family format.
//!
//! ```text
//! n 4
//! -
//! 1 2
//! 3 4
//! ```
//!
//! The first line names the ground set. Every further non-empty line is one
//! member as space-separated integers; `-` stands for the empty set. Members
//! are written in canonical order (size, then lexicographic).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{Family, GroundSet, Subset};

pub fn write_family(family: &Family) -> String {
    let mut out = format!("n {}\n", family.ground().n());
    for m in family {
        if m.is_empty() {
            out.push('-');
        } else {
            let parts: Vec<String> = m.elements().map(|e| e.to_string()).collect();
            out.push_str(&parts.join(" "));
        }
        out.push('\n');
    }
    out
}

pub fn parse_family(text: &str) -> Result<Family> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line_no, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing `n <integer>` header".into(),
    })?;
    let parse_err = |line: usize, msg: String| Error::Parse { line, msg };
    let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["n", v] => v
            .parse::<usize>()
            .map_err(|e| parse_err(line_no, format!("bad ground size `{v}`: {e}")))?,
        _ => return Err(parse_err(line_no, format!("expected `n <integer>`, got `{header}`"))),
    };
    let ground = GroundSet::new(n).map_err(|e| parse_err(line_no, e.to_string()))?;

    let mut members = Vec::new();
    for (line_no, line) in lines {
        let subset = if line == "-" {
            Subset::empty(ground)
        } else {
            let elements = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|e| parse_err(line_no, format!("bad element `{t}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Subset::new(ground, &elements).map_err(|e| parse_err(line_no, e.to_string()))?
        };
        members.push(subset);
    }
    Family::new(ground, members)
}

/// JSON shape of a family: `{"n": 4, "members": [[1, 2], [3, 4]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub n: usize,
    pub members: Vec<Vec<u32>>,
}

impl From<&Family> for FamilyJson {
    fn from(f: &Family) -> Self {
        FamilyJson {
            n: f.ground().n(),
            members: f.iter().map(Subset::to_vec).collect(),
        }
    }
}

impl TryFrom<FamilyJson> for Family {
    type Error = Error;
    fn try_from(j: FamilyJson) -> Result<Family> {
        let ground = GroundSet::new(j.n)?;
        let members = j
            .members
            .iter()
            .map(|m| Subset::new(ground, m))
            .collect::<Result<Vec<_>>>()?;
        Family::new(ground, members)
    }
}
