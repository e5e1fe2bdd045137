//! Report envelope and text rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sympsum_core::enumerate::{RationalRow, RelativeMinimality, RuledRow, SphereClassReport};
use sympsum_core::fibersum::MinimalityVerdict;
use sympsum_core::gw::{ContactVector, VanishingVerdict};

pub const TOOL: &str = "sympsum";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exceptional and sphere classes are solutions of lattice equations; no
/// claim about embedded representatives is made.
pub const CANDIDATE_CERTAINTY: &str =
    "candidate-level: classes satisfy the lattice equations only, geometric representability is assumed";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    /// Coefficient bound used by any search, when one ran.
    pub bound: Option<i64>,
    pub command: String,
    pub body: Body,
}

impl Report {
    pub fn new(command: &str, bound: Option<i64>, body: Body) -> Self {
        Self { tool: TOOL.into(), version: VERSION.into(), bound, command: command.into(), body }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "kebab-case")]
pub enum Body {
    Validate(ValidateBody),
    Enumerate(EnumerateBody),
    RationalTable(RationalTableBody),
    RuledTable(RuledTableBody),
    Minimality(MinimalityBody),
    Gwdim(GwdimBody),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidateBody {
    pub name: String,
    pub valid: bool,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerateBody {
    pub model: String,
    pub square: i64,
    pub geometric: bool,
    pub certainty: String,
    pub rows: Vec<SphereClassReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalTableRow {
    pub row: RationalRow,
    pub relative: RelativeMinimality,
    /// `false` when an exceptional candidate disjoint from the sphere exists.
    pub relatively_minimal: Option<bool>,
    pub witness_label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalTableBody {
    pub certainty: String,
    pub rows: Vec<RationalTableRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuledTableBody {
    pub genus: u32,
    pub rows: Vec<RuledRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityBody {
    pub x: String,
    pub cap: String,
    pub summary: String,
    pub rule: String,
    pub certainty: String,
    pub verdict: MinimalityVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GwdimBody {
    pub model: String,
    pub class: Vec<i64>,
    pub label: String,
    pub genus: u32,
    pub contacts: ContactVector,
    pub insertions: u32,
    /// Real (doubled) degree the insertions must carry.
    pub degree: i64,
    pub vanishing: VanishingVerdict,
    pub tag: Option<String>,
}

fn header(r: &Report, out: &mut String) {
    let bound = r.bound.map_or_else(|| "-".to_string(), |b| b.to_string());
    let _ = writeln!(out, "{} {} {} (bound {bound})", r.tool, r.version, r.command);
}

pub fn render_text(r: &Report) -> String {
    let mut out = String::new();
    header(r, &mut out);
    match &r.body {
        Body::Validate(b) => {
            if b.valid {
                let _ = writeln!(out, "{}: valid", b.name);
            } else {
                let _ = writeln!(out, "{}: invalid", b.name);
                for v in &b.violations {
                    let _ = writeln!(out, "  {v}");
                }
            }
        }
        Body::Enumerate(b) => {
            let _ = writeln!(out, "{}: {} classes with square {}", b.model, b.rows.len(), b.square);
            for row in &b.rows {
                let _ = writeln!(out, "  {}  K.A = {}  g = {}", row.label, row.canonical_pairing, row.genus);
            }
            let _ = writeln!(out, "{}", b.certainty);
        }
        Body::RationalTable(b) => {
            let _ = writeln!(out, "a  delta  k  A  relatively minimal");
            for t in &b.rows {
                let rel = match (&t.relatively_minimal, &t.witness_label) {
                    (Some(false), Some(w)) => format!("False (E = {w})"),
                    (Some(true), _) => "True".to_string(),
                    _ => "unknown".to_string(),
                };
                let _ = writeln!(
                    out,
                    "{}  {}  {}  {}  {rel}",
                    t.row.degree, t.row.double_points, t.row.blowups, t.row.label
                );
            }
            let _ = writeln!(out, "{}", b.certainty);
        }
        Body::RuledTable(b) => {
            let _ = writeln!(out, "genus {}: (a1, a2, a3, a4)  a  V  classes", b.genus);
            for row in &b.rows {
                let s = row.signs.map(|x| x.to_string()).join(", ");
                let _ = writeln!(out, "  ({s})  {}  {}  {}", row.fiber_coefficient, row.label, row.family_size);
            }
        }
        Body::Minimality(b) => {
            let _ = writeln!(out, "{} with cap {}", b.x, b.cap);
            let _ = writeln!(out, "{}", b.summary);
            let _ = writeln!(out, "rule: {}", b.rule);
            for line in &b.verdict.trace {
                let _ = writeln!(out, "  {line}");
            }
            let _ = writeln!(out, "{}", b.certainty);
        }
        Body::Gwdim(b) => {
            let s = b.contacts.orders().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            let _ = writeln!(out, "{}: A = {}, g = {}, s = ({s})", b.model, b.label, b.genus);
            let _ = writeln!(out, "degree {}", b.degree);
            match &b.tag {
                Some(t) => {
                    let _ = writeln!(out, "Vanishes({t})");
                }
                None => {
                    let _ = writeln!(out, "NotExcluded");
                }
            }
        }
    }
    out
}
