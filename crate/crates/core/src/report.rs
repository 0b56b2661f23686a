//! Check records and the JSON/CSV shapes the command line emits.

use serde::{Serialize, Serializer};

use crate::arith::rational_to_string;
use crate::Rational;

/// A reported quantity: exact rationals serialize as `"num/den"` strings,
/// reals as JSON numbers (non-finite values as strings).
#[derive(Clone, Debug, PartialEq)]
pub enum Num {
    Exact(Rational),
    Real(f64),
}

impl Num {
    pub fn int(v: impl Into<num_bigint::BigInt>) -> Self {
        Num::Exact(Rational::from_integer(v.into()))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Num::Exact(r) => crate::arith::rational_to_f64(r),
            Num::Real(x) => *x,
        }
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num::Real(x)
    }
}

impl From<Rational> for Num {
    fn from(r: Rational) -> Self {
        Num::Exact(r)
    }
}

impl Serialize for Num {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        match self {
            Num::Exact(r) => s.serialize_str(&rational_to_string(r)),
            Num::Real(x) if x.is_finite() => s.serialize_f64(*x),
            Num::Real(x) => s.serialize_str(&x.to_string()),
        }
    }
}

/// How `lhs` is compared with `rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

/// One numeric claim: `lhs relation rhs`, the inequality forms allowing
/// `margin` of slack.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// Which statement of the theory the check instantiates.
    pub anchor: String,
    pub lhs: Num,
    pub relation: Relation,
    pub rhs: Num,
    pub margin: Num,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    /// Evaluates the relation; exact operands with zero margin compare
    /// exactly.
    pub fn new(
        name: impl Into<String>,
        anchor: impl Into<String>,
        lhs: Num,
        relation: Relation,
        rhs: Num,
        margin: Num,
    ) -> Self {
        let pass = match (&lhs, &rhs, &margin) {
            (Num::Exact(l), Num::Exact(r), Num::Exact(m)) => match relation {
                Relation::Eq => l == r,
                Relation::Le => l <= &(r + m),
                Relation::Lt => l < &(r + m),
                Relation::Ge => &(l + m) >= r,
                Relation::Gt => &(l + m) > r,
            },
            _ => {
                let (l, r, m) = (lhs.to_f64(), rhs.to_f64(), margin.to_f64());
                match relation {
                    Relation::Eq => (l - r).abs() <= m,
                    Relation::Le => l <= r + m,
                    Relation::Lt => l < r + m,
                    Relation::Ge => l + m >= r,
                    Relation::Gt => l + m > r,
                }
            }
        };
        Self { name: name.into(), anchor: anchor.into(), lhs, relation, rhs, margin, pass, note: None }
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, anchor: impl Into<String>, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            lhs: Num::Real(f64::NAN),
            relation: Relation::Eq,
            rhs: Num::Real(f64::NAN),
            margin: Num::Real(0.0),
            pass: false,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A titled group of checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Section {
    pub id: usize,
    pub title: String,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl Section {
    pub fn new(id: usize, title: impl Into<String>, checks: Vec<CheckRecord>) -> Self {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        Self { id, title: title.into(), checks, pass }
    }
}

/// What a command emits: its configuration, its checks, and optional
/// command-specific detail.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report<C, D> {
    pub command: String,
    pub config: C,
    pub sections: Vec<Section>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<D>,
    pub pass: bool,
}

impl<C, D> Report<C, D> {
    pub fn new(command: impl Into<String>, config: C, sections: Vec<Section>, details: Option<D>) -> Self {
        let pass = sections.iter().all(|s| s.pass);
        Self { command: command.into(), config, sections, details, pass }
    }
}

/// Columns of equal length as CSV text; floats in shortest round-trip form.
pub fn csv_columns(columns: &[(&str, &[f64])]) -> String {
    let mut out = columns.iter().map(|(h, _)| *h).collect::<Vec<_>>().join(",");
    out.push('\n');
    let rows = columns.iter().map(|(_, c)| c.len()).max().unwrap_or(0);
    for r in 0..rows {
        let line: Vec<String> =
            columns.iter().map(|(_, c)| c.get(r).map(|x| x.to_string()).unwrap_or_default()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational;

    #[test]
    fn exact_and_real_comparisons() {
        let c = CheckRecord::new(
            "x",
            "a",
            Num::Exact(rational(1, 4)),
            Relation::Le,
            Num::Exact(rational(1, 4)),
            Num::int(0),
        );
        assert!(c.pass);
        let c = CheckRecord::new(
            "x",
            "a",
            Num::Exact(rational(1, 3)),
            Relation::Le,
            Num::Exact(rational(1, 4)),
            Num::int(0),
        );
        assert!(!c.pass);
        let c = CheckRecord::new("x", "a", 3.0.into(), Relation::Gt, 0.0625.into(), 0.0.into());
        assert!(c.pass);
        let c = CheckRecord::new("x", "a", 1.0.into(), Relation::Eq, 1.0005.into(), 1e-3.into());
        assert!(c.pass);
    }

    #[test]
    fn serialization() {
        let c = CheckRecord::new(
            "n",
            "a",
            Num::Exact(rational(6, 4)),
            Relation::Eq,
            Num::Exact(rational(3, 2)),
            Num::int(0),
        );
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(
            json,
            r#"{"name":"n","anchor":"a","lhs":"3/2","relation":"==","rhs":"3/2","margin":"0/1","pass":true}"#
        );
        assert_eq!(csv_columns(&[("t", &[0.0, 0.5]), ("y", &[1.0, 2.5])]), "t,y\n0,1\n0.5,2.5\n");
    }
}
