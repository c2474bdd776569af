//! Line-oriented text format and JSON form of presentations.
//!
//! ```text
//! # comments run to the end of the line
//! ring n=3 field=QQ
//! source 0 0
//! target 1 1 1 1 1 1
//! row x0, x1, x2, 0, 0, 0
//! row x3, 0, 0, x0, x1, x2
//! ```

use serde::{Deserialize, Serialize};
use tailsheaf_core::{AlgebraError, Field, Monomial, Poly, PolyRing, Scalar};

use super::SheafPresentation;
use crate::error::{Result, SheafError};

pub const SCHEMA_VERSION: u32 = 1;

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> SheafError {
    SheafError::Syntax { line, col, msg: msg.into() }
}

fn parse_twists(rest: &str, line: usize, offset: usize) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    let mut pos = 0;
    for tok in rest.split_whitespace() {
        let at = rest[pos..].find(tok).unwrap() + pos;
        pos = at + tok.len();
        out.push(
            tok.parse().map_err(|_| syntax(line, offset + at + 1, format!("expected an integer, found `{tok}`")))?,
        );
    }
    Ok(out)
}

impl SheafPresentation {
    pub fn parse(text: &str) -> Result<SheafPresentation> {
        let mut ring: Option<PolyRing> = None;
        let mut sources: Option<Vec<i64>> = None;
        let mut targets: Option<Vec<i64>> = None;
        let mut rows: Vec<Vec<Poly>> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap();
            let trimmed = content.trim_start();
            if trimmed.trim().is_empty() {
                continue;
            }
            let indent = content.len() - trimmed.len();
            let (keyword, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
            let rest_offset = indent + keyword.len() + 1;
            match keyword {
                "ring" => {
                    if ring.is_some() {
                        return Err(syntax(line, indent + 1, "duplicate ring line"));
                    }
                    let mut n = None;
                    let mut field = Field::Rationals;
                    for tok in rest.split_whitespace() {
                        let col = rest_offset + rest.find(tok).unwrap() + 1;
                        match tok.split_once('=') {
                            Some(("n", v)) => {
                                n = Some(
                                    v.parse::<usize>()
                                        .map_err(|_| syntax(line, col, format!("bad dimension `{v}`")))?,
                                )
                            }
                            Some(("field", v)) => {
                                field = v.parse().map_err(|e: AlgebraError| syntax(line, col, e.to_string()))?
                            }
                            _ => return Err(syntax(line, col, format!("unknown ring attribute `{tok}`"))),
                        }
                    }
                    let n = n.ok_or_else(|| syntax(line, indent + 1, "ring line needs n=<dimension>"))?;
                    if n == 0 {
                        return Err(syntax(line, indent + 1, "projective dimension must be at least 1"));
                    }
                    ring = Some(PolyRing::new(n + 1, field).map_err(|e| syntax(line, indent + 1, e.to_string()))?);
                }
                "source" | "target" => {
                    let slot = if keyword == "source" { &mut sources } else { &mut targets };
                    if slot.is_some() {
                        return Err(syntax(line, indent + 1, format!("duplicate {keyword} line")));
                    }
                    *slot = Some(parse_twists(rest, line, rest_offset)?);
                }
                "row" => {
                    let r = ring.ok_or_else(|| syntax(line, indent + 1, "row before the ring line"))?;
                    let mut entries = Vec::new();
                    let mut start = rest_offset;
                    for piece in rest.split(',') {
                        let lead = piece.len() - piece.trim_start().len();
                        let src = piece.trim();
                        if src.is_empty() {
                            return Err(syntax(line, start + lead + 1, "empty matrix entry"));
                        }
                        let f = r.parse(src).map_err(|e| match e {
                            AlgebraError::Parse { pos, msg } => syntax(line, start + lead + pos + 1, msg),
                            other => syntax(line, start + lead + 1, other.to_string()),
                        })?;
                        entries.push(f);
                        start += piece.len() + 1;
                    }
                    rows.push(entries);
                }
                other => return Err(syntax(line, indent + 1, format!("unknown statement `{other}`"))),
            }
        }
        let last = text.lines().count().max(1);
        let ring = ring.ok_or_else(|| syntax(last, 1, "missing ring line"))?;
        let sources = sources.unwrap_or_default();
        let targets = targets.ok_or_else(|| syntax(last, 1, "missing target line"))?;
        SheafPresentation::new(ring, sources, targets, rows)
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
        let mut out = format!("ring n={} field={}\n", self.n(), self.field());
        out.push_str(format!("source {}", join(&self.sources)).trim_end());
        out.push('\n');
        out.push_str(format!("target {}", join(&self.targets)).trim_end());
        out.push('\n');
        for row in &self.matrix {
            let entries: Vec<String> = row.iter().map(Poly::to_string).collect();
            out.push_str(&format!("row {}\n", entries.join(", ")));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = JsonPresentation {
            schema: SCHEMA_VERSION,
            n: self.n(),
            field: self.field().to_string(),
            sources: self.sources.clone(),
            targets: self.targets.clone(),
            rows: self
                .matrix
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|f| {
                            f.terms()
                                .iter()
                                .map(|(m, c)| JsonTerm { coeff: c.to_string(), exps: m.exponents() })
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("presentation serializes")
    }

    pub fn from_json(text: &str) -> Result<SheafPresentation> {
        let doc: JsonPresentation =
            serde_json::from_str(text).map_err(|e| syntax(e.line(), e.column(), e.to_string()))?;
        if doc.schema != SCHEMA_VERSION {
            return Err(syntax(1, 1, format!("unsupported schema {}", doc.schema)));
        }
        let field: Field = doc.field.parse().map_err(|e: AlgebraError| syntax(1, 1, e.to_string()))?;
        let ring = PolyRing::new(doc.n + 1, field).map_err(|e| syntax(1, 1, e.to_string()))?;
        let mut matrix = Vec::with_capacity(doc.rows.len());
        for row in doc.rows {
            let mut out = Vec::with_capacity(row.len());
            for entry in row {
                let mut terms = Vec::with_capacity(entry.len());
                for t in entry {
                    if t.exps.len() != ring.nvars() {
                        return Err(syntax(1, 1, format!("exponent vector of length {}", t.exps.len())));
                    }
                    let c = Scalar::parse(field, &t.coeff).map_err(|e| syntax(1, 1, e.to_string()))?;
                    terms.push((Monomial::from_exponents(&t.exps), c));
                }
                out.push(Poly::from_terms(ring, terms));
            }
            matrix.push(out);
        }
        SheafPresentation::new(ring, doc.sources, doc.targets, matrix)
    }
}

#[derive(Serialize, Deserialize)]
struct JsonPresentation {
    schema: u32,
    n: usize,
    field: String,
    sources: Vec<i64>,
    targets: Vec<i64>,
    rows: Vec<Vec<Vec<JsonTerm>>>,
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    coeff: String,
    exps: Vec<u32>,
}

#[cfg(test)]
mod tests {
    use super::*;

    const REMARK: &str = "\
# two S_1 blocks glued at one point
ring n=3 field=QQ
source 0 0
target 1 1 1 1 1 1
row x0, x1, x2, 0, 0, 0
row x3, 0, 0, x0, x1, x2
";

    #[test]
    fn text_round_trip() {
        let p = SheafPresentation::parse(REMARK).unwrap();
        assert_eq!(p.s(), 2);
        assert_eq!(p.entry(1, 0).to_string(), "x3");
        let again = SheafPresentation::parse(&p.to_text()).unwrap();
        assert_eq!(again, p);
        assert_eq!(again.to_text(), p.to_text());
    }

    #[test]
    fn json_round_trip() {
        let p = SheafPresentation::parse(
            "ring n=2 field=fp:101\nsource -1\ntarget 1 1 0\nrow 3*x0^2 - x1*x2, 1/2*x2^2, x0\n",
        )
        .unwrap();
        let json = p.to_json().to_string();
        assert_eq!(SheafPresentation::from_json(&json).unwrap(), p);
    }

    #[test]
    fn line_bundles_have_no_rows() {
        let p = SheafPresentation::parse("ring n=3\nsource\ntarget -1 2\n").unwrap();
        assert_eq!((p.s(), p.q()), (0, 2));
        assert_eq!(SheafPresentation::parse(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = SheafPresentation::parse("ring n=3\nsource 0\ntarget 1 1 1\nrow x0, x1 +, x2\n").unwrap_err();
        match err {
            SheafError::Syntax { line, col, .. } => assert_eq!((line, col), (4, 13)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(SheafPresentation::parse(""), Err(SheafError::Syntax { .. })));
        assert!(matches!(
            SheafPresentation::parse("ring n=3\nsource 0\ntarget 1 x\n"),
            Err(SheafError::Syntax { line: 3, col: 10, .. })
        ));
        assert!(matches!(SheafPresentation::parse("row x0\n"), Err(SheafError::Syntax { line: 1, .. })));
    }
}
