//! Tail classification from the Hilbert series of the Ext module, and the
//! singular-locus report built on the Fitting ideal.

use serde::Serialize;
use serde_json::json;
use tailsheaf_core::{monomial_basis, projective_zero_locus, Scalar, SparseRows, ZeroLocus};

use crate::cohomology::{ext_module, GradedCokernel};
use crate::error::{Result, SheafError};
use crate::presentation::{FittingIdeal, SheafPresentation};

/// Closed form `HS_E(z) = z^offset q(z) / (1-z)^dim`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesCertificate {
    pub offset: i64,
    pub numerator: Vec<i128>,
    pub dim: usize,
}

/// `h^{n-1}(F(t)) = HF_E(d)` with `d = -t-n-1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessPoint {
    pub t: i64,
    pub d: i64,
    pub h: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailClassification {
    pub is_tail: bool,
    pub m: u64,
    /// Last twist with `h^{n-1} != 0`.
    pub k: Option<i64>,
    pub normalized: bool,
    /// Twist that normalizes a tail.
    pub shift: Option<i64>,
    pub minimal: bool,
    pub level: bool,
    pub certificate: SeriesCertificate,
    /// For non-tails: the first two consecutive twists where `h^{n-1}` changes value.
    pub witness: Vec<WitnessPoint>,
}

fn witness(e: &GradedCokernel, n: usize) -> Vec<WitnessPoint> {
    let s = e.series();
    if s.is_zero() {
        return Vec::new();
    }
    let point = |d: i64| WitnessPoint { t: -d - n as i64 - 1, d, h: e.hf(d) };
    let start = s.offset;
    let end = start + s.numerator.len() as i64 + s.nvars as i64 + 2;
    (start..end).find(|&d| e.hf(d) != e.hf(d + 1)).map(|d| vec![point(d), point(d + 1)]).unwrap_or_default()
}

fn shape_checks(p: &SheafPresentation, shift: i64, m: u64) -> (bool, bool) {
    let normal = p.twist(shift);
    let n = p.n();
    let sources_trivial = normal.sources().iter().all(|&a| a == 0);
    let minimal = sources_trivial
        && normal.s() as u64 == m
        && normal.q() == n * m as usize
        && normal.targets().iter().all(|&b| b == 1);
    let level = sources_trivial && normal.targets().iter().all(|&b| b >= 1);
    (minimal, level)
}

pub fn classify_with(p: &SheafPresentation, e: &GradedCokernel) -> TailClassification {
    let n = p.n();
    let reduced = e.series().reduced();
    let certificate =
        SeriesCertificate { offset: reduced.offset, numerator: reduced.numerator.clone(), dim: reduced.dim };
    let tail = !e.series().is_zero() && reduced.dim == 1 && reduced.numerator.len() == 1 && reduced.numerator[0] > 0;
    if !tail {
        return TailClassification {
            is_tail: false,
            m: 0,
            k: None,
            normalized: false,
            shift: None,
            minimal: false,
            level: false,
            certificate,
            witness: witness(e, n),
        };
    }
    let m = reduced.numerator[0] as u64;
    let d0 = reduced.offset;
    let shift = -d0;
    let (minimal, level) = shape_checks(p, shift, m);
    TailClassification {
        is_tail: true,
        m,
        k: Some(-d0 - n as i64 - 1),
        normalized: d0 == 0,
        shift: Some(shift),
        minimal,
        level,
        certificate,
        witness: Vec::new(),
    }
}

pub fn classify_tail(p: &SheafPresentation) -> Result<TailClassification> {
    if p.n() < 2 {
        return Err(SheafError::DimensionTooSmall(p.n()));
    }
    Ok(classify_with(p, &ext_module(p)?))
}

fn require_tail(p: &SheafPresentation) -> Result<TailClassification> {
    let c = classify_tail(p)?;
    if !c.is_tail {
        let detail = match c.witness.as_slice() {
            [a, b] => format!("h^{{n-1}} is {} at t = {} and {} at t = {}", a.h, a.t, b.h, b.t),
            _ => "the Ext module has no constant tail".to_string(),
        };
        return Err(SheafError::NotTail(detail));
    }
    Ok(c)
}

/// The twist with `k = -n-1`, and the shift used.
pub fn normalize(p: &SheafPresentation) -> Result<(SheafPresentation, i64)> {
    let shift = require_tail(p)?.shift.expect("tails have a shift");
    Ok((p.twist(shift), shift))
}

/// Normalized shape `O^m -> O(1)^{nm}`.
pub fn is_minimal(p: &SheafPresentation) -> Result<bool> {
    Ok(require_tail(p)?.minimal)
}

/// Normalized sources all `0` and targets all `>= 1`.
pub fn is_level(p: &SheafPresentation) -> Result<bool> {
    Ok(require_tail(p)?.level)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankBound {
    pub rank: i64,
    pub m: u64,
    pub bound: i64,
    pub holds: bool,
    pub tight: bool,
}

/// `q - s >= (n-1) m`, with `m` from the tail classification (zero for non-tails).
pub fn rank_bound_check(p: &SheafPresentation) -> Result<RankBound> {
    let c = classify_tail(p)?;
    let m = if c.is_tail { c.m } else { 0 };
    let bound = (p.n() as i64 - 1) * m as i64;
    Ok(RankBound { rank: p.rank(), m, bound, holds: p.rank() >= bound, tight: p.rank() == bound })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularPoint {
    pub coords: Vec<Scalar>,
    /// Length of the Fitting scheme at the point.
    pub local_length: usize,
    pub matrix_rank: usize,
    pub rank_drop: usize,
}

#[derive(Clone, Debug)]
pub struct SingularLocusReport {
    pub fitting: FittingIdeal,
    pub locus: ZeroLocus,
    pub points: Vec<SingularPoint>,
    /// Eventual value of `HF_E` when `E` has dimension at most one.
    pub stable_length: Option<u64>,
    /// Length of the scheme cut out by `Ann(E)`, when zero-dimensional.
    pub sing_length: Option<u64>,
    pub codim_ok: bool,
    pub fitting_annihilates: bool,
    /// Injective, homological dimension one, and codimension of the singular locus at least three.
    pub reflexive_assumed: bool,
}

impl SingularLocusReport {
    pub fn is_zero_dimensional(&self) -> bool {
        matches!(self.locus, ZeroLocus::Empty | ZeroLocus::Finite { .. })
    }

    pub fn fitting_length(&self) -> Option<usize> {
        match &self.locus {
            ZeroLocus::Empty => Some(0),
            ZeroLocus::Finite { length, .. } => Some(*length),
            ZeroLocus::Positive { .. } => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let locus = match &self.locus {
            ZeroLocus::Empty => json!({ "kind": "empty" }),
            ZeroLocus::Finite { length, complete, .. } => {
                json!({ "kind": "finite", "length": length, "all_points_rational": complete })
            }
            ZeroLocus::Positive { dim } => json!({ "kind": "positive", "dim": dim }),
        };
        let gens: Vec<String> = self.fitting.generators().iter().map(ToString::to_string).collect();
        json!({
            "fitting_generators": gens,
            "locus": locus,
            "points": self.points,
            "stable_length": self.stable_length,
            "sing_length": self.sing_length,
            "codim_ok": self.codim_ok,
            "fitting_annihilates": self.fitting_annihilates,
            "reflexive": if self.reflexive_assumed { "assumed (necessary conditions passed)" } else { "not established" },
        })
    }
}

/// `dim (S / Ann E)_D`: rank of `f -> (f e_i)_i` from `S_D` into `(+) E_{D+a_i}`.
fn annihilator_quotient_dim(p: &SheafPresentation, e: &GradedCokernel, d: i64) -> u64 {
    let ring = p.ring();
    let Some(module) = e.module() else { return 0 };
    let mut columns: std::collections::HashMap<(usize, tailsheaf_core::Monomial), usize> = Default::default();
    let mut images = Vec::new();
    for mono in monomial_basis(&ring, d) {
        let f = tailsheaf_core::Poly::monomial(ring, mono, Scalar::one(ring.field()));
        let mut row = Vec::new();
        for i in 0..p.s() {
            let mut v = vec![ring.zero(); module.rank()];
            v[i] = f.clone();
            for (comp, poly) in module.normal_form(&v).iter().enumerate() {
                for (m, c) in poly.terms() {
                    let next = columns.len();
                    let col = *columns.entry((i * module.rank() + comp, *m)).or_insert(next);
                    row.push((col, c.clone()));
                }
            }
        }
        images.push(row);
    }
    let mut rows = SparseRows::new(ring.field(), columns.len());
    for r in images {
        rows.push_row(r);
    }
    rows.rank() as u64
}

fn sing_length(p: &SheafPresentation, e: &GradedCokernel) -> Option<u64> {
    let reduced = e.series().reduced();
    if e.series().is_zero() {
        return Some(0);
    }
    if reduced.dim > 1 {
        return None;
    }
    let min_a = p.sources().iter().copied().min().unwrap_or(0);
    let start = (reduced.offset - min_a).max(0) + reduced.numerator.len() as i64;
    let mut prev = annihilator_quotient_dim(p, e, start);
    for d in start + 1..start + 40 {
        let cur = annihilator_quotient_dim(p, e, d);
        if cur == prev {
            return Some(cur);
        }
        prev = cur;
    }
    None
}

pub fn singular_locus(p: &SheafPresentation) -> Result<SingularLocusReport> {
    let n = p.n();
    let fitting = p.fitting_ideal();
    let locus = projective_zero_locus(&fitting.groebner()?)?;
    let points = match &locus {
        ZeroLocus::Finite { points, .. } => points
            .iter()
            .map(|pt| {
                let rank = p.evaluate(&pt.coords).rank();
                SingularPoint {
                    coords: pt.coords.clone(),
                    local_length: pt.local_length,
                    matrix_rank: rank,
                    rank_drop: p.s() - rank,
                }
            })
            .collect(),
        _ => Vec::new(),
    };
    let e = ext_module(p)?;
    let reduced = e.series().reduced();
    let stable_length = if e.series().is_zero() {
        Some(0)
    } else if reduced.dim <= 1 {
        Some(if reduced.dim == 0 { 0 } else { reduced.numerator.iter().sum::<i128>() as u64 })
    } else {
        None
    };
    let codim_ok = match &locus {
        ZeroLocus::Empty => true,
        ZeroLocus::Finite { .. } => n >= 3,
        ZeroLocus::Positive { dim } => dim + 3 <= n,
    };
    let fitting_annihilates =
        fitting.generators().iter().all(|g| (0..p.s()).all(|i| e.reduce_component(g, i).iter().all(|c| c.is_zero())));
    let sing_length = sing_length(p, &e);
    let reflexive_assumed = codim_ok && p.generic_rank() == p.s();
    Ok(SingularLocusReport {
        fitting,
        locus,
        points,
        stable_length,
        sing_length,
        codim_ok,
        fitting_annihilates,
        reflexive_assumed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{fixture, s1};
    use tailsheaf_core::Field;

    fn pt(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::from_int(Field::Rationals, x)).collect()
    }

    #[test]
    fn s1_is_a_normalized_minimal_tail() {
        for n in 2..=4 {
            let c = classify_tail(&s1(n).unwrap()).unwrap();
            assert!(c.is_tail && c.normalized && c.minimal && c.level);
            assert_eq!((c.m, c.k), (1, Some(-(n as i64) - 1)));
        }
    }

    #[test]
    fn twisting_shifts_k() {
        let p = s1(3).unwrap().twist(5);
        let c = classify_tail(&p).unwrap();
        assert_eq!((c.m, c.k, c.normalized), (1, Some(-9), false));
        let (q, shift) = normalize(&p).unwrap();
        assert_eq!(shift, -5);
        assert_eq!(q, s1(3).unwrap());
        assert_eq!(normalize(&q).unwrap().1, 0);
        assert!(c.minimal);
    }

    #[test]
    fn counterexample_witness() {
        let c = classify_tail(&fixture("counterexample_3x9").unwrap()).unwrap();
        assert!(!c.is_tail);
        let w: Vec<(i64, u64)> = c.witness.iter().map(|w| (w.t, w.h)).collect();
        assert_eq!(w, vec![(-5, 3), (-6, 2)]);
        assert!(matches!(normalize(&fixture("counterexample_3x9").unwrap()), Err(SheafError::NotTail(_))));
    }

    #[test]
    fn example_c_is_a_tail_but_not_minimal() {
        let p = fixture("example_c").unwrap();
        let c = classify_tail(&p).unwrap();
        assert!(c.is_tail && !c.minimal && !c.level);
        assert_eq!(c.m, 2);
        let b = rank_bound_check(&p).unwrap();
        assert_eq!((b.rank, b.bound, b.holds, b.tight), (8, 4, true, false));
    }

    #[test]
    fn line_bundles_are_not_tails() {
        let p = fixture("line_bundles").unwrap();
        let c = classify_tail(&p).unwrap();
        assert!(!c.is_tail && c.m == 0 && c.witness.is_empty());
        let r = singular_locus(&p).unwrap();
        assert!(matches!(r.locus, ZeroLocus::Empty));
        assert_eq!(r.sing_length, Some(0));
    }

    #[test]
    fn s1_singular_locus() {
        let r = singular_locus(&s1(3).unwrap()).unwrap();
        assert_eq!(r.fitting.generators().len(), 3);
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.points[0].coords, pt(&[0, 0, 0, 1]));
        assert_eq!((r.points[0].local_length, r.points[0].rank_drop), (1, 1));
        assert_eq!((r.stable_length, r.sing_length), (Some(1), Some(1)));
        assert!(r.codim_ok && r.fitting_annihilates && r.reflexive_assumed);
    }

    #[test]
    fn two_point_fixture() {
        let r = singular_locus(&fixture("example_b_points").unwrap()).unwrap();
        let coords: Vec<_> = r.points.iter().map(|p| p.coords.clone()).collect();
        assert_eq!(coords, vec![pt(&[0, 0, 0, 1]), pt(&[1, 0, 0, 0])]);
        assert_eq!(r.fitting_length(), Some(2));
        assert_eq!(r.sing_length, Some(2));
    }

    #[test]
    fn plane_singularities_fail_codimension() {
        let r = singular_locus(&s1(2).unwrap()).unwrap();
        assert!(!r.codim_ok && !r.reflexive_assumed);
    }

    #[test]
    fn remark_iv_has_one_point_of_length_two() {
        let p = fixture("remark_iv").unwrap();
        let r = singular_locus(&p).unwrap();
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.points[0].rank_drop, 1);
        assert_eq!(r.fitting_length(), Some(2));
        assert_eq!(r.sing_length, Some(2));
        assert!(is_minimal(&p).unwrap() && is_level(&p).unwrap());
    }
}
