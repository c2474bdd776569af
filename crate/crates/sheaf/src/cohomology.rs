//! Cohomology of `F(t)` from the long exact sequence of the presentation.
//!
//! For `n >= 2` only three groups can be nonzero: `H^0` is the cokernel of the
//! section map, and `H^{n-1}`, `H^n` are the kernel and cokernel of the map on
//! top cohomology, computed on the dual side as the transpose map
//! `(+) S_{-b_j-t-n-1} -> (+) S_{-a_i-t-n-1}`.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::Serialize;
use tailsheaf_core::{
    basis_index, groebner_module, hilbert_binomial, monomial_basis, HilbertSeries, ModuleGB, Monomial, Poly, PolyRing,
    SparseRows,
};

use crate::error::{Result, SheafError};
use crate::presentation::SheafPresentation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Dense,
    Groebner,
    /// Runs both engines and fails on any disagreement.
    Both,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Dense => "dense",
            Engine::Groebner => "groebner",
            Engine::Both => "both",
        })
    }
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Engine, String> {
        match s {
            "dense" => Ok(Engine::Dense),
            "groebner" | "gb" => Ok(Engine::Groebner),
            "both" => Ok(Engine::Both),
            other => Err(format!("unknown engine `{other}` (expected dense, groebner or both)")),
        }
    }
}

fn require_dimension(p: &SheafPresentation) -> Result<()> {
    if p.n() < 2 {
        return Err(SheafError::DimensionTooSmall(p.n()));
    }
    Ok(())
}

/// Offsets of each summand's monomial block inside a direct sum of graded pieces.
struct SumBasis {
    offsets: Vec<usize>,
    indices: Vec<HashMap<Monomial, usize>>,
    bases: Vec<Vec<Monomial>>,
    dim: usize,
}

impl SumBasis {
    fn new(ring: &PolyRing, degrees: impl Iterator<Item = i64>) -> SumBasis {
        let mut offsets = Vec::new();
        let mut indices = Vec::new();
        let mut bases = Vec::new();
        let mut dim = 0;
        for d in degrees {
            let basis = monomial_basis(ring, d);
            offsets.push(dim);
            dim += basis.len();
            indices.push(basis_index(&basis));
            bases.push(basis);
        }
        SumBasis { offsets, indices, bases, dim }
    }
}

/// Rank of `e_k x^beta -> sum_l entry(k, l) x^beta e_l` between the given graded pieces.
fn map_rank<'a>(
    ring: &PolyRing,
    dom_degrees: impl Iterator<Item = i64>,
    cod_degrees: impl Iterator<Item = i64>,
    entry: impl Fn(usize, usize) -> Option<&'a Poly>,
) -> (usize, usize, usize) {
    let dom = SumBasis::new(ring, dom_degrees);
    let cod = SumBasis::new(ring, cod_degrees);
    let mut rows = SparseRows::new(ring.field(), cod.dim);
    for (k, basis) in dom.bases.iter().enumerate() {
        for beta in basis {
            let mut image: Vec<(usize, tailsheaf_core::Scalar)> = Vec::new();
            for l in 0..cod.bases.len() {
                let Some(f) = entry(k, l) else { continue };
                for (mu, c) in f.terms() {
                    image.push((cod.offsets[l] + cod.indices[l][&mu.mul(beta)], c.clone()));
                }
            }
            if !image.is_empty() {
                rows.push_row(image);
            }
        }
    }
    (dom.dim, cod.dim, rows.rank())
}

fn nonzero(f: &Poly) -> Option<&Poly> {
    (!f.is_zero()).then_some(f)
}

/// `(dim, rank)` data of the section map `(+) S_{a_i+t} -> (+) S_{b_j+t}`.
fn section_map(p: &SheafPresentation, t: i64) -> (usize, usize, usize) {
    let ring = p.ring();
    map_rank(&ring, p.sources().iter().map(|a| a + t), p.targets().iter().map(|b| b + t), |i, j| nonzero(p.entry(i, j)))
}

/// `(dim, rank)` data of the transpose map `(+) S_{-b_j-t-n-1} -> (+) S_{-a_i-t-n-1}`.
fn transpose_map(p: &SheafPresentation, t: i64) -> (usize, usize, usize) {
    let ring = p.ring();
    let shift = -t - p.n() as i64 - 1;
    map_rank(&ring, p.targets().iter().map(|b| shift - b), p.sources().iter().map(|a| shift - a), |j, i| {
        nonzero(p.entry(i, j))
    })
}

/// All of `h^0(F(t)), ..., h^n(F(t))` from degreewise linear algebra.
pub fn dense_row(p: &SheafPresentation, t: i64) -> Result<Vec<u64>> {
    require_dimension(p)?;
    let n = p.n();
    let mut h = vec![0u64; n + 1];
    let (_, cod, rank) = section_map(p, t);
    h[0] = (cod - rank) as u64;
    let (dom, cod, rank) = transpose_map(p, t);
    h[n - 1] = (cod - rank) as u64;
    h[n] = (dom - rank) as u64;
    Ok(h)
}

/// `h^i(F(t))` by degreewise linear algebra.
pub fn h_dense(p: &SheafPresentation, i: usize, t: i64) -> Result<u64> {
    require_dimension(p)?;
    let n = p.n();
    match i {
        0 => {
            let (_, cod, rank) = section_map(p, t);
            Ok((cod - rank) as u64)
        }
        _ if i == n - 1 => {
            let (_, cod, rank) = transpose_map(p, t);
            Ok((cod - rank) as u64)
        }
        _ if i == n => {
            let (dom, _, rank) = transpose_map(p, t);
            Ok((dom - rank) as u64)
        }
        // H^i of every line bundle vanishes for 0 < i < n, so both neighbours
        // of H^i(F(t)) in the long exact sequence are zero
        _ if i < n => Ok(0),
        _ => Err(SheafError::OutOfRange(format!("cohomological degree {i} on P^{n}"))),
    }
}

/// `h^n(F(t))` as the cokernel of `H^n` of the presentation, computed on
/// inverse monomials: `x^mu` sends `x^{-gamma-1}` to `x^{-(gamma-mu)-1}` when `mu <= gamma`.
pub fn hn_direct(p: &SheafPresentation, t: i64) -> Result<u64> {
    require_dimension(p)?;
    let ring = p.ring();
    let shift = -t - p.n() as i64 - 1;
    let dom = SumBasis::new(&ring, p.sources().iter().map(|a| shift - a));
    let cod = SumBasis::new(&ring, p.targets().iter().map(|b| shift - b));
    let mut rows = SparseRows::new(ring.field(), cod.dim);
    for (i, basis) in dom.bases.iter().enumerate() {
        for gamma in basis {
            let mut image = Vec::new();
            for j in 0..p.q() {
                for (mu, c) in p.entry(i, j).terms() {
                    if mu.divides(gamma) {
                        image.push((cod.offsets[j] + cod.indices[j][&mu.quotient_of(gamma)], c.clone()));
                    }
                }
            }
            if !image.is_empty() {
                rows.push_row(image);
            }
        }
    }
    Ok((cod.dim - rows.rank()) as u64)
}

/// The graded module `E = coker((+) S(-b_j) -> (+) S(-a_i))` given by the
/// transposed matrix, with `HF_E(d) = h^{n-1}(F(-d-n-1))`.
#[derive(Clone, Debug)]
pub struct GradedCokernel {
    module: Option<ModuleGB>,
    series: HilbertSeries,
}

impl GradedCokernel {
    /// `None` when there are no source summands and `E = 0`.
    pub fn module(&self) -> Option<&ModuleGB> {
        self.module.as_ref()
    }

    pub fn series(&self) -> &HilbertSeries {
        &self.series
    }

    pub fn hf(&self, d: i64) -> u64 {
        self.series.hf(d) as u64
    }

    /// Normal form of `f e_i`; zero exactly when `f e_i` vanishes in `E`.
    pub fn reduce_component(&self, f: &Poly, i: usize) -> Vec<Poly> {
        match &self.module {
            None => Vec::new(),
            Some(m) => {
                let mut v = vec![Poly::zero(m.ring()); m.rank()];
                v[i] = f.clone();
                m.normal_form(&v)
            }
        }
    }
}

pub fn ext_module(p: &SheafPresentation) -> Result<GradedCokernel> {
    let ring = p.ring();
    if p.s() == 0 {
        return Ok(GradedCokernel { module: None, series: HilbertSeries::new(ring.nvars(), 0, Vec::new()) });
    }
    let columns: Vec<Vec<Poly>> = (0..p.q()).map(|j| (0..p.s()).map(|i| p.entry(i, j).clone()).collect()).collect();
    let module = groebner_module(ring, p.sources(), &columns)?;
    let series = module.hilbert_series();
    Ok(GradedCokernel { module: Some(module), series })
}

/// The module of twisted global sections `coker((+) S(a_i) -> (+) S(b_j))`,
/// whose degree-`t` piece is `H^0(F(t))` when `n >= 2`.
pub fn section_module(p: &SheafPresentation) -> Result<ModuleGB> {
    let degrees: Vec<i64> = p.targets().iter().map(|b| -b).collect();
    Ok(groebner_module(p.ring(), &degrees, p.matrix())?)
}

fn dual_dim(ring: &PolyRing, twists: &[i64], shift: i64) -> i128 {
    twists.iter().map(|a| ring.graded_dim(shift - a) as i128).sum()
}

fn groebner_rows(p: &SheafPresentation, ts: &[i64]) -> Result<(Vec<Vec<u64>>, GradedCokernel)> {
    require_dimension(p)?;
    let n = p.n();
    let ring = p.ring();
    let e = ext_module(p)?;
    let q = section_module(p)?.hilbert_series();
    let rows = ts
        .iter()
        .map(|&t| {
            let shift = -t - n as i64 - 1;
            let top = e.series.hf(shift);
            let mut h = vec![0u64; n + 1];
            h[0] = q.hf(t) as u64;
            h[n - 1] = top as u64;
            h[n] = (top - dual_dim(&ring, p.sources(), shift) + dual_dim(&ring, p.targets(), shift)) as u64;
            h
        })
        .collect();
    Ok((rows, e))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub t: i64,
    pub h: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct CohomologyTable {
    pub n: usize,
    pub t_min: i64,
    pub t_max: i64,
    pub engine: Engine,
    pub rows: Vec<TableRow>,
    /// Series of `E`, answering `h^{n-1}` in every degree; filled by the Groebner engine.
    pub series: Option<HilbertSeries>,
}

/// `[-(n+1) - max b - 4, max b + 2]`.
pub fn default_window(p: &SheafPresentation) -> (i64, i64) {
    let n = p.n() as i64;
    let b = p.max_target();
    (-(n + 1) - b - 4, b + 2)
}

pub fn cohomology_table(p: &SheafPresentation, t_min: i64, t_max: i64, engine: Engine) -> Result<CohomologyTable> {
    require_dimension(p)?;
    if t_min > t_max {
        return Err(SheafError::OutOfRange(format!("empty window [{t_min}, {t_max}]")));
    }
    let ts: Vec<i64> = (t_min..=t_max).collect();
    let dense = || -> Result<Vec<Vec<u64>>> { ts.par_iter().map(|&t| dense_row(p, t)).collect() };
    let (values, series) = match engine {
        Engine::Dense => (dense()?, None),
        Engine::Groebner => {
            let (rows, e) = groebner_rows(p, &ts)?;
            (rows, Some(e.series))
        }
        Engine::Both => {
            let (gb, e) = groebner_rows(p, &ts)?;
            let d = dense()?;
            if let Some(k) = (0..ts.len()).find(|&k| d[k] != gb[k]) {
                return Err(SheafError::EngineMismatch { t: ts[k], dense: d[k].clone(), groebner: gb[k].clone() });
            }
            (d, Some(e.series))
        }
    };
    let rows = ts.iter().zip(values).map(|(&t, h)| TableRow { t, h }).collect();
    Ok(CohomologyTable { n: p.n(), t_min, t_max, engine, rows, series })
}

impl CohomologyTable {
    pub fn row(&self, t: i64) -> Option<&[u64]> {
        self.rows.iter().find(|r| r.t == t).map(|r| r.h.as_slice())
    }

    pub fn h(&self, i: usize, t: i64) -> Option<u64> {
        self.row(t).and_then(|r| r.get(i).copied())
    }

    /// `h^{n-1}(F(t))` for any `t`: from the series when present, else from the window.
    pub fn h_top_minus_one(&self, t: i64) -> Option<u64> {
        match &self.series {
            Some(s) => Some(s.hf(-t - self.n as i64 - 1) as u64),
            None => self.h(self.n - 1, t),
        }
    }

    pub fn to_text(&self) -> String {
        let mut header = vec!["t".to_string()];
        header.extend((0..=self.n).map(|i| format!("h{i}")));
        let mut cells: Vec<Vec<String>> = vec![header];
        for r in &self.rows {
            let mut line = vec![r.t.to_string()];
            line.extend(r.h.iter().map(u64::to_string));
            cells.push(line);
        }
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        let mut out = format!("engine: {}\n", self.engine);
        for line in cells {
            let padded: Vec<String> = line.iter().map(|c| format!("{c:>width$}")).collect();
            out.push_str(padded.join("  ").trim_end());
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for i in 0..=self.n {
            write!(out, ",h{i}").unwrap();
        }
        out.push('\n');
        for r in &self.rows {
            write!(out, "{}", r.t).unwrap();
            for v in &r.h {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "t_min": self.t_min,
            "t_max": self.t_max,
            "engine": self.engine,
            "rows": self.rows,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerCheck {
    pub t: i64,
    /// `sum_i (-1)^i h^i(F(t))` from the dense engine.
    pub alternating_sum: i128,
    /// `sum_j C(n+b_j+t, n) - sum_i C(n+a_i+t, n)`.
    pub expected: i128,
    pub pass: bool,
}

pub fn euler_characteristic(p: &SheafPresentation, t: i64) -> i128 {
    let n = p.n() as u32;
    p.targets().iter().map(|b| hilbert_binomial(n, b + t)).sum::<i128>()
        - p.sources().iter().map(|a| hilbert_binomial(n, a + t)).sum::<i128>()
}

pub fn euler_check(p: &SheafPresentation, t: i64) -> Result<EulerCheck> {
    let h = dense_row(p, t)?;
    let alternating_sum = h.iter().enumerate().map(|(i, &v)| if i % 2 == 0 { v as i128 } else { -(v as i128) }).sum();
    let expected = euler_characteristic(p, t);
    Ok(EulerCheck { t, alternating_sum, expected, pass: alternating_sum == expected })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> SheafPresentation {
        SheafPresentation::parse(s).unwrap()
    }

    fn s1() -> SheafPresentation {
        parse("ring n=3\nsource 0\ntarget 1 1 1\nrow x0, x1, x2\n")
    }

    fn tangent() -> SheafPresentation {
        parse("ring n=3\nsource 0\ntarget 1 1 1 1\nrow x0, x1, x2, x3\n")
    }

    #[test]
    fn s1_top_cohomology() {
        let p = s1();
        assert_eq!(h_dense(&p, 2, -4).unwrap(), 1);
        assert_eq!(h_dense(&p, 2, -3).unwrap(), 0);
        assert_eq!(h_dense(&p, 2, -9).unwrap(), 1);
        assert_eq!(h_dense(&p, 1, -4).unwrap(), 0);
        assert!(matches!(h_dense(&p, 4, 0), Err(SheafError::OutOfRange(_))));
    }

    #[test]
    fn tangent_bundle_is_concentrated() {
        let p = tangent();
        for t in -10..=3 {
            assert_eq!(h_dense(&p, 2, t).unwrap(), (t == -4) as u64, "t = {t}");
        }
        let e = ext_module(&p).unwrap();
        assert_eq!((0..5).map(|d| e.hf(d)).collect::<Vec<_>>(), vec![1, 0, 0, 0, 0]);
    }

    #[test]
    fn line_bundle_table() {
        let p = parse("ring n=2\nsource\ntarget 1\n");
        let t = cohomology_table(&p, -6, 1, Engine::Both).unwrap();
        for r in &t.rows {
            let d = r.t + 1;
            let h0 = if d >= 0 { ((d + 1) * (d + 2) / 2) as u64 } else { 0 };
            let h2 = if d <= -3 { ((-d - 2) * (-d - 1) / 2) as u64 } else { 0 };
            assert_eq!(r.h, vec![h0, 0, h2]);
        }
    }

    #[test]
    fn engines_agree_and_hn_matches_direct_count() {
        let p = parse("ring n=3\nsource 0 0\ntarget 1 1 1 1 1 1\nrow x0, x1, x2, 0, 0, 0\nrow x3, 0, 0, x0, x1, x2\n");
        let (lo, hi) = default_window(&p);
        let t = cohomology_table(&p, lo, hi, Engine::Both).unwrap();
        for r in &t.rows {
            assert_eq!(hn_direct(&p, r.t).unwrap(), r.h[3]);
            assert!(euler_check(&p, r.t).unwrap().pass);
        }
        assert_eq!(t.h_top_minus_one(-40), Some(2));
    }

    #[test]
    fn s1_ext_module_is_constant_one() {
        let e = ext_module(&s1()).unwrap();
        assert!((0..8).all(|d| e.hf(d) == 1));
        assert_eq!(e.hf(-1), 0);
    }

    #[test]
    fn table_formats() {
        let t = cohomology_table(&s1(), -5, -4, Engine::Dense).unwrap();
        assert_eq!(t.to_csv(), "t,h0,h1,h2,h3\n-5,0,0,1,0\n-4,0,0,1,0\n");
        assert!(t.to_text().starts_with("engine: dense\n"));
        assert_eq!(t.to_json()["rows"][1]["h"][2], 1);
    }

    #[test]
    fn projective_line_is_rejected() {
        let p = parse("ring n=1\nsource 0\ntarget 1 1\nrow x0, 0\n");
        assert!(p.validate().is_ok());
        assert_eq!(h_dense(&p, 0, 0).unwrap_err(), SheafError::DimensionTooSmall(1));
    }
}
