//! Structure of tails: peeling `S_1` quotients off a minimal tail, chain form,
//! the splitting by singular point, tangent powers, level splittings and the
//! extension blocks of a chain.

use serde::Serialize;
use serde_json::json;
use tailsheaf_core::{
    basis_index, monomial_basis, rational_roots, DenseMatrix, Monomial, Poly, PolyRing, Scalar, UniPoly,
};

use crate::classify::{classify_tail, TailClassification};
use crate::cohomology::{cohomology_table, default_window, ext_module, Engine};
use crate::construct::{linear_coefficients, normalize_point};
use crate::error::{Result, SheafError};
use crate::presentation::{SheafPresentation, TransformationRecord};

fn require_minimal(p: &SheafPresentation) -> Result<TailClassification> {
    let c = classify_tail(p)?;
    if !c.is_tail {
        return Err(SheafError::NotTail(match c.witness.as_slice() {
            [a, b] => format!("h^{{n-1}} is {} at t = {} and {} at t = {}", a.h, a.t, b.h, b.t),
            _ => "the Ext module has no constant tail".into(),
        }));
    }
    if !c.minimal {
        return Err(SheafError::NotMinimal);
    }
    Ok(c)
}

/// Roots of `det(t I - r)` in the base field: interpolation through `dim + 1`
/// values when the field is large enough, exhaustive search otherwise.
fn eigenvalues(r: &DenseMatrix) -> Vec<Scalar> {
    let field = r.field();
    let dim = r.rows();
    let det_at = |t: &Scalar| DenseMatrix::identity(field, dim).scale(t).sub(r).determinant();
    let p = field.characteristic();
    if p != 0 && p <= dim as u64 {
        return (0..p as i64).map(|v| Scalar::from_int(field, v)).filter(|t| det_at(t).is_zero()).collect();
    }
    let xs: Vec<Scalar> = (0..=dim as i64).map(|v| Scalar::from_int(field, v)).collect();
    // Newton divided differences, then expansion into monomial coefficients
    let mut dd: Vec<Scalar> = xs.iter().map(det_at).collect();
    for j in 1..=dim {
        for i in (j..=dim).rev() {
            let den = (&xs[i] - &xs[i - j]).inv().expect("distinct nodes");
            dd[i] = (&dd[i] - &dd[i - 1]) * &den;
        }
    }
    let mut coeffs = vec![Scalar::zero(field)];
    for i in (0..=dim).rev() {
        // coeffs = coeffs * (t - xs[i]) + dd[i]
        let mut next = vec![Scalar::zero(field); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= &(c * &xs[i]);
        }
        next[0] += &dd[i];
        coeffs = next;
    }
    rational_roots(&UniPoly::new(field, coeffs))
}

/// Matrix of `a` on the invariant subspace spanned by the columns of `basis`.
fn restrict_operator(a: &DenseMatrix, basis: &DenseMatrix) -> DenseMatrix {
    let (_, rows) = basis.transpose().rref();
    let all: Vec<usize> = (0..basis.cols()).collect();
    let inv = basis.submatrix(&rows, &all).inverse().expect("independent columns");
    inv.mul(&a.mul(basis).submatrix(&rows, &all))
}

/// Joint generalized eigenspaces of commuting operators with eigenvalues in the
/// base field, as (eigenvalue tuple, dimension).
fn joint_spectrum(ops: &[DenseMatrix]) -> Vec<(Vec<Scalar>, usize)> {
    let field = ops[0].field();
    let mut stack = vec![(Vec::new(), DenseMatrix::identity(field, ops[0].rows()))];
    let mut out = Vec::new();
    while let Some((values, basis)) = stack.pop() {
        let k = values.len();
        if k == ops.len() {
            out.push((values, basis.cols()));
            continue;
        }
        let r = restrict_operator(&ops[k], &basis);
        let dim = r.rows();
        for lambda in eigenvalues(&r) {
            let shifted = r.sub(&DenseMatrix::identity(field, dim).scale(&lambda)).pow(dim as u32);
            let cols = DenseMatrix::from_rows(field, shifted.kernel()).transpose();
            let mut v = values.clone();
            v.push(lambda);
            stack.push((v, basis.mul(&cols)));
        }
    }
    out
}
/// Rational singular points in lexicographic order, and whether they carry the
/// whole locus. In a degree `D` past the Hilbert regularity of `E`, the
/// quotients `x_k / l` act on `E_D` as commuting operators whose joint
/// eigenvalues are the affine coordinates of the points in the chart `l = 1`.
fn rational_singular_points(p: &SheafPresentation) -> Result<(Vec<Vec<Scalar>>, bool)> {
    let e = ext_module(p)?;
    let reduced = e.series().reduced();
    if e.series().is_zero() || reduced.dim == 0 {
        return Ok((Vec::new(), true));
    }
    if reduced.dim > 1 {
        return Err(SheafError::Shape(format!("singular locus has dimension {}", reduced.dim - 1)));
    }
    let module = e.module().expect("nonzero module");
    let ring = p.ring();
    let field = ring.field();
    let nvars = ring.nvars();
    let m = reduced.numerator.iter().sum::<i128>() as usize;
    let stable = reduced.offset + reduced.numerator.len() as i64;
    let forms: Vec<Vec<i64>> = (0..nvars)
        .map(|k| (0..nvars).map(|j| (j == k) as i64).collect())
        .chain(
            (1..=4).map(|c| (0..nvars as i64).map(|j| (j + 1).pow(c - 1) * if j % 2 == 0 { 1 } else { -1 }).collect()),
        )
        .collect();
    for d in stable..stable + 6 {
        if e.hf(d) as usize != m || e.hf(d + 1) as usize != m {
            continue;
        }
        let xs: Vec<DenseMatrix> =
            (0..nvars).map(|k| module.multiplication_matrix(&ring.var(k), d)).collect::<std::result::Result<_, _>>()?;
        for w in &forms {
            let mut l = DenseMatrix::zeros(field, m, m);
            for (k, x) in xs.iter().enumerate() {
                l = l.add(&x.scale(&Scalar::from_int(field, w[k])));
            }
            let Some(inv) = l.inverse() else { continue };
            let ops: Vec<DenseMatrix> = xs.iter().map(|x| inv.mul(x)).collect();
            let commuting = ops.iter().enumerate().all(|(i, a)| ops[i + 1..].iter().all(|b| a.mul(b) == b.mul(a)));
            if !commuting {
                continue;
            }
            let spectrum = joint_spectrum(&ops);
            let mut pts: Vec<Vec<Scalar>> = spectrum.iter().map(|(v, _)| normalize_point(v)).collect();
            if pts.iter().any(|pt| p.evaluate(pt).rank() == p.s()) {
                continue;
            }
            pts.sort();
            let found: usize = spectrum.iter().map(|(_, k)| k).sum();
            return Ok((pts, found == m));
        }
    }
    Err(SheafError::Shape("no stable degree of the Ext module separates the singular points".into()))
}

fn point_string(p: &[Scalar]) -> String {
    format!("({})", p.iter().map(ToString::to_string).collect::<Vec<_>>().join(":"))
}

fn coefficient_matrix(forms: &[Poly], nvars: usize, field: tailsheaf_core::Field) -> DenseMatrix {
    DenseMatrix::from_rows(field, forms.iter().map(linear_coefficients).collect()).with_shape(forms.len(), nvars)
}

/// Greedy choice of independent rows, in order.
fn independent_rows(rows: &[Vec<Scalar>], width: usize, field: tailsheaf_core::Field) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut rank = 0;
    for (i, _) in rows.iter().enumerate() {
        let mut trial: Vec<Vec<Scalar>> = chosen.iter().map(|&k| rows[k].clone()).collect();
        trial.push(rows[i].clone());
        let r = DenseMatrix::from_rows(field, trial).with_shape(chosen.len() + 1, width).rank();
        if r > rank {
            rank = r;
            chosen.push(i);
        }
    }
    chosen
}

fn permutation(field: tailsheaf_core::Field, order: &[usize]) -> DenseMatrix {
    let mut p = DenseMatrix::zeros(field, order.len(), order.len());
    for (new, &old) in order.iter().enumerate() {
        p.set(new, old, Scalar::one(field));
    }
    p
}

fn block_diag(field: tailsheaf_core::Field, k: usize, m: &DenseMatrix) -> DenseMatrix {
    let size = k + m.rows();
    let mut out = DenseMatrix::identity(field, size);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(k + i, k + j, m.get(i, j).clone());
        }
    }
    out
}

fn scalar_record(ring: PolyRing, rows: &DenseMatrix, cols: &DenseMatrix, coords: DenseMatrix) -> TransformationRecord {
    TransformationRecord { coords, ..TransformationRecord::from_scalars(ring, rows, cols) }
}

/// One peel of a normalized minimal tail.
struct PeelStep {
    point: Vec<Scalar>,
    row: usize,
    combination: Vec<Scalar>,
    rows: DenseMatrix,
    cols: DenseMatrix,
    coords: DenseMatrix,
}

fn peel_step(p: &SheafPresentation) -> Result<PeelStep> {
    let ring = p.ring();
    let field = p.field();
    let (n, s, q) = (p.n(), p.s(), p.q());
    let nvars = ring.nvars();
    let point = rational_singular_points(p)?.0.into_iter().next().ok_or(SheafError::NoRationalPoint)?;
    let kernel = p.evaluate(&point).left_kernel();
    let (row, mut v) = kernel
        .into_iter()
        .filter_map(|v| v.iter().position(|c| !c.is_zero()).map(|i| (i, v)))
        .min_by_key(|(i, _)| *i)
        .ok_or(SheafError::NoRationalPoint)?;
    let inv = v[row].inv().expect("nonzero pivot");
    v.iter_mut().for_each(|c| *c *= &inv);

    let mut combine = DenseMatrix::identity(field, s);
    for (k, c) in v.iter().enumerate() {
        combine.set(row, k, c.clone());
    }
    let order: Vec<usize> = std::iter::once(row).chain((0..s).filter(|&k| k != row)).collect();
    let rows = permutation(field, &order).mul(&combine);

    let first: Vec<Poly> = (0..q)
        .map(|j| {
            v.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .fold(ring.zero(), |acc, (k, c)| &acc + &p.entry(k, j).scale(c))
        })
        .collect();
    let coeffs: Vec<Vec<Scalar>> = first.iter().map(linear_coefficients).collect();
    let pivots = independent_rows(&coeffs, nvars, field);
    if pivots.len() != n {
        return Err(SheafError::RowSpan { row, dim: pivots.len(), expected: n });
    }
    let basis =
        coefficient_matrix(&pivots.iter().map(|&j| first[j].clone()).collect::<Vec<_>>(), nvars, field).transpose();
    let mut clear = DenseMatrix::identity(field, q);
    for j in (0..q).filter(|j| !pivots.contains(j)) {
        let c = basis.solve(&coeffs[j]).expect("pivot columns span the row");
        for (k, &pj) in pivots.iter().enumerate() {
            clear.set(pj, j, -c[k].clone());
        }
    }
    let col_order: Vec<usize> = pivots.iter().copied().chain((0..q).filter(|j| !pivots.contains(j))).collect();
    let cols = clear.mul(&permutation(field, &col_order).transpose());

    let anchor = point.iter().position(|c| !c.is_zero()).expect("points are nonzero");
    let mut l_rows: Vec<Vec<Scalar>> = pivots.iter().map(|&j| coeffs[j].clone()).collect();
    l_rows.push((0..nvars).map(|i| Scalar::from_int(field, (i == anchor) as i64)).collect());
    let coords = DenseMatrix::from_rows(field, l_rows)
        .inverse()
        .ok_or_else(|| SheafError::Shape("peeled forms do not define coordinates".into()))?;
    Ok(PeelStep { point, row, combination: v, rows, cols, coords })
}

#[derive(Clone, Debug)]
pub struct PeelResult {
    /// Lexicographically smallest rational singular point.
    pub point: Vec<Scalar>,
    /// Row index whose combination vanishes at the point.
    pub row: usize,
    pub combination: Vec<Scalar>,
    /// Twist applied before peeling.
    pub shift: i64,
    /// Normalized input after the record: row 0 reads `(x_0, .., x_{n-1}, 0, .., 0)`.
    pub transformed: SheafPresentation,
    pub record: TransformationRecord,
    /// `None` when `m = 1`.
    pub quotient: Option<SheafPresentation>,
}

impl PeelResult {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "point": self.point,
            "row": self.row,
            "combination": self.combination,
            "shift": self.shift,
            "transformed": self.transformed.to_text(),
            "quotient": self.quotient.as_ref().map(SheafPresentation::to_text),
            "record": self.record.to_json(),
        })
    }
}

/// Splits a minimal tail as an extension `0 -> S_1 -> F -> F' -> 0` and returns `F'`.
pub fn peel(p: &SheafPresentation) -> Result<PeelResult> {
    let c = require_minimal(p)?;
    let shift = c.shift.expect("tails have a shift");
    let normal = p.twist(shift);
    let step = peel_step(&normal)?;
    let n = p.n();
    let record = scalar_record(normal.ring(), &step.rows, &step.cols, step.coords);
    let transformed = record.apply(&normal)?;
    let quotient = if p.s() == 1 {
        None
    } else {
        Some(transformed.sub_presentation(&(1..p.s()).collect::<Vec<_>>(), &(n..p.q()).collect::<Vec<_>>())?)
    };
    Ok(PeelResult {
        point: step.point,
        row: step.row,
        combination: step.combination,
        shift,
        transformed,
        record,
        quotient,
    })
}

#[derive(Clone, Debug)]
pub struct ChainForm {
    pub shift: i64,
    /// Lower block triangular; row `i` has `n` independent forms in column block `i`.
    pub presentation: SheafPresentation,
    pub record: TransformationRecord,
    /// Singular point of each diagonal block, in the coordinates of `presentation`.
    pub frame_points: Vec<Vec<Scalar>>,
    /// The same points in the input coordinates.
    pub points: Vec<Vec<Scalar>>,
}

/// Common zero of the `n` forms of a diagonal block.
fn block_point(p: &SheafPresentation, row: usize) -> Vec<Scalar> {
    let n = p.n();
    let forms: Vec<Poly> = (0..n).map(|l| p.entry(row, row * n + l).clone()).collect();
    let kernel = coefficient_matrix(&forms, n + 1, p.field()).kernel();
    normalize_point(&kernel[0])
}

/// Iterated peeling.
pub fn chain_form(p: &SheafPresentation) -> Result<ChainForm> {
    let c = require_minimal(p)?;
    let shift = c.shift.expect("tails have a shift");
    let ring = p.ring();
    let field = p.field();
    let (n, s, q) = (p.n(), p.s(), p.q());
    let mut current = p.twist(shift);
    let mut record = TransformationRecord::identity(ring, s, q);
    for k in 0..s {
        let sub = current.sub_presentation(&(k..s).collect::<Vec<_>>(), &(n * k..q).collect::<Vec<_>>())?;
        let step = peel_step(&sub)?;
        let lifted =
            scalar_record(ring, &block_diag(field, k, &step.rows), &block_diag(field, n * k, &step.cols), step.coords);
        current = lifted.apply(&current)?;
        record = record.then(&lifted);
    }
    let frame_points: Vec<Vec<Scalar>> = (0..s).map(|i| block_point(&current, i)).collect();
    let points = frame_points.iter().map(|pt| normalize_point(&record.pull_point(pt))).collect();
    Ok(ChainForm { shift, presentation: current, record, frame_points, points })
}

#[derive(Clone, Debug)]
pub struct Block {
    pub point: Vec<Scalar>,
    pub m: usize,
    pub presentation: SheafPresentation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DecompositionStats {
    pub peels: usize,
    pub eliminations: usize,
    /// Blocks joined because their link to a later row at the same point does not split.
    pub merges: usize,
}

#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub shift: i64,
    /// Ordered by point.
    pub blocks: Vec<Block>,
    /// Block-diagonal form of the normalized input.
    pub presentation: SheafPresentation,
    pub record: TransformationRecord,
    pub stats: DecompositionStats,
}

impl BlockDecomposition {
    pub fn to_json(&self) -> serde_json::Value {
        let blocks: Vec<_> = self
            .blocks
            .iter()
            .map(|b| json!({ "point": b.point, "m": b.m, "presentation": b.presentation.to_text() }))
            .collect();
        json!({
            "shift": self.shift,
            "blocks": blocks,
            "presentation": self.presentation.to_text(),
            "record": self.record.to_json(),
            "stats": self.stats,
        })
    }
}

/// Block-diagonal form with one block per singular point. All singular points must be rational.
pub fn decompose(p: &SheafPresentation) -> Result<BlockDecomposition> {
    require_minimal(p)?;
    if !rational_singular_points(p)?.1 {
        return Err(SheafError::IrrationalPoints);
    }
    let chain = chain_form(p)?;
    let ring = p.ring();
    let field = p.field();
    let (n, s, q) = (p.n(), p.s(), p.q());
    let nvars = n + 1;
    let mut m: Vec<Vec<Poly>> = chain.presentation.matrix().to_vec();
    let mut rows_acc = DenseMatrix::identity(field, s);
    let mut cols_acc = DenseMatrix::identity(field, q);
    let mut stats = DecompositionStats { peels: s, ..Default::default() };
    let mut groups: Vec<(Vec<Scalar>, Vec<usize>)> = Vec::new();
    let coef = |f: &Poly, v: usize| f.coefficient(&Monomial::var(nvars, v));

    for i in 0..s {
        let pi = &chain.frame_points[i];
        let mut linked = Vec::new();
        for (g, (point, members)) in groups.iter().enumerate() {
            let cols: Vec<usize> = members.iter().flat_map(|&k| k * n..(k + 1) * n).collect();
            if cols.iter().all(|&c| m[i][c].is_zero()) {
                continue;
            }
            let unknowns = members.len() + n * cols.len();
            let mut system = DenseMatrix::zeros(field, cols.len() * nvars, unknowns);
            let mut rhs = Vec::with_capacity(cols.len() * nvars);
            for (ci, &c) in cols.iter().enumerate() {
                for v in 0..nvars {
                    let eq = ci * nvars + v;
                    for (ki, &k) in members.iter().enumerate() {
                        system.set(eq, ki, coef(&m[k][c], v));
                    }
                    for l in 0..n {
                        system.set(eq, members.len() + l * cols.len() + ci, coef(&m[i][i * n + l], v));
                    }
                    rhs.push(coef(&m[i][c], v));
                }
            }
            let Some(sol) = system.solve(&rhs) else {
                if point == pi {
                    linked.push(g);
                    continue;
                }
                return Err(SheafError::Unsolvable { row: i, point: point_string(&chain.record.pull_point(point)) });
            };
            for (ki, &k) in members.iter().enumerate() {
                let lambda = &sol[ki];
                if lambda.is_zero() {
                    continue;
                }
                for j in 0..q {
                    m[i][j] = &m[i][j] - &m[k][j].scale(lambda);
                }
                for j in 0..s {
                    let v = rows_acc.get(i, j) - &(rows_acc.get(k, j) * lambda);
                    rows_acc.set(i, j, v);
                }
            }
            for (ci, &c) in cols.iter().enumerate() {
                for l in 0..n {
                    let nu = &sol[members.len() + l * cols.len() + ci];
                    if nu.is_zero() {
                        continue;
                    }
                    let src = i * n + l;
                    for r in 0..s {
                        m[r][c] = &m[r][c] - &m[r][src].scale(nu);
                    }
                    for r in 0..q {
                        let v = cols_acc.get(r, c) - &(cols_acc.get(r, src) * nu);
                        cols_acc.set(r, c, v);
                    }
                }
            }
            stats.eliminations += 1;
        }
        // rows tied to a block at the same point by a non-split extension join it
        let mut members = vec![i];
        for &g in linked.iter().rev() {
            members.extend(groups.remove(g).1);
            stats.merges += 1;
        }
        members.sort();
        groups.push((pi.clone(), members));
    }

    let mut groups: Vec<(Vec<Scalar>, Vec<usize>)> =
        groups.into_iter().map(|(pt, members)| (normalize_point(&chain.record.pull_point(&pt)), members)).collect();
    groups.sort();
    let row_order: Vec<usize> = groups.iter().flat_map(|(_, members)| members.iter().copied()).collect();
    let col_order: Vec<usize> = row_order.iter().flat_map(|&k| k * n..(k + 1) * n).collect();
    let rows = permutation(field, &row_order).mul(&rows_acc);
    let cols = cols_acc.mul(&permutation(field, &col_order).transpose());
    let record = chain.record.then(&TransformationRecord::from_scalars(ring, &rows, &cols));
    let presentation = record.apply(&p.twist(chain.shift))?;

    let mut blocks = Vec::with_capacity(groups.len());
    let mut offset = 0;
    for (point, members) in &groups {
        let size = members.len();
        let r: Vec<usize> = (offset..offset + size).collect();
        let c: Vec<usize> = (offset * n..(offset + size) * n).collect();
        for i in 0..s {
            for j in 0..q {
                let inside = r.contains(&i) == c.contains(&j);
                if !inside && !presentation.entry(i, j).is_zero() {
                    return Err(SheafError::Unsolvable { row: i, point: point_string(point) });
                }
            }
        }
        blocks.push(Block { point: point.clone(), m: size, presentation: presentation.sub_presentation(&r, &c)? });
        offset += size;
    }
    Ok(BlockDecomposition { shift: chain.shift, blocks, presentation, record, stats })
}

#[derive(Clone, Debug)]
pub struct TangentVerdict {
    /// `m` when the sheaf is the twisted `m`-th power of the tangent sheaf.
    pub m: Option<usize>,
    pub reason: Option<String>,
    /// Column change taking the matrix to `m` diagonal copies of `(x_0 .. x_n)`.
    pub record: Option<TransformationRecord>,
}

impl TangentVerdict {
    fn fail(reason: String) -> TangentVerdict {
        TangentVerdict { m: None, reason: Some(reason), record: None }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "m": self.m,
            "reason": self.reason,
            "record": self.record.as_ref().map(TransformationRecord::to_json),
        })
    }
}

/// Decides whether a linear presentation `O(a)^s -> O(a+1)^q` is `T(a-1)^s` with `q = s(n+1)`.
///
/// The coefficient map `K^q -> K^s (x) K^{n+1}` must be invertible; its inverse
/// transpose is then the column change to Euler form.
pub fn recognize_tangent_power(p: &SheafPresentation) -> Result<TangentVerdict> {
    let ring = p.ring();
    let field = p.field();
    let (s, q) = (p.s(), p.q());
    let nvars = ring.nvars();
    let Some(&a) = p.sources().first() else {
        return Err(SheafError::Shape("presentation has no rows".into()));
    };
    if p.sources().iter().any(|&x| x != a) || p.targets().iter().any(|&b| b != a + 1) {
        return Err(SheafError::Shape("expected uniform sources a and targets a + 1".into()));
    }
    if q != s * nvars {
        return Ok(TangentVerdict::fail(format!("{q} columns, a tangent power needs {}", s * nvars)));
    }
    let phi = DenseMatrix::from_rows(
        field,
        (0..q).map(|c| (0..s).flat_map(|i| linear_coefficients(p.entry(i, c))).collect()).collect(),
    );
    let Some(inv) = phi.inverse() else {
        return Ok(TangentVerdict::fail(format!("coefficient map has rank {} < {q}", phi.rank())));
    };
    let record = TransformationRecord::from_scalars(ring, &DenseMatrix::identity(field, s), &inv.transpose());
    debug_assert!(record.apply(p).map(|e| is_euler_form(&e)).unwrap_or(false));
    Ok(TangentVerdict { m: Some(s), reason: None, record: Some(record) })
}

fn is_euler_form(p: &SheafPresentation) -> bool {
    let nvars = p.ring().nvars();
    (0..p.s()).all(|i| {
        (0..p.q()).all(|j| {
            let expected = if j / nvars == i { p.ring().var(j % nvars) } else { p.ring().zero() };
            *p.entry(i, j) == expected
        })
    })
}

#[derive(Clone, Debug)]
pub struct LevelSplit {
    pub m: u64,
    /// `S_m` part, a minimal tail with the input's twists.
    pub minimal_part: SheafPresentation,
    /// Twists of the split line bundles, ascending.
    pub line_bundles: Vec<i64>,
    /// Input after the column change: the split columns are zero.
    pub transformed: SheafPresentation,
    pub record: TransformationRecord,
    pub table_match: bool,
    pub fitting_match: bool,
}

impl LevelSplit {
    pub fn verified(&self) -> bool {
        self.table_match && self.fitting_match
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "m": self.m,
            "minimal_part": self.minimal_part.to_text(),
            "line_bundles": self.line_bundles,
            "record": self.record.to_json(),
            "table_match": self.table_match,
            "fitting_match": self.fitting_match,
        })
    }
}

/// Writes column `j` as `sum g_c col_c` over the given columns, `g_c` of degree `b_j - b_c`.
fn polynomial_combination(p: &SheafPresentation, m: &[Vec<Poly>], j: usize, lower: &[usize]) -> Option<Vec<Poly>> {
    let ring = p.ring();
    let field = p.field();
    let s = p.s();
    let a = p.sources()[0];
    let target_basis = monomial_basis(&ring, p.targets()[j] - a);
    let index = basis_index(&target_basis);
    let width = target_basis.len();
    let mut unknowns: Vec<(usize, Monomial)> = Vec::new();
    for &c in lower {
        for mu in monomial_basis(&ring, p.targets()[j] - p.targets()[c]) {
            unknowns.push((c, mu));
        }
    }
    let mut system = DenseMatrix::zeros(field, s * width, unknowns.len());
    for (u, (c, mu)) in unknowns.iter().enumerate() {
        for i in 0..s {
            for (mono, coeff) in m[i][*c].terms() {
                system.set(i * width + index[&mono.mul(mu)], u, coeff.clone());
            }
        }
    }
    let mut rhs = vec![Scalar::zero(field); s * width];
    for i in 0..s {
        for (mono, coeff) in m[i][j].terms() {
            rhs[i * width + index[mono]] = coeff.clone();
        }
    }
    let sol = system.solve(&rhs)?;
    let mut g = vec![ring.zero(); p.q()];
    for ((c, mu), coeff) in unknowns.iter().zip(sol) {
        if !coeff.is_zero() {
            g[*c] = &g[*c] + &Poly::monomial(ring, *mu, coeff);
        }
    }
    Some(g)
}

/// Splits a level tail as `S_m (+) (+) O(b)`.
pub fn split_level(p: &SheafPresentation) -> Result<LevelSplit> {
    let c = classify_tail(p)?;
    if !c.is_tail {
        return Err(SheafError::NotLevel("not a tail".into()));
    }
    if !c.level {
        return Err(SheafError::NotLevel("normalized sources must be 0 and targets at least 1".into()));
    }
    let ring = p.ring();
    let field = p.field();
    let (n, s, q) = (p.n(), p.s(), p.q());
    let mm = c.m as usize;
    if s != mm {
        return Err(SheafError::NotLevel(format!("{s} rows for m = {mm}")));
    }
    let a = p.sources()[0];
    let mut m: Vec<Vec<Poly>> = p.matrix().to_vec();
    let mut cols: Vec<Vec<Poly>> = (0..q).map(|i| (0..q).map(|j| ring.constant((i == j) as i64)).collect()).collect();
    let linear: Vec<usize> = (0..q).filter(|&j| p.targets()[j] == a + 1).collect();
    let mut higher: Vec<usize> = (0..q).filter(|&j| p.targets()[j] > a + 1).collect();
    higher.sort_by_key(|&j| (p.targets()[j], j));

    let mut subtract = |m: &mut Vec<Vec<Poly>>, j: usize, g: &[Poly]| {
        for (c, gc) in g.iter().enumerate().filter(|(_, gc)| !gc.is_zero()) {
            for row in m.iter_mut() {
                row[j] = &row[j] - &(gc * &row[c]);
            }
            for row in cols.iter_mut() {
                row[j] = &row[j] - &(gc * &row[c]);
            }
        }
    };
    for &j in &higher {
        let g =
            polynomial_combination(p, &m, j, &linear).ok_or(SheafError::NotSplit { col: j, twist: p.targets()[j] })?;
        subtract(&mut m, j, &g);
    }
    let coeffs: Vec<Vec<Scalar>> =
        linear.iter().map(|&j| (0..s).flat_map(|i| linear_coefficients(&m[i][j])).collect()).collect();
    let width = s * (n + 1);
    let chosen = independent_rows(&coeffs, width, field);
    if chosen.len() != n * mm {
        return Err(SheafError::ColumnRank { found: chosen.len(), expected: n * mm });
    }
    let pivots: Vec<usize> = chosen.iter().map(|&k| linear[k]).collect();
    let basis = DenseMatrix::from_rows(field, chosen.iter().map(|&k| coeffs[k].clone()).collect()).transpose();
    for (k, &j) in linear.iter().enumerate().filter(|(k, _)| !chosen.contains(k)) {
        let sol = basis.solve(&coeffs[k]).expect("pivots span the linear columns");
        let mut g = vec![ring.zero(); q];
        for (t, &pj) in pivots.iter().enumerate() {
            g[pj] = Poly::constant(ring, sol[t].clone());
        }
        subtract(&mut m, j, &g);
    }

    let record = TransformationRecord {
        rows: (0..s).map(|i| (0..s).map(|j| ring.constant((i == j) as i64)).collect()).collect(),
        cols,
        coords: DenseMatrix::identity(field, ring.nvars()),
    };
    let transformed = record.apply(p)?;
    let minimal_part = transformed.sub_presentation(&(0..s).collect::<Vec<_>>(), &pivots)?;
    let mut line_bundles: Vec<i64> = (0..q).filter(|j| !pivots.contains(j)).map(|j| p.targets()[j]).collect();
    line_bundles.sort();
    let lines = if line_bundles.is_empty() {
        SheafPresentation::zero(ring)
    } else {
        SheafPresentation::new(ring, vec![], line_bundles.clone(), vec![])?
    };
    let split = minimal_part.direct_sum(&lines)?;
    let (t_min, t_max) = default_window(p);
    let table_match = cohomology_table(p, t_min, t_max, Engine::Dense)?.rows
        == cohomology_table(&split, t_min, t_max, Engine::Dense)?.rows;
    let fitting_match = p.fitting_ideal().same_ideal(&split.fitting_ideal())?;
    Ok(LevelSplit { m: c.m, minimal_part, line_bundles, transformed, record, table_match, fitting_match })
}

#[derive(Clone, Debug)]
pub struct ExtensionBlocks {
    /// Number of leading rows carrying only their diagonal block.
    pub leading: usize,
    /// Drop row `i-1` and column block `i-1`.
    pub h: SheafPresentation,
    /// Row `i-1` with the trailing rows, on column block `i-1` and the trailing blocks.
    pub g: SheafPresentation,
}

/// Blocks `(H_i, G_i)` of a minimal-shape chain
/// `[[X, 0, .., 0, 0], .., [0, .., X, 0], [A_1, .., A_l, B]]`, for `1 <= i <= l`.
pub fn extension_blocks(p: &SheafPresentation, i: usize) -> Result<ExtensionBlocks> {
    let (n, s, q) = (p.n(), p.s(), p.q());
    if s == 0 || q != n * s || p.sources().iter().any(|&a| a != p.sources()[0]) {
        return Err(SheafError::Shape("expected an m x nm chain with uniform sources".into()));
    }
    if p.targets().iter().any(|&b| b != p.sources()[0] + 1) {
        return Err(SheafError::Shape("expected linear entries".into()));
    }
    let only_diagonal = |r: usize| (0..q).all(|j| j / n == r || p.entry(r, j).is_zero()) && span_of_block(p, r) == n;
    let leading = (0..s).take_while(|&r| only_diagonal(r)).count().min(s - 1).max(1);
    if i == 0 || i > leading {
        return Err(SheafError::OutOfRange(format!("block {i} of 1..={leading}")));
    }
    let k = i - 1;
    let h_rows: Vec<usize> = (0..s).filter(|&r| r != k).collect();
    let h_cols: Vec<usize> = (0..q).filter(|&j| j / n != k).collect();
    let g_rows: Vec<usize> = std::iter::once(k).chain(leading..s).collect();
    let g_cols: Vec<usize> = (k * n..(k + 1) * n).chain(leading * n..q).collect();
    Ok(ExtensionBlocks { leading, h: p.sub_presentation(&h_rows, &h_cols)?, g: p.sub_presentation(&g_rows, &g_cols)? })
}

fn span_of_block(p: &SheafPresentation, r: usize) -> usize {
    let n = p.n();
    let forms: Vec<Poly> = (r * n..(r + 1) * n).map(|j| p.entry(r, j).clone()).collect();
    coefficient_matrix(&forms, n + 1, p.field()).rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::is_minimal;
    use crate::cohomology::cohomology_table;
    use crate::construct::{
        curvilinear, euler_tangent, fixture, points_block, s1, scramble, scramble_columns, PointBlock,
    };
    use tailsheaf_core::Field;

    fn pt(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::from_int(Field::Rationals, x)).collect()
    }

    #[test]
    fn peeling_s1_leaves_nothing() {
        let r = peel(&s1(3).unwrap()).unwrap();
        assert!(r.quotient.is_none());
        assert_eq!(r.point, pt(&[0, 0, 0, 1]));
        assert_eq!(r.transformed, s1(3).unwrap());
    }

    #[test]
    fn peeling_remark_iv_leaves_s1() {
        let p = fixture("remark_iv").unwrap();
        let r = peel(&p).unwrap();
        let q = r.quotient.unwrap();
        assert!(is_minimal(&q).unwrap());
        assert_eq!(classify_tail(&q).unwrap().m, 1);
        let ring = p.ring();
        assert_eq!(r.transformed.matrix()[0][..3], ring.vars()[..3]);
    }

    #[test]
    fn peel_rejects_non_minimal() {
        assert!(matches!(peel(&fixture("example_c").unwrap()), Err(SheafError::NotMinimal)));
        assert!(matches!(peel(&fixture("counterexample_3x9").unwrap()), Err(SheafError::NotTail(_))));
    }

    #[test]
    fn chain_form_is_lower_triangular() {
        let p = curvilinear(3, 3).unwrap();
        let (scrambled, _) = scramble(&p, 7).unwrap();
        let c = chain_form(&scrambled).unwrap();
        let q = &c.presentation;
        for i in 0..3 {
            for j in 3 * (i + 1)..9 {
                assert!(q.entry(i, j).is_zero());
            }
            assert_eq!(span_of_block(q, i), 3);
        }
        assert_eq!(c.record.apply(&scrambled).unwrap(), c.presentation);
    }

    #[test]
    fn decompose_one_point() {
        let d = decompose(&fixture("remark_iv").unwrap()).unwrap();
        assert_eq!(d.blocks.len(), 1);
        assert_eq!(d.blocks[0].m, 2);
    }

    #[test]
    fn same_point_blocks_split_when_unlinked() {
        let p = fixture("example_d").unwrap();
        let m3 = p.sub_presentation(&[5, 6, 7], &(17..26).collect::<Vec<_>>()).unwrap();
        let (scrambled, _) = scramble(&m3, 2).unwrap();
        let d = decompose(&scrambled).unwrap();
        assert_eq!(d.blocks.iter().map(|b| b.m).collect::<Vec<_>>(), vec![1, 1, 1]);
        assert!(d.blocks.iter().all(|b| b.point == d.blocks[0].point));
        let m2 = p.sub_presentation(&[3, 4], &(9..17).collect::<Vec<_>>()).unwrap();
        assert_eq!(recognize_tangent_power(&m2).unwrap().m, Some(2));
    }

    #[test]
    fn decompose_scrambled_points() {
        let ring = PolyRing::projective(3, Field::Rationals);
        let blocks: Vec<PointBlock> = [pt(&[0, 0, 0, 1]), pt(&[1, 0, 0, 0]), pt(&[1, 2, 3, 4])]
            .iter()
            .map(|x| PointBlock::at(ring, x).unwrap())
            .collect();
        let p = points_block(ring, &blocks).unwrap();
        let (scrambled, _) = scramble(&p, 3).unwrap();
        let d = decompose(&scrambled).unwrap();
        assert_eq!(d.blocks.iter().map(|b| b.m).collect::<Vec<_>>(), vec![1, 1, 1]);
        for b in &d.blocks {
            let (pts, _) = rational_singular_points(&b.presentation).unwrap();
            let back = normalize_point(&d.record.map_point(&b.point).unwrap());
            assert_eq!(pts, vec![back]);
        }
        assert_eq!(d.record.apply(&scrambled).unwrap(), d.presentation);
    }

    #[test]
    fn decompose_separates_a_fat_point_from_a_reduced_one() {
        let ring = PolyRing::projective(3, Field::Rationals);
        let curv = curvilinear(3, 2).unwrap();
        let other = points_block(ring, &[PointBlock::at(ring, &pt(&[1, 1, 0, 0])).unwrap()]).unwrap();
        let (scrambled, _) = scramble(&curv.direct_sum(&other).unwrap(), 11).unwrap();
        let d = decompose(&scrambled).unwrap();
        let mut ms: Vec<usize> = d.blocks.iter().map(|b| b.m).collect();
        ms.sort();
        assert_eq!(ms, vec![1, 2]);
    }

    #[test]
    fn tangent_power_of_restricted_curvilinear() {
        let p = curvilinear(3, 3).unwrap();
        let r = p.restrict_hyperplane(&crate::presentation::HyperplaneChoice::Seeded(1)).unwrap();
        let v = recognize_tangent_power(&r.presentation).unwrap();
        assert_eq!(v.m, Some(3));
        let e = v.record.unwrap().apply(&r.presentation).unwrap();
        assert!(is_euler_form(&e));
    }

    #[test]
    fn tangent_power_rejects_deficient_rows() {
        let ring = PolyRing::projective(2, Field::Rationals);
        let x = ring.vars();
        let p =
            SheafPresentation::new(ring, vec![0], vec![1, 1, 1], vec![vec![x[0].clone(), x[1].clone(), &x[0] + &x[1]]])
                .unwrap();
        let v = recognize_tangent_power(&p).unwrap();
        assert!(v.m.is_none() && v.reason.is_some());
        assert_eq!(recognize_tangent_power(&euler_tangent(2).unwrap()).unwrap().m, Some(1));
    }

    #[test]
    fn level_example_splits() {
        let p = fixture("level_example").unwrap();
        let (scrambled, _) = scramble_columns(&p, 5).unwrap();
        let split = split_level(&scrambled).unwrap();
        assert_eq!(split.m, 2);
        assert_eq!(split.line_bundles, vec![1, 3]);
        assert!(split.verified());
        assert!(is_minimal(&split.minimal_part).unwrap());
        let (lo, hi) = default_window(&p);
        assert_eq!(
            cohomology_table(&split.minimal_part, lo, hi, Engine::Dense).unwrap().rows,
            cohomology_table(&curvilinear(3, 2).unwrap(), lo, hi, Engine::Dense).unwrap().rows
        );
    }

    #[test]
    fn split_level_rejects_non_level() {
        assert!(matches!(split_level(&fixture("example_c").unwrap()), Err(SheafError::NotLevel(_))));
    }

    #[test]
    fn extension_blocks_of_curvilinear() {
        let p = curvilinear(3, 3).unwrap();
        let b = extension_blocks(&p, 1).unwrap();
        assert_eq!(b.leading, 1);
        assert!(is_minimal(&b.h).unwrap() && is_minimal(&b.g).unwrap());
        assert!(extension_blocks(&p, 2).is_err());
    }
}
