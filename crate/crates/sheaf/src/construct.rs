//! Constructors for tail sheaves and the named fixture catalog.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tailsheaf_core::{DenseMatrix, Field, LocalAlgebra, Monomial, Poly, PolyRing, Scalar};

use crate::error::{Result, SheafError};
use crate::presentation::{SheafPresentation, TransformationRecord};

fn ring(n: usize) -> PolyRing {
    PolyRing::projective(n, Field::Rationals)
}

/// Scales a projective point so that its first nonzero coordinate is 1.
pub fn normalize_point(p: &[Scalar]) -> Vec<Scalar> {
    match p.iter().find(|c| !c.is_zero()) {
        None => p.to_vec(),
        Some(lead) => {
            let inv = lead.inv().expect("nonzero");
            p.iter().map(|c| c * &inv).collect()
        }
    }
}

pub fn s1(n: usize) -> Result<SheafPresentation> {
    if n < 2 {
        return Err(SheafError::DimensionTooSmall(n));
    }
    let r = ring(n);
    SheafPresentation::new(r, vec![0], vec![1; n], vec![(0..n).map(|i| r.var(i)).collect()])
}

/// `T[P^n]` through the Euler sequence `O -> O(1)^{n+1}`.
pub fn euler_tangent(n: usize) -> Result<SheafPresentation> {
    if n < 1 {
        return Err(SheafError::DimensionTooSmall(n));
    }
    let r = ring(n);
    SheafPresentation::new(r, vec![0], vec![1; n + 1], vec![r.vars()])
}

/// The `n` forms `x_i p_k - x_k p_i` (`i != k`), where `k` indexes the first
/// nonzero coordinate of `p`.
pub fn forms_at_point(ring: PolyRing, p: &[Scalar]) -> Result<Vec<Poly>> {
    if p.len() != ring.nvars() {
        return Err(SheafError::Shape(format!("point with {} coordinates in P^{}", p.len(), ring.n())));
    }
    let k = p
        .iter()
        .position(|c| !c.is_zero())
        .ok_or_else(|| SheafError::Shape("the zero vector is not a point".into()))?;
    Ok((0..ring.nvars())
        .filter(|&i| i != k)
        .map(|i| {
            &(&ring.var(i) * &Poly::constant(ring, p[k].clone()))
                - &(&ring.var(k) * &Poly::constant(ring, p[i].clone()))
        })
        .collect())
}

pub(crate) fn linear_coefficients(f: &Poly) -> Vec<Scalar> {
    let ring = f.ring();
    (0..ring.nvars()).map(|i| f.coefficient(&Monomial::var(ring.nvars(), i))).collect()
}

/// Rank of the span of linear forms.
pub fn span_rank(forms: &[Poly]) -> usize {
    let Some(ring) = forms.first().map(Poly::ring) else { return 0 };
    DenseMatrix::from_rows(ring.field(), forms.iter().map(linear_coefficients).collect())
        .with_shape(forms.len(), ring.nvars())
        .rank()
}

fn check_point_forms(ring: PolyRing, forms: &[Poly], point: Option<&[Scalar]>) -> Result<()> {
    let n = ring.n();
    if forms.len() != n {
        return Err(SheafError::Shape(format!("{} forms given, {n} needed", forms.len())));
    }
    for f in forms {
        if f.ring() != ring || !(f.is_zero() || f.homogeneous_degree() == Some(1)) {
            return Err(SheafError::Shape(format!("`{f}` is not a linear form of the ring")));
        }
        if let Some(p) = point {
            if !f.eval(p).is_zero() {
                return Err(SheafError::Shape(format!("`{f}` does not vanish at the point")));
            }
        }
    }
    let rank = span_rank(forms);
    if rank != n {
        return Err(SheafError::Shape(format!("forms span dimension {rank}, expected {n}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointBlock {
    pub point: Vec<Scalar>,
    pub forms: Vec<Poly>,
}

impl PointBlock {
    /// The block at `p` with the forms of [`forms_at_point`].
    pub fn at(ring: PolyRing, p: &[Scalar]) -> Result<PointBlock> {
        Ok(PointBlock { point: p.to_vec(), forms: forms_at_point(ring, p)? })
    }
}

/// Block-diagonal `m x nm` presentation, one `S_1` per point.
pub fn points_block(ring: PolyRing, blocks: &[PointBlock]) -> Result<SheafPresentation> {
    let n = ring.n();
    let m = blocks.len();
    let mut matrix = vec![vec![ring.zero(); n * m]; m];
    for (i, b) in blocks.iter().enumerate() {
        if b.point.len() != ring.nvars() {
            return Err(SheafError::Shape(format!("point {i} has {} coordinates", b.point.len())));
        }
        check_point_forms(ring, &b.forms, Some(&b.point))?;
        for (k, f) in b.forms.iter().enumerate() {
            matrix[i][i * n + k] = f.clone();
        }
    }
    SheafPresentation::new(ring, vec![0; m], vec![1; n * m], matrix)
}

/// The banded matrix of the curvilinear fat point `(x_0^m, x_1, ..., x_{n-1})`:
/// row `i` carries `(x_0 .. x_{n-1})` in block `i` and `(x_n, 0, .., 0)` in block `i - 1`.
pub fn curvilinear(n: usize, m: usize) -> Result<SheafPresentation> {
    if n < 2 {
        return Err(SheafError::DimensionTooSmall(n));
    }
    if m < 1 {
        return Err(SheafError::Shape("curvilinear tails need m >= 1".into()));
    }
    let r = ring(n);
    let mut matrix = vec![vec![r.zero(); n * m]; m];
    for (i, row) in matrix.iter_mut().enumerate() {
        for k in 0..n {
            row[i * n + k] = r.var(k);
        }
        if i > 0 {
            row[(i - 1) * n] = r.var(n);
        }
    }
    SheafPresentation::new(r, vec![0; m], vec![1; n * m], matrix)
}

/// A fat point of length `m` at `point`, described by the multiplication
/// matrices of its local algebra in affine coordinates centred at the point.
#[derive(Clone, Debug)]
pub struct FatPointSpec {
    pub point: Vec<Scalar>,
    pub algebra: LocalAlgebra,
}

impl FatPointSpec {
    /// At `(0 : .. : 0 : 1)`.
    pub fn at_origin(algebra: LocalAlgebra) -> FatPointSpec {
        let n = algebra.nvars();
        let f = algebra.field();
        let mut point = vec![Scalar::zero(f); n + 1];
        point[n] = Scalar::one(f);
        FatPointSpec { point, algebra }
    }

    pub fn is_cyclic(&self) -> bool {
        self.algebra.is_cyclic()
    }
}

/// Coordinate change `T` whose transformed sheaf has its singular point at `p`
/// when the original one sits at `(0 : .. : 0 : 1)`; that is `T^{-1} e_n = p`.
pub fn move_origin_to(p: &[Scalar]) -> Result<DenseMatrix> {
    let dim = p.len();
    let field = p.first().map(Scalar::field).ok_or_else(|| SheafError::Shape("empty point".into()))?;
    let k = p
        .iter()
        .rposition(|c| !c.is_zero())
        .ok_or_else(|| SheafError::Shape("the zero vector is not a point".into()))?;
    let mut u = DenseMatrix::identity(field, dim);
    if k != dim - 1 {
        u.set(k, k, Scalar::zero(field));
        u.set(dim - 1, k, Scalar::one(field));
    }
    for (i, c) in p.iter().enumerate() {
        u.set(i, dim - 1, c.clone());
    }
    u.inverse().ok_or_else(|| SheafError::Shape("point completion is singular".into()))
}

/// Rows `x_i e_k - x_n (C_i e)_k`, columns grouped by variable:
/// `M[k][i m + j] = x_i delta_{kj} - x_n C_i[k][j]`.
pub fn from_local_algebra(spec: &FatPointSpec) -> Result<SheafPresentation> {
    let a = &spec.algebra;
    let n = a.nvars();
    let m = a.length();
    if n < 2 {
        return Err(SheafError::DimensionTooSmall(n));
    }
    let r = PolyRing::projective(n, a.field());
    let mut matrix = vec![vec![r.zero(); n * m]; m];
    for (i, c) in a.matrices().iter().enumerate() {
        for (k, row) in matrix.iter_mut().enumerate() {
            for j in 0..m {
                let mut f = if k == j { r.var(i) } else { r.zero() };
                let coeff = c.get(k, j);
                if !coeff.is_zero() {
                    f = &f - &(&r.var(n) * &Poly::constant(r, coeff.clone()));
                }
                row[i * m + j] = f;
            }
        }
    }
    let p = SheafPresentation::new(r, vec![0; m], vec![1; n * m], matrix)?;
    let origin = FatPointSpec::at_origin(a.clone()).point;
    if normalize_point(&spec.point) == normalize_point(&origin) {
        return Ok(p);
    }
    let t = move_origin_to(&spec.point)?;
    TransformationRecord::coordinate_change(r, p.s(), p.q(), t).apply(&p)
}

/// The Jordan block algebra `K[x_0]/(x_0^m)` in `n` affine variables.
pub fn jordan_algebra(n: usize, m: usize) -> Result<LocalAlgebra> {
    let f = Field::Rationals;
    let mut shift = DenseMatrix::zeros(f, m, m);
    for j in 0..m.saturating_sub(1) {
        shift.set(j + 1, j, Scalar::one(f));
    }
    let mut mats = vec![shift];
    mats.extend((1..n).map(|_| DenseMatrix::zeros(f, m, m)));
    Ok(LocalAlgebra::from_matrices(f, mats)?)
}

/// Lower block-triangular chain of `S_1` extensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSpec {
    /// `L_1, .., L_m`, each `n` independent linear forms.
    pub diagonal: Vec<Vec<Poly>>,
    /// `(row, block, forms)` with `block < row`.
    pub lower: Vec<(usize, usize, Vec<Poly>)>,
}

pub fn chain_extension(ring: PolyRing, spec: &ChainSpec) -> Result<SheafPresentation> {
    let n = ring.n();
    let m = spec.diagonal.len();
    let mut matrix = vec![vec![ring.zero(); n * m]; m];
    for (i, forms) in spec.diagonal.iter().enumerate() {
        check_point_forms(ring, forms, None)?;
        for (k, f) in forms.iter().enumerate() {
            matrix[i][i * n + k] = f.clone();
        }
    }
    for (row, block, forms) in &spec.lower {
        if *block >= *row || *row >= m {
            return Err(SheafError::Shape(format!("block ({row}, {block}) is not strictly below the diagonal")));
        }
        if forms.len() != n {
            return Err(SheafError::Shape(format!("lower block ({row}, {block}) needs {n} entries")));
        }
        for (k, f) in forms.iter().enumerate() {
            matrix[*row][block * n + k] = f.clone();
        }
    }
    SheafPresentation::new(ring, vec![0; m], vec![1; n * m], matrix)
}

const EXAMPLE_B_POINTS: &str = "\
ring n=3 field=QQ
source 0 0
target 1 1 1 1 1 1
row x0, x1, x2, 0, 0, 0
row 0, 0, 0, x1, x2, x3
";

const EXAMPLE_C: &str = "\
ring n=3 field=QQ
source 0 0 2 2
target 1 1 1 1 1 1 3 3 3 3 3 3
row x0, x1, x2, x3, 0, 0, 0, 0, 0, 0, 0, 0
row 0, 0, x0, x1, x2, x3, 0, 0, 0, 0, 0, 0
row 0, 0, 0, 0, 0, 0, x0 - x1, x2, x3, 0, 0, 0
row 0, 0, 0, 0, 0, 0, 0, 0, 0, x0 + x1, x2, x3
";

const EXAMPLE_D: &str = "\
ring n=3 field=QQ
source 0 0 0 2 2 3 3 3
target 1 1 1 1 1 1 1 1 1 3 3 3 3 3 3 3 3 4 4 4 4 4 4 4 4 4
row x0, x1, x2, x3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0
row 0, 0, x3, 0, x0, x1, x2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0
row 0, 0, 0, 0, x3, 0, x0, x1, x2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0
row 0, 0, 0, 0, 0, 0, 0, 0, 0, x0, x1, x2, x3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0
row 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, x0, x1, x2, x3, 0, 0, 0, 0, 0, 0, 0, 0, 0
row 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, x0, x1, x2, 0, 0, 0, 0, 0, 0
row 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, x0, x1, x2, 0, 0, 0
row 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, x0, x1, x2
";

const REMARK_IV: &str = "\
ring n=3 field=QQ
source 0 0
target 1 1 1 1 1 1
row x0, x1, x2, 0, 0, 0
row x3, 0, 0, x0, x1, x2
";

const COUNTEREXAMPLE_3X9: &str = "\
ring n=3 field=QQ
source 0 0 0
target 1 1 1 1 1 1 1 1 1
row x0, x1, x2, 0, 0, 0, 0, 0, 0
row x3, 0, 0, x0, x1, x2, 0, 0, 0
row 0, 0, 0, 0, x3, 0, x0, x1, x2
";

const POONEN_6X18: &str = "\
ring n=3 field=QQ
source 0 0 0 0 0 0
target 1 1 1 1 1 1 1 1 1 1 1 1 1 1 1 1 1 1
row x0, x1, x2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0
row x3, 0, 0, x0, x1, x2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0
row 0, x3, 0, 0, 0, 0, x0, x1, x2, 0, 0, 0, 0, 0, 0, 0, 0, 0
row 0, 0, x3, 0, 0, 0, 0, 0, 0, x0, x1, x2, 0, 0, 0, 0, 0, 0
row 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, x3, x0, x1, x2, 0, 0, 0
row 0, 0, 0, x3, 0, 0, 0, x3, 0, 0, 0, 0, 0, 0, x3, x0, x1, x2
";

/// Four quartics meeting `x3 = 0` in the sixteen points `(k : l : 1 : 0)`, `1 <= k, l <= 4`.
const CHERN_16: &str = "\
ring n=3 field=QQ
source -5
target -4 -1 -1
row x3, (x0 - x2)*(x0 - 2*x2)*(x0 - 3*x2)*(x0 - 4*x2), (x1 - x2)*(x1 - 2*x2)*(x1 - 3*x2)*(x1 - 4*x2)
";

/// The affine ideal of the length-six fat point behind [`POONEN_6X18`], in `x0, x1, x2`.
pub const POONEN_IDEAL: [&str; 6] = ["x0^2 + x2^3", "x0*x1", "x1^2 + x2^3", "x0*x2", "x1*x2", "x2^4"];

pub fn poonen_algebra() -> Result<LocalAlgebra> {
    let r = PolyRing::new(3, Field::Rationals)?;
    let gens = POONEN_IDEAL.iter().map(|g| r.parse(g)).collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(tailsheaf_core::local_algebra(&gens)?)
}

/// `S_m` from the curvilinear point plus line bundles `O(1)` and `O(3)`.
pub fn level_example() -> Result<SheafPresentation> {
    let r = ring(3);
    let lines = SheafPresentation::new(r, vec![], vec![1, 3], vec![])?;
    curvilinear(3, 2)?.direct_sum(&lines)
}

/// Fixed catalog names; parametric families are `s1_<n>`, `euler_tangent_<n>`
/// and `curvilinear_<n>_<m>`.
pub const FIXTURE_NAMES: [&str; 11] = [
    "example_b_points",
    "example_c",
    "example_d",
    "remark_iv",
    "counterexample_3x9",
    "poonen_6x18",
    "chern_16",
    "euler_tangent",
    "level_example",
    "line_bundles",
    "s1",
];

pub fn fixture_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "example_b_points" => EXAMPLE_B_POINTS,
        "example_c" => EXAMPLE_C,
        "example_d" => EXAMPLE_D,
        "remark_iv" => REMARK_IV,
        "counterexample_3x9" => COUNTEREXAMPLE_3X9,
        "poonen_6x18" => POONEN_6X18,
        "chern_16" => CHERN_16,
        _ => return None,
    })
}

fn parametric(name: &str, prefix: &str) -> Option<Vec<usize>> {
    let rest = name.strip_prefix(prefix)?.strip_prefix('_')?;
    rest.split('_').map(|x| x.parse().ok()).collect()
}

pub fn fixture(name: &str) -> Result<SheafPresentation> {
    if let Some(text) = fixture_text(name) {
        return SheafPresentation::parse(text);
    }
    match name {
        "euler_tangent" => return euler_tangent(3),
        "s1" => return s1(3),
        "level_example" => return level_example(),
        "line_bundles" => return SheafPresentation::new(ring(3), vec![], vec![-1, 0, 2], vec![]),
        _ => {}
    }
    if let Some([n]) = parametric(name, "s1").as_deref() {
        return s1(*n);
    }
    if let Some([n]) = parametric(name, "euler_tangent").as_deref() {
        return euler_tangent(*n);
    }
    if let Some([n, m]) = parametric(name, "curvilinear").as_deref() {
        return curvilinear(*n, *m);
    }
    Err(SheafError::UnknownFixture(name.to_string()))
}

fn small(rng: &mut ChaCha8Rng, field: Field, bound: i64) -> Scalar {
    Scalar::from_int(field, rng.gen_range(-bound..=bound))
}

fn random_form(rng: &mut ChaCha8Rng, ring: PolyRing, d: i64, density: f64) -> Poly {
    let mut terms = Vec::new();
    for m in tailsheaf_core::monomial_basis(&ring, d) {
        if rng.gen_bool(density) {
            terms.push((m, small(rng, ring.field(), 3)));
        }
    }
    Poly::from_terms(ring, terms)
}

/// A random valid presentation on `P^n` with `s <= 3` rows and `q <= 12` columns.
pub fn random_presentation(seed: u64, n: usize) -> SheafPresentation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = ring(n);
    loop {
        let s = rng.gen_range(0..=3usize);
        let q = rng.gen_range(s + 1..=(s + 1 + n * s).min(12).max(s + 1));
        let mut sources: Vec<i64> = (0..s).map(|_| rng.gen_range(-1..=1)).collect();
        sources.sort_unstable();
        let mut targets: Vec<i64> = (0..q).map(|_| rng.gen_range(0..=3)).collect();
        targets.sort_unstable();
        let matrix = sources
            .iter()
            .map(|a| {
                targets
                    .iter()
                    .map(|b| if b - a > 0 && b - a <= 2 { random_form(&mut rng, r, b - a, 0.6) } else { r.zero() })
                    .collect()
            })
            .collect();
        if let Ok(p) = SheafPresentation::new(r, sources, targets, matrix) {
            return p;
        }
    }
}

/// Unit lower times unit upper triangular, so always invertible; `groups` lists
/// index classes that may be mixed (equal twists).
fn random_invertible(rng: &mut ChaCha8Rng, field: Field, size: usize, groups: &[Vec<usize>]) -> DenseMatrix {
    let mut lower = DenseMatrix::identity(field, size);
    let mut upper = DenseMatrix::identity(field, size);
    for g in groups {
        for (a, &i) in g.iter().enumerate() {
            for &j in &g[..a] {
                lower.set(i, j, small(rng, field, 2));
                upper.set(j, i, small(rng, field, 2));
            }
        }
    }
    let mut perm = DenseMatrix::zeros(field, size, size);
    for g in groups {
        let mut shuffled = g.clone();
        for k in (1..shuffled.len()).rev() {
            shuffled.swap(k, rng.gen_range(0..=k));
        }
        for (&i, &j) in g.iter().zip(&shuffled) {
            perm.set(i, j, Scalar::one(field));
        }
    }
    perm.mul(&lower).mul(&upper)
}

fn twist_groups(twists: &[i64]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut keys: Vec<i64> = Vec::new();
    for (i, t) in twists.iter().enumerate() {
        match keys.iter().position(|k| k == t) {
            Some(g) => groups[g].push(i),
            None => {
                keys.push(*t);
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// A random invertible coordinate change with small integer entries.
pub fn random_coordinates(rng: &mut ChaCha8Rng, field: Field, dim: usize) -> DenseMatrix {
    loop {
        let rows = (0..dim).map(|_| (0..dim).map(|_| small(rng, field, 2)).collect()).collect();
        let t = DenseMatrix::from_rows(field, rows);
        if t.rank() == dim {
            return t;
        }
    }
}

/// Scrambles by random scalar row and column operations within equal twists
/// and a random coordinate change.
pub fn scramble(p: &SheafPresentation, seed: u64) -> Result<(SheafPresentation, TransformationRecord)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = p.field();
    let rows = random_invertible(&mut rng, f, p.s(), &twist_groups(p.sources()));
    let cols = random_invertible(&mut rng, f, p.q(), &twist_groups(p.targets()));
    let mut record = TransformationRecord::from_scalars(p.ring(), &rows, &cols);
    record.coords = random_coordinates(&mut rng, f, p.ring().nvars());
    Ok((record.apply(p)?, record))
}

/// Scrambles the target columns only: scalar mixing within equal twists, then
/// every column of twist `b` gets random multiples of every column of lower twist.
pub fn scramble_columns(p: &SheafPresentation, seed: u64) -> Result<(SheafPresentation, TransformationRecord)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = p.ring();
    let q = p.q();
    let scalar = random_invertible(&mut rng, r.field(), q, &twist_groups(p.targets()));
    let mut cols: Vec<Vec<Poly>> =
        scalar.to_rows().into_iter().map(|row| row.into_iter().map(|c| Poly::constant(r, c)).collect()).collect();
    let b = p.targets();
    for j in 0..q {
        for c in 0..q {
            if b[c] < b[j] {
                let g = random_form(&mut rng, r, b[j] - b[c], 0.5);
                cols[c][j] = &cols[c][j] + &g;
            }
        }
    }
    let record = TransformationRecord {
        rows: TransformationRecord::identity(r, p.s(), q).rows,
        cols,
        coords: DenseMatrix::identity(r.field(), r.nvars()),
    };
    Ok((record.apply(p)?, record))
}
