//! The zeroth Fitting ideal: maximal minors of the presentation matrix.

use std::collections::{BTreeMap, HashMap};

use tailsheaf_core::{
    basis_index, groebner_ideal_in, monomial_basis, AlgebraError, IdealGB, MonomialOrder, Poly, PolyRing, SparseRows,
};

use super::SheafPresentation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FittingIdeal {
    ring: PolyRing,
    generators: Vec<Poly>,
}

impl FittingIdeal {
    pub fn ring(&self) -> PolyRing {
        self.ring
    }

    /// Linearly independent homogeneous generators, by ascending degree.
    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.generators.iter().any(|g| g.degree() == Some(0))
    }

    pub fn groebner(&self) -> Result<IdealGB, AlgebraError> {
        groebner_ideal_in(self.ring, &self.generators, MonomialOrder::GrevLex)
    }

    /// Equality of ideals, decided by comparing reduced Groebner bases.
    pub fn same_ideal(&self, other: &FittingIdeal) -> Result<bool, AlgebraError> {
        if self.ring != other.ring {
            return Ok(false);
        }
        Ok(self.groebner()?.basis() == other.groebner()?.basis())
    }
}

/// A basis of the span of homogeneous forms, degree by degree.
pub fn reduce_forms(ring: PolyRing, forms: &[Poly]) -> Vec<Poly> {
    let mut by_degree: BTreeMap<u32, Vec<&Poly>> = BTreeMap::new();
    for f in forms {
        if let Some(d) = f.homogeneous_degree() {
            by_degree.entry(d).or_default().push(f);
        } else {
            assert!(f.is_zero(), "reduce_forms expects homogeneous forms");
        }
    }
    let mut out = Vec::new();
    for (d, fs) in by_degree {
        let basis = monomial_basis(&ring, d as i64);
        let index = basis_index(&basis);
        let mut rows = SparseRows::new(ring.field(), basis.len());
        for f in fs {
            rows.push_row(f.terms().iter().map(|(m, c)| (index[m], c.clone())).collect());
        }
        for r in rows.echelon() {
            out.push(Poly::from_terms(ring, r.into_iter().map(|(k, c)| (basis[k], c)).collect()));
        }
    }
    out
}

fn product(ring: PolyRing, a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let prods: Vec<Poly> = a.iter().flat_map(|f| b.iter().map(move |g| f * g)).collect();
    reduce_forms(ring, &prods)
}

/// Maximal minors of the rows `rows` restricted to `cols`, by Laplace expansion
/// along successive rows with the used columns kept as a bitmask.
fn maximal_minors(p: &SheafPresentation, rows: &[usize], cols: &[usize]) -> Vec<Poly> {
    assert!(cols.len() <= 128, "a connected block with more than 128 columns");
    let ring = p.ring();
    let mut level: HashMap<u128, Poly> = HashMap::from([(0u128, ring.constant(1))]);
    for (l, &r) in rows.iter().enumerate() {
        let mut next: HashMap<u128, Poly> = HashMap::new();
        for (mask, minor) in &level {
            for (ci, &c) in cols.iter().enumerate() {
                let entry = p.entry(r, c);
                if mask >> ci & 1 == 1 || entry.is_zero() {
                    continue;
                }
                let pos = (mask & ((1u128 << ci) - 1)).count_ones() as usize;
                let mut term = minor * entry;
                if (l + pos) % 2 == 1 {
                    term = -&term;
                }
                let key = mask | 1u128 << ci;
                match next.get_mut(&key) {
                    Some(acc) => *acc = &*acc + &term,
                    None => {
                        next.insert(key, term);
                    }
                }
            }
        }
        next.retain(|_, v| !v.is_zero());
        level = next;
    }
    let sorted: BTreeMap<u128, Poly> = level.into_iter().collect();
    reduce_forms(ring, &sorted.into_values().collect::<Vec<_>>())
}

/// Rows grouped into blocks that share nonzero columns, with those columns.
fn connected_blocks(p: &SheafPresentation) -> Vec<(Vec<usize>, Vec<usize>)> {
    let s = p.s();
    let mut parent: Vec<usize> = (0..s).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for j in 0..p.q() {
        let rows: Vec<usize> = (0..s).filter(|&i| !p.entry(i, j).is_zero()).collect();
        for w in rows.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..s {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    groups
        .into_values()
        .map(|rows| {
            let cols = (0..p.q()).filter(|&j| rows.iter().any(|&i| !p.entry(i, j).is_zero())).collect();
            (rows, cols)
        })
        .collect()
}

pub(super) fn fitting_ideal(p: &SheafPresentation) -> FittingIdeal {
    let ring = p.ring();
    let mut gens = vec![ring.constant(1)];
    for (rows, cols) in connected_blocks(p) {
        if cols.len() < rows.len() {
            return FittingIdeal { ring, generators: Vec::new() };
        }
        let minors = maximal_minors(p, &rows, &cols);
        if minors.is_empty() {
            return FittingIdeal { ring, generators: Vec::new() };
        }
        gens = product(ring, &gens, &minors);
    }
    FittingIdeal { ring, generators: reduce_forms(ring, &gens) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tailsheaf_core::Field;

    fn presentation(rows: &[&[&str]], sources: Vec<i64>, targets: Vec<i64>) -> SheafPresentation {
        let r = PolyRing::projective(3, Field::Rationals);
        let m = rows.iter().map(|row| row.iter().map(|e| r.parse(e).unwrap()).collect()).collect();
        SheafPresentation::new(r, sources, targets, m).unwrap()
    }

    #[test]
    fn single_row_gives_its_entries() {
        let p = presentation(&[&["x0", "x1", "x2"]], vec![0], vec![1, 1, 1]);
        let f = p.fitting_ideal();
        let r = p.ring();
        let expected = FittingIdeal { ring: r, generators: vec![r.var(0), r.var(1), r.var(2)] };
        assert!(f.same_ideal(&expected).unwrap());
    }

    #[test]
    fn two_by_two_minors_match_brute_force() {
        let p = presentation(
            &[&["x0", "x1", "x2", "0", "0", "0"], &["x3", "0", "0", "x0", "x1", "x2"]],
            vec![0, 0],
            vec![1; 6],
        );
        let r = p.ring();
        let mut brute = Vec::new();
        for a in 0..6 {
            for b in a + 1..6 {
                let m = p.matrix();
                brute.push(&(&m[0][a] * &m[1][b]) - &(&m[0][b] * &m[1][a]));
            }
        }
        let expected = FittingIdeal { ring: r, generators: reduce_forms(r, &brute) };
        let f = p.fitting_ideal();
        assert_eq!(f.generators().len(), expected.generators().len());
        assert!(f.same_ideal(&expected).unwrap());
    }

    #[test]
    fn block_diagonal_is_a_product() {
        let p = presentation(
            &[&["x0", "x1", "x2", "0", "0", "0"], &["0", "0", "0", "x1", "x2", "x3"]],
            vec![0, 0],
            vec![1; 6],
        );
        assert_eq!(connected_blocks(&p).len(), 2);
        let f = p.fitting_ideal();
        let r = p.ring();
        let a = [r.var(0), r.var(1), r.var(2)];
        let b = [r.var(1), r.var(2), r.var(3)];
        assert_eq!(f.generators().len(), product(r, &a, &b).len());
        assert!(f.generators().iter().all(|g| g.homogeneous_degree() == Some(2)));
    }

    #[test]
    fn no_rows_is_the_unit_ideal() {
        let p = presentation(&[], vec![], vec![2, 3]);
        assert!(p.fitting_ideal().is_unit());
    }
}
