//! Buchberger's algorithm on vectors of polynomials.
//!
//! Ideals are the rank-one case. Terms are ordered position-last: monomials are
//! compared first and ties are broken by component (lower index is larger).
//! Pairs are selected by sugar degree and pruned with the Gebauer-Moeller
//! criteria; the coprime-leads criterion is only applied to ideals.

use std::cmp::Ordering;

use crate::poly::{Monomial, MonomialOrder};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Term {
    pub mon: Monomial,
    pub comp: u32,
    pub coeff: Scalar,
}

/// Terms sorted descending in the module order; no zero coefficients.
pub(crate) type Vector = Vec<Term>;

#[derive(Clone, Copy, Debug)]
pub(crate) struct ModuleOrder {
    pub mono: MonomialOrder,
}

impl ModuleOrder {
    pub fn cmp(&self, am: &Monomial, ac: u32, bm: &Monomial, bc: u32) -> Ordering {
        self.mono.cmp(am, bm).then_with(|| bc.cmp(&ac))
    }

    pub fn sort(&self, v: &mut Vector) {
        v.sort_by(|a, b| self.cmp(&b.mon, b.comp, &a.mon, a.comp));
        let mut out: Vector = Vec::with_capacity(v.len());
        for t in v.drain(..) {
            match out.last_mut() {
                Some(l) if l.mon == t.mon && l.comp == t.comp => l.coeff += &t.coeff,
                _ => out.push(t),
            }
        }
        out.retain(|t| !t.coeff.is_zero());
        *v = out;
    }
}

fn divmask(m: &Monomial) -> u64 {
    let mut mask = 0u64;
    for i in 0..m.nvars() {
        let e = m.exp(i);
        if e > 0 {
            mask |= 1 << (2 * i);
        }
        if e > 1 {
            mask |= 1 << (2 * i + 1);
        }
    }
    mask
}

/// `f - c * m * g`.
pub(crate) fn sub_mul(order: &ModuleOrder, f: &[Term], c: &Scalar, m: &Monomial, g: &[Term]) -> Vector {
    let mut out = Vec::with_capacity(f.len() + g.len());
    let (mut i, mut j) = (0, 0);
    while i < f.len() || j < g.len() {
        let ord = if i == f.len() {
            Ordering::Less
        } else if j == g.len() {
            Ordering::Greater
        } else {
            let gm = g[j].mon.mul(m);
            order.cmp(&f[i].mon, f[i].comp, &gm, g[j].comp)
        };
        match ord {
            Ordering::Greater => {
                out.push(f[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push(Term { mon: g[j].mon.mul(m), comp: g[j].comp, coeff: -&(c * &g[j].coeff) });
                j += 1;
            }
            Ordering::Equal => {
                let v = &f[i].coeff - &(c * &g[j].coeff);
                if !v.is_zero() {
                    out.push(Term { mon: f[i].mon, comp: f[i].comp, coeff: v });
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub(crate) fn make_monic(v: &mut Vector) {
    if let Some(first) = v.first() {
        if !first.coeff.is_one() {
            let inv = first.coeff.inv().unwrap();
            for t in v.iter_mut() {
                t.coeff = &t.coeff * &inv;
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Elem {
    v: Vector,
    mask: u64,
    sugar: i64,
    /// Lead is divisible by a later element's lead; kept for pending pairs only.
    redundant: bool,
}

impl Elem {
    fn lead(&self) -> (&Monomial, u32) {
        (&self.v[0].mon, self.v[0].comp)
    }
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    comp: u32,
    sugar: i64,
}

/// Reducer over a fixed list of monic vectors.
pub(crate) struct Reducer<'a> {
    order: ModuleOrder,
    elems: Vec<(&'a [Term], u64)>,
}

impl<'a> Reducer<'a> {
    pub fn new(order: ModuleOrder, basis: &'a [Vector]) -> Reducer<'a> {
        Reducer { order, elems: basis.iter().map(|v| (v.as_slice(), divmask(&v[0].mon))).collect() }
    }

    fn find(&self, m: &Monomial, comp: u32) -> Option<&'a [Term]> {
        let mask = divmask(m);
        self.elems.iter().find(|(g, gm)| g[0].comp == comp && gm & !mask == 0 && g[0].mon.divides(m)).map(|(g, _)| *g)
    }

    /// Full normal form.
    pub fn reduce(&self, f: Vector) -> Vector {
        reduce_with(&self.order, f, |m, c| self.find(m, c))
    }
}

fn reduce_with<'b>(order: &ModuleOrder, mut f: Vector, find: impl Fn(&Monomial, u32) -> Option<&'b [Term]>) -> Vector {
    let mut done: Vector = Vec::new();
    let mut start = 0;
    // `f[..start]` are irreducible terms already moved past.
    loop {
        if start >= f.len() {
            break;
        }
        let t = &f[start];
        match find(&t.mon, t.comp) {
            Some(g) => {
                let q = g[0].mon.quotient_of(&t.mon);
                let c = &t.coeff / &g[0].coeff;
                let tail = sub_mul(order, &f[start..], &c, &q, g);
                f.truncate(start);
                f.extend(tail);
            }
            None => start += 1,
        }
        if start > 64 && start * 2 > f.len() {
            done.extend(f.drain(..start));
            start = 0;
        }
    }
    done.extend(f);
    done
}

/// Reduced Groebner basis, sorted by descending leading term.
pub(crate) fn buchberger(order: ModuleOrder, gens: Vec<Vector>, degrees: &[i64], ideal: bool) -> Vec<Vector> {
    let sugar_of = |v: &Vector| v.iter().map(|t| t.mon.degree() as i64 + degrees[t.comp as usize]).max().unwrap_or(0);
    let mut elems: Vec<Elem> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();

    let mut queue: Vec<Vector> = gens.into_iter().filter(|v| !v.is_empty()).collect();
    queue.sort_by(|a, b| order.cmp(&a[0].mon, a[0].comp, &b[0].mon, b[0].comp));
    for mut v in queue {
        v = reduce_by_elems(&order, v, &elems);
        if v.is_empty() {
            continue;
        }
        make_monic(&mut v);
        let sugar = sugar_of(&v);
        if insert(&mut elems, &mut pairs, v, sugar, ideal) {
            return vec![unit_vector(&elems)];
        }
    }

    while let Some(k) = select_pair(&order, &pairs) {
        let p = pairs.swap_remove(k);
        let s = spoly(&order, &elems[p.i].v, &elems[p.j].v, &p.lcm);
        let mut h = reduce_by_elems(&order, s, &elems);
        if h.is_empty() {
            continue;
        }
        make_monic(&mut h);
        if insert(&mut elems, &mut pairs, h, p.sugar, ideal) {
            return vec![unit_vector(&elems)];
        }
    }
    interreduce(&order, elems.into_iter().filter(|e| !e.redundant).map(|e| e.v).collect())
}

fn unit_vector(elems: &[Elem]) -> Vector {
    elems.last().unwrap().v.clone()
}

fn select_pair(order: &ModuleOrder, pairs: &[Pair]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (k, p) in pairs.iter().enumerate() {
        best = match best {
            None => Some(k),
            Some(b) => {
                let q = &pairs[b];
                let ord = p
                    .sugar
                    .cmp(&q.sugar)
                    .then_with(|| order.cmp(&p.lcm, p.comp, &q.lcm, q.comp))
                    .then_with(|| (p.i, p.j).cmp(&(q.i, q.j)));
                if ord == Ordering::Less {
                    Some(k)
                } else {
                    Some(b)
                }
            }
        };
    }
    best
}

fn spoly(order: &ModuleOrder, f: &[Term], g: &[Term], lcm: &Monomial) -> Vector {
    let mf = f[0].mon.quotient_of(lcm);
    let mg = g[0].mon.quotient_of(lcm);
    let one = Scalar::one(f[0].coeff.field());
    let zero: Vector = Vec::new();
    let a = sub_mul(order, &zero, &-&one, &mf, f);
    sub_mul(order, &a, &one, &mg, g)
}

fn reduce_by_elems(order: &ModuleOrder, f: Vector, elems: &[Elem]) -> Vector {
    let masks: Vec<u64> = elems.iter().map(|e| e.mask).collect();
    reduce_with(order, f, |m, c| {
        let mask = divmask(m);
        elems
            .iter()
            .zip(&masks)
            .find(|(e, em)| !e.redundant && e.v[0].comp == c && *em & !mask == 0 && e.v[0].mon.divides(m))
            .map(|(e, _)| e.v.as_slice())
    })
}

/// Gebauer-Moeller update. Returns true when a unit of an ideal was found.
fn insert(elems: &mut Vec<Elem>, pairs: &mut Vec<Pair>, h: Vector, sugar: i64, ideal: bool) -> bool {
    let hm = h[0].mon;
    let hc = h[0].comp;
    let new = elems.len();
    if ideal && hm.degree() == 0 {
        elems.push(Elem { mask: divmask(&hm), v: h, sugar, redundant: false });
        return true;
    }
    // candidate pairs (g, h) with the same component
    let mut cands: Vec<(usize, Monomial, bool)> = Vec::new();
    for (k, e) in elems.iter().enumerate() {
        if e.redundant {
            continue;
        }
        let (gm, gc) = e.lead();
        if gc != hc {
            continue;
        }
        let coprime = ideal && gm.is_coprime(&hm);
        cands.push((k, gm.lcm(&hm), coprime));
    }

    // criterion M: drop pairs whose lcm is a proper multiple of another new lcm
    let cands: Vec<(usize, Monomial, bool)> =
        cands.iter().filter(|(_, l, _)| !cands.iter().any(|(_, l2, _)| l2 != l && l2.divides(l))).cloned().collect();
    // criterion F: one pair per lcm, none at all if any of them has coprime leads
    let mut keep: Vec<(usize, Monomial, bool)> = Vec::new();
    for (k, l, coprime) in &cands {
        if keep.iter().any(|(_, l2, _)| l2 == l) {
            continue;
        }
        let any_coprime = *coprime || cands.iter().any(|(_, l2, c2)| l2 == l && *c2);
        keep.push((*k, *l, any_coprime));
    }
    let fresh: Vec<Pair> = keep
        .into_iter()
        .filter(|(_, _, coprime)| !coprime)
        .map(|(k, l, _)| {
            let s1 = sugar - hm.degree() as i64 + l.degree() as i64;
            let s2 = elems[k].sugar - elems[k].v[0].mon.degree() as i64 + l.degree() as i64;
            Pair { i: k, j: new, lcm: l, comp: hc, sugar: s1.max(s2) }
        })
        .collect();

    // prune old pairs whose lcm is a proper multiple via h
    pairs.retain(|p| {
        if p.comp != hc || !hm.divides(&p.lcm) {
            return true;
        }
        let li = elems[p.i].v[0].mon.lcm(&hm);
        let lj = elems[p.j].v[0].mon.lcm(&hm);
        li == p.lcm || lj == p.lcm
    });
    pairs.extend(fresh);

    for e in elems.iter_mut() {
        if !e.redundant && e.v[0].comp == hc && hm.divides(&e.v[0].mon) {
            e.redundant = true;
        }
    }
    elems.push(Elem { mask: divmask(&hm), v: h, sugar, redundant: false });
    false
}

fn interreduce(order: &ModuleOrder, mut basis: Vec<Vector>) -> Vec<Vector> {
    // minimal leads
    basis.sort_by(|a, b| order.cmp(&a[0].mon, a[0].comp, &b[0].mon, b[0].comp));
    let mut minimal: Vec<Vector> = Vec::new();
    for v in basis {
        if !minimal.iter().any(|g| g[0].comp == v[0].comp && g[0].mon.divides(&v[0].mon)) {
            minimal.push(v);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<Vector> = minimal.iter().enumerate().filter(|(o, _)| *o != k).map(|(_, v)| v.clone()).collect();
        let red = Reducer::new(*order, &others);
        let head = minimal[k][0].clone();
        let tail = red.reduce(minimal[k][1..].to_vec());
        let mut v = vec![head];
        v.extend(tail);
        make_monic(&mut v);
        out.push(v);
    }
    out.sort_by(|a, b| order.cmp(&b[0].mon, b[0].comp, &a[0].mon, a[0].comp));
    out
}
