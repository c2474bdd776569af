//! Hilbert series of quotients by monomial ideals and monomial submodules.

use serde::{Deserialize, Serialize};

use crate::poly::{binomial, Monomial};

/// `HS(z) = z^offset * (sum_k numerator[k] z^k) / (1 - z)^nvars`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertSeries {
    pub nvars: usize,
    pub offset: i64,
    pub numerator: Vec<i128>,
}

impl HilbertSeries {
    pub fn new(nvars: usize, offset: i64, numerator: Vec<i128>) -> HilbertSeries {
        let mut hs = HilbertSeries { nvars, offset, numerator };
        hs.normalize();
        hs
    }

    fn normalize(&mut self) {
        while self.numerator.last() == Some(&0) {
            self.numerator.pop();
        }
        let lead_zeros = self.numerator.iter().take_while(|&&c| c == 0).count();
        if lead_zeros == self.numerator.len() {
            self.numerator.clear();
            self.offset = 0;
            return;
        }
        self.numerator.drain(..lead_zeros);
        self.offset += lead_zeros as i64;
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_empty()
    }

    /// Dimension of the degree-`d` piece.
    pub fn hf(&self, d: i64) -> i128 {
        let mut acc = 0i128;
        for (k, &c) in self.numerator.iter().enumerate() {
            let e = d - self.offset - k as i64;
            if e < 0 || c == 0 {
                continue;
            }
            let b = if self.nvars == 0 {
                (e == 0) as u128
            } else {
                binomial(self.nvars as u64 - 1 + e as u64, self.nvars as u64 - 1)
            };
            acc += c * b as i128;
        }
        acc
    }

    /// Writes the series as `z^offset * q(z) / (1-z)^dim` with `q(1) != 0`.
    pub fn reduced(&self) -> ReducedSeries {
        let mut q = self.numerator.clone();
        let mut dim = self.nvars;
        while dim > 0 && !q.is_empty() && q.iter().sum::<i128>() == 0 {
            // synthetic division by (1 - z): q = (1-z) r, r_k = sum_{i<=k} q_i
            let mut r = Vec::with_capacity(q.len() - 1);
            let mut acc = 0i128;
            for &c in &q[..q.len() - 1] {
                acc += c;
                r.push(acc);
            }
            q = r;
            dim -= 1;
        }
        ReducedSeries { offset: self.offset, numerator: q, dim }
    }

    /// Krull dimension of the module; `None` for the zero module.
    pub fn krull_dim(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.reduced().dim)
        }
    }

    /// Multiplicity `q(1)` of the reduced form.
    pub fn multiplicity(&self) -> i128 {
        self.reduced().numerator.iter().sum()
    }

    /// Sum of two series over the same ring.
    pub fn add(&self, other: &HilbertSeries) -> HilbertSeries {
        assert_eq!(self.nvars, other.nvars);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let off = self.offset.min(other.offset);
        let len = (self.offset + self.numerator.len() as i64).max(other.offset + other.numerator.len() as i64) - off;
        let mut num = vec![0i128; len as usize];
        for (k, &c) in self.numerator.iter().enumerate() {
            num[(self.offset - off) as usize + k] += c;
        }
        for (k, &c) in other.numerator.iter().enumerate() {
            num[(other.offset - off) as usize + k] += c;
        }
        HilbertSeries::new(self.nvars, off, num)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedSeries {
    pub offset: i64,
    pub numerator: Vec<i128>,
    pub dim: usize,
}

/// Numerator of the Hilbert series of `K[x]/(gens)` over `(1-z)^nvars`.
pub fn monomial_ideal_numerator(gens: &[Monomial]) -> Vec<i128> {
    numerator_rec(minimalize(gens.to_vec()))
}

fn minimalize(mut gens: Vec<Monomial>) -> Vec<Monomial> {
    gens.sort_by_key(|m| m.degree());
    gens.dedup();
    let mut out: Vec<Monomial> = Vec::with_capacity(gens.len());
    for g in gens {
        if !out.iter().any(|h| h.divides(&g)) {
            out.push(g);
        }
    }
    out
}

fn poly_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn one_minus_zd(d: u32) -> Vec<i128> {
    let mut v = vec![0i128; d as usize + 1];
    v[0] += 1;
    v[d as usize] -= 1;
    v
}

fn numerator_rec(gens: Vec<Monomial>) -> Vec<i128> {
    if gens.is_empty() {
        return vec![1];
    }
    if gens.iter().any(|g| g.degree() == 0) {
        return Vec::new();
    }
    let nvars = gens[0].nvars();
    let mut count = vec![0usize; nvars];
    let mut pairwise_coprime = true;
    let mut seen = vec![false; nvars];
    for g in &gens {
        for (v, c) in count.iter_mut().enumerate() {
            if g.exp(v) > 0 {
                *c += 1;
                if seen[v] {
                    pairwise_coprime = false;
                }
                seen[v] = true;
            }
        }
    }
    if pairwise_coprime {
        return gens.iter().fold(vec![1], |acc, g| poly_mul(&acc, &one_minus_zd(g.degree())));
    }
    let v = (0..nvars).max_by_key(|&v| (count[v], std::cmp::Reverse(v))).unwrap();
    let mut exps: Vec<u32> = gens.iter().map(|g| g.exp(v)).filter(|&e| e > 0).collect();
    exps.sort_unstable();
    let mut e = exps[exps.len() / 2];
    // keep the pivot outside the ideal
    if let Some(a) = gens.iter().filter(|g| g.degree() == g.exp(v) && g.exp(v) > 0).map(|g| g.exp(v)).min() {
        if e >= a {
            e = a - 1;
        }
    }
    let pivot = Monomial::one(nvars).with_exp(v, e);

    let mut with_pivot = gens.clone();
    with_pivot.push(pivot);
    let sum = numerator_rec(minimalize(with_pivot));

    let colon: Vec<Monomial> = gens.iter().map(|g| g.with_exp(v, g.exp(v).saturating_sub(e))).collect();
    let quot = numerator_rec(minimalize(colon));

    let mut out = sum;
    let shifted_len = quot.len() + e as usize;
    if out.len() < shifted_len {
        out.resize(shifted_len, 0);
    }
    for (k, &c) in quot.iter().enumerate() {
        out[k + e as usize] += c;
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// Series of `(+)_i S(-degrees[i]) / L` where `leads[i]` generate the lead module in component `i`.
pub fn module_series(nvars: usize, degrees: &[i64], leads: &[Vec<Monomial>]) -> HilbertSeries {
    let mut total = HilbertSeries::new(nvars, 0, Vec::new());
    for (i, &d) in degrees.iter().enumerate() {
        let num = numerator_rec(minimalize(leads[i].clone()));
        total = total.add(&HilbertSeries::new(nvars, d, num));
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::from_exponents(e)
    }

    fn brute_count(nvars: usize, gens: &[Monomial], d: i64) -> i128 {
        crate::poly::monomials_of_degree(nvars, d).iter().filter(|x| !gens.iter().any(|g| g.divides(x))).count() as i128
    }

    #[test]
    fn zero_ideal_and_maximal_ideal() {
        let hs = HilbertSeries::new(4, 0, monomial_ideal_numerator(&[]));
        assert_eq!(hs.hf(2), 10);
        let maxi: Vec<Monomial> = (0..4).map(|i| Monomial::var(4, i)).collect();
        let num = monomial_ideal_numerator(&maxi);
        assert_eq!(num, vec![1, -4, 6, -4, 1]);
        let hs = HilbertSeries::new(4, 0, num);
        assert_eq!((hs.hf(0), hs.hf(1), hs.hf(5)), (1, 0, 0));
        assert_eq!(hs.krull_dim(), Some(0));
    }

    #[test]
    fn matches_brute_force_counts() {
        let gens = vec![m(&[2, 1, 0]), m(&[0, 3, 1]), m(&[1, 1, 1]), m(&[0, 0, 4]), m(&[3, 0, 0])];
        let hs = HilbertSeries::new(3, 0, monomial_ideal_numerator(&gens));
        for d in 0..12 {
            assert_eq!(hs.hf(d), brute_count(3, &gens, d), "degree {d}");
        }
    }

    #[test]
    fn reduced_form_detects_dimension() {
        // K[x0,x1,x2]/(x0, x1): one-dimensional, multiplicity one
        let hs = HilbertSeries::new(3, 0, monomial_ideal_numerator(&[m(&[1, 0, 0]), m(&[0, 1, 0])]));
        let r = hs.reduced();
        assert_eq!((r.dim, r.numerator.clone()), (1, vec![1]));
        assert_eq!(hs.multiplicity(), 1);
    }
}
