//! Exact sparse matrices over ℚ and indexed monomial bases.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{GradedElement, ModelConfig, Monomial};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Column-major sparse matrix. Each column stores only nonzero entries.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: Vec<BTreeMap<usize, Rational>>,
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseMatrix {}x{} ({} nonzeros)", self.rows, self.ncols(), self.nnz())
    }
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols: vec![BTreeMap::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for (i, col) in m.cols.iter_mut().enumerate() {
            col.insert(i, Rational::one());
        }
        m
    }

    pub fn from_columns(rows: usize, cols: Vec<BTreeMap<usize, Rational>>) -> Self {
        let cols = cols
            .into_iter()
            .map(|c| c.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        SparseMatrix { rows, cols }
    }

    /// Build from a dense row-major table (test convenience).
    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zero(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.cols[j].get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        assert!(i < self.rows, "row index out of range");
        if v.is_zero() {
            self.cols[j].remove(&i);
        } else {
            self.cols[j].insert(i, v);
        }
    }

    pub fn column(&self, j: usize) -> &BTreeMap<usize, Rational> {
        &self.cols[j]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.cols.iter().enumerate().flat_map(|(j, c)| c.iter().map(move |(i, v)| (*i, j, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    fn check_same_shape(&self, other: &SparseMatrix) -> Result<()> {
        if self.rows != other.rows || self.ncols() != other.ncols() {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows,
                self.ncols(),
                other.rows,
                other.ncols()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.check_same_shape(other)?;
        Ok(self.add_scaled(other, &Rational::one()))
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.check_same_shape(other)?;
        Ok(self.add_scaled(other, &-Rational::one()))
    }

    fn add_scaled(&self, other: &SparseMatrix, s: &Rational) -> SparseMatrix {
        let mut out = self.clone();
        for (j, col) in other.cols.iter().enumerate() {
            for (i, v) in col {
                add_entry(&mut out.cols[j], *i, &(v * s));
            }
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> SparseMatrix {
        if s.is_zero() {
            return Self::zero(self.rows, self.ncols());
        }
        SparseMatrix {
            rows: self.rows,
            cols: self.cols.iter().map(|c| c.iter().map(|(i, v)| (*i, v * s)).collect()).collect(),
        }
    }

    pub fn neg(&self) -> SparseMatrix {
        self.scale(&-Rational::one())
    }

    /// `self · other`. Columns are computed independently (in parallel); the
    /// result does not depend on the thread count.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.ncols() != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.ncols(),
                other.rows,
                other.ncols()
            )));
        }
        let cols: Vec<BTreeMap<usize, Rational>> =
            other.cols.par_iter().map(|col| self.apply_sparse(col)).collect();
        Ok(SparseMatrix { rows: self.rows, cols })
    }

    /// `self · v` for a sparse column vector.
    pub fn apply_sparse(&self, v: &BTreeMap<usize, Rational>) -> BTreeMap<usize, Rational> {
        let mut acc = BTreeMap::new();
        for (k, bk) in v {
            for (i, a) in &self.cols[*k] {
                add_entry(&mut acc, *i, &(a * bk));
            }
        }
        acc
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut out = Self::zero(self.ncols(), self.rows);
        for (i, j, v) in self.entries() {
            out.cols[i].insert(j, v.clone());
        }
        out
    }

    /// Restrict to the given columns (in order).
    pub fn select_columns(&self, cols: &[usize]) -> SparseMatrix {
        SparseMatrix { rows: self.rows, cols: cols.iter().map(|&j| self.cols[j].clone()).collect() }
    }

    /// Smallest `k ≤ bound` with `self^k = 0`, if any.
    pub fn nilpotency_index(&self, bound: usize) -> Result<Option<usize>> {
        if self.rows != self.ncols() {
            return Err(Error::Dimension("nilpotency of a non-square matrix".into()));
        }
        let mut power = Self::identity(self.rows);
        for k in 0..=bound {
            if power.is_zero() {
                return Ok(Some(k));
            }
            power = self.mul(&power)?;
        }
        Ok(None)
    }

    /// Every nonzero entry maps degree `from[j]` to degree `from[j] + shift`.
    pub fn has_degree(&self, from: &[i64], to: &[i64], shift: i64) -> bool {
        self.entries().all(|(i, j, _)| to[i] - from[j] == shift)
    }

    /// Exact rank by Gaussian elimination over ℚ.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); self.rows];
        for (i, j, v) in self.entries() {
            rows[i].insert(j, v.clone());
        }
        let mut pivots: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
        let mut rank = 0;
        for mut row in rows {
            loop {
                let Some((&lead, lv)) = row.iter().next() else { break };
                match pivots.get(&lead) {
                    Some(p) => {
                        let factor = lv / &p[&lead];
                        for (c, pv) in p {
                            add_entry(&mut row, *c, &-(pv * &factor));
                        }
                    }
                    None => {
                        pivots.insert(lead, row);
                        rank += 1;
                        break;
                    }
                }
            }
        }
        rank
    }
}

pub(crate) fn add_entry(col: &mut BTreeMap<usize, Rational>, i: usize, v: &Rational) {
    if v.is_zero() {
        return;
    }
    match col.entry(i) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(v.clone());
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += v;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Ordered list of monomials with reverse lookup.
#[derive(Clone, Debug)]
pub struct Basis {
    config: ModelConfig,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl Basis {
    pub fn new(config: ModelConfig, mut monomials: Vec<Monomial>) -> Self {
        monomials.sort();
        monomials.dedup();
        let index = monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        Basis { config, monomials, index }
    }

    /// All monomials of the truncated algebra satisfying `keep`.
    pub fn enumerate(config: ModelConfig, keep: impl Fn(&Monomial) -> bool) -> Self {
        let mut out = Vec::new();
        let d = config.d;
        let mut sym = Vec::new();
        sym_exponents(d, config.m, &mut vec![0u8; d], 0, &mut sym);
        for w in 0..(1u32 << config.e) {
            for s in &sym {
                for a in 0..(1u32 << d) {
                    for b in 0..(1u32 << d) {
                        let mut mono = Monomial::ONE;
                        mono.w = w as u16;
                        mono.s[..d].copy_from_slice(s);
                        mono.a = a as u8;
                        mono.b = b as u8;
                        if keep(&mono) {
                            out.push(mono);
                        }
                    }
                }
            }
        }
        Basis::new(config, out)
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn get(&self, i: usize) -> Monomial {
        self.monomials[i]
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn element(&self, i: usize) -> GradedElement {
        GradedElement::monomial(self.config, self.monomials[i], Rational::one())
    }

    /// Coordinates of `x`; fails if `x` leaves the basis span.
    pub fn coordinates(&self, x: &GradedElement) -> Result<BTreeMap<usize, Rational>> {
        let mut out = BTreeMap::new();
        for (m, c) in x.terms() {
            let i = self.index_of(m).ok_or_else(|| {
                Error::Dimension(format!("monomial {m:?} is outside the basis"))
            })?;
            out.insert(i, c.clone());
        }
        Ok(out)
    }

    pub fn from_coordinates(&self, v: &BTreeMap<usize, Rational>) -> GradedElement {
        let mut out = GradedElement::zero(self.config);
        for (i, c) in v {
            out.add_term(self.monomials[*i], c.clone());
        }
        out
    }

    /// Matrix of a linear map given on basis monomials. Image terms outside
    /// `target` are dropped when `project` is true, otherwise an error.
    pub fn matrix_of<F>(&self, target: &Basis, project: bool, f: F) -> Result<SparseMatrix>
    where
        F: Fn(&Monomial) -> Result<GradedElement> + Sync,
    {
        let cols: Result<Vec<BTreeMap<usize, Rational>>> = self
            .monomials
            .par_iter()
            .map(|m| {
                let image = f(m)?;
                let mut col = BTreeMap::new();
                for (mm, c) in image.terms() {
                    match target.index_of(mm) {
                        Some(i) => {
                            col.insert(i, c.clone());
                        }
                        None if project => {}
                        None => {
                            return Err(Error::Dimension(format!(
                                "image monomial {mm:?} is outside the target basis"
                            )))
                        }
                    }
                }
                Ok(col)
            })
            .collect();
        Ok(SparseMatrix::from_columns(target.len(), cols?))
    }

    /// Indices of basis elements satisfying `keep`.
    pub fn indices_where(&self, keep: impl Fn(&Monomial) -> bool) -> Vec<usize> {
        (0..self.len()).filter(|&i| keep(&self.monomials[i])).collect()
    }
}

fn sym_exponents(d: usize, budget: usize, cur: &mut Vec<u8>, pos: usize, out: &mut Vec<Vec<u8>>) {
    if pos == d {
        out.push(cur.clone());
        return;
    }
    for k in 0..=budget {
        cur[pos] = k as u8;
        sym_exponents(d, budget - k, cur, pos + 1, out);
    }
    cur[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn product_and_identity() {
        let a = SparseMatrix::from_dense(&[vec![r(1), r(2)], vec![r(0), r(1)]]);
        let b = SparseMatrix::from_dense(&[vec![r(1), r(-2)], vec![r(0), r(1)]]);
        assert_eq!(a.mul(&b).unwrap(), SparseMatrix::identity(2));
        assert_eq!(a.mul(&SparseMatrix::identity(2)).unwrap(), a);
        assert!(a.mul(&SparseMatrix::zero(3, 1)).is_err());
    }

    #[test]
    fn nilpotency_and_rank() {
        let n = SparseMatrix::from_dense(&[
            vec![r(0), r(1), r(0)],
            vec![r(0), r(0), r(1)],
            vec![r(0), r(0), r(0)],
        ]);
        assert_eq!(n.nilpotency_index(5).unwrap(), Some(3));
        assert_eq!(n.rank(), 2);
        assert_eq!(SparseMatrix::identity(3).nilpotency_index(5).unwrap(), None);
        let singular = SparseMatrix::from_dense(&[vec![r(1), r(2)], vec![r(2), r(4)]]);
        assert_eq!(singular.rank(), 1);
    }

    #[test]
    fn basis_counts() {
        let c = ModelConfig::new(2, 1, 2).unwrap();
        // 2 (w) × 6 (S≤2 in 2 vars) × 4 (∧V∨)
        let k = Basis::enumerate(c, |m| m.b == 0);
        assert_eq!(k.len(), 48);
        let x = k.element(5);
        let coords = k.coordinates(&x).unwrap();
        assert_eq!(k.from_coordinates(&coords), x);
    }
}
