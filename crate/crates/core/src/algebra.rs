//! The four-graded sparse tensor algebra `ΛW ⊗ S≤m(V∨) ⊗ ∧V∨ ⊗ ∧V`.
//!
//! Generators: `w_1..w_e` (odd, form degree 1), `v_1..v_d` (even, symmetric
//! slot), `v̄_1..v̄_d` (odd, `∧V∨`), `e_1..e_d` (odd, `∧V`). Monomials are kept
//! in the canonical order `w…  v…  v̄…  e…` with strictly increasing indices
//! inside each odd block; every sign comes from counting transpositions.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest supported `dim V`.
pub const MAX_D: usize = 4;
/// Largest supported `dim W`.
pub const MAX_E: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelConfig {
    pub d: usize,
    pub e: usize,
    pub m: usize,
    #[serde(default)]
    pub seed: u64,
}

impl ModelConfig {
    pub fn new(d: usize, e: usize, m: usize) -> Result<Self> {
        Self::with_seed(d, e, m, 0)
    }

    pub fn with_seed(d: usize, e: usize, m: usize, seed: u64) -> Result<Self> {
        if d == 0 || d > MAX_D {
            return Err(Error::InvalidConfig(format!("d = {d} must lie in 1..={MAX_D}")));
        }
        if e > MAX_E {
            return Err(Error::InvalidConfig(format!("e = {e} must be at most {MAX_E}")));
        }
        if m > u8::MAX as usize {
            return Err(Error::InvalidConfig(format!("m = {m} is too large")));
        }
        Ok(ModelConfig { d, e, m, seed })
    }

    /// Two configurations describe the same algebra (the seed is irrelevant).
    pub fn same_algebra(&self, other: &ModelConfig) -> bool {
        self.d == other.d && self.e == other.e && self.m == other.m
    }

    pub fn check_same(&self, other: &ModelConfig) -> Result<()> {
        if self.same_algebra(other) {
            Ok(())
        } else {
            Err(Error::ConfigMismatch(format!(
                "(d,e,m) = ({},{},{}) vs ({},{},{})",
                self.d, self.e, self.m, other.d, other.e, other.m
            )))
        }
    }

    pub fn top_mask(&self) -> u8 {
        ((1u16 << self.d) - 1) as u8
    }
}

/// A single generator, used to build monomials from words.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// `w_i` in `ΛW` (odd).
    Form(usize),
    /// `v_i` in `S(V∨)` (even).
    Sym(usize),
    /// `v̄_i` in `∧V∨` (odd).
    Covector(usize),
    /// `e_i` in `∧V` (odd).
    Vector(usize),
}

impl Generator {
    pub fn is_odd(&self) -> bool {
        !matches!(self, Generator::Sym(_))
    }
}

/// Canonical basis monomial. Indices are zero-based internally; the JSON
/// interface is one-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub w: u16,
    pub s: [u8; MAX_D],
    pub a: u8,
    pub b: u8,
}

/// Number of pairs `(i ∈ x, j ∈ y)` with `i > j`: the transpositions needed to
/// merge `x·y` into increasing order.
#[inline]
pub(crate) fn merge_inversions(x: u32, y: u32) -> u32 {
    let mut count = 0;
    let mut rest = y;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        count += (x >> (j + 1)).count_ones();
    }
    count
}

impl Monomial {
    pub const ONE: Monomial = Monomial { w: 0, s: [0; MAX_D], a: 0, b: 0 };

    pub fn form(i: usize) -> Self {
        Monomial { w: 1 << i, ..Self::ONE }
    }

    pub fn sym(i: usize) -> Self {
        let mut m = Self::ONE;
        m.s[i] = 1;
        m
    }

    pub fn covector(i: usize) -> Self {
        Monomial { a: 1 << i, ..Self::ONE }
    }

    pub fn vector(i: usize) -> Self {
        Monomial { b: 1 << i, ..Self::ONE }
    }

    pub fn from_masks(w: u16, s: [u8; MAX_D], a: u8, b: u8) -> Self {
        Monomial { w, s, a, b }
    }

    pub fn form_degree(&self) -> usize {
        self.w.count_ones() as usize
    }

    pub fn sym_degree(&self) -> usize {
        self.s.iter().map(|&x| x as usize).sum()
    }

    pub fn covector_degree(&self) -> usize {
        self.a.count_ones() as usize
    }

    pub fn vector_degree(&self) -> usize {
        self.b.count_ones() as usize
    }

    /// Parity in the superalgebra: all of `w`, `v̄`, `e` are odd.
    pub fn parity(&self) -> usize {
        (self.form_degree() + self.covector_degree() + self.vector_degree()) % 2
    }

    /// Total degree of a `K_Tot` element, `q − a`.
    pub fn koszul_degree(&self) -> i64 {
        self.form_degree() as i64 - self.covector_degree() as i64
    }

    /// Degree of the endomorphism represented by this tensor, `q − a + b`.
    pub fn end_degree(&self) -> i64 {
        self.form_degree() as i64 - self.covector_degree() as i64
            + self.vector_degree() as i64
    }

    /// Weight `l + a − b`; preserved by `d_K`, `d_Ǩ`, `P_K`, `P_Ǩ`.
    pub fn weight(&self) -> i64 {
        self.sym_degree() as i64 + self.covector_degree() as i64
            - self.vector_degree() as i64
    }

    /// Product `self · other` with the Koszul sign, or `None` when an odd
    /// generator repeats.
    pub fn mul(&self, other: &Monomial) -> Option<(bool, Monomial)> {
        if self.w & other.w != 0 || self.a & other.a != 0 || self.b & other.b != 0 {
            return None;
        }
        let xa = self.a.count_ones();
        let xb = self.b.count_ones();
        let mut swaps = other.w.count_ones() * (xa + xb);
        swaps += merge_inversions(self.w as u32, other.w as u32);
        swaps += other.a.count_ones() * xb;
        swaps += merge_inversions(self.a as u32, other.a as u32);
        swaps += merge_inversions(self.b as u32, other.b as u32);
        let mut s = self.s;
        for (x, y) in s.iter_mut().zip(other.s.iter()) {
            *x += *y;
        }
        Some((swaps % 2 == 1, Monomial { w: self.w | other.w, s, a: self.a | other.a, b: self.b | other.b }))
    }

    /// Canonicalize a word of generators: returns the sign picked up by
    /// sorting, or `None` if an odd generator repeats.
    pub fn from_word(word: &[Generator]) -> Option<(bool, Monomial)> {
        // Sort key respects the block order w < v < v̄ < e.
        let key = |g: &Generator| match *g {
            Generator::Form(i) => (0, i),
            Generator::Sym(i) => (1, i),
            Generator::Covector(i) => (2, i),
            Generator::Vector(i) => (3, i),
        };
        let odd: Vec<(usize, usize)> = word.iter().filter(|g| g.is_odd()).map(key).collect();
        let mut inversions = 0usize;
        for i in 0..odd.len() {
            for j in i + 1..odd.len() {
                if odd[i] == odd[j] {
                    return None;
                }
                if odd[i] > odd[j] {
                    inversions += 1;
                }
            }
        }
        let mut m = Monomial::ONE;
        for g in word {
            match *g {
                Generator::Form(i) => m.w |= 1 << i,
                Generator::Sym(i) => m.s[i] += 1,
                Generator::Covector(i) => m.a |= 1 << i,
                Generator::Vector(i) => m.b |= 1 << i,
            }
        }
        Some((inversions % 2 == 1, m))
    }

    /// The word of generators in canonical order.
    pub fn to_word(&self) -> Vec<Generator> {
        let mut out = Vec::new();
        out.extend(bits(self.w as u32).map(Generator::Form));
        for (i, &k) in self.s.iter().enumerate() {
            for _ in 0..k {
                out.push(Generator::Sym(i));
            }
        }
        out.extend(bits(self.a as u32).map(Generator::Covector));
        out.extend(bits(self.b as u32).map(Generator::Vector));
        out
    }

    /// Strip the `∧V` block, keeping it aside: `self = rest · e_B`.
    pub fn split_vector(&self) -> (Monomial, u8) {
        (Monomial { b: 0, ..*self }, self.b)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for g in self.to_word() {
            parts.push(match g {
                Generator::Form(i) => format!("w{}", i + 1),
                Generator::Sym(i) => format!("v{}", i + 1),
                Generator::Covector(i) => format!("v̄{}", i + 1),
                Generator::Vector(i) => format!("e{}", i + 1),
            });
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("·"))
        }
    }
}

/// Iterate the set bits of a mask, lowest first.
pub fn bits(mask: u32) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        }
    })
}

/// Sparse ℚ-linear combination of canonical monomials.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedElement {
    config: ModelConfig,
    terms: BTreeMap<Monomial, Rational>,
    overflow: bool,
}

impl fmt::Debug for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({c})·{m:?}")).collect();
        write!(f, "{}", parts.join(" + "))?;
        if self.overflow {
            write!(f, " [overflow]")?;
        }
        Ok(())
    }
}

impl GradedElement {
    pub fn zero(config: ModelConfig) -> Self {
        GradedElement { config, terms: BTreeMap::new(), overflow: false }
    }

    pub fn one(config: ModelConfig) -> Self {
        Self::monomial(config, Monomial::ONE, Rational::one())
    }

    pub fn monomial(config: ModelConfig, mono: Monomial, coeff: Rational) -> Self {
        let mut out = Self::zero(config);
        out.add_term(mono, coeff);
        out
    }

    /// Product of generators in the order given.
    pub fn from_word(config: ModelConfig, word: &[Generator]) -> Self {
        match Monomial::from_word(word) {
            None => Self::zero(config),
            Some((neg, mono)) => {
                let c = if neg { -Rational::one() } else { Rational::one() };
                Self::monomial(config, mono, c)
            }
        }
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mono: &Monomial) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    /// True if some product or differential dropped a term above the
    /// symmetric cutoff `m` while building this element.
    pub fn overflow(&self) -> bool {
        self.overflow
    }

    pub fn mark_overflow(&mut self) {
        self.overflow = true;
    }

    pub fn clear_overflow(mut self) -> Self {
        self.overflow = false;
        self
    }

    /// Accumulate `coeff · mono`, truncating (and flagging) above degree `m`.
    pub fn add_term(&mut self, mono: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        if mono.sym_degree() > self.config.m {
            self.overflow = true;
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_signed(&mut self, mono: Monomial, coeff: &Rational, negate: bool) {
        let c = if negate { -coeff } else { coeff.clone() };
        self.add_term(mono, c);
    }

    pub fn add_assign(&mut self, other: &GradedElement) {
        self.overflow |= other.overflow;
        for (m, c) in &other.terms {
            self.add_term(*m, c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &GradedElement, scale: &Rational) {
        self.overflow |= other.overflow;
        if scale.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(*m, c * scale);
        }
    }

    pub fn add(&self, other: &GradedElement) -> GradedElement {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &GradedElement) -> GradedElement {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one());
        out
    }

    pub fn scale(&self, c: &Rational) -> GradedElement {
        let mut out = GradedElement::zero(self.config);
        out.overflow = self.overflow;
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> GradedElement {
        self.scale(&-Rational::one())
    }

    /// Keep only the terms satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> GradedElement {
        GradedElement {
            config: self.config,
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (*m, c.clone())).collect(),
            overflow: self.overflow,
        }
    }

    /// Apply a linear map given on monomials.
    pub fn map_linear(&self, f: impl Fn(&Monomial, &mut GradedElement)) -> GradedElement {
        let mut out = GradedElement::zero(self.config);
        out.overflow = self.overflow;
        for (m, c) in &self.terms {
            let mut image = GradedElement::zero(self.config);
            f(m, &mut image);
            out.add_scaled(&image, c);
        }
        out
    }

    /// Graded-commutative product.
    pub fn multiply(&self, other: &GradedElement) -> Result<GradedElement> {
        self.config.check_same(&other.config)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &GradedElement) -> GradedElement {
        let mut out = GradedElement::zero(self.config);
        out.overflow = self.overflow || other.overflow;
        for (x, cx) in &self.terms {
            for (y, cy) in &other.terms {
                if let Some((neg, z)) = x.mul(y) {
                    out.add_signed(z, &(cx * cy), neg);
                }
            }
        }
        out
    }

    /// Left multiplication by a single monomial.
    pub fn mul_monomial_left(&self, mono: &Monomial, coeff: &Rational) -> GradedElement {
        let mut out = GradedElement::zero(self.config);
        out.overflow = self.overflow;
        for (y, cy) in &self.terms {
            if let Some((neg, z)) = mono.mul(y) {
                out.add_signed(z, &(coeff * cy), neg);
            }
        }
        out
    }

    /// Every term has parity `p`.
    pub fn is_homogeneous_parity(&self, p: usize) -> bool {
        self.terms.keys().all(|m| m.parity() == p)
    }

    /// Split into even and odd parts.
    pub fn parity_parts(&self) -> [GradedElement; 2] {
        [self.filter(|m| m.parity() == 0), self.filter(|m| m.parity() == 1)]
    }

    pub fn max_sym_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.sym_degree()).max()
    }

    /// Equality of the underlying linear combinations, ignoring the overflow
    /// flag.
    pub fn same_terms(&self, other: &GradedElement) -> bool {
        self.terms == other.terms
    }
}

/// `true` iff every term has symmetric degree strictly below `m`, so one
/// more symmetric-degree-raising step cannot lose information.
pub fn truncation_safe_degree(x: &GradedElement) -> bool {
    let m = x.config().m;
    x.terms().all(|(mono, _)| mono.sym_degree() < m)
}

/// Interior product `ω ⌟ η` of `ω ∈ ΛW ⊗ ∧V∨` into `η ∈ ΛW ⊗ ∧V`.
///
/// Convention: `ω = α·v̄_{i1}…v̄_{ik}` acts as `α · ι(v̄_{ik}) ∘ … ∘ ι(v̄_{i1})`
/// where `ι(v̄_i)` is the odd derivation with `ι(v̄_i) e_j = δ_ij`, vanishing on
/// `w`. Hence `⟨v̄_I, e_J⟩ = δ_IJ` on canonically ordered wedges.
pub fn interior_product(omega: &GradedElement, eta: &GradedElement) -> Result<GradedElement> {
    omega.config().check_same(eta.config())?;
    if omega.terms().any(|(m, _)| m.b != 0) {
        return Err(Error::Precondition("interior product: ω must have no ∧V factor".into()));
    }
    if eta.terms().any(|(m, _)| m.a != 0 || m.sym_degree() != 0) {
        return Err(Error::Precondition(
            "interior product: η must lie in ΛW ⊗ ∧V".into(),
        ));
    }
    let cfg = *omega.config();
    let mut out = GradedElement::zero(cfg);
    for (om, oc) in omega.terms() {
        let alpha = Monomial { a: 0, ..*om };
        for (em, ec) in eta.terms() {
            if let Some((neg, rest)) = contract_vectors(om.a, em) {
                if let Some((neg2, z)) = alpha.mul(&rest) {
                    out.add_signed(z, &(oc * ec), neg ^ neg2);
                }
            }
        }
    }
    Ok(out)
}

/// Apply `ι(v̄_{i_k}) ∘ … ∘ ι(v̄_{i_1})` (indices from `covectors`, lowest
/// first) to a monomial without `v̄` factors.
pub(crate) fn contract_vectors(covectors: u8, eta: &Monomial) -> Option<(bool, Monomial)> {
    let mut cur = *eta;
    let mut neg = false;
    for i in bits(covectors as u32) {
        if cur.b & (1 << i) == 0 {
            return None;
        }
        // Pass the w block, then the e's below i.
        let below = (cur.b & ((1u8 << i) - 1)).count_ones();
        let swaps = cur.w.count_ones() + below;
        neg ^= swaps % 2 == 1;
        cur.b &= !(1 << i);
    }
    Some((neg, cur))
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermRecord {
    pub w: Vec<usize>,
    pub s: Vec<usize>,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Rational,
}

impl GradedElement {
    /// One record per term, indices one-based.
    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut s = Vec::new();
                for (i, &k) in m.s.iter().enumerate() {
                    for _ in 0..k {
                        s.push(i + 1);
                    }
                }
                TermRecord {
                    w: bits(m.w as u32).map(|i| i + 1).collect(),
                    s,
                    a: bits(m.a as u32).map(|i| i + 1).collect(),
                    b: bits(m.b as u32).map(|i| i + 1).collect(),
                    c: c.clone(),
                }
            })
            .collect()
    }

    /// Build from records; the index lists may be in any order and are
    /// canonicalized with the matching sign.
    pub fn from_records(config: ModelConfig, records: &[TermRecord]) -> Result<GradedElement> {
        let mut out = GradedElement::zero(config);
        for r in records {
            let mut word = Vec::new();
            let check = |i: usize, n: usize, what: &str| -> Result<usize> {
                if i == 0 || i > n {
                    Err(Error::Parse(format!("{what} index {i} outside 1..={n}")))
                } else {
                    Ok(i - 1)
                }
            };
            for &i in &r.w {
                word.push(Generator::Form(check(i, config.e, "w")?));
            }
            for &i in &r.s {
                word.push(Generator::Sym(check(i, config.d, "s")?));
            }
            for &i in &r.a {
                word.push(Generator::Covector(check(i, config.d, "a")?));
            }
            for &i in &r.b {
                word.push(Generator::Vector(check(i, config.d, "b")?));
            }
            if let Some((neg, mono)) = Monomial::from_word(&word) {
                if mono.sym_degree() > config.m {
                    return Err(Error::Parse(format!(
                        "term has symmetric degree {} above the cutoff m = {}",
                        mono.sym_degree(),
                        config.m
                    )));
                }
                out.add_signed(mono, &r.c, neg);
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_records()).expect("records serialize")
    }

    pub fn from_json(config: ModelConfig, json: &str) -> Result<GradedElement> {
        let records: Vec<TermRecord> = serde_json::from_str(json)?;
        Self::from_records(config, &records)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Generator::*;

    fn cfg(d: usize, e: usize, m: usize) -> ModelConfig {
        ModelConfig::new(d, e, m).unwrap()
    }

    fn gen(c: ModelConfig, g: Generator) -> GradedElement {
        GradedElement::from_word(c, &[g])
    }

    #[test]
    fn odd_forms_anticommute() {
        let c = cfg(2, 2, 2);
        let w1 = gen(c, Form(0));
        let w2 = gen(c, Form(1));
        let w12 = GradedElement::from_word(c, &[Form(0), Form(1)]);
        assert_eq!(w1.multiply(&w2).unwrap(), w12);
        assert_eq!(w2.multiply(&w1).unwrap(), w12.neg());
        assert_eq!(w12.coeff(&Monomial::from_masks(0b11, [0; MAX_D], 0, 0)), Rational::one());
    }

    #[test]
    fn symmetric_generators_commute() {
        let c = cfg(2, 0, 2);
        let v1 = gen(c, Sym(0));
        let sq = v1.multiply(&v1).unwrap();
        let mut mono = Monomial::ONE;
        mono.s[0] = 2;
        assert_eq!(sq, GradedElement::monomial(c, mono, Rational::one()));
    }

    #[test]
    fn odd_square_vanishes() {
        let c = cfg(2, 0, 2);
        let vb = gen(c, Covector(0));
        assert!(vb.multiply(&vb).unwrap().is_zero());
    }

    #[test]
    fn truncation_sets_overflow() {
        let c = cfg(1, 0, 1);
        let v = gen(c, Sym(0));
        let sq = v.multiply(&v).unwrap();
        assert!(sq.is_zero());
        assert!(sq.overflow());
    }

    #[test]
    fn config_mismatch_is_an_error() {
        let x = GradedElement::one(cfg(1, 1, 1));
        let y = GradedElement::one(cfg(2, 1, 1));
        assert!(matches!(x.multiply(&y), Err(Error::ConfigMismatch(_))));
    }

    #[test]
    fn truncation_safe_degree_examples() {
        let c = cfg(2, 1, 3);
        assert!(truncation_safe_degree(&gen(c, Sym(0))));
        let s3 = GradedElement::from_word(c, &[Sym(0), Sym(1), Sym(1)]);
        assert!(!truncation_safe_degree(&s3));
        let c0 = cfg(2, 1, 0);
        assert!(!truncation_safe_degree(&GradedElement::one(c0)));
        assert!(truncation_safe_degree(&GradedElement::zero(c0)));
    }

    #[test]
    fn interior_product_examples() {
        let c = cfg(2, 1, 2);
        let top_dual = GradedElement::from_word(c, &[Covector(0), Covector(1)]);
        let top = GradedElement::from_word(c, &[Vector(0), Vector(1)]);
        assert_eq!(interior_product(&top_dual, &top).unwrap(), GradedElement::one(c));
        assert_eq!(interior_product(&GradedElement::one(c), &top).unwrap(), top);
        let e2 = gen(c, Vector(1));
        assert_eq!(interior_product(&gen(c, Covector(0)), &top).unwrap(), e2);
        // v̄₂ ⌟ e₁e₂ = −e₁ (e₂ sits in the second slot).
        assert_eq!(interior_product(&gen(c, Covector(1)), &top).unwrap(), gen(c, Vector(0)).neg());
    }

    #[test]
    fn interior_product_rejects_bad_shapes() {
        let c = cfg(2, 1, 2);
        let e1 = gen(c, Vector(0));
        assert!(interior_product(&e1, &e1).is_err());
        let v = gen(c, Sym(0));
        assert!(interior_product(&GradedElement::one(c), &v).is_err());
    }

    #[test]
    fn json_roundtrip_and_format() {
        let c = cfg(2, 2, 2);
        let x = GradedElement::from_word(c, &[Form(1), Form(0), Sym(0), Covector(1), Vector(0)])
            .scale(&Rational::new(3, 4));
        let json = x.to_json();
        assert_eq!(json, r#"[{"w":[1,2],"s":[1],"a":[2],"b":[1],"c":"-3/4"}]"#);
        assert_eq!(GradedElement::from_json(c, &json).unwrap(), x);
        assert!(GradedElement::from_json(c, r#"[{"w":[3],"s":[],"a":[],"b":[],"c":"1/1"}]"#).is_err());
    }
}
