//! `End(K_Tot)` in its tensor form `ΛW ⊗ S(V∨) ⊗ ∧V∨ ⊗ ∧V`, the differential
//! `d_Hom`, and the two contractions `(π_T, i_H, P_T)`, `(π_GV, i_H, P_GV)`
//! onto `ΛW ⊗ ∧V`.
//!
//! A tensor `A·e_J` (with `A ∈ ΛW ⊗ S ⊗ ∧V∨`) acts by full pairing: it sends
//! `v̄_J` to `ε_b·A` (`b = |J|`, `ε_b = (−1)^{b(b−1)/2}`) and kills every other
//! `v̄_I`. Endomorphisms are `ΛW ⊗ S`-linear in the graded sense, so
//! `f(w_X s v̄_I) = (−1)^{|f||X|} w_X s f(v̄_I)`, and a map is recovered from its
//! values on the `2^d` generators `v̄_I` as `f = Σ_I ε_{|I|} f(v̄_I)·e_I`.

use std::collections::BTreeMap;

use num_traits::One;

use crate::algebra::{bits, GradedElement, ModelConfig, Monomial};
use crate::error::{Error, Result};
use crate::koszul::{apply_terms, d_k_terms, d_kcheck_terms, p_k_terms, p_kcheck_terms};
use crate::rational::Rational;
use crate::sparse::{Basis, SparseMatrix};

/// `ε_b = (−1)^{b(b−1)/2}`, the pairing `⟨e_J, v̄_J⟩` under full contraction.
pub fn epsilon(b: usize) -> Rational {
    Rational::sign(b * b.saturating_sub(1) / 2)
}

/// `ι_J(v̄_I)` for `ι_J = ι_{j_1} ∘ … ∘ ι_{j_b}` (the highest index acts
/// first). Returns `None` unless `J ⊆ I`.
pub fn iota(j_mask: u8, i_mask: u8) -> Option<(bool, u8)> {
    if j_mask & !i_mask != 0 {
        return None;
    }
    let mut cur = i_mask;
    let mut neg = false;
    let js: Vec<usize> = bits(j_mask as u32).collect();
    for &j in js.iter().rev() {
        let below = (cur & ((1u8 << j) - 1)).count_ones();
        neg ^= below % 2 == 1;
        cur &= !(1 << j);
    }
    Some((neg, cur))
}

/// `ΛW ⊗ S`-linear endomorphism of `K_Tot` in tensor form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EndElement {
    value: GradedElement,
}

impl EndElement {
    pub fn new(value: GradedElement) -> Self {
        EndElement { value }
    }

    pub fn zero(config: ModelConfig) -> Self {
        EndElement { value: GradedElement::zero(config) }
    }

    pub fn value(&self) -> &GradedElement {
        &self.value
    }

    pub fn into_value(self) -> GradedElement {
        self.value
    }

    pub fn config(&self) -> &ModelConfig {
        self.value.config()
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn add(&self, other: &EndElement) -> EndElement {
        EndElement::new(self.value.add(&other.value))
    }

    pub fn sub(&self, other: &EndElement) -> EndElement {
        EndElement::new(self.value.sub(&other.value))
    }

    pub fn scale(&self, c: &Rational) -> EndElement {
        EndElement::new(self.value.scale(c))
    }

    /// The identity `Σ_I ε_{|I|} v̄_I e_I`.
    pub fn identity(config: ModelConfig) -> EndElement {
        EndElement::from_generator_values(config, |i_mask| {
            GradedElement::monomial(config, Monomial { a: i_mask, ..Monomial::ONE }, Rational::one())
        })
    }

    /// Assemble `Σ_I ε_{|I|} F(v̄_I) e_I` from the values on generators.
    pub fn from_generator_values(config: ModelConfig, f: impl Fn(u8) -> GradedElement) -> EndElement {
        let mut out = GradedElement::zero(config);
        for i_mask in 0..(1u16 << config.d) {
            let i_mask = i_mask as u8;
            let img = f(i_mask);
            if img.overflow() {
                out.mark_overflow();
            }
            let eps = epsilon(i_mask.count_ones() as usize);
            for (m, c) in img.terms() {
                debug_assert_eq!(m.b, 0);
                out.add_term(Monomial { b: i_mask, ..*m }, c * &eps);
            }
        }
        EndElement::new(out)
    }

    /// `f(v̄_I)`.
    pub fn on_generator(&self, i_mask: u8) -> GradedElement {
        let eps = epsilon(i_mask.count_ones() as usize);
        let mut out = GradedElement::zero(*self.config());
        for (m, c) in self.value.terms() {
            if m.b == i_mask {
                out.add_term(Monomial { b: 0, ..*m }, c * &eps);
            }
        }
        out
    }

    /// Split into `(b-mask → (A, coefficient))` blocks for fast application.
    fn blocks(&self) -> BTreeMap<u8, Vec<(Monomial, Rational)>> {
        let mut out: BTreeMap<u8, Vec<(Monomial, Rational)>> = BTreeMap::new();
        for (m, c) in self.value.terms() {
            out.entry(m.b).or_default().push((Monomial { b: 0, ..*m }, c.clone()));
        }
        out
    }
}

/// Evaluate `f` on `x ∈ K_Tot`.
pub fn apply_end(f: &EndElement, x: &GradedElement) -> Result<GradedElement> {
    f.config().check_same(x.config())?;
    if x.terms().any(|(m, _)| m.b != 0) {
        return Err(Error::Precondition("applyEnd: argument must lie in K_Tot".into()));
    }
    Ok(apply_blocks(&f.blocks(), x))
}

fn apply_blocks(blocks: &BTreeMap<u8, Vec<(Monomial, Rational)>>, x: &GradedElement) -> GradedElement {
    let mut out = GradedElement::zero(*x.config());
    if x.overflow() {
        out.mark_overflow();
    }
    for (m, c) in x.terms() {
        let Some(block) = blocks.get(&m.a) else { continue };
        let eps = epsilon(m.a.count_ones() as usize);
        let prefix = Monomial { a: 0, ..*m };
        let q = m.form_degree();
        for (amono, ac) in block {
            // parity of the tensor term A·e_I
            let parity = amono.parity() + m.covector_degree();
            let mut coeff = c * ac * &eps;
            if parity % 2 == 1 && q % 2 == 1 {
                coeff = -coeff;
            }
            if let Some((neg, z)) = prefix.mul(amono) {
                out.add_signed(z, &coeff, neg);
            }
        }
    }
    out
}

/// Composition `f ∘ g`.
pub fn compose(f: &EndElement, g: &EndElement) -> Result<EndElement> {
    f.config().check_same(g.config())?;
    let blocks = f.blocks();
    let config = *f.config();
    Ok(EndElement::from_generator_values(config, |i_mask| apply_blocks(&blocks, &g.on_generator(i_mask))))
}

/// The End element given by an arbitrary `ΛW ⊗ S`-linear operator on `K_Tot`.
pub fn from_operator(config: ModelConfig, op: impl Fn(&GradedElement) -> GradedElement) -> EndElement {
    EndElement::from_generator_values(config, |i_mask| {
        op(&GradedElement::monomial(config, Monomial { a: i_mask, ..Monomial::ONE }, Rational::one()))
    })
}

/// `δ = (−1)^{a−q}` for a tensor monomial.
fn delta(m: &Monomial) -> Rational {
    Rational::sign(m.covector_degree() + m.form_degree())
}

fn d_k_tensor(x: &GradedElement) -> GradedElement {
    apply_terms(x, d_k_terms)
}

/// `δ · d_Ǩ` acting on the `∧V` factor.
fn delta_d_kcheck(x: &GradedElement) -> GradedElement {
    let d = x.config().d;
    apply_terms(x, |m| {
        let s = delta(m);
        d_kcheck_terms(m, d).into_iter().map(|(c, y)| (c * &s, y)).collect()
    })
}

fn p_k_tensor(x: &GradedElement) -> GradedElement {
    apply_terms(x, p_k_terms)
}

/// `δ · P_Ǩ`.
fn delta_p_kcheck(x: &GradedElement) -> GradedElement {
    let d = x.config().d;
    apply_terms(x, |m| {
        let s = delta(m);
        p_kcheck_terms(m, d).into_iter().map(|(c, y)| (c * &s, y)).collect()
    })
}

/// `d_Hom f = d_K f + δ d_Ǩ f` with `δ = (−1)^{a−q}` per monomial.
pub fn d_hom(f: &EndElement) -> EndElement {
    EndElement::new(d_k_tensor(&f.value).add(&delta_d_kcheck(&f.value)))
}

/// `d_K` as an End element.
pub fn d_k_end(config: ModelConfig) -> EndElement {
    from_operator(config, d_k_tensor)
}

/// `d_K ∘ f − (−1)^{|f|} f ∘ d_K`, computed by composing operators. `f` must
/// have homogeneous parity.
pub fn d_hom_operator(f: &EndElement) -> Result<EndElement> {
    let parity = homogeneous_parity(f.value())?;
    let dk = d_k_end(*f.config());
    let left = compose(&dk, f)?;
    let right = compose(f, &dk)?;
    Ok(if parity == 0 { left.sub(&right) } else { left.add(&right) })
}

pub(crate) fn homogeneous_parity(x: &GradedElement) -> Result<usize> {
    let mut parity = None;
    for (m, _) in x.terms() {
        match parity {
            None => parity = Some(m.parity()),
            Some(p) if p != m.parity() => {
                return Err(Error::Precondition("element has mixed parity".into()))
            }
            _ => {}
        }
    }
    Ok(parity.unwrap_or(0))
}

fn series_bound(config: &ModelConfig) -> usize {
    (config.m + 1) * (config.d + 1) * (config.e + 1)
}

/// `P_T(f) = Σ_i (−1)^i P_K (δ d_Ǩ P_K)^i f`.
pub fn p_t(f: &EndElement) -> Result<EndElement> {
    let config = *f.config();
    let mut cur = p_k_tensor(&f.value);
    let mut total = cur.clone();
    for _ in 0..series_bound(&config) {
        if cur.is_zero() {
            return Ok(EndElement::new(total));
        }
        cur = p_k_tensor(&delta_d_kcheck(&cur)).neg();
        total.add_assign(&cur);
    }
    if cur.is_zero() {
        Ok(EndElement::new(total))
    } else {
        Err(Error::SeriesBound { what: "P_T", bound: series_bound(&config) })
    }
}

/// `P_GV(f) = Σ_i (−1)^i δ P_Ǩ (d_K δ P_Ǩ)^i f`.
pub fn p_gv(f: &EndElement) -> Result<EndElement> {
    let config = *f.config();
    let mut cur = delta_p_kcheck(&f.value);
    let mut total = cur.clone();
    for _ in 0..series_bound(&config) {
        if cur.is_zero() {
            return Ok(EndElement::new(total));
        }
        cur = delta_p_kcheck(&d_k_tensor(&cur)).neg();
        total.add_assign(&cur);
    }
    if cur.is_zero() {
        Ok(EndElement::new(total))
    } else {
        Err(Error::SeriesBound { what: "P_GV", bound: series_bound(&config) })
    }
}

fn require_wedge(omega: &GradedElement, what: &str) -> Result<()> {
    if omega.terms().any(|(m, _)| m.sym_degree() != 0 || m.a != 0) {
        return Err(Error::Precondition(format!("{what}: argument must lie in ΛW ⊗ ∧V")));
    }
    Ok(())
}

/// `i_H(β e_J) = β · ι_{j_1} ∘ … ∘ ι_{j_b}`.
pub fn i_h(omega: &GradedElement) -> Result<EndElement> {
    require_wedge(omega, "i_H")?;
    let config = *omega.config();
    Ok(EndElement::from_generator_values(config, |i_mask| {
        let mut out = GradedElement::zero(config);
        for (m, c) in omega.terms() {
            if let Some((neg, rest)) = iota(m.b, i_mask) {
                out.add_signed(Monomial { a: rest, b: 0, ..*m }, c, neg);
            }
        }
        out
    }))
}

/// Constant term of the `Hom(K^{-i}, K^0)` components.
pub fn pi_t(f: &EndElement) -> GradedElement {
    f.value.filter(|m| m.sym_degree() == 0 && m.a == 0)
}

/// Constant term of the `Hom(K^{-d}, −)` components, re-identified with
/// `ΛW ⊗ ∧V` by contraction against `v̄_1…v̄_d`.
pub fn pi_gv(f: &EndElement) -> GradedElement {
    let config = *f.config();
    let top = config.top_mask();
    let eps = epsilon(config.d);
    let mut out = GradedElement::zero(config);
    for (m, c) in f.value.terms() {
        if m.sym_degree() != 0 || m.b != top {
            continue;
        }
        let l_mask = top & !m.a;
        let (neg, _) = iota(l_mask, top).expect("subset of the top wedge");
        let img = Monomial { a: 0, b: l_mask, ..*m };
        out.add_signed(img, &(c * &eps), neg);
    }
    out
}

/// The Ŝ-constant term of the components valued in `K^0`.
pub fn res(f: &EndElement) -> EndElement {
    EndElement::new(f.value.filter(|m| m.a == 0 && m.sym_degree() == 0))
}

/// `r = Res f − P_T δ d_Ǩ Res f`, the closed form of the alternating series
/// `Σ_i (−1)^i (P_K δ d_Ǩ)^i Res f`. Equals `i_H π_T f`.
pub fn residue_r(f: &EndElement) -> Result<EndElement> {
    let r0 = res(f);
    let tail = p_t(&EndElement::new(delta_d_kcheck(&r0.value)))?;
    Ok(r0.sub(&tail))
}

/// The same residue summed term by term with `P_K`.
pub fn residue_series(f: &EndElement) -> Result<EndElement> {
    let config = *f.config();
    let mut cur = res(f).value;
    let mut total = cur.clone();
    for _ in 0..series_bound(&config) {
        if cur.is_zero() {
            return Ok(EndElement::new(total));
        }
        cur = p_k_tensor(&delta_d_kcheck(&cur)).neg();
        total.add_assign(&cur);
    }
    if cur.is_zero() {
        Ok(EndElement::new(total))
    } else {
        Err(Error::SeriesBound { what: "residue", bound: series_bound(&config) })
    }
}

/// Derivation of `K_Tot` given by its values on the `∧¹V∨` generators,
/// stored as `Σ_i D(v̄_i) · e_i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DerivationElement {
    value: GradedElement,
}

impl DerivationElement {
    pub fn new(value: GradedElement) -> Result<Self> {
        if value.terms().any(|(m, _)| m.vector_degree() != 1) {
            return Err(Error::Precondition("derivation tensor needs exactly one ∧V factor".into()));
        }
        Ok(DerivationElement { value })
    }

    pub fn from_generator_values(config: ModelConfig, values: &[GradedElement]) -> Result<Self> {
        if values.len() != config.d {
            return Err(Error::Dimension(format!("expected {} generator values", config.d)));
        }
        let mut out = GradedElement::zero(config);
        for (i, v) in values.iter().enumerate() {
            config.check_same(v.config())?;
            if v.terms().any(|(m, _)| m.b != 0) {
                return Err(Error::Precondition("generator value must lie in K_Tot".into()));
            }
            for (m, c) in v.terms() {
                out.add_term(Monomial { b: 1 << i, ..*m }, c.clone());
            }
        }
        Ok(DerivationElement { value: out })
    }

    pub fn value(&self) -> &GradedElement {
        &self.value
    }

    pub fn config(&self) -> &ModelConfig {
        self.value.config()
    }

    pub fn generator_value(&self, i: usize) -> GradedElement {
        let mut out = GradedElement::zero(*self.config());
        for (m, c) in self.value.terms() {
            if m.b == 1 << i {
                out.add_term(Monomial { b: 0, ..*m }, c.clone());
            }
        }
        out
    }

    pub fn generator_values(&self) -> Vec<GradedElement> {
        (0..self.config().d).map(|i| self.generator_value(i)).collect()
    }

    /// Apply `P_K` to the `K` factor of the tensor (the operation that
    /// `P_T` and `P_GV` reduce to on derivations).
    pub fn p_k(&self) -> DerivationElement {
        DerivationElement { value: p_k_tensor(&self.value) }
    }
}

/// Tensor-space basis of the End complex restricted to weight `≤ max_weight`
/// (weight `l + a − b`), together with the target `ΛW ⊗ ∧V`.
#[derive(Clone, Debug)]
pub struct EndSpace {
    config: ModelConfig,
    end: Basis,
    wedge: Basis,
    max_weight: Option<i64>,
}

impl EndSpace {
    /// All tensors of the truncated model.
    pub fn full(config: ModelConfig) -> Self {
        EndSpace {
            config,
            end: Basis::enumerate(config, |_| true),
            wedge: wedge_basis(config),
            max_weight: None,
        }
    }

    /// The quotient by the subcomplex of weight `> n`.
    pub fn weight_at_most(config: ModelConfig, n: i64) -> Self {
        EndSpace {
            config,
            end: Basis::enumerate(config, |m| m.weight() <= n),
            wedge: wedge_basis(config),
            max_weight: Some(n),
        }
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn basis(&self) -> &Basis {
        &self.end
    }

    pub fn wedge_basis(&self) -> &Basis {
        &self.wedge
    }

    pub fn max_weight(&self) -> Option<i64> {
        self.max_weight
    }

    /// Drop tensor terms outside this space (weight above the cutoff).
    pub fn project(&self, f: &GradedElement) -> GradedElement {
        match self.max_weight {
            None => f.clone(),
            Some(n) => f.filter(|m| m.weight() <= n),
        }
    }

    fn end_matrix(&self, op: impl Fn(&EndElement) -> Result<EndElement> + Sync) -> Result<SparseMatrix> {
        self.end.matrix_of(&self.end, true, |m| {
            let f = EndElement::new(GradedElement::monomial(self.config, *m, Rational::one()));
            Ok(self.project(op(&f)?.value()))
        })
    }

    pub fn d_hom_matrix(&self) -> Result<SparseMatrix> {
        self.end_matrix(|f| Ok(d_hom(f)))
    }

    pub fn p_t_matrix(&self) -> Result<SparseMatrix> {
        self.end_matrix(p_t)
    }

    pub fn p_gv_matrix(&self) -> Result<SparseMatrix> {
        self.end_matrix(p_gv)
    }

    pub fn residue_matrix(&self) -> Result<SparseMatrix> {
        self.end_matrix(residue_r)
    }

    pub fn i_h_matrix(&self) -> Result<SparseMatrix> {
        self.wedge.matrix_of(&self.end, false, |m| {
            let omega = GradedElement::monomial(self.config, *m, Rational::one());
            Ok(self.project(i_h(&omega)?.value()))
        })
    }

    pub fn pi_t_matrix(&self) -> Result<SparseMatrix> {
        self.end.matrix_of(&self.wedge, false, |m| {
            Ok(pi_t(&EndElement::new(GradedElement::monomial(self.config, *m, Rational::one()))))
        })
    }

    pub fn pi_gv_matrix(&self) -> Result<SparseMatrix> {
        self.end.matrix_of(&self.wedge, false, |m| {
            Ok(pi_gv(&EndElement::new(GradedElement::monomial(self.config, *m, Rational::one()))))
        })
    }

    /// Matrix of an arbitrary linear map on End tensors, projected.
    pub fn matrix_of(&self, op: impl Fn(&EndElement) -> Result<EndElement> + Sync) -> Result<SparseMatrix> {
        self.end_matrix(op)
    }

    /// End degrees `q − a + b` of the basis.
    pub fn end_degrees(&self) -> Vec<i64> {
        self.end.monomials().iter().map(|m| m.end_degree()).collect()
    }

    /// Degrees `q + b` of the wedge basis (matching `i_H`).
    pub fn wedge_degrees(&self) -> Vec<i64> {
        self.wedge.monomials().iter().map(|m| m.end_degree()).collect()
    }

    /// Columns whose symmetric degree is below `m`.
    pub fn safe_columns(&self) -> Vec<usize> {
        let m = self.config.m;
        self.end.indices_where(|x| x.sym_degree() < m)
    }
}

/// Basis of `ΛW ⊗ ∧V`.
pub fn wedge_basis(config: ModelConfig) -> Basis {
    Basis::enumerate(config, |m| m.sym_degree() == 0 && m.a == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Generator::*;

    fn cfg(d: usize, e: usize, m: usize) -> ModelConfig {
        ModelConfig::new(d, e, m).unwrap()
    }

    fn word(c: ModelConfig, w: &[crate::algebra::Generator]) -> GradedElement {
        GradedElement::from_word(c, w)
    }

    #[test]
    fn pairing_example() {
        let c = cfg(2, 1, 2);
        let f = EndElement::new(word(c, &[Vector(0)]));
        let x = word(c, &[Covector(0)]);
        assert_eq!(apply_end(&f, &x).unwrap(), GradedElement::one(c));
        // a ∧V factor larger than the available ∧V∨ degree gives zero
        let g = EndElement::new(word(c, &[Vector(0), Vector(1)]));
        assert!(apply_end(&g, &x).unwrap().is_zero());
    }

    #[test]
    fn identity_acts_trivially() {
        let c = cfg(2, 2, 3);
        let id = EndElement::identity(c);
        let space = crate::koszul::KoszulSpace::new(c);
        for m in space.basis().monomials() {
            let x = GradedElement::monomial(c, *m, Rational::one());
            assert_eq!(apply_end(&id, &x).unwrap(), x);
        }
        assert!(d_hom(&id).is_zero());
    }

    #[test]
    fn i_h_contracts() {
        let c = cfg(2, 1, 2);
        let f = i_h(&word(c, &[Vector(0)])).unwrap();
        let x = word(c, &[Covector(0), Covector(1)]);
        assert_eq!(apply_end(&f, &x).unwrap(), word(c, &[Covector(1)]));
        let f12 = i_h(&word(c, &[Vector(0), Vector(1)])).unwrap();
        let f2 = i_h(&word(c, &[Vector(1)])).unwrap();
        assert_eq!(compose(&f, &f2).unwrap(), f12);
    }

    #[test]
    fn projections_invert_i_h() {
        let c = cfg(2, 2, 2);
        for m in wedge_basis(c).monomials() {
            let omega = GradedElement::monomial(c, *m, Rational::one());
            let f = i_h(&omega).unwrap();
            assert_eq!(pi_t(&f), omega);
            assert_eq!(pi_gv(&f), omega);
            assert!(p_t(&f).unwrap().is_zero());
            assert!(p_gv(&f).unwrap().is_zero());
        }
    }

    #[test]
    fn d_hom_example_d1() {
        let c = cfg(1, 0, 2);
        let f = EndElement::new(word(c, &[Covector(0), Vector(0)]));
        assert_eq!(d_hom(&f).value(), &word(c, &[Sym(0), Vector(0)]));
        assert_eq!(d_hom_operator(&f).unwrap(), d_hom(&f));
    }
}
