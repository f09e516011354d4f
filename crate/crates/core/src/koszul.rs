//! The Koszul complex `K = ΛW ⊗ S≤m(V∨) ⊗ ∧V∨`, its dual `Ǩ = ΛW ⊗ S≤m(V∨) ⊗ ∧V`,
//! and the contraction data of both onto `ΛW` resp. `ΛW ⊗ ∧^d V`.
//!
//! Operators on `K` are odd derivations that pass the `w` block with a sign
//! (they are `ΛW`-linear in the graded sense). Operators on `Ǩ` act on the
//! `∧V` block from the left of that block and never pick up a sign from `w`
//! or `v̄`. The monomial-level kernels below are shared with the tensor
//! representation of `End(K)`, where all four blocks are present.

use num_traits::{One, Zero};

use crate::algebra::{bits, contract_vectors, GradedElement, ModelConfig, Monomial};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sparse::{Basis, SparseMatrix};

pub(crate) type Terms = Vec<(Rational, Monomial)>;

fn parity_sign(k: u32) -> Rational {
    Rational::sign(k as usize)
}

/// `d_K(v̄_i) = v_i`, extended as an odd derivation.
pub(crate) fn d_k_terms(m: &Monomial) -> Terms {
    let mut out = Vec::new();
    let q = m.w.count_ones();
    for i in bits(m.a as u32) {
        let below = (m.a & ((1u8 << i) - 1)).count_ones();
        let mut img = *m;
        img.a &= !(1 << i);
        img.s[i] += 1;
        out.push((parity_sign(q + below), img));
    }
    out
}

/// `P̃_K(v_i) = v̄_i`, extended as an odd derivation.
pub(crate) fn p_k_tilde_terms(m: &Monomial) -> Terms {
    let mut out = Vec::new();
    let q = m.w.count_ones();
    for i in 0..crate::algebra::MAX_D {
        let k = m.s[i];
        if k == 0 || m.a & (1 << i) != 0 {
            continue;
        }
        let below = (m.a & ((1u8 << i) - 1)).count_ones();
        let mut img = *m;
        img.s[i] -= 1;
        img.a |= 1 << i;
        out.push((parity_sign(q + below) * Rational::from_int(k as i64), img));
    }
    out
}

/// `P_K = P̃_K / (a + l)` on `S^l ⊗ ∧^a`, zero on `S^0 ⊗ ∧^0`.
pub(crate) fn p_k_terms(m: &Monomial) -> Terms {
    let n = m.covector_degree() + m.sym_degree();
    if n == 0 {
        return Vec::new();
    }
    let scale = Rational::new(1, n as i64);
    p_k_tilde_terms(m).into_iter().map(|(c, x)| (c * &scale, x)).collect()
}

/// `d_Ǩ = −Σ_i v_i · (e_i ∧ −)`.
pub(crate) fn d_kcheck_terms(m: &Monomial, d: usize) -> Terms {
    let mut out = Vec::new();
    for i in 0..d {
        if m.b & (1 << i) != 0 {
            continue;
        }
        let below = (m.b & ((1u8 << i) - 1)).count_ones();
        let mut img = *m;
        img.b |= 1 << i;
        img.s[i] += 1;
        out.push((-parity_sign(below), img));
    }
    out
}

/// `P_Ǩ(s ⊗ e_{j_1}∧…∧e_{j_b}) = 1/(l+d−b) Σ_p (−1)^p ∂_{j_p}s ⊗ (e_J without e_{j_p})`.
pub(crate) fn p_kcheck_terms(m: &Monomial, d: usize) -> Terms {
    let l = m.sym_degree();
    let b = m.vector_degree();
    let denom = l + d - b;
    if denom == 0 {
        return Vec::new();
    }
    let scale = Rational::new(1, denom as i64);
    let mut out = Vec::new();
    for j in bits(m.b as u32) {
        let k = m.s[j];
        if k == 0 {
            continue;
        }
        let position = (m.b & ((1u8 << j) - 1)).count_ones() + 1;
        let mut img = *m;
        img.s[j] -= 1;
        img.b &= !(1 << j);
        out.push((parity_sign(position) * Rational::from_int(k as i64) * &scale, img));
    }
    out
}

/// Apply a monomial kernel linearly.
pub(crate) fn apply_terms(x: &GradedElement, f: impl Fn(&Monomial) -> Terms) -> GradedElement {
    x.map_linear(|m, out| {
        for (c, img) in f(m) {
            out.add_term(img, c);
        }
    })
}

fn require(x: &GradedElement, what: &str, ok: impl Fn(&Monomial) -> bool) -> Result<()> {
    if x.terms().all(|(m, _)| ok(m)) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{what}: argument has terms of the wrong shape")))
    }
}

pub fn d_k(x: &GradedElement) -> Result<GradedElement> {
    require(x, "d_K", |m| m.b == 0)?;
    Ok(apply_terms(x, d_k_terms))
}

pub fn p_k_tilde(x: &GradedElement) -> Result<GradedElement> {
    require(x, "P̃_K", |m| m.b == 0)?;
    Ok(apply_terms(x, p_k_tilde_terms))
}

pub fn p_k(x: &GradedElement) -> Result<GradedElement> {
    require(x, "P_K", |m| m.b == 0)?;
    Ok(apply_terms(x, p_k_terms))
}

/// Constant term: `S^0 ⊗ ∧^0`, valued in `ΛW`.
pub fn pi_k(x: &GradedElement) -> Result<GradedElement> {
    require(x, "π_K", |m| m.b == 0)?;
    Ok(x.filter(|m| m.sym_degree() == 0 && m.a == 0))
}

pub fn i_k(x: &GradedElement) -> Result<GradedElement> {
    require(x, "i_K", |m| m.sym_degree() == 0 && m.a == 0 && m.b == 0)?;
    Ok(x.clone())
}

pub fn d_kcheck(x: &GradedElement) -> Result<GradedElement> {
    require(x, "d_Ǩ", |m| m.a == 0)?;
    let d = x.config().d;
    Ok(apply_terms(x, |m| d_kcheck_terms(m, d)))
}

pub fn p_kcheck(x: &GradedElement) -> Result<GradedElement> {
    require(x, "P_Ǩ", |m| m.a == 0)?;
    let d = x.config().d;
    Ok(apply_terms(x, |m| p_kcheck_terms(m, d)))
}

/// Projection onto the `S^0 ⊗ ∧^d V` part.
pub fn pi_kcheck(x: &GradedElement) -> Result<GradedElement> {
    require(x, "π_Ǩ", |m| m.a == 0)?;
    let top = x.config().top_mask();
    Ok(x.filter(|m| m.sym_degree() == 0 && m.b == top))
}

pub fn i_kcheck(x: &GradedElement) -> Result<GradedElement> {
    let top = x.config().top_mask();
    require(x, "i_Ǩ", |m| m.sym_degree() == 0 && m.a == 0 && m.b == top)?;
    Ok(x.clone())
}

/// The isomorphism `K ≅ Ǩ ⊗ (∧^d V)^{-1}`, `s·v̄_A ↦ s·(v̄_A ⌟ e_1…e_d)`.
pub fn twist(x: &GradedElement) -> Result<GradedElement> {
    require(x, "twist", |m| m.b == 0)?;
    let top = x.config().top_mask();
    Ok(apply_terms(x, |m| {
        let frame = Monomial { b: top, ..Monomial::ONE };
        let (neg, rest) = contract_vectors(m.a, &frame).expect("top wedge contains every index");
        let img = Monomial { a: 0, b: rest.b, ..*m };
        vec![(if neg { -Rational::one() } else { Rational::one() }, img)]
    }))
}

/// Sign relating the differentials under [`twist`]:
/// `twist(d_K x) = (−1)^{q+a} · d_Ǩ(twist x)` for `x` of form degree `q` and
/// `∧V∨` degree `a`. Independent of `d`.
pub fn twist_differential_sign(q: usize, a: usize) -> Rational {
    Rational::sign(q + a)
}

/// Sign relating the homotopies under [`twist`]:
/// `twist(P_K x) = −(−1)^{q+a} · P_Ǩ(twist x)`.
pub fn twist_homotopy_sign(q: usize, a: usize) -> Rational {
    -Rational::sign(q + a)
}

/// Basis bookkeeping for `K_Tot` and `Ǩ` at a fixed configuration.
#[derive(Clone, Debug)]
pub struct KoszulSpace {
    config: ModelConfig,
    k: Basis,
    kcheck: Basis,
}

impl KoszulSpace {
    pub fn new(config: ModelConfig) -> Self {
        KoszulSpace {
            config,
            k: Basis::enumerate(config, |m| m.b == 0),
            kcheck: Basis::enumerate(config, |m| m.a == 0),
        }
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    /// Basis of `K_Tot` (no `∧V` factor).
    pub fn basis(&self) -> &Basis {
        &self.k
    }

    /// Basis of `Ǩ` (no `∧V∨` factor).
    pub fn dual_basis(&self) -> &Basis {
        &self.kcheck
    }

    /// Matrix of a monomial kernel on `K_Tot`. Terms leaving the truncation
    /// are dropped (callers restrict to safe columns).
    pub(crate) fn kernel_matrix(&self, dual: bool, f: impl Fn(&Monomial) -> Terms + Sync) -> SparseMatrix {
        let basis = if dual { &self.kcheck } else { &self.k };
        basis
            .matrix_of(basis, true, |m| {
                let mut out = GradedElement::zero(self.config);
                for (c, img) in f(m) {
                    out.add_term(img, c);
                }
                Ok(out)
            })
            .expect("projected matrices cannot fail")
    }

    pub fn d_k_matrix(&self) -> SparseMatrix {
        self.kernel_matrix(false, d_k_terms)
    }

    pub fn p_k_matrix(&self) -> SparseMatrix {
        self.kernel_matrix(false, p_k_terms)
    }

    pub fn p_k_tilde_matrix(&self) -> SparseMatrix {
        self.kernel_matrix(false, p_k_tilde_terms)
    }

    /// `i_K ∘ π_K` on `K_Tot`.
    pub fn k_projector(&self) -> SparseMatrix {
        self.kernel_matrix(false, |m| {
            if m.sym_degree() == 0 && m.a == 0 {
                vec![(Rational::one(), *m)]
            } else {
                Vec::new()
            }
        })
    }

    pub fn d_kcheck_matrix(&self) -> SparseMatrix {
        let d = self.config.d;
        self.kernel_matrix(true, move |m| d_kcheck_terms(m, d))
    }

    pub fn p_kcheck_matrix(&self) -> SparseMatrix {
        let d = self.config.d;
        self.kernel_matrix(true, move |m| p_kcheck_terms(m, d))
    }

    /// `i_Ǩ ∘ π_Ǩ` on `Ǩ`.
    pub fn kcheck_projector(&self) -> SparseMatrix {
        let top = self.config.top_mask();
        self.kernel_matrix(true, move |m| {
            if m.sym_degree() == 0 && m.b == top {
                vec![(Rational::one(), *m)]
            } else {
                Vec::new()
            }
        })
    }

    /// Columns whose basis monomial has symmetric degree `< m`.
    pub fn safe_columns(&self, dual: bool) -> Vec<usize> {
        let m = self.config.m;
        let basis = if dual { &self.kcheck } else { &self.k };
        basis.indices_where(|x| x.sym_degree() < m)
    }

    /// The diagonal matrix `(−1)^q` (form-degree parity) on `K_Tot` or `Ǩ`.
    pub fn form_parity(&self, dual: bool) -> SparseMatrix {
        self.kernel_matrix(dual, |m| vec![(Rational::sign(m.form_degree()), *m)])
    }
}

/// Pointwise `[P̃_K, d_K] = (a + l)·Id` on a single monomial of `K_Tot`.
pub fn commutator_is_euler(m: &Monomial, config: ModelConfig) -> bool {
    let x = GradedElement::monomial(config, *m, Rational::one());
    let pd = apply_terms(&apply_terms(&x, d_k_terms), p_k_tilde_terms);
    let dp = apply_terms(&apply_terms(&x, p_k_tilde_terms), d_k_terms);
    let n = Rational::from_int((m.covector_degree() + m.sym_degree()) as i64);
    pd.add(&dp).same_terms(&x.scale(&n))
}

/// `true` when `x` is zero or all its coefficients vanish.
pub fn is_zero(x: &GradedElement) -> bool {
    x.terms().all(|(_, c)| c.is_zero())
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
    fn d_k_on_generators() {
        let c = cfg(2, 1, 3);
        assert_eq!(d_k(&word(c, &[Covector(0)])).unwrap(), word(c, &[Sym(0)]));
        assert!(d_k(&word(c, &[Sym(0)])).unwrap().is_zero());
        let expected = word(c, &[Sym(0), Covector(1)]).sub(&word(c, &[Sym(1), Covector(0)]));
        assert_eq!(d_k(&word(c, &[Covector(0), Covector(1)])).unwrap(), expected);
    }

    #[test]
    fn d_k_passes_forms_with_a_sign() {
        let c = cfg(1, 1, 2);
        let x = word(c, &[Form(0), Covector(0)]);
        assert_eq!(d_k(&x).unwrap(), word(c, &[Form(0), Sym(0)]).neg());
    }

    #[test]
    fn p_k_examples() {
        let c = cfg(2, 1, 3);
        assert_eq!(p_k_tilde(&word(c, &[Sym(0)])).unwrap(), word(c, &[Covector(0)]));
        assert!(p_k(&GradedElement::one(c)).unwrap().is_zero());
        let half = Rational::new(1, 2);
        assert_eq!(
            p_k(&word(c, &[Sym(0), Covector(1)])).unwrap(),
            word(c, &[Covector(0), Covector(1)]).scale(&half)
        );
    }

    #[test]
    fn dual_differential_examples() {
        let c = cfg(2, 1, 3);
        let expected = word(c, &[Sym(0), Vector(0)]).add(&word(c, &[Sym(1), Vector(1)])).neg();
        let once = d_kcheck(&GradedElement::one(c)).unwrap();
        assert_eq!(once, expected);
        assert!(d_kcheck(&once).unwrap().is_zero());
        let c1 = cfg(1, 1, 3);
        assert!(d_kcheck(&word(c1, &[Sym(0), Vector(0)])).unwrap().is_zero());
    }

    #[test]
    fn dual_homotopy_examples() {
        for d in 1..=3 {
            let c = cfg(d, 1, 3);
            let x = word(c, &[Sym(0), Vector(0)]);
            let expected = GradedElement::one(c).scale(&Rational::new(-1, d as i64));
            assert_eq!(p_kcheck(&x).unwrap(), expected);
            assert!(p_kcheck(&GradedElement::one(c)).unwrap().is_zero());
        }
        let c = cfg(2, 1, 3);
        assert!(p_kcheck(&word(c, &[Vector(0), Vector(1)])).unwrap().is_zero());
    }

    #[test]
    fn projections_and_inclusions() {
        let c = cfg(2, 2, 3);
        let x = GradedElement::one(c).add(&word(c, &[Sym(0)])).add(&word(c, &[Covector(0)]));
        assert_eq!(pi_k(&x).unwrap(), GradedElement::one(c));
        let w12 = word(c, &[Form(0), Form(1)]);
        assert_eq!(pi_k(&i_k(&w12).unwrap()).unwrap(), w12);
        let top = word(c, &[Vector(0), Vector(1)]);
        let y = top.add(&word(c, &[Sym(0), Vector(0), Vector(1)]));
        assert_eq!(pi_kcheck(&y).unwrap(), top);
        assert!(pi_kcheck(&word(c, &[Vector(0)])).unwrap().is_zero());
        assert_eq!(pi_kcheck(&i_kcheck(&top).unwrap()).unwrap(), top);
        assert!(i_k(&word(c, &[Sym(0)])).is_err());
        assert!(d_k(&word(c, &[Vector(0)])).is_err());
    }

    #[test]
    fn euler_commutator_on_basis() {
        let c = cfg(2, 2, 3);
        let space = KoszulSpace::new(c);
        for m in space.basis().monomials() {
            if m.sym_degree() < c.m {
                assert!(commutator_is_euler(m, c), "{m:?}");
            }
        }
    }
}
