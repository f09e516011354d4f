//! Graded derivations of `K_Tot` that pass `ΛW` with the Koszul sign, given by
//! their values on the generators `v_k ∈ S¹V∨` and `v̄_k ∈ ∧¹V∨`.

use num_traits::One;

use crate::algebra::{bits, GradedElement, ModelConfig, Monomial};
use crate::error::{Error, Result};
use crate::hom::{from_operator, DerivationElement, EndElement};
use crate::koszul::KoszulSpace;
use crate::rational::Rational;
use crate::sparse::SparseMatrix;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Derivation {
    config: ModelConfig,
    parity: usize,
    on_sym: Vec<GradedElement>,
    on_cov: Vec<GradedElement>,
}

impl Derivation {
    pub fn new(config: ModelConfig, parity: usize, on_sym: Vec<GradedElement>, on_cov: Vec<GradedElement>) -> Result<Self> {
        if on_sym.len() != config.d || on_cov.len() != config.d {
            return Err(Error::Dimension(format!("a derivation needs {} values per generator type", config.d)));
        }
        for (k, v) in on_sym.iter().chain(on_cov.iter()).enumerate() {
            config.check_same(v.config())?;
            let gen_parity = if k < config.d { 0 } else { 1 };
            if v.terms().any(|(m, _)| m.b != 0 || m.parity() % 2 != (gen_parity + parity) % 2) {
                return Err(Error::Precondition(format!(
                    "generator value {k} is not a K_Tot element of the derivation's parity"
                )));
            }
        }
        Ok(Derivation { config, parity: parity % 2, on_sym, on_cov })
    }

    pub fn zero(config: ModelConfig, parity: usize) -> Self {
        let z = vec![GradedElement::zero(config); config.d];
        Derivation { config, parity: parity % 2, on_sym: z.clone(), on_cov: z }
    }

    /// The `S`-linear derivation with the given values on `v̄_k`.
    pub fn from_element(g: &DerivationElement) -> Result<Self> {
        let config = *g.config();
        let values = g.generator_values();
        let parity = values
            .iter()
            .flat_map(|v| v.terms().map(|(m, _)| (m.parity() + 1) % 2))
            .next()
            .unwrap_or(1);
        Derivation::new(config, parity, vec![GradedElement::zero(config); config.d], values)
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn parity(&self) -> usize {
        self.parity
    }

    pub fn on_sym(&self) -> &[GradedElement] {
        &self.on_sym
    }

    pub fn on_cov(&self) -> &[GradedElement] {
        &self.on_cov
    }

    pub fn is_zero(&self) -> bool {
        self.on_sym.iter().chain(self.on_cov.iter()).all(GradedElement::is_zero)
    }

    /// True when the derivation kills `S(V∨)`.
    pub fn is_s_linear(&self) -> bool {
        self.on_sym.iter().all(GradedElement::is_zero)
    }

    pub fn add(&self, other: &Derivation) -> Result<Derivation> {
        self.config.check_same(&other.config)?;
        if self.parity != other.parity && !self.is_zero() && !other.is_zero() {
            return Err(Error::Precondition("cannot add derivations of different parity".into()));
        }
        let parity = if self.is_zero() { other.parity } else { self.parity };
        Ok(Derivation {
            config: self.config,
            parity,
            on_sym: self.on_sym.iter().zip(&other.on_sym).map(|(x, y)| x.add(y)).collect(),
            on_cov: self.on_cov.iter().zip(&other.on_cov).map(|(x, y)| x.add(y)).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Derivation {
        Derivation {
            config: self.config,
            parity: self.parity,
            on_sym: self.on_sym.iter().map(|x| x.scale(c)).collect(),
            on_cov: self.on_cov.iter().map(|x| x.scale(c)).collect(),
        }
    }

    /// The generator-value tensor `Σ_i D(v̄_i) e_i`.
    pub fn element(&self) -> Result<DerivationElement> {
        DerivationElement::from_generator_values(self.config, &self.on_cov)
    }

    /// `D(w_X s v̄_A) = (−1)^{|D||X|} w_X (D(s) v̄_A + s D(v̄_A))` by Leibniz.
    pub fn apply_monomial(&self, m: &Monomial) -> GradedElement {
        let config = self.config;
        let mut out = GradedElement::zero(config);
        let mut outer = Rational::one();
        if self.parity == 1 && m.form_degree() % 2 == 1 {
            outer = -outer;
        }
        let head = Monomial { w: m.w, ..Monomial::ONE };
        let cov = Monomial { a: m.a, ..Monomial::ONE };
        for k in 0..config.d {
            let e = m.s[k];
            if e == 0 || self.on_sym[k].is_zero() {
                continue;
            }
            let mut rest = Monomial { w: m.w, s: m.s, ..Monomial::ONE };
            rest.s[k] -= 1;
            let coeff = &outer * &Rational::from_int(e as i64);
            // w_X s' · D(v_k) · v̄_A; D(v_k) has the parity of D, s' is even
            let left = self.on_sym[k].mul_monomial_left(&rest, &coeff);
            mul_right_into(&mut out, &left, &cov);
        }
        let idx: Vec<usize> = bits(m.a as u32).collect();
        for (pos, &i) in idx.iter().enumerate() {
            if self.on_cov[i].is_zero() {
                continue;
            }
            let before: u8 = idx[..pos].iter().fold(0, |acc, &j| acc | (1 << j));
            let after: u8 = idx[pos + 1..].iter().fold(0, |acc, &j| acc | (1 << j));
            let mut coeff = outer.clone();
            if self.parity == 1 && pos % 2 == 1 {
                coeff = -coeff;
            }
            let left_mono = Monomial { w: 0, s: m.s, a: before, b: 0 };
            let left = self.on_cov[i].mul_monomial_left(&left_mono, &coeff);
            let left = left.mul_monomial_left(&head, &Rational::one());
            mul_right_into(&mut out, &left, &Monomial { a: after, ..Monomial::ONE });
        }
        out
    }

    pub fn apply(&self, x: &GradedElement) -> Result<GradedElement> {
        self.config.check_same(x.config())?;
        if x.terms().any(|(m, _)| m.b != 0) {
            return Err(Error::Precondition("derivations act on K_Tot".into()));
        }
        let mut out = GradedElement::zero(self.config);
        if x.overflow() {
            out.mark_overflow();
        }
        for (m, c) in x.terms() {
            out.add_scaled(&self.apply_monomial(m), c);
        }
        Ok(out)
    }

    /// Graded commutator `[D₁, D₂] = D₁D₂ − (−1)^{|D₁||D₂|} D₂D₁`.
    pub fn bracket(&self, other: &Derivation) -> Result<Derivation> {
        self.config.check_same(&other.config)?;
        let sign = Rational::sign(self.parity * other.parity);
        let on = |vals_a: &[GradedElement], vals_b: &[GradedElement]| -> Result<Vec<GradedElement>> {
            vals_a
                .iter()
                .zip(vals_b)
                .map(|(x, y)| {
                    let xy = self.apply(y)?;
                    let yx = other.apply(x)?;
                    Ok(xy.sub(&yx.scale(&sign)))
                })
                .collect()
        };
        Ok(Derivation {
            config: self.config,
            parity: (self.parity + other.parity) % 2,
            on_sym: on(&self.on_sym, &other.on_sym)?,
            on_cov: on(&self.on_cov, &other.on_cov)?,
        })
    }

    /// The composite `D₁ ∘ D₂` evaluated on the generators (not itself a
    /// derivation in general; used for sums that are).
    pub fn compose_on_generators(&self, other: &Derivation) -> Result<(Vec<GradedElement>, Vec<GradedElement>)> {
        let sym = other.on_sym.iter().map(|v| self.apply(v)).collect::<Result<_>>()?;
        let cov = other.on_cov.iter().map(|v| self.apply(v)).collect::<Result<_>>()?;
        Ok((sym, cov))
    }

    /// End tensor of the extension. Requires `S`-linearity.
    pub fn to_end(&self) -> Result<EndElement> {
        if !self.is_s_linear() {
            return Err(Error::Precondition("only S-linear derivations are End elements".into()));
        }
        Ok(from_operator(self.config, |x| self.apply(x).expect("same configuration")))
    }

    /// Operator matrix on `K_Tot`, terms above the truncation dropped.
    pub fn matrix(&self, space: &KoszulSpace) -> SparseMatrix {
        space
            .basis()
            .matrix_of(space.basis(), true, |m| Ok(self.apply_monomial(m)))
            .expect("projected matrices cannot fail")
    }
}

fn mul_right_into(out: &mut GradedElement, left: &GradedElement, right: &Monomial) {
    if left.overflow() {
        out.mark_overflow();
    }
    for (m, c) in left.terms() {
        if let Some((neg, z)) = m.mul(right) {
            out.add_signed(z, c, neg);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Generator::*;
    use crate::koszul::d_k;

    fn cfg() -> ModelConfig {
        ModelConfig::new(2, 2, 3).unwrap()
    }

    #[test]
    fn d_k_is_a_derivation() {
        let c = cfg();
        let vals = (0..2).map(|i| GradedElement::from_word(c, &[Sym(i)])).collect();
        let d = Derivation::new(c, 1, vec![GradedElement::zero(c); 2], vals).unwrap();
        let space = KoszulSpace::new(c);
        assert_eq!(d.matrix(&space), space.d_k_matrix());
        let x = GradedElement::from_word(c, &[Form(0), Sym(1), Covector(0), Covector(1)]);
        assert_eq!(d.apply(&x).unwrap(), d_k(&x).unwrap());
    }

    #[test]
    fn leibniz_on_products() {
        let c = cfg();
        let on_sym = vec![
            GradedElement::from_word(c, &[Form(1), Sym(0), Sym(1)]),
            GradedElement::zero(c),
        ];
        let on_cov = vec![
            GradedElement::from_word(c, &[Form(0), Sym(1), Covector(1)]),
            GradedElement::from_word(c, &[Form(0), Covector(0)]),
        ];
        let d = Derivation::new(c, 1, on_sym, on_cov).unwrap();
        let x = GradedElement::from_word(c, &[Form(1), Sym(0)]);
        let y = GradedElement::from_word(c, &[Sym(0), Covector(1)]);
        let lhs = d.apply(&x.multiply(&y).unwrap()).unwrap();
        let rhs = d
            .apply(&x)
            .unwrap()
            .multiply(&y)
            .unwrap()
            .add(&x.multiply(&d.apply(&y).unwrap()).unwrap().neg());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn parity_is_validated() {
        let c = cfg();
        let bad = vec![GradedElement::from_word(c, &[Sym(0)]), GradedElement::zero(c)];
        assert!(Derivation::new(c, 0, vec![GradedElement::zero(c); 2], bad.clone()).is_err());
        assert!(Derivation::new(c, 1, vec![GradedElement::zero(c); 2], bad).is_ok());
    }
}
