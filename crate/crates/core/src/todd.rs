//! Bernoulli numbers, the generalized Todd class by two formulas, the
//! perturbation `t`, and the class `q_σ` computed by perturbing the End
//! contractions.
//!
//! Bernoulli numbers use `B₁ = +1/2`. The Todd coefficients `t_n` are those of
//! `x/(1 − e^{−x})`, so `t₁ = 1/2` and `t_n = B_n/n!` otherwise.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{interior_product, GradedElement, ModelConfig, TermRecord};
use crate::connection::{alt_power, curvature_matrix, matrix_derivation, CurvatureInput, EvenMatrix};
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::hom::{apply_end, epsilon, i_h, p_gv, pi_t, EndElement, EndSpace};
use crate::perturbation::{perturb, Contraction, Perturbation};
use crate::rational::{binomial, factorial, Rational};
use crate::sparse::SparseMatrix;

/// `B_n` with `B₁ = +1/2`.
pub fn bernoulli(n: usize) -> Rational {
    bernoulli_table(n)[n].clone()
}

/// `B_0 … B_n`, from `Σ_{k=0}^{j} C(j+1, k) B_k = 0` (which gives `B₁ = −1/2`)
/// with the sign of `B₁` flipped afterwards.
pub fn bernoulli_table(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = vec![Rational::one()];
    for j in 1..=n {
        let mut acc = Rational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += &(&binomial(j as u64 + 1, k as u64) * bk);
        }
        b.push(-acc / Rational::from_int(j as i64 + 1));
    }
    if n >= 1 {
        b[1] = Rational::new(1, 2);
    }
    b
}

/// Coefficient of `x^n` in `x/(1 − e^{−x})`, by power-series division.
pub fn todd_series_coeff(n: usize) -> Rational {
    todd_series(n)[n].clone()
}

/// `t_0 … t_n`.
pub fn todd_series(n: usize) -> Vec<Rational> {
    // (1 − e^{−x})/x = Σ_k (−1)^k x^k/(k+1)!
    let den: Vec<Rational> = (0..=n).map(|k| Rational::sign(k) / factorial(k as u64 + 1)).collect();
    let mut out: Vec<Rational> = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut acc = if j == 0 { Rational::one() } else { Rational::zero() };
        for i in 0..j {
            acc -= &(&out[i] * &den[j - i]);
        }
        out.push(acc / den[0].clone());
    }
    out
}

/// `ρ_n`: `½ tr 𝐑` for `n = 1` and `−(B_n/n!) tr 𝐑^n` for `n ≥ 2`, so that
/// `Σ ρ_n/n` is the trace of `ln(𝐑/(1 − e^{−𝐑}))`.
pub fn rho(r: &CurvatureInput, config: ModelConfig, n: usize) -> Result<GradedElement> {
    if n == 0 {
        return Err(Error::Precondition("ρ_n needs n ≥ 1".into()));
    }
    let tr = alt_power(r, config, n)?.trace();
    let coeff = if n == 1 { Rational::new(1, 2) } else { -(bernoulli(n) / factorial(n as u64)) };
    Ok(tr.scale(&coeff))
}

/// Element of `⊕_j Λ^jW ⊗ ∧^jV∨`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ToddClass {
    value: GradedElement,
}

#[derive(Serialize, Deserialize)]
struct ToddJson {
    terms: Vec<TermRecord>,
}

impl ToddClass {
    pub fn value(&self) -> &GradedElement {
        &self.value
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ToddJson { terms: self.value.to_records() }).expect("serializable")
    }

    /// `Td ⌟ η` under the End pairing (see [`end_contract`]).
    pub fn contract(&self, eta: &GradedElement) -> Result<GradedElement> {
        end_contract(&self.value, eta)
    }

    /// `Td ⌟ η` under the dual-basis pairing `⟨v̄_I, e_J⟩ = δ_IJ`.
    pub fn contract_dual_basis(&self, eta: &GradedElement) -> Result<GradedElement> {
        interior_product(&self.value, eta)
    }
}

/// Contraction by the pairing that identifies `Hom(∧^kV∨, k)` with `∧^kV`
/// inside End: `ω = α v̄_{i1}…v̄_{ik}` acts as `α ι(v̄_{i1}) ∘ … ∘ ι(v̄_{ik})`,
/// which is `ε_k = (−1)^{k(k−1)/2}` times [`interior_product`].
pub fn end_contract(omega: &GradedElement, eta: &GradedElement) -> Result<GradedElement> {
    let reversed = omega.map_linear(|m, out| out.add_term(*m, epsilon(m.covector_degree())));
    interior_product(&reversed, eta)
}

/// `Σ_j ρ_j ⌟ η / (d − l + j)` for each `∧^lV` component of `η`.
pub fn single_step_rhs(r: &CurvatureInput, config: ModelConfig, eta: &GradedElement) -> Result<GradedElement> {
    let rhos = (1..=order_bound(&config)).map(|j| rho(r, config, j)).collect::<Result<Vec<_>>>()?;
    let mut out = GradedElement::zero(config);
    for (m, c) in eta.terms() {
        let single = GradedElement::monomial(config, *m, c.clone());
        let l = m.vector_degree();
        for (j, rj) in rhos.iter().enumerate() {
            let j = j + 1;
            let k = Rational::new(1, (config.d + j - l) as i64);
            out.add_scaled(&end_contract(rj, &single)?, &k);
        }
    }
    Ok(out)
}

fn order_bound(config: &ModelConfig) -> usize {
    config.d.min(config.e)
}

/// `exp(Σ_n ρ_n/n)`.
pub fn todd_exp(r: &CurvatureInput, config: ModelConfig) -> Result<ToddClass> {
    let mut log = GradedElement::zero(config);
    for n in 1..=order_bound(&config) {
        log.add_scaled(&rho(r, config, n)?, &Rational::new(1, n as i64));
    }
    let mut total = GradedElement::one(config);
    let mut power = GradedElement::one(config);
    let mut k = 1;
    loop {
        power = power.mul_unchecked(&log).scale(&Rational::new(1, k));
        if power.is_zero() {
            break;
        }
        total.add_assign(&power);
        k += 1;
    }
    Ok(ToddClass { value: total })
}

/// `det(Σ_n t_n 𝐑^n)`.
pub fn todd_det(r: &CurvatureInput, config: ModelConfig) -> Result<ToddClass> {
    let rm = curvature_matrix(r, config)?;
    let coeffs = todd_series(order_bound(&config));
    let mut acc = EvenMatrix::zero(config, config.d);
    let mut power = EvenMatrix::identity(config, config.d);
    for c in &coeffs {
        acc = acc.add(&power.scale(c));
        power = power.mul(&rm);
    }
    Ok(ToddClass { value: acc.det() })
}

/// `t = R̃ + Σ_{k≥1} t_k Alt[R^{⊗k}]`, the part of `𝕂` beyond `d_K`.
pub fn perturbation_t(r: &CurvatureInput, config: ModelConfig) -> Result<Derivation> {
    let coeffs = todd_series(order_bound(&config));
    let mut acc = r.r_tilde(config)?;
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        let term = matrix_derivation(&alt_power(r, config, k)?)?.scale(c);
        if !term.is_zero() {
            acc = acc.add(&term)?;
        }
    }
    Ok(acc)
}

/// `T(f) = t∘f − (−1)^{|f|} f∘t`, evaluated on the generators `v̄_I`.
pub fn commutator_t(t: &Derivation, f: &EndElement) -> Result<EndElement> {
    let config = *f.config();
    let t_on_gen: Vec<GradedElement> = (0..(1u16 << config.d))
        .map(|i| {
            let x = GradedElement::monomial(
                config,
                crate::algebra::Monomial { a: i as u8, ..crate::algebra::Monomial::ONE },
                Rational::one(),
            );
            t.apply(&x)
        })
        .collect::<Result<_>>()?;
    let mut total = EndElement::zero(config);
    for parity in 0..2 {
        let part = EndElement::new(f.value().filter(|m| m.parity() % 2 == parity));
        if part.is_zero() {
            continue;
        }
        let sign = Rational::sign(parity);
        let values = (0..(1u16 << config.d))
            .map(|i_mask| {
                let left = t.apply(&part.on_generator(i_mask as u8))?;
                let right = apply_end(&part, &t_on_gen[i_mask as usize])?;
                Ok(left.sub(&right.scale(&sign)))
            })
            .collect::<Result<Vec<_>>>()?;
        let piece = EndElement::from_generator_values(config, |i_mask| values[i_mask as usize].clone());
        total = total.add(&piece);
    }
    Ok(total)
}

/// Drop tensor terms of weight `> 0`. They span a subcomplex that `T` maps
/// into itself and that `π_T`, `π_GV` kill.
fn low_weight(f: &EndElement) -> EndElement {
    EndElement::new(f.value().filter(|m| m.weight() <= 0))
}

fn require_wedge(eta: &GradedElement) -> Result<()> {
    if eta.terms().any(|(m, _)| m.sym_degree() != 0 || m.a != 0) {
        return Err(Error::Precondition("η must lie in ΛW ⊗ ∧V".into()));
    }
    Ok(())
}

fn check_truncation(config: &ModelConfig) -> Result<()> {
    if config.m < config.d + 1 {
        return Err(Error::InvalidConfig(format!(
            "q_σ needs m ≥ d + 1 (got m={}, d={})",
            config.m, config.d
        )));
    }
    Ok(())
}

fn series_bound(config: &ModelConfig) -> usize {
    (config.m + 1) * (config.d + 1) * (config.e + 1)
}

/// One step `−π_T P̃_GV T i_H(η)`.
pub fn q_step(t: &Derivation, eta: &GradedElement) -> Result<GradedElement> {
    require_wedge(eta)?;
    let f = low_weight(&commutator_t(t, &i_h(eta)?)?);
    Ok(pi_t(&p_gv(&f)?).neg())
}

/// The iterated single step `Σ_k (−π_T P̃_GV T i_H)^k η`. It agrees with
/// [`q_sigma`] for `d = 1` only: for `d ≥ 2`, `i_H π_T` is not the identity
/// on the image of `P̃_GV T`.
pub fn q_sigma_series(r: &CurvatureInput, config: ModelConfig, eta: &GradedElement) -> Result<GradedElement> {
    check_truncation(&config)?;
    require_wedge(eta)?;
    let t = perturbation_t(r, config)?;
    let mut cur = eta.clone();
    let mut total = eta.clone();
    for _ in 0..series_bound(&config) {
        cur = q_step(&t, &cur)?;
        if cur.is_zero() {
            return Ok(total);
        }
        total.add_assign(&cur);
    }
    Err(Error::SeriesBound { what: "q_σ", bound: series_bound(&config) })
}

/// `q_σ(η) = π_T i_GV(η)` with `i_GV = Σ_k (−P̃_GV T)^k i_H`, summed inside End.
pub fn q_sigma(r: &CurvatureInput, config: ModelConfig, eta: &GradedElement) -> Result<GradedElement> {
    check_truncation(&config)?;
    require_wedge(eta)?;
    let t = perturbation_t(r, config)?;
    let mut f = i_h(eta)?;
    let mut total = pi_t(&f);
    for _ in 0..series_bound(&config) {
        f = p_gv(&low_weight(&commutator_t(&t, &f)?))?.scale(&-Rational::one());
        if f.is_zero() {
            return Ok(total);
        }
        total.add_assign(&pi_t(&f));
    }
    Err(Error::SeriesBound { what: "i_GV", bound: series_bound(&config) })
}

/// The two End contractions on the weight `≤ 0` quotient, perturbed by `T`.
#[derive(Clone, Debug)]
pub struct PerturbedContractions {
    pub space: EndSpace,
    pub t_matrix: SparseMatrix,
    pub transfer: Contraction,
    pub transfer_perturbed: Contraction,
    pub duality: Contraction,
    pub duality_perturbed: Contraction,
}

/// Contraction `(π, i_H, P)` of the weight `≤ 0` End quotient.
pub fn end_contraction(space: &EndSpace, gv: bool) -> Result<Contraction> {
    let d_b = space.d_hom_matrix()?;
    let (f, h) = if gv {
        (space.pi_gv_matrix()?, space.p_gv_matrix()?)
    } else {
        (space.pi_t_matrix()?, space.p_t_matrix()?)
    };
    let g = space.i_h_matrix()?;
    let n_a = space.wedge_basis().len();
    Contraction::new(
        space.end_degrees(),
        space.wedge_degrees(),
        d_b,
        SparseMatrix::zero(n_a, n_a),
        f,
        g,
        h,
    )
}

pub fn perturbed_contractions(r: &CurvatureInput, config: ModelConfig) -> Result<PerturbedContractions> {
    check_truncation(&config)?;
    let space = EndSpace::weight_at_most(config, 0);
    let t = perturbation_t(r, config)?;
    let t_matrix = space.matrix_of(|f| commutator_t(&t, f))?;
    let transfer = end_contraction(&space, false)?;
    let duality = end_contraction(&space, true)?;
    let pt = Perturbation::new(&transfer, t_matrix.clone())?;
    let pg = Perturbation::new(&duality, t_matrix.clone())?;
    let transfer_perturbed = perturb(&transfer, &pt)?;
    let duality_perturbed = perturb(&duality, &pg)?;
    Ok(PerturbedContractions { space, t_matrix, transfer, transfer_perturbed, duality, duality_perturbed })
}

impl PerturbedContractions {
    /// `q_σ = π_T ∘ i_GV` from the perturbed matrices.
    pub fn q_sigma_matrix(&self) -> Result<SparseMatrix> {
        self.transfer_perturbed.f().mul(self.duality_perturbed.g())
    }

    pub fn apply_q(&self, eta: &GradedElement) -> Result<GradedElement> {
        let wedge = self.space.wedge_basis();
        let x = wedge.coordinates(eta)?;
        Ok(wedge.from_coordinates(&self.q_sigma_matrix()?.apply_sparse(&x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), Rational::one());
        assert_eq!(bernoulli(1), Rational::new(1, 2));
        assert_eq!(bernoulli(2), Rational::new(1, 6));
        assert_eq!(bernoulli(3), Rational::zero());
        assert_eq!(bernoulli(4), Rational::new(-1, 30));
        assert_eq!(bernoulli(6), Rational::new(1, 42));
    }

    #[test]
    fn todd_coefficients() {
        let t = todd_series(6);
        assert_eq!(t[0], Rational::one());
        assert_eq!(t[1], Rational::new(1, 2));
        assert_eq!(t[2], Rational::new(1, 12));
        assert_eq!(t[3], Rational::zero());
        assert_eq!(t[4], Rational::new(-1, 720));
        for n in 2..=6 {
            assert_eq!(t[n], bernoulli(n) / factorial(n as u64));
        }
    }

    #[test]
    fn zero_curvature_gives_unit_class() {
        let c = ModelConfig::new(2, 2, 3).unwrap();
        let r = CurvatureInput::zero(2, 2);
        assert_eq!(todd_exp(&r, c).unwrap().value(), &GradedElement::one(c));
        assert_eq!(todd_det(&r, c).unwrap().value(), &GradedElement::one(c));
        assert!(perturbation_t(&r, c).unwrap().is_zero());
    }
}
