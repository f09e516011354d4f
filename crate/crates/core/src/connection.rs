//! The curvature input `R ∈ W ⊗ S²V∨ ⊗ V`, the first connection component
//! `𝕂¹ = R̃ + R̄`, the recursion for the higher components and the matrices
//! `Alt[R^{⊗k}]`.
//!
//! `R[w; i ≤ j; k] = c` means `R̃(v_k) ∋ c·w·v_i·v_j`. The Hessian
//! `J_w[i][j][k] = ∂_i ∂_j R̃_w(v_k)` is symmetric in `i, j`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{GradedElement, ModelConfig, Monomial};
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::koszul::p_k;
use crate::rational::Rational;
use crate::rng::small_int;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CurvatureInput {
    d: usize,
    e: usize,
    entries: BTreeMap<(usize, usize, usize, usize), Rational>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    w: usize,
    i: usize,
    j: usize,
    k: usize,
    c: Rational,
}

#[derive(Serialize, Deserialize)]
struct CurvatureJson {
    d: usize,
    e: usize,
    entries: Vec<EntryJson>,
}

impl CurvatureInput {
    pub fn zero(d: usize, e: usize) -> Self {
        CurvatureInput { d, e, entries: BTreeMap::new() }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize, usize), &Rational)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    fn check_index(&self, w: usize, i: usize, j: usize, k: usize) -> Result<()> {
        if w >= self.e || i >= self.d || j >= self.d || k >= self.d {
            return Err(Error::Dimension(format!(
                "curvature index ({w},{i},{j},{k}) out of range for d={}, e={}",
                self.d, self.e
            )));
        }
        Ok(())
    }

    /// Add `c` to `R[w; i, j; k]`; the symmetric slot is normalized to `i ≤ j`.
    pub fn add(&mut self, w: usize, i: usize, j: usize, k: usize, c: &Rational) -> Result<()> {
        self.check_index(w, i, j, k)?;
        let key = (w, i.min(j), i.max(j), k);
        let v = self.entries.entry(key).or_insert_with(Rational::zero);
        *v += c;
        if v.is_zero() {
            self.entries.remove(&key);
        }
        Ok(())
    }

    pub fn get(&self, w: usize, i: usize, j: usize, k: usize) -> Rational {
        self.entries.get(&(w, i.min(j), i.max(j), k)).cloned().unwrap_or_else(Rational::zero)
    }

    /// `J_w[i][j][k]`: the entry for `i ≠ j`, twice the entry for `i = j`.
    pub fn hessian(&self, w: usize, i: usize, j: usize, k: usize) -> Rational {
        let r = self.get(w, i, j, k);
        if i == j {
            &r + &r
        } else {
            r
        }
    }

    /// Independent random entries in `[-2, 2]`.
    pub fn random_generic(d: usize, e: usize, rng: &mut impl Rng) -> Self {
        let mut out = CurvatureInput::zero(d, e);
        for w in 0..e {
            for i in 0..d {
                for j in i..d {
                    for k in 0..d {
                        let c = small_int(rng, 2);
                        out.add(w, i, j, k, &c).expect("indices in range");
                    }
                }
            }
        }
        out
    }

    /// `R̃(v_k) = Σ_w w·ℓ_w·v_k` with random linear forms `ℓ_w`. These fields
    /// commute pairwise, so `R̃² = 0`.
    pub fn random_integrable(d: usize, e: usize, rng: &mut impl Rng) -> Self {
        let mut out = CurvatureInput::zero(d, e);
        for w in 0..e {
            let ell: Vec<Rational> = (0..d).map(|_| small_int(rng, 2)).collect();
            for k in 0..d {
                for (i, c) in ell.iter().enumerate() {
                    out.add(w, i, k, k, c).expect("indices in range");
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = CurvatureJson {
            d: self.d,
            e: self.e,
            entries: self
                .entries
                .iter()
                .map(|(&(w, i, j, k), c)| EntryJson { w: w + 1, i: i + 1, j: j + 1, k: k + 1, c: c.clone() })
                .collect(),
        };
        serde_json::to_string(&doc).expect("serializable")
    }

    /// Parse `{"d":..,"e":..,"entries":[{"w","i","j","k","c"}]}` with 1-based
    /// indices and `i ≤ j`.
    pub fn from_json(json: &str) -> Result<Self> {
        let doc: CurvatureJson = serde_json::from_str(json)?;
        let mut out = CurvatureInput::zero(doc.d, doc.e);
        for ent in doc.entries {
            if ent.w == 0 || ent.i == 0 || ent.j == 0 || ent.k == 0 {
                return Err(Error::Parse("curvature indices are 1-based".into()));
            }
            if ent.i > ent.j {
                return Err(Error::Parse(format!("entry needs i ≤ j, got i={} j={}", ent.i, ent.j)));
            }
            out.add(ent.w - 1, ent.i - 1, ent.j - 1, ent.k - 1, &ent.c)?;
        }
        Ok(out)
    }

    pub fn check_config(&self, config: &ModelConfig) -> Result<()> {
        if self.d != config.d || self.e != config.e {
            return Err(Error::ConfigMismatch(format!(
                "curvature has d={}, e={} but the model has d={}, e={}",
                self.d, self.e, config.d, config.e
            )));
        }
        Ok(())
    }

    /// `R̃(v_k)`.
    pub fn r_tilde_values(&self, config: ModelConfig) -> Result<Vec<GradedElement>> {
        self.check_config(&config)?;
        let mut out = vec![GradedElement::zero(config); config.d];
        for (&(w, i, j, k), c) in &self.entries {
            let mut m = Monomial::form(w);
            m.s[i] += 1;
            m.s[j] += 1;
            out[k].add_term(m, c.clone());
        }
        Ok(out)
    }

    /// `R̄(v̄_k) = ½ Σ_{i,j} J_w[i][j][k] w v_j v̄_i`.
    pub fn r_bar_values(&self, config: ModelConfig) -> Result<Vec<GradedElement>> {
        self.check_config(&config)?;
        let half = Rational::new(1, 2);
        let mut out = vec![GradedElement::zero(config); config.d];
        for w in 0..self.e {
            for i in 0..self.d {
                for j in 0..self.d {
                    for (k, slot) in out.iter_mut().enumerate() {
                        let h = self.hessian(w, i, j, k);
                        if h.is_zero() {
                            continue;
                        }
                        let mut m = Monomial::form(w);
                        m.s[j] += 1;
                        m.a = 1 << i;
                        slot.add_term(m, &h * &half);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn r_tilde(&self, config: ModelConfig) -> Result<Derivation> {
        Derivation::new(config, 1, self.r_tilde_values(config)?, vec![GradedElement::zero(config); config.d])
    }

    pub fn r_bar(&self, config: ModelConfig) -> Result<Derivation> {
        Derivation::new(config, 1, vec![GradedElement::zero(config); config.d], self.r_bar_values(config)?)
    }

    /// `R̃ ∘ R̃ = 0` on the generators `v_k`.
    pub fn is_integrable(&self, config: ModelConfig) -> Result<bool> {
        let rt = self.r_tilde(config)?;
        for v in rt.on_sym() {
            if !rt.apply(v)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `𝕂¹ = R̃ + R̄` (the model has `∂̄ = 0`).
pub fn k1(r: &CurvatureInput, config: ModelConfig) -> Result<Derivation> {
    Derivation::new(config, 1, r.r_tilde_values(config)?, r.r_bar_values(config)?)
}

/// `d_K` as a derivation: `v̄_k ↦ v_k`.
pub fn d_k_derivation(config: ModelConfig) -> Derivation {
    let on_cov = (0..config.d)
        .map(|k| GradedElement::monomial(config, Monomial::sym(k), Rational::one()))
        .collect();
    Derivation::new(config, 1, vec![GradedElement::zero(config); config.d], on_cov).expect("well formed")
}

/// `d × d` matrix over the commutative even subalgebra.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EvenMatrix {
    config: ModelConfig,
    n: usize,
    entries: Vec<GradedElement>,
}

impl EvenMatrix {
    pub fn zero(config: ModelConfig, n: usize) -> Self {
        EvenMatrix { config, n, entries: vec![GradedElement::zero(config); n * n] }
    }

    pub fn identity(config: ModelConfig, n: usize) -> Self {
        let mut out = EvenMatrix::zero(config, n);
        for i in 0..n {
            out.entries[i * n + i] = GradedElement::one(config);
        }
        out
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &GradedElement {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GradedElement) {
        self.entries[i * self.n + j] = v;
    }

    pub fn add(&self, other: &EvenMatrix) -> EvenMatrix {
        EvenMatrix {
            config: self.config,
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> EvenMatrix {
        EvenMatrix { config: self.config, n: self.n, entries: self.entries.iter().map(|a| a.scale(c)).collect() }
    }

    pub fn mul(&self, other: &EvenMatrix) -> EvenMatrix {
        let n = self.n;
        let mut out = EvenMatrix::zero(self.config, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = GradedElement::zero(self.config);
                for l in 0..n {
                    acc.add_assign(&self.get(i, l).mul_unchecked(other.get(l, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> EvenMatrix {
        let mut out = EvenMatrix::identity(self.config, self.n);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn transpose(&self) -> EvenMatrix {
        let mut out = EvenMatrix::zero(self.config, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn trace(&self) -> GradedElement {
        let mut acc = GradedElement::zero(self.config);
        for i in 0..self.n {
            acc.add_assign(self.get(i, i));
        }
        acc
    }

    /// Leibniz expansion; entries commute.
    pub fn det(&self) -> GradedElement {
        let n = self.n;
        let mut acc = GradedElement::zero(self.config);
        let mut perm: Vec<usize> = (0..n).collect();
        permutations(&mut perm, 0, &mut |p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let mut term = GradedElement::one(self.config);
            for (i, &pi) in p.iter().enumerate() {
                term = term.mul_unchecked(self.get(i, pi));
                if term.is_zero() {
                    return;
                }
            }
            acc.add_scaled(&term, &Rational::sign(inversions));
        });
        acc
    }
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

/// `𝐑[j][k] = Σ_{w,i} J_w[i][j][k] · w v̄_i`.
pub fn curvature_matrix(r: &CurvatureInput, config: ModelConfig) -> Result<EvenMatrix> {
    r.check_config(&config)?;
    let d = config.d;
    let mut out = EvenMatrix::zero(config, d);
    for j in 0..d {
        for k in 0..d {
            let mut acc = GradedElement::zero(config);
            for w in 0..config.e {
                for i in 0..d {
                    let h = r.hessian(w, i, j, k);
                    if !h.is_zero() {
                        acc.add_term(Monomial { a: 1 << i, ..Monomial::form(w) }, h);
                    }
                }
            }
            out.set(j, k, acc);
        }
    }
    Ok(out)
}

/// `Alt[R^{⊗k}]` as the matrix power `𝐑^k`, entries in `Λ^kW ⊗ ∧^kV∨`.
pub fn alt_power(r: &CurvatureInput, config: ModelConfig, k: usize) -> Result<EvenMatrix> {
    Ok(curvature_matrix(r, config)?.pow(k))
}

/// The `S`-linear derivation `v̄_m ↦ Σ_j M[j][m] v_j`.
pub fn matrix_derivation(m: &EvenMatrix) -> Result<Derivation> {
    let config = m.config;
    let d = m.n;
    let mut on_cov = vec![GradedElement::zero(config); d];
    for (col, slot) in on_cov.iter_mut().enumerate() {
        for j in 0..d {
            let v = GradedElement::monomial(config, Monomial::sym(j), Rational::one());
            slot.add_assign(&m.get(j, col).mul_unchecked(&v));
        }
    }
    let parity = on_cov.iter().flat_map(|v| v.terms().map(|(x, _)| (x.parity() + 1) % 2)).next().unwrap_or(1);
    Derivation::new(config, parity, vec![GradedElement::zero(config); d], on_cov)
}

/// The connection components `𝕂⁰ = d_K, 𝕂¹, …` as derivations.
#[derive(Clone, Debug)]
pub struct Connection {
    config: ModelConfig,
    curvature: CurvatureInput,
    components: Vec<Derivation>,
}

impl Connection {
    pub fn new(r: &CurvatureInput, config: ModelConfig) -> Result<Self> {
        Ok(Connection {
            config,
            curvature: r.clone(),
            components: vec![d_k_derivation(config), k1(r, config)?],
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn curvature(&self) -> &CurvatureInput {
        &self.curvature
    }

    pub fn components(&self) -> &[Derivation] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &Derivation {
        &self.components[k]
    }

    pub fn max_order(&self) -> usize {
        self.components.len() - 1
    }

    /// `Σ_{i=a}^{b} 𝕂^i 𝕂^{k−i}` on a generator value `x`.
    fn square_part(&self, k: usize, from: usize, to: usize, x: &GradedElement) -> Result<GradedElement> {
        let mut acc = GradedElement::zero(self.config);
        for i in from..=to {
            let inner = self.components[k - i].apply(x)?;
            acc.add_assign(&self.components[i].apply(&inner)?);
        }
        Ok(acc)
    }

    /// `D = −Σ_{i=1}^{n} 𝕂^i 𝕂^{n+1−i}` on the generators `(v_k, v̄_k)`.
    pub fn obstruction(&self) -> Result<(Vec<GradedElement>, Vec<GradedElement>)> {
        let n = self.max_order();
        let eval = |x: &GradedElement| -> Result<GradedElement> { Ok(self.square_part(n + 1, 1, n, x)?.neg()) };
        let sym = (0..self.config.d)
            .map(|k| eval(&GradedElement::monomial(self.config, Monomial::sym(k), Rational::one())))
            .collect::<Result<Vec<_>>>()?;
        let cov = (0..self.config.d)
            .map(|k| eval(&GradedElement::monomial(self.config, Monomial::covector(k), Rational::one())))
            .collect::<Result<Vec<_>>>()?;
        Ok((sym, cov))
    }

    /// Append `𝕂^{n+1}`: the derivation with `v̄_k ↦ P_K(D(v̄_k))`.
    pub fn next_component(&mut self) -> Result<()> {
        let (sym, cov) = self.obstruction()?;
        if sym.iter().any(|v| !v.is_zero()) {
            return Err(Error::Precondition(format!(
                "the order-{} obstruction does not vanish on S(V∨); the curvature is not integrable",
                self.max_order() + 1
            )));
        }
        let values = cov.iter().map(p_k).collect::<Result<Vec<_>>>()?;
        let next = Derivation::new(self.config, 1, vec![GradedElement::zero(self.config); self.config.d], values)?;
        self.components.push(next);
        Ok(())
    }

    /// `Σ_{i=0}^{k} 𝕂^i 𝕂^{k−i}` on the generators; zero means the order-`k`
    /// part of `𝕂²` vanishes.
    pub fn square_on_generators(&self, k: usize) -> Result<(Vec<GradedElement>, Vec<GradedElement>)> {
        let n = self.max_order();
        let from = k.saturating_sub(n);
        let to = k.min(n);
        let sym = (0..self.config.d)
            .map(|i| self.square_part(k, from, to, &GradedElement::monomial(self.config, Monomial::sym(i), Rational::one())))
            .collect::<Result<Vec<_>>>()?;
        let cov = (0..self.config.d)
            .map(|i| {
                self.square_part(k, from, to, &GradedElement::monomial(self.config, Monomial::covector(i), Rational::one()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((sym, cov))
    }

    /// `𝕂 − 𝕂⁰` as one derivation.
    pub fn perturbation(&self) -> Result<Derivation> {
        let mut acc = Derivation::zero(self.config, 1);
        for c in &self.components[1..] {
            acc = acc.add(c)?;
        }
        Ok(acc)
    }
}

/// Build `𝕂⁰, …, 𝕂^{max_order}`.
pub fn build_connection(r: &CurvatureInput, config: ModelConfig, max_order: usize) -> Result<Connection> {
    let mut conn = Connection::new(r, config)?;
    if max_order == 0 {
        conn.components.truncate(1);
    }
    while conn.max_order() < max_order {
        conn.next_component()?;
    }
    Ok(conn)
}

/// Auxiliary tensor `A ∈ W ⊗ U∨ ⊗ S²V∨`, keyed `(w, u, i ≤ j)`.
pub type GammaLeft = BTreeMap<(usize, usize, usize, usize), Rational>;
/// Auxiliary tensor `B ∈ W ⊗ U ⊗ End(V∨)`, keyed `(w, u, p, q)` for `v_q ↦ v_p`.
pub type GammaRight = BTreeMap<(usize, usize, usize, usize), Rational>;
/// `Λ²W ⊗ S²V∨ ⊗ End(V∨)`, keyed `(w₁ < w₂, i ≤ j, p, q)`.
pub type GammaTensor = BTreeMap<(usize, usize, usize, usize, usize, usize), Rational>;

/// Contract the `U` slots of `A` and `B` and wedge the form slots.
pub fn gamma_compose(a: &GammaLeft, b: &GammaRight, u_dim: usize) -> Result<GammaTensor> {
    let mut out = GammaTensor::new();
    for (&(w1, u1, i, j), ca) in a {
        if u1 >= u_dim || i > j {
            return Err(Error::Dimension(format!("bad left index ({w1},{u1},{i},{j})")));
        }
        for (&(w2, u2, p, q), cb) in b {
            if u2 >= u_dim {
                return Err(Error::Dimension(format!("bad right index ({w2},{u2},{p},{q})")));
            }
            if u1 != u2 || w1 == w2 {
                continue;
            }
            let (lo, hi, c) = if w1 < w2 { (w1, w2, ca * cb) } else { (w2, w1, -(ca * cb)) };
            let key = (lo, hi, i, j, p, q);
            let v = out.entry(key).or_insert_with(Rational::zero);
            *v += &c;
            if v.is_zero() {
                out.remove(&key);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn json_roundtrip() {
        let r = CurvatureInput::random_generic(2, 2, &mut stream(1, "json"));
        let back = CurvatureInput::from_json(&r.to_json()).unwrap();
        assert_eq!(r, back);
        assert!(CurvatureInput::from_json(r#"{"d":2,"e":1,"entries":[{"w":1,"i":2,"j":1,"k":1,"c":"1"}]}"#).is_err());
    }

    #[test]
    fn zero_curvature_gives_d_k_only() {
        let c = ModelConfig::new(2, 2, 3).unwrap();
        let conn = build_connection(&CurvatureInput::zero(2, 2), c, 2).unwrap();
        assert!(conn.component(1).is_zero());
        assert!(conn.component(2).is_zero());
    }

    #[test]
    fn k1_anticommutes_with_d_k() {
        let c = ModelConfig::new(2, 2, 3).unwrap();
        let r = CurvatureInput::random_generic(2, 2, &mut stream(3, "anti"));
        let k = k1(&r, c).unwrap();
        let bracket = d_k_derivation(c).bracket(&k).unwrap();
        assert!(bracket.is_zero());
    }

    #[test]
    fn r_bar_is_half_r_and_minus_p_k_of_r_tilde() {
        let c = ModelConfig::new(1, 1, 3).unwrap();
        let mut r = CurvatureInput::zero(1, 1);
        r.add(0, 0, 0, 0, &Rational::from_int(3)).unwrap();
        // R̃(v) = 3 w v², R̄(v̄) = ½·6 w v v̄ = 3 w v v̄
        let bar = r.r_bar_values(c).unwrap();
        let want = GradedElement::monomial(c, Monomial { s: [1, 0, 0, 0], a: 1, ..Monomial::form(0) }, Rational::from_int(3));
        assert_eq!(bar[0], want);
    }

    #[test]
    fn integrable_family_squares_to_zero() {
        let c = ModelConfig::new(2, 3, 4).unwrap();
        for s in 0..5 {
            let r = CurvatureInput::random_integrable(2, 3, &mut stream(s, "int"));
            assert!(r.is_integrable(c).unwrap());
        }
    }

    #[test]
    fn determinant_and_trace() {
        let c = ModelConfig::new(2, 4, 2).unwrap();
        let r = CurvatureInput::random_integrable(2, 4, &mut stream(5, "det"));
        let m = curvature_matrix(&r, c).unwrap();
        let det = m.det();
        let direct = m.get(0, 0).mul_unchecked(m.get(1, 1)).sub(&m.get(0, 1).mul_unchecked(m.get(1, 0)));
        assert_eq!(det, direct);
        // tr(M²) = tr(M)² − 2 det(M) for 2×2 matrices over a commutative ring
        let lhs = m.pow(2).trace();
        let t = m.trace();
        let rhs = t.mul_unchecked(&t).sub(&det.scale(&Rational::from_int(2)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn gamma_rank_one() {
        let mut a = GammaLeft::new();
        a.insert((0, 1, 0, 1), Rational::from_int(2));
        let mut b = GammaRight::new();
        b.insert((1, 1, 0, 0), Rational::from_int(3));
        b.insert((0, 0, 0, 0), Rational::from_int(5));
        let g = gamma_compose(&a, &b, 2).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[&(0, 1, 0, 1, 0, 0)], Rational::from_int(6));
        assert!(gamma_compose(&GammaLeft::new(), &b, 2).unwrap().is_empty());
    }
}
