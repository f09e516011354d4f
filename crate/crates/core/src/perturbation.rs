//! Basic perturbation lemma over finite-dimensional graded ℚ-spaces.
//!
//! A contraction `(d_B, d_A, F: B → A, G: A → B, H: B → B)` satisfies
//! `FG = 1`, `1 − GF = d_B H + H d_B` and the side conditions
//! `FH = 0`, `HH = 0`, `HG = 0`. A perturbation `t` with `(d_B + t)² = 0` and
//! `tH` nilpotent yields a new contraction through `X = Σ_k (−1)^k (tH)^k t`.

use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sparse::SparseMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    b_degrees: Vec<i64>,
    a_degrees: Vec<i64>,
    d_b: SparseMatrix,
    d_a: SparseMatrix,
    f: SparseMatrix,
    g: SparseMatrix,
    h: SparseMatrix,
}

fn shape(m: &SparseMatrix, rows: usize, cols: usize, name: &str) -> Result<()> {
    if m.nrows() != rows || m.ncols() != cols {
        return Err(Error::Dimension(format!(
            "{name} is {}x{}, expected {rows}x{cols}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

impl Contraction {
    /// Validate and build. Every defining identity is checked exactly.
    pub fn new(
        b_degrees: Vec<i64>,
        a_degrees: Vec<i64>,
        d_b: SparseMatrix,
        d_a: SparseMatrix,
        f: SparseMatrix,
        g: SparseMatrix,
        h: SparseMatrix,
    ) -> Result<Self> {
        let (nb, na) = (b_degrees.len(), a_degrees.len());
        shape(&d_b, nb, nb, "d_B")?;
        shape(&d_a, na, na, "d_A")?;
        shape(&f, na, nb, "F")?;
        shape(&g, nb, na, "G")?;
        shape(&h, nb, nb, "H")?;
        let c = Contraction { b_degrees, a_degrees, d_b, d_a, f, g, h };
        let bad = c.violations()?;
        if !bad.is_empty() {
            return Err(Error::InvalidContraction(bad.join(", ")));
        }
        Ok(c)
    }

    /// Names of the defining identities that fail.
    pub fn violations(&self) -> Result<Vec<&'static str>> {
        let (b, a) = (&self.b_degrees, &self.a_degrees);
        let mut bad = Vec::new();
        if !self.d_b.has_degree(b, b, 1) {
            bad.push("deg d_B = 1");
        }
        if !self.d_a.has_degree(a, a, 1) {
            bad.push("deg d_A = 1");
        }
        if !self.f.has_degree(b, a, 0) {
            bad.push("deg F = 0");
        }
        if !self.g.has_degree(a, b, 0) {
            bad.push("deg G = 0");
        }
        if !self.h.has_degree(b, b, -1) {
            bad.push("deg H = -1");
        }
        if !self.d_b.mul(&self.d_b)?.is_zero() {
            bad.push("d_B² = 0");
        }
        if !self.d_a.mul(&self.d_a)?.is_zero() {
            bad.push("d_A² = 0");
        }
        if self.f.mul(&self.d_b)? != self.d_a.mul(&self.f)? {
            bad.push("F d_B = d_A F");
        }
        if self.d_b.mul(&self.g)? != self.g.mul(&self.d_a)? {
            bad.push("d_B G = G d_A");
        }
        if self.f.mul(&self.g)? != SparseMatrix::identity(a.len()) {
            bad.push("FG = 1");
        }
        let homotopy = self.d_b.mul(&self.h)?.add(&self.h.mul(&self.d_b)?)?;
        let defect = SparseMatrix::identity(b.len()).sub(&self.g.mul(&self.f)?)?;
        if homotopy != defect {
            bad.push("1 − GF = d_B H + H d_B");
        }
        if !self.f.mul(&self.h)?.is_zero() {
            bad.push("FH = 0");
        }
        if !self.h.mul(&self.h)?.is_zero() {
            bad.push("HH = 0");
        }
        if !self.h.mul(&self.g)?.is_zero() {
            bad.push("HG = 0");
        }
        Ok(bad)
    }

    pub fn b_degrees(&self) -> &[i64] {
        &self.b_degrees
    }

    pub fn a_degrees(&self) -> &[i64] {
        &self.a_degrees
    }

    pub fn d_b(&self) -> &SparseMatrix {
        &self.d_b
    }

    pub fn d_a(&self) -> &SparseMatrix {
        &self.d_a
    }

    pub fn f(&self) -> &SparseMatrix {
        &self.f
    }

    pub fn g(&self) -> &SparseMatrix {
        &self.g
    }

    pub fn h(&self) -> &SparseMatrix {
        &self.h
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perturbation {
    t: SparseMatrix,
    nilpotency: usize,
}

impl Perturbation {
    /// Checks degree `+1`, `(d_B + t)² = 0` and `(tH)^k = 0` for some
    /// `k ≤ dim B + 1`.
    pub fn new(c: &Contraction, t: SparseMatrix) -> Result<Self> {
        let nb = c.b_degrees.len();
        shape(&t, nb, nb, "t")?;
        if !t.has_degree(&c.b_degrees, &c.b_degrees, 1) {
            return Err(Error::InvalidPerturbation("t must have degree +1".into()));
        }
        let total = c.d_b.add(&t)?;
        if !total.mul(&total)?.is_zero() {
            return Err(Error::InvalidPerturbation("(d_B + t)² ≠ 0".into()));
        }
        let th = t.mul(&c.h)?;
        let nilpotency = th
            .nilpotency_index(nb + 1)?
            .ok_or_else(|| Error::InvalidPerturbation("tH is not nilpotent".into()))?;
        Ok(Perturbation { t, nilpotency })
    }

    pub fn t(&self) -> &SparseMatrix {
        &self.t
    }

    /// Smallest `k` with `(tH)^k = 0`.
    pub fn nilpotency(&self) -> usize {
        self.nilpotency
    }
}

/// `X = Σ_k (−1)^k (tH)^k t`.
pub fn x_series(c: &Contraction, p: &Perturbation) -> Result<SparseMatrix> {
    let th = p.t.mul(&c.h)?;
    let mut term = p.t.clone();
    let mut x = term.clone();
    for _ in 0..p.nilpotency {
        term = th.mul(&term)?.neg();
        if term.is_zero() {
            return Ok(x);
        }
        x = x.add(&term)?;
    }
    if term.is_zero() {
        Ok(x)
    } else {
        Err(Error::SeriesBound { what: "X", bound: p.nilpotency })
    }
}

/// `X = t − tHX`.
pub fn x_is_fixed_point(c: &Contraction, p: &Perturbation, x: &SparseMatrix) -> Result<bool> {
    Ok(*x == p.t.sub(&p.t.mul(&c.h)?.mul(x)?)?)
}

/// `(d_B + t, d_A + FXG, F(1 − XH), (1 − HX)G, H − HXH)`.
pub fn perturb(c: &Contraction, p: &Perturbation) -> Result<Contraction> {
    let x = x_series(c, p)?;
    let nb = c.b_degrees.len();
    let id = SparseMatrix::identity(nb);
    let xh = x.mul(&c.h)?;
    let hx = c.h.mul(&x)?;
    let d_b = c.d_b.add(&p.t)?;
    let d_a = c.d_a.add(&c.f.mul(&x)?.mul(&c.g)?)?;
    let f = c.f.mul(&id.sub(&xh)?)?;
    let g = id.sub(&hx)?.mul(&c.g)?;
    let h = c.h.sub(&hx.mul(&c.h)?)?;
    Contraction::new(c.b_degrees.clone(), c.a_degrees.clone(), d_b, d_a, f, g, h).map_err(|e| match e {
        Error::InvalidContraction(msg) => {
            Error::InvalidPerturbation(format!("perturbed data is not a contraction: {msg}"))
        }
        other => other,
    })
}

fn random_nonzero(rng: &mut impl Rng) -> Rational {
    let p = *[-3i64, -2, -1, 1, 2, 3].choose(rng).expect("nonempty");
    let q = rng.gen_range(1..=2);
    Rational::new(p, q)
}

/// Inverse of a unipotent `1 + N` with `N` nilpotent.
fn unipotent_inverse(n: &SparseMatrix) -> Result<SparseMatrix> {
    let dim = n.nrows();
    let mut inv = SparseMatrix::identity(dim);
    let mut term = SparseMatrix::identity(dim);
    for _ in 0..=dim {
        term = n.mul(&term)?.neg();
        if term.is_zero() {
            return Ok(inv);
        }
        inv = inv.add(&term)?;
    }
    Err(Error::Precondition("matrix is not unipotent".into()))
}

/// A random valid contraction and perturbation on a space of dimension at
/// most `max_dim`.
///
/// `B = A ⊕ (acyclic pairs)`, conjugated by a random unipotent change of
/// basis. Every vector also carries a weight that `d_B`, `H`, `F`, `G`
/// preserve; `t` is built as `Ψ d_B Ψ^{-1} − d_B` with `Ψ − 1` strictly raising
/// weight, so `(d_B + t)² = 0` and `tH` is nilpotent.
pub fn random_pair(rng: &mut impl Rng, max_dim: usize) -> Result<(Contraction, Perturbation)> {
    let max_dim = max_dim.max(3);
    let n_a = rng.gen_range(1..=(max_dim / 3).max(1));
    let n_pairs = rng.gen_range(1..=((max_dim - n_a) / 2).max(1));
    let nb = n_a + 2 * n_pairs;
    let mut deg = vec![0i64; nb];
    let mut weight = vec![0u32; nb];
    let mut d_b = SparseMatrix::zero(nb, nb);
    let mut h = SparseMatrix::zero(nb, nb);
    let mut d_a = SparseMatrix::zero(n_a, n_a);
    for i in 0..n_a {
        deg[i] = rng.gen_range(-2..=2);
        weight[i] = rng.gen_range(0..3);
    }
    // a few differential pairs inside A
    let mut used = vec![false; n_a];
    for i in 0..n_a {
        for j in 0..n_a {
            if i != j && !used[i] && !used[j] && rng.gen_bool(0.3) {
                deg[j] = deg[i] + 1;
                weight[j] = weight[i];
                let c = random_nonzero(rng);
                d_a.set(j, i, c.clone());
                d_b.set(j, i, c);
                used[i] = true;
                used[j] = true;
            }
        }
    }
    for p in 0..n_pairs {
        let (x, y) = (n_a + 2 * p, n_a + 2 * p + 1);
        deg[x] = rng.gen_range(-2..=2);
        deg[y] = deg[x] + 1;
        weight[x] = rng.gen_range(0..3);
        weight[y] = weight[x];
        let c = random_nonzero(rng);
        h.set(x, y, c.recip());
        d_b.set(y, x, c);
    }
    let mut f = SparseMatrix::zero(n_a, nb);
    let mut g = SparseMatrix::zero(nb, n_a);
    for i in 0..n_a {
        f.set(i, i, Rational::one());
        g.set(i, i, Rational::one());
    }
    // Φ = 1 + N, N strictly lower in index, same degree and weight
    let mut n = SparseMatrix::zero(nb, nb);
    let mut m = SparseMatrix::zero(nb, nb);
    for i in 0..nb {
        for j in 0..nb {
            if deg[i] != deg[j] {
                continue;
            }
            if weight[i] == weight[j] && i > j && rng.gen_bool(0.3) {
                n.set(i, j, random_nonzero(rng));
            }
            if weight[i] > weight[j] && rng.gen_bool(0.3) {
                m.set(i, j, random_nonzero(rng));
            }
        }
    }
    let id_b = SparseMatrix::identity(nb);
    let phi = id_b.add(&n)?;
    let phi_inv = unipotent_inverse(&n)?;
    let d_b = phi.mul(&d_b)?.mul(&phi_inv)?;
    let h = phi.mul(&h)?.mul(&phi_inv)?;
    let g = phi.mul(&g)?;
    let f = f.mul(&phi_inv)?;
    let psi = id_b.add(&m)?;
    let psi_inv = unipotent_inverse(&m)?;
    let t = psi.mul(&d_b)?.mul(&psi_inv)?.sub(&d_b)?;
    let a_deg = deg[..n_a].to_vec();
    let c = Contraction::new(deg, a_deg, d_b, d_a, f, g, h)?;
    let p = Perturbation::new(&c, t)?;
    Ok((c, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn cone_example() -> Contraction {
        // A = ⟨a⟩ in degree 0, B = ⟨a, x, y⟩ with d x = y
        let mut d_b = SparseMatrix::zero(3, 3);
        d_b.set(2, 1, Rational::one());
        let mut h = SparseMatrix::zero(3, 3);
        h.set(1, 2, Rational::one());
        let mut f = SparseMatrix::zero(1, 3);
        f.set(0, 0, Rational::one());
        let mut g = SparseMatrix::zero(3, 1);
        g.set(0, 0, Rational::one());
        Contraction::new(vec![0, -1, 0], vec![0], d_b, SparseMatrix::zero(1, 1), f, g, h).unwrap()
    }

    #[test]
    fn zero_perturbation_is_identity() {
        let c = cone_example();
        let p = Perturbation::new(&c, SparseMatrix::zero(3, 3)).unwrap();
        assert_eq!(perturb(&c, &p).unwrap(), c);
    }

    #[test]
    fn side_conditions_are_required() {
        let c = cone_example();
        let mut h = c.h().clone();
        h.set(0, 2, Rational::one());
        let err = Contraction::new(
            c.b_degrees().to_vec(),
            c.a_degrees().to_vec(),
            c.d_b().clone(),
            c.d_a().clone(),
            c.f().clone(),
            c.g().clone(),
            h,
        );
        assert!(err.is_err());
    }

    #[test]
    fn random_pairs_perturb_to_contractions() {
        let mut rng = stream(11, "perturbation-unit");
        for _ in 0..5 {
            let (c, p) = random_pair(&mut rng, 30).unwrap();
            let x = x_series(&c, &p).unwrap();
            assert!(x_is_fixed_point(&c, &p, &x).unwrap());
            perturb(&c, &p).unwrap();
        }
    }
}
