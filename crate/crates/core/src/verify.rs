//! Named invariant suites and the report they produce.
//!
//! Each check aggregates many cases. `lhs` is the number of cases where the
//! identity holds and `rhs` the number of cases, so a check passes exactly
//! when the two agree. Scalar checks put the two sides themselves there.

use std::time::Instant;

use num_traits::One;
use rand::Rng;
use serde::Serialize;

use crate::algebra::{GradedElement, ModelConfig, Monomial};
use crate::combinatorics::{bernoulli_recursion_check, compositions, lemma_frac_check, partitions};
use crate::connection::{alt_power, build_connection, curvature_matrix, matrix_derivation, CurvatureInput};
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::hom::{d_hom, d_hom_operator, p_t, wedge_basis, EndElement, EndSpace};
use crate::koszul::{
    commutator_is_euler, d_k, d_kcheck, i_k, p_k, p_kcheck, pi_k, pi_kcheck, twist, twist_differential_sign,
    twist_homotopy_sign, KoszulSpace,
};
use crate::perturbation::{perturb, random_pair, x_is_fixed_point, x_series};
use crate::rational::{binomial, Rational};
use crate::rng::{small_int, stream};
use crate::sparse::SparseMatrix;
use crate::todd::{
    end_contract, perturbation_t, perturbed_contractions, q_sigma, q_sigma_series, q_step, single_step_rhs,
    todd_det, todd_exp, todd_series,
};

pub const SUITES: [&str; 7] = ["koszul", "hom", "perturbation", "connection", "todd", "combinatorics", "all"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub lhs: String,
    pub rhs: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub config: ModelConfig,
    pub checks: Vec<Check>,
    pub overall: bool,
}

impl Report {
    pub fn new(suite: &str, config: ModelConfig, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let overall = checks.iter().all(Check::passed);
        Report { suite: suite.to_string(), config, checks, overall }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut out = format!("suite {} (d={}, e={}, m={}, seed={})\n", self.suite, c.d, c.e, c.m, c.seed);
        for ch in &self.checks {
            let tag = if ch.passed() { "PASS" } else { "FAIL" };
            out.push_str(&format!("  {tag} {}: {} / {}", ch.name, ch.lhs, ch.rhs));
            if let Some(ms) = ch.elapsed_ms {
                out.push_str(&format!(" ({ms} ms)"));
            }
            out.push('\n');
            if let Some(d) = &ch.detail {
                out.push_str(&format!("       {d}\n"));
            }
        }
        out.push_str(if self.overall { "overall: pass\n" } else { "overall: fail\n" });
        out
    }
}

/// Counts cases of one identity; the first failure is kept for the report.
#[derive(Clone, Default)]
pub struct Tally {
    ok: usize,
    total: usize,
    first_failure: Option<String>,
}

impl Tally {
    pub fn record(&mut self, holds: bool, describe: impl FnOnce() -> String) {
        self.total += 1;
        if holds {
            self.ok += 1;
        } else if self.first_failure.is_none() {
            self.first_failure = Some(describe());
        }
    }

    pub fn record_eq(&mut self, case: impl FnOnce() -> String, lhs: &GradedElement, rhs: &GradedElement) {
        let holds = lhs == rhs;
        self.record(holds, || format!("{}: {} vs {}", case(), lhs.to_json(), rhs.to_json()));
    }

    pub fn merge(&mut self, other: Tally) {
        self.ok += other.ok;
        self.total += other.total;
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
    }

    pub fn ok(&self) -> usize {
        self.ok
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn holds(&self) -> bool {
        self.ok == self.total
    }

    pub fn into_check(self, name: &str) -> Check {
        Check {
            name: name.to_string(),
            status: if self.holds() { Status::Pass } else { Status::Fail },
            lhs: self.ok.to_string(),
            rhs: self.total.to_string(),
            detail: self.first_failure,
            elapsed_ms: None,
        }
    }
}

fn scalar_check(name: &str, lhs: &Rational, rhs: &Rational) -> Check {
    Check {
        name: name.to_string(),
        status: if lhs == rhs { Status::Pass } else { Status::Fail },
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        detail: None,
        elapsed_ms: None,
    }
}

fn error_check(name: &str, err: &Error) -> Check {
    Check {
        name: name.to_string(),
        status: Status::Fail,
        lhs: "error".into(),
        rhs: "-".into(),
        detail: Some(err.to_string()),
        elapsed_ms: None,
    }
}

/// Compare two matrices column by column on `cols`.
pub fn matrix_tally(a: &SparseMatrix, b: &SparseMatrix, cols: &[usize]) -> Tally {
    let mut t = Tally::default();
    for &j in cols {
        let holds = a.column(j) == b.column(j);
        t.record(holds, || format!("column {j} differs"));
    }
    t
}

fn zero_tally(a: &SparseMatrix, cols: &[usize]) -> Tally {
    let z = SparseMatrix::zero(a.nrows(), a.ncols());
    matrix_tally(a, &z, cols)
}

// ---------------------------------------------------------------------------
// Koszul
// ---------------------------------------------------------------------------

pub fn koszul_checks(config: ModelConfig) -> Result<Vec<Check>> {
    let space = KoszulSpace::new(config);
    let m = config.m;
    let mut out = Vec::new();
    for dual in [false, true] {
        let prefix = if dual { "koszul_dual" } else { "koszul" };
        let basis = if dual { space.dual_basis() } else { space.basis() };
        let (d, p, proj) = if dual {
            (space.d_kcheck_matrix(), space.p_kcheck_matrix(), space.kcheck_projector())
        } else {
            (space.d_k_matrix(), space.p_k_matrix(), space.k_projector())
        };
        let safe = space.safe_columns(dual);
        let safe2 = basis.indices_where(|x| x.sym_degree() + 2 <= m);
        let n = basis.len();
        out.push(zero_tally(&d.mul(&d)?, &safe2).into_check(&format!("{prefix}.d_squared")));
        out.push(zero_tally(&p.mul(&p)?, &(0..n).collect::<Vec<_>>()).into_check(&format!("{prefix}.p_squared")));
        let homotopy = d.mul(&p)?.add(&p.mul(&d)?)?;
        let defect = SparseMatrix::identity(n).sub(&proj)?;
        out.push(matrix_tally(&homotopy, &defect, &safe).into_check(&format!("{prefix}.homotopy")));
        let all: Vec<usize> = (0..n).collect();
        let mut side = zero_tally(&p.mul(&proj)?, &all);
        side.merge(zero_tally(&proj.mul(&p)?, &all));
        side.merge(zero_tally(&proj.mul(&d)?, &safe));
        out.push(side.into_check(&format!("{prefix}.side_conditions")));
        let mut pi_i = Tally::default();
        for x in basis.monomials().iter().filter(|x| x.sym_degree() == 0 && x.a == 0) {
            let elt = GradedElement::monomial(config, *x, Rational::one());
            if dual {
                if x.b != config.top_mask() {
                    continue;
                }
                let back = pi_kcheck(&crate::koszul::i_kcheck(&elt)?)?;
                pi_i.record_eq(|| format!("{x:?}"), &back, &elt);
            } else {
                if x.b != 0 {
                    continue;
                }
                pi_i.record_eq(|| format!("{x:?}"), &pi_k(&i_k(&elt)?)?, &elt);
            }
        }
        out.push(pi_i.into_check(&format!("{prefix}.pi_i")));
    }
    let mut euler = Tally::default();
    let mut twisted = Tally::default();
    for x in space.basis().monomials().iter().filter(|x| x.sym_degree() < m) {
        euler.record(commutator_is_euler(x, config), || format!("{x:?}"));
        let elt = GradedElement::monomial(config, *x, Rational::one());
        let (q, a) = (x.form_degree(), x.covector_degree());
        let lhs = twist(&d_k(&elt)?)?;
        let rhs = d_kcheck(&twist(&elt)?)?.scale(&twist_differential_sign(q, a));
        twisted.record_eq(|| format!("d at {x:?}"), &lhs, &rhs);
        let lhs = twist(&p_k(&elt)?)?;
        let rhs = p_kcheck(&twist(&elt)?)?.scale(&twist_homotopy_sign(q, a));
        twisted.record_eq(|| format!("P at {x:?}"), &lhs, &rhs);
    }
    out.push(euler.into_check("koszul.euler_commutator"));
    out.push(twisted.into_check("koszul.twist_intertwines"));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Hom
// ---------------------------------------------------------------------------

pub fn hom_checks(config: ModelConfig) -> Result<Vec<Check>> {
    let space = EndSpace::full(config);
    let basis = space.basis();
    let n = basis.len();
    let nw = space.wedge_basis().len();
    let m = config.m;
    let safe = basis.indices_where(|x| x.sym_degree() + 2 <= m);
    let all: Vec<usize> = (0..n).collect();
    let wedge_all: Vec<usize> = (0..nw).collect();
    let d = space.d_hom_matrix()?;
    let i = space.i_h_matrix()?;
    let mut out = Vec::new();
    out.push(zero_tally(&d.mul(&d)?, &safe).into_check("hom.d_squared"));
    let mut deg = Tally::default();
    deg.record(d.has_degree(&space.end_degrees(), &space.end_degrees(), 1), || "d_Hom".into());
    out.push(deg.into_check("hom.d_degree"));
    out.push(zero_tally(&d.mul(&i)?, &wedge_all).into_check("hom.d_i_zero"));
    for (label, pi, p) in [
        ("t", space.pi_t_matrix()?, space.p_t_matrix()?),
        ("gv", space.pi_gv_matrix()?, space.p_gv_matrix()?),
    ] {
        let homotopy = d.mul(&p)?.add(&p.mul(&d)?)?;
        let defect = SparseMatrix::identity(n).sub(&i.mul(&pi)?)?;
        out.push(matrix_tally(&homotopy, &defect, &safe).into_check(&format!("hom.{label}.homotopy")));
        out.push(
            matrix_tally(&pi.mul(&i)?, &SparseMatrix::identity(nw), &wedge_all)
                .into_check(&format!("hom.{label}.pi_i")),
        );
        let mut side = zero_tally(&p.mul(&p)?, &all);
        side.merge(zero_tally(&p.mul(&i)?, &wedge_all));
        side.merge(zero_tally(&pi.mul(&p)?, &all));
        side.merge(zero_tally(&pi.mul(&d)?, &safe));
        out.push(side.into_check(&format!("hom.{label}.side_conditions")));
    }
    let r = space.residue_matrix()?;
    out.push(matrix_tally(&r, &i.mul(&space.pi_t_matrix()?)?, &safe).into_check("hom.residue"));
    let mut oracle = Tally::default();
    for x in basis.monomials().iter().filter(|x| x.sym_degree() < m) {
        let f = EndElement::new(GradedElement::monomial(config, *x, Rational::one()));
        let via_op = d_hom_operator(&f)?;
        oracle.record_eq(|| format!("{x:?}"), via_op.value(), d_hom(&f).value());
    }
    out.push(oracle.into_check("hom.d_operator_oracle"));
    out.push(derivation_tally(config)?.into_check("hom.derivation_p_t"));
    Ok(out)
}

/// A random odd `S`-linear derivation whose generator values have symmetric
/// degree in `1..m`.
pub fn random_s_linear_derivation(config: ModelConfig, rng: &mut impl Rng) -> Result<Derivation> {
    let mut values = Vec::new();
    for _ in 0..config.d {
        let mut v = GradedElement::zero(config);
        for _ in 0..3 {
            let mut mono = Monomial::ONE;
            let l = rng.gen_range(1..config.m.max(2));
            for _ in 0..l {
                mono.s[rng.gen_range(0..config.d)] += 1;
            }
            mono.a = rng.gen_range(0..(1u16 << config.d)) as u8;
            if config.e > 0 {
                mono.w = rng.gen_range(0..(1u32 << config.e)) as u16;
            }
            // odd derivation: values have even total parity
            if mono.parity() % 2 == 1 {
                if mono.a & 1 == 1 {
                    mono.a &= !1;
                } else {
                    mono.a |= 1;
                }
            }
            if mono.sym_degree() >= config.m {
                continue;
            }
            v.add_term(mono, small_int(rng, 3));
        }
        values.push(v);
    }
    Derivation::new(config, 1, vec![GradedElement::zero(config); config.d], values)
}

fn derivation_tally(config: ModelConfig) -> Result<Tally> {
    let mut t = Tally::default();
    if config.m < 2 {
        return Ok(t);
    }
    let mut rng = stream(config.seed, "hom.derivation");
    for case in 0..5 {
        let der = random_s_linear_derivation(config, &mut rng)?;
        let lhs = p_t(&der.to_end()?)?;
        let values = der.element()?.p_k();
        let rhs = Derivation::from_element(&values)?.to_end()?;
        t.record_eq(|| format!("case {case}"), lhs.value(), rhs.value());
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Perturbation
// ---------------------------------------------------------------------------

pub fn perturbation_checks(seed: u64, pairs: usize, max_dim: usize) -> Result<Vec<Check>> {
    let mut valid = Tally::default();
    let mut fixed = Tally::default();
    let mut rng = stream(seed, "perturbation.pairs");
    for case in 0..pairs {
        let (c, p) = random_pair(&mut rng, max_dim)?;
        match perturb(&c, &p) {
            Ok(out) => valid.record(out.violations()?.is_empty(), || format!("pair {case}")),
            Err(e) => valid.record(false, || format!("pair {case}: {e}")),
        }
        let x = x_series(&c, &p)?;
        fixed.record(x_is_fixed_point(&c, &p, &x)?, || format!("pair {case}"));
    }
    Ok(vec![
        valid.into_check("perturbation.perturbed_is_contraction"),
        fixed.into_check("perturbation.x_fixed_point"),
    ])
}

// ---------------------------------------------------------------------------
// Connection
// ---------------------------------------------------------------------------

/// Default highest connection order: `Alt[R^{⊗k}]` vanishes for `k > min(d, e)`.
pub fn default_max_order(config: &ModelConfig) -> usize {
    config.d.min(config.e).max(1)
}

pub fn connection_checks(config: ModelConfig, max_order: usize, samples: usize) -> Result<Vec<Check>> {
    let mut coeff: Vec<Tally> = (0..=max_order).map(|_| Tally::default()).collect();
    let mut integrable = Tally::default();
    let mut t_matches = Tally::default();
    let mut orient = Tally::default();
    for sample in 0..samples {
        let mut rng = stream(config.seed.wrapping_add(sample as u64), "connection.curvature");
        let r = CurvatureInput::random_integrable(config.d, config.e, &mut rng);
        connection_sample(&r, config, max_order, &mut coeff, &mut integrable, &mut t_matches, &mut orient)?;
    }
    let mut out = Vec::new();
    for (k, t) in coeff.into_iter().enumerate().skip(1) {
        out.push(t.into_check(&format!("connection.k{k}_coefficient")));
    }
    out.push(integrable.into_check("connection.square_zero"));
    out.push(t_matches.into_check("connection.perturbation_t"));
    out.push(orient.into_check("connection.k1_orientation"));
    Ok(out)
}

fn connection_sample(
    r: &CurvatureInput,
    config: ModelConfig,
    max_order: usize,
    coeff: &mut [Tally],
    integrable: &mut Tally,
    t_matches: &mut Tally,
    orient: &mut Tally,
) -> Result<()> {
    let conn = build_connection(r, config, max_order)?;
    let t = todd_series(max_order);
    for k in 1..=max_order {
        let expected = matrix_derivation(&alt_power(r, config, k)?.scale(&t[k]))?;
        let got = conn.component(k);
        for (g, e) in got.on_cov().iter().zip(expected.on_cov()) {
            let first = g.filter(|x| x.sym_degree() == 1);
            coeff[k].record_eq(|| format!("order {k}"), &first, e);
        }
        if k == 1 {
            let rt = r.r_tilde_values(config)?;
            for (g, e) in got.on_sym().iter().zip(&rt) {
                coeff[k].record_eq(|| "R̃ part".into(), g, e);
            }
            let transposed = matrix_derivation(&curvature_matrix(r, config)?.transpose().scale(&t[1]))?;
            let differs = transposed.on_cov() != expected.on_cov();
            let symmetric_input = curvature_matrix(r, config)? == curvature_matrix(r, config)?.transpose();
            orient.record(differs || symmetric_input, || "transpose also matches".into());
        }
    }
    for k in 0..=max_order {
        let (sym, cov) = conn.square_on_generators(k)?;
        let holds = sym.iter().chain(cov.iter()).all(GradedElement::is_zero);
        integrable.record(holds, || format!("order {k}"));
    }
    if max_order >= default_max_order(&config) {
        let lhs = perturbation_t(r, config)?;
        let rhs = conn.perturbation()?;
        t_matches.record(lhs == rhs, || "t differs from 𝕂 − d_K".into());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Todd
// ---------------------------------------------------------------------------

/// Per-identity tallies of the Todd pipeline over several curvature samples.
#[derive(Default)]
pub struct ToddTallies {
    pub routes: Tally,
    pub main: Tally,
    pub engine: Tally,
    pub series: Tally,
    pub single_step: Tally,
    pub lemma: Tally,
    pub t_matches: Tally,
    pub w_linear: Tally,
}

impl ToddTallies {
    pub fn merge(&mut self, o: ToddTallies) {
        self.routes.merge(o.routes);
        self.main.merge(o.main);
        self.engine.merge(o.engine);
        self.series.merge(o.series);
        self.single_step.merge(o.single_step);
        self.lemma.merge(o.lemma);
        self.t_matches.merge(o.t_matches);
        self.w_linear.merge(o.w_linear);
    }

    pub fn into_checks(self) -> Vec<Check> {
        vec![
            self.routes.into_check("todd.exp_equals_det"),
            self.main.into_check("todd.main_theorem"),
            self.engine.into_check("todd.engine_route"),
            self.series.into_check("todd.series_route"),
            self.single_step.into_check("todd.single_step"),
            self.lemma.into_check("todd.perturbed_projections"),
            self.t_matches.into_check("todd.perturbation_t"),
            self.w_linear.into_check("todd.w_linear"),
        ]
    }
}

/// Every Todd-pipeline identity for one curvature input.
pub fn todd_sample(r: &CurvatureInput, config: ModelConfig) -> Result<ToddTallies> {
    let mut out = ToddTallies::default();
    let te = todd_exp(r, config)?;
    let td = todd_det(r, config)?;
    out.routes.record_eq(|| "Td".into(), te.value(), td.value());
    let conn = build_connection(r, config, default_max_order(&config))?;
    out.t_matches.record(conn.perturbation()? == perturbation_t(r, config)?, || "t differs from 𝕂 − d_K".into());
    let pc = perturbed_contractions(r, config)?;
    let lemma = pc.transfer_perturbed.f() == pc.transfer.f()
        && pc.duality_perturbed.f() == pc.duality.f()
        && pc.transfer_perturbed.d_a().is_zero()
        && pc.duality_perturbed.d_a().is_zero();
    out.lemma.record(lemma, || "perturbed projections or differentials changed".into());
    let t = perturbation_t(r, config)?;
    let d = config.d;
    for m in wedge_basis(config).monomials() {
        let eta = GradedElement::monomial(config, *m, Rational::one());
        let case = || format!("η = {}", eta.to_json());
        out.single_step.record_eq(case, &q_step(&t, &eta)?, &single_step_rhs(r, config, &eta)?);
        if m.vector_degree() != d {
            continue;
        }
        let q = q_sigma(r, config, &eta)?;
        out.main.record_eq(case, &q, &td.contract(&eta)?);
        out.engine.record_eq(case, &pc.apply_q(&eta)?, &q);
        out.series.record_eq(case, &q_sigma_series(r, config, &eta)?, &q);
        for w in 0..config.e {
            let form = GradedElement::monomial(config, Monomial::form(w), Rational::one());
            let lhs = q_sigma(r, config, &form.multiply(&eta)?)?;
            let rhs = form.multiply(&q)?;
            out.w_linear.record_eq(case, &lhs, &rhs);
        }
    }
    Ok(out)
}

pub fn todd_checks(config: ModelConfig, samples: usize) -> Result<Vec<Check>> {
    let mut all = ToddTallies::default();
    for sample in 0..samples {
        let mut rng = stream(config.seed.wrapping_add(sample as u64), "todd.curvature");
        let r = CurvatureInput::random_integrable(config.d, config.e, &mut rng);
        all.merge(todd_sample(&r, config)?);
    }
    let mut zero = Tally::default();
    let r0 = CurvatureInput::zero(config.d, config.e);
    for m in wedge_basis(config).monomials() {
        let eta = GradedElement::monomial(config, *m, Rational::one());
        zero.record_eq(|| format!("{m:?}"), &q_sigma(&r0, config, &eta)?, &eta);
    }
    let one = GradedElement::one(config);
    let mut pairing = Tally::default();
    if config.d >= 2 {
        let mut v12 = Monomial::ONE;
        v12.a = 0b11;
        let mut e12 = Monomial::ONE;
        e12.b = 0b11;
        let omega = GradedElement::monomial(config, v12, Rational::one());
        let eta = GradedElement::monomial(config, e12, Rational::one());
        pairing.record_eq(|| "v̄1v̄2 ⌟ e1e2".into(), &end_contract(&omega, &eta)?, &one.neg());
    }
    let mut checks = all.into_checks();
    checks.push(zero.into_check("todd.zero_curvature"));
    checks.push(pairing.into_check("todd.end_pairing"));
    Ok(checks)
}

// ---------------------------------------------------------------------------
// Combinatorics
// ---------------------------------------------------------------------------

pub fn combinatorics_checks(max_l: u64, max_k: usize, max_n: usize) -> Result<Vec<Check>> {
    let mut frac = Tally::default();
    let mut counts = Tally::default();
    for l in 1..=max_l {
        for k in 1..=max_k.min(l as usize) {
            for parts in partitions(l, k) {
                let (lhs, rhs) = lemma_frac_check(&parts)?;
                frac.record(lhs == rhs, || format!("{parts:?}: {lhs} vs {rhs}"));
            }
            let n = Rational::from_int(compositions(l, k).len() as i64);
            let expected = binomial(l - 1, k as u64 - 1);
            counts.record(n == expected, || format!("|C({l},{k})| = {n}, expected {expected}"));
        }
    }
    let mut bern = Tally::default();
    for n in 2..=max_n {
        let (lhs, rhs) = bernoulli_recursion_check(n)?;
        bern.record(lhs == rhs, || format!("n = {n}: {lhs} vs {rhs}"));
    }
    let (l2, r2) = bernoulli_recursion_check(2)?;
    Ok(vec![
        frac.into_check("combinatorics.fraction_identity"),
        counts.into_check("combinatorics.composition_count"),
        bern.into_check("combinatorics.bernoulli_convolution"),
        scalar_check("combinatorics.bernoulli_convolution_n2", &l2, &r2),
    ])
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Default)]
pub struct SuiteOptions {
    pub max_order: Option<usize>,
    pub timings: bool,
}

fn run_one(suite: &str, config: ModelConfig, opts: &SuiteOptions) -> Result<Vec<Check>> {
    let checks = match suite {
        "koszul" => koszul_checks(config)?,
        "hom" => hom_checks(config)?,
        "perturbation" => perturbation_checks(config.seed, 10, 60)?,
        "connection" => {
            let order = opts.max_order.unwrap_or_else(|| default_max_order(&config));
            connection_checks(config, order, 3)?
        }
        "todd" => {
            if config.m < config.d + 1 {
                return Err(Error::InvalidConfig(format!(
                    "the todd suite needs m ≥ d + 1 (got m={}, d={})",
                    config.m, config.d
                )));
            }
            todd_checks(config, 2)?
        }
        "combinatorics" => combinatorics_checks(12, 6, 15)?,
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok(checks)
}

/// Run a named suite (or `all`) at one configuration.
pub fn run_suite(suite: &str, config: ModelConfig, opts: &SuiteOptions) -> Result<Report> {
    let names: Vec<&str> = match suite {
        "all" => SUITES[..SUITES.len() - 1].to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    let mut checks = Vec::new();
    for name in names {
        if name == "todd" && suite == "all" && config.m < config.d + 1 {
            continue;
        }
        let start = Instant::now();
        let mut part = match run_one(name, config, opts) {
            Ok(p) => p,
            Err(e @ (Error::InvalidConfig(_) | Error::UnknownSuite(_))) => return Err(e),
            Err(e) => vec![error_check(&format!("{name}.completed"), &e)],
        };
        if opts.timings {
            let ms = start.elapsed().as_millis() as u64;
            for c in &mut part {
                c.elapsed_ms = Some(ms);
            }
        }
        checks.extend(part);
    }
    Ok(Report::new(suite, config, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_is_sorted_and_conjunctive() {
        let mk = |n: &str, ok: bool| Check {
            name: n.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            lhs: "1".into(),
            rhs: "1".into(),
            detail: None,
            elapsed_ms: None,
        };
        let r = Report::new("x", ModelConfig::new(1, 1, 2).unwrap(), vec![mk("b", true), mk("a", false)]);
        assert_eq!(r.checks[0].name, "a");
        assert!(!r.overall);
        let json = r.to_json();
        assert!(!json.contains("elapsed_ms"));
    }

    #[test]
    fn unknown_suite_is_an_error() {
        let c = ModelConfig::new(1, 1, 2).unwrap();
        assert!(matches!(run_suite("nope", c, &SuiteOptions::default()), Err(Error::UnknownSuite(_))));
    }
}
