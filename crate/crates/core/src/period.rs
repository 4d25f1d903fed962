//! Regularized periods on a relative fan from toy exponent data.
//!
//! A form is a list of exponent data `(λ, q, c)` per fan cell `P`, standing for the
//! constant term `Σ q(H) e^{⟨λ+ρ_P, H⟩}` along `P` with inner period `c`. The inner
//! periods are opaque constants, so only the cone-level part of the period formula
//! is modelled; independence of the base point `T'` is not testable here.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{cdot, cq, creal, fmt_complex, fmt_rational, parse_complex_vector, primitive, q, qq, RatString, CQ, Q};
use crate::cones::{Cone, Subspace};
use crate::error::{Error, Result};
use crate::fan::{FanCell, RelativeFan};
use crate::roots::Parabolic;
use crate::transforms::{
    laplace_cone, laplace_gamma_symbolic, monte_carlo_cross_check, ExactScalar, McEstimate, Poly, PolyExp,
};

/// The character `ξ` as a complexified vector of `a_0'`.
#[derive(Clone, Debug, PartialEq)]
pub struct Character {
    pub xi: Vec<CQ>,
}

impl Character {
    pub fn new(xi: Vec<CQ>) -> Self {
        Character { xi }
    }

    pub fn zero(n: usize) -> Self {
        Character { xi: vec![cq(Q::zero(), Q::zero()); n] }
    }

    pub fn parse(s: &str) -> Result<Self> {
        parse_complex_vector(s).map(Character::new)
    }

    /// True when `ξ` has components outside `z_G = a_G ∩ a_0'`.
    pub fn off_center(&self, fan: &RelativeFan) -> bool {
        let zg = fan.whole().z();
        let re: Vec<Q> = self.xi.iter().map(|z| z.re.clone()).collect();
        let im: Vec<Q> = self.xi.iter().map(|z| z.im.clone()).collect();
        !(zg.contains(&re) && zg.contains(&im))
    }

    fn check(&self, fan: &RelativeFan) -> Result<()> {
        if self.xi.len() != fan.dim() {
            return Err(Error::Dimension { expected: fan.dim(), got: self.xi.len() });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentDatum {
    pub lambda: Vec<CQ>,
    /// Polynomial on `a_0'`; only its restriction to `z_P^G` is used.
    pub q: Poly<Q>,
    /// The inner period.
    pub c: CQ,
}

impl ExponentDatum {
    pub fn new(lambda: Vec<CQ>, q: Poly<Q>, c: CQ) -> Self {
        ExponentDatum { lambda, q, c }
    }

    /// `q = 1`, `c = 1`.
    pub fn simple(lambda: Vec<CQ>) -> Self {
        let n = lambda.len();
        ExponentDatum { lambda, q: Poly::one(n), c: creal(Q::one()) }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ToyFormData {
    pub cells: BTreeMap<Parabolic, Vec<ExponentDatum>>,
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    cells: BTreeMap<String, Vec<DatumJson>>,
}

fn one_string() -> RatString {
    RatString(Q::one())
}

fn zero_string() -> RatString {
    RatString(Q::zero())
}

fn default_q() -> String {
    "1".into()
}

#[derive(Serialize, Deserialize)]
struct DatumJson {
    lambda_re: Vec<RatString>,
    #[serde(default)]
    lambda_im: Vec<RatString>,
    #[serde(default = "default_q")]
    q: String,
    #[serde(default = "one_string")]
    c_re: RatString,
    #[serde(default = "zero_string")]
    c_im: RatString,
}

impl ToyFormData {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, p: &Parabolic, d: ExponentDatum) {
        self.cells.entry(p.clone()).or_default().push(d);
    }

    pub fn is_empty(&self) -> bool {
        self.cells.values().all(|v| v.is_empty())
    }

    /// Data in canonical (cell, index) order.
    pub fn data(&self) -> impl Iterator<Item = (&Parabolic, usize, &ExponentDatum)> {
        self.cells.iter().flat_map(|(p, v)| v.iter().enumerate().map(move |(i, d)| (p, i, d)))
    }

    /// Every cell exists in the fan and all vectors and polynomials have the fan's arity.
    pub fn validate(&self, fan: &RelativeFan) -> Result<()> {
        let n = fan.dim();
        for (p, _, d) in self.data() {
            fan.cell(p)?;
            if d.lambda.len() != n {
                return Err(Error::Dimension { expected: n, got: d.lambda.len() });
            }
            if d.q.nvars() != n {
                return Err(Error::Dimension { expected: n, got: d.q.nvars() });
            }
        }
        Ok(())
    }

    /// JSON: `{"cells": {"<cell-id>": [{"lambda_re", "lambda_im", "q", "c_re", "c_im"}]}}`.
    /// Cell ids are display ids such as `({1},{2})` or nested 1-based lists.
    pub fn from_json(s: &str, fan: &RelativeFan) -> Result<Self> {
        let j: FormJson = serde_json::from_str(s)?;
        let n = fan.dim();
        let mut out = ToyFormData::new();
        for (id, data) in j.cells {
            let p = fan.cell_by_id(&id)?.parabolic.clone();
            for d in data {
                if d.lambda_re.len() != n || !(d.lambda_im.is_empty() || d.lambda_im.len() == n) {
                    return Err(Error::Dimension { expected: n, got: d.lambda_re.len() });
                }
                let lambda = (0..n)
                    .map(|i| cq(d.lambda_re[i].0.clone(), d.lambda_im.get(i).map(|x| x.0.clone()).unwrap_or_default()))
                    .collect();
                let q = Poly::parse(&d.q, n)?;
                out.push(&p, ExponentDatum::new(lambda, q, cq(d.c_re.0, d.c_im.0)));
            }
        }
        out.validate(fan)?;
        Ok(out)
    }

    pub fn to_json(&self, fan: &RelativeFan) -> Result<String> {
        let mut cells = BTreeMap::new();
        for (p, data) in &self.cells {
            let id = fan.cell(p)?.id();
            let v: Vec<DatumJson> = data
                .iter()
                .map(|d| DatumJson {
                    lambda_re: d.lambda.iter().map(|z| RatString(z.re.clone())).collect(),
                    lambda_im: d.lambda.iter().map(|z| RatString(z.im.clone())).collect(),
                    q: d.q.to_string(),
                    c_re: RatString(d.c.re.clone()),
                    c_im: RatString(d.c.im.clone()),
                })
                .collect();
            cells.insert(id, v);
        }
        Ok(serde_json::to_string_pretty(&FormJson { cells })?)
    }
}

/// `⟨μ, X⟩` in the inner product of `a_0'`.
fn pair(fan: &RelativeFan, mu: &[CQ], x: &[Q]) -> CQ {
    cdot(mu, &fan.space().lower(x))
}

fn is_zero_c(z: &CQ) -> bool {
    z.re.is_zero() && z.im.is_zero()
}

/// `μ = λ + ρ̲_P + ξ`.
pub fn shifted_exponent(cell: &FanCell, d: &ExponentDatum, xi: &Character) -> Vec<CQ> {
    d.lambda
        .iter()
        .zip(&cell.rho)
        .zip(&xi.xi)
        .map(|((l, r), x)| l + creal(r.clone()) + x)
        .collect()
}

/// A datum whose shifted exponent pairs to zero with `z_Q^G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Offense {
    pub cell: String,
    pub index: usize,
    /// The maximal cell `Q ⊇ P` whose line is hit.
    pub wall: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Regularity {
    pub regular: bool,
    pub offending: Vec<Offense>,
}

/// Maximal cells `Q ⊇ P`: the rays of `z̄_P^+` modulo `z_G`.
fn walls<'a>(fan: &'a RelativeFan, p: &Parabolic) -> Vec<&'a FanCell> {
    fan.maximal_cells().into_iter().filter(|q| p.is_contained_in(&q.parabolic)).collect()
}

/// `ξ`-regularity: `⟨λ + ξ + ρ̲_P, z_Q^G⟩ ≠ 0` for every datum at `P` and every
/// maximal `Q ⊇ P`. These lines are exactly the pole lines of the transform of `z̄_P^+`.
pub fn is_xi_regular(fan: &RelativeFan, form: &ToyFormData, xi: &Character) -> Result<Regularity> {
    form.validate(fan)?;
    xi.check(fan)?;
    let mut offending = Vec::new();
    for (p, i, d) in form.data() {
        let cell = fan.cell(p)?;
        let mu = shifted_exponent(cell, d, xi);
        for q in walls(fan, p) {
            if is_zero_c(&pair(fan, &mu, &q.z_rel.basis()[0])) {
                offending.push(Offense { cell: cell.id(), index: i, wall: q.id() });
            }
        }
    }
    Ok(Regularity { regular: offending.is_empty(), offending })
}

/// `z_P^G ∩ z̄_P^+`.
fn relative_cone(cell: &FanCell) -> Result<Cone> {
    let sub = Cone::subspace(cell.cone.space(), cell.z_rel.basis())?;
    cell.cone.intersect(&sub)
}

/// `Re(λ + ξ) + ρ̲_P ∈ −rint (z_P^G ∩ z̄_P^+)^∨` for every datum.
pub fn integrability(fan: &RelativeFan, form: &ToyFormData, xi: &Character) -> Result<bool> {
    form.validate(fan)?;
    xi.check(fan)?;
    for (p, _, d) in form.data() {
        let cell = fan.cell(p)?;
        let mu = shifted_exponent(cell, d, xi);
        let neg_re: Vec<Q> = mu.iter().map(|z| -z.re.clone()).collect();
        if !relative_cone(cell)?.dual().rint_contains(&neg_re) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `H ↦ q(P_W H + s)` with `P_W` the projection onto `z_P^G`.
fn restricted_weight(q: &Poly<Q>, w: &Subspace, s: &[Q]) -> Poly<Q> {
    let n = q.nvars();
    let rows: Vec<Vec<Q>> = (0..n)
        .map(|j| {
            let mut e = vec![Q::zero(); n];
            e[j] = Q::one();
            w.project(&e)
        })
        .collect();
    // rows[j] is P_W e_j, so (P_W H)_i = Σ_j rows[j][i] H_j
    let subs: Vec<Poly<Q>> = (0..n)
        .map(|i| {
            let a: Vec<Q> = rows.iter().map(|r| r[i].clone()).collect();
            Poly::linear(&a).add(&Poly::constant(n, s[i].clone()))
        })
        .collect();
    q.compose(&subs)
}

/// Per-datum ingredients: the shifted exponent, the weight `(q)_{T'}` and the scalar
/// `c·e^{⟨μ, T'_P⟩}`.
struct Term<'a> {
    cell: &'a FanCell,
    mu: Vec<CQ>,
    weight: Poly<Q>,
    scalar: ExactScalar,
}

fn terms<'a>(fan: &'a RelativeFan, form: &ToyFormData, xi: &Character, t_prime: &[Q]) -> Result<Vec<Term<'a>>> {
    form.validate(fan)?;
    xi.check(fan)?;
    fan.space().check(t_prime)?;
    form.data()
        .map(|(p, _, d)| {
            let cell = fan.cell(p)?;
            let mu = shifted_exponent(cell, d, xi);
            let tp = cell.z().project(t_prime);
            let tpg = cell.z_rel.project(t_prime);
            let weight = restricted_weight(&d.q, &cell.z_rel, &tpg);
            let scalar = ExactScalar::exp(&pair(fan, &mu, &tp)).scale(&d.c);
            Ok(Term { cell, mu, weight, scalar })
        })
        .collect()
}

/// `Σ_P Σ_i c_i e^{⟨μ_i, T'_P⟩} 𝓕(Γ(z̄_P^+), T, (q_i)_{T'}, μ_i)` as a function of the symbolic `T`.
pub fn truncated_period_expansion(
    fan: &RelativeFan,
    form: &ToyFormData,
    xi: &Character,
    t_prime: &[Q],
) -> Result<PolyExp> {
    let ts = terms(fan, form, xi, t_prime)?;
    let parts: Vec<Result<PolyExp>> = ts
        .par_iter()
        .map(|t| Ok(laplace_gamma_symbolic(&t.cell.cone, &t.weight)?.to_polyexp(&t.mu)?.scale(&t.scalar)))
        .collect();
    let mut out = PolyExp::zero(fan.dim());
    for p in parts {
        out = out.add(&p?);
    }
    Ok(out)
}

/// `Σ_P Σ_i c_i e^{⟨μ_i, T'_P⟩} 𝓕(z̄_P^+, (q_i)_{T'}, μ_i)`; requires `ξ`-regularity.
pub fn regularized_period(fan: &RelativeFan, form: &ToyFormData, xi: &Character, t_prime: &[Q]) -> Result<ExactScalar> {
    let reg = is_xi_regular(fan, form, xi)?;
    if !reg.regular {
        return Err(Error::Irregular(reg.offending.into_iter().map(|o| (o.cell, o.index)).collect()));
    }
    let ts = terms(fan, form, xi, t_prime)?;
    let parts: Vec<Result<ExactScalar>> = ts
        .par_iter()
        .map(|t| Ok(&laplace_cone(&t.cell.cone, &t.weight)?.eval(&t.mu, None)? * &t.scalar))
        .collect();
    let mut total = ExactScalar::zero();
    for p in parts {
        total = total + p?;
    }
    Ok(total)
}

/// Monte Carlo estimate of the convergent period integral, datum by datum.
pub fn period_monte_carlo(
    fan: &RelativeFan,
    form: &ToyFormData,
    xi: &Character,
    t_prime: &[Q],
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    let ts = terms(fan, form, xi, t_prime)?;
    let (mut re, mut im, mut v_re, mut v_im) = (0.0, 0.0, 0.0, 0.0);
    for (k, t) in ts.iter().enumerate() {
        let e = monte_carlo_cross_check(&t.cell.cone, &t.weight, &t.mu, samples, seed.wrapping_add(k as u64))?;
        let (wr, wi) = t.scalar.to_c64();
        re += wr * e.re - wi * e.im;
        im += wr * e.im + wi * e.re;
        let mag2 = wr * wr + wi * wi;
        let s2 = e.stderr_re.powi(2) + e.stderr_im.powi(2);
        v_re += mag2 * s2;
        v_im += mag2 * s2;
    }
    Ok(McEstimate { re, im, stderr_re: v_re.sqrt(), stderr_im: v_im.sqrt(), samples, seed })
}

/// Exact value with a floating approximation, for reports.
#[derive(Clone, Debug, Serialize)]
pub struct ScalarReport {
    pub exact: String,
    pub approx: [f64; 2],
}

impl From<&ExactScalar> for ScalarReport {
    fn from(s: &ExactScalar) -> Self {
        let (re, im) = s.to_c64();
        ScalarReport { exact: s.to_string(), approx: [re, im] }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodReport {
    pub fan: String,
    pub xi: Vec<String>,
    pub t_prime: Vec<String>,
    pub regularity: Regularity,
    pub integrable: bool,
    pub value: Option<ScalarReport>,
    pub expansion: Option<String>,
    /// `Some(true)` when the constant part of the expansion equals the value.
    pub constant_term_matches: Option<bool>,
    pub warnings: Vec<String>,
}

/// Everything the `period` command prints.
pub fn period_report(
    fan: &RelativeFan,
    form: &ToyFormData,
    xi: &Character,
    t_prime: &[Q],
    with_expansion: bool,
) -> Result<PeriodReport> {
    let regularity = is_xi_regular(fan, form, xi)?;
    let integrable = integrability(fan, form, xi)?;
    let mut warnings = Vec::new();
    if xi.off_center(fan) {
        warnings.push("xi has components outside a_G ∩ a_0'".to_string());
    }
    let value = if regularity.regular { Some(regularized_period(fan, form, xi, t_prime)?) } else { None };
    let (expansion, matches) = if with_expansion {
        let e = truncated_period_expansion(fan, form, xi, t_prime)?;
        let m = value.as_ref().map(|v| constant_part_equals(&e, v));
        (Some(e.to_string()), m)
    } else {
        (None, None)
    };
    Ok(PeriodReport {
        fan: fan.config.name.clone(),
        xi: xi.xi.iter().map(fmt_complex).collect(),
        t_prime: t_prime.iter().map(fmt_rational).collect(),
        regularity,
        integrable,
        value: value.as_ref().map(ScalarReport::from),
        expansion,
        constant_term_matches: matches,
        warnings,
    })
}

/// The purely polynomial part of `e` is the constant `v`.
pub fn constant_part_equals(e: &PolyExp, v: &ExactScalar) -> bool {
    let p = e.purely_polynomial_part();
    (p.is_zero() && v.is_zero()) || (p.degree() == 0 && &p.constant_term() == v)
}

/// Parameters for random forms.
#[derive(Clone, Debug)]
pub struct FormSampler {
    pub max_data_per_cell: usize,
    pub max_degree: u32,
    pub complex: bool,
    /// Keep `Re μ` in the convergence region at every datum.
    pub integrable: bool,
}

impl Default for FormSampler {
    fn default() -> Self {
        FormSampler { max_data_per_cell: 2, max_degree: 2, complex: true, integrable: false }
    }
}

fn small_rational(rng: &mut ChaCha8Rng) -> Q {
    qq(rng.gen_range(-6..=6), rng.gen_range(1..=3))
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize, deg: u32) -> Poly<Q> {
    let mut p = Poly::constant(n, small_rational(rng));
    for _ in 0..rng.gen_range(0..=2) {
        let d = rng.gen_range(1..=deg.max(1));
        let mut m = Poly::constant(n, small_rational(rng));
        for _ in 0..d {
            m = m.mul(&Poly::var(n, rng.gen_range(0..n)));
        }
        p = p.add(&m);
    }
    if deg == 0 {
        Poly::constant(n, small_rational(rng))
    } else {
        p
    }
}

/// A random `ξ` supported on `z_G`.
pub fn random_character(fan: &RelativeFan, rng: &mut ChaCha8Rng) -> Character {
    let n = fan.dim();
    let mut xi = vec![cq(Q::zero(), Q::zero()); n];
    for b in fan.whole().z().basis() {
        let (a, c) = (small_rational(rng), small_rational(rng));
        for (x, v) in xi.iter_mut().zip(b) {
            *x = &*x + cq(&a * v, &c * v);
        }
    }
    Character::new(xi)
}

/// A random form with at least one datum; with `integrable` set, exponents are drawn
/// by rejection until `Re μ` lies in the convergence region.
pub fn random_form(fan: &RelativeFan, xi: &Character, cfg: &FormSampler, rng: &mut ChaCha8Rng) -> Result<ToyFormData> {
    let mut form = ToyFormData::new();
    while form.is_empty() {
        for cell in fan.cells() {
            if rng.gen_bool(0.5) {
                continue;
            }
            let k = rng.gen_range(1..=cfg.max_data_per_cell.max(1));
            for _ in 0..k {
                let d = random_datum(fan, cell, xi, cfg, rng)?;
                form.push(&cell.parabolic, d);
            }
        }
    }
    Ok(form)
}

fn random_datum(
    fan: &RelativeFan,
    cell: &FanCell,
    xi: &Character,
    cfg: &FormSampler,
    rng: &mut ChaCha8Rng,
) -> Result<ExponentDatum> {
    let n = fan.dim();
    let dual = relative_cone(cell)?.dual();
    for _ in 0..1000 {
        let lambda: Vec<CQ> = (0..n)
            .map(|_| {
                let im = if cfg.complex { small_rational(rng) } else { Q::zero() };
                cq(small_rational(rng), im)
            })
            .collect();
        let q = if cfg.integrable {
            // 1 + ℓ², positive on the whole cell
            let l: Vec<Q> = (0..n).map(|_| qq(rng.gen_range(-2..=2), 2)).collect();
            let lin = Poly::linear(&l);
            Poly::one(n).add(&lin.mul(&lin))
        } else {
            random_poly(rng, n, cfg.max_degree)
        };
        let c = if cfg.integrable {
            creal(qq(rng.gen_range(1..=4), 2))
        } else {
            cq(small_rational(rng), if cfg.complex { small_rational(rng) } else { Q::zero() })
        };
        let d = ExponentDatum::new(lambda, q, c);
        if !cfg.integrable {
            return Ok(d);
        }
        let mu = shifted_exponent(cell, &d, xi);
        let neg_re: Vec<Q> = mu.iter().map(|z| -z.re.clone()).collect();
        // stay away from the boundary so that the sampled integrals converge quickly
        let margin = walls(fan, &cell.parabolic).iter().all(|w| {
            let ray = oriented_ray(w);
            fan.space().inner(&neg_re, &ray) >= qq(1, 2) * fan.space().norm2(&ray)
        });
        if dual.rint_contains(&neg_re) && margin {
            return Ok(d);
        }
    }
    Err(Error::Input(format!("no integrable exponent found for {}", cell.id())))
}

/// The generator of `z_Q^G ∩ z̄_Q^+`, primitive in the coordinates of `a_0'`.
fn oriented_ray(cell: &FanCell) -> Vec<Q> {
    primitive(&cell.z_rel.project(&cell.cone.rint_point()))
}

/// One correction term `m · e^{(sgn·s + a)⟨ϖ_Q, T⟩} / (sgn·s + a)` with `a = c(1 − 2c_Q)`.
#[derive(Clone, Debug, Serialize)]
pub struct EisensteinTerm {
    pub cell: String,
    pub sign: i8,
    #[serde(serialize_with = "ser_q")]
    pub c_q: Q,
    /// `a = c(1 − 2c_Q)`.
    #[serde(serialize_with = "ser_q")]
    pub shift: Q,
    /// `ϖ_Q`.
    #[serde(serialize_with = "ser_qs")]
    pub varpi: Vec<Q>,
    /// `⟨ϖ_Q, T⟩`.
    #[serde(serialize_with = "ser_q")]
    pub pairing: Q,
    #[serde(serialize_with = "ser_c")]
    pub scalar: CQ,
    /// The root of `sgn·s + a`.
    #[serde(serialize_with = "ser_q")]
    pub pole: Q,
    pub formula: String,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(x))
}

fn ser_qs<S: serde::Serializer>(x: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(x.iter().map(fmt_rational))
}

fn ser_c<S: serde::Serializer>(x: &CQ, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_complex(x))
}

impl EisensteinTerm {
    /// `sgn·s + a`.
    pub fn denominator(&self, s: &CQ) -> CQ {
        creal(Q::from_integer(self.sign.into())) * s + creal(self.shift.clone())
    }

    pub fn eval(&self, s: &CQ) -> Result<ExactScalar> {
        let d = self.denominator(s);
        if is_zero_c(&d) {
            return Err(Error::Pole(format!("s = {}", fmt_rational(&self.pole))));
        }
        let e = &d * creal(self.pairing.clone());
        Ok(ExactScalar::exp(&e).scale(&self.scalar).div_cq(&d))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EisensteinReport {
    pub fan: String,
    #[serde(serialize_with = "ser_q")]
    pub c: Q,
    #[serde(serialize_with = "ser_qs")]
    pub t: Vec<Q>,
    pub terms: Vec<EisensteinTerm>,
    #[serde(serialize_with = "ser_qs")]
    pub poles: Vec<Q>,
}

/// Correction terms for cells `Q` with `dim z_Q^G = 1`, two per `Q` (`sgn = ±1`).
/// `scalars` supplies the inner integrals `m_{Q,w}` keyed by `(Q, sgn)`; missing ones are 1.
pub fn eisenstein_correction_terms(
    fan: &RelativeFan,
    class: &[Parabolic],
    c: &Q,
    c_q: &BTreeMap<Parabolic, Q>,
    t: &[Q],
    scalars: &BTreeMap<(Parabolic, i8), CQ>,
) -> Result<EisensteinReport> {
    fan.space().check(t)?;
    let mut terms = Vec::new();
    for p in class {
        let cell = fan.cell(p)?;
        if !cell.is_maximal() {
            return Err(Error::NotMaximal(cell.id()));
        }
        let cqv = c_q.get(p).ok_or_else(|| Error::MissingCq(cell.id()))?;
        let shift = c * (Q::one() - q(2) * cqv);
        let varpi = oriented_ray(cell);
        let pairing = fan.space().inner(&varpi, t);
        for sign in [1i8, -1] {
            let scalar = scalars.get(&(p.clone(), sign)).cloned().unwrap_or_else(|| creal(Q::one()));
            let pole = -&shift * Q::from_integer(sign.into());
            let s_part = if sign > 0 { "s" } else { "-s" };
            let a = fmt_rational(&shift);
            let formula = format!(
                "({m})·exp(({s_part} + {a})·{k})/({s_part} + {a})",
                m = fmt_complex(&scalar),
                k = fmt_rational(&pairing)
            );
            terms.push(EisensteinTerm {
                cell: cell.id(),
                sign,
                c_q: cqv.clone(),
                shift: shift.clone(),
                varpi: varpi.clone(),
                pairing: pairing.clone(),
                scalar,
                pole,
                formula,
            });
        }
    }
    let mut poles: Vec<Q> = terms.iter().map(|t| t.pole.clone()).collect();
    poles.sort();
    poles.dedup();
    Ok(EisensteinReport { fan: fan.config.name.clone(), c: c.clone(), t: t.to_vec(), terms, poles })
}

/// The computed `c_Q^{G'}` for every maximal cell.
pub fn computed_c_values(fan: &RelativeFan) -> Result<BTreeMap<Parabolic, Q>> {
    fan.maximal_cells()
        .into_iter()
        .map(|cell| Ok((cell.parabolic.clone(), fan.c_coefficient(&cell.parabolic)?.value)))
        .collect()
}

/// Seeded generator shared by the random form helpers.
pub fn form_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::{build_relative_fan, EmbeddingConfig};

    fn fan(name: &str) -> RelativeFan {
        build_relative_fan(&EmbeddingConfig::builtin(name).unwrap()).unwrap()
    }

    fn positive_ray(f: &RelativeFan) -> Parabolic {
        f.maximal_cells().into_iter().find(|c| c.cone.rint_point()[0] > Q::zero()).unwrap().parabolic.clone()
    }

    fn real(v: &[Q]) -> Vec<CQ> {
        v.iter().cloned().map(creal).collect()
    }

    #[test]
    fn half_line_period() {
        let f = fan("gl1_in_gl2_corner");
        let b = positive_ray(&f);
        assert_eq!(f.cell(&b).unwrap().rho, vec![qq(1, 2)]);
        let xi = Character::zero(1);
        for lam in [qq(-3, 2), qq(5, 7), qq(-1, 3)] {
            let mut form = ToyFormData::new();
            form.push(&b, ExponentDatum::simple(real(&[lam.clone()])));
            let mu = &lam + qq(1, 2);
            let v = regularized_period(&f, &form, &xi, &[q(0)]).unwrap();
            assert_eq!(v, ExactScalar::from_q(-mu.recip()));
            let e = truncated_period_expansion(&f, &form, &xi, &[q(0)]).unwrap();
            assert!(constant_part_equals(&e, &v));
            assert_eq!(integrability(&f, &form, &xi).unwrap(), mu < Q::zero());
        }
    }

    #[test]
    fn irregular_and_borderline() {
        let f = fan("gl1_in_gl2_corner");
        let b = positive_ray(&f);
        let mut form = ToyFormData::new();
        form.push(&b, ExponentDatum::simple(real(&[qq(-1, 2)])));
        let xi = Character::zero(1);
        let r = is_xi_regular(&f, &form, &xi).unwrap();
        assert!(!r.regular);
        assert_eq!(r.offending, vec![Offense { cell: b.to_string(), index: 0, wall: b.to_string() }]);
        assert!(!integrability(&f, &form, &xi).unwrap());
        assert!(matches!(regularized_period(&f, &form, &xi, &[q(0)]), Err(Error::Irregular(v)) if v.len() == 1));
        assert!(is_xi_regular(&f, &ToyFormData::new(), &xi).unwrap().regular);
    }

    #[test]
    fn whole_group_datum_is_constant() {
        let f = fan("gl2_in_gl3_corner");
        let g = f.whole().parabolic.clone();
        let mut form = ToyFormData::new();
        let qp = Poly::parse("3 + x1 - x2^2", 2).unwrap();
        form.push(&g, ExponentDatum::new(real(&[q(1), q(2)]), qp, creal(q(2))));
        let xi = Character::zero(2);
        let t = [q(1), q(-4)];
        let v = regularized_period(&f, &form, &xi, &t).unwrap();
        assert_eq!(v, ExactScalar::from_q(q(6)));
        let e = truncated_period_expansion(&f, &form, &xi, &t).unwrap();
        assert_eq!(e, PolyExp::polynomial(Poly::constant(2, ExactScalar::from_q(q(6)))));
        assert!(integrability(&f, &form, &xi).unwrap());
    }

    #[test]
    fn eisenstein_pole_examples() {
        let f = fan("gl1_in_gl2_corner");
        let b = positive_ray(&f);
        let none = BTreeMap::new();
        let run = |cq: Q| {
            let m: BTreeMap<_, _> = [(b.clone(), cq)].into_iter().collect();
            eisenstein_correction_terms(&f, &[b.clone()], &q(1), &m, &[q(2)], &none).unwrap()
        };
        let r = run(qq(1, 2));
        let plus = r.terms.iter().find(|t| t.sign == 1).unwrap();
        assert_eq!(plus.pole, q(0));
        let r = run(q(0));
        let minus = r.terms.iter().find(|t| t.sign == -1).unwrap();
        assert_eq!(minus.pole, q(1));
        assert_eq!(r.terms.len(), 2);
        assert!(matches!(minus.eval(&creal(q(1))), Err(Error::Pole(_))));
        // (−s + 1)·2 at s = 0
        assert_eq!(minus.eval(&creal(q(0))).unwrap(), ExactScalar::exp(&creal(q(2))));
        let g = f.whole().parabolic.clone();
        let m: BTreeMap<_, _> = [(g.clone(), q(0))].into_iter().collect();
        assert!(matches!(
            eisenstein_correction_terms(&f, &[g], &q(1), &m, &[q(0)], &none),
            Err(Error::NotMaximal(_))
        ));
        assert!(matches!(
            eisenstein_correction_terms(&f, &[b], &q(1), &BTreeMap::new(), &[q(0)], &none),
            Err(Error::MissingCq(_))
        ));
    }

    #[test]
    fn form_json_round_trip() {
        let f = fan("gl2_in_gl3_corner");
        let xi = Character::zero(2);
        let mut rng = form_rng(3);
        let form = random_form(&f, &xi, &FormSampler::default(), &mut rng).unwrap();
        let s = form.to_json(&f).unwrap();
        assert_eq!(ToyFormData::from_json(&s, &f).unwrap(), form);
        let bad = r#"{"cells": {"({9})": [{"lambda_re": ["1", "0"]}]}}"#;
        assert!(matches!(ToyFormData::from_json(bad, &f), Err(Error::UnknownCell(_))));
    }

    #[test]
    fn character_parsing_and_centre() {
        let f = fan("gl2_diag_in_gl2xgl2");
        assert!(!Character::parse("1+i, 1+i").unwrap().off_center(&f));
        assert!(Character::parse("1, 0").unwrap().off_center(&f));
    }
}
