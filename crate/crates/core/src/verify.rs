//! The invariant suite: named exact checks over every construction.
//!
//! Each check either passes with residual `"0"` or reports the first
//! counterexample it found. Random inputs come from fixed seeds derived from
//! the check name, so reports are reproducible.

use std::sync::OnceLock;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::abelian::{central_function, AbelianConnection, StarFunction};
use crate::calculus::{alt, sort_with_sign, Frame, Side, StarForm, StarTensor};
use crate::chart::{omega_upper, Chart};
use crate::error::Result;
use crate::io::CheckResult;
use crate::poly::Poly;
use crate::random::{self, Rng8};
use crate::reference;
use crate::render::{render_form, render_star, render_weyl};
use crate::scalar::Scalar;
use crate::trivialization::{Homotopy, TrivializationMap};
use crate::weyl::{covariant_derivative, curvature_form, delta, delta_inv, WeylForm};

/// How many random inputs each sampled check draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Fast,
    Full,
}

impl CheckMode {
    pub fn samples(self) -> usize {
        match self {
            CheckMode::Fast => 3,
            CheckMode::Full => 20,
        }
    }
}

type Outcome = Option<String>;

fn seed_for(name: &str) -> u64 {
    // FNV-1a
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

fn single(name: &str, body: impl FnOnce() -> Outcome) -> CheckResult {
    match body() {
        None => CheckResult::pass(name),
        Some(r) => CheckResult::fail(name, r),
    }
}

fn sampled(name: &str, n: usize, mut body: impl FnMut(&mut Rng8) -> Outcome) -> CheckResult {
    let mut rng = random::rng(seed_for(name));
    for _ in 0..n {
        if let Some(r) = body(&mut rng) {
            return CheckResult::fail(name, r);
        }
    }
    CheckResult::pass(name)
}

fn weyl_zero(input: &WeylForm, residual: &WeylForm) -> Outcome {
    (!residual.is_zero()).then(|| {
        format!(
            "input {}; residual {}",
            render_weyl(input).text,
            render_weyl(residual).text
        )
    })
}

fn star_eq(label: &str, got: &StarFunction, expected: &StarFunction) -> Outcome {
    (got != expected).then(|| format!("{label}: residual {}", render_star(&(got - expected)).text))
}

fn form_eq(label: &str, got: &StarForm, expected: &StarForm) -> Outcome {
    (got != expected).then(|| {
        format!(
            "{label}: residual {}",
            render_form(&got.add(&expected.scale(&Scalar::from_int(-1)))).text
        )
    })
}

fn err_text(e: impl std::fmt::Display) -> Outcome {
    Some(e.to_string())
}

/// Builds the constructions of one chart on demand and runs checks on them.
pub struct Verifier {
    chart: Chart,
    mode: CheckMode,
    conn: OnceLock<AbelianConnection>,
    triv: OnceLock<TrivializationMap>,
    frame: OnceLock<std::result::Result<Frame, String>>,
}

impl Verifier {
    pub fn new(chart: &Chart, mode: CheckMode) -> Self {
        Verifier {
            chart: chart.clone(),
            mode,
            conn: OnceLock::new(),
            triv: OnceLock::new(),
            frame: OnceLock::new(),
        }
    }

    fn n(&self) -> usize {
        self.mode.samples()
    }

    fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn connection(&self) -> &AbelianConnection {
        self.conn
            .get_or_init(|| AbelianConnection::build(&self.chart))
    }

    pub fn trivialization(&self) -> &TrivializationMap {
        self.triv
            .get_or_init(|| TrivializationMap::build(self.connection()))
    }

    pub fn frame(&self) -> std::result::Result<&Frame, String> {
        self.frame
            .get_or_init(|| {
                Frame::build(self.connection(), self.trivialization()).map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Every check, grouped by construction.
    pub fn run_all(&self) -> Vec<CheckResult> {
        let mut out = self.weyl_checks();
        out.extend(self.abelian_checks());
        out.extend(self.trivialization_checks());
        out.extend(self.calculus_checks());
        out
    }

    /// Identities of the fiberwise algebra and of `δ`, `δ⁻¹`, `∂`.
    pub fn weyl_checks(&self) -> Vec<CheckResult> {
        let (d, nw, n) = (self.dim(), self.chart.n_work(), self.n());
        let chart = &self.chart;
        let rand_form = |rng: &mut Rng8, forms: &[usize]| random::weyl(rng, d, nw, 4, forms);
        let all_forms: Vec<usize> = (0..=d).collect();
        vec![
            sampled("delta_squared", n, |rng| {
                let a = rand_form(rng, &all_forms);
                weyl_zero(&a, &delta(&delta(&a)))
            }),
            sampled("delta_inv_squared", n, |rng| {
                let a = rand_form(rng, &all_forms);
                weyl_zero(&a, &delta_inv(&delta_inv(&a)))
            }),
            sampled("decomposition", n, |rng| {
                let a = rand_form(rng, &all_forms);
                // δ⁻¹ raises degree; one guard degree keeps the identity exact at the top
                let lifted = a.with_n_work(nw + 1);
                let a00 = a.filter(|k| k.y_degree() == 0 && k.dx == 0);
                let rebuilt = &(&delta(&delta_inv(&lifted)) + &delta_inv(&delta(&lifted)))
                    .with_n_work(nw)
                    + &a00;
                weyl_zero(&a, &(&a - &rebuilt))
            }),
            sampled("delta_dual_formula", n, |rng| {
                let a = rand_form(rng, &all_forms);
                let omega = crate::abelian::omega_form(d, nw);
                weyl_zero(&a, &(&delta(&a) + &omega.ih_commutator(&a)))
            }),
            sampled("circ_associative", n, |rng| {
                let (a, b, c) = (
                    rand_form(rng, &[0, 1]),
                    rand_form(rng, &[0, 1]),
                    rand_form(rng, &[0]),
                );
                weyl_zero(&a, &(&a.circ(&b).circ(&c) - &a.circ(&b.circ(&c))))
            }),
            sampled("circ_unit", n, |rng| {
                let a = rand_form(rng, &all_forms);
                let one = WeylForm::one(d, nw);
                let r1 = &one.circ(&a) - &a;
                let r2 = &a.circ(&one) - &a;
                weyl_zero(&a, &r1).or_else(|| weyl_zero(&a, &r2))
            }),
            sampled("degree_additivity", n, |rng| {
                let (a, b) = (rand_form(rng, &[0, 1]), rand_form(rng, &[0, 1]));
                let ab = a.circ(&b);
                (0..=nw).find_map(|m| {
                    let mut sum = WeylForm::zero(d, nw);
                    for p in 0..=m {
                        sum += &a.degree_part(p).circ(&b.degree_part(m - p));
                    }
                    weyl_zero(&a, &(&ab.degree_part(m) - &sum))
                })
            }),
            sampled("delta_leibniz", n, |rng| {
                let k = rng.gen_range(0..=1usize);
                let (a, b) = (rand_form(rng, &[k]), rand_form(rng, &[0, 1]));
                let sign = Scalar::from_int(if k % 2 == 0 { 1 } else { -1 });
                let rhs = &delta(&a).circ(&b) + &a.circ(&delta(&b)).scale(&sign);
                // δ lowers degree, so the dropped degree N + 1 part of a∘b would land in degree N
                let res = (&delta(&a.circ(&b)) - &rhs).up_to_degree(nw.saturating_sub(1));
                weyl_zero(&a, &res)
            }),
            sampled("partial_leibniz", n, |rng| {
                let k = rng.gen_range(0..=1usize);
                let (a, b) = (rand_form(rng, &[k]), rand_form(rng, &[0, 1]));
                let sign = Scalar::from_int(if k % 2 == 0 { 1 } else { -1 });
                let da = covariant_derivative(chart, &a);
                let db = covariant_derivative(chart, &b);
                let rhs = &da.circ(&b) + &a.circ(&db).scale(&sign);
                weyl_zero(&a, &(&covariant_derivative(chart, &a.circ(&b)) - &rhs))
            }),
            sampled("partial_squared_is_curvature", n, |rng| {
                let a = rand_form(rng, &[0, 1]);
                let lhs = covariant_derivative(chart, &covariant_derivative(chart, &a));
                let rhs = curvature_form(chart).with_n_work(nw).ih_commutator(&a);
                weyl_zero(&a, &(&lhs - &rhs))
            }),
            sampled("center_of_commutator", n, |rng| {
                let a = rand_form(rng, &all_forms);
                let z = rand_form(rng, &all_forms).filter(|k| k.is_y_free());
                if let Some(r) = weyl_zero(&z, &a.ih_commutator(&z)) {
                    return Some(r);
                }
                let b = rand_form(rng, &[0]).filter(|k| !k.is_y_free() && k.fedosov_degree() >= 1);
                if b.is_zero() {
                    return None;
                }
                let detected = (0..d).any(|i| !WeylForm::y(d, nw, i).ih_commutator(&b).is_zero());
                (!detected).then(|| format!("{} commutes with every y^i", render_weyl(&b).text))
            }),
        ]
    }

    /// `r`, the lift `Q`, and the star product.
    pub fn abelian_checks(&self) -> Vec<CheckResult> {
        let (d, nw, k, n) = (
            self.dim(),
            self.chart.n_work(),
            self.chart.h_order(),
            self.n(),
        );
        let conn = self.connection();
        let chart = &self.chart;
        let star = |f: &StarFunction, g: &StarFunction| conn.star_product(f, g);
        let rand_f = |rng: &mut Rng8| random::star_function(rng, d, k, 2);
        let mut out = vec![
            single("r_normalized", || weyl_zero(conn.r(), &delta_inv(conn.r()))),
            single("r_degree", || {
                conn.r()
                    .min_degree()
                    .filter(|&m| m < 3)
                    .map(|m| format!("r has a term of degree {m}"))
            }),
            single("r_fixed_point", || {
                let r = conn.r();
                let rr = r.ih_commutator(r).scale(&Scalar::ratio(1, 2));
                let rhs = &delta_inv(&curvature_form(chart).with_n_work(nw))
                    + &delta_inv(&(&covariant_derivative(chart, r) + &rr));
                weyl_zero(r, &(r - &rhs))
            }),
            sampled("q_inverse_of_q", n, |rng| {
                let f = random::star_function(rng, d, nw / 2, 2);
                let back = central_function(&conn.q_inverse(&conn.quantize(&f)), nw / 2);
                star_eq(&render_star(&f).text, &back, &f)
            }),
            sampled("q_of_q_inverse", n, |rng| {
                let a = conn.quantize(&rand_f(rng));
                weyl_zero(&a, &(&conn.quantize_form(&conn.q_inverse(&a)) - &a))
            }),
            sampled("lift_is_flat", n, |rng| {
                let f = rand_f(rng);
                let qf = conn.quantize(&f);
                weyl_zero(&qf, &conn.apply_d(&qf).up_to_degree(nw.saturating_sub(1)))
            }),
        ];
        out.extend([
            sampled("star_associative", n, |rng| {
                let (f, g, w) = (rand_f(rng), rand_f(rng), rand_f(rng));
                let run = || -> Result<Outcome> {
                    let lhs = star(&star(&f, &g)?, &w)?;
                    let rhs = star(&f, &star(&g, &w)?)?;
                    Ok(star_eq(&render_star(&f).text, &lhs, &rhs))
                };
                run().unwrap_or_else(err_text)
            }),
            sampled("star_unit", n, |rng| {
                let f = rand_f(rng);
                let one = StarFunction::one();
                match (star(&one, &f), star(&f, &one)) {
                    (Ok(a), Ok(b)) => star_eq("1*f", &a, &f).or_else(|| star_eq("f*1", &b, &f)),
                    (Err(e), _) | (_, Err(e)) => err_text(e),
                }
            }),
            sampled("classical_limit", n, |rng| {
                let (f, g) = (rand_f(rng), rand_f(rng));
                match star(&f, &g) {
                    Ok(fg) => {
                        let expect = StarFunction::from_poly(&f.coeff(0) * &g.coeff(0));
                        star_eq("h^0 of f*g", &fg.truncate(0), &expect)
                    }
                    Err(e) => err_text(e),
                }
            }),
            sampled("bracket_relation", n, |rng| {
                let (f, g) = (rand_f(rng), rand_f(rng));
                let br = conn.ih_star_commutator(&f, &g, 0);
                let (f0, g0) = (f.coeff(0), g.coeff(0));
                let mut pb = Poly::zero();
                for i in 0..d {
                    for j in 0..d {
                        let w = omega_upper(i, j);
                        if w != 0 {
                            pb += &(&f0.diff_x(i) * &g0.diff_x(j)).scale(&Scalar::from_int(w));
                        }
                    }
                }
                star_eq("Poisson bracket", &br, &StarFunction::from_poly(pb))
            }),
            sampled("moyal_reduction", n, |rng| {
                let flat = match AbelianConnection::trivial(d, nw, k) {
                    Ok(c) => c,
                    Err(e) => return err_text(e),
                };
                let (f, g) = (rand_f(rng), rand_f(rng));
                match flat.star_product(&f, &g) {
                    Ok(fg) => star_eq(
                        "flat star vs Moyal",
                        &fg,
                        &reference::moyal_base(&f, &g, d, k),
                    ),
                    Err(e) => err_text(e),
                }
            }),
            sampled("truncation_stability", n.min(5), |rng| {
                let finer = match chart.with_truncation(nw + 2, k) {
                    Ok(c) => AbelianConnection::build(&c),
                    Err(e) => return err_text(e),
                };
                if let Some(r) = weyl_zero(conn.r(), &(&finer.r().with_n_work(nw) - conn.r())) {
                    return Some(format!("r changed: {r}"));
                }
                let (f, g) = (rand_f(rng), rand_f(rng));
                match (star(&f, &g), finer.star_product(&f, &g)) {
                    (Ok(a), Ok(b)) => star_eq("f*g at N+2", &b, &a),
                    (Err(e), _) | (_, Err(e)) => err_text(e),
                }
            }),
        ]);
        out
    }

    /// The Hamiltonian and the maps `T`, `T⁻¹`.
    pub fn trivialization_checks(&self) -> Vec<CheckResult> {
        let (d, nw, k, n) = (
            self.dim(),
            self.chart.n_work(),
            self.chart.h_order(),
            self.n(),
        );
        let conn = self.connection();
        let triv = self.trivialization();
        let trivial = match AbelianConnection::trivial(d, nw, k) {
            Ok(c) => c,
            Err(e) => return vec![CheckResult::fail("trivial_connection", e.to_string())],
        };
        let rand_f = |rng: &mut Rng8| random::star_function(rng, d, k, 2);
        let horizon = nw.saturating_sub(1);
        vec![
            single("hamiltonian_condition", || {
                let res = triv.condition_residual();
                weyl_zero(triv.hamiltonian_t(), &res)
            }),
            single("hamiltonian_degree", || {
                triv.hamiltonian_t()
                    .min_degree()
                    .filter(|&m| m < 3)
                    .map(|m| format!("H has a term of degree {m}"))
            }),
            single("hamiltonian_closed_form", || {
                let top = nw.min(5);
                let got = triv.hamiltonian().up_to_degree(top);
                let expect = reference::hamiltonian_closed_form(&self.chart, nw).up_to_degree(top);
                weyl_zero(&got, &(&got - &expect))
            }),
            sampled("flatness_transport", n, |rng| {
                let f = rand_f(rng);
                let a = conn.quantize(&f);
                let a0 = trivial.quantize(&f);
                let run = || -> Result<Outcome> {
                    let ta = triv.apply_t(&a)?;
                    let ti = triv.apply_t_inv(&a0)?;
                    Ok(weyl_zero(&ta, &trivial.apply_d(&ta).up_to_degree(horizon))
                        .or_else(|| weyl_zero(&ti, &conn.apply_d(&ti).up_to_degree(horizon))))
                };
                run().unwrap_or_else(err_text)
            }),
            sampled("round_trip", n, |rng| {
                let f = rand_f(rng);
                let a = conn.quantize(&f);
                let a0 = trivial.quantize(&f);
                let run = || -> Result<Outcome> {
                    let back = triv.apply_t(&triv.apply_t_inv(&a0)?)?;
                    let back0 = triv.apply_t_inv(&triv.apply_t(&a)?)?;
                    Ok(weyl_zero(&a0, &(&back - &a0)).or_else(|| weyl_zero(&a, &(&back0 - &a))))
                };
                run().unwrap_or_else(err_text)
            }),
            sampled("morphism", n, |rng| {
                let (a, b) = (conn.quantize(&rand_f(rng)), conn.quantize(&rand_f(rng)));
                let run = || -> Result<Outcome> {
                    let lhs = triv.apply_t(&a.circ(&b))?;
                    let rhs = triv.apply_t(&a)?.circ(&triv.apply_t(&b)?);
                    Ok(weyl_zero(&a, &(&lhs - &rhs)))
                };
                run().unwrap_or_else(err_text)
            }),
            single("homotopy_power_independence", || {
                let quad = crate::trivialization::hamiltonian(&Homotopy::with_power(conn, 2));
                let f = StarFunction::from_poly(&Poly::x(0) * &Poly::x(d - 1));
                let a0 = trivial.quantize(&f);
                match (triv.apply_t_inv(&a0), quad.apply_t_inv(&a0)) {
                    (Ok(x), Ok(y)) => weyl_zero(&a0, &(&x - &y)),
                    (Err(e), _) | (_, Err(e)) => err_text(e),
                }
            }),
            single("trivialization_correction", || {
                let order = k.min(2);
                let samples = [
                    Poly::x(0),
                    &Poly::x(0) * &Poly::x(0),
                    &Poly::x(0) * &Poly::x(1),
                ];
                samples.iter().find_map(|a0| {
                    let c = reference::trivialization_correction(&self.chart, a0);
                    let plus = StarFunction::new(vec![a0.clone(), Poly::zero(), c.clone()]);
                    let minus = StarFunction::new(vec![a0.clone(), Poly::zero(), -c]);
                    let run = || -> Result<Outcome> {
                        let up = triv
                            .apply_t_inv(&trivial.quantize(&StarFunction::from_poly(a0.clone())))?;
                        let down =
                            triv.apply_t(&conn.quantize(&StarFunction::from_poly(a0.clone())))?;
                        Ok(
                            star_eq("T⁻¹", &central_function(&up, order), &plus.truncate(order))
                                .or_else(|| {
                                    star_eq(
                                        "T",
                                        &central_function(&down, order),
                                        &minus.truncate(order),
                                    )
                                }),
                        )
                    };
                    run().unwrap_or_else(err_text)
                })
            }),
        ]
    }

    /// The frame, the derivations and the deformed exterior algebra.
    pub fn calculus_checks(&self) -> Vec<CheckResult> {
        let frame = match self.frame() {
            Ok(f) => f,
            Err(e) => return vec![CheckResult::fail("frame_lemma", e)],
        };
        let (d, k, n) = (self.dim(), frame.order(), self.n());
        let chart = &self.chart;
        let rand_f = |rng: &mut Rng8| random::star_function(rng, d, k, 2);
        let rand_classical = |rng: &mut Rng8| random::classical(rng, d, 3);
        let mut out = vec![
            single("frame_lemma", || {
                (0..d).cartesian_product(0..d).find_map(|(i, j)| {
                    let r = frame.lemma_residual(i, j);
                    (!r.is_zero()).then(|| {
                        format!("(i, j) = ({}, {}): {}", i + 1, j + 1, render_star(&r).text)
                    })
                })
            }),
            single("lambda_closed_form", || {
                let order = k.min(2);
                (0..d).find_map(|i| {
                    star_eq(
                        &format!("λ{}", i + 1),
                        &frame.lambdas()[i].truncate(order),
                        &reference::lambda_closed_form(chart, i).truncate(order),
                    )
                })
            }),
            sampled("derivations_commute", n, |rng| {
                let f = rand_f(rng);
                (0..d).tuple_combinations().find_map(|(i, j)| {
                    let xy = frame.derive(i, &frame.derive(j, &f).ok()?).ok()?;
                    let yx = frame.derive(j, &frame.derive(i, &f).ok()?).ok()?;
                    star_eq(&render_star(&f).text, &xy, &yx)
                })
            }),
            sampled("cross_path", n.min(5), |rng| {
                let f = rand_f(rng);
                (0..d).find_map(|i| match frame.derive_via_trivialization(i, &f) {
                    Ok(via) => star_eq(&render_star(&f).text, &frame.derive(i, &f).ok()?, &via),
                    Err(e) => err_text(e),
                })
            }),
            sampled("derivation_closed_form", n, |rng| {
                let f = rand_classical(rng);
                let order = k.min(2);
                let f0 = f.coeff(0);
                (0..d).find_map(|i| {
                    let expect = StarFunction::new(vec![
                        f0.diff_x(i),
                        Poly::zero(),
                        reference::derivation_correction(chart, i, &f0),
                    ]);
                    star_eq(
                        &render_star(&f).text,
                        &frame.derive(i, &f).ok()?.truncate(order),
                        &expect.truncate(order),
                    )
                })
            }),
            sampled("deformation_limit", n, |rng| {
                let (f, g) = (rand_f(rng), rand_f(rng));
                let (f0, g0) = (f.coeff(0), g.coeff(0));
                let derivs = (0..d).find_map(|i| {
                    star_eq(
                        "X_i at h=0",
                        &frame.derive(i, &f).ok()?.truncate(0),
                        &StarFunction::from_poly(f0.diff_x(i)),
                    )
                });
                let prod = star_eq(
                    "* at h=0",
                    &frame.star(&f, &g).truncate(0),
                    &StarFunction::from_poly(&f0 * &g0),
                );
                let (eta, xi) = (random::form(rng, d, 1, 2), random::form(rng, d, 1, 2));
                let wedge = form_eq(
                    "∧_* at h=0",
                    &frame.wedge_star(&eta, &xi).truncate(0),
                    &classical_wedge(&eta, &xi),
                );
                let ext = form_eq(
                    "d_* at h=0",
                    &frame.d_star(&eta).truncate(0),
                    &classical_d(&eta),
                );
                derivs.or(prod).or(wedge).or(ext)
            }),
            sampled("d_star_squared", n, |rng| {
                (0..=2usize).find_map(|rank| {
                    let eta = random::form(rng, d, rank, 3);
                    let dd = frame.d_star(&frame.d_star(&eta));
                    (!dd.is_zero()).then(|| {
                        format!(
                            "{}: d_*² = {}",
                            render_form(&eta).text,
                            render_form(&dd).text
                        )
                    })
                })
            }),
            sampled("d_star_leibniz", n, |rng| {
                let p = rng.gen_range(0..d);
                let q = rng.gen_range(0..d - p);
                let (eta, xi) = (random::form(rng, d, p, 2), random::form(rng, d, q, 2));
                let lhs = frame.d_star(&frame.wedge_star(&eta, &xi));
                let sign = Scalar::from_int(if p % 2 == 0 { 1 } else { -1 });
                let rhs = frame
                    .wedge_star(&frame.d_star(&eta), &xi)
                    .add(&frame.wedge_star(&eta, &frame.d_star(&xi)).scale(&sign));
                form_eq(&render_form(&eta).text, &lhs, &rhs)
            }),
            sampled("wedge_associative", n, |rng| {
                let p = rng.gen_range(0..=d);
                let q = rng.gen_range(0..=d - p);
                let s = rng.gen_range(0..=d - p - q);
                let (a, b, c) = (
                    random::form(rng, d, p, 2),
                    random::form(rng, d, q, 2),
                    random::form(rng, d, s, 2),
                );
                let lhs = frame.wedge_star(&frame.wedge_star(&a, &b), &c);
                let rhs = frame.wedge_star(&a, &frame.wedge_star(&b, &c));
                form_eq(&render_form(&a).text, &lhs, &rhs)
            }),
            single("theta_dual", || {
                (0..d).cartesian_product(0..d).find_map(|(j, i)| {
                    let th = frame.theta(j).ok()?;
                    let v = th.eval(&[i]).ok()?;
                    let expect = if i == j {
                        StarFunction::one()
                    } else {
                        StarFunction::zero()
                    };
                    star_eq(&format!("θ{}(X{})", j + 1, i + 1), &v, &expect)
                })
            }),
        ];
        let thetas: Vec<StarForm> = (0..d).filter_map(|j| frame.theta(j).ok()).collect();
        out.extend([
            single("theta_anticommute", || {
                (0..d).cartesian_product(0..d).find_map(|(i, j)| {
                    let s = frame
                        .wedge_star(&thetas[i], &thetas[j])
                        .add(&frame.wedge_star(&thetas[j], &thetas[i]));
                    (!s.is_zero()).then(|| {
                        format!(
                            "θ{} ∧ θ{} + θ{} ∧ θ{} = {}",
                            i + 1,
                            j + 1,
                            j + 1,
                            i + 1,
                            render_form(&s).text
                        )
                    })
                })
            }),
            sampled("theta_permutations", n, |rng| {
                let size = rng.gen_range(1..=d);
                let mut idx: Vec<usize> = (0..d).collect();
                idx.shuffle(rng);
                idx.truncate(size);
                let product = |ix: &[usize]| {
                    ix.iter().skip(1).fold(thetas[ix[0]].clone(), |acc, &i| {
                        frame.wedge_star(&acc, &thetas[i])
                    })
                };
                let (sorted, negative) = sort_with_sign(&idx)?;
                let expect =
                    product(&sorted).scale(&Scalar::from_int(if negative { -1 } else { 1 }));
                form_eq(&format!("{idx:?}"), &product(&idx), &expect)
            }),
            single("theta_basis", || {
                (1..=d).flat_map(|r| (0..d).combinations(r)).find_map(|ix| {
                    let w = ix.iter().skip(1).fold(thetas[ix[0]].clone(), |acc, &i| {
                        frame.wedge_star(&acc, &thetas[i])
                    });
                    let basis =
                        StarForm::from_components(d, ix.len(), [(ix.clone(), StarFunction::one())])
                            .ok()?;
                    form_eq(&format!("θ^{ix:?}"), &w, &basis)
                })
            }),
            sampled("theta_central", n, |rng| {
                let f = rand_f(rng);
                (0..d).find_map(|j| {
                    form_eq(
                        &render_star(&f).text,
                        &frame.module_mul(Side::Left, &f, &thetas[j]),
                        &frame.module_mul(Side::Right, &f, &thetas[j]),
                    )
                })
            }),
            sampled("representative_independence", n, |rng| {
                let t = StarTensor::from_fn(d, 2, |_| random::classical(rng, d, 2));
                let sym: Vec<StarFunction> =
                    (0..d * d).map(|_| random::classical(rng, d, 2)).collect();
                let s = StarTensor::from_fn(d, 2, |ix| {
                    let (a, b) = (ix[0].min(ix[1]), ix[0].max(ix[1]));
                    sym[a * d + b].clone()
                });
                let via_t = frame.d_star_of_components(&t);
                let via_ts = frame.d_star_of_components(&t.add(&s));
                let via_alt = frame.d_star(&alt(&t));
                form_eq("T vs T+S", &via_ts, &via_t)
                    .or_else(|| form_eq("T vs Alt T", &via_t, &via_alt))
            }),
            sampled("free_basis", n, |rng| {
                // Σ f_I θ^I built with ∧_* recovers its coefficients.
                let rank = rng.gen_range(1..=d);
                let eta = random::form(rng, d, rank, 2);
                let mut sum = StarForm::zero(d, rank);
                for (ix, f) in eta.components() {
                    let w = ix.iter().skip(1).fold(thetas[ix[0]].clone(), |acc, &i| {
                        frame.wedge_star(&acc, &thetas[i])
                    });
                    sum = sum.add(&frame.module_mul(Side::Left, f, &w));
                }
                form_eq(&render_form(&eta).text, &sum, &eta)
                    .or_else(|| (sum.is_zero() != eta.is_zero()).then(|| "zero test".to_string()))
            }),
        ]);
        out
    }
}

/// Classical wedge of component forms, `(η∧ξ)_M = Σ sgn(A, B) η_A ξ_B`.
pub fn classical_wedge(eta: &StarForm, xi: &StarForm) -> StarForm {
    let (d, p, q) = (eta.dim(), eta.rank(), xi.rank());
    let mut entries = Vec::new();
    if p + q <= d {
        for m in (0..d).combinations(p + q) {
            let mut acc = StarFunction::zero();
            for a in m.iter().copied().combinations(p) {
                let b: Vec<usize> = m.iter().copied().filter(|i| !a.contains(i)).collect();
                let joined: Vec<usize> = a.iter().chain(&b).copied().collect();
                let (_, negative) = sort_with_sign(&joined).expect("disjoint");
                let term = eta
                    .eval(&a)
                    .expect("in range")
                    .pointwise_mul(&xi.eval(&b).expect("in range"), 0);
                acc = if negative { &acc - &term } else { &acc + &term };
            }
            entries.push((m, acc));
        }
    }
    StarForm::from_components(d, p + q, entries).expect("increasing")
}

/// Classical exterior derivative of component forms.
pub fn classical_d(eta: &StarForm) -> StarForm {
    let (d, p) = (eta.dim(), eta.rank());
    let mut entries = Vec::new();
    if p < d {
        for m in (0..d).combinations(p + 1) {
            let mut acc = StarFunction::zero();
            for (s, &i) in m.iter().enumerate() {
                let rest: Vec<usize> = m.iter().copied().filter(|&j| j != i).collect();
                let term = eta.eval(&rest).expect("in range").truncate(0).diff_x(i);
                acc = if s % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                };
            }
            entries.push((m, acc));
        }
    }
    StarForm::from_components(d, p + 1, entries).expect("increasing")
}
