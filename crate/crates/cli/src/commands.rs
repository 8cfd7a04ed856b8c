//! The four subcommands, each returning a JSON-serializable value.

use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Value};

use reslab::background::J0Kind;
use reslab::inverse::{candidate_from_interpolation, candidate_from_s1_zeros, invert, reconstruct_theta};
use reslab::oracle::{bound_state_estimates, comparison_size, identity_suite, kernel_least_squares};
use reslab::sample::rng;
use reslab::states::{
    all_states, norming_constants, projections, s1_condition_violated, s_matrix, structure_report,
    zeros_s_minus_1, NormingMethod,
};
use reslab::{Background, Candidate, GlmOptions, JostData, Poly, Sheet, SheetPoint, Tolerances};

use crate::files::{ProblemFile, StatesFile};
use crate::CliError;

fn j0_kind(kind: J0Kind) -> &'static str {
    match kind {
        J0Kind::Bound => "bound",
        J0Kind::Antibound => "antibound",
        J0Kind::Virtual => "virtual",
        J0Kind::Closed => "closed",
    }
}

pub fn bands(problem: &ProblemFile) -> Result<Value, CliError> {
    let bg = problem.background()?;
    let b = bg.bands();
    let gaps: Vec<Value> = b
        .gaps
        .iter()
        .map(|g| {
            json!({
                "index": g.index,
                "open": g.open,
                "lower": g.lower,
                "upper": g.upper,
                "mu": g.mu,
                "nu": g.nu,
                "alpha": g.alpha,
                "h": g.height,
            })
        })
        .collect();
    let j0: Vec<Value> = bg
        .j0_states()
        .iter()
        .map(|s| json!({"gap": s.gap, "mu": s.mu, "kind": j0_kind(s.kind)}))
        .collect();
    let open = b.gaps.iter().filter(|g| g.open).count();
    Ok(json!({
        "q": bg.q(),
        "edges": b.edges,
        "bands": b.bands.iter().map(|&(x, y)| [x, y]).collect::<Vec<_>>(),
        "gaps": gaps,
        "open_gaps": open,
        "closed_gaps": b.gaps.len() - open,
        "mu": b.gaps.iter().map(|g| g.mu).collect::<Vec<_>>(),
        "j0_states": j0,
    }))
}

fn tolerances(tol: Option<f64>) -> Tolerances {
    let mut t = Tolerances::default();
    if let Some(x) = tol {
        t.root_gate = x;
    }
    t
}

pub fn direct(problem: &ProblemFile, tol: Option<f64>) -> Result<(StatesFile, JostData), CliError> {
    let bg = problem.background()?;
    let jost = JostData::new(&bg, &problem.perturbation())?;
    let t = tolerances(tol);
    let states = all_states(&jost, &t)?;
    let s1 = zeros_s_minus_1(&bg, jost.phi_plus(0), &t)?;
    Ok((StatesFile::new(&jost, &states, &s1), jost))
}

/// `lambda`, `F` and `S` on sheet 1 over the bands and some way past them.
pub fn grid(jost: &JostData, points: usize) -> Value {
    let bg = jost.background();
    let e = &bg.bands().edges;
    let (lo, hi) = (e[0] - 1.0, e[e.len() - 1] + 1.0);
    let pair = jost.pair();
    let mut lam = Vec::with_capacity(points);
    let mut f = Vec::with_capacity(points);
    let mut s_re = Vec::with_capacity(points);
    let mut s_im = Vec::with_capacity(points);
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1).max(1) as f64;
        lam.push(x);
        f.push(jost.state_poly().eval(x));
        let s = s_matrix(bg, &pair, SheetPoint::real(x, Sheet::One));
        s_re.push(s.re);
        s_im.push(s.im);
    }
    json!({"lambda": lam, "state_poly": f, "s_re": s_re, "s_im": s_im})
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Glm,
    Interp,
    S1,
}

pub fn inverse(states: &StatesFile, bg: &Background, method: Method, tol: Option<f64>) -> Result<ProblemFile, CliError> {
    let t = tolerances(tol);
    let c = &states.constants;
    let cand = match method {
        Method::Glm => Candidate {
            pair: reslab::JostPair {
                theta: Poly::new(states.theta0_plus.clone()),
                phi: Poly::new(states.phi0_plus.clone()),
            },
            c1: c.c3 / c.c2,
            c2: c.c2,
        },
        Method::Interp => candidate_from_interpolation(bg, &states.state_poly(bg), &Poly::new(states.phi0_plus.clone()), &t)?,
        Method::S1 => candidate_from_s1_zeros(bg, &states.state_poly(bg), &states.s1_zeros(), c.c2, &t)?,
    };
    let inv = invert(bg, &cand, &t, &GlmOptions::default())?;
    Ok(ProblemFile::from_parts(bg, &inv.perturbation))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Identities,
    Oracle,
    Roundtrip,
    All,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub gate: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, residual: f64, gate: f64) -> Self {
        Check {
            name: name.into(),
            residual,
            gate,
            passed: residual <= gate,
        }
    }
}

fn identities(problem: &ProblemFile, jost: &JostData, seed: u64) -> Vec<Check> {
    let mut r = rng(seed);
    let mut out: Vec<Check> = identity_suite(jost, &mut r, 32)
        .into_iter()
        .map(|c| Check::new(c.name, c.residual, c.gate))
        .collect();
    if let Some(claimed) = &problem.state_poly {
        let claimed = Poly::new(claimed.clone());
        let bg = jost.background();
        let mut worst: f64 = 0.0;
        for k in 0..16 {
            let z = C64::from_polar(2.0 + 0.25 * k as f64, 0.3 + 0.37 * k as f64);
            let pt = SheetPoint::new(z, Sheet::One);
            let direct = bg.phi_q().eval_c(z) * jost.f(0, pt) * jost.pair().f_minus(bg, pt);
            let got = claimed.eval_c(z);
            worst = worst.max((got - direct).norm() / got.norm().max(direct.norm()).max(1.0));
        }
        out.push(Check::new("claimed_state_polynomial", worst, 1e-9));
    }
    out
}

fn oracle(jost: &JostData, sections: usize) -> Result<Vec<Check>, CliError> {
    let bg = jost.background();
    let op = jost.operator();
    let t = Tolerances::default();
    let states = all_states(jost, &t)?;
    let mut ev: Vec<f64> = states.iter().filter(|s| s.is_eigenvalue()).map(|s| s.lam.re).collect();
    ev.sort_by(f64::total_cmp);
    let est = bound_state_estimates(bg, op.perturbation(), sections, 1e-8)?;
    let mut out = vec![Check::new(
        "finite_section_count",
        (est.len() as f64 - ev.len() as f64).abs(),
        0.0,
    )];
    if est.len() == ev.len() {
        let worst = ev.iter().zip(&est).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        out.push(Check::new("finite_section", worst, 1e-6));
    }
    let series = norming_constants(jost, &states, NormingMethod::Series)?;
    let formula = norming_constants(jost, &states, NormingMethod::Formula)?;
    let mut worst: f64 = 0.0;
    for (s, f) in series.iter().zip(&formula) {
        worst = worst.max((s.value / f.value - 1.0).abs());
        if s.value <= 0.0 || f.value <= 0.0 {
            worst = f64::MAX;
        }
    }
    out.push(Check::new("norming_agreement", worst, 1e-6));
    let report = structure_report(bg, jost.state_poly(), &states);
    out.push(Check::new("structure", if report.all_ok() { 0.0 } else { 1.0 }, 0.0));
    let fit = kernel_least_squares(jost)?;
    let nu = jost.constants().nu;
    let mut support: f64 = 0.0;
    for (n, row) in fit.k.iter().enumerate() {
        for (m, &x) in row.iter().enumerate() {
            if m != n && n + m > nu {
                support = support.max(x.abs());
            }
        }
    }
    out.push(Check::new("kernel_support", support, 1e-8));
    Ok(out)
}

fn roundtrip(jost: &JostData) -> Result<Vec<Check>, CliError> {
    let bg = jost.background();
    let t = Tolerances::default();
    let pert = jost.operator().perturbation();
    let error = |got: &reslab::Perturbation| {
        pert.u
            .iter()
            .zip(&got.u)
            .chain(pert.v.iter().zip(&got.v))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let c = jost.constants();
    let cand = Candidate {
        pair: jost.pair(),
        c1: c.c1,
        c2: c.c2,
    };
    let inv = invert(bg, &cand, &t, &GlmOptions::default())?;
    let mut out = vec![
        Check::new("glm", error(&inv.perturbation), 1e-6),
        Check::new("vanishing", inv.kernel.vanishing_residual, 1e-8),
    ];
    let f = jost.state_poly();
    let simple = projections(f, &t)?.roots.iter().all(|r| r.multiplicity == 1);
    if simple {
        let rec = reconstruct_theta(bg, f, jost.phi_plus(0), &t)?;
        out.push(Check::new("interpolation", (&rec.theta - jost.theta_plus(0)).norm_inf(), 1e-6));
    }
    let zeros = zeros_s_minus_1(bg, jost.phi_plus(0), &t)?;
    if simple && !s1_condition_violated(&zeros) {
        let cand = candidate_from_s1_zeros(bg, f, &zeros, c.c2, &t)?;
        let e = (&cand.pair.phi - jost.phi_plus(0))
            .norm_inf()
            .max((&cand.pair.theta - jost.theta_plus(0)).norm_inf());
        out.push(Check::new("s1_zeros", e, 1e-6));
    }
    Ok(out)
}

pub fn check(problem: &ProblemFile, suite: Suite, sections: usize, seed: u64) -> Result<(Value, bool), CliError> {
    let bg = problem.background()?;
    let jost = JostData::new(&bg, &problem.perturbation())?;
    let mut report = serde_json::Map::new();
    let mut passed = true;
    let mut add = |name: &str, checks: Vec<Check>| {
        passed &= checks.iter().all(|c| c.passed);
        report.insert(name.into(), serde_json::to_value(checks).expect("plain data"));
    };
    if matches!(suite, Suite::Identities | Suite::All) {
        add("identities", identities(problem, &jost, seed));
    }
    if matches!(suite, Suite::Oracle | Suite::All) {
        add("oracle", oracle(&jost, sections)?);
    }
    if matches!(suite, Suite::Roundtrip | Suite::All) {
        add("roundtrip", roundtrip(&jost)?);
    }
    let out = json!({
        "passed": passed,
        "seed": seed,
        "sections": [sections, comparison_size(bg.q(), sections)],
        "suites": Value::Object(report),
    });
    Ok((out, passed))
}
