//! Classification of the zeros of the state polynomial, norming constants,
//! the S-matrix and the resolvent.

use num_complex::Complex64 as C64;

use crate::background::{Background, J0Kind, Location, Sheet, SheetPoint};
use crate::error::{Error, Result};
use crate::jost::{JostData, JostPair};
use crate::poly::{Poly, RootOptions, RootSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateKind {
    Bound,
    Antibound,
    Virtual,
    Resonance,
    /// Dirichlet point of the background that is also a zero of `phi_0^+`.
    Sigma0,
}

impl StateKind {
    pub fn name(self) -> &'static str {
        match self {
            StateKind::Bound => "bound",
            StateKind::Antibound => "antibound",
            StateKind::Virtual => "virtual",
            StateKind::Resonance => "resonance",
            StateKind::Sigma0 => "sigma0",
        }
    }

    pub fn parse(s: &str) -> Option<StateKind> {
        Some(match s {
            "bound" => StateKind::Bound,
            "antibound" => StateKind::Antibound,
            "virtual" => StateKind::Virtual,
            "resonance" => StateKind::Resonance,
            "sigma0" => StateKind::Sigma0,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub lam: C64,
    /// `None` at band edges, where the two sheets meet.
    pub sheet: Option<Sheet>,
    pub kind: StateKind,
    pub multiplicity: usize,
    /// Gap `gamma_j` (`0..=q`) whose closure holds the projection, if real.
    pub gap: Option<usize>,
    /// `F'(lambda)` for real states.
    pub fdot: Option<f64>,
}

impl State {
    /// Eigenvalue of the operator: a sheet-1 zero in a gap.
    pub fn is_eigenvalue(&self) -> bool {
        self.sheet == Some(Sheet::One)
            && matches!(self.kind, StateKind::Bound | StateKind::Sigma0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Root clustering, relative to `max(1, |root|)`.
    pub cluster: f64,
    /// Gate on the relative residual of the state-polynomial roots.
    pub root_gate: f64,
    /// Band-edge proximity, relative to `1 + |lambda|`.
    pub edge: f64,
    /// A Jost function counts as zero below this relative size...
    pub zero: f64,
    /// ...provided it exceeds this on the other sheet.
    pub nonzero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cluster: 1e-7,
            root_gate: 1e-9,
            edge: 1e-8,
            zero: 1e-7,
            nonzero: 1e-4,
        }
    }
}

/// `(-1)^(q - j)`.
pub fn gap_sign(q: usize, j: usize) -> f64 {
    if (q + j) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn relative_f(bg: &Background, pair: &JostPair, pt: SheetPoint) -> f64 {
    let w = bg.weyl(pt);
    let t = pair.theta.eval_c(pt.lam);
    let f = w.m_plus * pair.phi.eval_c(pt.lam);
    let scale = t.norm() + f.norm();
    if scale == 0.0 {
        0.0
    } else {
        (t + f).norm() / scale
    }
}

/// Which sheet `pair` vanishes on at `lam`.
fn zero_sheet(bg: &Background, pair: &JostPair, lam: C64, tol: &Tolerances) -> Result<Sheet> {
    let r1 = relative_f(bg, pair, SheetPoint::new(lam, Sheet::One));
    let r2 = relative_f(bg, pair, SheetPoint::new(lam, Sheet::Two));
    if r1 < tol.zero && r2 > tol.nonzero {
        Ok(Sheet::One)
    } else if r2 < tol.zero && r1 > tol.nonzero {
        Ok(Sheet::Two)
    } else {
        Err(Error::Ambiguous(format!(
            "at {lam}: relative |f| is {r1:.2e} on sheet 1 and {r2:.2e} on sheet 2"
        )))
    }
}

/// Classify the zeros of `f_poly = phi_q f f_-` for the Jost function
/// `f = pair.theta + m_+ pair.phi`.
pub fn classify(
    bg: &Background,
    pair: &JostPair,
    f_poly: &Poly,
    tol: &Tolerances,
) -> Result<Vec<State>> {
    let roots = f_poly.roots_with(RootOptions {
        cluster_tol: tol.cluster,
        residual_gate: tol.root_gate,
    })?;
    let dfp = f_poly.derivative();
    let q = bg.q();
    let mut states = Vec::new();
    for root in &roots.roots {
        let z = root.value;
        let mult = root.multiplicity;
        if z.im != 0.0 {
            let sheet = zero_sheet(bg, pair, z, tol)?;
            if sheet == Sheet::One {
                return Err(Error::ClassViolation(format!("non-real zero {z} on sheet 1")));
            }
            states.push(State {
                lam: z,
                sheet: Some(Sheet::Two),
                kind: StateKind::Resonance,
                multiplicity: mult,
                gap: None,
                fdot: None,
            });
            continue;
        }
        let x = z.re;
        let fdot = Some(dfp.eval(x));
        let edge_tol = tol.edge * (1.0 + x.abs());
        if let Some(k) = bg.bands().edges.iter().position(|e| (x - e).abs() <= edge_tol) {
            let gap = if k == 0 {
                0
            } else if k == 2 * q - 1 {
                q
            } else {
                k.div_ceil(2)
            };
            states.push(State {
                lam: z,
                sheet: None,
                kind: StateKind::Virtual,
                multiplicity: mult,
                gap: Some(gap),
                fdot,
            });
            continue;
        }
        let sigma0 = bg.j0_states().iter().find(|s| {
            (s.mu - x).abs() <= tol.cluster * (1.0 + x.abs())
                && pair.phi.eval(s.mu).abs() <= tol.zero * pair.phi.abs_scale(C64::new(s.mu, 0.0)).max(1e-300)
        });
        if let Some(s0) = sigma0 {
            let sheet = match s0.kind {
                J0Kind::Bound => Some(Sheet::One),
                J0Kind::Antibound => Some(Sheet::Two),
                J0Kind::Virtual | J0Kind::Closed => None,
            };
            states.push(State {
                lam: z,
                sheet,
                kind: StateKind::Sigma0,
                multiplicity: mult,
                gap: Some(s0.gap),
                fdot,
            });
            continue;
        }
        let gap = match bg.locate(x) {
            Location::Gap(j) => j,
            Location::Band(j) => {
                return Err(Error::ClassViolation(format!(
                    "zero {x} of the state polynomial inside band {j}"
                )))
            }
            Location::Edge(_) => unreachable!(),
        };
        let sheet = zero_sheet(bg, pair, z, tol)?;
        let kind = match sheet {
            Sheet::One => {
                if mult != 1 {
                    return Err(Error::ClassViolation(format!(
                        "bound state {x} has multiplicity {mult}"
                    )));
                }
                StateKind::Bound
            }
            Sheet::Two => StateKind::Antibound,
        };
        states.push(State {
            lam: z,
            sheet: Some(sheet),
            kind,
            multiplicity: mult,
            gap: Some(gap),
            fdot,
        });
    }
    Ok(states)
}

/// All states of the operator, one entry per distinct zero of `F`.
pub fn all_states(jost: &JostData, tol: &Tolerances) -> Result<Vec<State>> {
    classify(jost.background(), &jost.pair(), jost.state_poly(), tol)
}

/// Checks of the structure theorems on a classified state list.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureReport {
    /// Number of states (with multiplicity) on each finite gap closure.
    pub gap_counts: Vec<usize>,
    pub gap_parity_ok: bool,
    /// `(-1)^(q-j) F'(lambda) < 0` at every eigenvalue.
    pub sign_law_ok: bool,
    /// `F` has no zero and the sign of `phi_q` on sampled band points.
    pub band_sign_ok: bool,
    pub bound_simple: bool,
    /// No real projection carries zeros on both sheets.
    pub sheet_exclusive: bool,
    /// Bound plus virtual states, counting sheet-1 `Sigma0` states.
    pub bound_virtual_with_sigma0: usize,
    /// Bound plus virtual states, `Bound` kind only.
    pub bound_virtual_plain: usize,
    /// Multiplicities of sheet-2 real and non-real zeros, for the log.
    pub sheet_two_multiplicities: Vec<usize>,
}

impl StructureReport {
    pub fn all_ok(&self) -> bool {
        self.gap_parity_ok
            && self.sign_law_ok
            && self.band_sign_ok
            && self.bound_simple
            && self.sheet_exclusive
    }
}

pub fn structure_report(bg: &Background, f_poly: &Poly, states: &[State]) -> StructureReport {
    let q = bg.q();
    let mut gap_counts = vec![0; q.saturating_sub(1)];
    for s in states {
        if let Some(j) = s.gap {
            if (1..q).contains(&j) && s.lam.im == 0.0 {
                gap_counts[j - 1] += s.multiplicity;
            }
        }
    }
    let gap_parity_ok = bg
        .bands()
        .gaps
        .iter()
        .zip(&gap_counts)
        .all(|(g, &c)| !g.open || c % 2 == 1);

    let mut sign_law_ok = true;
    let mut bound_simple = true;
    for s in states.iter().filter(|s| s.is_eigenvalue()) {
        let j = s.gap.unwrap_or(0);
        let fd = s.fdot.unwrap_or(0.0);
        if gap_sign(q, j) * fd >= 0.0 {
            sign_law_ok = false;
        }
        if s.multiplicity != 1 {
            bound_simple = false;
        }
    }

    let mut band_sign_ok = true;
    let pq = bg.phi_q();
    for &(lo, hi) in &bg.bands().bands {
        for k in 0..64 {
            let t = (k as f64 + 0.5) / 64.0 * std::f64::consts::PI;
            let x = 0.5 * (lo + hi) - 0.5 * (hi - lo) * t.cos();
            let fx = f_poly.eval(x);
            let px = pq.eval(x);
            if fx == 0.0 || fx.signum() != px.signum() {
                band_sign_ok = false;
            }
        }
    }

    let mut sheet_exclusive = true;
    let real: Vec<&State> = states.iter().filter(|s| s.lam.im == 0.0).collect();
    for (i, a) in real.iter().enumerate() {
        for b in &real[i + 1..] {
            let close = (a.lam.re - b.lam.re).abs() <= 1e-7 * (1.0 + a.lam.re.abs());
            if close && a.sheet != b.sheet {
                sheet_exclusive = false;
            }
        }
    }

    let bv = |with_sigma0: bool| {
        states
            .iter()
            .filter(|s| match s.kind {
                StateKind::Bound | StateKind::Virtual => true,
                StateKind::Sigma0 => with_sigma0 && s.sheet != Some(Sheet::Two),
                _ => false,
            })
            .map(|s| s.multiplicity)
            .sum()
    };

    StructureReport {
        gap_counts,
        gap_parity_ok,
        sign_law_ok,
        band_sign_ok,
        bound_simple,
        sheet_exclusive,
        bound_virtual_with_sigma0: bv(true),
        bound_virtual_plain: bv(false),
        sheet_two_multiplicities: states
            .iter()
            .filter(|s| s.sheet == Some(Sheet::Two))
            .map(|s| s.multiplicity)
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormingMethod {
    /// `sum_k f_hat_k^+(r)^2`, truncated once the geometric tail is below
    /// `1e-12` of the partial sum.
    Series,
    /// `F'(r) / (a^0_0 f_hat_0^-(r)^2) (-1)^(q-j+1) 2 sinh(q h(r))`.
    Formula,
    /// `a^0_0 (d/dlambda f_hat_0^+)(r) f_hat_1^+(r)`.
    Derivative,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norming {
    pub lam: f64,
    pub gap: usize,
    pub value: f64,
}

/// Norming constants of the eigenvalues in `states`.
pub fn norming_constants(
    jost: &JostData,
    states: &[State],
    method: NormingMethod,
) -> Result<Vec<Norming>> {
    let bg = jost.background();
    let q = bg.q();
    let mut out = Vec::new();
    for s in states.iter().filter(|s| s.is_eigenvalue()) {
        let r = s.lam.re;
        let j = s.gap.unwrap_or(0);
        let value = match method {
            NormingMethod::Series => norming_series(jost, r)?,
            NormingMethod::Formula => {
                let fdot = jost.state_poly().derivative().eval(r);
                let (_, fm) = jost.f_hat(0, r);
                let h = bg.quasimomentum(C64::new(r, 0.0)).im;
                fdot / (bg.a0(0) * fm * fm)
                    * (-gap_sign(q, j))
                    * 2.0
                    * (q as f64 * h).sinh()
            }
            NormingMethod::Derivative => {
                let h = 1e-5 * (1.0 + r.abs());
                let d = |t: f64| jost.f_hat(0, t).0;
                let d1 = (d(r + h) - d(r - h)) / (2.0 * h);
                let d2 = (d(r + h / 2.0) - d(r - h / 2.0)) / h;
                let deriv = (4.0 * d2 - d1) / 3.0;
                bg.a0(0) * deriv * jost.f_hat(1, r).0
            }
        };
        out.push(Norming { lam: r, gap: j, value });
    }
    Ok(out)
}

fn norming_series(jost: &JostData, r: f64) -> Result<f64> {
    let bg = jost.background();
    let q = bg.q();
    let lam = C64::new(r, 0.0);
    let (xi, _) = bg.multipliers_with(lam, bg.sqrt_disc(lam));
    let ratio = xi.re * xi.re;
    if ratio >= 1.0 {
        return Err(Error::Numerical(format!("no decay at {r}")));
    }
    let start = q * (jost.p() + 1).div_ceil(q);
    let mut sum: f64 = (0..start).map(|k| jost.f_hat(k, r).0.powi(2)).sum();
    let mut block: f64 = (start..start + q).map(|k| jost.f_hat(k, r).0.powi(2)).sum();
    for _ in 0..10_000_000 {
        sum += block;
        block *= ratio;
        let tail = block / (1.0 - ratio);
        if tail < 1e-12 * sum {
            return Ok(sum + tail);
        }
    }
    Err(Error::Numerical(format!("norming series at {r} did not converge")))
}

/// `S = f_0^- / f_0^+` on the sheet of `pt`.
pub fn s_matrix(bg: &Background, pair: &JostPair, pt: SheetPoint) -> C64 {
    pair.f_minus(bg, pt) / pair.f(bg, pt)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct S1Zero {
    pub value: C64,
    pub multiplicity: usize,
    pub on_dirichlet: bool,
    pub on_edge: bool,
}

/// Zeros of `phi_0^+`, which are the zeros of `S - 1` away from Dirichlet
/// points and band edges, flagged by where they sit.
pub fn zeros_s_minus_1(bg: &Background, phi0: &Poly, tol: &Tolerances) -> Result<Vec<S1Zero>> {
    if phi0.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let roots = phi0.roots_with(RootOptions {
        cluster_tol: tol.cluster,
        residual_gate: tol.root_gate,
    })?;
    Ok(roots
        .roots
        .iter()
        .map(|r| {
            let x = r.value.re;
            let real = r.value.im == 0.0;
            let etol = tol.edge * (1.0 + x.abs());
            S1Zero {
                value: r.value,
                multiplicity: r.multiplicity,
                on_dirichlet: real
                    && bg.bands().gaps.iter().any(|g| (g.mu - x).abs() <= etol),
                on_edge: real && bg.bands().edges.iter().any(|e| (e - x).abs() <= etol),
            }
        })
        .collect())
}

/// The zero set violates the genericity condition: a zero sits on the
/// Dirichlet set or on a band edge without being on both.
pub fn s1_condition_violated(zeros: &[S1Zero]) -> bool {
    zeros.iter().any(|z| z.on_dirichlet != z.on_edge)
}

/// Resolvent entry `((J - lambda)^{-1})_{m n} = -Phi_m f_n^+ / (a_0 f_0^+)`
/// for `1 <= m <= n`, with `Phi` the Dirichlet solution.
pub fn resolvent_entry(jost: &JostData, m: usize, n: usize, pt: SheetPoint) -> C64 {
    let (m, n) = if m <= n { (m, n) } else { (n, m) };
    let op = jost.operator();
    let lam = pt.lam;
    let mut prev = C64::new(0.0, 0.0);
    let mut cur = C64::new(1.0, 0.0);
    for k in 1..m {
        let next = ((lam - op.b(k)) * cur - op.a(k - 1) * prev) / op.a(k);
        prev = cur;
        cur = next;
    }
    -cur * jost.f(n, pt) / (op.a(0) * jost.f(0, pt))
}

/// Roots of a polynomial as a [`RootSet`], exposed for callers that only
/// want the projections.
pub fn projections(f_poly: &Poly, tol: &Tolerances) -> Result<RootSet> {
    f_poly.roots_with(RootOptions {
        cluster_tol: tol.cluster,
        residual_gate: tol.root_gate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jost::Perturbation;

    fn worked() -> JostData {
        let bg = Background::new(vec![2.0, 0.5], vec![0.0, 0.0]).unwrap();
        JostData::new(&bg, &Perturbation::new(vec![1.0], vec![0.0])).unwrap()
    }

    #[test]
    fn worked_states() {
        let j = worked();
        let st = all_states(&j, &Tolerances::default()).unwrap();
        assert_eq!(st.len(), 3);
        let r = (189.0_f64 / 20.0).sqrt();
        assert!((st[0].lam.re + r).abs() < 1e-12);
        assert_eq!(st[0].kind, StateKind::Bound);
        assert_eq!(st[0].gap, Some(0));
        assert_eq!(st[1].kind, StateKind::Sigma0);
        assert_eq!(st[1].sheet, Some(Sheet::Two));
        assert!((st[2].lam.re - r).abs() < 1e-12);
        assert_eq!(st[2].gap, Some(2));
        let rep = structure_report(j.background(), j.state_poly(), &st);
        assert!(rep.all_ok(), "{rep:?}");
        assert_eq!(rep.gap_counts, vec![1]);
    }

    #[test]
    fn worked_norming_constants_agree() {
        let j = worked();
        let st = all_states(&j, &Tolerances::default()).unwrap();
        let a = norming_constants(&j, &st, NormingMethod::Series).unwrap();
        let b = norming_constants(&j, &st, NormingMethod::Formula).unwrap();
        let c = norming_constants(&j, &st, NormingMethod::Derivative).unwrap();
        assert_eq!(a.len(), 2);
        for ((x, y), z) in a.iter().zip(&b).zip(&c) {
            assert!(x.value > 0.0);
            assert!((x.value - y.value).abs() < 1e-9 * x.value, "{x:?} {y:?}");
            assert!((x.value - z.value).abs() < 1e-7 * x.value, "{x:?} {z:?}");
        }
    }

    #[test]
    fn worked_s1_zero_is_dirichlet() {
        let j = worked();
        let z = zeros_s_minus_1(j.background(), j.phi_plus(0), &Tolerances::default()).unwrap();
        assert_eq!(z.len(), 1);
        assert!(z[0].on_dirichlet && !z[0].on_edge);
        assert!(s1_condition_violated(&z));
    }

    #[test]
    fn s_matrix_unimodular_on_bands() {
        let j = worked();
        let pair = j.pair();
        for x in [-2.3, -1.7, 1.6, 2.2] {
            let s = s_matrix(j.background(), &pair, SheetPoint::real(x, Sheet::One));
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }
}
