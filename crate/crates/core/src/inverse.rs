//! Inverse problem: candidate validation, scattering data, the
//! Gel'fand-Levitan-Marchenko equation and coefficient recovery, plus the
//! interpolation routes that rebuild the Jost function from the state
//! polynomial.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::background::{Background, Sheet, SheetPoint};
use crate::error::{Error, Result};
use crate::jost::{JostPair, Perturbation};
use crate::poly::{interpolate, Poly, RootOptions};
use crate::states::{self, gap_sign, S1Zero, State, StateKind, Tolerances};

/// A function `f = P1 + m_+ P2` together with the constants it claims.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub pair: JostPair,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Clone, Debug)]
pub struct ValidatedCandidate {
    pub pair: JostPair,
    pub c1: f64,
    pub c2: f64,
    pub nu: usize,
    pub p: usize,
    /// `P = phi_q f f_-`.
    pub state_poly: Poly,
    pub states: Vec<State>,
}

/// `prod_{j=0}^p a^0_j`.
pub fn a_prod(bg: &Background, p: usize) -> f64 {
    (0..=p).map(|j| bg.a0(j as i64)).product()
}

/// Laurent coefficients of `m_+` at infinity on sheet 1:
/// `m_+(lambda) = sum_{k>=1} out[k] lambda^{-k}`, `k <= order`.
pub fn weyl_laurent(bg: &Background, order: usize) -> Vec<f64> {
    let q = bg.q();
    let n = order + 1;
    let rev = |p: &Poly, deg: usize| -> Vec<f64> {
        (0..n).map(|i| if i <= deg { p.coeff(deg - i) } else { 0.0 }).collect()
    };
    let a = rev(bg.phi_q(), q - 1);
    let b = rev(bg.half_diff(), q);
    let c = rev(bg.theta_q1(), q - 1);
    let mul = |x: &[f64], y: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate().take(n - i) {
                out[i + j] += xi * yj;
            }
        }
        out
    };
    let div = |x: &[f64], y: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = x[i];
            for j in 1..=i {
                acc -= y[j] * out[i - j];
            }
            out[i] = acc / y[0];
        }
        out
    };
    // m_+ = w g(w) with w^2 A g^2 - 2 B g - C = 0.
    let mut g = vec![0.0; n];
    for _ in 0..=n {
        let g2 = mul(&g, &g);
        let ag2 = mul(&a, &g2);
        let mut num = vec![0.0; n];
        for i in 0..n {
            num[i] = if i >= 2 { ag2[i - 2] } else { 0.0 } - c[i];
        }
        let b2: Vec<f64> = b.iter().map(|x| 2.0 * x).collect();
        g = div(&num, &b2);
    }
    let mut out = vec![0.0; n];
    for k in 1..n {
        out[k] = g[k - 1];
    }
    out
}

/// Laurent coefficients `[lambda^0, lambda^1, ..]` of `P1 + m_+ P2` at
/// sheet-1 infinity, with the scale of the contributing terms.
fn sheet_one_expansion(bg: &Background, pair: &JostPair) -> (Vec<f64>, Vec<f64>) {
    let d2 = pair.phi.degree().unwrap_or(0);
    let d1 = pair.theta.degree().unwrap_or(0);
    let top = d1.max(d2);
    let mu = weyl_laurent(bg, d2 + 2);
    let mut coef = vec![0.0; top + 1];
    let mut scale = vec![0.0; top + 1];
    for e in 0..=top {
        let mut acc = pair.theta.coeff(e);
        let mut sc = acc.abs();
        for k in e + 1..=d2 {
            let t = pair.phi.coeff(k) * mu[k - e];
            acc += t;
            sc += t.abs();
        }
        coef[e] = acc;
        scale[e] = sc;
    }
    (coef, scale)
}

/// Check Definition-2 membership and classify the zeros of `P`.
pub fn validate_candidate(
    bg: &Background,
    cand: &Candidate,
    tol: &Tolerances,
) -> Result<ValidatedCandidate> {
    if !bg.all_gaps_open() {
        return Err(Error::InverseGate("background has a closed gap".into()));
    }
    let violation = |m: String| Err(Error::ClassViolation(m));
    let pair = &cand.pair;
    let nu = match pair.phi.degree() {
        Some(d) => d + 1,
        None => return violation("P2 vanishes identically".into()),
    };
    let p = nu.div_ceil(2);
    let max_theta = nu.saturating_sub(2);
    if pair.theta.degree().is_some_and(|d| d > max_theta) {
        return violation(format!("deg P1 exceeds {max_theta}"));
    }
    if !(cand.c1 > 0.0) {
        return violation(format!("c1 = {} is not positive", cand.c1));
    }
    if cand.c2 == 0.0 || !cand.c2.is_finite() {
        return violation("c2 = 0".into());
    }
    let ap = a_prod(bg, p);
    let lead2 = pair.phi.leading() / bg.a0(0);
    if (lead2 + cand.c2 / ap).abs() > 1e-8 * lead2.abs().max(1e-300) {
        return violation(format!(
            "sheet-2 leading coefficient {} differs from -c2/A_p = {}",
            lead2,
            -cand.c2 / ap
        ));
    }
    let (coef, scale) = sheet_one_expansion(bg, pair);
    for e in 1..coef.len() {
        if coef[e].abs() > 1e-8 * scale[e].max(1.0) {
            return violation(format!("f grows like lambda^{e} on sheet 1"));
        }
    }
    let limit = cand.c1 * ap;
    if (coef[0] - limit).abs() > 1e-8 * limit.max(scale[0]) {
        return violation(format!(
            "sheet-1 limit {} differs from c1 A_p = {}",
            coef[0], limit
        ));
    }

    let f_poly = pair.state_poly(bg);
    let states = states::classify(bg, pair, &f_poly, tol)?;
    let q = bg.q();
    for s in &states {
        let simple_needed = s.is_eigenvalue() || matches!(s.kind, StateKind::Virtual | StateKind::Sigma0);
        if simple_needed && s.multiplicity != 1 {
            return violation(format!("state {} is not simple", s.lam));
        }
        if s.is_eigenvalue() {
            let j = s.gap.unwrap_or(0);
            if gap_sign(q, j) * s.fdot.unwrap_or(0.0) >= 0.0 {
                return violation(format!("sign law fails at bound state {}", s.lam.re));
            }
        }
        if s.kind == StateKind::Sigma0 {
            let x = s.lam.re;
            if pair.theta.eval(x).abs() <= tol.zero * pair.theta.abs_scale(s.lam).max(1.0) {
                return violation(format!("f vanishes at the Dirichlet point {x}"));
            }
        }
    }
    Ok(ValidatedCandidate {
        pair: pair.clone(),
        c1: cand.c1,
        c2: cand.c2,
        nu,
        p,
        state_poly: f_poly,
        states,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundDatum {
    pub lam: f64,
    pub gap: usize,
    pub norming: f64,
}

#[derive(Clone, Debug)]
pub struct ScatteringData {
    pub pair: JostPair,
    pub nu: usize,
    pub bound: Vec<BoundDatum>,
}

/// Regularized `(f_hat, f_hat_-)` of a pair at a real gap point.
pub fn pair_hat(bg: &Background, pair: &JostPair, x: f64) -> (f64, f64) {
    let [dp, dm, mp, mm] = bg.weyl_hat(x);
    let t = pair.theta.eval(x);
    let f = pair.phi.eval(x);
    (dp * t + mp * f, dm * t + mm * f)
}

/// Regularized Bloch solution `psi_hat_n^+` at a real gap point on sheet 1.
pub fn bloch_hat(bg: &Background, n: usize, x: f64) -> f64 {
    let [dp, _, mp, _] = bg.weyl_hat(x);
    let lam = C64::new(x, 0.0);
    let (xi, _) = bg.multipliers_with(lam, bg.sqrt_disc(lam));
    let q = bg.q();
    let (k, r) = (n / q, n % q);
    (dp * bg.theta(r).eval(x) + mp * bg.phi(r).eval(x)) * xi.re.powi(k as i32)
}

/// Scattering data: the Jost function with bound states and norming
/// constants from the state-polynomial formula.
pub fn scattering_data(bg: &Background, v: &ValidatedCandidate) -> ScatteringData {
    let q = bg.q();
    let dp = v.state_poly.derivative();
    let bound = v
        .states
        .iter()
        .filter(|s| s.is_eigenvalue())
        .map(|s| {
            let r = s.lam.re;
            let j = s.gap.unwrap_or(0);
            let (_, fm) = pair_hat(bg, &v.pair, r);
            let h = bg.quasimomentum(C64::new(r, 0.0)).im;
            let norming = dp.eval(r) / (bg.a0(0) * fm * fm)
                * (-gap_sign(q, j))
                * 2.0
                * (q as f64 * h).sinh();
            BoundDatum { lam: r, gap: j, norming }
        })
        .collect();
    ScatteringData {
        pair: v.pair.clone(),
        nu: v.nu,
        bound,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlmOptions {
    /// Quadrature nodes per band at the first pass; doubled until stable.
    pub start_nodes: usize,
    pub max_nodes: usize,
    /// Gate on `max |F(l, m)|` over `l + m >= nu + 1`.
    pub vanishing_gate: f64,
    /// Node doubling stops when successive kernels differ by less.
    pub convergence: f64,
}

impl Default for GlmOptions {
    fn default() -> Self {
        GlmOptions {
            start_nodes: 32,
            max_nodes: 1 << 16,
            vanishing_gate: 1e-8,
            convergence: 1e-12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Kernel {
    /// `K(n, m)` for `0 <= n, m <= L`, upper triangular.
    pub k: Vec<Vec<f64>>,
    /// The GLM input `F(l, m)`.
    pub big_f: Vec<Vec<f64>>,
    pub nodes_per_band: usize,
    /// `max |F(l, m)|` over `l + m >= nu + 1`.
    pub vanishing_residual: f64,
    /// Largest entry removed when enforcing the finite support of `K`.
    pub support_residual: f64,
    /// `|1 + sum_l x_l F(l, 0)|` of the homogeneous row `n = 0`.
    pub origin_residual: f64,
    /// Largest imaginary part met in the band integrals.
    pub imag_residual: f64,
}

/// Continuous part of `F(l, m)`, `l, m <= size - 1`, with `n` midpoint nodes
/// on each band loop `lambda = c + h cos(t)`: `t` in `(0, pi)` runs along
/// the lower rim, `(pi, 2pi)` along the upper rim.
fn continuous_part(bg: &Background, pair: &JostPair, size: usize, n: usize) -> (Vec<Vec<f64>>, f64) {
    let mut acc = vec![vec![C64::new(0.0, 0.0); size]; size];
    let a00 = bg.a0(0);
    let q = bg.q();
    let mut psi = vec![C64::new(0.0, 0.0); size];
    for &(lo, hi) in &bg.bands().bands {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        for i in 0..n {
            let t = (i as f64 + 0.5) * 2.0 * PI / n as f64;
            let x = c + h * t.cos();
            let lam = if t < PI { C64::new(x, -0.0) } else { C64::new(x, 0.0) };
            let s = bg.sqrt_disc(lam);
            let w = bg.weyl_with(lam, s);
            let (xi, _) = bg.multipliers_with(lam, s);
            let p1 = pair.theta.eval(x);
            let p2 = pair.phi.eval(x);
            let sm = (p1 + w.m_minus * p2) / (p1 + w.m_plus * p2);
            let base: Vec<C64> = (0..q)
                .map(|r| bg.theta(r).eval(x) + w.m_plus * bg.phi(r).eval(x))
                .collect();
            let mut xk = C64::new(1.0, 0.0);
            for (l, slot) in psi.iter_mut().enumerate() {
                if l > 0 && l % q == 0 {
                    xk *= xi;
                }
                *slot = base[l % q] * xk;
            }
            let weight = sm * bg.phi_q().eval(x) / (a00 * 2.0 * s)
                * (-h * t.sin())
                * (2.0 * PI / n as f64);
            for l in 0..size {
                let wl = weight * psi[l];
                for m in l..size {
                    acc[l][m] += wl * psi[m];
                }
            }
        }
    }
    let mut out = vec![vec![0.0; size]; size];
    let mut imag: f64 = 0.0;
    for l in 0..size {
        for m in l..size {
            // -(1 / 2 pi i) * acc
            let v = acc[l][m] * C64::new(0.0, 1.0) / (2.0 * PI);
            imag = imag.max(v.im.abs());
            out[l][m] = v.re;
            out[m][l] = v.re;
        }
    }
    (out, imag)
}

/// Assemble `F(l, m)` and solve the GLM equation for `K`.
pub fn glm_kernel(bg: &Background, data: &ScatteringData, opts: &GlmOptions) -> Result<Kernel> {
    let nu = data.nu;
    let size = nu + 3;
    let big_l = size - 1;

    let discrete = {
        let mut d = vec![vec![0.0; size]; size];
        for b in &data.bound {
            let psi: Vec<f64> = (0..size).map(|l| bloch_hat(bg, l, b.lam)).collect();
            for l in 0..size {
                for m in 0..size {
                    d[l][m] += psi[l] * psi[m] / b.norming;
                }
            }
        }
        d
    };
    let vanishing = |f0: &[Vec<f64>]| {
        let mut r: f64 = 0.0;
        for l in 0..size {
            for m in 0..size {
                if l + m >= nu + 1 {
                    r = r.max((f0[l][m] + discrete[l][m]).abs());
                }
            }
        }
        r
    };

    let mut n = opts.start_nodes;
    let (mut prev, mut imag) = continuous_part(bg, &data.pair, size, n);
    let mut accepted = None;
    while n < opts.max_nodes {
        n *= 2;
        let (cur, im) = continuous_part(bg, &data.pair, size, n);
        let mut diff: f64 = 0.0;
        for l in 0..size {
            for m in 0..size {
                diff = diff.max((cur[l][m] - prev[l][m]).abs());
            }
        }
        prev = cur;
        imag = im;
        if diff < opts.convergence && vanishing(&prev) < opts.vanishing_gate {
            accepted = Some(n);
            break;
        }
    }
    let vanishing_residual = vanishing(&prev);
    let nodes = match accepted {
        Some(n) => n,
        None => {
            return Err(Error::InverseGate(format!(
                "quadrature did not settle: vanishing residual {vanishing_residual:.2e} at {n} nodes per band"
            )))
        }
    };
    let mut f = prev;
    for l in 0..size {
        for m in 0..size {
            f[l][m] += discrete[l][m];
        }
    }

    let mut k = vec![vec![0.0; size]; size];
    let mut origin_residual = 0.0;
    for row in (0..=big_l).rev() {
        let idx: Vec<usize> = (row + 1..=big_l).collect();
        let x = if idx.is_empty() {
            Vec::new()
        } else {
            let s = idx.len();
            let mat = DMatrix::from_fn(s, s, |i, j| {
                f[idx[j]][idx[i]] + if i == j { 1.0 } else { 0.0 }
            });
            let rhs = DVector::from_fn(s, |i, _| -f[row][idx[i]]);
            let sol = mat
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::InverseGate(format!("GLM system singular at row {row}")))?;
            sol.iter().copied().collect()
        };
        let den = 1.0
            + f[row][row]
            + idx.iter().zip(&x).map(|(&l, xl)| xl * f[l][row]).sum::<f64>();
        if row == 0 {
            origin_residual = den.abs();
            k[0][0] = k[1][1];
        } else {
            if den <= 0.0 {
                return Err(Error::InverseGate(format!(
                    "GLM diagonal at row {row} has no positive root"
                )));
            }
            k[row][row] = 1.0 / den.sqrt();
        }
        for (&m, xm) in idx.iter().zip(&x) {
            k[row][m] = k[row][row] * xm;
        }
    }

    let mut support_residual: f64 = 0.0;
    for row in 0..size {
        for m in row..size {
            if m != row && row + m >= nu + 1 {
                support_residual = support_residual.max(k[row][m].abs());
                k[row][m] = 0.0;
            }
        }
        if row >= 1 && 2 * row >= nu + 1 {
            support_residual = support_residual.max((k[row][row] - 1.0).abs());
            k[row][row] = 1.0;
        }
    }

    Ok(Kernel {
        k,
        big_f: f,
        nodes_per_band: nodes,
        vanishing_residual,
        support_residual,
        origin_residual,
        imag_residual: imag,
    })
}

/// Coefficients from the kernel:
/// `a_n / a^0_n = K(n+1, n+1) / K(n, n)` and
/// `b_n = b^0_n + a^0_n K(n, n+1) / K(n, n) - a^0_{n-1} K(n-1, n) / K(n-1, n-1)`.
pub fn recover_coefficients(bg: &Background, kernel: &Kernel, nu: usize) -> Result<Perturbation> {
    let p = nu.div_ceil(2);
    let k = &kernel.k;
    let mut u = Vec::with_capacity(p);
    let mut v = Vec::with_capacity(p);
    for n in 1..=p {
        let a0 = bg.a0(n as i64);
        let an = a0 * k[n + 1][n + 1] / k[n][n];
        let bn = bg.b0(n as i64) + a0 * k[n][n + 1] / k[n][n]
            - bg.a0(n as i64 - 1) * k[n - 1][n] / k[n - 1][n - 1];
        u.push(an - a0);
        v.push(bn - bg.b0(n as i64));
    }
    if nu % 2 == 1 {
        u[p - 1] = 0.0;
    }
    let pert = Perturbation::new(u, v);
    pert.nu()?;
    Ok(pert)
}

#[derive(Clone, Debug)]
pub struct Inversion {
    pub perturbation: Perturbation,
    pub kernel: Kernel,
    pub scattering: ScatteringData,
}

/// Candidate to coefficients through the GLM equation.
pub fn invert(
    bg: &Background,
    cand: &Candidate,
    tol: &Tolerances,
    opts: &GlmOptions,
) -> Result<Inversion> {
    let v = validate_candidate(bg, cand, tol)?;
    let data = scattering_data(bg, &v);
    let kernel = glm_kernel(bg, &data, opts)?;
    let perturbation = recover_coefficients(bg, &kernel, v.nu)?;
    Ok(Inversion {
        perturbation,
        kernel,
        scattering: data,
    })
}

#[derive(Clone, Debug)]
pub struct ThetaReconstruction {
    pub theta: Poly,
    /// Interpolation residual of the accepted node assignment.
    pub residual: f64,
    /// Nodes used, with the sheet their Weyl function was taken from.
    pub nodes: Vec<(C64, Sheet)>,
}

/// Rebuild `theta_0^+` from the state polynomial and `phi_0^+`.
///
/// Non-real zeros and real zeros against the sign law are sheet-2 nodes
/// (`theta = -m_- phi`). Real gap zeros obeying the sign law may sit on
/// either sheet; every assignment is tried and exactly one must reproduce
/// the state polynomial. Zeros at band edges, where both Weyl functions equal
/// `half_diff / phi_q`, are nodes on either sheet. Zeros at Dirichlet points
/// where `phi_0` vanishes carry no equation.
pub fn reconstruct_theta(
    bg: &Background,
    f_poly: &Poly,
    phi0: &Poly,
    tol: &Tolerances,
) -> Result<ThetaReconstruction> {
    let nu = phi0
        .degree()
        .map(|d| d + 1)
        .ok_or_else(|| Error::ClassViolation("phi_0^+ vanishes".into()))?;
    let degree = nu.saturating_sub(2);
    let roots = f_poly.roots_with(RootOptions {
        cluster_tol: tol.cluster,
        residual_gate: tol.root_gate,
    })?;
    let dfp = f_poly.derivative();
    let q = bg.q();
    let mut fixed: Vec<(C64, Sheet)> = Vec::new();
    let mut free: Vec<C64> = Vec::new();
    let mut edges: Vec<f64> = Vec::new();
    for r in &roots.roots {
        if r.multiplicity != 1 {
            return Err(Error::InverseGate(format!("state polynomial has a multiple zero at {}", r.value)));
        }
        let z = r.value;
        if z.im != 0.0 {
            fixed.push((z, Sheet::Two));
            continue;
        }
        let x = z.re;
        let at_dirichlet = bg.bands().gaps.iter().any(|g| {
            (g.mu - x).abs() <= tol.cluster * (1.0 + x.abs())
                && phi0.eval(g.mu).abs() <= tol.zero * phi0.abs_scale(C64::new(g.mu, 0.0)).max(1e-300)
        });
        if at_dirichlet {
            continue;
        }
        match bg.locate(x) {
            crate::background::Location::Gap(j) => {
                if gap_sign(q, j) * dfp.eval(x) < 0.0 {
                    free.push(z);
                } else {
                    fixed.push((z, Sheet::Two));
                }
            }
            crate::background::Location::Edge(_) => {
                if bg.phi_q().eval(x).abs() > tol.zero * bg.phi_q().abs_scale(z).max(1.0) {
                    edges.push(x);
                }
            }
            crate::background::Location::Band(j) => {
                return Err(Error::ClassViolation(format!("zero {x} inside band {j}")))
            }
        }
    }
    if free.len() > 16 {
        return Err(Error::InverseGate("too many ambiguous nodes".into()));
    }
    let count = fixed.len() + free.len() + edges.len();
    if count < degree + 1 {
        return Err(Error::InverseGate(format!(
            "{count} interpolation nodes for degree {degree}"
        )));
    }
    let value = |z: C64, sheet: Sheet| -> C64 {
        if edges.contains(&z.re) && z.im == 0.0 {
            return C64::from(-bg.half_diff().eval(z.re) / bg.phi_q().eval(z.re) * phi0.eval(z.re));
        }
        let w = bg.weyl(SheetPoint::new(z, Sheet::One));
        let m = match sheet {
            Sheet::One => w.m_plus,
            Sheet::Two => w.m_minus,
        };
        -m * phi0.eval_c(z)
    };
    let f_scale = f_poly.norm_inf();
    let mut found: Vec<(ThetaReconstruction, f64)> = Vec::new();
    let mut best_residual = f64::INFINITY;
    for mask in 0u32..(1u32 << free.len()) {
        let mut nodes = fixed.clone();
        nodes.extend(edges.iter().map(|&x| (C64::new(x, 0.0), Sheet::One)));
        for (i, &z) in free.iter().enumerate() {
            let sheet = if mask & (1 << i) != 0 { Sheet::Two } else { Sheet::One };
            nodes.push((z, sheet));
        }
        let xs: Vec<C64> = nodes.iter().map(|n| n.0).collect();
        let ys: Vec<C64> = nodes.iter().map(|&(z, s)| value(z, s)).collect();
        let (theta, residual) = match interpolate(&xs, &ys, degree) {
            Ok(v) => v,
            Err(_) => continue,
        };
        best_residual = best_residual.min(residual);
        if residual > 1e-6 {
            continue;
        }
        let pair = JostPair {
            theta: theta.clone(),
            phi: phi0.clone(),
        };
        let mismatch = (&pair.state_poly(bg) - f_poly).norm_inf() / f_scale;
        if mismatch > 1e-6 {
            continue;
        }
        if found
            .iter()
            .all(|(t, _)| (&t.theta - &theta).norm_inf() > 1e-6 * theta.norm_inf().max(1.0))
        {
            found.push((ThetaReconstruction { theta, residual, nodes }, mismatch));
        }
    }
    match found.len() {
        0 => Err(Error::InverseGate(format!(
            "no node assignment reproduces the state polynomial (best residual {best_residual:.2e})"
        ))),
        _ if found.len() == 1 => Ok(found.remove(0).0),
        _ => Err(Error::InverseGate("node assignment is not unique".into())),
    }
}

/// Rebuild the candidate from the state polynomial and `phi_0^+`.
pub fn candidate_from_interpolation(
    bg: &Background,
    f_poly: &Poly,
    phi0: &Poly,
    tol: &Tolerances,
) -> Result<Candidate> {
    let rec = reconstruct_theta(bg, f_poly, phi0, tol)?;
    let nu = phi0.degree().unwrap_or(0) + 1;
    let ap = a_prod(bg, nu.div_ceil(2));
    let c2 = -phi0.leading() * ap / bg.a0(0);
    let c1 = -f_poly.leading() / (bg.a0(0) * c2);
    Ok(Candidate {
        pair: JostPair {
            theta: rec.theta,
            phi: phi0.clone(),
        },
        c1,
        c2,
    })
}

/// Rebuild the candidate from the state polynomial, the zeros of `S - 1`
/// and `c_2`. Zeros on the Dirichlet set or on band edges (but not both)
/// are rejected, since there `S = 1` no longer pins down `phi_0^+`.
pub fn candidate_from_s1_zeros(
    bg: &Background,
    f_poly: &Poly,
    zeros: &[S1Zero],
    c2: f64,
    tol: &Tolerances,
) -> Result<Candidate> {
    if let Some(z) = zeros.iter().find(|z| z.on_dirichlet != z.on_edge) {
        return Err(Error::InverseGate(format!(
            "zero {} of S - 1 lies on the {} set",
            z.value,
            if z.on_dirichlet { "Dirichlet" } else { "band-edge" }
        )));
    }
    let count: usize = zeros.iter().map(|z| z.multiplicity).sum();
    let nu = count + 1;
    let ap = a_prod(bg, nu.div_ceil(2));
    let lead = -bg.a0(0) * c2 / ap;
    let roots = crate::poly::RootSet {
        roots: zeros
            .iter()
            .map(|z| crate::poly::Root {
                value: z.value,
                multiplicity: z.multiplicity,
            })
            .collect(),
        residual: 0.0,
    };
    let phi0 = Poly::from_roots(&roots, lead);
    candidate_from_interpolation(bg, f_poly, &phi0, tol)
}
