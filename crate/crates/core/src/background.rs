//! The q-periodic background operator: fundamental solutions, band
//! structure, the two-sheeted branch of `sqrt(Delta^2 - 1)`, Weyl functions,
//! Bloch solutions and quasi-momentum.
//!
//! Real points inside a band lie on the branch cut. The rim is read off the
//! sign of the (possibly zero) imaginary part: `+0.0` is the upper rim and
//! `-0.0` the lower rim.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::poly::{Poly, RootOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sheet {
    One,
    Two,
}

impl Sheet {
    pub fn other(self) -> Sheet {
        match self {
            Sheet::One => Sheet::Two,
            Sheet::Two => Sheet::One,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Sheet::One => 1.0,
            Sheet::Two => -1.0,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Sheet::One => 1,
            Sheet::Two => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SheetPoint {
    pub lam: C64,
    pub sheet: Sheet,
}

impl SheetPoint {
    pub fn new(lam: C64, sheet: Sheet) -> Self {
        SheetPoint { lam, sheet }
    }

    pub fn real(x: f64, sheet: Sheet) -> Self {
        SheetPoint {
            lam: C64::new(x, 0.0),
            sheet,
        }
    }

    /// Point on the lower rim of the real axis.
    pub fn lower_rim(x: f64, sheet: Sheet) -> Self {
        SheetPoint {
            lam: C64::new(x, -0.0),
            sheet,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gap {
    /// Gap index `j` in `1..q`.
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
    /// Critical point of the discriminant inside the gap closure.
    pub alpha: f64,
    /// Zero of `phi_q` (Dirichlet eigenvalue) inside the gap closure.
    pub mu: f64,
    /// Zero of `theta_{q+1}` inside the gap closure.
    pub nu: f64,
    /// `cosh(height) = |Delta(alpha)|`.
    pub height: f64,
    pub open: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BandStructure {
    /// `lambda_0^+ < lambda_1^- <= lambda_1^+ < ... < lambda_q^-`.
    pub edges: Vec<f64>,
    /// Bands `sigma_1 .. sigma_q` as closed intervals.
    pub bands: Vec<(f64, f64)>,
    /// Finite gaps `gamma_1 .. gamma_{q-1}`, closed ones included with
    /// `open == false`.
    pub gaps: Vec<Gap>,
}

/// Where a real number sits relative to the spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    /// Open gap `gamma_j`, `j` in `0..=q` (`0` and `q` are the infinite gaps).
    Gap(usize),
    /// Interior of band `sigma_j`, `j` in `1..=q`.
    Band(usize),
    /// Within tolerance of `edges[k]`.
    Edge(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum J0Kind {
    Bound,
    Antibound,
    Virtual,
    /// The gap is closed; `mu_j` is no state.
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct J0State {
    pub gap: usize,
    pub mu: f64,
    pub kind: J0Kind,
}

/// Dirichlet points grouped by which Weyl function has the pole there.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Regularizers {
    /// Poles of `m_+` (bound states of the background).
    pub plus: Vec<f64>,
    /// Poles of `m_-` (antibound states of the background).
    pub minus: Vec<f64>,
    /// Dirichlet points sitting at a band edge.
    pub edge: Vec<f64>,
    /// Dirichlet points of closed gaps.
    pub closed: Vec<f64>,
}

impl Regularizers {
    pub fn d_plus(&self, x: f64) -> f64 {
        self.plus.iter().map(|m| x - m).product()
    }

    pub fn d_minus(&self, x: f64) -> f64 {
        self.minus.iter().map(|m| x - m).product()
    }

    pub fn d_plus_poly(&self) -> Poly {
        Poly::from_real_roots(&self.plus, 1.0)
    }

    pub fn d_minus_poly(&self) -> Poly {
        Poly::from_real_roots(&self.minus, 1.0)
    }

    /// `prod sqrt|x - mu|` over edge points times `prod |x - mu|` over closed
    /// gaps, together with the sign of `prod (x - mu)` over edge points.
    pub fn d_edge(&self, x: f64) -> (f64, f64) {
        let mut mag = 1.0;
        let mut sign = 1.0;
        for m in &self.edge {
            mag *= (x - m).abs().sqrt();
            if x < *m {
                sign = -sign;
            }
        }
        for m in &self.closed {
            mag *= (x - m).abs();
        }
        (mag, sign)
    }
}

/// Weyl functions at a point: `m_plus` goes with the solution that is
/// square-summable on sheet 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weyl {
    pub m_plus: C64,
    pub m_minus: C64,
}

#[derive(Clone, Debug)]
pub struct Background {
    q: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    theta: Vec<Poly>,
    phi: Vec<Poly>,
    delta: Poly,
    half_diff: Poly,
    bands: BandStructure,
    j0: Vec<J0State>,
    reg: Regularizers,
    edge_tol: f64,
}

impl Background {
    /// `a` and `b` hold `a^0_1..a^0_q` and `b^0_1..b^0_q`.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let q = a.len();
        if q < 2 {
            return Err(Error::InvalidBackground(format!("period q = {q}, need q >= 2")));
        }
        if b.len() != q {
            return Err(Error::InvalidBackground(format!(
                "a0 has {} entries, b0 has {}",
                q,
                b.len()
            )));
        }
        if a.iter().chain(&b).any(|x| !x.is_finite()) {
            return Err(Error::InvalidBackground("non-finite coefficient".into()));
        }
        if a.iter().any(|&x| x <= 0.0) {
            return Err(Error::InvalidBackground("a0 must be positive".into()));
        }
        let prod: f64 = a.iter().product();
        if (prod - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidBackground(format!(
                "product of a0 is {prod}, must be 1"
            )));
        }

        let mut bg = Background {
            q,
            a,
            b,
            theta: Vec::new(),
            phi: Vec::new(),
            delta: Poly::zero(),
            half_diff: Poly::zero(),
            bands: BandStructure {
                edges: Vec::new(),
                bands: Vec::new(),
                gaps: Vec::new(),
            },
            j0: Vec::new(),
            reg: Regularizers::default(),
            edge_tol: 1e-8,
        };
        let (theta, phi) = bg.fundamental_polys(q + 1);
        bg.delta = (&phi[q + 1] + &theta[q]).scale(0.5);
        bg.half_diff = (&phi[q + 1] - &theta[q]).scale(0.5);
        bg.theta = theta;
        bg.phi = phi;
        bg.bands = bg.compute_bands()?;
        bg.classify_j0();
        Ok(bg)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// `a^0_n` for any integer `n`, with `a^0_0 = a^0_q`.
    pub fn a0(&self, n: i64) -> f64 {
        self.a[(n - 1).rem_euclid(self.q as i64) as usize]
    }

    pub fn b0(&self, n: i64) -> f64 {
        self.b[(n - 1).rem_euclid(self.q as i64) as usize]
    }

    pub fn a0_coeffs(&self) -> &[f64] {
        &self.a
    }

    pub fn b0_coeffs(&self) -> &[f64] {
        &self.b
    }

    /// `theta_n` and `phi_n` for `n = 0..=n_max` as polynomials.
    pub fn fundamental_polys(&self, n_max: usize) -> (Vec<Poly>, Vec<Poly>) {
        let mut th = vec![Poly::constant(1.0), Poly::zero()];
        let mut ph = vec![Poly::zero(), Poly::constant(1.0)];
        for n in 1..n_max {
            let lin = Poly::new(vec![-self.b0(n as i64), 1.0]);
            let an = self.a0(n as i64);
            let an1 = self.a0(n as i64 - 1);
            let t = (&(&lin * &th[n]) - &th[n - 1].scale(an1)).scale(1.0 / an);
            let p = (&(&lin * &ph[n]) - &ph[n - 1].scale(an1)).scale(1.0 / an);
            th.push(t);
            ph.push(p);
        }
        th.truncate(n_max + 1);
        ph.truncate(n_max + 1);
        (th, ph)
    }

    /// `theta_n` for `n <= q + 1`.
    pub fn theta(&self, n: usize) -> &Poly {
        &self.theta[n]
    }

    /// `phi_n` for `n <= q + 1`.
    pub fn phi(&self, n: usize) -> &Poly {
        &self.phi[n]
    }

    /// Discriminant `(phi_{q+1} + theta_q) / 2`.
    pub fn delta(&self) -> &Poly {
        &self.delta
    }

    /// `(phi_{q+1} - theta_q) / 2`.
    pub fn half_diff(&self) -> &Poly {
        &self.half_diff
    }

    pub fn phi_q(&self) -> &Poly {
        &self.phi[self.q]
    }

    pub fn theta_q1(&self) -> &Poly {
        &self.theta[self.q + 1]
    }

    pub fn bands(&self) -> &BandStructure {
        &self.bands
    }

    pub fn j0_states(&self) -> &[J0State] {
        &self.j0
    }

    pub fn regularizers(&self) -> &Regularizers {
        &self.reg
    }

    pub fn edge_tol(&self) -> f64 {
        self.edge_tol
    }

    /// Every finite gap is open.
    pub fn all_gaps_open(&self) -> bool {
        self.bands.gaps.iter().all(|g| g.open)
    }

    /// `sqrt(Delta^2 - 1)` on sheet 1: `-1/2` times the product of principal
    /// square roots of `lambda - e` over all `2q` edges.
    pub fn sqrt_disc(&self, lam: C64) -> C64 {
        let mut prod = C64::new(-0.5, 0.0);
        for &e in &self.bands.edges {
            prod *= rim_sqrt(C64::new(lam.re - e, lam.im));
        }
        prod
    }

    /// The branch value `s` with `xi = Delta + s` on the given sheet.
    pub fn branch(&self, pt: SheetPoint) -> C64 {
        self.sqrt_disc(pt.lam) * pt.sheet.sign()
    }

    /// Weyl functions with `s` the branch value; the member that does not
    /// blow up is computed from `m_+ m_- = -theta_{q+1} / phi_q` so that both
    /// stay accurate near Dirichlet points and at large `|lambda|`.
    pub fn weyl_with(&self, lam: C64, s: C64) -> Weyl {
        let phi = self.half_diff.eval_c(lam);
        let pq = self.phi_q().eval_c(lam);
        let t = self.theta_q1().eval_c(lam);
        let wp = phi + s;
        let wm = phi - s;
        if wp.norm() >= wm.norm() {
            Weyl {
                m_plus: wp / pq,
                m_minus: -t / wp,
            }
        } else {
            Weyl {
                m_plus: -t / wm,
                m_minus: wm / pq,
            }
        }
    }

    /// Weyl functions on the sheet of `pt`: on sheet 2 the roles swap.
    pub fn weyl(&self, pt: SheetPoint) -> Weyl {
        self.weyl_with(pt.lam, self.branch(pt))
    }

    /// Like [`Background::weyl`], but refuses Dirichlet points.
    pub fn weyl_m(&self, pt: SheetPoint) -> Result<(C64, C64)> {
        let pq = self.phi_q().eval_c(pt.lam);
        if pq.norm() < 1e-12 * self.phi_q().abs_scale(pt.lam) {
            return Err(Error::DirichletPoint(pt.lam.re));
        }
        let w = self.weyl(pt);
        Ok((w.m_plus, w.m_minus))
    }

    /// Floquet multipliers `(xi, 1/xi)` where `xi` belongs to the Bloch
    /// solution `psi^+` on the sheet of `pt`.
    pub fn multipliers_with(&self, lam: C64, s: C64) -> (C64, C64) {
        let d = self.delta.eval_c(lam);
        let xp = d + s;
        let xm = d - s;
        if xp.norm() >= xm.norm() {
            (xp, xp.inv())
        } else {
            (xm.inv(), xm)
        }
    }

    pub fn multipliers(&self, pt: SheetPoint) -> (C64, C64) {
        self.multipliers_with(pt.lam, self.branch(pt))
    }

    /// `theta_n(lambda)` and `phi_n(lambda)` for `n < q` plus the
    /// quasi-periodic continuation of `psi_n = theta_n + m phi_n`.
    pub fn bloch_with(&self, n: usize, lam: C64, m: C64, xi: C64) -> C64 {
        let k = n / self.q;
        let r = n % self.q;
        let base = self.theta[r].eval_c(lam) + m * self.phi[r].eval_c(lam);
        base * xi.powu(k as u32)
    }

    /// Bloch solution `psi^+_n` on the sheet of `pt`.
    pub fn bloch(&self, n: usize, pt: SheetPoint) -> C64 {
        let s = self.branch(pt);
        let w = self.weyl_with(pt.lam, s);
        let (xi, _) = self.multipliers_with(pt.lam, s);
        self.bloch_with(n, pt.lam, w.m_plus, xi)
    }

    /// Principal quasi-momentum with `cos(q k) = Delta`, `Re k` in
    /// `[-pi, 0]` and `Im k >= 0` for `Im lambda >= 0`; the lower half-plane
    /// follows by conjugation.
    pub fn quasimomentum(&self, lam: C64) -> C64 {
        if lam.im < 0.0 || (lam.im == 0.0 && lam.im.is_sign_negative()) {
            return self.quasimomentum(lam.conj()).conj();
        }
        let x = lam.re;
        let q = self.q as f64;
        let mut k = self.quasimomentum_real(x) * q;
        if lam.im == 0.0 {
            return k / q;
        }
        let steps = 256;
        for i in 1..=steps {
            let z = C64::new(x, lam.im * i as f64 / steps as f64);
            let (xi, _) = self.multipliers_with(z, self.sqrt_disc(z));
            let base = -C64::i() * xi.ln();
            let shift = ((k.re - base.re) / (2.0 * PI)).round();
            k = base + 2.0 * PI * shift;
        }
        k / q
    }

    fn quasimomentum_real(&self, x: f64) -> C64 {
        let q = self.q as f64;
        let lam = C64::new(x, 0.0);
        let (xi, _) = self.multipliers_with(lam, self.sqrt_disc(lam));
        let j = match self.locate_raw(x) {
            Location::Gap(j) => {
                let re = -PI * (q - j as f64);
                return C64::new(re, -xi.norm().ln()) / q;
            }
            Location::Band(j) | Location::Edge(j) => j,
        };
        let (lo, hi) = (-PI * (q - j as f64 + 1.0), -PI * (q - j as f64));
        let base = -C64::i() * xi.ln();
        let mid = 0.5 * (lo + hi);
        let shift = ((mid - base.re) / (2.0 * PI)).round();
        let mut k = base + 2.0 * PI * shift;
        k.re = k.re.clamp(lo, hi);
        k.im = k.im.max(0.0);
        k / q
    }

    /// Location of a real point; points within `edge_tol * (1 + |x|)` of an
    /// edge report the edge.
    pub fn locate(&self, x: f64) -> Location {
        let tol = self.edge_tol * (1.0 + x.abs());
        for (k, &e) in self.bands.edges.iter().enumerate() {
            if (x - e).abs() <= tol {
                return Location::Edge(k);
            }
        }
        self.locate_raw(x)
    }

    fn locate_raw(&self, x: f64) -> Location {
        let e = &self.bands.edges;
        let q = self.q;
        if x < e[0] {
            return Location::Gap(0);
        }
        if x > e[2 * q - 1] {
            return Location::Gap(q);
        }
        for j in 1..q {
            if x > e[2 * j - 1] && x < e[2 * j] {
                return Location::Gap(j);
            }
        }
        let mut j = 1;
        while j < q && x > e[2 * j - 1] {
            j += 1;
        }
        Location::Band(j)
    }

    /// Gap index of a real point if it lies in an open gap or at one of the
    /// edges bounding a finite gap.
    pub fn gap_closure_of(&self, x: f64) -> Option<usize> {
        match self.locate(x) {
            Location::Gap(j) => Some(j),
            Location::Edge(k) => {
                if k == 0 || k == 2 * self.q - 1 {
                    None
                } else {
                    Some(k.div_ceil(2))
                }
            }
            Location::Band(_) => None,
        }
    }

    /// Height `h` with `cosh h = |Delta(alpha_j)|`.
    pub fn gap_height(&self, j: usize) -> f64 {
        self.bands.gaps[j - 1].height
    }

    fn compute_bands(&self) -> Result<BandStructure> {
        let q = self.q;
        let delta = &self.delta;
        let ddelta = delta.derivative();
        let crit = ddelta.roots_with(RootOptions {
            cluster_tol: 1e-12,
            residual_gate: 1e-8,
        })?;
        let mut alphas = Vec::new();
        for r in &crit.roots {
            if r.value.im != 0.0 || r.multiplicity != 1 {
                return Err(Error::BandFailure(format!(
                    "critical point {} is not a simple real root",
                    r.value
                )));
            }
            alphas.push(polish_newton(&ddelta, r.value.re));
        }
        alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if alphas.len() != q - 1 {
            return Err(Error::BandFailure("wrong number of critical points".into()));
        }

        let mut radius: f64 = 1.0;
        for n in 1..=q as i64 {
            radius = radius.max(self.b0(n).abs() + self.a0(n - 1) + self.a0(n) + 1.0);
        }
        while delta.eval(radius).abs() <= 1.0 || delta.eval(-radius).abs() <= 1.0 {
            radius *= 2.0;
        }

        let sgn = |j: usize| if (q - j) % 2 == 0 { 1.0 } else { -1.0 };
        let mut piece = vec![-radius];
        piece.extend(alphas.iter().copied());
        piece.push(radius);

        let mut edges = vec![0.0; 2 * q];
        let mut gaps = Vec::new();
        let mut open = vec![true; q];
        for j in 1..q {
            let a = alphas[j - 1];
            let v = sgn(j) * delta.eval(a);
            if v < 1.0 - 1e-9 {
                return Err(Error::BandFailure(format!(
                    "|Delta(alpha_{j})| = {} < 1",
                    v.abs()
                )));
            }
            if v - 1.0 <= 1e-12 {
                open[j] = false;
                edges[2 * j - 1] = a;
                edges[2 * j] = a;
            }
        }
        // lambda_j^+ for j = 0..q-1 lies on [alpha_j, alpha_{j+1}] where
        // Delta = sgn(j); lambda_j^- for j = 1..q on [alpha_{j-1}, alpha_j].
        for j in 0..q {
            if j == 0 || open[j] {
                let t = sgn(j);
                edges[2 * j] = bisect(|x| delta.eval(x) - t, piece[j], piece[j + 1]);
            }
        }
        for j in 1..=q {
            if j == q || open[j] {
                let t = sgn(j);
                edges[2 * j - 1] = bisect(|x| delta.eval(x) - t, piece[j - 1], piece[j]);
            }
        }
        for w in edges.windows(2) {
            if w[1] < w[0] {
                return Err(Error::BandFailure("edges out of order".into()));
            }
        }

        let mus = real_roots_sorted(self.phi_q(), q - 1, "phi_q")?;
        let nus = real_roots_sorted(self.theta_q1(), q - 1, "theta_{q+1}")?;
        for j in 1..q {
            let a = alphas[j - 1];
            let v = delta.eval(a).abs();
            gaps.push(Gap {
                index: j,
                lower: edges[2 * j - 1],
                upper: edges[2 * j],
                alpha: a,
                mu: mus[j - 1],
                nu: nus[j - 1],
                height: if open[j] { v.max(1.0).acosh() } else { 0.0 },
                open: open[j],
            });
        }
        let bands = (1..=q).map(|j| (edges[2 * j - 2], edges[2 * j - 1])).collect();
        let bs = BandStructure { edges, bands, gaps };
        for g in &bs.gaps {
            let tol = 1e-7 * (1.0 + g.mu.abs());
            if g.mu < g.lower - tol || g.mu > g.upper + tol {
                return Err(Error::BandFailure(format!(
                    "Dirichlet point {} outside gap {}",
                    g.mu, g.index
                )));
            }
        }
        Ok(bs)
    }

    fn classify_j0(&mut self) {
        let mut reg = Regularizers::default();
        let mut states = Vec::new();
        for g in &self.bands.gaps {
            let tol = self.edge_tol * (1.0 + g.mu.abs());
            let kind = if !g.open {
                J0Kind::Closed
            } else if (g.mu - g.lower).abs() <= tol || (g.mu - g.upper).abs() <= tol {
                J0Kind::Virtual
            } else {
                let lam = C64::new(g.mu, 0.0);
                let (xp, xm) = self.multipliers_with(lam, self.sqrt_disc(lam));
                let tq = self.theta[self.q].eval(g.mu);
                if (xp.re - tq).abs() < (xm.re - tq).abs() {
                    J0Kind::Antibound
                } else {
                    J0Kind::Bound
                }
            };
            match kind {
                J0Kind::Bound => reg.plus.push(g.mu),
                J0Kind::Antibound => reg.minus.push(g.mu),
                J0Kind::Virtual => reg.edge.push(g.mu),
                J0Kind::Closed => reg.closed.push(g.mu),
            }
            states.push(J0State {
                gap: g.index,
                mu: g.mu,
                kind,
            });
        }
        self.j0 = states;
        self.reg = reg;
    }

    /// Regularized Weyl data at a real point in a gap on sheet 1:
    /// `(d_plus_hat, d_minus_hat, m_plus_hat, m_minus_hat)` with
    /// `d_hat = |D^e| D^{+-}` and `m_hat = d_hat m`. All finite at Dirichlet
    /// points that are not edges.
    pub fn weyl_hat(&self, x: f64) -> [f64; 4] {
        let lam = C64::new(x, 0.0);
        let s = self.sqrt_disc(lam).re;
        let phi = self.half_diff.eval(x);
        let t = self.theta_q1().eval(x);
        let (de, sigma) = self.reg.d_edge(x);
        let dp = de * self.reg.d_plus(x);
        let dm = de * self.reg.d_minus(x);
        let a00 = self.a0(0);
        let wp = phi + s;
        let wm = phi - s;
        // phi_q = a00 * sigma * de^2 * D^+ * D^-
        let (mp, mm) = if wp.abs() >= wm.abs() {
            (
                sigma * wp / (a00 * de * self.reg.d_minus(x)),
                dm * (-t / wp),
            )
        } else {
            (
                dp * (-t / wm),
                sigma * wm / (a00 * de * self.reg.d_plus(x)),
            )
        };
        [dp, dm, mp, mm]
    }
}

/// Principal square root, with the rim of the negative real axis taken from
/// the sign of the zero imaginary part.
fn rim_sqrt(w: C64) -> C64 {
    if w.im == 0.0 && w.re < 0.0 {
        let r = (-w.re).sqrt();
        if w.im.is_sign_negative() {
            C64::new(0.0, -r)
        } else {
            C64::new(0.0, r)
        }
    } else {
        w.sqrt()
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn polish_newton(p: &Poly, mut x: f64) -> f64 {
    let dp = p.derivative();
    let mut best = p.eval(x).abs();
    for _ in 0..8 {
        let d = dp.eval(x);
        if d == 0.0 {
            break;
        }
        let next = x - p.eval(x) / d;
        let v = p.eval(next).abs();
        if v < best {
            best = v;
            x = next;
        } else {
            break;
        }
    }
    x
}

fn real_roots_sorted(p: &Poly, expect: usize, name: &str) -> Result<Vec<f64>> {
    let rs = p.roots_with(RootOptions {
        cluster_tol: 1e-12,
        residual_gate: 1e-8,
    })?;
    let mut out = Vec::new();
    for r in &rs.roots {
        if r.value.im != 0.0 {
            return Err(Error::BandFailure(format!("{name} has a non-real root {}", r.value)));
        }
        for _ in 0..r.multiplicity {
            out.push(polish_newton(p, r.value.re));
        }
    }
    if out.len() != expect {
        return Err(Error::BandFailure(format!("{name} has {} roots", out.len())));
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked() -> Background {
        Background::new(vec![2.0, 0.5], vec![0.0, 0.0]).unwrap()
    }

    #[test]
    fn worked_polynomials() {
        let bg = worked();
        assert_eq!(bg.delta().coeffs(), &[-17.0 / 8.0, 0.0, 0.5]);
        assert_eq!(bg.half_diff().coeffs(), &[-15.0 / 8.0, 0.0, 0.5]);
        assert_eq!(bg.phi_q().coeffs(), &[0.0, 0.5]);
        assert_eq!(bg.theta_q1().coeffs(), &[0.0, -0.5]);
    }

    #[test]
    fn worked_bands() {
        let bg = worked();
        let e = &bg.bands().edges;
        for (got, want) in e.iter().zip([-2.5, -1.5, 1.5, 2.5]) {
            assert!((got - want).abs() < 1e-14, "{e:?}");
        }
        let g = &bg.bands().gaps[0];
        assert!(g.alpha.abs() < 1e-15 && g.mu.abs() < 1e-15);
        assert!((g.height.cosh() - 17.0 / 8.0).abs() < 1e-14);
        assert_eq!(bg.j0_states()[0].kind, J0Kind::Antibound);
    }

    #[test]
    fn branch_signs() {
        let bg = worked();
        let x = (189.0_f64 / 20.0).sqrt();
        assert!((bg.sqrt_disc(C64::new(x, 0.0)).re + 2.4).abs() < 1e-13);
        assert!((bg.sqrt_disc(C64::new(-x, 0.0)).re + 2.4).abs() < 1e-13);
        assert!((bg.sqrt_disc(C64::new(0.0, 0.0)).re - 15.0 / 8.0).abs() < 1e-13);
        let up = bg.sqrt_disc(C64::new(2.0, 0.0));
        let down = bg.sqrt_disc(C64::new(2.0, -0.0));
        assert!((up - down.conj()).norm() < 1e-15);
        assert!(up.re.abs() < 1e-15 && up.im < 0.0);
    }

    #[test]
    fn weyl_at_bound_state() {
        let bg = worked();
        let x = (189.0_f64 / 20.0).sqrt();
        let w = bg.weyl(SheetPoint::real(x, Sheet::One));
        assert!((w.m_plus.re - 0.9 / x).abs() < 1e-13);
        let w2 = bg.weyl(SheetPoint::real(x, Sheet::Two));
        assert!((w2.m_plus - w.m_minus).norm() < 1e-13);
    }

    #[test]
    fn large_lambda_weyl() {
        let bg = worked();
        let w = bg.weyl(SheetPoint::real(1e6, Sheet::One));
        assert!((w.m_plus.re * 1e6 - 0.5).abs() < 1e-5);
    }

    #[test]
    fn quasimomentum_in_gap() {
        let bg = worked();
        let k = bg.quasimomentum(C64::new(0.0, 0.0));
        assert!((k.re + PI / 2.0).abs() < 1e-14);
        assert!((k.im - (17.0_f64 / 8.0).acosh() / 2.0).abs() < 1e-13);
        let z = C64::new(0.7, 1.3);
        let k = bg.quasimomentum(z);
        assert!(((k * 2.0).cos() - bg.delta().eval_c(z)).norm() < 1e-10);
        assert!(k.im > 0.0 && k.re <= 0.0 && k.re >= -PI);
    }

    #[test]
    fn free_lattice_closed_gap() {
        let bg = Background::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        let e = &bg.bands().edges;
        for (got, want) in e.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert!((got - want).abs() < 1e-14, "{e:?}");
        }
        assert!(!bg.bands().gaps[0].open);
        assert_eq!(bg.j0_states()[0].kind, J0Kind::Closed);
    }

    #[test]
    fn dirichlet_point_at_edge_is_virtual() {
        let bg = Background::new(vec![1.0, 1.0], vec![1.0, -1.0]).unwrap();
        let e = &bg.bands().edges;
        let s5 = 5.0_f64.sqrt();
        for (got, want) in e.iter().zip([-s5, -1.0, 1.0, s5]) {
            assert!((got - want).abs() < 1e-14, "{e:?}");
        }
        assert_eq!(bg.j0_states()[0].kind, J0Kind::Virtual);
        assert!((bg.j0_states()[0].mu - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_backgrounds() {
        assert!(Background::new(vec![1.0], vec![0.0]).is_err());
        assert!(Background::new(vec![2.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(Background::new(vec![-1.0, -1.0], vec![0.0, 0.0]).is_err());
    }
}
