//! Finitely perturbed operator, Jost solutions and state polynomials.

use num_complex::Complex64 as C64;

use crate::background::{Background, SheetPoint};
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Perturbation `a_n = a^0_n + u_n`, `b_n = b^0_n + v_n` for `1 <= n <= p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl Perturbation {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        Perturbation { u, v }
    }

    pub fn p(&self) -> usize {
        self.u.len()
    }

    /// `2p` if `u_p != 0`, `2p - 1` if only `v_p != 0`.
    pub fn nu(&self) -> Result<usize> {
        let p = self.p();
        if p == 0 || self.v.len() != p {
            return Err(Error::InvalidPerturbation(format!(
                "u has {} entries, v has {}, need equal and >= 1",
                p,
                self.v.len()
            )));
        }
        if self.u.iter().chain(&self.v).any(|x| !x.is_finite()) {
            return Err(Error::InvalidPerturbation("non-finite entry".into()));
        }
        if self.u[p - 1] != 0.0 {
            Ok(2 * p)
        } else if self.v[p - 1] != 0.0 {
            Ok(2 * p - 1)
        } else {
            Err(Error::InvalidPerturbation("u_p = v_p = 0".into()))
        }
    }
}

/// The perturbed operator `J`.
#[derive(Clone, Debug)]
pub struct Operator {
    bg: Background,
    pert: Perturbation,
    nu: usize,
}

impl Operator {
    pub fn new(bg: &Background, pert: &Perturbation) -> Result<Self> {
        let nu = pert.nu()?;
        for n in 1..=pert.p() {
            let a = bg.a0(n as i64) + pert.u[n - 1];
            if a <= 0.0 {
                return Err(Error::InvalidPerturbation(format!("a_{n} = {a} is not positive")));
            }
        }
        Ok(Operator {
            bg: bg.clone(),
            pert: pert.clone(),
            nu,
        })
    }

    pub fn background(&self) -> &Background {
        &self.bg
    }

    pub fn perturbation(&self) -> &Perturbation {
        &self.pert
    }

    pub fn p(&self) -> usize {
        self.pert.p()
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    /// `a_n` for `n >= 0`; `a_0 = a^0_q` is never perturbed.
    pub fn a(&self, n: usize) -> f64 {
        let base = self.bg.a0(n as i64);
        if n >= 1 && n <= self.p() {
            base + self.pert.u[n - 1]
        } else {
            base
        }
    }

    pub fn b(&self, n: usize) -> f64 {
        let base = self.bg.b0(n as i64);
        if n >= 1 && n <= self.p() {
            base + self.pert.v[n - 1]
        } else {
            base
        }
    }
}

/// A pair `(theta, phi)` defining `f = theta + m_+ phi` on the Riemann
/// surface: either `(theta_0^+, phi_0^+)` of an operator or a candidate.
#[derive(Clone, Debug, PartialEq)]
pub struct JostPair {
    pub theta: Poly,
    pub phi: Poly,
}

impl JostPair {
    pub fn f(&self, bg: &Background, pt: SheetPoint) -> C64 {
        let w = bg.weyl(pt);
        self.theta.eval_c(pt.lam) + w.m_plus * self.phi.eval_c(pt.lam)
    }

    /// `f` on the other sheet, `theta + m_- phi`.
    pub fn f_minus(&self, bg: &Background, pt: SheetPoint) -> C64 {
        let w = bg.weyl(pt);
        self.theta.eval_c(pt.lam) + w.m_minus * self.phi.eval_c(pt.lam)
    }

    /// `phi_q theta^2 + 2 phi theta phi_0 - theta_{q+1} phi_0^2`, which equals
    /// `phi_q f f_-`.
    pub fn state_poly(&self, bg: &Background) -> Poly {
        state_poly(bg, &self.theta, &self.phi)
    }
}

/// For a Jost function the three terms cancel above degree
/// `deg phi + q`, which is where the result is cut.
pub(crate) fn state_poly(bg: &Background, th: &Poly, ph: &Poly) -> Poly {
    let full = state_poly_full(bg, th, ph);
    match ph.degree() {
        Some(d) => full.truncate(d + bg.q()),
        None => full,
    }
}

fn state_poly_full(bg: &Background, th: &Poly, ph: &Poly) -> Poly {
    let t1 = bg.phi_q() * &(th * th);
    let t2 = (bg.half_diff() * &(th * ph)).scale(2.0);
    let t3 = bg.theta_q1() * &(ph * ph);
    &(&t1 + &t2) - &t3
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Degree of the state polynomial, `nu + q - 1`.
    pub kappa: usize,
    pub nu: usize,
    /// `A_p = prod_{j=0}^p a^0_j`.
    pub a_prod: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticResidual {
    /// `|F(lambda) / (-a^0_0 c_3 lambda^kappa) - 1|`.
    pub state_poly: f64,
    /// Deviation of `f_0` on sheet 2 from its leading term.
    pub sheet_two: f64,
    /// Deviation of `f_0^+` on sheet 1 from `c_1 A_p`.
    pub sheet_one: f64,
}

#[derive(Clone, Debug)]
pub struct JostData {
    op: Operator,
    theta_plus: Vec<Poly>,
    phi_plus: Vec<Poly>,
    state_polys: Vec<Poly>,
    constants: Constants,
}

impl JostData {
    pub fn new(bg: &Background, pert: &Perturbation) -> Result<Self> {
        let op = Operator::new(bg, pert)?;
        let p = op.p();
        let (th, ph) = bg.fundamental_polys(p + 2);
        // Recurse on the difference from the unperturbed solutions, which
        // avoids cancelling their leading terms.
        let mut dth = vec![Poly::zero(); p + 3];
        let mut dph = vec![Poly::zero(); p + 3];
        let u = |n: usize| if (1..=p).contains(&n) { pert.u[n - 1] } else { 0.0 };
        let v = |n: usize| if (1..=p).contains(&n) { pert.v[n - 1] } else { 0.0 };
        for n in (1..=p + 1).rev() {
            let lin = Poly::new(vec![-op.b(n), 1.0]);
            let inv = 1.0 / op.a(n - 1);
            let step = |d: &[Poly], base: &[Poly]| -> Poly {
                let src = &(&base[n].scale(-v(n)) - &base[n + 1].scale(u(n)))
                    - &base[n - 1].scale(u(n - 1));
                (&(&(&lin * &d[n]) - &d[n + 1].scale(op.a(n))) + &src).scale(inv)
            };
            dth[n - 1] = step(&dth, &th);
            dph[n - 1] = step(&dph, &ph);
        }
        let nu = op.nu();
        let mut theta_plus: Vec<Poly> = (0..p + 3).map(|n| &th[n] + &dth[n]).collect();
        let mut phi_plus: Vec<Poly> = (0..p + 3).map(|n| &ph[n] + &dph[n]).collect();
        theta_plus[0] = theta_plus[0].truncate(nu.saturating_sub(2));
        phi_plus[0] = phi_plus[0].truncate(nu - 1);
        let state_polys = (0..=p)
            .map(|n| {
                if n == 0 {
                    state_poly(bg, &theta_plus[n], &phi_plus[n])
                } else {
                    state_poly_full(bg, &theta_plus[n], &phi_plus[n])
                }
            })
            .collect();

        let c1 = 1.0 / (0..=p).map(|j| op.a(j)).product::<f64>();
        let ap0 = bg.a0(p as i64);
        let ap = op.a(p);
        let c2 = if nu == 2 * p {
            c1 * pert.u[p - 1] * (ap0 + ap)
        } else {
            c1 * ap0 * ap0 * pert.v[p - 1]
        };
        let constants = Constants {
            c1,
            c2,
            c3: c1 * c2,
            kappa: nu + bg.q() - 1,
            nu,
            a_prod: (0..=p).map(|j| bg.a0(j as i64)).product(),
        };
        Ok(JostData {
            op,
            theta_plus,
            phi_plus,
            state_polys,
            constants,
        })
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn background(&self) -> &Background {
        self.op.background()
    }

    pub fn p(&self) -> usize {
        self.op.p()
    }

    /// `theta_n^+` for `n <= p + 2`.
    pub fn theta_plus(&self, n: usize) -> &Poly {
        &self.theta_plus[n]
    }

    /// `phi_n^+` for `n <= p + 2`.
    pub fn phi_plus(&self, n: usize) -> &Poly {
        &self.phi_plus[n]
    }

    pub fn pair(&self) -> JostPair {
        JostPair {
            theta: self.theta_plus[0].clone(),
            phi: self.phi_plus[0].clone(),
        }
    }

    /// The state polynomial `F = F_0`.
    pub fn state_poly(&self) -> &Poly {
        &self.state_polys[0]
    }

    /// `F_n` for `n <= p`.
    pub fn state_poly_n(&self, n: usize) -> &Poly {
        &self.state_polys[n]
    }

    pub fn constants(&self) -> Constants {
        self.constants
    }

    /// `(c_1(n), c_2(n), c_3(n))` with the products starting at site `n`;
    /// `n = 0` gives the plain constants. `F_n` has degree `kappa - 2n` and
    /// leading coefficient `-a^0_0 c_3(n)`.
    pub fn constants_at(&self, n: usize) -> (f64, f64, f64) {
        let p = self.p();
        let bg = self.background();
        let c1 = 1.0 / (n..=p).map(|j| self.op.a(j)).product::<f64>();
        let ap0 = bg.a0(p as i64);
        let ap = self.op.a(p);
        let pert = self.op.perturbation();
        let c2 = if self.constants.nu == 2 * p {
            c1 * pert.u[p - 1] * (ap0 + ap)
        } else {
            c1 * ap0 * ap0 * pert.v[p - 1]
        };
        (c1, c2, c1 * c2)
    }

    /// Jost solution `f_n^+` on the sheet of `pt`.
    pub fn f(&self, n: usize, pt: SheetPoint) -> C64 {
        let bg = self.background();
        let s = bg.branch(pt);
        let w = bg.weyl_with(pt.lam, s);
        self.f_with(n, pt.lam, w.m_plus, s)
    }

    fn f_with(&self, n: usize, lam: C64, m: C64, s: C64) -> C64 {
        let bg = self.background();
        let p = self.p();
        if n <= p + 1 {
            self.theta_plus[n].eval_c(lam) + m * self.phi_plus[n].eval_c(lam)
        } else {
            let (xi, _) = bg.multipliers_with(lam, s);
            bg.bloch_with(n, lam, m, xi)
        }
    }

    /// Regularized `(f_hat_n^+, f_hat_n^-)` at a real point of a gap on
    /// sheet 1, real-valued and finite at Dirichlet points off the edges.
    pub fn f_hat(&self, n: usize, x: f64) -> (f64, f64) {
        let bg = self.background();
        let [dp, dm, mp, mm] = bg.weyl_hat(x);
        let p = self.p();
        if n <= p + 1 {
            let t = self.theta_plus[n].eval(x);
            let f = self.phi_plus[n].eval(x);
            (dp * t + mp * f, dm * t + mm * f)
        } else {
            let lam = C64::new(x, 0.0);
            let (xp, xm) = bg.multipliers_with(lam, bg.sqrt_disc(lam));
            let q = bg.q();
            let (k, r) = (n / q, n % q);
            let t = bg.theta(r).eval(x);
            let f = bg.phi(r).eval(x);
            (
                (dp * t + mp * f) * xp.re.powi(k as i32),
                (dm * t + mm * f) * xm.re.powi(k as i32),
            )
        }
    }

    /// Relative deviations from the large-`lambda` laws at real `lambda`.
    pub fn asymptotic_residual(&self, lam: f64) -> AsymptoticResidual {
        let bg = self.background();
        let c = self.constants;
        let f = self.state_poly();
        let lead = -bg.a0(0) * c.c3 * lam.powi(c.kappa as i32);
        let state = (f.eval(lam) / lead - 1.0).abs();

        let p = self.p();
        let a_p0 = bg.a0(p as i64);
        let a_p = self.op.a(p);
        let predicted = if c.nu == 2 * p {
            c.c1 / c.a_prod * (a_p0 * a_p0 - a_p * a_p) * lam.powi(2 * p as i32)
        } else {
            -c.c1 * a_p0 * a_p0 * self.op.perturbation().v[p - 1] * lam.powi(2 * p as i32 - 1)
                / c.a_prod
        };
        let pt = SheetPoint::real(lam, crate::background::Sheet::Two);
        let f2 = self.pair().f(bg, pt);
        let sheet_two = (f2 / predicted - 1.0).norm();
        let f1 = self.pair().f(bg, SheetPoint::real(lam, crate::background::Sheet::One));
        let sheet_one = (f1 / (c.c1 * c.a_prod) - 1.0).norm();
        AsymptoticResidual {
            state_poly: state,
            sheet_two,
            sheet_one,
        }
    }
}
