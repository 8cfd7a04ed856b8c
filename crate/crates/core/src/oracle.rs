//! Brute-force cross-checks: finite-section spectra, least-squares
//! transformation kernels and the polynomial identity suite.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::background::{Background, Location, Sheet, SheetPoint};
use crate::error::{Error, Result};
use crate::jost::{JostData, Perturbation};
use crate::states;

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` by implicit-shift QL iteration, sorted ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(Error::Numerical(format!(
            "off-diagonal has {} entries for {} rows",
            off.len(),
            n
        )));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Numerical(format!("QL iteration stalled at row {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Spectrum of the `n x n` truncation on sites `1..=n`.
pub fn finite_section_spectrum(bg: &Background, pert: &Perturbation, n: usize) -> Result<Vec<f64>> {
    let coef = |base: f64, extra: &[f64], k: usize| {
        base + if k >= 1 && k <= extra.len() { extra[k - 1] } else { 0.0 }
    };
    let diag: Vec<f64> = (1..=n).map(|k| coef(bg.b0(k as i64), &pert.v, k)).collect();
    let off: Vec<f64> = (1..n).map(|k| coef(bg.a0(k as i64), &pert.u, k)).collect();
    tridiagonal_eigenvalues(&diag, &off)
}

/// Size of the comparison section: about `2n`, with a different residue
/// modulo `q`, so the spurious far-end states move.
pub fn comparison_size(q: usize, n: usize) -> usize {
    (2 * n..).find(|m| m % q != n % q).unwrap_or(2 * n + 1)
}

/// Eigenvalues in open gaps (including the two infinite ones) that survive
/// the change from `n` sites to `comparison_size(q, n)` within `stability`.
pub fn bound_state_estimates(
    bg: &Background,
    pert: &Perturbation,
    n: usize,
    stability: f64,
) -> Result<Vec<f64>> {
    let first = finite_section_spectrum(bg, pert, n)?;
    let second = finite_section_spectrum(bg, pert, comparison_size(bg.q(), n))?;
    let in_gap = |x: f64| matches!(bg.locate(x), Location::Gap(_));
    let out = first
        .into_iter()
        .filter(|&x| in_gap(x))
        .filter(|&x| second.iter().any(|&y| (x - y).abs() < stability))
        .collect();
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct KernelFit {
    /// `k[n][m]`, `n <= p + 1`, `m <= nu + 1`, zero below the diagonal.
    pub k: Vec<Vec<f64>>,
    /// Largest relative residual of the fitted expansions.
    pub residual: f64,
}

/// Sample points on the band interiors, both rims, away from the edges.
fn band_samples(bg: &Background, per_band: usize) -> Vec<C64> {
    let mut pts = Vec::new();
    for &(lo, hi) in &bg.bands().bands {
        let w = hi - lo;
        for i in 0..per_band {
            let x = lo + w * (1e-3 + (1.0 - 2e-3) * (i as f64 + 0.5) / per_band as f64);
            let too_close = bg.bands().gaps.iter().any(|g| (g.mu - x).abs() < 1e-3 * w);
            if too_close {
                continue;
            }
            pts.push(C64::new(x, 0.0));
            pts.push(C64::new(x, -0.0));
        }
    }
    pts
}

/// Least-squares fit of `f_n^+ = sum_m K(n, m) psi_m^+` on band samples.
pub fn kernel_least_squares(jost: &JostData) -> Result<KernelFit> {
    let bg = jost.background();
    let p = jost.p();
    let nu = jost.constants().nu;
    let cols = nu + 2;
    let per_band = (3 * (nu + 2)).max(16);
    let pts = band_samples(bg, per_band);
    let mut k = vec![vec![0.0; cols]; p + 2];
    let mut residual: f64 = 0.0;
    for n in 0..=p + 1 {
        let idx: Vec<usize> = (n..cols).collect();
        let rows = 2 * pts.len();
        let mut a = DMatrix::zeros(rows, idx.len());
        let mut rhs = DVector::zeros(rows);
        for (i, &z) in pts.iter().enumerate() {
            let pt = SheetPoint::new(z, Sheet::One);
            let f = jost.f(n, pt);
            let scale = f.norm().max(1e-300);
            for (j, &m) in idx.iter().enumerate() {
                let psi = bg.bloch(m, pt) / scale;
                a[(2 * i, j)] = psi.re;
                a[(2 * i + 1, j)] = psi.im;
            }
            rhs[2 * i] = f.re / scale;
            rhs[2 * i + 1] = f.im / scale;
        }
        let svd = a.clone().svd(true, true);
        let sol = svd
            .solve(&rhs, 1e-13)
            .map_err(|e| Error::Numerical(e.to_string()))?;
        let res = (&a * &sol - &rhs).amax();
        residual = residual.max(res);
        for (j, &m) in idx.iter().enumerate() {
            k[n][m] = sol[j];
        }
    }
    if residual > 1e-7 {
        return Err(Error::Numerical(format!(
            "expansion failure: residual {residual:.2e}"
        )));
    }
    Ok(KernelFit { k, residual })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub residual: f64,
    pub gate: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.residual <= self.gate
    }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

fn random_point<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-4.0..4.0), rng.gen_range(0.05..2.0) * if rng.gen() { 1.0 } else { -1.0 })
}

/// Residuals of the polynomial and Weyl-function identities at `samples`
/// random points.
pub fn identity_suite<R: Rng>(jost: &JostData, rng: &mut R, samples: usize) -> Vec<IdentityCheck> {
    let bg = jost.background();
    let q = bg.q();
    let p = jost.p();
    let mut out = Vec::new();

    // 1 - Delta^2 + phi^2 = 1 - phi_{q+1} theta_q = -phi_q theta_{q+1}
    {
        let one = crate::poly::Poly::constant(1.0);
        let d = bg.delta();
        let h = bg.half_diff();
        let lhs = &(&one - &(d * d)) + &(h * h);
        let mid = &one - &(bg.phi(q + 1) * bg.theta(q));
        let rhs = (bg.phi_q() * bg.theta_q1()).scale(-1.0);
        let scale = lhs.norm_inf().max(1.0);
        let r = ((&lhs - &rhs).norm_inf()).max((&mid - &rhs).norm_inf()) / scale;
        out.push(IdentityCheck {
            name: "discriminant",
            residual: r,
            gate: 1e-9,
        });
    }

    let pts: Vec<C64> = (0..samples).map(|_| random_point(rng)).collect();

    let mut r_prod: f64 = 0.0;
    let mut r_mult: f64 = 0.0;
    let mut r_state: f64 = 0.0;
    let mut r_wronski: f64 = 0.0;
    for &z in &pts {
        let pt = SheetPoint::new(z, Sheet::One);
        let w = bg.weyl(pt);
        let pq = bg.phi_q().eval_c(z);
        r_prod = r_prod.max(rel(w.m_plus * w.m_minus, -bg.theta_q1().eval_c(z) / pq));
        let (xp, xm) = bg.multipliers(pt);
        r_mult = r_mult.max((xp * xm - 1.0).norm());

        for n in 0..=p {
            let th = jost.theta_plus(n).eval_c(z);
            let ph = jost.phi_plus(n).eval_c(z);
            let direct = pq * (th + w.m_plus * ph) * (th + w.m_minus * ph);
            r_state = r_state.max(rel(jost.state_poly_n(n).eval_c(z), direct));
        }

        let expect = bg.a0(0) * (w.m_minus - w.m_plus);
        let f_minus = |n: usize| -> C64 {
            if n <= p + 1 {
                jost.theta_plus(n).eval_c(z) + w.m_minus * jost.phi_plus(n).eval_c(z)
            } else {
                bg.bloch(n, SheetPoint::new(z, Sheet::Two))
            }
        };
        for n in 0..=p + 1 {
            let a = jost.operator().a(n);
            let (x, y) = (jost.f(n, pt) * f_minus(n + 1), jost.f(n + 1, pt) * f_minus(n));
            let scale = (a * (x.norm() + y.norm())).max(expect.norm());
            r_wronski = r_wronski.max((a * (x - y) - expect).norm() / scale);
        }
    }
    out.push(IdentityCheck {
        name: "weyl_product",
        residual: r_prod,
        gate: 1e-9,
    });
    out.push(IdentityCheck {
        name: "state_polynomial",
        residual: r_state,
        gate: 1e-9,
    });
    out.push(IdentityCheck {
        name: "wronskian",
        residual: r_wronski,
        gate: 1e-9,
    });
    out.push(IdentityCheck {
        name: "multiplier_product",
        residual: r_mult,
        gate: 1e-9,
    });

    // Wronskian residuals are relative to the size of the two products.
    // Regularized Wronskian at real gap points, n = 0 against n = p + 1.
    let mut r_hat: f64 = 0.0;
    // sqrt(Delta^2 - 1) on the upper rim of each gap.
    let mut r_gap: f64 = 0.0;
    let bands = bg.bands();
    let mut gap_ranges: Vec<(usize, f64, f64)> = vec![(0, bands.edges[0] - 3.0, bands.edges[0])];
    for g in bands.gaps.iter().filter(|g| g.open) {
        gap_ranges.push((g.index, g.lower, g.upper));
    }
    gap_ranges.push((q, bands.edges[2 * q - 1], bands.edges[2 * q - 1] + 3.0));
    for &(j, lo, hi) in &gap_ranges {
        for _ in 0..samples.div_ceil(gap_ranges.len()).max(2) {
            let x = lo + (hi - lo) * rng.gen_range(0.02..0.98);
            let wr = |n: usize| {
                let (fp, fm) = jost.f_hat(n, x);
                let (fp1, fm1) = jost.f_hat(n + 1, x);
                let a = jost.operator().a(n);
                (a * (fp * fm1 - fp1 * fm), a * ((fp * fm1).abs() + (fp1 * fm).abs()))
            };
            let ((w0, s0), (w1, s1)) = (wr(0), wr(p + 1));
            r_hat = r_hat.max((w0 - w1).abs() / s0.max(s1).max(1e-300));

            let lam = C64::new(x, 0.0);
            let s = bg.sqrt_disc(lam);
            let w = bg.weyl(SheetPoint::real(x, Sheet::One));
            let half = 0.5 * bg.phi_q().eval(x) * (w.m_plus - w.m_minus);
            let h = bg.quasimomentum(lam).im;
            let expected = -states::gap_sign(q, j) * (q as f64 * h).sinh();
            let mut r = rel(half, s).max(s.im.abs() / s.norm().max(1.0));
            r = r.max((s.re - expected).abs() / expected.abs().max(1.0));
            if s.re * expected <= 0.0 {
                r = r.max(1.0);
            }
            r_gap = r_gap.max(r);
        }
    }
    out.push(IdentityCheck {
        name: "regularized_wronskian",
        residual: r_hat,
        gate: 1e-9,
    });
    out.push(IdentityCheck {
        name: "gap_root",
        residual: r_gap,
        gate: 1e-9,
    });

    let mut r_s: f64 = 0.0;
    for &(lo, hi) in &bands.bands {
        for _ in 0..samples.max(4) {
            let x = lo + (hi - lo) * rng.gen_range(0.01..0.99);
            for lam in [C64::new(x, 0.0), C64::new(x, -0.0)] {
                let s = states::s_matrix(bg, &jost.pair(), SheetPoint::new(lam, Sheet::One));
                r_s = r_s.max((s.norm() - 1.0).abs());
            }
        }
    }
    out.push(IdentityCheck {
        name: "unitary_s",
        residual: r_s,
        gate: 1e-9,
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked() -> JostData {
        let bg = Background::new(vec![2.0, 0.5], vec![0.0, 0.0]).unwrap();
        JostData::new(&bg, &Perturbation::new(vec![1.0], vec![0.0])).unwrap()
    }

    #[test]
    fn free_section_matches_cosines() {
        let n = 100;
        let ev = tridiagonal_eigenvalues(&vec![0.0; n], &vec![1.0; n - 1]).unwrap();
        let mut exact: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n + 1) as f64).cos())
            .collect();
        exact.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn worked_finite_section() {
        let j = worked();
        let bg = j.background();
        let est = bound_state_estimates(bg, j.operator().perturbation(), 2000, 1e-8).unwrap();
        let r = (189.0f64 / 20.0).sqrt();
        assert_eq!(est.len(), 2, "{est:?}");
        assert!((est[0] + r).abs() < 1e-6 && (est[1] - r).abs() < 1e-6);
    }

    #[test]
    fn unperturbed_has_no_bound_state() {
        let bg = Background::new(vec![2.0, 0.5], vec![0.0, 0.0]).unwrap();
        let est = bound_state_estimates(&bg, &Perturbation::new(vec![0.0], vec![0.0]), 2000, 1e-8).unwrap();
        assert!(est.is_empty(), "{est:?}");
        let free = Background::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        let ev = finite_section_spectrum(&free, &Perturbation::new(vec![0.0], vec![0.0]), 400).unwrap();
        assert!(ev.iter().all(|x| x.abs() < 2.0));
    }

    #[test]
    fn worked_kernel_fit() {
        let j = worked();
        let fit = kernel_least_squares(&j).unwrap();
        for n in 0..fit.k.len() {
            for m in 0..fit.k[n].len() {
                if m != n && n + m >= 3 {
                    assert!(fit.k[n][m].abs() < 1e-8, "K({n},{m}) = {}", fit.k[n][m]);
                }
            }
        }
        assert!((fit.k[2][2] / fit.k[1][1] - 1.5).abs() < 1e-9, "{:?}", fit.k);
    }

    #[test]
    fn worked_identities() {
        let j = worked();
        let mut rng = crate::sample::rng(1);
        for c in identity_suite(&j, &mut rng, 16) {
            assert!(c.passed(), "{c:?}");
        }
    }
}
