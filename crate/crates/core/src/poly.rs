//! Real-coefficient polynomials with complex evaluation, root finding and
//! least-squares interpolation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Coefficients are stored in ascending order. Exact trailing zeros are
/// trimmed so that `degree` is the true degree; the zero polynomial has
/// no coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly::new(vec![0.0, 1.0])
    }

    /// `lead * prod (x - r)` over real roots.
    pub fn from_real_roots(roots: &[f64], lead: f64) -> Self {
        let mut p = Poly::constant(lead);
        for &r in roots {
            p = &p * &Poly::new(vec![-r, 1.0]);
        }
        p
    }

    /// `lead * prod (x - r)^mult`; non-real roots must come with their
    /// conjugates, in which case the product is real up to rounding and the
    /// imaginary parts are dropped.
    pub fn from_roots(roots: &RootSet, lead: f64) -> Self {
        let mut c = vec![C64::new(lead, 0.0)];
        for root in &roots.roots {
            for _ in 0..root.multiplicity {
                let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
                for (k, &ck) in c.iter().enumerate() {
                    next[k + 1] += ck;
                    next[k] -= ck * root.value;
                }
                c = next;
            }
        }
        Poly::new(c.iter().map(|z| z.re).collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_c(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative at `z` by a single Horner pass.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Sum of `|c_k| |z|^k`, the natural scale for residuals at `z`.
    pub fn abs_scale(&self, z: C64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c.abs())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Drop every coefficient above `degree`.
    pub fn truncate(&self, degree: usize) -> Poly {
        Poly::new(self.coeffs.iter().take(degree + 1).copied().collect())
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Largest absolute coefficient.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Roots with the default clustering tolerance.
    pub fn roots(&self) -> Result<RootSet> {
        self.roots_with(RootOptions::default())
    }

    pub fn roots_with(&self, opts: RootOptions) -> Result<RootSet> {
        let n = match self.degree() {
            None => return Err(Error::Numerical("roots of the zero polynomial".into())),
            Some(0) => {
                return Ok(RootSet {
                    roots: Vec::new(),
                    residual: 0.0,
                })
            }
            Some(n) => n,
        };
        let lead = self.leading();
        let monic: Vec<C64> = self
            .coeffs
            .iter()
            .map(|&c| C64::new(c / lead, 0.0))
            .collect();
        let raw = aberth(&monic, n);
        let polished: Vec<C64> = raw.into_iter().map(|z| self.newton_polish(z)).collect();
        let mut roots = cluster(&polished, opts.cluster_tol);
        symmetrize(&mut roots, opts.cluster_tol);
        roots.sort_by(|a, b| {
            a.value
                .re
                .partial_cmp(&b.value.re)
                .unwrap()
                .then(a.value.im.partial_cmp(&b.value.im).unwrap())
        });

        let mut residual: f64 = 0.0;
        for r in &roots {
            let s = self.abs_scale(r.value).max(f64::MIN_POSITIVE);
            residual = residual.max(self.eval_c(r.value).norm() / s);
        }
        if residual > opts.residual_gate {
            return Err(Error::RootResidual {
                residual,
                gate: opts.residual_gate,
            });
        }
        Ok(RootSet { roots, residual })
    }

    fn newton_polish(&self, mut z: C64) -> C64 {
        let mut best = self.eval_c(z).norm();
        for _ in 0..8 {
            let (p, dp) = self.eval_with_derivative(z);
            if dp.norm() == 0.0 {
                break;
            }
            let next = z - p / dp;
            let val = self.eval_c(next).norm();
            if val < best {
                best = val;
                z = next;
            } else {
                break;
            }
        }
        z
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    /// Roots closer than `cluster_tol * max(1, |root|)` are merged.
    pub cluster_tol: f64,
    /// Gate on the relative residual `|p(r)| / sum |c_k| |r|^k`.
    pub residual_gate: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            cluster_tol: 1e-7,
            residual_gate: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: C64,
    pub multiplicity: usize,
}

impl Root {
    pub fn is_real(&self) -> bool {
        self.value.im == 0.0
    }
}

/// Roots sorted by real then imaginary part, real roots carry an exact zero
/// imaginary part and complex roots come in exact conjugate pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Root>,
    /// Largest relative residual over the roots.
    pub residual: f64,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn real(&self) -> impl Iterator<Item = &Root> {
        self.roots.iter().filter(|r| r.is_real())
    }

    pub fn from_values(values: &[C64]) -> RootSet {
        RootSet {
            roots: values
                .iter()
                .map(|&value| Root {
                    value,
                    multiplicity: 1,
                })
                .collect(),
            residual: 0.0,
        }
    }
}

fn aberth(monic: &[C64], n: usize) -> Vec<C64> {
    // Fujiwara bound for the initial circle.
    let mut radius: f64 = 0.0;
    for k in 1..=n {
        let c = monic[n - k].norm();
        let b = if k == n { (c / 2.0).powf(1.0 / k as f64) } else { c.powf(1.0 / k as f64) };
        radius = radius.max(2.0 * b);
    }
    if radius == 0.0 {
        return vec![C64::new(0.0, 0.0); n];
    }
    let shift = -monic[n - 1] / n as f64;
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            shift + C64::from_polar(0.5 * radius, t)
        })
        .collect();

    let eval = |x: C64| -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };

    let mut done = vec![false; n];
    for _ in 0..2000 {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let mut sum = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        sum += d.inv();
                    }
                }
            }
            let w = ratio / (C64::new(1.0, 0.0) - ratio * sum);
            if !w.is_finite() {
                continue;
            }
            z[i] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(1e-300) {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    z
}

fn cluster(zs: &[C64], tol: f64) -> Vec<Root> {
    let n = zs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = zs[i].norm().max(zs[j].norm()).max(1.0);
            if (zs[i] - zs[j]).norm() < tol * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, Vec<C64>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(zs[i]),
            None => groups.push((r, vec![zs[i]])),
        }
    }
    groups
        .into_iter()
        .map(|(_, members)| {
            let m = members.len();
            let value = members.iter().sum::<C64>() / m as f64;
            Root {
                value,
                multiplicity: m,
            }
        })
        .collect()
}

fn symmetrize(roots: &mut Vec<Root>, tol: f64) {
    for r in roots.iter_mut() {
        if r.value.im.abs() < tol * r.value.norm().max(1.0) {
            r.value.im = 0.0;
        }
    }
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] || roots[i].value.im <= 0.0 {
            continue;
        }
        let target = roots[i].value.conj();
        let mut best: Option<(usize, f64)> = None;
        for j in 0..roots.len() {
            if used[j] || roots[j].value.im >= 0.0 || roots[j].multiplicity != roots[i].multiplicity {
                continue;
            }
            let d = (roots[j].value - target).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        if let Some((j, _)) = best {
            let v = (roots[i].value + roots[j].value.conj()) / 2.0;
            roots[i].value = v;
            roots[j].value = v.conj();
            used[i] = true;
            used[j] = true;
        }
    }
}

/// Least-squares fit of a real polynomial of the given degree to complex
/// samples. Real and imaginary parts enter as separate equations. Returns
/// the polynomial and the largest relative residual
/// `|p(x_k) - y_k| / max(1, |y_k|)`.
pub fn interpolate(points: &[C64], values: &[C64], degree: usize) -> Result<(Poly, f64)> {
    if points.len() != values.len() {
        return Err(Error::Numerical("interpolation: length mismatch".into()));
    }
    let cols = degree + 1;
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let scale = points.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
    for (&x, &y) in points.iter().zip(values) {
        let xs = x / scale;
        let mut pw = C64::new(1.0, 0.0);
        let mut re = Vec::with_capacity(cols);
        let mut im = Vec::with_capacity(cols);
        for _ in 0..cols {
            re.push(pw.re);
            im.push(pw.im);
            pw *= xs;
        }
        rows.push((re, y.re));
        if x.im != 0.0 || y.im != 0.0 {
            rows.push((im, y.im));
        }
    }
    if rows.len() < cols {
        return Err(Error::Numerical(format!(
            "interpolation underdetermined: {} equations for degree {}",
            rows.len(),
            degree
        )));
    }
    let a = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i].0[j]);
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-13 * smax {
        return Err(Error::Numerical("interpolation system rank deficient".into()));
    }
    let sol = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::Numerical(format!("interpolation solve: {e}")))?;
    let coeffs: Vec<f64> = sol
        .iter()
        .enumerate()
        .map(|(k, c)| c / scale.powi(k as i32))
        .collect();
    let p = Poly::new(coeffs);
    let mut residual: f64 = 0.0;
    for (&x, &y) in points.iter().zip(values) {
        residual = residual.max((p.eval_c(x) - y).norm() / y.norm().max(1.0));
    }
    Ok((p, residual))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", c.abs())?,
                1 => write!(f, "{}x", c.abs())?,
                _ => write!(f, "{}x^{}", c.abs(), k)?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_and_derivative() {
        let p = Poly::new(vec![1.0, -2.0, 3.0]);
        assert_eq!(p.eval(2.0), 9.0);
        assert_eq!(p.derivative(), Poly::new(vec![-2.0, 6.0]));
        let (v, d) = p.eval_with_derivative(C64::new(2.0, 0.0));
        assert_eq!(v.re, 9.0);
        assert_eq!(d.re, 10.0);
    }

    #[test]
    fn trims_exact_zeros_only() {
        let p = Poly::new(vec![1.0, 1e-30, 0.0, 0.0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(Poly::new(vec![0.0]).degree(), None);
    }

    #[test]
    fn roots_of_cubic() {
        let p = Poly::from_real_roots(&[-1.0, 0.5, 3.0], 2.0);
        let rs = p.roots().unwrap();
        let got: Vec<f64> = rs.roots.iter().map(|r| r.value.re).collect();
        for (g, w) in got.iter().zip([-1.0, 0.5, 3.0]) {
            assert!((g - w).abs() < 1e-13);
        }
        assert!(rs.roots.iter().all(|r| r.value.im == 0.0));
    }

    #[test]
    fn double_root_is_clustered() {
        let p = Poly::from_real_roots(&[1.5, 1.5, -2.0], 1.0);
        let rs = p.roots().unwrap();
        assert_eq!(rs.roots.len(), 2);
        let double = rs.roots.iter().find(|r| r.multiplicity == 2).unwrap();
        assert!((double.value.re - 1.5).abs() < 1e-8);
        assert_eq!(double.value.im, 0.0);
    }

    #[test]
    fn complex_pair_is_conjugate() {
        // (x^2 + 1)(x - 2)
        let p = Poly::new(vec![-2.0, 1.0, -2.0, 1.0]);
        let rs = p.roots().unwrap();
        assert_eq!(rs.roots.len(), 3);
        let c: Vec<_> = rs.roots.iter().filter(|r| r.value.im != 0.0).collect();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].value, c[1].value.conj());
        assert!((c[0].value.im.abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn from_roots_round_trip() {
        let p = Poly::new(vec![3.0, -1.0, 0.5, 2.0, -0.25]);
        let rs = p.roots().unwrap();
        let q = Poly::from_roots(&rs, p.leading());
        for k in 0..=4 {
            assert!((p.coeff(k) - q.coeff(k)).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = Poly::new(vec![0.5, -1.0, 2.0]);
        let xs = [
            C64::new(1.0, 0.0),
            C64::new(-2.0, 0.0),
            C64::new(0.3, 1.2),
        ];
        let ys: Vec<C64> = xs.iter().map(|&x| p.eval_c(x)).collect();
        let (q, res) = interpolate(&xs, &ys, 2).unwrap();
        assert!(res < 1e-13);
        for k in 0..3 {
            assert!((p.coeff(k) - q.coeff(k)).abs() < 1e-12);
        }
    }
}
