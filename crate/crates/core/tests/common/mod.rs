//! Exact rational reference for the polynomial side of the direct problem.
#![allow(dead_code)]

use num::{BigRational, One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

pub fn qf(x: f64) -> Q {
    Q::from_float(x).expect("finite")
}

/// Polynomial with rational coefficients, ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct QPoly(pub Vec<Q>);

impl QPoly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        QPoly(c)
    }

    pub fn zero() -> Self {
        QPoly(Vec::new())
    }

    pub fn constant(c: Q) -> Self {
        QPoly::new(vec![c])
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.0.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.0.len().max(o.0.len());
        QPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn scale(&self, s: &Q) -> QPoly {
        QPoly::new(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.0.is_empty() || o.0.is_empty() {
            return QPoly::zero();
        }
        let mut out = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    /// `(lambda - b) * self`.
    pub fn shift_mul(&self, b: &Q) -> QPoly {
        QPoly::new(vec![-b.clone(), Q::one()]).mul(self)
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.0.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.to_f64().unwrap()).collect()
    }
}

pub struct ExactBackground {
    pub q: usize,
    pub a0: Vec<Q>,
    pub b0: Vec<Q>,
    pub theta: Vec<QPoly>,
    pub phi: Vec<QPoly>,
}

impl ExactBackground {
    pub fn new(a0: Vec<Q>, b0: Vec<Q>) -> Self {
        let q = a0.len();
        let mut bg = ExactBackground {
            q,
            a0,
            b0,
            theta: Vec::new(),
            phi: Vec::new(),
        };
        let (t, p) = bg.fundamental(q + 4);
        bg.theta = t;
        bg.phi = p;
        bg
    }

    /// `a^0_n`, with `a^0_0 = a^0_q`.
    pub fn a(&self, n: usize) -> Q {
        self.a0[(n + self.q - 1) % self.q].clone()
    }

    pub fn b(&self, n: usize) -> Q {
        self.b0[(n + self.q - 1) % self.q].clone()
    }

    fn fundamental(&self, n_max: usize) -> (Vec<QPoly>, Vec<QPoly>) {
        let mut th = vec![QPoly::constant(Q::one()), QPoly::zero()];
        let mut ph = vec![QPoly::zero(), QPoly::constant(Q::one())];
        for n in 1..n_max {
            let inv = Q::one() / self.a(n);
            let next = |y: &[QPoly]| {
                y[n].shift_mul(&self.b(n)).sub(&y[n - 1].scale(&self.a(n - 1))).scale(&inv)
            };
            let t = next(&th);
            let p = next(&ph);
            th.push(t);
            ph.push(p);
        }
        (th, ph)
    }

    /// `a^0_1 ... a^0_q`, which the floating pipeline fixes to 1.
    pub fn period_product(&self) -> Q {
        self.a0.iter().fold(Q::one(), |acc, x| acc * x)
    }

    pub fn delta(&self) -> QPoly {
        self.phi[self.q + 1].add(&self.theta[self.q]).scale(&q(1, 2))
    }

    pub fn half_diff(&self) -> QPoly {
        self.phi[self.q + 1].sub(&self.theta[self.q]).scale(&q(1, 2))
    }
}

pub struct ExactJost {
    pub theta0: QPoly,
    pub phi0: QPoly,
    pub theta: Vec<QPoly>,
    pub phi: Vec<QPoly>,
    pub f: QPoly,
    pub c1: Q,
    pub c2: Q,
    pub c3: Q,
    pub nu: usize,
    pub kappa: usize,
}

pub fn exact_jost(bg: &ExactBackground, u: &[Q], v: &[Q]) -> ExactJost {
    let p = u.len();
    let a = |n: usize| {
        let base = bg.a(n);
        if (1..=p).contains(&n) {
            base + &u[n - 1]
        } else {
            base
        }
    };
    let b = |n: usize| {
        let base = bg.b(n);
        if (1..=p).contains(&n) {
            base + &v[n - 1]
        } else {
            base
        }
    };
    let mut th = bg.theta[..p + 3].to_vec();
    let mut ph = bg.phi[..p + 3].to_vec();
    for n in (1..=p + 1).rev() {
        let inv = Q::one() / a(n - 1);
        th[n - 1] = th[n].shift_mul(&b(n)).sub(&th[n + 1].scale(&a(n))).scale(&inv);
        ph[n - 1] = ph[n].shift_mul(&b(n)).sub(&ph[n + 1].scale(&a(n))).scale(&inv);
    }
    let qq = bg.q;
    let f = bg.phi[qq]
        .mul(&th[0].mul(&th[0]))
        .add(&bg.half_diff().mul(&th[0].mul(&ph[0])).scale(&q(2, 1)))
        .sub(&bg.theta[qq + 1].mul(&ph[0].mul(&ph[0])));
    let nu = if !u[p - 1].is_zero() { 2 * p } else { 2 * p - 1 };
    let mut c1 = Q::one();
    for j in 0..=p {
        c1 /= a(j);
    }
    let ap0 = bg.a(p);
    let c2 = if nu == 2 * p {
        &c1 * &u[p - 1] * (&ap0 + a(p))
    } else {
        &c1 * &ap0 * &ap0 * &v[p - 1]
    };
    let c3 = &c1 * &c2;
    ExactJost {
        theta0: th[0].clone(),
        phi0: ph[0].clone(),
        theta: th,
        phi: ph,
        f,
        c1,
        c2,
        c3,
        nu,
        kappa: nu + qq - 1,
    }
}

/// The canonical worked instance: `q = 2`, `a0 = (2, 1/2)`, `b0 = 0`,
/// `u = (1)`, `v = (0)`.
pub fn worked_exact() -> (ExactBackground, ExactJost) {
    let bg = ExactBackground::new(vec![q(2, 1), q(1, 2)], vec![q(0, 1), q(0, 1)]);
    let j = exact_jost(&bg, &[q(1, 1)], &[q(0, 1)]);
    (bg, j)
}

pub fn worked() -> reslab::JostData {
    let bg = reslab::Background::new(vec![2.0, 0.5], vec![0.0, 0.0]).unwrap();
    reslab::JostData::new(&bg, &reslab::Perturbation::new(vec![1.0], vec![0.0])).unwrap()
}

/// Largest coefficient gap between an exact and a floating polynomial.
pub fn coeff_gap(exact: &QPoly, float: &reslab::Poly) -> f64 {
    let n = exact.0.len().max(float.coeffs().len());
    (0..n)
        .map(|k| (exact.coeff(k).to_f64().unwrap() - float.coeff(k)).abs())
        .fold(0.0, f64::max)
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}
