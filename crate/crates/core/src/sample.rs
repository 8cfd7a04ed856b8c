//! Seeded random instances for property tests, benches and the check suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::background::Background;
use crate::jost::{JostData, Perturbation};

/// Default seed when `RESLAB_SEED` is unset or unparsable.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Seed from the `RESLAB_SEED` environment variable.
pub fn env_seed() -> u64 {
    std::env::var("RESLAB_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub background: Background,
    pub perturbation: Perturbation,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceSpec {
    pub q: usize,
    pub p: usize,
    /// `true` for `nu = 2p` (`u_p != 0`), `false` for `nu = 2p - 1`.
    pub even: bool,
    /// Smallest admissible gap width.
    pub min_gap: f64,
}

/// Random periodic background with all gaps at least `min_gap` wide.
pub fn random_background<R: Rng>(rng: &mut R, q: usize, min_gap: f64) -> Background {
    loop {
        let mut a: Vec<f64> = (0..q).map(|_| rng.gen_range(0.5..2.0)).collect();
        let g = a.iter().map(|x: &f64| x.ln()).sum::<f64>() / q as f64;
        for x in &mut a {
            *x /= g.exp();
        }
        let b: Vec<f64> = (0..q).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let Ok(bg) = Background::new(a, b) else {
            continue;
        };
        let bands = bg.bands();
        let ok = bands
            .gaps
            .iter()
            .all(|g| g.open && g.upper - g.lower >= min_gap);
        if ok {
            return bg;
        }
    }
}

/// Random perturbation of the given support and parity, keeping every
/// `a_n >= 0.2` and the last coefficient at least 0.2 away from zero.
pub fn random_perturbation<R: Rng>(rng: &mut R, bg: &Background, p: usize, even: bool) -> Perturbation {
    loop {
        let mut u: Vec<f64> = (0..p).map(|_| rng.gen_range(-0.6..0.6)).collect();
        let mut v: Vec<f64> = (0..p).map(|_| rng.gen_range(-0.6..0.6)).collect();
        let far = |x: f64| x.signum() * (0.2 + 0.4 * x.abs() / 0.6);
        if even {
            u[p - 1] = far(u[p - 1]);
        } else {
            u[p - 1] = 0.0;
            v[p - 1] = far(v[p - 1]);
        }
        let ok = (1..=p).all(|n| bg.a0(n as i64) + u[n - 1] >= 0.2);
        if ok {
            return Perturbation::new(u, v);
        }
    }
}

/// Smallest distance between distinct states, and from a real state to a
/// band edge or a Dirichlet point.
pub fn state_separation(bg: &Background, pert: &Perturbation) -> Option<f64> {
    let jost = JostData::new(bg, pert).ok()?;
    let roots = jost.state_poly().roots().ok()?;
    let mut sep = f64::INFINITY;
    let vals: Vec<_> = roots.roots.iter().map(|r| r.value).collect();
    for (i, a) in vals.iter().enumerate() {
        for b in &vals[i + 1..] {
            sep = sep.min((a - b).norm());
        }
        if a.im == 0.0 {
            for e in &bg.bands().edges {
                sep = sep.min((a.re - e).abs());
            }
            for g in &bg.bands().gaps {
                sep = sep.min((a.re - g.mu).abs());
            }
        }
    }
    Some(sep)
}

/// Random instance whose states are at least `1e-3` apart from each other,
/// from the band edges and from the Dirichlet points.
pub fn random_instance<R: Rng>(rng: &mut R, spec: InstanceSpec) -> Instance {
    loop {
        let background = random_background(rng, spec.q, spec.min_gap);
        let perturbation = random_perturbation(rng, &background, spec.p, spec.even);
        if state_separation(&background, &perturbation).is_some_and(|s| s >= 1e-3) {
            return Instance {
                background,
                perturbation,
            };
        }
    }
}

/// `count` instances cycling through `q` in {2, 3}, `p` in {1, 2, 3} and
/// both parities of `nu`.
pub fn instance_family(seed: u64, count: usize) -> Vec<Instance> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let spec = InstanceSpec {
                q: 2 + i % 2,
                p: 1 + (i / 2) % 3,
                even: (i / 6) % 2 == 0,
                min_gap: 0.05,
            };
            random_instance(&mut r, spec)
        })
        .collect()
}
