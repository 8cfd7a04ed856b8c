//! On-disk formats.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use reslab::states::{S1Zero, State};
use reslab::{Background, JostData, Perturbation, Poly, Sheet, StateKind};

pub const STATES_VERSION: &str = "reslab-states/1";

/// A periodic background and, for the commands that need one, a
/// perturbation of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub q: usize,
    pub a0: Vec<f64>,
    pub b0: Vec<f64>,
    #[serde(default)]
    pub p: usize,
    #[serde(default)]
    pub u: Vec<f64>,
    #[serde(default)]
    pub v: Vec<f64>,
    /// Claimed state polynomial, ascending; checked by the identity suite.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_poly: Option<Vec<f64>>,
}

impl ProblemFile {
    /// Shape errors, before any numerical validation.
    pub fn schema_errors(&self) -> Option<String> {
        if self.a0.len() != self.q || self.b0.len() != self.q {
            return Some(format!(
                "q = {} but a0 has {} entries and b0 has {}",
                self.q,
                self.a0.len(),
                self.b0.len()
            ));
        }
        if self.u.len() != self.p || self.v.len() != self.p {
            return Some(format!(
                "p = {} but u has {} entries and v has {}",
                self.p,
                self.u.len(),
                self.v.len()
            ));
        }
        None
    }

    pub fn background(&self) -> reslab::Result<Background> {
        Background::new(self.a0.clone(), self.b0.clone())
    }

    pub fn perturbation(&self) -> Perturbation {
        Perturbation::new(self.u.clone(), self.v.clone())
    }

    pub fn from_parts(bg: &Background, pert: &Perturbation) -> Self {
        ProblemFile {
            q: bg.q(),
            a0: bg.a0_coeffs().to_vec(),
            b0: bg.b0_coeffs().to_vec(),
            p: pert.p(),
            u: pert.u.clone(),
            v: pert.v.clone(),
            state_poly: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub lambda_re: f64,
    pub lambda_im: f64,
    /// 1 or 2; absent at band edges, where the sheets meet.
    pub sheet: Option<u8>,
    pub kind: String,
    pub multiplicity: usize,
    pub gap_index: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsEntry {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub kappa: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct S1ZeroEntry {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub on_dirichlet: bool,
    pub on_edge: bool,
}

/// Output of `direct`, input of `inverse`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatesFile {
    pub version: String,
    pub states: Vec<StateEntry>,
    pub constants: ConstantsEntry,
    pub bands: Vec<[f64; 2]>,
    pub theta0_plus: Vec<f64>,
    pub phi0_plus: Vec<f64>,
    pub s1_zeros: Vec<S1ZeroEntry>,
}

impl StatesFile {
    pub fn new(jost: &JostData, states: &[State], s1: &[S1Zero]) -> Self {
        let c = jost.constants();
        StatesFile {
            version: STATES_VERSION.into(),
            states: states
                .iter()
                .map(|s| StateEntry {
                    lambda_re: s.lam.re,
                    lambda_im: s.lam.im,
                    sheet: s.sheet.map(Sheet::number),
                    kind: s.kind.name().into(),
                    multiplicity: s.multiplicity,
                    gap_index: s.gap,
                })
                .collect(),
            constants: ConstantsEntry {
                c1: c.c1,
                c2: c.c2,
                c3: c.c3,
                kappa: c.kappa,
            },
            bands: jost.background().bands().bands.iter().map(|&(a, b)| [a, b]).collect(),
            theta0_plus: jost.theta_plus(0).coeffs().to_vec(),
            phi0_plus: jost.phi_plus(0).coeffs().to_vec(),
            s1_zeros: s1
                .iter()
                .map(|z| S1ZeroEntry {
                    re: z.value.re,
                    im: z.value.im,
                    multiplicity: z.multiplicity,
                    on_dirichlet: z.on_dirichlet,
                    on_edge: z.on_edge,
                })
                .collect(),
        }
    }

    pub fn schema_errors(&self) -> Option<String> {
        if self.version != STATES_VERSION {
            return Some(format!("unknown version {:?}", self.version));
        }
        if let Some(s) = self.states.iter().find(|s| StateKind::parse(&s.kind).is_none()) {
            return Some(format!("unknown state kind {:?}", s.kind));
        }
        let degree: usize = self.states.iter().map(|s| s.multiplicity).sum();
        if degree != self.constants.kappa {
            return Some(format!(
                "state multiplicities sum to {degree}, kappa is {}",
                self.constants.kappa
            ));
        }
        None
    }

    /// `F = -a^0_0 c_3 prod (lambda - lambda_k)`.
    pub fn state_poly(&self, bg: &Background) -> Poly {
        let roots = reslab::RootSet {
            roots: self
                .states
                .iter()
                .map(|s| reslab::Root {
                    value: C64::new(s.lambda_re, s.lambda_im),
                    multiplicity: s.multiplicity,
                })
                .collect(),
            residual: 0.0,
        };
        Poly::from_roots(&roots, -bg.a0(0) * self.constants.c3)
    }

    pub fn s1_zeros(&self) -> Vec<S1Zero> {
        self.s1_zeros
            .iter()
            .map(|z| S1Zero {
                value: C64::new(z.re, z.im),
                multiplicity: z.multiplicity,
                on_dirichlet: z.on_dirichlet,
                on_edge: z.on_edge,
            })
            .collect()
    }
}
