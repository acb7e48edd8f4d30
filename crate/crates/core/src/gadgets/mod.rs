//! Constraint Hamiltonians: one group of diagonal terms per stabiliser whose
//! ground space is that stabiliser's eigenspace.
//!
//! Strengths are exact rationals in units of Δ. A [`Gadget`] uses local site
//! indices: face spins `0..arity` in stabiliser order, then its ancillas.
//! Every gadget records a constant so that its ground energy is exactly 0.

mod audit;
mod program;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::for_each_z;
use crate::sign::Sign;

pub use audit::{
    audit_table, audited_ancilla_count, minimal_ancillas_by_search, paper_ancilla_count, AuditRow,
};
pub use program::{
    compile_program, formal_constraint, ConstraintGroup, PhysicalProgram, Site, SiteRole, Variant,
};

/// Exact strength in units of Δ.
pub type Strength = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GadgetError {
    #[error("Delta must be positive and finite, got {0}")]
    InvalidDelta(f64),
    #[error("{variant} gadget does not support {arity}-spin stabilisers")]
    UnsupportedArity { variant: String, arity: usize },
    #[error("{variant} gadget enforces nu = {expected} but face {face} has nu = {found}")]
    SignMismatch {
        variant: String,
        face: String,
        expected: Sign,
        found: Sign,
    },
    #[error("coupling ratio {0} outside the open window (1, 3)")]
    RatioOutOfWindow(Strength),
    #[error("ratio {0} cannot be represented exactly")]
    InexactRatio(f64),
    #[error("no physical spin carries label {0:?}")]
    Connectivity(Vec<usize>),
    #[error("model has {model} logicals but code has {code}")]
    LogicalCountMismatch { model: usize, code: usize },
}

/// One diagonal term. Site indices are local to the gadget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GadgetTerm {
    /// `strength · z_site`
    SiteField { site: usize, strength: Strength },
    /// `strength · z_a z_b`
    TwoBody {
        sites: [usize; 2],
        strength: Strength,
    },
    /// `strength · (T^z_site)²`, qutrit ancillas only.
    QutritSquare { site: usize, strength: Strength },
    /// `strength · Π z`, used only by the formal penalty.
    Parity {
        sites: Vec<usize>,
        strength: Strength,
    },
}

impl GadgetTerm {
    pub fn strength(&self) -> Strength {
        match self {
            GadgetTerm::SiteField { strength, .. }
            | GadgetTerm::TwoBody { strength, .. }
            | GadgetTerm::QutritSquare { strength, .. }
            | GadgetTerm::Parity { strength, .. } => *strength,
        }
    }

    pub fn sites(&self) -> Vec<usize> {
        match self {
            GadgetTerm::SiteField { site, .. } | GadgetTerm::QutritSquare { site, .. } => {
                vec![*site]
            }
            GadgetTerm::TwoBody { sites, .. } => sites.to_vec(),
            GadgetTerm::Parity { sites, .. } => sites.clone(),
        }
    }

    pub fn evaluate(&self, z: &[i64]) -> Strength {
        let factor = match self {
            GadgetTerm::SiteField { site, .. } => z[*site],
            GadgetTerm::TwoBody { sites: [a, b], .. } => z[*a] * z[*b],
            GadgetTerm::QutritSquare { site, .. } => z[*site] * z[*site],
            GadgetTerm::Parity { sites, .. } => sites.iter().map(|&s| z[s]).product(),
        };
        self.strength() * factor
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GadgetKind {
    Formal,
    EvenQutrit,
    OddQubit { ratio: Strength },
    Mbody { ancillas: usize },
}

/// `prefactor · (Σ_i c_i z_i + offset)²` over local sites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquaredForm {
    pub prefactor: Strength,
    pub coefficients: Vec<i64>,
    pub offset: i64,
}

impl SquaredForm {
    pub fn evaluate(&self, z: &[i64]) -> Strength {
        let inner: i64 = self
            .coefficients
            .iter()
            .zip(z)
            .map(|(c, v)| c * v)
            .sum::<i64>()
            + self.offset;
        self.prefactor * (inner * inner)
    }

    /// Multiplies out the square into field, coupling, qutrit-square terms
    /// and a constant. `dims` gives each local site's dimension.
    fn expand(&self, dims: &[usize]) -> (Vec<GadgetTerm>, Strength) {
        let p = self.prefactor;
        let c = &self.coefficients;
        let mut terms = Vec::new();
        let mut constant = p * (self.offset * self.offset);
        for (i, &ci) in c.iter().enumerate() {
            let sq = p * (ci * ci);
            match dims[i] {
                2 => constant += sq,
                _ => terms.push(GadgetTerm::QutritSquare {
                    site: i,
                    strength: sq,
                }),
            }
        }
        for i in 0..c.len() {
            for j in (i + 1)..c.len() {
                terms.push(GadgetTerm::TwoBody {
                    sites: [i, j],
                    strength: p * (2 * c[i] * c[j]),
                });
            }
        }
        for (i, &ci) in c.iter().enumerate() {
            terms.push(GadgetTerm::SiteField {
                site: i,
                strength: p * (2 * self.offset * ci),
            });
        }
        terms.retain(|t| !t.strength().is_zero());
        (terms, constant)
    }
}

/// Local constraint Hamiltonian for one stabiliser.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gadget {
    pub kind: GadgetKind,
    pub arity: usize,
    /// Eigenvalue of the face parity the ground space enforces.
    pub target: Sign,
    /// 2 for qubit ancillas, 3 for qutrits.
    pub ancilla_dims: Vec<usize>,
    pub terms: Vec<GadgetTerm>,
    /// Added to the terms so that the ground energy is 0.
    pub constant: Strength,
    /// The defining square when the gadget is one; `terms + constant`
    /// equals it on every local state.
    pub squared_form: Option<SquaredForm>,
}

impl Gadget {
    pub fn n_sites(&self) -> usize {
        self.arity + self.ancilla_dims.len()
    }

    pub fn local_dims(&self) -> Vec<usize> {
        let mut d = vec![2; self.arity];
        d.extend(&self.ancilla_dims);
        d
    }

    /// Energy in units of Δ of a local z assignment, constant included.
    pub fn energy(&self, z: &[i64]) -> Strength {
        self.terms.iter().map(|t| t.evaluate(z)).sum::<Strength>() + self.constant
    }

    /// Energies of all local states in mixed-radix order.
    pub fn energy_table(&self) -> Vec<Strength> {
        let mut out = Vec::new();
        for_each_z(&self.local_dims(), |z| out.push(self.energy(z)));
        out
    }

    fn from_square(
        kind: GadgetKind,
        arity: usize,
        target: Sign,
        ancilla_dims: Vec<usize>,
        form: SquaredForm,
    ) -> Self {
        let mut dims = vec![2; arity];
        dims.extend(&ancilla_dims);
        let (terms, expansion_constant) = form.expand(&dims);
        Gadget {
            kind,
            arity,
            target,
            ancilla_dims,
            terms,
            constant: expansion_constant,
            squared_form: Some(form),
        }
    }
}

fn unsupported(variant: &str, arity: usize) -> GadgetError {
    GadgetError::UnsupportedArity {
        variant: variant.into(),
        arity,
    }
}

/// `(1 - ν Π z) / 2`: 0 on the ν eigenspace, 1 elsewhere.
pub fn formal_gadget(arity: usize, nu: Sign) -> Result<Gadget, GadgetError> {
    if arity == 0 {
        return Err(unsupported("formal", arity));
    }
    let half = Strength::new(1, 2);
    Ok(Gadget {
        kind: GadgetKind::Formal,
        arity,
        target: nu,
        ancilla_dims: Vec::new(),
        terms: vec![GadgetTerm::Parity {
            sites: (0..arity).collect(),
            strength: -half * i64::from(nu.value()),
        }],
        constant: half,
        squared_form: None,
    })
}

/// `(1/4)(4T + Σσ)²` on a 4-spin face, `(1/4)(1 + 4T + Σσ)²` on a triangle,
/// with one qutrit `T`. Enforces even parity.
pub fn even_parity_gadget(arity: usize) -> Result<Gadget, GadgetError> {
    let offset = match arity {
        3 => 1,
        4 => 0,
        _ => return Err(unsupported("even_qutrit", arity)),
    };
    let mut coefficients = vec![1; arity];
    coefficients.push(4);
    Ok(Gadget::from_square(
        GadgetKind::EvenQutrit,
        arity,
        Sign::Plus,
        vec![3],
        SquaredForm {
            prefactor: Strength::new(1, 4),
            coefficients,
            offset,
        },
    ))
}

/// Whether a coupling ratio outside (1, 3) is refused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RatioWindow {
    #[default]
    Enforce,
    /// Accept any positive ratio; used to probe the window boundary.
    Override,
}

pub fn default_ratio() -> Strength {
    Strength::from_integer(2)
}

/// Converts a decimal ratio to an exact rational.
pub fn ratio_from_f64(r: f64) -> Result<Strength, GadgetError> {
    if !r.is_finite() {
        return Err(GadgetError::InexactRatio(r));
    }
    // Decimal inputs such as 1.5 or 2.25 are exact at this denominator.
    let denom = 1_000_000i64;
    let num = (r * denom as f64).round();
    if (num / denom as f64 - r).abs() > 1e-12 || num.abs() > 1e15 {
        return Err(GadgetError::InexactRatio(r));
    }
    Ok(Strength::new(num as i64, denom))
}

/// Odd-parity gadget with one qubit ancilla `a`:
/// `(1/2)[Σ_{a<b} σ_a σ_b + r·a·Σσ] + r` on a 4-spin face.
///
/// Triangles behave as a square whose fourth spin is pinned to +1, which adds
/// `(1/2)σ` on each face spin and `(r/2)a` on the ancilla. At `r = 2` this is
/// `(1/4)(2a + Σσ [+1])²` exactly.
pub fn odd_parity_gadget(
    arity: usize,
    ratio: Strength,
    window: RatioWindow,
) -> Result<Gadget, GadgetError> {
    if arity != 3 && arity != 4 {
        return Err(unsupported("odd_qubit", arity));
    }
    let one = Strength::one();
    let three = Strength::from_integer(3);
    let in_window = ratio > one && ratio < three;
    if (window == RatioWindow::Enforce && !in_window) || !ratio.is_positive() {
        return Err(GadgetError::RatioOutOfWindow(ratio));
    }
    let half = Strength::new(1, 2);
    let anc = arity;
    let mut terms = Vec::new();
    for a in 0..arity {
        for b in (a + 1)..arity {
            terms.push(GadgetTerm::TwoBody {
                sites: [a, b],
                strength: half,
            });
        }
    }
    for a in 0..arity {
        terms.push(GadgetTerm::TwoBody {
            sites: [a, anc],
            strength: half * ratio,
        });
    }
    if arity == 3 {
        for a in 0..arity {
            terms.push(GadgetTerm::SiteField {
                site: a,
                strength: half,
            });
        }
        terms.push(GadgetTerm::SiteField {
            site: anc,
            strength: half * ratio,
        });
    }
    let squared_form = (ratio == default_ratio()).then(|| {
        let mut coefficients = vec![1; arity];
        coefficients.push(2);
        SquaredForm {
            prefactor: Strength::new(1, 4),
            coefficients,
            offset: i64::from(arity == 3),
        }
    });
    Ok(Gadget {
        kind: GadgetKind::OddQubit { ratio },
        arity,
        target: Sign::Minus,
        ancilla_dims: vec![2],
        terms,
        constant: ratio,
        squared_form,
    })
}

/// M-body gadget with the audited minimal number of qubit ancillas.
pub fn mbody_gadget(arity: usize, target: Sign) -> Result<Gadget, GadgetError> {
    if arity < 3 {
        return Err(unsupported("mbody", arity));
    }
    Ok(mbody_gadget_with_ancillas(
        arity,
        target,
        audited_ancilla_count(arity, target),
    ))
}

/// `(1/4)(Σσ ∓ (1 + 2Σa))²` for odd M (minus enforces +1), and
/// `(1/4)(Σσ + 2Σa)²` for even M, with `p` qubit ancillas. Whether `p`
/// suffices is up to the caller; [`minimal_ancillas_by_search`] checks it.
pub fn mbody_gadget_with_ancillas(arity: usize, target: Sign, p: usize) -> Gadget {
    let (anc_coeff, offset) = if arity % 2 == 1 {
        match target {
            Sign::Plus => (-2, -1),
            Sign::Minus => (2, 1),
        }
    } else {
        (2, 0)
    };
    let mut coefficients = vec![1; arity];
    coefficients.extend(std::iter::repeat_n(anc_coeff, p));
    Gadget::from_square(
        GadgetKind::Mbody { ancillas: p },
        arity,
        target,
        vec![2; p],
        SquaredForm {
            prefactor: Strength::new(1, 4),
            coefficients,
            offset,
        },
    )
}

/// Ground set of a gadget by exhaustive enumeration of its local states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSpace {
    pub min_energy: Strength,
    /// Local z assignments (face spins then ancillas) at the minimum.
    pub states: Vec<Vec<i64>>,
}

impl GroundSpace {
    /// Distinct face-spin assignments appearing in the ground set.
    pub fn face_projection(&self, arity: usize) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = self.states.iter().map(|s| s[..arity].to_vec()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Whether the face projection is exactly the `target` parity eigenspace.
    pub fn enforces(&self, arity: usize, target: Sign) -> bool {
        let proj = self.face_projection(arity);
        let mut expected = Vec::new();
        for_each_z(&vec![2; arity], |z| {
            if z.iter().product::<i64>() == i64::from(target.value()) {
                expected.push(z.to_vec());
            }
        });
        expected.sort();
        proj == expected
    }
}

/// Local site count above which the oracle refuses to enumerate.
pub const ORACLE_MAX_SITES: usize = 20;

/// Exhaustive enumeration of a gadget's energy table; returns the argmin set.
pub fn gadget_groundspace_oracle(gadget: &Gadget) -> Option<GroundSpace> {
    if gadget.n_sites() > ORACLE_MAX_SITES {
        return None;
    }
    let mut min: Option<Strength> = None;
    let mut states = Vec::new();
    for_each_z(&gadget.local_dims(), |z| {
        let e = gadget.energy(z);
        match min {
            Some(m) if e > m => {}
            Some(m) if e == m => states.push(z.to_vec()),
            _ => {
                min = Some(e);
                states.clear();
                states.push(z.to_vec());
            }
        }
    });
    Some(GroundSpace {
        min_energy: min.unwrap_or_else(Strength::zero),
        states,
    })
}

/// Digit-indexed flag table: `true` where the local state is a ground state.
pub(crate) fn ground_table(gadget: &Gadget) -> Vec<bool> {
    let table = gadget.energy_table();
    let min = table.iter().copied().min().unwrap_or_else(Strength::zero);
    table.into_iter().map(|e| e == min).collect()
}

pub(crate) fn to_f64(s: Strength) -> f64 {
    *s.numer() as f64 / *s.denom() as f64
}

#[cfg(test)]
mod tests;
