use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    even_parity_gadget, formal_gadget, mbody_gadget, odd_parity_gadget, to_f64, Gadget,
    GadgetError, GadgetTerm, RatioWindow, Strength,
};
use crate::basis::total_dimension;
use crate::code::ParityCode;
use crate::model::LogicalModel;
use crate::sign::Sign;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Diagonal stabiliser penalties, no ancillas.
    Formal,
    /// One qutrit per stabiliser; all ν = +1.
    EvenQutrit,
    /// One qubit per stabiliser; all ν = -1.
    OddQubit,
    /// Squared-sum gadgets with the audited number of qubit ancillas.
    Mbody,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Formal,
        Variant::EvenQutrit,
        Variant::OddQubit,
        Variant::Mbody,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Formal => "formal",
            Variant::EvenQutrit => "even_qutrit",
            Variant::OddQubit => "odd_qubit",
            Variant::Mbody => "mbody",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| {
                format!("unknown variant `{s}` (expected formal, even_qutrit, odd_qubit or mbody)")
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum SiteRole {
    Physical { spin: usize },
    Ancilla { stabiliser: usize, index: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Site {
    pub dim: usize,
    #[serde(flatten)]
    pub role: SiteRole,
}

/// A gadget placed on the program's sites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintGroup {
    pub stabiliser: usize,
    pub face_id: String,
    /// Program site of each gadget-local site.
    pub sites: Vec<usize>,
    pub gadget: Gadget,
}

/// A logical model compiled onto a code's physical spins plus ancillas.
///
/// Sites are the code's spins in order, followed by each stabiliser's
/// ancillas in stabiliser order.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalProgram {
    pub code: ParityCode,
    pub model: LogicalModel,
    pub sites: Vec<Site>,
    /// Per physical spin: `h`, `μJ` and `μK` contributions.
    pub logical_fields: Vec<f64>,
    pub groups: Vec<ConstraintGroup>,
    pub delta: f64,
    pub variant: Variant,
    pub ratio: Option<Strength>,
    /// Labels whose coefficient was split equally over several spins.
    pub split_labels: Vec<(Vec<usize>, Vec<usize>)>,
}

impl PhysicalProgram {
    pub fn site_dims(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.dim).collect()
    }

    pub fn total_dimension(&self) -> u128 {
        total_dimension(&self.site_dims())
    }

    pub fn n_physical(&self) -> usize {
        self.code.n_spins()
    }

    /// Logical fields plus the single-site terms produced by gadget
    /// expansion, per site.
    pub fn total_site_fields(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.sites.len()];
        out[..self.logical_fields.len()].copy_from_slice(&self.logical_fields);
        for g in &self.groups {
            for t in &g.gadget.terms {
                if let GadgetTerm::SiteField { site, strength } = t {
                    out[g.sites[*site]] += self.delta * to_f64(*strength);
                }
            }
        }
        out
    }

    /// Σ over groups of the gadget constants, times Δ.
    pub fn constant_shift(&self) -> f64 {
        self.delta
            * self
                .groups
                .iter()
                .map(|g| to_f64(g.gadget.constant))
                .sum::<f64>()
    }
}

fn check_delta(delta: f64) -> Result<(), GadgetError> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(GadgetError::InvalidDelta(delta));
    }
    Ok(())
}

fn gadget_for(
    variant: Variant,
    arity: usize,
    nu: Sign,
    face: &str,
    ratio: Strength,
) -> Result<Gadget, GadgetError> {
    let need_sign = |expected: Sign| {
        if nu != expected {
            Err(GadgetError::SignMismatch {
                variant: variant.to_string(),
                face: face.to_string(),
                expected,
                found: nu,
            })
        } else {
            Ok(())
        }
    };
    match variant {
        Variant::Formal => formal_gadget(arity, nu),
        Variant::EvenQutrit => {
            need_sign(Sign::Plus)?;
            even_parity_gadget(arity)
        }
        Variant::OddQubit => {
            need_sign(Sign::Minus)?;
            odd_parity_gadget(arity, ratio, RatioWindow::Enforce)
        }
        Variant::Mbody => mbody_gadget(arity, nu),
    }
}

/// Per-stabiliser formal penalties `(Δ/2)(1 - ν S)` as constraint groups on
/// the physical spins.
pub fn formal_constraint(
    code: &ParityCode,
    delta: f64,
) -> Result<Vec<ConstraintGroup>, GadgetError> {
    check_delta(delta)?;
    code.stabilisers()
        .iter()
        .enumerate()
        .map(|(k, s)| {
            Ok(ConstraintGroup {
                stabiliser: k,
                face_id: s.face_id.clone(),
                sites: s.spins(),
                gadget: formal_gadget(s.arity(), s.nu)?,
            })
        })
        .collect()
}

/// Maps every model term onto the spins carrying its label, with sign μ,
/// and attaches one constraint group per stabiliser.
///
/// `h_j` goes to the logical-Z spin of `j`. A coupling or multi-body term
/// whose label sits on several spins is split equally between them.
pub fn compile_program(
    model: &LogicalModel,
    code: &ParityCode,
    variant: Variant,
    delta: f64,
    ratio: Option<Strength>,
) -> Result<PhysicalProgram, GadgetError> {
    check_delta(delta)?;
    if model.n() != code.n_logical() {
        return Err(GadgetError::LogicalCountMismatch {
            model: model.n(),
            code: code.n_logical(),
        });
    }
    let ratio_used = ratio.unwrap_or_else(super::default_ratio);

    let n = code.n_spins();
    let mut logical_fields = vec![0.0; n];
    let mut split_labels = Vec::new();
    for (key, value) in model.terms() {
        if key.len() == 1 {
            let p = code.logical_z()[key[0] - 1];
            logical_fields[p] += code.label(p).mu.as_f64() * value;
            continue;
        }
        let carriers = code.spins_with_label(&key);
        if carriers.is_empty() {
            return Err(GadgetError::Connectivity(key));
        }
        let share = value / carriers.len() as f64;
        for &p in &carriers {
            logical_fields[p] += code.label(p).mu.as_f64() * share;
        }
        if carriers.len() > 1 {
            split_labels.push((key, carriers));
        }
    }

    let mut sites: Vec<Site> = (0..n)
        .map(|spin| Site {
            dim: 2,
            role: SiteRole::Physical { spin },
        })
        .collect();
    let mut groups = Vec::with_capacity(code.stabilisers().len());
    for (k, st) in code.stabilisers().iter().enumerate() {
        let gadget = gadget_for(variant, st.arity(), st.nu, &st.face_id, ratio_used)?;
        let mut group_sites = st.spins();
        for (index, &dim) in gadget.ancilla_dims.iter().enumerate() {
            group_sites.push(sites.len());
            sites.push(Site {
                dim,
                role: SiteRole::Ancilla {
                    stabiliser: k,
                    index,
                },
            });
        }
        groups.push(ConstraintGroup {
            stabiliser: k,
            face_id: st.face_id.clone(),
            sites: group_sites,
            gadget,
        });
    }

    Ok(PhysicalProgram {
        code: code.clone(),
        model: model.clone(),
        sites,
        logical_fields,
        groups,
        delta,
        variant,
        ratio: (variant == Variant::OddQubit).then_some(ratio_used),
        split_labels,
    })
}
