//! Parity codes: physical spins, Z-type stabilisers with target eigenvalues,
//! and the logical operators they imply.
//!
//! A code is specified by its [`CodeLayout`] (spins, stabilisers, the spins
//! carrying logical Z). Everything else is derived: logical X chains from the
//! commutation constraints, and the label of every spin (which product of
//! logical Z it represents, and with what sign μ).

mod builtin;
pub mod file;
mod verify;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{Gf2Error, Gf2Matrix, SupportVector};
use crate::sign::Sign;

pub use builtin::{
    adjacency_from_edges, build_square_lattice, build_tree_code, build_triangular_lattice, NuPolicy,
};
pub use file::{load_custom_code, parse_code_file, read_code_file, CodeFile};
pub use verify::{verify_code, Check, VerificationReport};

/// Nullspace dimensions above this are not enumerated when picking the
/// minimal-weight logical X.
const MAX_NULLSPACE_ENUMERATION: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodeError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("stabiliser count mismatch: {stabilisers} stabilisers for {spins} spins and {n_logical} logicals (need {})", spins.saturating_sub(*n_logical))]
    CountMismatch {
        spins: usize,
        stabilisers: usize,
        n_logical: usize,
    },
    #[error("stabilisers are dependent (rank deficit {deficit}); first redundant face: {face}")]
    DependentStabilisers { deficit: usize, face: String },
    #[error("logical Z on spin {spin} is not independent of the stabilisers")]
    DependentLogical { spin: String },
    #[error("no logical X exists for logical {logical}")]
    InfeasibleLogicalX { logical: usize },
    #[error("logical X for logical {logical} has {dim} free directions; too many to canonicalise")]
    AmbiguousLogicalX { logical: usize, dim: usize },
    #[error("label methods disagree on spin {spin}: intersection {intersection:?}, decomposition {decomposition:?}")]
    LabelDisagreement {
        spin: String,
        intersection: Vec<usize>,
        decomposition: Vec<usize>,
    },
    #[error("target {target:?} is not the product of the locality labels; residual {residual:?}")]
    Inexpressible {
        target: Vec<usize>,
        residual: Vec<usize>,
    },
    #[error("spin id {0} appears more than once")]
    DuplicateSpin(String),
    #[error("unknown spin id {0}")]
    UnknownSpin(String),
    #[error("stabiliser {0} has empty support")]
    EmptyStabiliser(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Physical spin identifier: a lattice coordinate `(i, j)` with `i < j`
/// (vertex spins are `(0, j)`), or an opaque name for custom layouts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpinId {
    Pair(u32, u32),
    Named(String),
}

impl SpinId {
    pub fn pair(i: u32, j: u32) -> Self {
        SpinId::Pair(i, j)
    }
}

impl fmt::Display for SpinId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpinId::Pair(i, j) => write!(f, "({i},{j})"),
            SpinId::Named(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabiliser {
    pub support: SupportVector,
    pub nu: Sign,
    pub face_id: String,
}

impl Stabiliser {
    pub fn spins(&self) -> Vec<usize> {
        self.support.indices()
    }

    pub fn arity(&self) -> usize {
        self.support.weight()
    }
}

/// The user-specified part of a code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeLayout {
    pub n_logical: usize,
    pub spins: Vec<SpinId>,
    pub stabilisers: Vec<Stabiliser>,
    /// `logical_z[k - 1]` is the spin carrying logical Z of logical `k`.
    pub logical_z: Vec<usize>,
}

impl CodeLayout {
    pub fn n_spins(&self) -> usize {
        self.spins.len()
    }

    pub fn spin_index(&self, id: &SpinId) -> Option<usize> {
        self.spins.iter().position(|s| s == id)
    }

    /// Rows `[stabiliser supports..., logical Z singletons...]`.
    fn constraint_matrix(&self) -> Gf2Matrix {
        let n = self.n_spins();
        let rows = self
            .stabilisers
            .iter()
            .map(|s| s.support.clone())
            .chain(self.logical_z.iter().map(|&z| SupportVector::unit(n, z)))
            .collect();
        Gf2Matrix::new(rows, n).expect("supports share the spin count")
    }

    fn check_structure(&self) -> Result<(), CodeError> {
        if self.n_logical == 0 {
            return Err(CodeError::InvalidParameter(
                "n_logical must be at least 1".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for s in &self.spins {
            if !seen.insert(s) {
                return Err(CodeError::DuplicateSpin(s.to_string()));
            }
        }
        let n = self.n_spins();
        for st in &self.stabilisers {
            if st.support.len() != n {
                return Err(Gf2Error::Dimension {
                    expected: n,
                    found: st.support.len(),
                }
                .into());
            }
            if st.support.is_zero() {
                return Err(CodeError::EmptyStabiliser(st.face_id.clone()));
            }
        }
        if self.logical_z.len() != self.n_logical {
            return Err(CodeError::Schema {
                field: "logical_z".into(),
                message: format!(
                    "expected {} entries, found {}",
                    self.n_logical,
                    self.logical_z.len()
                ),
            });
        }
        let mut z_seen = BTreeSet::new();
        for &z in &self.logical_z {
            if z >= n {
                return Err(CodeError::UnknownSpin(format!("#{z}")));
            }
            if !z_seen.insert(z) {
                return Err(CodeError::DuplicateSpin(self.spins[z].to_string()));
            }
        }
        Ok(())
    }

    fn check_counts(&self) -> Result<(), CodeError> {
        if self.stabilisers.len() + self.n_logical != self.n_spins() {
            return Err(CodeError::CountMismatch {
                spins: self.n_spins(),
                stabilisers: self.stabilisers.len(),
                n_logical: self.n_logical,
            });
        }
        Ok(())
    }

    /// First stabiliser (in order) that lies in the span of its
    /// predecessors, together with the total rank deficit.
    fn first_dependent_stabiliser(&self) -> Option<(usize, usize)> {
        let n = self.n_spins();
        let full = Gf2Matrix::new(
            self.stabilisers.iter().map(|s| s.support.clone()).collect(),
            n,
        )
        .ok()?
        .rank();
        let deficit = self.stabilisers.len() - full;
        if deficit == 0 {
            return None;
        }
        let mut basis: Vec<SupportVector> = Vec::new();
        for (i, s) in self.stabilisers.iter().enumerate() {
            let mut rows = basis.clone();
            rows.push(s.support.clone());
            let m = Gf2Matrix::new(rows, n).ok()?;
            if m.rank() == basis.len() {
                return Some((i, deficit));
            }
            basis = m.row_basis();
        }
        None
    }
}

/// Which product of logical Z operators a physical spin's Z represents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinLabel {
    /// Sorted, 1-based logical indices.
    pub logicals: Vec<usize>,
    pub mu: Sign,
}

/// A validated code with derived logical X chains and spin labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCode {
    layout: CodeLayout,
    logical_x: Vec<SupportVector>,
    labels: Vec<SpinLabel>,
}

impl ParityCode {
    /// Validates a layout and derives logical X and labels.
    pub fn from_layout(layout: CodeLayout) -> Result<Self, CodeError> {
        layout.check_structure()?;
        layout.check_counts()?;
        if let Some((i, deficit)) = layout.first_dependent_stabiliser() {
            return Err(CodeError::DependentStabilisers {
                deficit,
                face: layout.stabilisers[i].face_id.clone(),
            });
        }
        let m = layout.constraint_matrix();
        if m.rank() != layout.n_spins() {
            let culprit = first_dependent_logical(&layout);
            return Err(CodeError::DependentLogical {
                spin: layout.spins[culprit].to_string(),
            });
        }
        let logical_x = derive_logical_x(&layout)?;
        let labels = label_spins(&layout, &logical_x)?;
        Ok(Self {
            layout,
            logical_x,
            labels,
        })
    }

    pub fn layout(&self) -> &CodeLayout {
        &self.layout
    }

    pub fn n_logical(&self) -> usize {
        self.layout.n_logical
    }

    pub fn n_spins(&self) -> usize {
        self.layout.n_spins()
    }

    pub fn spins(&self) -> &[SpinId] {
        &self.layout.spins
    }

    pub fn stabilisers(&self) -> &[Stabiliser] {
        &self.layout.stabilisers
    }

    pub fn logical_z(&self) -> &[usize] {
        &self.layout.logical_z
    }

    /// Logical X chain of logical `k` (1-based).
    pub fn logical_x(&self, k: usize) -> &SupportVector {
        &self.logical_x[k - 1]
    }

    pub fn logical_xs(&self) -> &[SupportVector] {
        &self.logical_x
    }

    pub fn labels(&self) -> &[SpinLabel] {
        &self.labels
    }

    pub fn label(&self, spin: usize) -> &SpinLabel {
        &self.labels[spin]
    }

    pub fn spin_index(&self, id: &SpinId) -> Option<usize> {
        self.layout.spin_index(id)
    }

    /// All spins whose label is exactly `logicals` (any order).
    pub fn spins_with_label(&self, logicals: &[usize]) -> Vec<usize> {
        let mut key = logicals.to_vec();
        key.sort_unstable();
        key.dedup();
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.logicals == key)
            .map(|(i, _)| i)
            .collect()
    }

    /// Labels that occur on more than one spin.
    pub fn duplicate_labels(&self) -> Vec<Vec<usize>> {
        let mut counts = std::collections::BTreeMap::<&Vec<usize>, usize>::new();
        for l in &self.labels {
            *counts.entry(&l.logicals).or_default() += 1;
        }
        counts
            .into_iter()
            .filter(|&(_, c)| c > 1)
            .map(|(k, _)| k.clone())
            .collect()
    }

    /// Parity-violation report for a measured z-configuration (±1 per spin).
    pub fn syndrome(&self, z_configuration: &[i8]) -> Result<SyndromeReport, CodeError> {
        if z_configuration.len() != self.n_spins() {
            return Err(Gf2Error::Dimension {
                expected: self.n_spins(),
                found: z_configuration.len(),
            }
            .into());
        }
        let mut violated = Vec::new();
        for st in self.stabilisers() {
            let product = Sign::of_product(st.support.iter_ones().map(|i| z_configuration[i]));
            if product != st.nu {
                violated.push(st.face_id.clone());
            }
        }
        let satisfied_count = self.stabilisers().len() - violated.len();
        Ok(SyndromeReport {
            violated,
            satisfied_count,
        })
    }

    /// Adds a spin that represents `target` via one new stabiliser over
    /// `locality ∪ {new spin}` with eigenvalue `nu`.
    pub fn add_multibody_spin(
        &self,
        id: SpinId,
        locality: &[usize],
        target: &[usize],
        nu: Sign,
    ) -> Result<ParityCode, CodeError> {
        if locality.is_empty() {
            return Err(CodeError::InvalidParameter("locality set is empty".into()));
        }
        if self.spin_index(&id).is_some() {
            return Err(CodeError::DuplicateSpin(id.to_string()));
        }
        let mut product = BTreeSet::new();
        for &p in locality {
            if p >= self.n_spins() {
                return Err(CodeError::UnknownSpin(format!("#{p}")));
            }
            for &k in &self.labels[p].logicals {
                if !product.remove(&k) {
                    product.insert(k);
                }
            }
        }
        let target_set: BTreeSet<usize> = target.iter().copied().collect();
        let residual: Vec<usize> = product.symmetric_difference(&target_set).copied().collect();
        if !residual.is_empty() {
            return Err(CodeError::Inexpressible {
                target: target_set.into_iter().collect(),
                residual,
            });
        }

        let n = self.n_spins() + 1;
        let mut layout = self.layout.clone();
        for st in &mut layout.stabilisers {
            let mut support = SupportVector::zeros(n);
            for i in st.support.iter_ones() {
                support.set(i, true);
            }
            st.support = support;
        }
        let face_id = format!("<{id}>");
        layout.spins.push(id);
        let mut support = SupportVector::from_indices(n, locality)?;
        support.set(n - 1, true);
        layout.stabilisers.push(Stabiliser {
            support,
            nu,
            face_id,
        });
        ParityCode::from_layout(layout)
    }
}

fn first_dependent_logical(layout: &CodeLayout) -> usize {
    let n = layout.n_spins();
    let mut rows: Vec<SupportVector> = layout
        .stabilisers
        .iter()
        .map(|s| s.support.clone())
        .collect();
    for &z in &layout.logical_z {
        let before = Gf2Matrix::new(rows.clone(), n)
            .map(|m| m.rank())
            .unwrap_or(0);
        rows.push(SupportVector::unit(n, z));
        let after = Gf2Matrix::new(rows.clone(), n)
            .map(|m| m.rank())
            .unwrap_or(0);
        if after == before {
            return z;
        }
    }
    layout.logical_z.first().copied().unwrap_or(0)
}

/// Logical X chains: for each `k`, the support containing `logical_z[k]`,
/// excluding every other logical Z spin, with even overlap on every
/// stabiliser. Among all solutions the minimal-weight one is chosen, ties
/// broken by [`SupportVector::cmp_lex`].
pub fn derive_logical_x(layout: &CodeLayout) -> Result<Vec<SupportVector>, CodeError> {
    let m = layout.constraint_matrix();
    let s = layout.stabilisers.len();
    (1..=layout.n_logical)
        .map(|k| {
            let mut rhs = vec![false; m.n_rows()];
            rhs[s + k - 1] = true;
            let sol = m.solve(&rhs)?;
            let particular = sol
                .particular
                .ok_or(CodeError::InfeasibleLogicalX { logical: k })?;
            canonical_representative(particular, &sol.nullspace).ok_or(
                CodeError::AmbiguousLogicalX {
                    logical: k,
                    dim: sol.nullspace.len(),
                },
            )
        })
        .collect()
}

fn canonical_representative(
    particular: SupportVector,
    nullspace: &[SupportVector],
) -> Option<SupportVector> {
    if nullspace.len() > MAX_NULLSPACE_ENUMERATION {
        return None;
    }
    let mut best = particular.clone();
    for mask in 1u64..(1u64 << nullspace.len()) {
        let mut cand = particular.clone();
        for (i, n) in nullspace.iter().enumerate() {
            if mask >> i & 1 == 1 {
                cand.xor_assign(n).ok()?;
            }
        }
        let better = match cand.weight().cmp(&best.weight()) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => cand.cmp_lex(&best).is_lt(),
            std::cmp::Ordering::Greater => false,
        };
        if better {
            best = cand;
        }
    }
    Some(best)
}

/// Decomposes `Z_p` into logical Z operators and stabilisers. Returns the
/// logical subset and the sign `μ = Π ν` over the stabilisers used.
pub fn decompose_spin(layout: &CodeLayout, spin: usize) -> Result<SpinLabel, CodeError> {
    let m = layout.constraint_matrix();
    let target = SupportVector::unit(layout.n_spins(), spin);
    let sol = m.express(&target)?;
    let coeffs = sol.particular.ok_or_else(|| CodeError::DependentLogical {
        spin: layout.spins[spin].to_string(),
    })?;
    let s = layout.stabilisers.len();
    let mu = coeffs
        .iter_ones()
        .filter(|&r| r < s)
        .map(|r| layout.stabilisers[r].nu)
        .product();
    let logicals = coeffs
        .iter_ones()
        .filter(|&r| r >= s)
        .map(|r| r - s + 1)
        .collect();
    Ok(SpinLabel { logicals, mu })
}

/// Labels every spin by both routes: intersection with the logical X chains,
/// and explicit GF(2) decomposition. The two must agree on the subset.
pub fn label_spins(
    layout: &CodeLayout,
    logical_x: &[SupportVector],
) -> Result<Vec<SpinLabel>, CodeError> {
    (0..layout.n_spins())
        .map(|p| {
            let intersection: Vec<usize> = logical_x
                .iter()
                .enumerate()
                .filter(|(_, x)| x.get(p))
                .map(|(k, _)| k + 1)
                .collect();
            let decomposed = decompose_spin(layout, p)?;
            if decomposed.logicals != intersection {
                return Err(CodeError::LabelDisagreement {
                    spin: layout.spins[p].to_string(),
                    intersection,
                    decomposition: decomposed.logicals,
                });
            }
            Ok(decomposed)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeReport {
    pub violated: Vec<String>,
    pub satisfied_count: usize,
}

#[cfg(test)]
mod tests;
