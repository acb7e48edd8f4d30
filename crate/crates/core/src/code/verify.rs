use serde::{Deserialize, Serialize};

use super::{derive_logical_x, label_spins, CodeLayout};
use crate::gf2::{commutes, Gf2Matrix, SupportVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    /// Number of stabilisers minus their GF(2) rank.
    pub rank_deficit: usize,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail: detail.into(),
    }
}

/// Runs every structural check on a layout. Failures are report entries,
/// never errors.
pub fn verify_code(layout: &CodeLayout) -> VerificationReport {
    let n = layout.n_spins();
    let mut checks = Vec::new();

    let expected = n.saturating_sub(layout.n_logical);
    checks.push(check(
        "stabiliser-count",
        layout.stabilisers.len() + layout.n_logical == n,
        format!(
            "{} stabilisers, {} spins, {} logicals (expected {expected})",
            layout.stabilisers.len(),
            n,
            layout.n_logical
        ),
    ));

    let structure = layout.check_structure();
    checks.push(check(
        "structure",
        structure.is_ok(),
        structure
            .err()
            .map_or_else(|| "ok".to_string(), |e| e.to_string()),
    ));
    if !checks[1].passed {
        return VerificationReport {
            checks,
            rank_deficit: 0,
        };
    }

    let stab_rank = Gf2Matrix::new(
        layout
            .stabilisers
            .iter()
            .map(|s| s.support.clone())
            .collect(),
        n,
    )
    .map(|m| m.rank())
    .unwrap_or(0);
    let rank_deficit = layout.stabilisers.len() - stab_rank;
    checks.push(check(
        "stabiliser-independence",
        rank_deficit == 0,
        format!(
            "rank {stab_rank} of {} (deficit {rank_deficit})",
            layout.stabilisers.len()
        ),
    ));

    let full_rank = layout.constraint_matrix().rank();
    checks.push(check(
        "full-rank-with-logical-z",
        full_rank == n,
        format!("rank {full_rank} of {n}"),
    ));

    match derive_logical_x(layout) {
        Ok(xs) => {
            let failures = logical_x_failures(layout, &xs);
            checks.push(check(
                "logical-x-relations",
                failures.is_empty(),
                if failures.is_empty() {
                    "all commutation relations hold".to_string()
                } else {
                    failures.join("; ")
                },
            ));
            match label_spins(layout, &xs) {
                Ok(_) => checks.push(check(
                    "label-agreement",
                    true,
                    "intersection = decomposition",
                )),
                Err(e) => checks.push(check("label-agreement", false, e.to_string())),
            }
        }
        Err(e) => {
            checks.push(check("logical-x-relations", false, e.to_string()));
            checks.push(check("label-agreement", false, "logical X unavailable"));
        }
    }

    VerificationReport {
        checks,
        rank_deficit,
    }
}

fn logical_x_failures(layout: &CodeLayout, xs: &[SupportVector]) -> Vec<String> {
    let n = layout.n_spins();
    let mut failures = Vec::new();
    for (k, x) in xs.iter().enumerate() {
        for (k2, &z) in layout.logical_z.iter().enumerate() {
            let anticommutes = !commutes(x, &SupportVector::unit(n, z)).unwrap_or(true);
            if anticommutes != (k == k2) {
                failures.push(format!("X{} vs Z{}", k + 1, k2 + 1));
            }
        }
        for st in &layout.stabilisers {
            if !commutes(x, &st.support).unwrap_or(false) {
                failures.push(format!("X{} vs {}", k + 1, st.face_id));
            }
        }
    }
    failures
}
