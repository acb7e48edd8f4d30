use serde::{Deserialize, Serialize};

use super::{assemble, lowest_eigs, PreparedSystem, SolverMethod, SolverOptions, SpectralError};

/// Grid of `s` values for `H(s) = (1 - s)·H_driver + s·H_final`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub grid: Vec<f64>,
    /// Golden-section refinement (3 extra solves) around the grid minimum.
    pub refine: bool,
}

impl AnnealSchedule {
    pub fn uniform(points: usize) -> Self {
        let n = points.max(2);
        Self {
            grid: (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
            refine: true,
        }
    }

    pub fn validate(&self) -> Result<(), SpectralError> {
        let g = &self.grid;
        if g.len() < 2 || g[0] != 0.0 || g[g.len() - 1] != 1.0 {
            return Err(SpectralError::InvalidSchedule(
                "grid must start at 0 and end at 1".into(),
            ));
        }
        if g.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SpectralError::InvalidSchedule(
                "grid must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self::uniform(101)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapProfile {
    pub s: Vec<f64>,
    /// `λ1 - λ0` per grid point; 0 where below the degeneracy threshold.
    pub gaps: Vec<f64>,
    pub min_gap: f64,
    pub s_at_min: f64,
    /// Some gap fell below the degeneracy threshold.
    pub degenerate: bool,
    /// Extra `(s, gap)` evaluations from refinement.
    pub refined: Vec<(f64, f64)>,
    pub method: SolverMethod,
}

impl GapProfile {
    /// Gap at `s = 1`.
    pub fn final_gap(&self) -> f64 {
        self.gaps[self.gaps.len() - 1]
    }
}

fn gap_at(
    system: &PreparedSystem,
    s: f64,
    opts: &SolverOptions,
) -> Result<(f64, bool, SolverMethod), SpectralError> {
    let op = assemble(system, s)?;
    let spec = lowest_eigs(&op, 2, opts)?;
    let raw = spec.eigenvalues[1] - spec.eigenvalues[0];
    let degenerate = raw < opts.degeneracy_threshold;
    Ok((if degenerate { 0.0 } else { raw }, degenerate, spec.method))
}

/// Gap `λ1 - λ0` at every grid point and its minimum.
pub fn anneal_gap_profile(
    system: &PreparedSystem,
    schedule: &AnnealSchedule,
    opts: &SolverOptions,
) -> Result<GapProfile, SpectralError> {
    schedule.validate()?;
    let mut gaps = Vec::with_capacity(schedule.grid.len());
    let mut degenerate = false;
    let mut method = SolverMethod::Diagonal;
    for &s in &schedule.grid {
        let (g, d, m) = gap_at(system, s, opts)?;
        gaps.push(g);
        degenerate |= d;
        if m != SolverMethod::Diagonal {
            method = m;
        }
    }
    let imin = (0..gaps.len()).fold(0, |b, i| if gaps[i] < gaps[b] { i } else { b });
    let mut min_gap = gaps[imin];
    let mut s_at_min = schedule.grid[imin];
    let mut refined = Vec::new();

    if schedule.refine && min_gap > 0.0 {
        let grid = &schedule.grid;
        let (mut a, mut b) = (
            grid[imin.saturating_sub(1)],
            grid[(imin + 1).min(grid.len() - 1)],
        );
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        let f1 = gap_at(system, x1, opts)?.0;
        let f2 = gap_at(system, x2, opts)?.0;
        refined.push((x1, f1));
        refined.push((x2, f2));
        let x3 = if f1 < f2 {
            b = x2;
            b - phi * (b - a)
        } else {
            a = x1;
            a + phi * (b - a)
        };
        refined.push((x3, gap_at(system, x3, opts)?.0));
        for &(s, g) in &refined {
            if g < min_gap {
                min_gap = g;
                s_at_min = s;
            }
        }
        degenerate |= min_gap == 0.0;
    }

    Ok(GapProfile {
        s: schedule.grid.clone(),
        gaps,
        min_gap,
        s_at_min,
        degenerate,
        refined,
        method,
    })
}
