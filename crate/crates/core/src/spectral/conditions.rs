//! Checks of the four sufficient conditions on a compiled program.
//!
//! `P0` is the set of basis states in which every constraint group sits at
//! its ground energy; the final Hamiltonian is diagonal, so every projector
//! and commutator reduces to exact per-basis-state checks.
//!
//! For (iii) the controlled-flip unitaries are built generically: for each
//! group and each face configuration, the ancilla states that are ground
//! states are permuted onto the first `d` ancilla states (complement kept in
//! order). `V_k = W`, `U_k = W†`. This needs the same `d` on every satisfying
//! face configuration; otherwise the check is reported as unavailable.

use serde::{Deserialize, Serialize};

use super::{
    assemble, brute_force_logical_ground, lowest_eigs, AssembledOperator, Driver, SolverOptions,
    SpectralError, SpinSystem,
};
use crate::basis::{digits, z_value};
use crate::gadgets::{ground_table, to_f64, PhysicalProgram};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionsReport {
    pub dimension: usize,
    pub p0_dimension: usize,
    /// `p0_dimension / 2^N` when it divides exactly.
    pub d: Option<usize>,
    /// max |[P0, H_phys]| entry.
    pub commutator_residual_i: f64,
    /// max |S - ν| over P0 states and stabilisers.
    pub parity_residual_ii: f64,
    /// max |z_p - μ_p Π z_(logical)| over P0 states and spins.
    pub mu_residual_ii: f64,
    /// max |[P0, U_k X_k V_k]| entry, over k; `None` when unavailable.
    pub flip_unitary_residual_iii: Option<f64>,
    /// max |[U_k, Z_k']| entry.
    pub flip_z_residual_iii: Option<f64>,
    pub flip_unitary_note: Option<String>,
    pub e0: f64,
    pub e_g: f64,
    /// Lowest energy outside P0 (`inf` if P0 is everything).
    pub e_prime_g: f64,
    /// `E'_g - (E0 + E_g)`.
    pub gap_margin_iv: f64,
    /// max deviation of the P0 spectrum from `E0 + logical spectrum`, each
    /// level repeated D times.
    pub p0_spectrum_residual: f64,
    /// Same comparison against the lowest `2^N·D` eigenvalues of the whole
    /// program.
    pub spectrum_residual: f64,
}

impl ConditionsReport {
    pub const RESIDUAL_TOL: f64 = 1e-9;
    pub const SPECTRUM_TOL: f64 = 1e-8;

    pub fn passed(&self) -> bool {
        let tol = Self::RESIDUAL_TOL;
        self.d.is_some()
            && self.commutator_residual_i <= tol
            && self.parity_residual_ii <= tol
            && self.mu_residual_ii <= tol
            && self.flip_unitary_residual_iii.is_some_and(|r| r <= tol)
            && self.flip_z_residual_iii.is_some_and(|r| r <= tol)
            && self.gap_margin_iv > 0.0
            && self.p0_spectrum_residual <= Self::SPECTRUM_TOL
            && self.spectrum_residual <= Self::SPECTRUM_TOL
    }
}

/// Site-level view of each group used by the checks.
struct GroupIndex {
    sites: Vec<usize>,
    dims: Vec<usize>,
    arity: usize,
    ground: Vec<bool>,
}

impl GroupIndex {
    fn local(&self, idx: usize, strides: &[usize], all_dims: &[usize]) -> usize {
        let mut local = 0;
        let mut mult = 1;
        for (&s, &d) in self.sites.iter().zip(&self.dims) {
            local += ((idx / strides[s]) % all_dims[s]) * mult;
            mult *= d;
        }
        local
    }

    fn face_states(&self) -> usize {
        1 << self.arity
    }
}

fn group_index(program: &PhysicalProgram) -> Vec<GroupIndex> {
    program
        .groups
        .iter()
        .map(|g| GroupIndex {
            sites: g.sites.clone(),
            dims: g.gadget.local_dims(),
            arity: g.gadget.arity,
            ground: ground_table(&g.gadget),
        })
        .collect()
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(dims.len());
    let mut acc = 1;
    for &d in dims {
        out.push(acc);
        acc *= d;
    }
    out
}

/// `true` for basis states in which every constraint group is at its ground.
pub(crate) fn ground_mask(
    program: &PhysicalProgram,
    cap: usize,
) -> Result<Vec<bool>, SpectralError> {
    let dims = program.site_dims();
    let total = program.total_dimension();
    if total > cap as u128 {
        return Err(SpectralError::DimensionTooLarge { dim: total, cap });
    }
    let st = strides(&dims);
    let groups = group_index(program);
    Ok((0..total as usize)
        .map(|idx| groups.iter().all(|g| g.ground[g.local(idx, &st, &dims)]))
        .collect())
}

/// Ground energy of the constraint Hamiltonian: the sum of group minima.
pub(crate) fn constraint_ground_energy(program: &PhysicalProgram) -> f64 {
    program
        .groups
        .iter()
        .map(|g| {
            program.delta
                * to_f64(
                    g.gadget
                        .energy_table()
                        .into_iter()
                        .min()
                        .unwrap_or_default(),
                )
        })
        .sum()
}

/// max over entries of `|[P, H]|` for a diagonal projector `mask`.
pub fn projector_commutator(op: &AssembledOperator, mask: &[bool]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..op.dim() {
        op.for_each_offdiagonal(i, |j, v| {
            if mask[i] != mask[j] {
                worst = worst.max(v.abs());
            }
        });
    }
    worst
}

/// Runs the four checks and the spectrum comparison at `s = 1`.
pub fn check_conditions(
    program: &PhysicalProgram,
    opts: &SolverOptions,
) -> Result<ConditionsReport, SpectralError> {
    let total = program.total_dimension();
    if total > opts.dense_max as u128 {
        return Err(SpectralError::ConditionsTooLarge {
            dim: total,
            cap: opts.dense_max,
        });
    }
    let dim = total as usize;
    let code = &program.code;
    let n = code.n_logical();
    let dims = program.site_dims();
    let st = strides(&dims);
    let mask = ground_mask(program, opts.max_dim)?;
    let p0_dimension = mask.iter().filter(|&&m| m).count();
    let d = (p0_dimension % (1 << n) == 0 && p0_dimension > 0).then_some(p0_dimension >> n);

    let system =
        SpinSystem::from_program(program, &Driver::default()).prepare(&Driver::default(), opts)?;
    let op = assemble(&system, 1.0)?;
    let diag = op.diagonal_entries();

    // (i)
    let commutator_residual_i = projector_commutator(&op, &mask);

    // (ii)
    let z_of = |idx: usize, site: usize| z_value(dims[site], (idx / st[site]) % dims[site]);
    let mut parity_residual_ii: f64 = 0.0;
    let mut mu_residual_ii: f64 = 0.0;
    for idx in (0..dim).filter(|&i| mask[i]) {
        for s in code.stabilisers() {
            let p: i64 = s.spins().iter().map(|&q| z_of(idx, q)).product();
            parity_residual_ii = parity_residual_ii.max((p - i64::from(s.nu.value())).abs() as f64);
        }
        for (q, label) in code.labels().iter().enumerate() {
            let logical: i64 = label
                .logicals
                .iter()
                .map(|&k| z_of(idx, code.logical_z()[k - 1]))
                .product();
            let expect = i64::from(label.mu.value()) * logical;
            mu_residual_ii = mu_residual_ii.max((z_of(idx, q) - expect).abs() as f64);
        }
    }

    // (iii)
    let (flip_unitary_residual_iii, flip_z_residual_iii, flip_unitary_note) =
        match flip_check(program, &mask, &dims, &st) {
            Ok((a, b)) => (Some(a), Some(b), None),
            Err(note) => (None, None, Some(note)),
        };

    // (iv) and the spectrum
    let e0 = constraint_ground_energy(program);
    let (_, e_g) = brute_force_logical_ground(&program.model)?;
    let e_prime_g = (0..dim)
        .filter(|&i| !mask[i])
        .map(|i| diag[i])
        .fold(f64::INFINITY, f64::min);
    let gap_margin_iv = e_prime_g - (e0 + e_g);

    let mut logical_levels = logical_spectrum(program);
    logical_levels.sort_by(|a, b| a.total_cmp(b));
    let expected: Vec<f64> = logical_levels
        .iter()
        .flat_map(|&e| std::iter::repeat_n(e0 + e, d.unwrap_or(1)))
        .collect();
    let mut p0_levels: Vec<f64> = (0..dim).filter(|&i| mask[i]).map(|i| diag[i]).collect();
    p0_levels.sort_by(|a, b| a.total_cmp(b));
    let p0_spectrum_residual = compare_levels(&p0_levels, &expected);
    let spectrum_residual = if expected.len() <= dim {
        let spec = lowest_eigs(&op, expected.len(), opts)?;
        compare_levels(&spec.eigenvalues, &expected)
    } else {
        f64::INFINITY
    };

    Ok(ConditionsReport {
        dimension: dim,
        p0_dimension,
        d,
        commutator_residual_i,
        parity_residual_ii,
        mu_residual_ii,
        flip_unitary_residual_iii,
        flip_z_residual_iii,
        flip_unitary_note,
        e0,
        e_g,
        e_prime_g,
        gap_margin_iv,
        p0_spectrum_residual,
        spectrum_residual,
    })
}

fn compare_levels(got: &[f64], expected: &[f64]) -> f64 {
    if got.len() != expected.len() {
        return f64::INFINITY;
    }
    got.iter()
        .zip(expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn logical_spectrum(program: &PhysicalProgram) -> Vec<f64> {
    let n = program.model.n();
    (0..1usize << n)
        .map(|c| {
            let z: Vec<i8> = (0..n)
                .map(|k| if (c >> k) & 1 == 0 { 1 } else { -1 })
                .collect();
            program.model.energy(&z)
        })
        .collect()
}

/// Per group and face configuration: ancilla permutation and its inverse.
struct FlipTable {
    perm: Vec<Vec<usize>>,
    inverse: Vec<Vec<usize>>,
}

fn flip_tables(groups: &[GroupIndex]) -> Result<Vec<FlipTable>, String> {
    let mut out = Vec::with_capacity(groups.len());
    for (gi, g) in groups.iter().enumerate() {
        let faces = g.face_states();
        let anc_states = g.ground.len() / faces;
        let mut d_seen: Option<usize> = None;
        let mut perm = Vec::with_capacity(faces);
        let mut inverse = Vec::with_capacity(faces);
        for f in 0..faces {
            let ground: Vec<usize> = (0..anc_states)
                .filter(|&a| g.ground[f + a * faces])
                .collect();
            if !ground.is_empty() {
                match d_seen {
                    None => d_seen = Some(ground.len()),
                    Some(d) if d != ground.len() => {
                        return Err(format!(
                            "group {gi}: ground multiplicity varies across face configurations ({d} vs {})",
                            ground.len()
                        ))
                    }
                    _ => {}
                }
            }
            let rest = (0..anc_states).filter(|&a| !g.ground[f + a * faces]);
            let order: Vec<usize> = ground.iter().copied().chain(rest).collect();
            let mut p = vec![0; anc_states];
            for (new, &old) in order.iter().enumerate() {
                p[old] = new;
            }
            perm.push(p);
            inverse.push(order);
        }
        out.push(FlipTable { perm, inverse });
    }
    Ok(out)
}

/// Applies the face-controlled ancilla permutation of every group.
fn apply_flip(
    idx: usize,
    groups: &[GroupIndex],
    tables: &[&[Vec<usize>]],
    dims: &[usize],
    st: &[usize],
) -> usize {
    let mut out = idx;
    for (g, table) in groups.iter().zip(tables) {
        let local = g.local(idx, st, dims);
        let faces = g.face_states();
        let (face, anc) = (local % faces, local / faces);
        let new_anc = table[face][anc];
        let old = digits(anc, &g.dims[g.arity..]);
        let new = digits(new_anc, &g.dims[g.arity..]);
        for ((&site, o), n) in g.sites[g.arity..].iter().zip(old).zip(new) {
            out = out + n * st[site] - o * st[site];
        }
    }
    out
}

fn flip_check(
    program: &PhysicalProgram,
    mask: &[bool],
    dims: &[usize],
    st: &[usize],
) -> Result<(f64, f64), String> {
    let groups = group_index(program);
    let tables = flip_tables(&groups)?;
    let forward: Vec<&[Vec<usize>]> = tables.iter().map(|t| t.perm.as_slice()).collect();
    let backward: Vec<&[Vec<usize>]> = tables.iter().map(|t| t.inverse.as_slice()).collect();
    let code = &program.code;
    let n_phys = code.n_spins();
    let mut p0_residual: f64 = 0.0;
    let mut z_residual: f64 = 0.0;
    for idx in 0..mask.len() {
        let w = apply_flip(idx, &groups, &forward, dims, st);
        let phys = |i: usize| (0..n_phys).map(move |q| (i / st[q]) % dims[q]);
        if !phys(idx).eq(phys(w)) {
            z_residual = z_residual.max(2.0);
        }
        for k in 1..=code.n_logical() {
            let mut x = w;
            for q in code.logical_x(k).iter_ones() {
                let digit = (x / st[q]) % 2;
                x = if digit == 0 { x + st[q] } else { x - st[q] };
            }
            let back = apply_flip(x, &groups, &backward, dims, st);
            if mask[idx] != mask[back] {
                p0_residual = p0_residual.max(1.0);
            }
        }
    }
    Ok((p0_residual, z_residual))
}
