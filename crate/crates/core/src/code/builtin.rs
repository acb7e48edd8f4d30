//! Built-in layouts: the square-cell lattice, its three-spin triangulation,
//! and tree codes.

use std::collections::{BTreeMap, BTreeSet};

use super::{CodeError, CodeLayout, ParityCode, SpinId, Stabiliser};
use crate::gf2::SupportVector;
use crate::sign::Sign;

/// How stabiliser eigenvalues are assigned.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum NuPolicy {
    #[default]
    AllEven,
    AllOdd,
    /// Keyed by face id; faces not listed get +1.
    PerFace(BTreeMap<String, Sign>),
}

impl NuPolicy {
    fn nu_for(&self, face: &str) -> Sign {
        match self {
            NuPolicy::AllEven => Sign::Plus,
            NuPolicy::AllOdd => Sign::Minus,
            NuPolicy::PerFace(m) => m.get(face).copied().unwrap_or(Sign::Plus),
        }
    }

    fn check_keys<'a>(&self, faces: impl Iterator<Item = &'a str>) -> Result<(), CodeError> {
        if let NuPolicy::PerFace(m) = self {
            let known: BTreeSet<&str> = faces.collect();
            if let Some(unknown) = m.keys().find(|k| !known.contains(k.as_str())) {
                return Err(CodeError::InvalidParameter(format!(
                    "unknown face id {unknown}"
                )));
            }
        }
        Ok(())
    }
}

/// Spins `(i, j)` for `0 <= i < j <= n`, vertex spins `(0, k)` first.
fn pair_spins(n: usize) -> (Vec<SpinId>, BTreeMap<(usize, usize), usize>) {
    let mut spins = Vec::with_capacity(n * (n + 1) / 2);
    let mut index = BTreeMap::new();
    for i in 0..n {
        for j in (i + 1)..=n {
            index.insert((i, j), spins.len());
            spins.push(SpinId::pair(i as u32, j as u32));
        }
    }
    (spins, index)
}

fn assemble(
    n_logical: usize,
    spins: Vec<SpinId>,
    index: &BTreeMap<(usize, usize), usize>,
    faces: Vec<(String, Vec<(usize, usize)>)>,
    nu_policy: &NuPolicy,
) -> Result<ParityCode, CodeError> {
    nu_policy.check_keys(faces.iter().map(|(f, _)| f.as_str()))?;
    let n = spins.len();
    let stabilisers = faces
        .into_iter()
        .map(|(face_id, members)| {
            let idx: Vec<usize> = members.iter().map(|p| index[p]).collect();
            Ok(Stabiliser {
                support: SupportVector::from_indices(n, &idx)?,
                nu: nu_policy.nu_for(&face_id),
                face_id,
            })
        })
        .collect::<Result<Vec<_>, CodeError>>()?;
    let logical_z = (1..=n_logical).map(|k| index[&(0, k)]).collect();
    ParityCode::from_layout(CodeLayout {
        n_logical,
        spins,
        stabilisers,
        logical_z,
    })
}

/// The square-cell lattice of `N(N+1)/2` spins with `N(N-1)/2` faces.
///
/// Face `[i,j]` is named after its top spin and covers `(i,j)`, `(i,j-1)`,
/// `(i+1,j)`, `(i+1,j-1)`; along the base (`j = i+2`) the last spin does not
/// exist and the face is a triangle. Faces are listed top to bottom, then
/// left to right.
pub fn build_square_lattice(
    n_logical: usize,
    nu_policy: &NuPolicy,
) -> Result<ParityCode, CodeError> {
    if n_logical < 2 {
        return Err(CodeError::InvalidParameter(format!(
            "square lattice needs at least 2 logicals, got {n_logical}"
        )));
    }
    let n = n_logical;
    let (spins, index) = pair_spins(n);
    let mut faces = Vec::new();
    for height in (2..=n).rev() {
        for i in 0..=(n - height) {
            let j = i + height;
            let mut members = vec![(i, j), (i, j - 1), (i + 1, j)];
            if i + 2 < j {
                members.push((i + 1, j - 1));
            }
            faces.push((format!("[{i},{j}]"), members));
        }
    }
    assemble(n, spins, &index, faces, nu_policy)
}

/// All-to-all layout on the same `N(N+1)/2` spins using only three-spin
/// stabilisers.
///
/// Each square face `[a,b]` of the square lattice is the product of the two
/// triangles `{(a,b-1), (a,b), (b-1,b)}` and `{(a+1,b-1), (a+1,b), (b-1,b)}`
/// sharing the base spin `(b-1,b)`. The stabiliser set is every triangle
/// `T[a,b]` of the first kind, `0 <= a <= b-2`; it includes the vertex
/// triangles `{(0,b-1), (0,b), (b-1,b)}`.
pub fn build_triangular_lattice(
    n_logical: usize,
    nu_policy: &NuPolicy,
) -> Result<ParityCode, CodeError> {
    if n_logical < 2 {
        return Err(CodeError::InvalidParameter(format!(
            "triangular lattice needs at least 2 logicals, got {n_logical}"
        )));
    }
    let n = n_logical;
    let (spins, index) = pair_spins(n);
    let mut faces = Vec::new();
    for b in 2..=n {
        for a in 0..=(b - 2) {
            faces.push((format!("T[{a},{b}]"), vec![(a, b - 1), (a, b), (b - 1, b)]));
        }
    }
    assemble(n, spins, &index, faces, nu_policy)
}

/// Tree code: one vertex spin `(0,k)` per logical, one edge spin `(i,j)` per
/// tree edge, and one triangle `{(0,i), (0,j), (i,j)}` per edge, `2N-1`
/// spins in total.
///
/// `adjacency[k-1]` lists the (1-based) neighbours of logical `k`.
pub fn build_tree_code(
    adjacency: &[Vec<usize>],
    nu_policy: &NuPolicy,
) -> Result<ParityCode, CodeError> {
    let n = adjacency.len();
    if n == 0 {
        return Err(CodeError::InvalidGraph("empty graph".into()));
    }
    let mut edges = BTreeSet::new();
    for (v0, nbrs) in adjacency.iter().enumerate() {
        let v = v0 + 1;
        for &u in nbrs {
            if u == 0 || u > n {
                return Err(CodeError::InvalidGraph(format!(
                    "vertex {v} lists unknown neighbour {u}"
                )));
            }
            if u == v {
                return Err(CodeError::InvalidGraph(format!("self-loop on vertex {v}")));
            }
            if !adjacency[u - 1].contains(&v) {
                return Err(CodeError::InvalidGraph(format!(
                    "edge {v}-{u} is not symmetric"
                )));
            }
            edges.insert((v.min(u), v.max(u)));
        }
    }
    if edges.len() != n - 1 {
        return Err(CodeError::InvalidGraph(format!(
            "a tree on {n} vertices has {} edges, found {} (graph has a cycle or is disconnected)",
            n - 1,
            edges.len()
        )));
    }
    // n - 1 edges plus connectivity rules out cycles.
    let mut seen = vec![false; n + 1];
    let mut stack = vec![1];
    seen[1] = true;
    while let Some(v) = stack.pop() {
        for &u in &adjacency[v - 1] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    if seen[1..].iter().any(|s| !s) {
        return Err(CodeError::InvalidGraph(
            "graph contains a cycle and is disconnected".into(),
        ));
    }

    let mut spins = Vec::with_capacity(2 * n - 1);
    let mut index = BTreeMap::new();
    for k in 1..=n {
        index.insert((0, k), spins.len());
        spins.push(SpinId::pair(0, k as u32));
    }
    for &(i, j) in &edges {
        index.insert((i, j), spins.len());
        spins.push(SpinId::pair(i as u32, j as u32));
    }
    let faces = edges
        .iter()
        .map(|&(i, j)| (format!("[{i},{j}]"), vec![(0, i), (0, j), (i, j)]))
        .collect();
    assemble(n, spins, &index, faces, nu_policy)
}

/// Adjacency list of a tree from its edge list (1-based vertices).
pub fn adjacency_from_edges(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if (1..=n).contains(&a) && (1..=n).contains(&b) {
            adj[a - 1].push(b);
            adj[b - 1].push(a);
        }
    }
    adj
}
