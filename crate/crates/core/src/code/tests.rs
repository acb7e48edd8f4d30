use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::gf2::SupportVector;

fn pair(code: &ParityCode, i: u32, j: u32) -> usize {
    code.spin_index(&SpinId::pair(i, j)).unwrap()
}

fn pairs(code: &ParityCode, v: &SupportVector) -> Vec<(u32, u32)> {
    v.iter_ones()
        .map(|i| match &code.spins()[i] {
            SpinId::Pair(a, b) => (*a, *b),
            other => panic!("unexpected id {other}"),
        })
        .collect()
}

/// All z-configurations (±1 per spin) that satisfy every stabiliser.
fn satisfying_configs(layout: &CodeLayout) -> Vec<Vec<i8>> {
    let n = layout.n_spins();
    assert!(n <= 16);
    (0u32..(1 << n))
        .map(|bits| {
            (0..n)
                .map(|i| if bits >> i & 1 == 1 { -1 } else { 1 })
                .collect::<Vec<i8>>()
        })
        .filter(|z| {
            layout
                .stabilisers
                .iter()
                .all(|s| Sign::of_product(s.support.iter_ones().map(|i| z[i])) == s.nu)
        })
        .collect()
}

/// Brute-force label: the unique (subset, sign) such that
/// `z_p = μ Π_{k∈L} z_{logical k}` on every satisfying configuration.
fn brute_force_labels(layout: &CodeLayout) -> Vec<SpinLabel> {
    let configs = satisfying_configs(layout);
    let n_log = layout.n_logical;
    (0..layout.n_spins())
        .map(|p| {
            let mut found = Vec::new();
            for mask in 0u32..(1 << n_log) {
                for mu in [Sign::Plus, Sign::Minus] {
                    let ok = configs.iter().all(|z| {
                        let prod = Sign::of_product(
                            (0..n_log)
                                .filter(|k| mask >> k & 1 == 1)
                                .map(|k| z[layout.logical_z[k]]),
                        );
                        Sign::of_product([z[p]]) == mu * prod
                    });
                    if ok {
                        found.push(SpinLabel {
                            logicals: (0..n_log)
                                .filter(|k| mask >> k & 1 == 1)
                                .map(|k| k + 1)
                                .collect(),
                            mu,
                        });
                    }
                }
            }
            assert_eq!(found.len(), 1, "spin {p} has no unique brute-force label");
            found.pop().unwrap()
        })
        .collect()
}

/// Exhaustive search for minimal-weight logical X supports.
fn brute_force_logical_x(layout: &CodeLayout, k: usize) -> Vec<SupportVector> {
    let n = layout.n_spins();
    let mut sols: Vec<SupportVector> = (0u32..(1 << n))
        .map(|bits| {
            SupportVector::from_bools(&(0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>())
        })
        .filter(|x| {
            layout
                .logical_z
                .iter()
                .enumerate()
                .all(|(k2, &z)| x.get(z) == (k2 + 1 == k))
                && layout
                    .stabilisers
                    .iter()
                    .all(|s| !x.overlap_parity(&s.support).unwrap())
        })
        .collect();
    let w = sols.iter().map(|s| s.weight()).min().unwrap();
    sols.retain(|s| s.weight() == w);
    sols
}

fn block_mu(nu: &BTreeMap<(usize, usize), Sign>, i: usize, j: usize) -> Sign {
    (0..i)
        .flat_map(|ip| ((i + 1)..=j).map(move |jp| (ip, jp)))
        .map(|f| nu[&f])
        .product()
}

#[test]
fn square_lattice_counts() {
    for n in 2..=7 {
        let code = build_square_lattice(n, &NuPolicy::AllEven).unwrap();
        assert_eq!(code.n_spins(), n * (n + 1) / 2);
        assert_eq!(code.stabilisers().len(), n * (n - 1) / 2);
    }
    let code = build_square_lattice(5, &NuPolicy::AllEven).unwrap();
    assert_eq!(code.stabilisers()[0].face_id, "[0,5]");
    assert!(matches!(
        build_square_lattice(1, &NuPolicy::AllEven),
        Err(CodeError::InvalidParameter(_))
    ));
}

#[test]
fn square_lattice_logical_x_is_row_and_column() {
    let code = build_square_lattice(5, &NuPolicy::AllEven).unwrap();
    assert_eq!(
        pairs(&code, code.logical_x(3)),
        vec![(0, 3), (1, 3), (2, 3), (3, 4), (3, 5)]
    );
    for k in 1..=5u32 {
        let mut expected: Vec<(u32, u32)> = (0..k)
            .map(|i| (i, k))
            .chain((k + 1..=5).map(|j| (k, j)))
            .collect();
        expected.sort();
        let mut got = pairs(&code, code.logical_x(k as usize));
        got.sort();
        assert_eq!(got, expected);
    }
}

#[test]
fn logical_x_commutes_with_every_face() {
    let code = build_square_lattice(5, &NuPolicy::AllOdd).unwrap();
    let x3 = code.logical_x(3);
    for s in code.stabilisers() {
        assert!(
            crate::gf2::commutes(x3, &s.support).unwrap(),
            "{}",
            s.face_id
        );
    }
}

#[test]
fn two_logical_square_x_matches_exhaustive_search() {
    let code = build_square_lattice(2, &NuPolicy::AllEven).unwrap();
    let brute = brute_force_logical_x(code.layout(), 1);
    assert_eq!(brute.len(), 1);
    assert_eq!(code.logical_x(1), &brute[0]);
    assert_eq!(pairs(&code, code.logical_x(1)), vec![(0, 1), (1, 2)]);
}

#[test]
fn even_lattice_has_all_plus_mu() {
    let code = build_square_lattice(5, &NuPolicy::AllEven).unwrap();
    assert!(code.labels().iter().all(|l| l.mu == Sign::Plus));
    let l = code.label(pair(&code, 2, 4));
    assert_eq!(l.logicals, vec![2, 4]);
}

#[test]
fn odd_lattice_mu_rule() {
    let code = build_square_lattice(5, &NuPolicy::AllOdd).unwrap();
    assert_eq!(code.label(pair(&code, 1, 2)).mu, Sign::Minus);
    assert_eq!(code.label(pair(&code, 2, 4)).mu, Sign::Plus);
    for n in 2..=6usize {
        let code = build_square_lattice(n, &NuPolicy::AllOdd).unwrap();
        for i in 1..n {
            for j in (i + 1)..=n {
                let expected = Sign::from_parity((i * (j - i)) % 2 == 1);
                assert_eq!(
                    code.label(pair(&code, i as u32, j as u32)).mu,
                    expected,
                    "({i},{j})"
                );
            }
        }
    }
}

#[test]
fn vertex_spins_label_themselves() {
    let code = build_square_lattice(4, &NuPolicy::AllOdd).unwrap();
    for k in 1..=4 {
        let l = code.label(code.logical_z()[k - 1]);
        assert_eq!(l.logicals, vec![k]);
        assert_eq!(l.mu, Sign::Plus);
    }
}

#[test]
fn gf2_mu_equals_block_product_for_random_nu() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 3..=5usize {
        let template = build_square_lattice(n, &NuPolicy::AllEven).unwrap();
        for _ in 0..100 {
            let mut nu = BTreeMap::new();
            let mut by_face = BTreeMap::new();
            for i in 0..n {
                for j in (i + 2)..=n {
                    let s = if rng.gen::<bool>() {
                        Sign::Minus
                    } else {
                        Sign::Plus
                    };
                    nu.insert((i, j), s);
                    by_face.insert(format!("[{i},{j}]"), s);
                }
            }
            let code = build_square_lattice(n, &NuPolicy::PerFace(by_face)).unwrap();
            assert_eq!(code.spins(), template.spins());
            for i in 1..n {
                for j in (i + 1)..=n {
                    let l = code.label(pair(&code, i as u32, j as u32));
                    assert_eq!(l.logicals, vec![i, j]);
                    assert_eq!(l.mu, block_mu(&nu, i, j));
                }
            }
        }
    }
}

#[test]
fn labels_match_brute_force_on_builtins() {
    for code in [
        build_square_lattice(3, &NuPolicy::AllOdd).unwrap(),
        build_square_lattice(4, &NuPolicy::AllOdd).unwrap(),
        build_triangular_lattice(3, &NuPolicy::AllOdd).unwrap(),
        build_triangular_lattice(4, &NuPolicy::AllEven).unwrap(),
        build_tree_code(
            &adjacency_from_edges(4, &[(1, 2), (1, 3), (1, 4)]),
            &NuPolicy::AllOdd,
        )
        .unwrap(),
    ] {
        assert_eq!(code.labels(), brute_force_labels(code.layout()).as_slice());
    }
}

#[test]
fn unknown_face_in_policy_rejected() {
    let mut m = BTreeMap::new();
    m.insert("[9,9]".to_string(), Sign::Minus);
    assert!(build_square_lattice(3, &NuPolicy::PerFace(m)).is_err());
}

#[test]
fn triangular_lattice_small_cases() {
    let code = build_triangular_lattice(3, &NuPolicy::AllEven).unwrap();
    assert_eq!(code.n_spins(), 6);
    assert_eq!(code.stabilisers().len(), 3);
    assert!(code.stabilisers().iter().all(|s| s.arity() == 3));
    let brute = brute_force_labels(code.layout());
    for (a, b) in [(1, 2), (1, 3), (2, 3)] {
        let p = pair(&code, a, b);
        assert_eq!(brute[p].logicals, vec![a as usize, b as usize]);
        assert_eq!(code.label(p).logicals, brute[p].logicals);
    }

    let two = build_triangular_lattice(2, &NuPolicy::AllEven).unwrap();
    assert_eq!((two.n_spins(), two.stabilisers().len()), (3, 1));
}

#[test]
fn triangular_lattice_counts_and_verification() {
    for n in 2..=6 {
        let code = build_triangular_lattice(n, &NuPolicy::AllOdd).unwrap();
        assert_eq!(code.n_spins(), n * (n + 1) / 2);
        assert!(verify_code(code.layout()).passed());
        for i in 1..n {
            for j in (i + 1)..=n {
                assert_eq!(code.spins_with_label(&[i, j]).len(), 1);
            }
        }
    }
}

#[test]
fn three_small_triangles_multiply_to_the_corner_triangle() {
    let n = 5;
    let code = build_triangular_lattice(n, &NuPolicy::AllEven).unwrap();
    let face = |id: String| {
        code.stabilisers()
            .iter()
            .find(|s| s.face_id == id)
            .unwrap_or_else(|| panic!("{id}"))
            .support
            .clone()
    };
    for i in 1..=(n - 2) {
        // {0,i,i+1}, {0,i+1,i+2}, {i,i+1,i+2}
        let prod = face(format!("T[0,{}]", i + 1))
            .xor(&face(format!("T[0,{}]", i + 2)))
            .unwrap()
            .xor(&face(format!("T[{},{}]", i, i + 2)))
            .unwrap();
        let i = i as u32;
        let corners = SupportVector::from_indices(
            code.n_spins(),
            &[
                pair(&code, 0, i),
                pair(&code, 0, i + 2),
                pair(&code, i, i + 2),
            ],
        )
        .unwrap();
        assert_eq!(prod, corners);
    }
}

#[test]
fn tree_codes() {
    // Balanced three-tier tree: 1 -> {2,3}, 2 -> {4,5}, 3 -> {6,7}.
    let adj = adjacency_from_edges(7, &[(1, 2), (1, 3), (2, 4), (2, 5), (3, 6), (3, 7)]);
    let code = build_tree_code(&adj, &NuPolicy::AllEven).unwrap();
    assert_eq!(code.n_spins(), 13);
    assert!(verify_code(code.layout()).passed());

    let one_edge =
        build_tree_code(&adjacency_from_edges(2, &[(1, 2)]), &NuPolicy::AllEven).unwrap();
    assert_eq!((one_edge.n_spins(), one_edge.stabilisers().len()), (3, 1));

    let star = build_tree_code(
        &adjacency_from_edges(4, &[(1, 2), (1, 3), (1, 4)]),
        &NuPolicy::AllOdd,
    )
    .unwrap();
    assert_eq!(star.n_spins(), 7);
    let brute = brute_force_labels(star.layout());
    for j in 2..=4u32 {
        let p = pair(&star, 1, j);
        assert_eq!(brute[p].logicals, vec![1, j as usize]);
        assert_eq!(star.label(p).logicals, brute[p].logicals);
    }
    let x1 = brute_force_logical_x(star.layout(), 1);
    assert_eq!(x1.len(), 1);
    assert_eq!(star.logical_x(1), &x1[0]);
    assert_eq!(
        pairs(&star, star.logical_x(1)),
        vec![(0, 1), (1, 2), (1, 3), (1, 4)]
    );
}

#[test]
fn tree_size_is_two_n_minus_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 2..=20 {
        let edges: Vec<(usize, usize)> = (2..=n).map(|v| (rng.gen_range(1..v), v)).collect();
        let code = build_tree_code(&adjacency_from_edges(n, &edges), &NuPolicy::AllOdd).unwrap();
        assert_eq!(code.n_spins(), 2 * n - 1);
    }
}

#[test]
fn cyclic_graph_rejected() {
    let adj = adjacency_from_edges(3, &[(1, 2), (2, 3), (1, 3)]);
    assert!(matches!(
        build_tree_code(&adj, &NuPolicy::AllEven),
        Err(CodeError::InvalidGraph(_))
    ));
    let disconnected_cycle = adjacency_from_edges(4, &[(1, 2), (2, 3), (1, 3)]);
    assert!(matches!(
        build_tree_code(&disconnected_cycle, &NuPolicy::AllEven),
        Err(CodeError::InvalidGraph(_))
    ));
}

#[test]
fn file_round_trip_reproduces_builtin() {
    let code = build_square_lattice(4, &NuPolicy::AllOdd).unwrap();
    let json = CodeFile::from_code(&code).to_json();
    let loaded = load_custom_code(&json).unwrap();
    assert_eq!(loaded, code);
}

#[test]
fn three_spin_file_labels_third_spin() {
    for nu in [1, -1] {
        let json = format!(
            r#"{{"n_logical": 2, "spins": ["a", "b", "c"],
               "stabilisers": [{{"spins": ["a", "b", "c"], "nu": {nu}}}],
               "logical_z": ["a", "b"]}}"#
        );
        let code = load_custom_code(&json).unwrap();
        let brute = brute_force_labels(code.layout());
        assert_eq!(brute[2].logicals, vec![1, 2]);
        assert_eq!(brute[2].mu.value(), nu);
        assert_eq!(code.label(2), &brute[2]);
    }
}

#[test]
fn file_errors_are_distinct() {
    let bad_json = "{\n  \"n_logical\": 2,\n  \"spins\": [\"a\" \"b\"]\n}";
    match load_custom_code(bad_json) {
        Err(CodeError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    let count = r#"{"n_logical": 1, "spins": ["a","b","c"], "stabilisers": [{"spins":["a","b"],"nu":1}], "logical_z": ["a"]}"#;
    assert!(matches!(
        load_custom_code(count),
        Err(CodeError::CountMismatch { .. })
    ));
    let dependent = r#"{"n_logical": 1, "spins": ["a","b","c"],
        "stabilisers": [{"spins":["a","b"],"nu":1,"face":"f1"},{"spins":["a","b"],"nu":1,"face":"f2"}],
        "logical_z": ["a"]}"#;
    match load_custom_code(dependent) {
        Err(CodeError::DependentStabilisers { deficit, face }) => {
            assert_eq!(deficit, 1);
            assert_eq!(face, "f2");
        }
        other => panic!("{other:?}"),
    }
    let unknown = r#"{"n_logical": 1, "spins": ["a","b"], "stabilisers": [{"spins":["a","z"],"nu":1}], "logical_z": ["a"]}"#;
    assert!(matches!(
        load_custom_code(unknown),
        Err(CodeError::Schema { .. })
    ));
    let bad_nu = r#"{"n_logical": 1, "spins": ["a","b"], "stabilisers": [{"spins":["a","b"],"nu":2}], "logical_z": ["a"]}"#;
    assert!(matches!(
        load_custom_code(bad_nu),
        Err(CodeError::Parse { .. })
    ));
    // Logical Z on a spin already fixed by the stabilisers.
    let dep_logical = r#"{"n_logical": 1, "spins": ["a","b"], "stabilisers": [{"spins":["a"],"nu":1}], "logical_z": ["a"]}"#;
    assert!(matches!(
        load_custom_code(dep_logical),
        Err(CodeError::DependentLogical { .. })
    ));
}

#[test]
fn verify_reports_failures() {
    let code = build_square_lattice(4, &NuPolicy::AllEven).unwrap();
    let report = verify_code(code.layout());
    assert!(report.passed(), "{report:?}");

    let mut dup = code.layout().clone();
    dup.stabilisers[1] = dup.stabilisers[0].clone();
    let report = verify_code(&dup);
    assert!(!report.check("stabiliser-independence").unwrap().passed);
    assert_eq!(report.rank_deficit, 1);
    assert!(report.check("stabiliser-count").unwrap().passed);

    let mut short = code.layout().clone();
    short.stabilisers.pop();
    let report = verify_code(&short);
    assert!(!report.check("stabiliser-count").unwrap().passed);
}

#[test]
fn multibody_spins_follow_the_label_product() {
    let code = build_square_lattice(6, &NuPolicy::AllOdd).unwrap();
    let (i, j) = (2u32, 4u32);

    // Case I: (i,j), (i+1,j+1)
    let c1 = code
        .add_multibody_spin(
            SpinId::Named("m1".into()),
            &[pair(&code, i, j), pair(&code, i + 1, j + 1)],
            &[2, 3, 4, 5],
            Sign::Minus,
        )
        .unwrap();
    let new = c1.n_spins() - 1;
    assert_eq!(c1.label(new).logicals, vec![2, 3, 4, 5]);
    assert!(verify_code(c1.layout()).passed());
    assert_eq!(c1.labels(), labels_satisfy_stabilisers(&c1).as_slice());

    // Case II: (i-1,j-1), (i,j), (i-1,j+1) -> {i, j-1, j, j+1}
    let c2 = code
        .add_multibody_spin(
            SpinId::Named("m2".into()),
            &[
                pair(&code, i - 1, j - 1),
                pair(&code, i, j),
                pair(&code, i - 1, j + 1),
            ],
            &[2, 3, 4, 5],
            Sign::Plus,
        )
        .unwrap();
    assert_eq!(c2.label(c2.n_spins() - 1).logicals, vec![2, 3, 4, 5]);

    // Case III: (i-1,j-1), (i,j), (i+1,j+1) -> six-body; needs j-1 != i+1.
    let (a, b) = (2u32, 5u32);
    let c3 = code
        .add_multibody_spin(
            SpinId::Named("m3".into()),
            &[
                pair(&code, a - 1, b - 1),
                pair(&code, a, b),
                pair(&code, a + 1, b + 1),
            ],
            &[1, 2, 3, 4, 5, 6],
            Sign::Minus,
        )
        .unwrap();
    assert_eq!(c3.label(c3.n_spins() - 1).logicals, vec![1, 2, 3, 4, 5, 6]);

    // Sign: mu_new = nu * prod(mu of locality)
    let loc = [pair(&code, i, j), pair(&code, i + 1, j + 1)];
    let expected: Sign = Sign::Minus * code.label(loc[0]).mu * code.label(loc[1]).mu;
    assert_eq!(c1.label(new).mu, expected);

    match code.add_multibody_spin(SpinId::Named("bad".into()), &loc, &[2, 4], Sign::Plus) {
        Err(CodeError::Inexpressible { residual, .. }) => assert_eq!(residual, vec![3, 5]),
        other => panic!("{other:?}"),
    }

    // A target equal to an existing label is a permitted duplicate.
    let dup = code
        .add_multibody_spin(
            SpinId::Named("d".into()),
            &[pair(&code, 2, 3)],
            &[2, 3],
            Sign::Plus,
        )
        .unwrap();
    assert_eq!(dup.spins_with_label(&[2, 3]).len(), 2);
    assert_eq!(dup.duplicate_labels(), vec![vec![2, 3]]);
}

/// Every logical assignment, pushed through the labels, must satisfy every
/// stabiliser. Checks labels of codes too large to enumerate.
fn labels_satisfy_stabilisers(code: &ParityCode) -> Vec<SpinLabel> {
    let n_log = code.n_logical();
    for mask in 0u32..(1 << n_log) {
        let logical: Vec<i8> = (0..n_log)
            .map(|k| if mask >> k & 1 == 1 { -1 } else { 1 })
            .collect();
        let z: Vec<i8> = code
            .labels()
            .iter()
            .map(|l| l.mu.value() * l.logicals.iter().map(|&k| logical[k - 1]).product::<i8>())
            .collect();
        assert!(code.syndrome(&z).unwrap().violated.is_empty());
    }
    code.labels().to_vec()
}

#[test]
fn syndrome_examples() {
    let code = build_square_lattice(4, &NuPolicy::AllEven).unwrap();
    let all_up = vec![1i8; code.n_spins()];
    let r = code.syndrome(&all_up).unwrap();
    assert!(r.violated.is_empty());
    assert_eq!(r.satisfied_count, 6);

    // Interior spin (1,3) sits on up to four faces.
    let p = pair(&code, 1, 3);
    let mut flipped = all_up.clone();
    flipped[p] = -1;
    let incident: Vec<String> = code
        .stabilisers()
        .iter()
        .filter(|s| s.support.get(p))
        .map(|s| s.face_id.clone())
        .collect();
    assert!(incident.len() <= 4 && incident.len() >= 2);
    let r = code.syndrome(&flipped).unwrap();
    assert_eq!(r.violated, incident);
    assert_eq!(r.violated.len() + r.satisfied_count, 6);

    let odd = build_square_lattice(3, &NuPolicy::AllOdd).unwrap();
    let r = odd.syndrome(&vec![1; odd.n_spins()]).unwrap();
    assert_eq!(r.violated.len(), 3);

    assert!(odd.syndrome(&[1, 1]).is_err());
}

#[test]
fn syndrome_is_empty_exactly_on_satisfying_configs() {
    let code = build_triangular_lattice(
        4,
        &NuPolicy::PerFace(
            [
                ("T[0,2]".to_string(), Sign::Minus),
                ("T[1,4]".to_string(), Sign::Minus),
            ]
            .into(),
        ),
    )
    .unwrap();
    let satisfying = satisfying_configs(code.layout());
    assert_eq!(satisfying.len(), 1 << 4);
    let n = code.n_spins();
    for bits in 0u32..(1 << n) {
        let z: Vec<i8> = (0..n)
            .map(|i| if bits >> i & 1 == 1 { -1 } else { 1 })
            .collect();
        let empty = code.syndrome(&z).unwrap().violated.is_empty();
        assert_eq!(empty, satisfying.contains(&z));
    }
}

/// Random valid layouts: independent random stabilisers, then logical Z
/// spins chosen greedily to complete the rank.
fn random_layout(rng: &mut ChaCha8Rng) -> Option<CodeLayout> {
    let n = rng.gen_range(3..=12usize);
    let n_stab = rng.gen_range(1..n);
    let mut rows: Vec<SupportVector> = Vec::new();
    let mut attempts = 0;
    while rows.len() < n_stab {
        attempts += 1;
        if attempts > 200 {
            return None;
        }
        let w = rng.gen_range(1..=n.min(5));
        let mut idx: Vec<usize> = (0..n).collect();
        for k in 0..w {
            let r = rng.gen_range(k..n);
            idx.swap(k, r);
        }
        let cand = SupportVector::from_indices(n, &idx[..w]).unwrap();
        let mut trial = rows.clone();
        trial.push(cand);
        if crate::gf2::Gf2Matrix::new(trial.clone(), n).unwrap().rank() == trial.len() {
            rows = trial;
        }
    }
    let mut logical_z = Vec::new();
    let mut basis = rows.clone();
    for p in 0..n {
        let mut trial = basis.clone();
        trial.push(SupportVector::unit(n, p));
        if crate::gf2::Gf2Matrix::new(trial.clone(), n).unwrap().rank() == trial.len() {
            basis = trial;
            logical_z.push(p);
        }
    }
    let stabilisers = rows
        .into_iter()
        .enumerate()
        .map(|(k, support)| Stabiliser {
            support,
            nu: if rng.gen::<bool>() {
                Sign::Minus
            } else {
                Sign::Plus
            },
            face_id: format!("S{k}"),
        })
        .collect();
    Some(CodeLayout {
        n_logical: logical_z.len(),
        spins: (0..n).map(|i| SpinId::Named(format!("s{i}"))).collect(),
        stabilisers,
        logical_z,
    })
}

#[test]
fn random_codes_label_methods_agree_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut tested = 0;
    while tested < 60 {
        let Some(layout) = random_layout(&mut rng) else {
            continue;
        };
        let code = ParityCode::from_layout(layout.clone()).unwrap();
        assert!(verify_code(&layout).passed());
        assert_eq!(code.labels(), brute_force_labels(&layout).as_slice());
        for k in 1..=code.n_logical() {
            let brute = brute_force_logical_x(&layout, k);
            assert!(brute.contains(code.logical_x(k)));
            // Canonical choice is the lexicographically first minimal one.
            let first = brute.iter().min_by(|a, b| a.cmp_lex(b)).unwrap();
            assert_eq!(code.logical_x(k), first);
        }
        tested += 1;
    }
}
