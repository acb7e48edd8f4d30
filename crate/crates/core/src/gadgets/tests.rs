use super::*;
use crate::basis::for_each_z;
use crate::code::{adjacency_from_edges, build_square_lattice, build_tree_code, NuPolicy, SpinId};
use crate::model::LogicalModel;

fn face_sum(z: &[i64], arity: usize) -> i64 {
    z[..arity].iter().sum()
}

/// Independent evaluation of each defining square, straight from the
/// formula rather than from the stored coefficients.
fn reference_square(g: &Gadget, z: &[i64]) -> Strength {
    let m = g.arity;
    let s = face_sum(z, m);
    let anc: i64 = z[m..].iter().sum();
    let inner = match &g.kind {
        GadgetKind::EvenQutrit => 4 * anc + s + i64::from(m == 3),
        GadgetKind::OddQubit { .. } => 2 * anc + s + i64::from(m == 3),
        GadgetKind::Mbody { .. } if m % 2 == 1 => match g.target {
            Sign::Plus => s - (1 + 2 * anc),
            Sign::Minus => s + (1 + 2 * anc),
        },
        GadgetKind::Mbody { .. } => s + 2 * anc,
        GadgetKind::Formal => unreachable!(),
    };
    Strength::new(inner * inner, 4)
}

#[test]
fn expansion_matches_square_exactly() {
    let mut gadgets = vec![
        even_parity_gadget(3).unwrap(),
        even_parity_gadget(4).unwrap(),
        odd_parity_gadget(3, default_ratio(), RatioWindow::Enforce).unwrap(),
        odd_parity_gadget(4, default_ratio(), RatioWindow::Enforce).unwrap(),
    ];
    for m in 3..=8 {
        for t in [Sign::Plus, Sign::Minus] {
            gadgets.push(mbody_gadget(m, t).unwrap());
        }
    }
    for g in &gadgets {
        let form = g.squared_form.as_ref().unwrap();
        for_each_z(&g.local_dims(), |z| {
            assert_eq!(g.energy(z), form.evaluate(z));
            assert_eq!(g.energy(z), reference_square(g, z), "{:?}", g.kind);
        });
    }
}

#[test]
fn odd_gadget_is_two_body_only() {
    for arity in [3, 4] {
        let g = odd_parity_gadget(arity, Strength::new(5, 2), RatioWindow::Enforce).unwrap();
        assert!(g
            .terms
            .iter()
            .all(|t| matches!(t, GadgetTerm::TwoBody { .. } | GadgetTerm::SiteField { .. })));
    }
    let g = odd_parity_gadget(4, default_ratio(), RatioWindow::Enforce).unwrap();
    let pair_strengths: Vec<Strength> = g
        .terms
        .iter()
        .filter_map(|t| match t {
            GadgetTerm::TwoBody {
                sites: [a, b],
                strength,
            } if *a < 4 && *b < 4 => Some(*strength),
            _ => None,
        })
        .collect();
    assert_eq!(pair_strengths, vec![Strength::new(1, 2); 6]);
}

#[test]
fn formal_penalty_values() {
    for nu in [Sign::Plus, Sign::Minus] {
        let g = formal_gadget(4, nu).unwrap();
        for_each_z(&g.local_dims(), |z| {
            let parity = z.iter().product::<i64>();
            let expect = if parity == i64::from(nu.value()) {
                0
            } else {
                1
            };
            assert_eq!(g.energy(z), Strength::from_integer(expect));
        });
    }
}

#[test]
fn even_qutrit_ground_set() {
    let g = even_parity_gadget(4).unwrap();
    let gs = gadget_groundspace_oracle(&g).unwrap();
    assert_eq!(gs.min_energy, Strength::zero());
    assert!(gs.enforces(4, Sign::Plus));
    assert_eq!(gs.face_projection(4).len(), 8);
    // Sums ±4 force T = ∓1, sum 0 forces T = 0: one ground state per config.
    assert_eq!(gs.states.len(), 8);
    assert_eq!(g.energy(&[-1, -1, -1, -1, 1]), Strength::zero());
    // Odd parity (sum ±2) can never reach zero.
    let best = (0..3)
        .map(|d| g.energy(&[1, 1, 1, -1, 1 - d]))
        .min()
        .unwrap();
    assert!(best > Strength::zero());

    let tri = gadget_groundspace_oracle(&even_parity_gadget(3).unwrap()).unwrap();
    assert!(tri.enforces(3, Sign::Plus));
    assert_eq!(tri.min_energy, Strength::zero());
}

#[test]
fn odd_qubit_ground_set_and_ratio_window() {
    for r in [Strength::new(3, 2), default_ratio(), Strength::new(5, 2)] {
        for arity in [3, 4] {
            let g = odd_parity_gadget(arity, r, RatioWindow::Enforce).unwrap();
            let gs = gadget_groundspace_oracle(&g).unwrap();
            assert_eq!(gs.min_energy, Strength::zero());
            assert!(gs.enforces(arity, Sign::Minus), "r={r} arity={arity}");
            assert_eq!(gs.states.len(), 1 << (arity - 1));
            for s in &gs.states {
                let sum = face_sum(s, arity) + i64::from(arity == 3);
                assert_eq!(2 * s[arity], -sum);
            }
        }
    }
    for r in [0.9, 3.1] {
        let r = ratio_from_f64(r).unwrap();
        assert!(matches!(
            odd_parity_gadget(4, r, RatioWindow::Enforce),
            Err(GadgetError::RatioOutOfWindow(_))
        ));
        let g = odd_parity_gadget(4, r, RatioWindow::Override).unwrap();
        assert!(!gadget_groundspace_oracle(&g)
            .unwrap()
            .enforces(4, Sign::Minus));
    }
    assert_eq!(ratio_from_f64(2.5).unwrap(), Strength::new(5, 2));
    assert!(ratio_from_f64(f64::NAN).is_err());
}

#[test]
fn odd_gadget_ground_energy_example() {
    let g = odd_parity_gadget(4, default_ratio(), RatioWindow::Enforce).unwrap();
    assert_eq!(g.energy(&[1, 1, 1, -1, -1]), Strength::zero());
}

#[test]
fn mbody_ground_sets() {
    for m in 3..=8 {
        for t in [Sign::Plus, Sign::Minus] {
            let g = mbody_gadget(m, t).unwrap();
            let gs = gadget_groundspace_oracle(&g).unwrap();
            assert_eq!(gs.min_energy, Strength::zero(), "M={m} {t:?}");
            assert!(gs.enforces(m, t), "M={m} {t:?}");
        }
    }
    let sums = |m, t| {
        let gs = gadget_groundspace_oracle(&mbody_gadget(m, t).unwrap()).unwrap();
        let mut s: Vec<i64> = gs.states.iter().map(|z| face_sum(z, m)).collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    assert_eq!(sums(5, Sign::Plus), vec![-3, 1, 5]);
    assert_eq!(sums(3, Sign::Minus), vec![-3, 1]);
    assert_eq!(mbody_gadget(3, Sign::Minus).unwrap().ancilla_dims.len(), 1);
    assert_eq!(mbody_gadget(4, Sign::Minus).unwrap().ancilla_dims.len(), 1);
    assert_eq!(mbody_gadget(6, Sign::Minus).unwrap().ancilla_dims.len(), 2);
    assert!(mbody_gadget(2, Sign::Plus).is_err());
}

#[test]
fn audit_closed_form_matches_search() {
    for m in 3..=10 {
        for t in [Sign::Plus, Sign::Minus] {
            assert_eq!(
                minimal_ancillas_by_search(m, t),
                Some(audited_ancilla_count(m, t)),
                "M={m} {t:?}"
            );
        }
    }
}

#[test]
fn audit_table_flags_even_counts() {
    for row in audit_table(8) {
        if row.m % 2 == 1 {
            assert!(row.agrees_with_paper(), "{row:?}");
        } else {
            assert!(!row.agrees_with_paper(), "{row:?}");
            assert_eq!(row.paper_count_valid, Some(false));
            assert_eq!(row.paper_count_enforces, Some(-row.target));
        }
    }
}

#[test]
fn gadget_and_formal_agree_on_faces() {
    let cases = vec![
        (
            formal_gadget(3, Sign::Plus).unwrap(),
            even_parity_gadget(3).unwrap(),
        ),
        (
            formal_gadget(4, Sign::Plus).unwrap(),
            even_parity_gadget(4).unwrap(),
        ),
        (
            formal_gadget(4, Sign::Minus).unwrap(),
            odd_parity_gadget(4, default_ratio(), RatioWindow::Enforce).unwrap(),
        ),
        (
            formal_gadget(6, Sign::Minus).unwrap(),
            mbody_gadget(6, Sign::Minus).unwrap(),
        ),
    ];
    for (formal, gadget) in cases {
        let a = gadget_groundspace_oracle(&formal)
            .unwrap()
            .face_projection(formal.arity);
        let b = gadget_groundspace_oracle(&gadget)
            .unwrap()
            .face_projection(gadget.arity);
        assert_eq!(a, b);
    }
}

#[test]
fn unsupported_arities() {
    assert!(even_parity_gadget(5).is_err());
    assert!(odd_parity_gadget(2, default_ratio(), RatioWindow::Enforce).is_err());
    assert!(formal_gadget(0, Sign::Plus).is_err());
}

#[test]
fn table_one_dimensions() {
    for n in 3..=5u32 {
        let odd = build_square_lattice(n as usize, &NuPolicy::AllOdd).unwrap();
        let even = build_square_lattice(n as usize, &NuPolicy::AllEven).unwrap();
        let model = LogicalModel::new(n as usize);
        let p = compile_program(&model, &odd, Variant::OddQubit, 1.0, None).unwrap();
        assert_eq!(p.total_dimension(), 1u128 << (n * n));
        let p = compile_program(&model, &even, Variant::EvenQutrit, 1.0, None).unwrap();
        let expect = 2u128.pow(n * (n + 1) / 2) * 3u128.pow(n * (n - 1) / 2);
        assert_eq!(p.total_dimension(), expect);
    }
}

#[test]
fn compile_maps_fields_with_mu() {
    let code = build_square_lattice(3, &NuPolicy::AllOdd).unwrap();
    let mut model = LogicalModel::new(3);
    model.set_coupling(1, 2, 0.7).unwrap();
    model.set_field(2, 0.3).unwrap();
    let p = compile_program(&model, &code, Variant::OddQubit, 2.0, None).unwrap();
    let s12 = code.spin_index(&SpinId::pair(1, 2)).unwrap();
    let s02 = code.spin_index(&SpinId::pair(0, 2)).unwrap();
    assert_eq!(p.logical_fields[s12], -0.7);
    assert_eq!(p.logical_fields[s02], 0.3);
    assert_eq!(p.ratio, Some(default_ratio()));
    assert_eq!(p.groups.len(), 3);

    let even = build_square_lattice(4, &NuPolicy::AllEven).unwrap();
    let mut model = LogicalModel::new(4);
    for i in 1..=4 {
        for j in (i + 1)..=4 {
            model.set_coupling(i, j, (i * 10 + j) as f64).unwrap();
        }
    }
    let p = compile_program(&model, &even, Variant::EvenQutrit, 1.0, None).unwrap();
    for i in 1..=4u32 {
        for j in (i + 1)..=4u32 {
            let s = even.spin_index(&SpinId::pair(i, j)).unwrap();
            assert_eq!(p.logical_fields[s], (i * 10 + j) as f64);
        }
    }
}

#[test]
fn compile_rejects_bad_inputs() {
    let odd = build_square_lattice(3, &NuPolicy::AllOdd).unwrap();
    let model = LogicalModel::new(3);
    assert!(matches!(
        compile_program(&model, &odd, Variant::EvenQutrit, 1.0, None),
        Err(GadgetError::SignMismatch { .. })
    ));
    assert!(matches!(
        compile_program(&model, &odd, Variant::OddQubit, 0.0, None),
        Err(GadgetError::InvalidDelta(_))
    ));
    assert!(matches!(
        compile_program(
            &model,
            &odd,
            Variant::OddQubit,
            1.0,
            Some(Strength::from_integer(3))
        ),
        Err(GadgetError::RatioOutOfWindow(_))
    ));
    assert!(matches!(
        compile_program(&LogicalModel::new(4), &odd, Variant::Formal, 1.0, None),
        Err(GadgetError::LogicalCountMismatch { .. })
    ));

    let tree = build_tree_code(
        &adjacency_from_edges(3, &[(1, 2), (2, 3)]),
        &NuPolicy::AllEven,
    )
    .unwrap();
    let mut model = LogicalModel::new(3);
    model.set_coupling(1, 3, 1.0).unwrap();
    assert_eq!(
        compile_program(&model, &tree, Variant::Formal, 1.0, None).unwrap_err(),
        GadgetError::Connectivity(vec![1, 3])
    );
}

#[test]
fn duplicate_labels_split_equally() {
    let code = build_square_lattice(3, &NuPolicy::AllOdd).unwrap();
    let s12 = code.spin_index(&SpinId::pair(1, 2)).unwrap();
    let code = code
        .add_multibody_spin(SpinId::Named("dup".into()), &[s12], &[1, 2], Sign::Plus)
        .unwrap();
    let dup = code.n_spins() - 1;
    assert_eq!(code.spins_with_label(&[1, 2]), vec![s12, dup]);
    let mut model = LogicalModel::new(3);
    model.set_coupling(1, 2, 0.8).unwrap();
    let p = compile_program(&model, &code, Variant::Formal, 1.0, None).unwrap();
    let total: f64 = [s12, dup]
        .iter()
        .map(|&s| p.logical_fields[s] * code.label(s).mu.as_f64())
        .sum();
    assert_eq!(total, 0.8);
    assert_eq!(p.logical_fields[s12] * code.label(s12).mu.as_f64(), 0.4);
    assert_eq!(p.split_labels, vec![(vec![1, 2], vec![s12, dup])]);
}

#[test]
fn site_catalogue_layout() {
    let code = build_square_lattice(3, &NuPolicy::AllEven).unwrap();
    let p = compile_program(&LogicalModel::new(3), &code, Variant::EvenQutrit, 1.0, None).unwrap();
    assert_eq!(p.site_dims(), vec![2, 2, 2, 2, 2, 2, 3, 3, 3]);
    for (k, g) in p.groups.iter().enumerate() {
        let anc = *g.sites.last().unwrap();
        assert_eq!(
            p.sites[anc].role,
            SiteRole::Ancilla {
                stabiliser: k,
                index: 0
            }
        );
        assert_eq!(
            &g.sites[..g.gadget.arity],
            code.stabilisers()[k].spins().as_slice()
        );
    }
    let formal = formal_constraint(&code, 2.0).unwrap();
    assert_eq!(formal.len(), 3);
    assert!(formal_constraint(&code, -1.0).is_err());
    assert_eq!("odd_qubit".parse::<Variant>().unwrap(), Variant::OddQubit);
    assert!("qutrit".parse::<Variant>().is_err());
}
