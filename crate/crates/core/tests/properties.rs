use std::collections::BTreeMap;

use proptest::prelude::*;

use parity_anneal::code::{build_square_lattice, NuPolicy, ParityCode};
use parity_anneal::gadgets::{compile_program, Variant};
use parity_anneal::lab::generate_instance;
use parity_anneal::model::LogicalModel;
use parity_anneal::spectral::{assemble, lowest_eigs, Driver, SolverOptions, SpinSystem};
use parity_anneal::Sign;

fn random_nu(n: usize, bits: u64) -> NuPolicy {
    let mut faces = BTreeMap::new();
    let mut k = 0;
    for i in 0..n {
        for j in (i + 2)..=n {
            let s = if (bits >> k) & 1 == 1 {
                Sign::Minus
            } else {
                Sign::Plus
            };
            faces.insert(format!("[{i},{j}]"), s);
            k += 1;
        }
    }
    NuPolicy::PerFace(faces)
}

fn code_for(variant: Variant, n: usize, bits: u64) -> ParityCode {
    let nu = match variant {
        Variant::EvenQutrit => NuPolicy::AllEven,
        Variant::OddQubit => NuPolicy::AllOdd,
        Variant::Formal | Variant::Mbody => random_nu(n, bits),
    };
    build_square_lattice(n, &nu).unwrap()
}

fn variant() -> impl Strategy<Value = Variant> {
    prop::sample::select(Variant::ALL.to_vec())
}

fn lowest(system: &SpinSystem, s: f64, k: usize, opts: &SolverOptions) -> Vec<f64> {
    let driver = Driver::default();
    let prepared = system.prepare(&driver, opts).unwrap();
    lowest_eigs(&assemble(&prepared, s).unwrap(), k, opts)
        .unwrap()
        .eigenvalues
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The formal penalty costs Δ per violated stabiliser, so the syndrome
    /// is empty exactly on the zero-energy basis states.
    #[test]
    fn syndrome_matches_formal_penalty(n in 2usize..=4, bits in any::<u64>()) {
        let code = build_square_lattice(n, &random_nu(n, bits)).unwrap();
        let program =
            compile_program(&LogicalModel::new(n), &code, Variant::Formal, 1.0, None).unwrap();
        let diag = SpinSystem::from_program(&program, &Driver::default())
            .diagonal(1 << 12)
            .unwrap();
        let spins = code.n_spins();
        for (idx, &e) in diag.iter().enumerate() {
            let z: Vec<i8> = (0..spins)
                .map(|q| if (idx >> q) & 1 == 0 { 1 } else { -1 })
                .collect();
            let report = code.syndrome(&z).unwrap();
            prop_assert_eq!(report.violated.len() as f64, e);
        }
    }

    /// Summing μ·field over the spins of each label recovers the model
    /// coefficient.
    #[test]
    fn compile_conserves_coefficients(
        n in 2usize..=4,
        seed in any::<u64>(),
        bits in any::<u64>(),
        variant in variant(),
    ) {
        let code = code_for(variant, n, bits);
        let model = generate_instance(n, 1.0, seed).unwrap();
        let program = compile_program(&model, &code, variant, 3.0, None).unwrap();
        let mut totals: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (q, label) in code.labels().iter().enumerate() {
            *totals.entry(label.logicals.clone()).or_default() +=
                label.mu.as_f64() * program.logical_fields[q];
        }
        for (key, value) in model.terms() {
            prop_assert!((totals[&key] - value).abs() < 1e-15, "{key:?}");
        }
    }

    #[test]
    fn site_order_does_not_change_the_spectrum(
        seed in any::<u64>(),
        s in 0.0f64..=1.0,
        perm in Just((0..4).collect::<Vec<usize>>()).prop_shuffle(),
        odd in any::<bool>(),
    ) {
        let variant = if odd { Variant::OddQubit } else { Variant::EvenQutrit };
        let code = code_for(variant, 2, 0);
        let model = generate_instance(2, 1.0, seed).unwrap();
        let program = compile_program(&model, &code, variant, 2.0, None).unwrap();
        let system = SpinSystem::from_program(&program, &Driver::default());
        let opts = SolverOptions::default();
        let a = lowest(&system, s, 6, &opts);
        let b = lowest(&system.permuted(&perm), s, 6, &opts);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10, "{a:?} vs {b:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn dense_and_lanczos_agree(seed in any::<u64>(), s in 0.05f64..0.95, odd in any::<bool>()) {
        let variant = if odd { Variant::OddQubit } else { Variant::EvenQutrit };
        let code = code_for(variant, 3, 0);
        let model = generate_instance(3, 1.0, seed).unwrap();
        let program = compile_program(&model, &code, variant, 5.0, None).unwrap();
        let system = SpinSystem::from_program(&program, &Driver::default());
        let dense = lowest(&system, s, 3, &SolverOptions::default());
        let lanczos = lowest(
            &system,
            s,
            3,
            &SolverOptions { dense_max: 0, ..SolverOptions::default() },
        );
        for (x, y) in dense.iter().zip(&lanczos) {
            prop_assert!((x - y).abs() < 1e-9, "{dense:?} vs {lanczos:?}");
        }
    }
}
