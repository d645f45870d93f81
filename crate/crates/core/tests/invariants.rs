//! Properties that hold for every model, checked on random inputs and on
//! every builtin up to four sites.

use lindblad_certify::closure::{self, GeneratorSet, Verdict};
use lindblad_certify::liouvillian::{self, Lindbladian};
use lindblad_certify::modelspec::{build_builtin, LindbladOp, ModelSpec, Params, ParticleKind};
use lindblad_certify::ness;
use lindblad_certify::opalg::{c64, hs_inner, Operator, PauliLetter, PauliTerm};
use lindblad_certify::symmetry;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_operator(rng: &mut ChaCha8Rng, d: usize) -> Operator {
    Operator::from_fn(d, |_, _| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn random_term(rng: &mut ChaCha8Rng, n: usize, letters: &[PauliLetter], complex: bool) -> PauliTerm {
    let mut factors = Vec::new();
    while factors.is_empty() {
        for site in 1..=n {
            if rng.random_bool(0.5) {
                factors.push((site, letters[rng.random_range(0..letters.len())]));
            }
        }
    }
    let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
    PauliTerm::new(c64::new(rng.random_range(-1.0..1.0), im), factors).unwrap()
}

fn random_model(seed: u64) -> ModelSpec {
    use PauliLetter::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=3);
    ModelSpec {
        n_sites: n,
        particle_kind: ParticleKind::SpinHalf,
        hamiltonian: (0..rng.random_range(0..=3)).map(|_| random_term(&mut rng, n, &[X, Y, Z], false)).collect(),
        lindblad: (0..rng.random_range(1..=3))
            .map(|m| LindbladOp {
                label: format!("L{m}"),
                terms: vec![random_term(&mut rng, n, &[X, Y, Z, Plus, Minus], true)],
            })
            .collect(),
        symmetries: Vec::new(),
        metadata: Default::default(),
    }
}

/// Builtin instances up to N = 4.
fn builtins() -> Vec<ModelSpec> {
    let mut out = vec![build_builtin(
        "two_level_gain_loss",
        &Params::from_pairs([("gamma_g", "1"), ("gamma_l", "2"), ("hz", "0.4")]),
    )
    .unwrap()];
    for n in 2..=4usize {
        let n_s = n.to_string();
        let n = n_s.as_str();
        let cases: Vec<(&str, Vec<(&str, &str)>)> = vec![
            ("tfim_boundary_dephasing", vec![("N", n), ("h_x", "1"), ("gamma", "0.5")]),
            (
                "xyz_bulk_dephasing",
                vec![("N", n), ("Jx", "1"), ("Jy", "0.5"), ("Jz", "0.3"), ("hz", "0.7"), ("gamma", "1")],
            ),
            ("tight_binding_dephasing", vec![("N", n), ("t", "1"), ("gamma", "0.8")]),
            ("xyz_lattice", vec![("N", n), ("bonds", "1-2"), ("Jx", "1"), ("Jy", "0.4"), ("gamma", "1")]),
            ("tight_binding_lattice", vec![("N", n), ("bonds", "1-2"), ("t", "1"), ("gamma", "0.8")]),
        ];
        for (name, pairs) in cases {
            out.push(build_builtin(name, &Params::from_pairs(pairs)).unwrap());
        }
    }
    for n in ["2", "4"] {
        out.push(
            build_builtin(
                "compass_dephasing",
                &Params::from_pairs([("N", n), ("Jx", "1"), ("Jy", "0.7"), ("gamma", "1")]),
            )
            .unwrap(),
        );
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generator_preserves_trace_and_hermiticity(seed in any::<u64>()) {
        let l = Lindbladian::from_spec(&random_model(seed)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let rho = random_operator(&mut rng, l.dim());
        let out = l.apply(&rho).unwrap();
        let scale = rho.hs_norm() * (1.0 + l.hamiltonian().hs_norm() + l.jumps().iter().map(|j| j.hs_norm().powi(2)).sum::<f64>());
        prop_assert!(out.trace().norm() <= 1e-12 * scale);
        let out_adj = l.apply(&rho.adjoint()).unwrap();
        prop_assert!((&out_adj - &out.adjoint()).hs_norm() <= 1e-12 * scale);
    }

    #[test]
    fn hs_norm_is_real_and_nonnegative(seed in any::<u64>(), d in 1usize..6) {
        let a = random_operator(&mut ChaCha8Rng::seed_from_u64(seed), d);
        let z = hs_inner(&a, &a).unwrap();
        prop_assert!(z.re >= 0.0);
        prop_assert!(z.im.abs() <= 1e-14 * z.re.max(1.0));
        prop_assert!((z.re.sqrt() - a.hs_norm()).abs() <= 1e-12 * a.hs_norm().max(1.0));
    }

    #[test]
    fn certified_random_models_have_unique_positive_states(seed in any::<u64>()) {
        let l = Lindbladian::from_spec(&random_model(seed)).unwrap();
        let check = closure::check_lindbladian(&l, 1e-9, None).unwrap();
        if check.verdict == Verdict::CertifiedUnique {
            let ss = ness::steady_states_of(&l, 1e-9, 256).unwrap();
            prop_assert_eq!(ss.kernel_dim(), 1);
            let st = ss.state.unwrap();
            prop_assert!(st.min_eigenvalue > 0.0);
            prop_assert!(st.stationarity_residual <= 1e-8);
        }
    }

    #[test]
    fn closure_is_monotone_and_scale_free(seed in any::<u64>()) {
        let l = Lindbladian::from_spec(&random_model(seed)).unwrap();
        let d = l.dim();
        let gens = closure::generators(&l, GeneratorSet::Effective);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = closure::algebra_closure(&gens, d, 1e-9, None).unwrap();
        let scaled: Vec<Operator> = gens
            .iter()
            .map(|g| g.scaled(c64::from_polar(rng.random_range(0.01..100.0), rng.random_range(0.0..6.0))))
            .collect();
        prop_assert_eq!(closure::algebra_closure(&scaled, d, 1e-9, None).unwrap().generated_dim, base.generated_dim);
        let again = closure::algebra_closure(&base.basis.vectors(), d, 1e-9, None).unwrap();
        prop_assert_eq!(again.generated_dim, base.generated_dim);
        let mut more = gens.clone();
        more.push(random_operator(&mut rng, d));
        prop_assert!(closure::algebra_closure(&more, d, 1e-9, None).unwrap().generated_dim >= base.generated_dim);
    }
}

#[test]
fn builtin_spectra_lie_in_the_left_half_plane() {
    for spec in builtins() {
        let l = Lindbladian::from_spec(&spec).unwrap();
        let ev = liouvillian::spectrum(&liouvillian::assemble(&l).unwrap()).unwrap();
        let max_re = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        assert!(max_re <= 1e-10, "{:?}: {max_re}", spec.metadata.get("builtin"));
    }
}

#[test]
fn certified_builtins_have_unique_positive_states() {
    for spec in builtins() {
        let l = Lindbladian::from_spec(&spec).unwrap();
        if closure::check_lindbladian(&l, 1e-9, None).unwrap().verdict != Verdict::CertifiedUnique {
            continue;
        }
        let ss = ness::steady_states_of(&l, 1e-9, 256).unwrap();
        assert_eq!(ss.kernel_dim(), 1);
        assert!(ss.state.unwrap().min_eigenvalue > 0.0);
    }
}

#[test]
fn hermitian_jumps_leave_the_identity_stationary() {
    for spec in builtins() {
        let l = Lindbladian::from_spec(&spec).unwrap();
        if !l.has_hermitian_jumps(1e-12) {
            continue;
        }
        let d = l.dim();
        let out = l.apply(&Operator::identity(d).scaled(c64::new(1.0 / d as f64, 0.0))).unwrap();
        assert!(out.hs_norm() <= 1e-12, "{:?}: {}", spec.metadata.get("builtin"), out.hs_norm());
    }
}

#[test]
fn sectors_are_complete_and_each_block_has_a_steady_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for spec in builtins() {
        let l = Lindbladian::from_spec(&spec).unwrap();
        for (label, s) in spec.symmetry_operators().unwrap() {
            let dec = symmetry::sector_decompose(&s, 1e-8).unwrap();
            assert!(dec.completeness_defect() <= 1e-10);
            let a = ness::per_sector_ness_of(&l, &label, &s, &Default::default(), &mut rng).unwrap();
            for sec in &a.sectors {
                assert!(sec.kernel_dim >= 1, "{label} sector {} has no steady state", sec.sector);
                if let Some(st) = &sec.state {
                    assert!(st.stationarity_residual <= 1e-8);
                }
            }
            assert!(a.reassembly_residual.is_some_and(|r| r <= 1e-8), "{label}: {:?}", a.reassembly_residual);
        }
    }
}
