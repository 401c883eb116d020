use fluxshot_core::analysis::{analyze_single_shot, assignment_fidelity, optimal_threshold, qnd_fidelity};
use fluxshot_core::dynamics::{
    effective_temperature, evolve_ensemble, occupations_at, propagate_populations, reset_simulate, thermal_population,
    ConstantPhotons, RateModel, ResetConfig,
};
use fluxshot_core::model::CavityParams;
use fluxshot_core::shots::{read_batch, synthesize_batch, write_batch, NoiseConfig, ReadoutConfig};
use fluxshot_core::LevelLabel;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

const GE: [LevelLabel; 2] = [LevelLabel::G, LevelLabel::E];

fn generator(rates: &[f64; 6]) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(3, 3);
    let mut k = 0;
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                q[(i, j)] = rates[k];
                k += 1;
            }
        }
    }
    for i in 0..3 {
        let out: f64 = (0..3).filter(|&j| j != i).map(|j| q[(i, j)]).sum();
        q[(i, i)] = -out;
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn populations_conserve_probability_and_match_expm(
        rates in prop::array::uniform6(0.0f64..1e4),
        t in 1e-6f64..1e-3,
        start in 0usize..3,
    ) {
        let q = generator(&rates);
        let mut p0 = vec![0.0; 3];
        p0[start] = 1.0;
        let p = propagate_populations(&q, &p0, t);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let exact = (q.transpose() * t).exp() * DVector::from_column_slice(&p0);
        for k in 0..3 {
            prop_assert!((p[k] - exact[k]).abs() < 1e-7);
        }
    }

    #[test]
    fn thermal_round_trip(t in 1e-3f64..1.0, f in 0.05f64..8.0) {
        let p = thermal_population(f, t).unwrap();
        prop_assert!(p > 0.0 && p < 0.5);
        let back = effective_temperature(p, f).unwrap();
        prop_assert!((back - t).abs() <= 1e-9 * t);
    }

    #[test]
    fn reset_never_heats_and_longer_pulses_cool_more(
        p0 in 0.0f64..1.0,
        s in 1e4f64..1e7,
        d in 1e-7f64..1e-5,
    ) {
        let cfg = ResetConfig { sideband_rate: s, duration: d, cavity_kappa: 9.8e7, rethermalization_up: 0.0, rethermalization_down: 1617.0 };
        let short = reset_simulate(p0, &cfg).unwrap();
        let long = reset_simulate(p0, &ResetConfig { duration: 2.0 * d, ..cfg }).unwrap();
        prop_assert!(short <= p0 + 1e-12);
        prop_assert!(long <= short + 1e-12);
    }

    #[test]
    fn fidelities_stay_in_range(g in prop::collection::vec(-5.0f64..5.0, 1..60), e in prop::collection::vec(-5.0f64..5.0, 1..60)) {
        let th = optimal_threshold(&g, &e).unwrap();
        let a = assignment_fidelity(&g, &e, &th).unwrap();
        prop_assert!((0.0..=1.0).contains(&a.fidelity));
        prop_assert!(th.degenerate || a.fidelity >= 0.5);
        prop_assert!((a.fidelity - th.fidelity).abs() < 1e-12);
        prop_assert_eq!(a.counts[0][0] + a.counts[0][1], g.len());
        prop_assert_eq!(a.counts[1][0] + a.counts[1][1], e.len());
    }

    #[test]
    fn qnd_fidelity_in_range(pairs in prop::collection::vec((0u8..2, 0u8..2), 2..200)) {
        let m1: Vec<u8> = pairs.iter().map(|p| p.0).collect();
        let m2: Vec<u8> = pairs.iter().map(|p| p.1).collect();
        if let Ok(q) = qnd_fidelity(&m1, &m2) {
            prop_assert!((0.0..=1.0).contains(&q.f_q));
        } else {
            prop_assert!(m1.iter().all(|&o| o == m1[0]));
        }
    }
}

#[test]
fn two_level_detailed_balance_monte_carlo() {
    let model = RateModel::thermal_qubit(1e-4, 0.025, 0.32812).unwrap();
    let p_eq = thermal_population(0.32812, 0.025).unwrap();
    let n = 100_000;
    let trajs = evolve_ensemble(LevelLabel::E, &model, &ConstantPhotons(0.0), 2e-3, 77, n).unwrap();
    let occ = occupations_at(&trajs, &model, 2e-3).unwrap();
    let sigma = (p_eq * (1.0 - p_eq) / n as f64).sqrt();
    assert!((occ[1] - p_eq).abs() < 3.0 * sigma, "{} vs {p_eq}", occ[1]);
}

#[test]
fn batch_file_round_trip_reanalyzes_identically() {
    let cavity = CavityParams::reference_device();
    let cfg = ReadoutConfig::reference_jpa_on();
    let batch = synthesize_batch(&GE, &cavity, &cfg, &NoiseConfig::with_jpa(), &RateModel::reference_device(), 2_000, 9).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shots.csv");
    write_batch(&batch, &path).unwrap();
    let back = read_batch(&path).unwrap();
    assert_eq!(back, batch);
    assert_eq!(analyze_single_shot(&back).unwrap(), analyze_single_shot(&batch).unwrap());
}
