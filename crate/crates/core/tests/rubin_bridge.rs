use causal_power::rubin::{exact_frequencies, exposed_sole_cause_fraction, sole_cause_fraction};
use causal_power::{
    cheng_to_rubin, independence_residual, joint, paf, prob_causation, rubin_prob_e, rubin_to_cheng, Assignment,
    ModelSpec, RubinModel,
};

fn grid() -> impl Iterator<Item = f64> {
    (0..=20).map(|k| k as f64 / 20.0)
}

#[test]
fn round_trip_is_exact_on_grid() {
    for qc in grid() {
        for qu in grid() {
            let rm = cheng_to_rubin(qc, qu).unwrap();
            assert_eq!(rubin_to_cheng(&rm), (qc, qu), "({qc}, {qu})");
            assert!(independence_residual(&rm).abs() < 1e-12);
            let sum = rm.prob_c + rm.prob_u + rm.prob_cu + rm.prob_n;
            assert!((sum - 1.0).abs() < 1e-12);
            assert!(RubinModel::new(rm.prob_c, rm.prob_u, rm.prob_cu, rm.prob_n).is_ok());
        }
    }
}

#[test]
fn effect_rate_matches_noisy_or() {
    for qc in grid() {
        for qu in grid() {
            let rm = cheng_to_rubin(qc, qu).unwrap();
            for (pc, pu) in [(0.5, 0.5), (0.2, 0.9), (1.0, 0.35)] {
                let m = ModelSpec::new()
                    .observed("C", Some(pc))
                    .unobserved("U", Some(pu))
                    .observed("E", None)
                    .fac("C", "E", qc)
                    .fac("U", "E", qu)
                    .build()
                    .unwrap();
                let p = joint(&m).unwrap().marginal(&Assignment::new().with("E", true)).unwrap();
                assert!((rubin_prob_e(&rm, pc, pu) - p).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn attribution_from_rubin_frequencies() {
    let models = [
        RubinModel::new(0.18, 0.28, 0.12, 0.42).unwrap(),
        RubinModel::new(0.2, 0.2, 0.1, 0.5).unwrap(),
        RubinModel::new(0.05, 0.6, 0.3, 0.05).unwrap(),
        RubinModel::new(0.4, 0.0, 0.0, 0.6).unwrap(),
    ];
    for rm in &models {
        for (pc, pu) in [(0.5, 0.5), (0.3, 0.8), (0.9, 0.1)] {
            let d = exact_frequencies(rm, pc, pu).unwrap();
            let f = paf(&d, "C", "E").unwrap().value().unwrap();
            let alone = sole_cause_fraction(rm, pc, pu).value().unwrap();
            assert!((f - alone).abs() < 1e-9, "{rm:?} {f} {alone}");
            let pcaus = prob_causation(&d, "C", "E").unwrap().value().unwrap();
            let exposed = exposed_sole_cause_fraction(rm, pc, pu).value().unwrap();
            assert!((pcaus - exposed).abs() < 1e-9);
        }
    }
}
