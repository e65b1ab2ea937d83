use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rateless_coop::codec::{Precode, PrecodeSpec};
use rateless_coop::protocol::{run_trials, Aggregate, Fidelity, InterUser, ScenarioConfig, Scheme};

fn config(scheme: Scheme, dest: [f64; 2], inter: f64, trials: usize) -> ScenarioConfig {
    let mut c = ScenarioConfig::two_user(scheme, 500, 50, dest, inter);
    c.trials = trials;
    c.master_seed = 17;
    c
}

fn mean(c: &ScenarioConfig) -> Aggregate {
    let sc = c.resolve(None).unwrap();
    Aggregate::from_runs(c.scheme, &run_trials(&sc, Some(2)).unwrap())
}

#[test]
fn worker_count_does_not_change_results() {
    let sc = config(Scheme::Pcc, [0.2, 0.6], 0.3, 8).resolve(None).unwrap();
    assert_eq!(run_trials(&sc, Some(1)).unwrap(), run_trials(&sc, Some(4)).unwrap());
}

#[test]
fn symmetric_channels_make_perfect_cooperation_pointless() {
    // with e_1 = e_2 both schemes need about 2k(1+δ)/(1−e) symbols
    for e in [0.2, 0.5] {
        let no = mean(&config(Scheme::Nocoop, [e, e], 0.0, 40));
        let pf = mean(&config(Scheme::Perfect, [e, e], 0.0, 40));
        let gap = (no.mean_throughput - pf.mean_throughput).abs() / pf.mean_throughput;
        assert!(gap < 0.05, "e={e}: nocoop {} perfect {}", no.mean_throughput, pf.mean_throughput);
        assert!(pf.mean_throughput < 1.0 - e);
    }
}

#[test]
fn asymmetric_channels_order_the_schemes() {
    let m = |s| mean(&config(s, [0.2, 0.6], 0.0, 40)).mean_throughput;
    let (no, fcc, pcc, pf) = (m(Scheme::Nocoop), m(Scheme::Fcc), m(Scheme::Pcc), m(Scheme::Perfect));
    assert!(pf > no && fcc > no && pcc > no, "{no} {fcc} {pcc} {pf}");
}

#[test]
fn dead_partner_links_reduce_cooperation_to_nothing() {
    let pcc = mean(&config(Scheme::Pcc, [0.2, 0.6], 1.0, 40));
    let mut c = config(Scheme::Nocoop, [0.2, 0.6], 1.0, 40);
    c.dists.omega = Some("pcc-m2".into());
    let no = mean(&c);
    let tol = 2.0 * (pcc.ci95.powi(2) + no.ci95.powi(2)).sqrt();
    assert!((pcc.mean_throughput - no.mean_throughput).abs() < tol);
}

#[test]
fn fcc_users_switch_phase_after_decoding_the_partner() {
    let sc = config(Scheme::Fcc, [0.2, 0.6], 0.0, 1).resolve(None).unwrap();
    let run = &run_trials(&sc, Some(1)).unwrap()[0];
    assert!(run.complete);
    // k/N = 10 frames of partner symbols are needed before any switch
    assert!(run.phase_switch_tf.iter().all(|s| s.first().is_some_and(|&tf| tf > 10)));
}

#[test]
fn payload_runs_deliver_the_exact_messages() {
    let mut c = config(Scheme::Pcc, [0.2, 0.6], 0.3, 3);
    c.fidelity = Fidelity::Payload;
    c.packet_bits = 64;
    let sc = c.resolve(None).unwrap();
    for run in run_trials(&sc, Some(1)).unwrap() {
        assert!(run.complete);
        assert_eq!(run.payload_verified, Some(true));
    }
}

#[test]
fn inter_user_matrix_configs_are_checked() {
    let mut c = config(Scheme::Pcc, [0.2, 0.6], 0.0, 1);
    c.erasures.inter_user = InterUser::Matrix(vec![vec![0.0, 0.2], vec![0.3, 0.0]]);
    assert!(c.resolve(None).is_err());
}

#[test]
fn default_precode_repairs_small_erasure_fractions() {
    // calibration target: ≥ 99% of codes at k = 10000 repair 0.5% erasures
    let spec = PrecodeSpec::default();
    let n = spec.message_len(10_000);
    let mut ok = 0;
    let trials = 200;
    for t in 0..trials {
        let code = Precode::new(&spec, n, t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(t);
        let mut known = vec![true; code.k()];
        for i in sample(&mut rng, code.k(), code.k() / 200) {
            known[i] = false;
        }
        ok += usize::from(code.decode_structural(&known).1);
    }
    assert!(ok * 100 >= 99 * trials as usize, "{ok}/{trials}");
}
