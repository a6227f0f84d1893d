mod common;

use common::interp::check_source;

#[test]
fn concrete_runs_stay_inside_intervals() {
    for (n, path) in common::all_fixture_files().iter().enumerate() {
        let stats = check_source(&common::read(path), 0x5eed + n as u64, 120).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(stats.vectors >= 120 * stats.functions, "{}: {stats:?}", path.display());
    }
}

#[test]
fn runs_complete_often_enough_to_mean_something() {
    let src = common::read(&common::fixtures().join("extra/mixed.sol"));
    let stats = check_source(&src, 7, 100).unwrap();
    assert!(stats.completed * 4 > stats.vectors, "{stats:?}");
    assert!(stats.reverted > 0, "{stats:?}");
}

#[test]
fn a_narrowed_interval_is_caught() {
    use std::collections::BTreeMap;

    use common::interp::run_checked;
    use minisol_iv::cfg::VarId;
    use minisol_iv::domain::{AbstractValue, Domain, Interval};
    use minisol_iv::engine::{analyze_contract, WorklistConfig};
    use rand::SeedableRng;

    let src = common::read(&common::fixtures().join("extra/bounded_loop.sol"));
    let (unit, symbols) = minisol_iv::frontend::load(&src).unwrap();
    let analysis = analyze_contract(&unit.contracts[0], &symbols, WorklistConfig::default()).unwrap();
    let (cfg, mut result) = (&analysis.cfgs[1], analysis.results[1].clone());
    // claim the loop counter never exceeds 5
    for states in &mut result.instr_in {
        for s in states.iter_mut() {
            let counter = s.iter().map(|(v, _)| *v).find(|v| cfg.var_name(*v) == "i");
            if let Some(v) = counter {
                s.set(v, AbstractValue::scalar(Interval::new(0, 5), Domain::Uint(256)));
            }
        }
    }
    let storage: BTreeMap<VarId, _> = BTreeMap::new();
    let mut rng = rand::rngs::StdRng::seed_from_u64(1);
    let err = run_checked(cfg, &result, &storage, &mut rng, 10_000).err().expect("violation detected");
    assert!(err.contains("i = Int(6)"), "{err}");
}
