use submax::adaptive::{derive_params, maximize, run_with_guess, Branch, Mode, RunResult};
use submax::model::{ElementSet, InstrumentedOracle, SetFunction};
use submax::objectives::{gen_random_coverage, gen_random_facility_location, ModularFunction, SubmodularInstance};

fn instances() -> Vec<SubmodularInstance> {
    let mut out: Vec<SubmodularInstance> = Vec::new();
    for seed in 0..6 {
        out.push(gen_random_coverage(120, 400, 0.03, 1.0, seed).unwrap().into());
        out.push(gen_random_facility_location(120, 60, seed).unwrap().into());
    }
    out
}

fn check_guess(run: &RunResult, inst: &dyn SetFunction, k: usize, eps: f64) {
    let n = inst.ground_size();
    let p = derive_params(n, k, eps, run.guess.unwrap(), Mode::Practical).unwrap();
    assert!(run.set.len() <= k);
    assert!((run.value - inst.value(&run.set)).abs() <= 1e-9 * run.value.max(1.0));
    assert!(run.rounds <= p.round_budget());
    let gain_cap = (6.0 * (n as f64).ln() / eps).ceil() as usize + 1;
    let filter_cap = (2.0 * (n as f64).ln() / eps).ceil() as usize + 1;
    let mut prev = 0.0;
    let mut phase_start = 0.0;
    let mut phase = 0;
    let (mut gains, mut filters) = (0, 0);
    for t in &run.trace {
        if t.phase != phase {
            phase = t.phase;
            phase_start = prev;
            gains = 0;
            filters = 0;
        }
        assert!(t.value >= prev, "value decreased");
        let gap = p.guess - phase_start;
        match t.branch {
            Branch::Gain => {
                gains += 1;
                let size = (t.pool_before - t.pool_after) as f64;
                if !t.truncated {
                    let expected = p.gain_threshold_factor * size / k as f64 * gap;
                    assert!(t.value - prev >= expected - 1e-9 * p.guess);
                }
                if gap >= p.guess / 3.0 {
                    assert!(gains <= gain_cap, "{gains} gain steps in one phase");
                }
            }
            Branch::Filter => {
                filters += 1;
                assert!(filters <= filter_cap, "{filters} filter steps in one phase");
            }
            Branch::Fail => {}
        }
        assert!(t.set_size <= k);
        prev = t.value;
    }
}

#[test]
fn traces_satisfy_step_invariants() {
    let (k, eps) = (20, 0.2);
    for (i, inst) in instances().iter().enumerate() {
        let r = maximize(&mut InstrumentedOracle::new(inst), k, eps, Mode::Practical, i as u64).unwrap();
        for run in &r.ladder.as_ref().unwrap().runs {
            check_guess(run, inst, k, eps);
        }
    }
}

#[test]
fn larger_sample_sets_when_k_is_large() {
    // eps² k / (100 ln n) >= 2 needs k in the tens of thousands.
    let n = 30_000;
    let weights: Vec<f64> = (0..n).map(|i| 0.5 + (i * 7919 % 1000) as f64 / 1000.0).collect();
    let f = ModularFunction::new(weights);
    let (k, eps) = (n, 0.3);
    let p = derive_params(n, k, eps, 1.0, Mode::Practical).unwrap();
    assert_eq!(p.ell, 2);
    let total = f.value(&ElementSet::full(n));
    let r = run_with_guess(&mut InstrumentedOracle::new(&f), k, eps, total, Mode::Practical, 1).unwrap();
    assert!(r.trace.iter().all(|t| t.branch == Branch::Gain && t.pool_before - t.pool_after == 2));
    assert!(r.value >= p.stop_value / p.guess * total);
    check_guess(&r, &f, k, eps);
}

#[test]
fn theory_mode_on_a_tiny_instance() {
    let inst: SubmodularInstance = gen_random_coverage(8, 20, 0.3, 1.0, 0).unwrap().into();
    let mut oracle = InstrumentedOracle::new(&inst);
    let r = maximize(&mut oracle, 3, 0.3, Mode::Theory, 0).unwrap();
    assert!(r.set.len() <= 3);
    let p = derive_params(8, 3, 0.3, 1.0, Mode::Theory).unwrap();
    assert!(p.samples > 4000);
    assert!(r.value > 0.0);
}

#[test]
fn identical_seeds_identical_traces() {
    let inst = &instances()[1];
    let a = maximize(&mut InstrumentedOracle::new(inst), 10, 0.1, Mode::Practical, 5).unwrap();
    let b = maximize(&mut InstrumentedOracle::new(inst).with_parallel(true), 10, 0.1, Mode::Practical, 5).unwrap();
    assert_eq!(a, b);
    let c = maximize(&mut InstrumentedOracle::new(inst), 10, 0.1, Mode::Practical, 5).unwrap();
    assert_eq!(a, c);
}
