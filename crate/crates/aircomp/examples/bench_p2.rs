use aircomp::algorithms::AlgorithmParams;
use aircomp::channel::{gen_channels, place_users, Scenario, SeededRng};
use aircomp::dc::{dc_solve_p1, dc_solve_p2, DcParams};
use aircomp::model::{build_p1, build_p2, effective_channels, PhaseConfig};
use std::time::Instant;

fn main() {
    let mut scenario = Scenario::default();
    scenario.users = 16;
    scenario.irs_elements = 30;
    scenario.ap_antennas = 20;
    let mut rng = SeededRng::new(7);
    let pts = place_users(&scenario, &mut rng);
    let channels = gen_channels(&scenario, &pts, &mut rng).unwrap();
    let params = AlgorithmParams::default();
    let theta = PhaseConfig::uniform_random(30, &mut rng);
    let eff = effective_channels(&channels, &theta);
    let t0 = Instant::now();
    let p1 = dc_solve_p1(&build_p1(&eff), &params.dc, &params.sdp, None).unwrap();
    println!("p1: {:.2}s, dc iters {}, rank_one {}", t0.elapsed().as_secs_f64(), p1.trace.len(), p1.rank_one);
    let lifted2 = build_p2(&p1.m, &channels);
    // verify current phases feasible
    let v = theta.unit_phasors();
    println!("min constraint at current theta: {:.6}", lifted2.min_constraint_value(&v));
    let t1 = Instant::now();
    let p2 = dc_solve_p2(&lifted2, &params.dc, &params.sdp, None).unwrap();
    println!("p2: {:.2}s, feasible {}, dc iters {}", t1.elapsed().as_secs_f64(), p2.feasible, p2.trace.len());
    for (i, s) in p2.trace.steps.iter().enumerate() {
        println!("  step {i}: obj {:.6e} penalty {:.6e} status {:?}", s.objective, s.penalty, s.solver_status);
    }
    let _ = DcParams::default();
}
