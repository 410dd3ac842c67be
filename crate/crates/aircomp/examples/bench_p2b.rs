use aircomp::algorithms::AlgorithmParams;
use aircomp::channel::{gen_channels, place_users, Scenario, SeededRng};
use aircomp::dc::{dc_solve_p1, DcParams};
use aircomp::model::{build_p1, build_p2, effective_channels, PhaseConfig};
use aircomp::sdp::{solve_sdp, SdpParams};
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
    let p1 = dc_solve_p1(&build_p1(&eff), &params.dc, &params.sdp, None).unwrap();
    let lifted2 = build_p2(&p1.m, &channels);

    // SDR init solve
    let base = aircomp::dc::p2_base_public(&lifted2);
    let t0 = Instant::now();
    let mut sdp_params = SdpParams::default();
    sdp_params.log_every = 1000;
    let sdr = solve_sdp(&base, &sdp_params, None).unwrap();
    println!("SDR init: {:?} {} iters {:.2}s pri {:.2e} dual {:.2e}", sdr.status, sdr.iterations, t0.elapsed().as_secs_f64(), sdr.primal_residual, sdr.dual_residual);

    // first DC subproblem from the SDR point
    let sub = aircomp::dc::dc_iterate(&base, &sdr.x, 1.0).unwrap();
    let t1 = Instant::now();
    let sol = solve_sdp(&sub, &sdp_params, Some(&sdr.x)).unwrap();
    println!("DC sub 1: {:?} {} iters {:.2}s pri {:.2e} dual {:.2e}", sol.status, sol.iterations, t1.elapsed().as_secs_f64(), sol.primal_residual, sol.dual_residual);
    for row in sol.log.iter().step_by(2) {
        println!("  it {:6}: obj {:.6e} pri {:.3e} dual {:.3e}", row.iteration, row.objective, row.primal_residual, row.dual_residual);
    }
    let _ = DcParams::default();
}
