use aircomp::algorithms::AlgorithmParams;
use aircomp::channel::{gen_channels, place_users, Scenario, SeededRng};
use aircomp::dc::{dc_iterate, dc_solve_p1, p2_base_public};
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
    let base = p2_base_public(&lifted2);
    let sdr = solve_sdp(&base, &SdpParams::default(), None).unwrap();
    let sub = dc_iterate(&base, &sdr.x, 1.0).unwrap();

    for &step in &[0.3f64, 1.0, 3.0, 10.0, 30.0] {
        for &alpha in &[1.0f64, 1.6, 1.9] {
            let mut p = SdpParams::default();
            p.step = step;
            p.over_relaxation = alpha;
            p.adaptive_step = false;
            p.max_iters = 20_000;
            let t = Instant::now();
            let sol = solve_sdp(&sub, &p, Some(&sdr.x)).unwrap();
            println!(
                "step {:5.1} alpha {:.1}: {:?} iters {:6} {:.2}s pri {:.2e} dual {:.2e}",
                step, alpha, sol.status, sol.iterations, t.elapsed().as_secs_f64(),
                sol.primal_residual, sol.dual_residual
            );
        }
    }
}
