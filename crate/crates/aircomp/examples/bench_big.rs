use aircomp::algorithms::{alternating_dc, AlgorithmParams};
use aircomp::channel::{gen_channels, place_users, Scenario, SeededRng};
use std::time::Instant;

fn main() {
    let mut scenario = Scenario::default();
    scenario.users = 16;
    scenario.irs_elements = 30;
    scenario.ap_antennas = 20;
    let mut rng = SeededRng::new(7);
    let pts = place_users(&scenario, &mut rng);
    let channels = gen_channels(&scenario, &pts, &mut rng).unwrap();
    let t0 = Instant::now();
    let result = alternating_dc(&channels, scenario.p0, scenario.sigma2, &AlgorithmParams::default(), &mut rng).unwrap();
    println!(
        "K=16 M=30 N=20: {:?} in {:.1}s, mse={:.4e}, outer iters={}, trace={:?}",
        result.terminated_by,
        t0.elapsed().as_secs_f64(),
        result.mse,
        result.iterations(),
        result.mse_per_iteration
    );
}
