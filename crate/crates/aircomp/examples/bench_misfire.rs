use aircomp::algorithms::AlgorithmParams;
use aircomp::channel::SeededRng;
use aircomp::dc::p1_base_public;
use aircomp::model::tests_support::random_instance_public;
use aircomp::model::{build_p1, effective_channels, PhaseConfig};
use aircomp::sdp::{solve_sdp, SdpParams};

fn main() {
    // same setup as the failing unit test: instance 22, substream 9
    let (channels, rng) = random_instance_public(22, 3, 4, 3);
    let mut r = rng.substream(9);
    let params = AlgorithmParams::default();
    let theta = PhaseConfig::uniform_random(3, &mut r);
    let eff = effective_channels(&channels, &theta);
    let lifted = build_p1(&eff);
    let (base, _gamma) = p1_base_public(&lifted).unwrap();
    let mut p = params.sdp.clone();
    p.log_every = 100;
    let sol = solve_sdp(&base, &p, None).unwrap();
    println!("status {:?} iters {}", sol.status, sol.iterations);
    for row in sol.log.iter().take(40) {
        println!("  it {:5}: obj {:.4e} pri {:.3e} dual {:.3e}", row.iteration, row.objective, row.primal_residual, row.dual_residual);
    }
}
