use aircomp::algorithms::AlgorithmParams;
use aircomp::channel::{gen_channels, place_users, Scenario, SeededRng};
use aircomp::dc::{dc_iterate, dc_solve_p1, p2_base_public, rank1_penalty};
use aircomp::linalg::{leading_rank1_factor, CVector, C64};
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
    let mut x = solve_sdp(&base, &SdpParams::default(), None).unwrap().x;

    let repaired_min = |x: &aircomp::linalg::HermitianMatrix| -> f64 {
        let f = leading_rank1_factor(x).unwrap();
        let unit: CVector = f.map(|z| z / C64::new(z.norm().max(1e-300), 0.0));
        let n = unit.len();
        let t = unit[n - 1];
        let v = unit.rows(0, n - 1).into_owned().map(|z| z / t);
        lifted2.min_constraint_value(&v)
    };

    for step in 1..=4 {
        let sub = dc_iterate(&base, &x, 1.0).unwrap();
        let t = Instant::now();
        let sol = solve_sdp(&sub, &SdpParams::default(), Some(&x)).unwrap();
        x = sol.x;
        println!(
            "DC step {step}: {:?} iters {:6} {:.2}s penalty {:.3e} repaired min constraint {:.9}",
            sol.status, sol.iterations, t.elapsed().as_secs_f64(),
            rank1_penalty(&x).unwrap(), repaired_min(&x)
        );
    }
}
