//! Difference-of-convex treatment of the rank-one constraint.
//!
//! For a PSD matrix, `Tr(X) - ||X||_2` is nonnegative and vanishes exactly
//! on rank-one matrices, so the rank-one constraint becomes a DC penalty.
//! Each iteration linearizes the concave `-||X||_2` term at the previous
//! iterate through its spectral subgradient `v1 v1^H` and solves the
//! resulting convex SDP, giving a majorization-minimization scheme whose
//! penalized objective never increases.
//!
//! Two specializations are provided: the decoding-vector problem
//! (`minimize (1+rho) Tr(M) - rho ||M||_2` under the lifted channel
//! constraints) and the phase-feasibility problem (`minimize
//! Tr(V) - ||V||_2` under the homogenized constraints with unit diagonal).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, C64, CVector, HermitianMatrix};
use crate::model::{LiftedP1, LiftedP2};
use crate::sdp::{self, LiftedSdp, SdpParams, SolveStatus};

/// Choice of starting point for the DC iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DcInit {
    /// Solution of the plain semidefinite relaxation (rank constraint
    /// dropped). Feasible and gives the first subgradient a meaningful
    /// direction.
    #[default]
    SdrRelaxation,
    /// A feasible scaled identity (decoding problem) or the identity
    /// matrix (phase problem). Cheaper, useful for initialization studies.
    Identity,
}

/// DC iteration parameters. Defaults: `rho = 5`, `eps_dc = 1e-8`,
/// `max_dc_iters = 100`, `feas_tol = 1e-6`.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct DcParams {
    /// Penalty weight on the rank-one term (decoding problem only; the
    /// phase problem minimizes the bare penalty).
    pub rho: f64,
    /// Stop when the penalized objective decreases by less than this
    /// (scaled by `max(1, |objective|)`).
    pub eps_dc: f64,
    pub max_dc_iters: usize,
    /// Relative penalty below which an iterate counts as rank one.
    pub feas_tol: f64,
    pub init: DcInit,
}

impl Default for DcParams {
    fn default() -> Self {
        Self {
            rho: 5.0,
            eps_dc: 1e-8,
            max_dc_iters: 100,
            feas_tol: 1e-6,
            init: DcInit::default(),
        }
    }
}

impl DcParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) {
            return Err(Error::InvalidInput("rho must be positive".into()));
        }
        if !(self.eps_dc > 0.0) {
            return Err(Error::InvalidInput("eps_dc must be positive".into()));
        }
        if !(self.feas_tol > 0.0) {
            return Err(Error::InvalidInput("feas_tol must be positive".into()));
        }
        if self.max_dc_iters == 0 {
            return Err(Error::InvalidInput("max_dc_iters must be >= 1".into()));
        }
        Ok(())
    }
}

/// One accepted DC iterate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DcIteration {
    /// Penalized objective at this iterate (original problem units).
    pub objective: f64,
    /// Rank-one penalty `Tr(X) - ||X||_2` (original problem units).
    pub penalty: f64,
    pub solver_status: SolveStatus,
}

/// Accepted-iterate history of a DC run; the objective column is
/// non-increasing by construction (an iterate that fails to improve is
/// rejected and the run stops there).
#[derive(Debug, Clone, Default, Serialize)]
pub struct DcTrace {
    pub steps: Vec<DcIteration>,
}

impl DcTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_penalty(&self) -> Option<f64> {
        self.steps.last().map(|s| s.penalty)
    }
}

/// Rank-one penalty `Tr(X) - ||X||_2` of a PSD matrix; zero exactly on
/// rank-one matrices.
pub fn rank1_penalty(x: &HermitianMatrix) -> Result<f64> {
    Ok(x.trace() - linalg::spectral_norm(x)?)
}

/// Build the convex subproblem at a linearization point: the cost becomes
/// `C + rho (I - v1 v1^H)` with `v1 v1^H` the spectral subgradient at the
/// point; constraints are unchanged.
pub fn dc_iterate(
    problem: &LiftedSdp,
    linearization_point: &HermitianMatrix,
    rho: f64,
) -> Result<LiftedSdp> {
    if linearization_point.dim() != problem.dim {
        return Err(Error::InvalidInput(format!(
            "linearization point dim {} != problem dim {}",
            linearization_point.dim(),
            problem.dim
        )));
    }
    let subgrad = linalg::spectral_subgradient(linearization_point)?;
    let shift = HermitianMatrix::identity(problem.dim).sub(&subgrad).scaled(rho);
    Ok(LiftedSdp {
        dim: problem.dim,
        cost: problem.cost.add(&shift),
        ineq: problem.ineq.clone(),
        fixed_diag: problem.fixed_diag.clone(),
    })
}

/// Result of the DC decoding-vector solve.
#[derive(Debug, Clone)]
pub struct P1Outcome {
    /// Extracted decoding vector, rescaled so `min_k |m^H h_k|^2 = 1`
    /// exactly.
    pub m: CVector,
    /// Final lifted iterate `M`.
    pub lifted: HermitianMatrix,
    pub trace: DcTrace,
    /// Whether the terminal relative penalty was within `feas_tol`.
    pub rank_one: bool,
}

/// Penalized objective of the decoding problem at an iterate:
/// `(1 + rho) Tr(M) - rho ||M||_2`.
fn p1_objective(x: &HermitianMatrix, rho: f64) -> Result<(f64, f64)> {
    let trace = x.trace();
    let spec = linalg::spectral_norm(x)?;
    let penalty = trace - spec;
    Ok((trace + rho * penalty, penalty))
}

/// Scaled SDP form of the lifted decoding problem. Physical channel gains
/// are tiny, so the constraint matrices are divided by their mean trace
/// `gamma` (the lifted variable scales by `gamma` in return); the solver
/// behaves badly on the raw units. Returns the problem and `gamma`.
pub(crate) fn p1_base(lifted: &LiftedP1) -> Result<(LiftedSdp, f64)> {
    let n = lifted.dim();
    let k_users = lifted.users();
    if n == 0 || k_users == 0 {
        return Err(Error::InvalidInput("empty lifted decoding problem".into()));
    }
    let gamma = lifted.h.iter().map(|h| h.trace()).sum::<f64>() / k_users as f64;
    if !(gamma > 0.0) {
        return Err(Error::DegenerateChannel(
            "all effective channels are zero".into(),
        ));
    }
    let base = LiftedSdp {
        dim: n,
        cost: HermitianMatrix::identity(n),
        ineq: lifted.h.iter().map(|h| (h.scaled(1.0 / gamma), 1.0)).collect(),
        fixed_diag: vec![],
    };
    Ok((base, gamma))
}

/// SDP form of the lifted phase-feasibility problem (already O(1)-scaled
/// because the diagonal is pinned to one).
pub(crate) fn p2_base(lifted: &LiftedP2) -> LiftedSdp {
    let n = lifted.dim();
    LiftedSdp {
        dim: n,
        cost: HermitianMatrix::zeros(n),
        ineq: lifted
            .r
            .iter()
            .zip(&lifted.c)
            .map(|(r, c)| (r.clone(), 1.0 - c.norm_sqr()))
            .collect(),
        fixed_diag: (0..n).map(|i| (i, 1.0)).collect(),
    }
}

#[doc(hidden)]
pub fn p2_base_public(lifted: &LiftedP2) -> LiftedSdp {
    p2_base(lifted)
}

#[doc(hidden)]
pub fn p1_base_public(lifted: &crate::model::LiftedP1) -> crate::error::Result<(LiftedSdp, f64)> {
    p1_base(lifted)
}


/// Relative rank-one penalty `(Tr X - ||X||_2) / Tr X`.
pub(crate) fn relative_penalty(x: &HermitianMatrix) -> Result<f64> {
    Ok(rank1_penalty(x)? / x.trace().max(f64::MIN_POSITIVE))
}

/// Deterministic tie-break for the DC starting point.
///
/// An initialization with a degenerate leading eigenvalue (e.g. a
/// diagonal relaxation solution of a symmetric instance) gives the first
/// linearization an arbitrary eigenvector whose cost can be indifferent to
/// exactly the directions the iteration needs; a tiny fixed rank-one bump
/// breaks the tie without measurably moving a generic starting point.
fn tie_break_init(x: &HermitianMatrix) -> HermitianMatrix {
    use rand::{Rng, SeedableRng};
    let n = x.dim();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7ae5_eed0 ^ n as u64);
    let mut g = CVector::from_fn(n, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let norm = g.norm();
    if norm == 0.0 {
        return x.clone();
    }
    g /= C64::new(norm, 0.0);
    let eps = 1e-6 * x.trace().abs().max(1e-30);
    x.add(&HermitianMatrix::from_outer(&g).scaled(eps))
}

/// Solve the lifted decoding problem by the DC iteration.
///
/// All reported objective values are in the original (unscaled) problem
/// units.
pub fn dc_solve_p1(
    lifted: &LiftedP1,
    params: &DcParams,
    sdp_params: &SdpParams,
    init: Option<&HermitianMatrix>,
) -> Result<P1Outcome> {
    params.validate()?;
    let (base, gamma) = p1_base(lifted)?;
    let n = base.dim;

    let mut trace = DcTrace::default();
    let start = match init {
        Some(x0) => x0.scaled(gamma),
        None => match params.init {
            DcInit::SdrRelaxation => {
                let sdr = sdp::solve_sdp(&base, sdp_params, None)?;
                if sdr.status == SolveStatus::InfeasibleSuspected {
                    return Err(Error::SolverFailure(
                        "SDR initialization of the decoding problem reported infeasible".into(),
                    ));
                }
                sdr.x
            }
            DcInit::Identity => {
                // alpha I with alpha = 1 / min_k Tr(H'_k) is feasible
                let min_tr = base
                    .ineq
                    .iter()
                    .map(|(h, _)| h.trace())
                    .fold(f64::INFINITY, f64::min);
                if !(min_tr > 0.0) {
                    return Err(Error::DegenerateChannel("a user channel is zero".into()));
                }
                HermitianMatrix::identity(n).scaled(1.0 / min_tr)
            }
        },
    };
    let mut x = tie_break_init(&start);

    let (mut objective, mut penalty) = p1_objective(&x, params.rho)?;
    trace.steps.push(DcIteration {
        objective: objective / gamma,
        penalty: penalty / gamma,
        solver_status: SolveStatus::Optimal,
    });

    for _ in 0..params.max_dc_iters {
        let sub = dc_iterate(&base, &x, params.rho)?;
        let sol = sdp::solve_sdp(&sub, sdp_params, Some(&x))?;
        if sol.status == SolveStatus::InfeasibleSuspected {
            return Err(Error::SolverFailure(format!(
                "DC subproblem reported infeasible after {} accepted iterations",
                trace.len()
            )));
        }
        let (new_objective, new_penalty) = p1_objective(&sol.x, params.rho)?;
        // majorization guarantees descent for exact subproblem solutions;
        // reject ascent caused by solver tolerance and stop
        if new_objective > objective * (1.0 + 1e-9) + 1e-15 {
            break;
        }
        let decrease = objective - new_objective;
        x = sol.x;
        objective = new_objective;
        penalty = new_penalty;
        trace.steps.push(DcIteration {
            objective: objective / gamma,
            penalty: penalty / gamma,
            solver_status: sol.status,
        });
        if decrease < params.eps_dc * objective.abs().max(1.0) {
            break;
        }
    }

    let rel_penalty = penalty / x.trace().max(f64::MIN_POSITIVE);
    let rank_one = rel_penalty <= params.feas_tol;

    // back to original units and rescale onto the feasibility boundary
    let mut m = linalg::leading_rank1_factor(&x)?.map(|z| z / C64::new(gamma.sqrt(), 0.0));
    let min_gain = lifted
        .h
        .iter()
        .map(|h| linalg::herm_inner(&HermitianMatrix::from_outer(&m), h))
        .fold(f64::INFINITY, f64::min);
    if !(min_gain > 0.0) {
        return Err(Error::DegenerateChannel(
            "extracted decoding vector is orthogonal to a channel".into(),
        ));
    }
    m /= C64::new(min_gain.sqrt(), 0.0);

    Ok(P1Outcome {
        m,
        lifted: x.scaled(1.0 / gamma),
        trace,
        rank_one,
    })
}

/// Result of the DC phase-feasibility solve.
#[derive(Debug, Clone)]
pub struct P2Outcome {
    /// Whether a rank-one feasible point was certified.
    pub feasible: bool,
    /// Unit-modulus homogenized vector `[v; t]`, present when feasible.
    pub v_tilde: Option<CVector>,
    pub trace: DcTrace,
}

/// Consecutive near-stationary iterations with a large penalty before the
/// phase problem is declared infeasible.
const P2_STALL_ITERS: usize = 5;

/// Detect feasibility of the lifted phase problem by driving
/// `Tr(V) - ||V||_2` to zero under the homogenized constraints.
pub fn dc_solve_p2(
    lifted: &LiftedP2,
    params: &DcParams,
    sdp_params: &SdpParams,
    init: Option<&HermitianMatrix>,
) -> Result<P2Outcome> {
    params.validate()?;
    let n = lifted.dim();
    let base = p2_base(lifted);

    let mut trace = DcTrace::default();
    let start = match init {
        Some(x0) => x0.clone(),
        None => match params.init {
            DcInit::SdrRelaxation => {
                let sdr = sdp::solve_sdp(&base, sdp_params, None)?;
                if sdr.status == SolveStatus::InfeasibleSuspected {
                    trace.steps.push(DcIteration {
                        objective: f64::INFINITY,
                        penalty: f64::INFINITY,
                        solver_status: sdr.status,
                    });
                    return Ok(P2Outcome {
                        feasible: false,
                        v_tilde: None,
                        trace,
                    });
                }
                sdr.x
            }
            DcInit::Identity => HermitianMatrix::identity(n),
        },
    };
    let mut x = tie_break_init(&start);

    let mut objective = rank1_penalty(&x)?;
    trace.steps.push(DcIteration {
        objective,
        penalty: objective,
        solver_status: SolveStatus::Optimal,
    });

    let feas_threshold = |x: &HermitianMatrix| params.feas_tol * x.trace().max(1.0);
    let mut penalty_ok = objective <= feas_threshold(&x);
    let mut stall = 0usize;

    if !penalty_ok {
        for _ in 0..params.max_dc_iters {
            let sub = dc_iterate(&base, &x, 1.0)?;
            let sol = sdp::solve_sdp(&sub, sdp_params, Some(&x))?;
            if sol.status == SolveStatus::InfeasibleSuspected {
                trace.steps.push(DcIteration {
                    objective,
                    penalty: objective,
                    solver_status: sol.status,
                });
                return Ok(P2Outcome {
                    feasible: false,
                    v_tilde: None,
                    trace,
                });
            }
            let new_objective = rank1_penalty(&sol.x)?;
            if new_objective > objective * (1.0 + 1e-9) + 1e-15 {
                break;
            }
            let decrease = objective - new_objective;
            x = sol.x;
            objective = new_objective;
            trace.steps.push(DcIteration {
                objective,
                penalty: objective,
                solver_status: sol.status,
            });
            if objective <= feas_threshold(&x) {
                penalty_ok = true;
                break;
            }
            if decrease < params.eps_dc * objective.abs().max(1.0) {
                stall += 1;
                if stall >= P2_STALL_ITERS {
                    break;
                }
            } else {
                stall = 0;
            }
        }
    }

    if !penalty_ok {
        return Ok(P2Outcome {
            feasible: false,
            v_tilde: None,
            trace,
        });
    }

    // extract, repair onto the unit-modulus manifold (projection plus a
    // margin-seeking phase refinement), and re-check the original
    // constraints against the repaired vector
    let factor = linalg::leading_rank1_factor(&x)?;
    let repaired = project_unit_modulus(&factor).map(|unit| {
        let v = refine_phase_margin(lifted, &dehomogenize(&unit), 3);
        let mut vt = CVector::zeros(n);
        for (i, z) in v.iter().enumerate() {
            vt[i] = *z;
        }
        vt[n - 1] = C64::new(1.0, 0.0);
        (lifted.min_constraint_value(&v), vt)
    });
    match repaired {
        Some((min_value, vt)) if min_value >= 1.0 - 1e-6 => Ok(P2Outcome {
            feasible: true,
            v_tilde: Some(vt),
            trace,
        }),
        _ => Ok(P2Outcome {
            feasible: false,
            v_tilde: None,
            trace,
        }),
    }
}

/// Cyclic coordinate ascent on `min_k |a_k^H v + c_k|^2` over unit-modulus
/// `v`, starting from (and never falling below) the given point.
///
/// Part of the rank-one repair: extraction and modulus projection knock a
/// boundary-feasible solution a few parts in 1e5 outside the constraints,
/// and the feasibility recheck would reject it. Restricted to one
/// coordinate every constraint is a sinusoid in the phase, so each step
/// maximizes the minimum of K sinusoids by a nested grid search; the
/// current phase is always a candidate, making every accepted step
/// monotone.
pub(crate) fn refine_phase_margin(lifted: &LiftedP2, v: &CVector, sweeps: usize) -> CVector {
    let m = v.len();
    if m == 0 || lifted.users() == 0 {
        return v.clone();
    }
    let mut v = v.clone();
    // z_k = a_k^H v + c_k, maintained incrementally
    let mut z: Vec<C64> = (0..lifted.users())
        .map(|k| lifted.a[k].dotc(&v) + lifted.c[k])
        .collect();

    for _ in 0..sweeps {
        for i in 0..m {
            // per constraint: |rest_k + conj(a_k[i]) e^{j t}|^2
            let rests: Vec<C64> = (0..lifted.users())
                .map(|k| z[k] - lifted.a[k][i].conj() * v[i])
                .collect();
            let value_at = |t: f64| -> f64 {
                let phase = C64::from_polar(1.0, t);
                rests
                    .iter()
                    .enumerate()
                    .map(|(k, rest)| (rest + lifted.a[k][i].conj() * phase).norm_sqr())
                    .fold(f64::INFINITY, f64::min)
            };
            let current_t = v[i].arg();
            let mut best_t = current_t;
            let mut best_val = value_at(current_t);
            let mut center = 0.0;
            let mut span = std::f64::consts::TAU;
            for level in 0..3 {
                let points = if level == 0 { 128 } else { 32 };
                for p in 0..points {
                    let t = center - span / 2.0 + span * (p as f64 + 0.5) / points as f64;
                    let val = value_at(t);
                    if val > best_val {
                        best_val = val;
                        best_t = t;
                    }
                }
                center = best_t;
                span = 2.0 * span / points as f64;
            }
            if best_t != current_t {
                let phase = C64::from_polar(1.0, best_t);
                for (k, rest) in rests.iter().enumerate() {
                    z[k] = rest + lifted.a[k][i].conj() * phase;
                }
                v[i] = phase;
            }
        }
    }
    v
}

/// Entry-wise projection onto unit modulus; `None` if any entry is too
/// small to carry a phase.
pub(crate) fn project_unit_modulus(v: &CVector) -> Option<CVector> {
    if v.iter().any(|z| z.norm() <= 1e-9) {
        return None;
    }
    Some(v.map(|z| z / C64::new(z.norm(), 0.0)))
}

/// Strip the homogenizing entry: `v_m = v~_m / v~_last` for unit-modulus
/// input this is a phase rotation.
pub(crate) fn dehomogenize(v_tilde: &CVector) -> CVector {
    let n = v_tilde.len();
    let t = v_tilde[n - 1];
    CVector::from_iterator(n - 1, v_tilde.iter().take(n - 1).map(|z| z / t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::SeededRng;
    use crate::linalg::CMatrix;
    use crate::model::{build_p1, build_p2, EffectiveChannels};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag(entries: &[f64]) -> HermitianMatrix {
        let n = entries.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(e, 0.0);
        }
        HermitianMatrix::new(m).unwrap()
    }

    #[test]
    fn rank1_penalty_values() {
        let mut rng = SeededRng::new(1);
        let v = rng.complex_normal_vector(4);
        let x = HermitianMatrix::from_outer(&v);
        assert!(rank1_penalty(&x).unwrap().abs() < 1e-10 * x.trace());
        assert!((rank1_penalty(&HermitianMatrix::identity(2)).unwrap() - 1.0).abs() < 1e-12);
        assert!((rank1_penalty(&diag(&[3.0, 2.0, 1.0])).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn dc_iterate_cost_shift() {
        let base = LiftedSdp {
            dim: 2,
            cost: HermitianMatrix::identity(2),
            ineq: vec![(HermitianMatrix::identity(2), 1.0)],
            fixed_diag: vec![],
        };
        let point = diag(&[1.0, 0.0]); // e1 e1^H

        // rho = 0: cost unchanged
        let sub0 = dc_iterate(&base, &point, 0.0).unwrap();
        assert!(sub0.cost.sub(&base.cost).frobenius_norm() < 1e-14);

        // rho > 0: cost = C + rho (I - e1 e1^H)
        let rho = 2.5;
        let sub = dc_iterate(&base, &point, rho).unwrap();
        let expected = base
            .cost
            .add(&HermitianMatrix::identity(2).sub(&point).scaled(rho));
        assert!(sub.cost.sub(&expected).frobenius_norm() < 1e-12);
        assert_eq!(sub.ineq.len(), base.ineq.len());
    }

    #[test]
    fn dc_iterate_majorizes_penalized_objective() {
        // for any PSD Y: <C + rho(I - vv^H), Y> >= <C,Y> + rho*penalty(Y)
        // up to the constant -rho ||X||_2 shift
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let n = 3;
            let raw = CMatrix::from_fn(n, n, |_, _| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let x = HermitianMatrix::new(&raw * raw.adjoint()).unwrap();
            let raw2 = CMatrix::from_fn(n, n, |_, _| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let y = HermitianMatrix::new(&raw2 * raw2.adjoint()).unwrap();
            let base = LiftedSdp {
                dim: n,
                cost: HermitianMatrix::identity(n),
                ineq: vec![],
                fixed_diag: vec![],
            };
            let rho = 1.7;
            let sub = dc_iterate(&base, &x, rho).unwrap();
            let surrogate = linalg::herm_inner(&sub.cost, &y)
                + rho * linalg::spectral_norm(&x).unwrap();
            let true_objective = linalg::herm_inner(&base.cost, &y)
                + rho * rank1_penalty(&y).unwrap();
            assert!(
                surrogate >= true_objective - 1e-9 * true_objective.abs().max(1.0),
                "majorization violated: {surrogate} < {true_objective}"
            );
        }
    }

    fn single_user_lifted(h: &CVector) -> LiftedP1 {
        build_p1(&EffectiveChannels { h_eff: vec![h.clone()] })
    }

    #[test]
    fn p1_single_user_matched_filter() {
        let mut rng = SeededRng::new(3);
        for _ in 0..5 {
            let h = rng.complex_normal_vector(4).map(|z| z * 1e-4);
            let lifted = single_user_lifted(&h);
            let out = dc_solve_p1(&lifted, &DcParams::default(), &SdpParams::default(), None)
                .unwrap();
            assert!(out.rank_one);
            let expected_norm_sq = 1.0 / h.norm_squared();
            assert!(
                (out.m.norm_squared() - expected_norm_sq).abs() <= 1e-4 * expected_norm_sq,
                "norm^2 {} vs {}",
                out.m.norm_squared(),
                expected_norm_sq
            );
            // m is h / ||h||^2 up to global phase
            let aligned = out.m.dotc(&h).norm();
            assert!((aligned - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn p1_two_orthogonal_channels() {
        let h1 = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let h2 = CVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let lifted = build_p1(&EffectiveChannels { h_eff: vec![h1, h2] });
        let out =
            dc_solve_p1(&lifted, &DcParams::default(), &SdpParams::default(), None).unwrap();
        // brute force on the 2D parameterization |m1| >= 1, |m2| >= 1
        // gives ||m||^2 = 2
        assert!((out.m.norm_squared() - 2.0).abs() < 1e-4);
        for h in &lifted.h {
            let gain = linalg::herm_inner(&HermitianMatrix::from_outer(&out.m), h);
            assert!(gain >= 1.0 - 1e-6);
        }
    }

    #[test]
    fn p1_trace_is_monotone_and_feasible() {
        let mut rng = SeededRng::new(4);
        for trial in 0..5 {
            let k = 2 + trial % 3;
            let n = 3 + trial % 2;
            let h: Vec<CVector> = (0..k)
                .map(|_| rng.complex_normal_vector(n).map(|z| z * 1e-5))
                .collect();
            let lifted = build_p1(&EffectiveChannels { h_eff: h });
            let out = dc_solve_p1(&lifted, &DcParams::default(), &SdpParams::default(), None)
                .unwrap();
            let objectives: Vec<f64> = out.trace.steps.iter().map(|s| s.objective).collect();
            for w in objectives.windows(2) {
                assert!(
                    w[1] <= w[0] * (1.0 + 1e-9) + 1e-15,
                    "objective rose: {objectives:?}"
                );
            }
            assert!(out.rank_one, "trial {trial} penalty not closed");
            let mm = HermitianMatrix::from_outer(&out.m);
            let min_gain = lifted
                .h
                .iter()
                .map(|h| linalg::herm_inner(&mm, h))
                .fold(f64::INFINITY, f64::min);
            assert!(min_gain >= 1.0 - 1e-6);
            // extraction residual against the lifted iterate
            let resid = mm.sub(&out.lifted).frobenius_norm() / out.lifted.frobenius_norm();
            assert!(resid < 1e-3, "rank-one extraction residual {resid}");
        }
    }

    #[test]
    fn p2_no_constraints_feasible() {
        for elements in [0usize, 2] {
            let lifted = LiftedP2 {
                elements,
                a: vec![],
                c: vec![],
                r: vec![],
            };
            let out =
                dc_solve_p2(&lifted, &DcParams::default(), &SdpParams::default(), None).unwrap();
            assert!(out.feasible, "M = {elements}");
            let vt = out.v_tilde.unwrap();
            assert_eq!(vt.len(), elements + 1);
            for z in vt.iter() {
                assert!((z.norm() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn p2_grid_feasible_instance() {
        // M = 2, K = 2 instance: strong direct terms ensure feasibility,
        // verified against a 64^2 phase grid
        let (ch, mut rng) = crate::model::tests::random_instance(5, 2, 3, 2);
        let m = {
            let mut m = rng.complex_normal_vector(3);
            m /= C64::new(m.norm(), 0.0);
            m
        };
        // build and rescale so constraints are satisfiable with margin
        let lifted_raw = build_p2(&m, &ch);
        let grid_best = phase_grid_best(&lifted_raw, 64);
        let scale = (2.0 / grid_best).sqrt();
        let lifted = build_p2(&m.map(|z| z * scale), &ch);
        assert!(phase_grid_best(&lifted, 64) >= 2.0 - 1e-6);

        let out =
            dc_solve_p2(&lifted, &DcParams::default(), &SdpParams::default(), None).unwrap();
        assert!(out.feasible, "grid-feasible instance declared infeasible");
        let vt = out.v_tilde.unwrap();
        for z in vt.iter() {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
        let v = dehomogenize(&vt);
        assert!(lifted.min_constraint_value(&v) >= 1.0 - 1e-6);
    }

    #[test]
    fn p2_certified_infeasible_instance() {
        // max over unit-modulus v of |a^H v + c| is sum_i |a_i| + |c|;
        // shrink until even that bound is below 1
        let (ch, mut rng) = crate::model::tests::random_instance(6, 2, 3, 2);
        let m = rng.complex_normal_vector(3);
        let raw = build_p2(&m, &ch);
        let worst_user_bound = raw
            .a
            .iter()
            .zip(&raw.c)
            .map(|(a, c)| a.iter().map(|z| z.norm()).sum::<f64>() + c.norm())
            .fold(f64::INFINITY, f64::min);
        let scale = 0.5 / worst_user_bound;
        let lifted = build_p2(&m.map(|z| z * scale), &ch);
        let bound = lifted
            .a
            .iter()
            .zip(&lifted.c)
            .map(|(a, c)| a.iter().map(|z| z.norm()).sum::<f64>() + c.norm())
            .fold(f64::INFINITY, f64::min);
        assert!(bound < 1.0);

        let out =
            dc_solve_p2(&lifted, &DcParams::default(), &SdpParams::default(), None).unwrap();
        assert!(!out.feasible);
        assert!(out.v_tilde.is_none());
    }

    /// Exhaustive oracle: best min-constraint value over a phase grid.
    pub(crate) fn phase_grid_best(lifted: &LiftedP2, points_per_dim: usize) -> f64 {
        let m = lifted.dim() - 1;
        assert_eq!(m, 2, "grid oracle written for M = 2");
        let mut best = f64::NEG_INFINITY;
        for i in 0..points_per_dim {
            let t1 = i as f64 / points_per_dim as f64 * std::f64::consts::TAU;
            for j in 0..points_per_dim {
                let t2 = j as f64 / points_per_dim as f64 * std::f64::consts::TAU;
                let v = CVector::from_vec(vec![
                    C64::from_polar(1.0, t1),
                    C64::from_polar(1.0, t2),
                ]);
                best = best.max(lifted.min_constraint_value(&v));
            }
        }
        best
    }

    #[test]
    fn prop1_equivalence_on_random_and_rank_one_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        for trial in 0..100 {
            let n = 2 + (trial % 5) as usize;
            let x = if trial % 2 == 0 {
                // generic PSD with trace >= 1: penalty and sigma_2 both positive
                let raw = CMatrix::from_fn(n, n, |_, _| {
                    C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                });
                let mut psd = HermitianMatrix::new(&raw * raw.adjoint()).unwrap();
                if psd.trace() < 1.0 {
                    psd = psd.scaled(2.0 / psd.trace());
                }
                psd
            } else {
                // exact rank one with trace >= 1
                let v = CVector::from_fn(n, |_, _| {
                    C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                });
                let x = HermitianMatrix::from_outer(&v);
                x.scaled(2.0 / x.trace())
            };
            let penalty_zero = rank1_penalty(&x).unwrap() <= 1e-10;
            let eig = linalg::eigh(&x).unwrap();
            let sigma2_zero = eig.eigenvalues[1] <= 1e-8 * eig.eigenvalues[0];
            assert_eq!(penalty_zero, sigma2_zero, "trial {trial}");
            checked += 1;
        }
        assert_eq!(checked, 100);
    }
}
