//! AirComp system math: effective channels, optimal transmit scalars, MSE
//! formulas, and the matrix-lifted problem builders.
//!
//! For a decoding vector `m`, phases `theta`, and effective channels
//! `h_k = G diag(e^{j theta}) h^r_k + h^d_k`, the optimal transmit scalars
//! invert each user's effective gain at the maximum power the worst user
//! can afford, which collapses the MSE to
//! `sigma2 ||m||^2 / (p0 min_k |m^H h_k|^2)`.
//!
//! The two lifted problems:
//! - decoding step: minimize `Tr(M)` over PSD rank-one `M = m m^H` with
//!   `Tr(M H_k) >= 1`, `H_k = h_k h_k^H`;
//! - phase step: find rank-one PSD `V = v~ v~^H` with unit diagonal and
//!   `Re Tr(R_k V) + |c_k|^2 >= 1`, where `v~` stacks the unit-modulus
//!   phase vector with a homogenizing scalar.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::channel::{ChannelSet, SeededRng};
use crate::error::{Error, Result};
use crate::linalg::{C64, CMatrix, CVector, HermitianMatrix};

/// Tolerance below which an inner product `m^H h_k` is treated as zero and
/// the design declared degenerate.
const DEGENERATE_TOL: f64 = 0.0;

/// IRS phase-shift vector with unit reflection amplitude; entries are
/// canonically wrapped into `[0, 2*pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    theta: Vec<f64>,
}

impl PhaseConfig {
    pub fn new(theta: Vec<f64>) -> Self {
        Self {
            theta: theta.into_iter().map(wrap_phase).collect(),
        }
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            theta: vec![0.0; m],
        }
    }

    pub fn uniform_random(m: usize, rng: &mut SeededRng) -> Self {
        Self {
            theta: (0..m).map(|_| rng.uniform(0.0, TAU)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.theta
    }

    /// The unit-modulus vector `v` with `v_m = e^{j theta_m}`.
    pub fn unit_phasors(&self) -> CVector {
        CVector::from_iterator(self.theta.len(), self.theta.iter().map(|&t| C64::from_polar(1.0, t)))
    }
}

fn wrap_phase(t: f64) -> f64 {
    let mut w = t.rem_euclid(TAU);
    // rem_euclid can return TAU itself for tiny negative inputs
    if w >= TAU {
        w -= TAU;
    }
    w
}

/// Per-user combined AP-side channels `h_k = G diag(e^{j theta}) h^r_k + h^d_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannels {
    pub h_eff: Vec<CVector>,
}

impl EffectiveChannels {
    pub fn users(&self) -> usize {
        self.h_eff.len()
    }
}

/// Combine the reflected and direct paths under the given phase shifts.
pub fn effective_channels(channels: &ChannelSet, phases: &PhaseConfig) -> EffectiveChannels {
    assert_eq!(
        phases.len(),
        channels.irs_elements(),
        "phase vector length must match the IRS element count"
    );
    let v = phases.unit_phasors();
    let h_eff = channels
        .h_direct
        .iter()
        .zip(channels.h_irs_user.iter())
        .map(|(hd, hr)| {
            if v.is_empty() {
                hd.clone()
            } else {
                // G * (v .* h^r) + h^d
                let reflected = &channels.g * hr.component_mul(&v);
                reflected + hd
            }
        })
        .collect();
    EffectiveChannels { h_eff }
}

/// The per-user received amplitudes `|m^H h_k|^2`, shared by several
/// formulas below.
fn channel_gains(m: &CVector, eff: &EffectiveChannels) -> Vec<f64> {
    eff.h_eff.iter().map(|h| m.dotc(h).norm_sqr()).collect()
}

/// Normalizing factor `eta = p0 * min_k |m^H h_k|^2`.
pub fn normalizing_factor(m: &CVector, eff: &EffectiveChannels, p0: f64) -> Result<f64> {
    let gains = channel_gains(m, eff);
    let min = gains.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > DEGENERATE_TOL) {
        return Err(Error::DegenerateChannel(format!(
            "m is orthogonal to an effective channel (min |m^H h_k|^2 = {min:.3e})"
        )));
    }
    Ok(p0 * min)
}

/// Optimal transmit scalars `w_k = sqrt(eta) (m^H h_k)^H / |m^H h_k|^2`.
pub fn transmit_scalars(m: &CVector, eff: &EffectiveChannels, eta: f64) -> Result<Vec<C64>> {
    eff.h_eff
        .iter()
        .map(|h| {
            let inner = m.dotc(h);
            let gain = inner.norm_sqr();
            if !(gain > DEGENERATE_TOL) {
                return Err(Error::DegenerateChannel(
                    "m is orthogonal to an effective channel".into(),
                ));
            }
            Ok(inner.conj() * (eta.sqrt() / gain))
        })
        .collect()
}

/// Decoding vector, transmit scalars, and normalizing factor bundled for a
/// fixed phase configuration.
#[derive(Debug, Clone)]
pub struct TransceiverDesign {
    pub decoding: CVector,
    pub transmit: Vec<C64>,
    pub eta: f64,
}

/// Build the full transceiver for a decoding vector: the optimal `w_k` at
/// the largest `eta` the per-user power budget allows.
pub fn design_transceiver(m: &CVector, eff: &EffectiveChannels, p0: f64) -> Result<TransceiverDesign> {
    let eta = normalizing_factor(m, eff, p0)?;
    let transmit = transmit_scalars(m, eff, eta)?;
    Ok(TransceiverDesign {
        decoding: m.clone(),
        transmit,
        eta,
    })
}

/// MSE for arbitrary transmit scalars:
/// `sum_k |m^H h_k w_k / sqrt(eta) - 1|^2 + sigma2 ||m||^2 / eta`.
pub fn mse_general(m: &CVector, w: &[C64], eff: &EffectiveChannels, eta: f64, sigma2: f64) -> f64 {
    assert_eq!(w.len(), eff.users());
    assert!(eta > 0.0, "eta must be positive");
    let inv_sqrt_eta = 1.0 / eta.sqrt();
    let signal: f64 = eff
        .h_eff
        .iter()
        .zip(w.iter())
        .map(|(h, wk)| {
            let z = m.dotc(h) * wk * inv_sqrt_eta - C64::new(1.0, 0.0);
            z.norm_sqr()
        })
        .sum();
    signal + sigma2 * m.norm_squared() / eta
}

/// MSE at the optimal transmit scalars:
/// `sigma2 ||m||^2 / (p0 min_k |m^H h_k|^2)`.
pub fn mse_closed_form(m: &CVector, eff: &EffectiveChannels, p0: f64, sigma2: f64) -> Result<f64> {
    let eta = normalizing_factor(m, eff, p0)?;
    Ok(sigma2 * m.norm_squared() / eta)
}

/// Lifted decoding problem data: `H_k = h_k h_k^H`.
#[derive(Debug, Clone)]
pub struct LiftedP1 {
    pub h: Vec<HermitianMatrix>,
}

impl LiftedP1 {
    pub fn dim(&self) -> usize {
        self.h.first().map_or(0, |h| h.dim())
    }

    pub fn users(&self) -> usize {
        self.h.len()
    }
}

/// Lift the per-user quadratic constraints `|m^H h_k|^2 >= 1` into linear
/// trace constraints `Tr(M H_k) >= 1` on `M = m m^H`.
pub fn build_p1(eff: &EffectiveChannels) -> LiftedP1 {
    LiftedP1 {
        h: eff
            .h_eff
            .iter()
            .map(|h| HermitianMatrix::from_outer(h))
            .collect(),
    }
}

/// Lifted phase-feasibility problem data.
///
/// For a fixed decoding vector `m`: `c_k = m^H h^d_k`,
/// `a_k = conj(h^r_k) .* (G^H m)` (so `a_k^H v = m^H G diag(h^r_k) v`), and
/// the homogenized constraint matrix over `v~ = [v; t]` is
/// `R_k = [[a_k a_k^H, a_k c_k], [(a_k c_k)^H, 0]]`.
#[derive(Debug, Clone)]
pub struct LiftedP2 {
    /// IRS element count M.
    pub elements: usize,
    pub a: Vec<CVector>,
    pub c: Vec<C64>,
    pub r: Vec<HermitianMatrix>,
}

impl LiftedP2 {
    /// Dimension of the homogenized vector `v~`, i.e. M + 1.
    pub fn dim(&self) -> usize {
        self.elements + 1
    }

    pub fn users(&self) -> usize {
        self.a.len()
    }

    /// Constraint value `|a_k^H v + c_k|^2` for a phase vector `v`.
    pub fn constraint_value(&self, k: usize, v: &CVector) -> f64 {
        (self.a[k].dotc(v) + self.c[k]).norm_sqr()
    }

    /// Smallest constraint value over all users.
    pub fn min_constraint_value(&self, v: &CVector) -> f64 {
        (0..self.users())
            .map(|k| self.constraint_value(k, v))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Build the homogenized phase-step data from a decoding vector.
pub fn build_p2(m: &CVector, channels: &ChannelSet) -> LiftedP2 {
    let g_adj_m = channels.g.adjoint() * m;
    let mm = channels.irs_elements();
    let mut a = Vec::with_capacity(channels.users());
    let mut c = Vec::with_capacity(channels.users());
    let mut r = Vec::with_capacity(channels.users());
    for k in 0..channels.users() {
        let ak: CVector = channels.h_irs_user[k]
            .map(|z| z.conj())
            .component_mul(&g_adj_m);
        let ck = m.dotc(&channels.h_direct[k]);
        let mut rk = CMatrix::zeros(mm + 1, mm + 1);
        // top-left block a_k a_k^H
        for i in 0..mm {
            for j in 0..mm {
                rk[(i, j)] = ak[i] * ak[j].conj();
            }
        }
        // border column a_k c_k and its conjugate row; bottom-right stays 0
        for i in 0..mm {
            rk[(i, mm)] = ak[i] * ck;
            rk[(mm, i)] = (ak[i] * ck).conj();
        }
        a.push(ak);
        c.push(ck);
        r.push(HermitianMatrix::new(rk).expect("R_k is Hermitian by construction"));
    }
    LiftedP2 {
        elements: mm,
        a,
        c,
        r,
    }
}

/// Recover the phase configuration from a homogenized solution
/// `v~ = [v0; t0]`: `theta_m = arg(v0_m / t0)`.
pub fn recover_phases(v_tilde: &CVector) -> Result<PhaseConfig> {
    let n = v_tilde.len();
    if n < 1 {
        return Err(Error::InvalidInput("empty homogenized vector".into()));
    }
    let t = v_tilde[n - 1];
    if t.norm() <= 1e-9 {
        return Err(Error::PhaseRecovery(format!(
            "homogenizing entry has modulus {:.3e}",
            t.norm()
        )));
    }
    let theta = (0..n - 1).map(|i| (v_tilde[i] / t).arg()).collect();
    Ok(PhaseConfig::new(theta))
}

#[doc(hidden)]
pub mod tests_support {
    use super::*;
    use crate::channel::{gen_channels, place_users, ChannelSet, Scenario};

    pub fn random_instance_public(
        seed: u64,
        users: usize,
        antennas: usize,
        elements: usize,
    ) -> (ChannelSet, SeededRng) {
        let mut scenario = Scenario::default();
        scenario.users = users;
        scenario.ap_antennas = antennas;
        scenario.irs_elements = elements;
        let mut rng = SeededRng::new(seed);
        let pts = place_users(&scenario, &mut rng);
        let ch = gen_channels(&scenario, &pts, &mut rng).unwrap();
        (ch, rng)
    }
}
