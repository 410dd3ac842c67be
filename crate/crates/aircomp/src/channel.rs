//! Deployment geometry and random channel generation.
//!
//! A 3D scene with an access point, an IRS, and users placed uniformly in a
//! ground-plane rectangle. All links are i.i.d. Rayleigh with a distance
//! power-law path loss; one [`ChannelSet`] holds a single realization of
//! the direct, user-to-IRS, and IRS-to-AP channels.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{C64, CMatrix, CVector};

/// Axis-aligned user placement rectangle in the z = 0 plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserRegion {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

/// Scene geometry, dimensions, and power/path-loss parameters.
///
/// Defaults mirror the reference deployment: AP at (0, 0, 25) m, IRS at
/// (50, 50, 40) m, users uniform over [-50, 50] x [50, 150] m, 30 dB
/// reference path loss at 1 m, exponents 3.5 / 2.2 / 2.8 for the
/// AP-user / AP-IRS / IRS-user links, and a 30 dB transmit SNR realized as
/// `sigma2 = 1`, `p0 = 1000`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Scenario {
    pub ap_position: [f64; 3],
    pub irs_position: [f64; 3],
    pub user_region: UserRegion,
    /// Number of users K.
    pub users: usize,
    /// Number of AP antennas N.
    pub ap_antennas: usize,
    /// Number of IRS elements M.
    pub irs_elements: usize,
    /// Reference path loss at distance `d0`, in dB.
    pub t0_db: f64,
    /// Reference distance in meters.
    pub d0: f64,
    pub alpha_direct: f64,
    pub alpha_ap_irs: f64,
    pub alpha_irs_user: f64,
    /// Maximum per-user transmit power (linear).
    pub p0: f64,
    /// Noise power (linear).
    pub sigma2: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            ap_position: [0.0, 0.0, 25.0],
            irs_position: [50.0, 50.0, 40.0],
            user_region: UserRegion {
                x: [-50.0, 50.0],
                y: [50.0, 150.0],
            },
            users: 8,
            ap_antennas: 10,
            irs_elements: 15,
            t0_db: 30.0,
            d0: 1.0,
            alpha_direct: 3.5,
            alpha_ap_irs: 2.2,
            alpha_irs_user: 2.8,
            p0: 1000.0,
            sigma2: 1.0,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.users < 1 || self.ap_antennas < 1 || self.irs_elements < 1 {
            return Err(Error::InvalidInput(
                "users, ap_antennas and irs_elements must all be >= 1".into(),
            ));
        }
        if !(self.d0 > 0.0) {
            return Err(Error::InvalidInput("d0 must be positive".into()));
        }
        if !(self.alpha_direct > 0.0 && self.alpha_ap_irs > 0.0 && self.alpha_irs_user > 0.0) {
            return Err(Error::InvalidInput("path-loss exponents must be positive".into()));
        }
        if !(self.p0 > 0.0) {
            return Err(Error::InvalidInput("p0 must be positive".into()));
        }
        if !(self.sigma2 > 0.0) {
            return Err(Error::InvalidInput("sigma2 must be positive".into()));
        }
        if self.user_region.x[0] > self.user_region.x[1]
            || self.user_region.y[0] > self.user_region.y[1]
        {
            return Err(Error::InvalidInput("user_region bounds are inverted".into()));
        }
        Ok(())
    }
}

/// One realization of all channels for a scene: `h_direct[k]` is the
/// user-k-to-AP channel (dim N), `h_irs_user[k]` the user-k-to-IRS channel
/// (dim M), and `g` the N x M IRS-to-AP matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h_direct: Vec<CVector>,
    pub h_irs_user: Vec<CVector>,
    pub g: CMatrix,
}

impl ChannelSet {
    pub fn users(&self) -> usize {
        self.h_direct.len()
    }

    pub fn ap_antennas(&self) -> usize {
        self.g.nrows()
    }

    pub fn irs_elements(&self) -> usize {
        self.g.ncols()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.users();
        if k == 0 {
            return Err(Error::InvalidInput("channel set has no users".into()));
        }
        if self.h_irs_user.len() != k {
            return Err(Error::InvalidInput(
                "h_direct and h_irs_user user counts differ".into(),
            ));
        }
        let n = self.ap_antennas();
        let m = self.irs_elements();
        for h in &self.h_direct {
            if h.len() != n {
                return Err(Error::InvalidInput("direct channel dimension mismatch".into()));
            }
        }
        for h in &self.h_irs_user {
            if h.len() != m {
                return Err(Error::InvalidInput("IRS channel dimension mismatch".into()));
            }
        }
        let finite = self
            .h_direct
            .iter()
            .chain(self.h_irs_user.iter())
            .flat_map(|v| v.iter())
            .chain(self.g.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(Error::InvalidInput("channel set has non-finite entries".into()));
        }
        Ok(())
    }

    /// Copy with the IRS-to-AP matrix zeroed: the reflected path removed.
    pub fn without_reflection(&self) -> Self {
        Self {
            h_direct: self.h_direct.clone(),
            h_irs_user: self.h_irs_user.clone(),
            g: CMatrix::zeros(self.g.nrows(), self.g.ncols()),
        }
    }

    /// Hex digest of the channel contents; identical digests certify that
    /// two algorithm runs consumed the same realization.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        let mut feed = |z: &C64| {
            hasher.update(z.re.to_le_bytes());
            hasher.update(z.im.to_le_bytes());
        };
        for h in &self.h_direct {
            h.iter().for_each(&mut feed);
        }
        for h in &self.h_irs_user {
            h.iter().for_each(&mut feed);
        }
        self.g.iter().for_each(&mut feed);
        let out = hasher.finalize();
        out[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Stage-mixing constants from splitmix64.
const SEED_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 finalizer; used to derive independent substream seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(SEED_GAMMA);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a substream seed from a base seed and a stream label, e.g. one
/// per (sweep point, trial) pair. Distinct labels give statistically
/// independent ChaCha streams.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(stream))
}

/// Deterministic, platform-independent random stream (ChaCha8 keyed by a
/// 64-bit seed). Identical seeds reproduce identical draws everywhere.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    rng: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// A fresh independent stream labeled by `stream`, derived from this
    /// stream's seed without consuming state.
    pub fn substream(&self, stream: u64) -> Self {
        Self::new(derive_seed(self.seed, stream))
    }

    /// Uniform draw from `[low, high)`; returns `low` for a degenerate
    /// interval.
    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        if high > low {
            low + (high - low) * self.rng.random::<f64>()
        } else {
            low
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Standard circularly-symmetric complex Gaussian CN(0, 1): real and
    /// imaginary parts independent N(0, 1/2).
    pub fn complex_normal(&mut self) -> C64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    }

    pub fn complex_normal_vector(&mut self, dim: usize) -> CVector {
        DVector::from_fn(dim, |_, _| self.complex_normal())
    }
}

/// Power-law path loss `10^(-t0_db/10) * (d/d0)^(-alpha)` as a linear gain.
pub fn path_loss(d: f64, alpha: f64, t0_db: f64, d0: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::InvalidInput(format!(
            "path_loss requires a positive distance, got {d}"
        )));
    }
    Ok(10f64.powf(-t0_db / 10.0) * (d / d0).powf(-alpha))
}

pub fn euclidean_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Place K users uniformly in the scenario's ground rectangle (z = 0).
pub fn place_users(scenario: &Scenario, rng: &mut SeededRng) -> Vec<[f64; 3]> {
    (0..scenario.users)
        .map(|_| {
            let x = rng.uniform(scenario.user_region.x[0], scenario.user_region.x[1]);
            let y = rng.uniform(scenario.user_region.y[0], scenario.user_region.y[1]);
            [x, y, 0.0]
        })
        .collect()
}

/// Draw one Rayleigh-fading channel realization for the given user
/// positions: each link is `sqrt(L(d)) * CN(0, I)` with the per-link
/// path-loss exponent from the scenario.
pub fn gen_channels(
    scenario: &Scenario,
    positions: &[[f64; 3]],
    rng: &mut SeededRng,
) -> Result<ChannelSet> {
    if positions.len() != scenario.users {
        return Err(Error::InvalidInput(format!(
            "expected {} user positions, got {}",
            scenario.users,
            positions.len()
        )));
    }
    let n = scenario.ap_antennas;
    let m = scenario.irs_elements;

    let mut h_direct = Vec::with_capacity(positions.len());
    for &pos in positions {
        let d = euclidean_distance(pos, scenario.ap_position);
        let gain = path_loss(d, scenario.alpha_direct, scenario.t0_db, scenario.d0)
            .map_err(|_| Error::InvalidInput("user coincides with the AP position".into()))?;
        let amp = gain.sqrt();
        h_direct.push(rng.complex_normal_vector(n).map(|z| z * amp));
    }

    let mut h_irs_user = Vec::with_capacity(positions.len());
    for &pos in positions {
        let d = euclidean_distance(pos, scenario.irs_position);
        let gain = path_loss(d, scenario.alpha_irs_user, scenario.t0_db, scenario.d0)
            .map_err(|_| Error::InvalidInput("user coincides with the IRS position".into()))?;
        let amp = gain.sqrt();
        h_irs_user.push(rng.complex_normal_vector(m).map(|z| z * amp));
    }

    let d_ap_irs = euclidean_distance(scenario.ap_position, scenario.irs_position);
    let gain = path_loss(d_ap_irs, scenario.alpha_ap_irs, scenario.t0_db, scenario.d0)
        .map_err(|_| Error::InvalidInput("AP and IRS positions coincide".into()))?;
    let amp = gain.sqrt();
    // row-major draw order keeps realizations reproducible
    let mut g = CMatrix::zeros(n, m);
    for r in 0..n {
        for c in 0..m {
            g[(r, c)] = rng.complex_normal() * amp;
        }
    }

    let set = ChannelSet {
        h_direct,
        h_irs_user,
        g,
    };
    set.validate()?;
    Ok(set)
}
