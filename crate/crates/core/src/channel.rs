//! Gilbert-Elliott modulated Wiener phase noise, AWGN and phase-domain
//! differential coding.
//!
//! A channel frame spans `N + 1` slots: slot 0 carries the known pilot
//! `s_0 = 1` with `θ_0 = 0`, slots `1..=N` carry data. Differential decoding
//! consumes the pilot, so observation `i` corresponds to channel slot `i + 1`.

use crate::{Complex64, Error, Result};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Hidden channel state of one symbol slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum State {
    Good,
    Bad,
}

impl State {
    /// Trellis index: 0 for good, 1 for bad.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            State::Good => 0,
            State::Bad => 1,
        }
    }

    #[inline]
    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            State::Good
        } else {
            State::Bad
        }
    }

    pub fn symbol(self) -> char {
        match self {
            State::Good => 'G',
            State::Bad => 'B',
        }
    }
}

/// The channel knobs. `sigma2_awgn` is the total complex noise variance with
/// unit symbol energy, so `SNR = 1 / sigma2_awgn`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeChannelParams {
    pub p_gb: f64,
    pub p_bg: f64,
    pub sigma2_g: f64,
    pub sigma2_b: f64,
    pub sigma2_awgn: f64,
}

impl GeChannelParams {
    pub fn new(p_gb: f64, p_bg: f64, sigma2_g: f64, sigma2_b: f64, sigma2_awgn: f64) -> Result<Self> {
        let p = Self {
            p_gb,
            p_bg,
            sigma2_g,
            sigma2_b,
            sigma2_awgn,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameter set used throughout the reported comparisons, at the given SNR.
    pub fn reference(snr_db: f64) -> Self {
        Self {
            p_gb: 2e-4,
            p_bg: 2e-2,
            sigma2_g: 3e-4,
            sigma2_b: 0.12,
            sigma2_awgn: snr_db_to_sigma2(snr_db),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidChannel(msg));
        for (name, p) in [("p_gb", self.p_gb), ("p_bg", self.p_bg)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        if self.p_gb + self.p_bg <= 0.0 {
            return bad("p_gb and p_bg cannot both be zero".into());
        }
        if !(self.sigma2_g >= 0.0) {
            return bad(format!("sigma2_g = {} must be non-negative", self.sigma2_g));
        }
        if !(self.sigma2_b >= self.sigma2_g) {
            return bad(format!(
                "sigma2_b = {} must be at least sigma2_g = {}",
                self.sigma2_b, self.sigma2_g
            ));
        }
        if !(self.sigma2_awgn >= 0.0) || !self.sigma2_awgn.is_finite() {
            return bad(format!("sigma2_awgn = {} must be non-negative", self.sigma2_awgn));
        }
        Ok(())
    }

    /// Long-run fractions of time `(P_G, P_B)`.
    pub fn steady_state(&self) -> (f64, f64) {
        let pg = self.p_bg / (self.p_bg + self.p_gb);
        (pg, 1.0 - pg)
    }

    /// Mean sojourn times `(L_G, L_B)` in symbols.
    pub fn mean_durations(&self) -> (f64, f64) {
        (1.0 / self.p_gb, 1.0 / self.p_bg)
    }

    /// Innovation variance in the given state.
    #[inline]
    pub fn sigma2_state(&self, z: State) -> f64 {
        match z {
            State::Good => self.sigma2_g,
            State::Bad => self.sigma2_b,
        }
    }

    pub fn snr_db(&self) -> f64 {
        -10.0 * self.sigma2_awgn.log10()
    }
}

pub fn snr_db_to_sigma2(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// One draw of the hidden state sequence and the phase trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub states: Vec<State>,
    pub phases: Vec<f64>,
    pub innovations: Vec<f64>,
}

impl ChannelRealization {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Samples `n` states, `z_0` from the steady state.
pub fn sample_states<R: Rng + ?Sized>(n: usize, p: &GeChannelParams, rng: &mut R) -> Vec<State> {
    let (pg, _) = p.steady_state();
    let first = if rng.random::<f64>() < pg {
        State::Good
    } else {
        State::Bad
    };
    sample_states_from(first, n, p, rng)
}

/// Samples `n` states starting from a given `z_0`.
pub fn sample_states_from<R: Rng + ?Sized>(
    first: State,
    n: usize,
    p: &GeChannelParams,
    rng: &mut R,
) -> Vec<State> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let mut z = first;
    out.push(z);
    for _ in 1..n {
        let u: f64 = rng.random();
        z = match z {
            State::Good if u < p.p_gb => State::Bad,
            State::Bad if u < p.p_bg => State::Good,
            s => s,
        };
        out.push(z);
    }
    out
}

/// Wiener phase driven by the state sequence: `θ_0 = 0` and
/// `θ_k = θ_{k-1} + w_k` with `w_k ~ N(0, σ²_{z_k})` for `k >= 1`.
pub fn sample_phase<R: Rng + ?Sized>(
    states: &[State],
    p: &GeChannelParams,
    rng: &mut R,
) -> ChannelRealization {
    let mut phases = Vec::with_capacity(states.len());
    let mut innovations = Vec::with_capacity(states.len());
    let mut theta = 0.0;
    for (k, &z) in states.iter().enumerate() {
        let w = if k == 0 {
            0.0
        } else {
            let g: f64 = StandardNormal.sample(rng);
            g * p.sigma2_state(z).sqrt()
        };
        theta += w;
        phases.push(theta);
        innovations.push(w);
    }
    ChannelRealization {
        states: states.to_vec(),
        phases,
        innovations,
    }
}

/// `s_k = x_k e^{j∠s_{k-1}}` with `s_ref` prepended as slot 0.
pub fn diff_encode(x: &[Complex64], s_ref: Complex64) -> Result<Vec<Complex64>> {
    if s_ref.norm_sqr() == 0.0 {
        return Err(Error::ZeroReference);
    }
    let mut out = Vec::with_capacity(x.len() + 1);
    out.push(s_ref);
    let mut prev = s_ref.arg();
    for &xk in x {
        let s = xk * Complex64::from_polar(1.0, prev);
        prev = s.arg();
        out.push(s);
    }
    Ok(out)
}

/// `r_k = s_k e^{jθ_k} + n_k` with `n_k ~ CN(0, sigma2_awgn)`.
pub fn apply_channel<R: Rng + ?Sized>(
    s: &[Complex64],
    realization: &ChannelRealization,
    p: &GeChannelParams,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if s.len() != realization.len() {
        return Err(Error::LengthMismatch {
            expected: realization.len(),
            actual: s.len(),
        });
    }
    let sd = (p.sigma2_awgn / 2.0).sqrt();
    Ok(s.iter()
        .zip(&realization.phases)
        .map(|(&sk, &theta)| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            sk * Complex64::from_polar(1.0, theta) + Complex64::new(re * sd, im * sd)
        })
        .collect())
}

/// Differentially decoded observations. An erased slot had a zero-magnitude
/// predecessor and carries no information.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    pub y: Vec<Complex64>,
    pub erased: Vec<bool>,
}

impl Observations {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Wraps symbols with no erasures.
    pub fn from_symbols(y: Vec<Complex64>) -> Self {
        let erased = vec![false; y.len()];
        Self { y, erased }
    }
}

/// `y_k = r_k e^{-j∠r_{k-1}}`; the pilot slot is consumed.
pub fn diff_decode(r: &[Complex64]) -> Result<Observations> {
    if r.len() < 2 {
        return Err(Error::LengthMismatch {
            expected: 2,
            actual: r.len(),
        });
    }
    let mut y = Vec::with_capacity(r.len() - 1);
    let mut erased = Vec::with_capacity(r.len() - 1);
    for pair in r.windows(2) {
        let (prev, cur) = (pair[0], pair[1]);
        if prev.norm_sqr() == 0.0 {
            y.push(Complex64::new(0.0, 0.0));
            erased.push(true);
        } else {
            y.push(cur * Complex64::from_polar(1.0, -prev.arg()));
            erased.push(false);
        }
    }
    Ok(Observations { y, erased })
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let w = a - tau * (a / tau).round();
    if w <= -std::f64::consts::PI {
        w + tau
    } else {
        w
    }
}
