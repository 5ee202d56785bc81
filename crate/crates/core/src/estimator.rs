//! Channel-state estimation on the two-state Gilbert-Elliott trellis.
//!
//! All three estimators consume per-slot state log-likelihoods
//! `ℓ_k(z) = log p(y_k | z)` and return per-slot `(P(G), P(B))` pairs plus hard
//! decisions. Metrics are negative log-probabilities (Viterbi, SOVA) or
//! log-probabilities (BCJR); nothing leaves the log domain.

use crate::channel::{GeChannelParams, State};
use crate::likelihood::log_add_exp;
use serde::{Deserialize, Serialize};

/// Default traceback depth of the Viterbi-type estimators and window of the
/// BCJR estimator.
pub const DEFAULT_DEPTH: usize = 100;

/// Trellis description for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TrellisInputs {
    /// `[ℓ_k(G), ℓ_k(B)]` per slot.
    pub state_loglik: Vec<[f64; 2]>,
    /// `log_trans[from][to]`.
    pub log_trans: [[f64; 2]; 2],
    pub log_init: [f64; 2],
}

impl TrellisInputs {
    /// Transition and initial distributions from the channel parameters, the
    /// initial distribution being the steady state.
    pub fn new(state_loglik: Vec<[f64; 2]>, p: &GeChannelParams) -> Self {
        let (pg, pb) = p.steady_state();
        Self {
            state_loglik,
            log_trans: [
                [(1.0 - p.p_gb).ln(), p.p_gb.ln()],
                [p.p_bg.ln(), (1.0 - p.p_bg).ln()],
            ],
            log_init: [pg.ln(), pb.ln()],
        }
    }

    pub fn len(&self) -> usize {
        self.state_loglik.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state_loglik.is_empty()
    }

    /// Negative log branch metric `γ_k(from → to)`.
    #[inline]
    fn gamma(&self, k: usize, from: usize, to: usize) -> f64 {
        -self.state_loglik[k][to] - self.log_trans[from][to]
    }

    /// Total negative log-probability of a state sequence (the path metric).
    pub fn path_metric(&self, path: &[State]) -> f64 {
        let mut m = -self.log_init[path[0].index()] - self.state_loglik[0][path[0].index()];
        for k in 1..path.len() {
            m += self.gamma(k, path[k - 1].index(), path[k].index());
        }
        m
    }
}

/// Per-slot state probabilities and hard decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePosterior {
    /// `[P(G), P(B)]` per slot.
    pub probs: Vec<[f64; 2]>,
    pub hard: Vec<State>,
}

impl StatePosterior {
    /// Degenerate posteriors that put all mass on the given states.
    pub fn from_hard(hard: Vec<State>) -> Self {
        let probs = hard
            .iter()
            .map(|z| match z {
                State::Good => [1.0, 0.0],
                State::Bad => [0.0, 1.0],
            })
            .collect();
        Self { probs, hard }
    }

    /// Posteriors with hard decisions by argmax, ties to G.
    pub fn from_probs(probs: Vec<[f64; 2]>) -> Self {
        let hard = probs
            .iter()
            .map(|p| if p[1] > p[0] { State::Bad } else { State::Good })
            .collect();
        Self { probs, hard }
    }

    /// Everything good: the state assumption of a burst-unaware receiver.
    pub fn all_good(n: usize) -> Self {
        Self::from_hard(vec![State::Good; n])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Fraction of slots whose hard decision differs from `truth`.
    pub fn state_error_rate(&self, truth: &[State]) -> f64 {
        if self.hard.is_empty() {
            return 0.0;
        }
        let errors = self.hard.iter().zip(truth).filter(|(a, b)| a != b).count();
        errors as f64 / self.hard.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    #[serde(alias = "va")]
    Viterbi,
    Sova,
    Bcjr,
    /// The true states; only meaningful in simulation.
    Genie,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Viterbi => "va",
            EstimatorKind::Sova => "sova",
            EstimatorKind::Bcjr => "bcjr",
            EstimatorKind::Genie => "genie",
        }
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "va" | "viterbi" => Ok(EstimatorKind::Viterbi),
            "sova" => Ok(EstimatorKind::Sova),
            "bcjr" => Ok(EstimatorKind::Bcjr),
            "genie" => Ok(EstimatorKind::Genie),
            other => Err(format!("unknown estimator '{other}'")),
        }
    }
}

/// Forward add-compare-select. Returns accumulated metrics and survivor
/// predecessors; ties keep the G predecessor.
fn forward_min(inputs: &TrellisInputs) -> (Vec<[f64; 2]>, Vec<[u8; 2]>) {
    let n = inputs.len();
    let mut metric = Vec::with_capacity(n);
    let mut pred = Vec::with_capacity(n);
    metric.push([
        -inputs.log_init[0] - inputs.state_loglik[0][0],
        -inputs.log_init[1] - inputs.state_loglik[0][1],
    ]);
    pred.push([0, 0]);
    for k in 1..n {
        let prev = metric[k - 1];
        let mut cur = [0.0; 2];
        let mut p = [0u8; 2];
        for to in 0..2 {
            let via_g = prev[0] + inputs.gamma(k, 0, to);
            let via_b = prev[1] + inputs.gamma(k, 1, to);
            if via_b < via_g {
                cur[to] = via_b;
                p[to] = 1;
            } else {
                cur[to] = via_g;
                p[to] = 0;
            }
        }
        metric.push(cur);
        pred.push(p);
    }
    (metric, pred)
}

#[inline]
fn best_state(m: [f64; 2]) -> usize {
    if m[1] < m[0] {
        1
    } else {
        0
    }
}

/// Hard decisions with a finite traceback: slot `k` is decided by tracing back
/// from the best state at slot `min(k + depth, N - 1)`.
fn traceback_decisions(metric: &[[f64; 2]], pred: &[[u8; 2]], depth: usize) -> Vec<State> {
    let n = metric.len();
    let mut hard = vec![State::Good; n];
    let mut decided = 0;
    let mut t = depth.min(n - 1);
    loop {
        // trace from t down to the first undecided slot; emit slot t - depth,
        // or everything left once t reaches the end
        let last = t == n - 1;
        let emit_upto = if last { t } else { t - depth };
        let mut s = best_state(metric[t]);
        let mut k = t;
        loop {
            if k <= emit_upto && k >= decided {
                hard[k] = State::from_index(s);
            }
            if k == decided {
                break;
            }
            s = pred[k][s] as usize;
            k -= 1;
        }
        decided = emit_upto + 1;
        if last {
            break;
        }
        t += 1;
    }
    hard
}

/// Viterbi estimate with a traceback depth; posteriors are degenerate on the
/// decided states.
pub fn viterbi(inputs: &TrellisInputs, depth: usize) -> StatePosterior {
    if inputs.is_empty() {
        return StatePosterior::from_hard(Vec::new());
    }
    let (metric, pred) = forward_min(inputs);
    StatePosterior::from_hard(traceback_decisions(&metric, &pred, depth.max(1)))
}

/// Metric of the best complete path, `min_z -log p(z, y)`.
pub fn viterbi_metric(inputs: &TrellisInputs) -> f64 {
    if inputs.is_empty() {
        return 0.0;
    }
    let (metric, _) = forward_min(inputs);
    let last = metric[metric.len() - 1];
    last[best_state(last)]
}

/// SOVA hard decisions and reliabilities `Δ_k >= 0`.
///
/// Hard decisions match [`viterbi`]. For slot `k`, decided at slot
/// `t = min(k + depth, N - 1)`, `Δ_k` is the best metric over paths ending at
/// `t` that disagree with the decision at `k`, minus the survivor's metric.
pub fn sova_reliabilities(inputs: &TrellisInputs, depth: usize) -> (Vec<State>, Vec<f64>) {
    let n = inputs.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let depth = depth.max(1);
    let (metric, pred) = forward_min(inputs);
    let hard = traceback_decisions(&metric, &pred, depth);
    let mut deltas = Vec::with_capacity(n);
    for k in 0..n {
        let t = (k + depth).min(n - 1);
        let best = metric[t][best_state(metric[t])];
        // minimum metric from each state at k to any state at t
        let mut back = [0.0f64; 2];
        for j in (k + 1..=t).rev() {
            let mut nb = [0.0; 2];
            for (from, slot) in nb.iter_mut().enumerate() {
                *slot = (inputs.gamma(j, from, 0) + back[0]).min(inputs.gamma(j, from, 1) + back[1]);
            }
            back = nb;
        }
        let alt = 1 - hard[k].index();
        deltas.push((metric[k][alt] + back[alt] - best).max(0.0));
    }
    (hard, deltas)
}

/// Soft-output Viterbi estimate: `P(G)` is the logistic function of the
/// reliability, signed by the decision.
pub fn sova(inputs: &TrellisInputs, depth: usize) -> StatePosterior {
    let (hard, deltas) = sova_reliabilities(inputs, depth);
    let probs = hard
        .iter()
        .zip(&deltas)
        .map(|(&z, &delta)| {
            let p_good = match z {
                State::Good => 1.0 / (1.0 + (-delta).exp()),
                State::Bad => 1.0 / (1.0 + delta.exp()),
            };
            [p_good, 1.0 - p_good]
        })
        .collect();
    StatePosterior { probs, hard }
}

#[inline]
fn normalize_log(v: [f64; 2]) -> [f64; 2] {
    let z = log_add_exp(v[0], v[1]);
    [v[0] - z, v[1] - z]
}

/// Windowed forward-backward estimate.
///
/// The forward recursion runs over the whole frame. Posteriors are emitted in
/// blocks of `window / 2` slots; the backward recursion for a block starts
/// uniform `window` slots past its end, so every slot sees at least `window`
/// slots of future evidence, like a Viterbi traceback of the same depth. With
/// `window >= N` this is the exact posterior.
pub fn bcjr(inputs: &TrellisInputs, window: usize) -> StatePosterior {
    let n = inputs.len();
    if n == 0 {
        return StatePosterior::from_probs(Vec::new());
    }
    let window = window.max(1);
    let half = (window / 2).max(1);

    let mut alpha = Vec::with_capacity(n);
    alpha.push(normalize_log([
        inputs.log_init[0] + inputs.state_loglik[0][0],
        inputs.log_init[1] + inputs.state_loglik[0][1],
    ]));
    for k in 1..n {
        let prev: [f64; 2] = alpha[k - 1];
        let mut cur = [0.0; 2];
        for (to, c) in cur.iter_mut().enumerate() {
            *c = log_add_exp(
                prev[0] + inputs.log_trans[0][to],
                prev[1] + inputs.log_trans[1][to],
            ) + inputs.state_loglik[k][to];
        }
        alpha.push(normalize_log(cur));
    }

    let mut probs = vec![[0.0; 2]; n];
    let mut start = 0;
    while start < n {
        let emit_end = start.saturating_add(half).min(n);
        let end = emit_end.saturating_add(window).min(n); // exclusive
        let mut beta = [0.0f64; 2];
        for k in (start..end).rev() {
            if k < emit_end {
                let post = normalize_log([alpha[k][0] + beta[0], alpha[k][1] + beta[1]]);
                probs[k] = [post[0].exp(), post[1].exp()];
            }
            if k > start {
                let mut nb = [0.0; 2];
                for (from, b) in nb.iter_mut().enumerate() {
                    *b = log_add_exp(
                        beta[0] + inputs.log_trans[from][0] + inputs.state_loglik[k][0],
                        beta[1] + inputs.log_trans[from][1] + inputs.state_loglik[k][1],
                    );
                }
                beta = normalize_log(nb);
            }
        }
        start = emit_end;
    }
    StatePosterior::from_probs(probs)
}

/// Runs the selected estimator. `truth` is required for [`EstimatorKind::Genie`]
/// and ignored otherwise.
pub fn estimate(
    kind: EstimatorKind,
    inputs: &TrellisInputs,
    depth: usize,
    truth: Option<&[State]>,
) -> StatePosterior {
    match kind {
        EstimatorKind::Viterbi => viterbi(inputs, depth),
        EstimatorKind::Sova => sova(inputs, depth),
        EstimatorKind::Bcjr => bcjr(inputs, depth),
        EstimatorKind::Genie => StatePosterior::from_hard(
            truth
                .expect("genie estimator needs the true states")
                .to_vec(),
        ),
    }
}
