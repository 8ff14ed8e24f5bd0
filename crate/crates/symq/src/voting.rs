//! Exact analysis of single-draw plurality voting.
//!
//! Model: each of `m` independent variants contributes one draw from an
//! ideal distribution `h` over `r` states. A state wins when it is drawn
//! strictly more often than every other state and at least `t` times.
//! `G_i` is the probability that state `i` wins; the aggregated
//! distribution `g` normalizes the `G_i`.
//!
//! The central facts, each verified here against a brute-force
//! enumeration oracle:
//!
//! * **Ratio damping**: for states with `0 < h_i < h_j < 1`, voting
//!   strictly shrinks the smaller state's relative weight,
//!   `g_i/g_j < h_i/h_j`.
//! * **Uniform fixed points**: distributions uniform over their support
//!   are exactly preserved.
//! * **Imbalance amplification**: perturbing a uniform-over-`l`
//!   distribution (leaking mass `d` to a fresh state, or transferring `d`
//!   between two support states) makes voting push the perturbed ratio
//!   back toward uniformity — the larger state is amplified.

use crate::error::{Error, Result};

/// Largest brute-force enumeration (`r^m` tuples) the oracle accepts.
pub const MAX_BRUTE_FORCE_TUPLES: u64 = 10_000_000;

/// A normalized probability distribution over `r` measurement states.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    h: Vec<f64>,
}

impl OutcomeDistribution {
    /// Validates entries: nonnegative, finite, summing to 1 within 1e-12.
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::Voting("distribution needs at least one state".into()));
        }
        if let Some(&bad) = h.iter().find(|&&p| !p.is_finite() || p < 0.0) {
            return Err(Error::Voting(format!(
                "probabilities must be finite and nonnegative, got {bad}"
            )));
        }
        let total: f64 = h.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Voting(format!(
                "probabilities sum to {total}, expected 1 within 1e-12"
            )));
        }
        Ok(OutcomeDistribution { h })
    }

    /// Normalizes nonnegative weights into a distribution.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Voting("distribution needs at least one state".into()));
        }
        if let Some(&bad) = weights.iter().find(|&&w| !w.is_finite() || w < 0.0) {
            return Err(Error::Voting(format!(
                "weights must be finite and nonnegative, got {bad}"
            )));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Voting("weights must not all be zero".into()));
        }
        OutcomeDistribution::new(weights.iter().map(|w| w / total).collect())
    }

    /// Number of states `r`.
    pub fn r(&self) -> usize {
        self.h.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.h
    }

    /// Number of states with nonzero probability.
    pub fn support_len(&self) -> usize {
        self.h.iter().filter(|&&p| p > 0.0).count()
    }
}

/// A voting instance: ideal distribution, variant count, and threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct VotingModel {
    pub h: OutcomeDistribution,
    pub m: usize,
    pub t: usize,
}

impl VotingModel {
    pub fn new(h: OutcomeDistribution, m: usize, t: usize) -> Result<Self> {
        if m == 0 || t == 0 || t > m {
            return Err(Error::Voting(format!(
                "threshold {t} must satisfy 1 <= t <= m = {m}"
            )));
        }
        Ok(VotingModel { h, m, t })
    }
}

/// The aggregated (voted) distribution `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedDistribution {
    g: Vec<f64>,
}

impl AggregatedDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.g
    }
}

/// Natural logs of factorials `0! ..= n!`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    table.push(0.0);
    for k in 1..=n {
        table.push(table[k - 1] + (k as f64).ln());
    }
    table
}

/// Factorials `0! ..= n!` as floats.
fn factorials(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    table.push(1.0);
    for k in 1..=n {
        table.push(table[k - 1] * k as f64);
    }
    table
}

/// The multinomial probability of seeing exactly `counts` across `m`
/// draws from `h`, computed in log-space so large `m` stays finite.
pub fn multinomial_prob(m: usize, counts: &[usize], h: &OutcomeDistribution) -> Result<f64> {
    if counts.len() != h.r() {
        return Err(Error::Voting(format!(
            "{} counts supplied for {} states",
            counts.len(),
            h.r()
        )));
    }
    if counts.iter().sum::<usize>() != m {
        return Err(Error::Voting(format!("counts must sum to m = {m}")));
    }
    let lnf = ln_factorials(m);
    let mut log_p = lnf[m];
    for (&x, &p) in counts.iter().zip(h.probabilities()) {
        if x == 0 {
            continue;
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        log_p += x as f64 * p.ln() - lnf[x];
    }
    Ok(log_p.exp())
}

/// The probability `G_i` that state `i` is drawn strictly more often than
/// every other state and at least `t` times out of `m` draws.
///
/// Evaluated as `sum_v C(m, v) h_i^v W(m - v, v - 1)` where `W(n, cap)` is
/// the probability-weighted count of ways to spread `n` remaining draws
/// over the other states with every count at most `cap` — the coefficient
/// of `z^n` in the product of truncated exponential series, times `n!`.
/// Cost is `O(m^3 r)` per state; exponentially smaller than the nested
/// sums written out literally.
pub fn big_g(i: usize, model: &VotingModel) -> f64 {
    let h = model.h.probabilities();
    assert!(i < h.len(), "state index {i} out of range");
    let (m, t) = (model.m, model.t);
    if h[i] == 0.0 {
        return 0.0;
    }
    let fact = factorials(m);
    let mut total = 0.0;
    for v in t..=m {
        let n_rem = m - v;
        let cap = v - 1;
        let mut poly = vec![0.0; n_rem + 1];
        poly[0] = 1.0;
        for (k, &hk) in h.iter().enumerate() {
            if k == i {
                continue;
            }
            let x_max = cap.min(n_rem);
            let mut term = Vec::with_capacity(x_max + 1);
            term.push(1.0);
            for x in 1..=x_max {
                term.push(term[x - 1] * hk / x as f64);
            }
            let mut next = vec![0.0; n_rem + 1];
            for d in 0..=n_rem {
                if poly[d] == 0.0 {
                    continue;
                }
                for (x, &tx) in term.iter().enumerate().take(n_rem - d + 1) {
                    next[d + x] += poly[d] * tx;
                }
            }
            poly = next;
        }
        let spread = poly[n_rem] * fact[n_rem];
        let binom = fact[m] / (fact[v] * fact[n_rem]);
        total += binom * h[i].powi(v as i32) * spread;
    }
    total
}

/// The aggregated distribution `g_i = G_i / sum_j G_j`.
pub fn small_g(model: &VotingModel) -> Result<AggregatedDistribution> {
    let weights: Vec<f64> = (0..model.h.r()).map(|i| big_g(i, model)).collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::Voting(
            "no state can ever win under this model; the voted distribution is undefined".into(),
        ));
    }
    Ok(AggregatedDistribution { g: weights.iter().map(|w| w / total).collect() })
}

/// Brute-force oracle for [`small_g`]: enumerates all `r^m` draw tuples,
/// weights each by its probability, and applies the winner rule directly.
/// Kept deliberately independent of the polynomial evaluation so the two
/// can check each other.
pub fn brute_force_g(model: &VotingModel) -> Result<AggregatedDistribution> {
    let h = model.h.probabilities();
    let r = h.len() as u64;
    let (m, t) = (model.m, model.t);
    let tuples = r
        .checked_pow(m as u32)
        .filter(|&n| n <= MAX_BRUTE_FORCE_TUPLES)
        .ok_or_else(|| {
            Error::InstanceTooLarge(format!(
                "brute force over {r}^{m} tuples exceeds {MAX_BRUTE_FORCE_TUPLES}"
            ))
        })?;

    let mut weights = vec![0.0; h.len()];
    let mut counts = vec![0usize; h.len()];
    for tuple in 0..tuples {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut weight = 1.0;
        let mut rest = tuple;
        for _ in 0..m {
            let state = (rest % r) as usize;
            rest /= r;
            counts[state] += 1;
            weight *= h[state];
        }
        if weight == 0.0 {
            continue;
        }
        let max = *counts.iter().max().expect("at least one state");
        if max < t || counts.iter().filter(|&&c| c == max).count() != 1 {
            continue;
        }
        let winner = counts.iter().position(|&c| c == max).expect("max exists");
        weights[winner] += weight;
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::Voting(
            "no state can ever win under this model; the voted distribution is undefined".into(),
        ));
    }
    Ok(AggregatedDistribution { g: weights.iter().map(|w| w / total).collect() })
}

/// One pairwise ratio comparison between ideal and voted weights, for a
/// pair with `h[smaller] < h[larger]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioComparison {
    pub smaller: usize,
    pub larger: usize,
    /// `h[smaller] / h[larger]`.
    pub ideal_ratio: f64,
    /// `g[smaller] / g[larger]`.
    pub voted_ratio: f64,
}

impl RatioComparison {
    /// `ideal_ratio - voted_ratio`; positive when voting damped the
    /// smaller state as predicted.
    pub fn margin(&self) -> f64 {
        self.ideal_ratio - self.voted_ratio
    }

    pub fn holds(&self) -> bool {
        self.margin() > 0.0
    }
}

/// Result of checking ratio damping across every strict pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioDampingReport {
    pub comparisons: Vec<RatioComparison>,
}

impl RatioDampingReport {
    pub fn violations(&self) -> Vec<RatioComparison> {
        self.comparisons.iter().filter(|c| !c.holds()).copied().collect()
    }

    pub fn all_hold(&self) -> bool {
        self.comparisons.iter().all(RatioComparison::holds)
    }
}

/// Checks ratio damping: for every pair with `0 < h_i < h_j < 1`, the
/// voted ratio `g_i/g_j` must fall below the ideal ratio `h_i/h_j`. Pairs
/// with equal, zero, or unit probabilities carry no prediction and are
/// omitted.
pub fn check_ratio_damping(h: &OutcomeDistribution, m: usize, t: usize) -> Result<RatioDampingReport> {
    let model = VotingModel::new(h.clone(), m, t)?;
    let g = small_g(&model)?;
    let (hp, gp) = (h.probabilities(), g.probabilities());
    let mut comparisons = Vec::new();
    for i in 0..hp.len() {
        for j in 0..hp.len() {
            if i != j && hp[i] > 0.0 && hp[i] < hp[j] && hp[j] < 1.0 {
                comparisons.push(RatioComparison {
                    smaller: i,
                    larger: j,
                    ideal_ratio: hp[i] / hp[j],
                    voted_ratio: gp[i] / gp[j],
                });
            }
        }
    }
    Ok(RatioDampingReport { comparisons })
}

/// Result of an imbalance-amplification check: the constructed
/// distribution and the larger-over-smaller ratios before and after
/// voting.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplificationCheck {
    pub h: OutcomeDistribution,
    pub larger: usize,
    pub smaller: usize,
    /// `h[larger] / h[smaller]`.
    pub ideal_ratio: f64,
    /// `g[larger] / g[smaller]`.
    pub voted_ratio: f64,
}

impl AmplificationCheck {
    /// `voted_ratio - ideal_ratio`; positive when voting amplified the
    /// larger state as predicted.
    pub fn margin(&self) -> f64 {
        self.voted_ratio - self.ideal_ratio
    }

    pub fn holds(&self) -> bool {
        self.margin() > 0.0
    }
}

fn amplification_check(
    h: Vec<f64>,
    larger: usize,
    smaller: usize,
    m: usize,
    t: usize,
) -> Result<AmplificationCheck> {
    let h = OutcomeDistribution::new(h)?;
    let model = VotingModel::new(h.clone(), m, t)?;
    let g = small_g(&model)?;
    let (hp, gp) = (h.probabilities(), g.probabilities());
    Ok(AmplificationCheck {
        ideal_ratio: hp[larger] / hp[smaller],
        voted_ratio: gp[larger] / gp[smaller],
        h,
        larger,
        smaller,
    })
}

/// Imbalance check, leak form: starting from uniform over `l` states, mass
/// `d` leaks from one support state to a fresh state, giving `l - 1`
/// states at `1/l`, one at `1/l - d`, and one at `d`. For
/// `0 < d < 1/(2l)` the depleted state still outweighs the fresh one and
/// voting must amplify that ratio: `g/g > h/h` for the
/// (depleted, fresh) pair. The bound is exactly where "larger" and
/// "smaller" would swap.
pub fn check_leak_amplification(l: usize, d: f64, m: usize, t: usize) -> Result<AmplificationCheck> {
    if l == 0 {
        return Err(Error::Voting("support size must be positive".into()));
    }
    let bound = 1.0 / (2 * l) as f64;
    if !d.is_finite() || d <= 0.0 || d >= bound {
        return Err(Error::Voting(format!(
            "leak imbalance d = {d} must lie strictly inside (0, {bound})"
        )));
    }
    let u = 1.0 / l as f64;
    let mut h = vec![u; l - 1];
    h.push(u - d);
    h.push(d);
    amplification_check(h, l - 1, l, m, t)
}

/// Imbalance check, transfer form: starting from uniform over `l >= 2`
/// states, mass `d` moves between two support states, giving `l - 2`
/// states at `1/l`, one at `1/l + d`, and one at `1/l - d`. For
/// `0 <= d < 1/l` voting must amplify the (enriched, depleted) ratio;
/// `d = 0` is the uniform fixed point where both ratios are exactly 1.
pub fn check_transfer_amplification(
    l: usize,
    d: f64,
    m: usize,
    t: usize,
) -> Result<AmplificationCheck> {
    if l < 2 {
        return Err(Error::Voting("transfer imbalance needs at least two support states".into()));
    }
    let bound = 1.0 / l as f64;
    if !d.is_finite() || d < 0.0 || d >= bound {
        return Err(Error::Voting(format!(
            "transfer imbalance d = {d} must lie in [0, {bound})"
        )));
    }
    let u = 1.0 / l as f64;
    let mut h = vec![u; l - 2];
    h.push(u + d);
    h.push(u - d);
    amplification_check(h, l - 2, l - 1, m, t)
}
