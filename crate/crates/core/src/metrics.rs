//! Net error rate ε, net knowledge rate ε′, discard rate D and the
//! Cryptologic Limit lower bound CL, with pessimistic strategy selection.
//!
//! All rates are conditioned on accepted blocks. A rate with no accepted
//! block behind it is `None`, never zero.

use crate::adversary::StrategyId;
use crate::distillation::TallyCounts;

/// `ε = 2·min(p, 1−p)` with `p` the A/B disagreement rate among accepted blocks.
pub fn net_error_rate(t: &TallyCounts) -> Option<f64> {
    let p = ratio(t.ab_disagree, t.blocks_accepted)?;
    Some(2.0 * p.min(1.0 - p))
}

/// `ε′ = 2·max(q, 1−q) − 1` with `q` the E/B agreement rate for `strategy`.
pub fn net_knowledge_rate(t: &TallyCounts, strategy: StrategyId) -> Option<f64> {
    ratio(t.eb_agree[strategy.index()], t.blocks_accepted).map(knowledge_from_agreement)
}

/// Same as [`net_knowledge_rate`] but measured against `e_A`.
pub fn net_knowledge_rate_vs_a(t: &TallyCounts, strategy: StrategyId) -> Option<f64> {
    ratio(t.ea_agree[strategy.index()], t.blocks_accepted).map(knowledge_from_agreement)
}

fn knowledge_from_agreement(q: f64) -> f64 {
    2.0 * q.max(1.0 - q) - 1.0
}

/// Fraction of blocks B discarded.
pub fn discard_rate(t: &TallyCounts) -> Option<f64> {
    ratio(t.blocks_total - t.blocks_accepted, t.blocks_total)
}

/// `CL = max(0, (1−D)(1−ε−ε′)) / (6·n·L·PA)`.
pub fn cryptologic_limit(
    discard: f64,
    epsilon: f64,
    epsilon_prime: f64,
    n: usize,
    code_len: usize,
    pa: usize,
) -> f64 {
    let net = ((1.0 - discard) * (1.0 - epsilon - epsilon_prime)).max(0.0);
    net / (6.0 * n as f64 * code_len as f64 * pa as f64)
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Binomial standard error of a proportion `p` estimated from `count` trials.
fn proportion_se(p: f64, count: u64) -> f64 {
    (p * (1.0 - p) / count as f64).sqrt()
}

/// Per-strategy rates entering the pessimistic selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyRates {
    pub eps_prime: f64,
    pub cl: f64,
}

/// Worst case for the partners, chosen separately per criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub eps_prime: f64,
    pub best_eps_prime: StrategyId,
    pub cl: f64,
    pub best_cl: StrategyId,
}

/// Highest ε′ and lowest CL over the three strategies; ties go to the lower id.
pub fn pessimistic_select(per_strategy: &[StrategyRates; 3]) -> Selection {
    let mut best_eps = StrategyId::Omega0;
    let mut best_cl = StrategyId::Omega0;
    for s in StrategyId::ALL {
        let r = &per_strategy[s.index()];
        if r.eps_prime > per_strategy[best_eps.index()].eps_prime {
            best_eps = s;
        }
        if r.cl < per_strategy[best_cl.index()].cl {
            best_cl = s;
        }
    }
    Selection {
        eps_prime: per_strategy[best_eps.index()].eps_prime,
        best_eps_prime: best_eps,
        cl: per_strategy[best_cl.index()].cl,
        best_cl,
    }
}

/// Aggregated outputs of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub epsilon: Option<f64>,
    /// Pessimistic (maximum) ε′.
    pub epsilon_prime: Option<f64>,
    pub eps_prime_per_strategy: [Option<f64>; 3],
    /// Pessimistic ε′ measured against `e_A` instead of `e_B`.
    pub eps_prime_vs_a: Option<f64>,
    pub discard: Option<f64>,
    /// Pessimistic (minimum) CL.
    pub cl: Option<f64>,
    pub cl_per_strategy: [Option<f64>; 3],
    pub best_eps_prime: Option<StrategyId>,
    pub best_cl: Option<StrategyId>,
    pub stderr_epsilon: Option<f64>,
    pub stderr_eps_prime: Option<f64>,
    pub stderr_discard: Option<f64>,
    /// Codeword blocks formed and accepted by distillation.
    pub blocks_total: u64,
    pub blocks_accepted: u64,
}

impl RunMetrics {
    /// Metrics from distillation counts alone (no privacy amplification).
    pub fn from_tally(t: &TallyCounts, n: usize, code_len: usize) -> Self {
        Self::compute(t, t, n, code_len, 1)
    }

    /// `distilled` supplies D; `agreement` supplies ε and ε′ (the hashed
    /// streams when `pa > 1`, otherwise the distilled blocks themselves).
    pub fn compute(
        distilled: &TallyCounts,
        agreement: &TallyCounts,
        n: usize,
        code_len: usize,
        pa: usize,
    ) -> Self {
        let discard = discard_rate(distilled);
        let epsilon = net_error_rate(agreement);
        let eps_prime_per_strategy = StrategyId::ALL.map(|s| net_knowledge_rate(agreement, s));
        let eps_prime_vs_a = StrategyId::ALL
            .iter()
            .filter_map(|&s| net_knowledge_rate_vs_a(agreement, s))
            .reduce(f64::max);

        let cl_per_strategy = eps_prime_per_strategy.map(|ep| {
            Some(cryptologic_limit(discard?, epsilon?, ep?, n, code_len, pa))
        });

        let selection = match (eps_prime_per_strategy, cl_per_strategy) {
            ([Some(e0), Some(e1), Some(e2)], [Some(c0), Some(c1), Some(c2)]) => {
                Some(pessimistic_select(&[
                    StrategyRates { eps_prime: e0, cl: c0 },
                    StrategyRates { eps_prime: e1, cl: c1 },
                    StrategyRates { eps_prime: e2, cl: c2 },
                ]))
            }
            _ => None,
        };

        let accepted = agreement.blocks_accepted;
        let stderr_epsilon = ratio(agreement.ab_disagree, accepted)
            .map(|p| 2.0 * proportion_se(p, accepted));
        let stderr_eps_prime = selection.and_then(|sel| {
            ratio(agreement.eb_agree[sel.best_eps_prime.index()], accepted)
                .map(|q| 2.0 * proportion_se(q, accepted))
        });
        let stderr_discard = discard.map(|d| proportion_se(d, distilled.blocks_total));

        RunMetrics {
            epsilon,
            epsilon_prime: selection.map(|s| s.eps_prime),
            eps_prime_per_strategy,
            eps_prime_vs_a,
            discard,
            cl: selection.map(|s| s.cl),
            cl_per_strategy,
            best_eps_prime: selection.map(|s| s.best_eps_prime),
            best_cl: selection.map(|s| s.best_cl),
            stderr_epsilon,
            stderr_eps_prime,
            stderr_discard,
            blocks_total: distilled.blocks_total,
            blocks_accepted: distilled.blocks_accepted,
        }
    }
}
