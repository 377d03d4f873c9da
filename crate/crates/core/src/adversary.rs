//! The eavesdropper's three canonical strategies.
//!
//! Strategies only ever see a [`PublicView`]: the published Bernoulli
//! vectors, the two published permutation pairs and (with the border fix)
//! `ρ_B`. The private draws and the partners' synchronization picks are not
//! reachable from here.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::params::ProtocolParams;
use crate::protocol::{quantize_other, sample_digit};
use crate::seed::SimRng;
use crate::vector::{BitVector, Permutation};

/// One of the three tested strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyId {
    Omega0,
    Omega1,
    Omega2,
}

impl StrategyId {
    /// All strategies in tie-break order.
    pub const ALL: [StrategyId; 3] = [StrategyId::Omega0, StrategyId::Omega1, StrategyId::Omega2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            StrategyId::Omega0 => "w0",
            StrategyId::Omega1 => "w1",
            StrategyId::Omega2 => "w2",
        }
    }
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "w0" => Ok(StrategyId::Omega0),
            "w1" => Ok(StrategyId::Omega1),
            "w2" => Ok(StrategyId::Omega2),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

/// What the eavesdropper observes in one round.
#[derive(Debug, Clone, Copy)]
pub struct PublicView<'a> {
    pub i: &'a BitVector,
    pub j: &'a BitVector,
    /// B's published pair, from which A picks: `{Id, σ′_d[j]}`.
    pub mu_pair_a: [&'a Permutation; 2],
    /// A's published pair, from which B picks: `{Id, σ_d[i]}`.
    pub mu_pair_b: [&'a Permutation; 2],
    pub rho_b: Option<f64>,
}

/// The eavesdropper's output for one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eavesdrop {
    /// Indices of the permutations picked from `(mu_pair_a, mu_pair_b)` for ω₂.
    pub picks: (usize, usize),
    pub omega_raw: [f64; 3],
    /// Values fed to the digit sampler (quantized when `ρ_B` is published).
    pub omega: [f64; 3],
    pub digits: [u8; 3],
}

/// ω₀ = k (i·j) / n.
pub fn omega0(i: &BitVector, j: &BitVector, n: usize, k: f64) -> f64 {
    k * i.dot(j) as f64 / n as f64
}

/// ω₁ = k |i| |j| / n².
pub fn omega1(i: &BitVector, j: &BitVector, n: usize, k: f64) -> f64 {
    let n = n as f64;
    k * i.weight() as f64 * j.weight() as f64 / (n * n)
}

/// ω₂: the block products of `i` and `j` split along the guessed images
/// `σ_{ξ,B}(I₀)` and `σ_{ξ,A}(I₀)` and their complements, scaled by `2k/n²`.
pub fn omega2(
    i: &BitVector,
    j: &BitVector,
    sigma_xi_a: &Permutation,
    sigma_xi_b: &Permutation,
    n: usize,
    k: f64,
) -> f64 {
    let half = n / 2;
    let i_in: usize = sigma_xi_b.image_of_prefix(half).map(|r| i[r] as usize).sum();
    let j_in: usize = sigma_xi_a.image_of_prefix(half).map(|r| j[r] as usize).sum();
    let i_out = i.weight() - i_in;
    let j_out = j.weight() - j_in;
    let n = n as f64;
    2.0 * k * (i_in * j_in + i_out * j_out) as f64 / (n * n)
}

/// Evaluates every strategy on one round and samples each through the same
/// comb as `V_A`.
pub fn eavesdrop_round(view: &PublicView<'_>, params: &ProtocolParams, rng: &mut SimRng) -> Eavesdrop {
    let (n, k) = (params.n, params.k);
    let pick_a = usize::from(rng.gen::<bool>());
    let pick_b = usize::from(rng.gen::<bool>());
    let omega_raw = [
        omega0(view.i, view.j, n, k),
        omega1(view.i, view.j, n, k),
        omega2(view.i, view.j, view.mu_pair_a[pick_a], view.mu_pair_b[pick_b], n, k),
    ];
    debug_assert!(omega_raw.iter().all(|w| (0.0..=2.0 * k).contains(w)));

    let g = params.gauge();
    let omega = match view.rho_b {
        Some(rho) => omega_raw.map(|w| quantize_other(w, rho, g)),
        None => omega_raw,
    };
    Eavesdrop { picks: (pick_a, pick_b), omega_raw, omega, digits: omega.map(|w| sample_digit(w, g)) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{make_dispersion_perm, run_round_seeded};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn random_bits(n: usize, p: f64, rng: &mut SimRng) -> BitVector {
        BitVector::new((0..n).map(|_| u8::from(rng.gen::<f64>() < p)).collect()).unwrap()
    }

    fn random_perm(n: usize, rng: &mut SimRng) -> Permutation {
        let mut m: Vec<usize> = (0..n).collect();
        m.shuffle(rng);
        Permutation::from_mapping(m).unwrap()
    }

    #[test]
    fn omega0_examples() {
        let i = BitVector::from_support(8, &[0, 1]);
        let j = BitVector::from_support(8, &[2, 3]);
        assert_eq!(omega0(&i, &j, 8, 2.0), 0.0);
        let i = BitVector::from_support(8, &[0, 1, 2, 5]);
        let j = BitVector::from_support(8, &[0, 1, 2, 6]);
        assert_eq!(omega0(&i, &j, 8, 2.0), 0.75);
        assert_eq!(omega0(&i, &i, 8, 2.0), 2.0 * 4.0 / 8.0);
    }

    #[test]
    fn omega1_examples() {
        let j = BitVector::from_support(8, &[1, 2, 3]);
        assert_eq!(omega1(&BitVector::zeros(8), &j, 8, 2.0), 0.0);
        let i = BitVector::from_support(8, &[0, 7]);
        assert_eq!(omega1(&i, &j, 8, 2.0), 0.1875);
    }

    #[test]
    fn omega1_ignores_independent_relabeling() {
        let mut rng = SimRng::seed_from_u64(1);
        let n = 50;
        let i = random_bits(n, 0.3, &mut rng);
        let j = random_bits(n, 0.4, &mut rng);
        let pi = BitVector::new(random_perm(n, &mut rng).apply(i.as_slice()).unwrap()).unwrap();
        let pj = BitVector::new(random_perm(n, &mut rng).apply(j.as_slice()).unwrap()).unwrap();
        assert_eq!(omega1(&i, &j, n, 3.0), omega1(&pi, &pj, n, 3.0));
    }

    #[test]
    fn omega0_and_omega1_invariant_under_common_relabeling() {
        let mut rng = SimRng::seed_from_u64(2);
        for _ in 0..50 {
            let n = 64;
            let i = random_bits(n, 0.2, &mut rng);
            let j = random_bits(n, 0.5, &mut rng);
            let sigma = random_perm(n, &mut rng);
            let si = BitVector::new(sigma.apply(i.as_slice()).unwrap()).unwrap();
            let sj = BitVector::new(sigma.apply(j.as_slice()).unwrap()).unwrap();
            assert_eq!(omega0(&i, &j, n, 4.0), omega0(&si, &sj, n, 4.0));
            assert_eq!(omega1(&i, &j, n, 4.0), omega1(&si, &sj, n, 4.0));
        }
    }

    #[test]
    fn omega2_examples() {
        let id = Permutation::identity(4);
        let i = BitVector::from_support(4, &[0]);
        let j = BitVector::from_support(4, &[1]);
        assert_eq!(omega2(&i, &j, &id, &id, 4, 2.0), 0.25);

        let mut rng = SimRng::seed_from_u64(3);
        let zeros = BitVector::zeros(16);
        let a = random_perm(16, &mut rng);
        let b = random_perm(16, &mut rng);
        assert_eq!(omega2(&zeros, &random_bits(16, 0.5, &mut rng), &a, &b, 16, 5.0), 0.0);
    }

    #[test]
    fn omega2_with_both_dispersion_guesses_doubles_omega1() {
        let mut rng = SimRng::seed_from_u64(4);
        for _ in 0..100 {
            let n = 200;
            let i = random_bits(n, 0.05, &mut rng);
            let j = random_bits(n, 0.08, &mut rng);
            let (Ok(si), Ok(sj)) = (make_dispersion_perm(&i, &mut rng), make_dispersion_perm(&j, &mut rng))
            else {
                continue;
            };
            let w2 = omega2(&i, &j, &sj, &si, n, 3.0);
            assert!((w2 - 2.0 * omega1(&i, &j, n, 3.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn omega2_ignores_pair_order() {
        let mut rng = SimRng::seed_from_u64(5);
        let n = 40;
        let i = random_bits(n, 0.3, &mut rng);
        let j = random_bits(n, 0.3, &mut rng);
        let id = Permutation::identity(n);
        let da = random_perm(n, &mut rng);
        let db = random_perm(n, &mut rng);
        let pair_a = [&id, &da];
        let pair_b = [&id, &db];
        let swapped_a = [&da, &id];
        let swapped_b = [&db, &id];
        for pa in 0..2 {
            for pb in 0..2 {
                let direct = omega2(&i, &j, pair_a[pa], pair_b[pb], n, 2.0);
                let swapped = omega2(&i, &j, swapped_a[1 - pa], swapped_b[1 - pb], n, 2.0);
                assert_eq!(direct, swapped);
            }
        }
    }

    #[test]
    fn strategies_stay_in_range_and_repeat() {
        let params = ProtocolParams { n: 400, k: 6.0, ..Default::default() };
        for r in 0..100 {
            let (t, _) = run_round_seeded(&params, 11, r, None).unwrap();
            assert!(t.eve.omega_raw.iter().all(|w| (0.0..=2.0 * params.k).contains(w)));
            let (again, _) = run_round_seeded(&params, 11, r, None).unwrap();
            assert_eq!(t.eve, again.eve);
        }
    }

    #[test]
    fn close_strategies_share_a_digit() {
        let params = ProtocolParams { n: 400, k: 6.0, ..Default::default() };
        let g = params.gauge();
        for r in 0..300 {
            let (t, _) = run_round_seeded(&params, 12, r, None).unwrap();
            let [w0, w1, _] = t.eve.omega_raw;
            let [q0, q1, _] = t.eve.omega;
            if (w0 - w1).abs() < g / 2.0 && (q0 - q1).abs() < 1e-12 {
                assert_eq!(t.eve.digits[0], t.eve.digits[1]);
            }
        }
    }

    #[test]
    fn strategy_ids_round_trip() {
        for s in StrategyId::ALL {
            assert_eq!(s.name().parse::<StrategyId>().unwrap(), s);
        }
        assert!("w3".parse::<StrategyId>().is_err());
    }
}
