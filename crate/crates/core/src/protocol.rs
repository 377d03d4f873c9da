//! One protocol round between the legitimate partners: the Φ₀ draw,
//! degradation, dispersion, synchronization, decorrelation, and the
//! sampling-comb arithmetic that turns `V_A`, `V_B` into intermediate digits.

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::adversary::{self, Eavesdrop, PublicView};
use crate::error::{Error, Result};
use crate::params::ProtocolParams;
use crate::seed::{self, domain, SimRng};
use crate::vector::{check_len, BitVector, ParamVector, Permutation};

/// Retries granted to a round whose Bernoulli draw has `|i| > n/2`.
pub const MAX_ROUND_ATTEMPTS: u32 = 16;

/// Relative slack, in bins, applied before every floor so values that should
/// sit exactly on a bin edge are not pushed below it by rounding.
pub const EDGE_TOL: f64 = 1e-9;

/// The partners' blind picks from each other's published permutation pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SyncChoice {
    /// A took `σ_A = σ′_d[j]` rather than the identity.
    pub a_picks_dispersion: bool,
    /// B took `σ_B = σ_d[i]` rather than the identity.
    pub b_picks_dispersion: bool,
}

impl SyncChoice {
    pub const FAVORABLE: SyncChoice =
        SyncChoice { a_picks_dispersion: false, b_picks_dispersion: false };

    pub fn is_favorable(&self) -> bool {
        !self.a_picks_dispersion && !self.b_picks_dispersion
    }
}

/// Everything a single round produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTranscript {
    pub x: ParamVector,
    pub y: ParamVector,
    pub i: BitVector,
    pub j: BitVector,
    pub sigma_d_i: Permutation,
    pub sigma_d_j: Permutation,
    pub sync: SyncChoice,
    pub v_a: f64,
    pub v_b: f64,
    /// Published centering offset; `None` without the border fix.
    pub rho_b: Option<f64>,
    /// Values actually sampled (centered/quantized under the border fix).
    pub v_a_sampled: f64,
    pub v_b_sampled: f64,
    pub eve: Eavesdrop,
    pub digit_a: u8,
    pub digit_b: u8,
}

impl RoundTranscript {
    pub fn digit_e(&self) -> [u8; 3] {
        self.eve.digits
    }
}

/// Draws from the dummy distribution Φ₀.
///
/// Each half-block independently gets a count `t` uniform on `{0, …, n/2}`
/// and a uniformly random `t`-subset of its positions set to one.
pub fn draw_phi0(n: usize, rng: &mut SimRng) -> Result<ParamVector> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::invalid(format!("Φ₀ needs an even n >= 2, got {n}")));
    }
    let half = n / 2;
    let mut x = vec![0.0; n];
    for block in 0..2 {
        let t = rng.gen_range(0..=half);
        let offset = block * half;
        for s in index::sample(rng, half, t) {
            x[offset + s] = 1.0;
        }
    }
    Ok(ParamVector::from_unchecked(x))
}

/// Bernoulli vector with success probability `x_s / k` per entry.
pub fn degrade(x: &ParamVector, k: f64, rng: &mut SimRng) -> BitVector {
    let bits = x
        .as_slice()
        .iter()
        .map(|&p| u8::from(rng.gen::<f64>() < p / k))
        .collect();
    BitVector::from_unchecked(bits)
}

/// A permutation `σ` drawn uniformly among those with `support(i) ⊆ σ(I₀)`,
/// where `I₀` is the first half of the indices.
pub fn make_dispersion_perm(i: &BitVector, rng: &mut SimRng) -> Result<Permutation> {
    let n = i.len();
    let half = n / 2;
    let support: Vec<usize> = i.support().collect();
    if support.len() > half {
        return Err(Error::Resample { support: support.len(), half });
    }

    const UNSET: u32 = u32::MAX;
    let mut forward = vec![UNSET; n];
    let mut taken = vec![false; n];
    for (pos, &s) in index::sample(rng, half, support.len()).iter().zip(&support) {
        forward[pos] = s as u32;
        taken[s] = true;
    }
    let mut rest: Vec<u32> = (0..n as u32).filter(|&s| !taken[s as usize]).collect();
    rest.shuffle(rng);
    let mut rest = rest.into_iter();
    for slot in forward.iter_mut().filter(|f| **f == UNSET) {
        *slot = rest.next().expect("image count matches free slots");
    }
    Ok(Permutation::from_forward_unchecked(forward))
}

pub fn choose_sync(rng: &mut SimRng) -> SyncChoice {
    SyncChoice { a_picks_dispersion: rng.gen(), b_picks_dispersion: rng.gen() }
}

/// `V_A = x·σ_A⁻¹(j)/n` and `V_B = σ_B⁻¹(i)·y/n`, with `σ_A ∈ {Id, σ′_d[j]}`
/// and `σ_B ∈ {Id, σ_d[i]}` selected by `sync`.
pub fn decorrelate(
    x: &ParamVector,
    y: &ParamVector,
    i: &BitVector,
    j: &BitVector,
    sigma_d_i: &Permutation,
    sigma_d_j: &Permutation,
    sync: SyncChoice,
) -> Result<(f64, f64)> {
    let n = x.len();
    for len in [y.len(), i.len(), j.len(), sigma_d_i.len(), sigma_d_j.len()] {
        check_len(n, len)?;
    }
    let nf = n as f64;
    let v_a = if sync.a_picks_dispersion {
        sigma_d_j.dot_inverse(x.as_slice(), j.as_slice())?
    } else {
        plain_dot(x.as_slice(), j.as_slice())
    };
    let v_b = if sync.b_picks_dispersion {
        sigma_d_i.dot_inverse(y.as_slice(), i.as_slice())?
    } else {
        plain_dot(y.as_slice(), i.as_slice())
    };
    Ok((v_a / nf, v_b / nf))
}

fn plain_dot(a: &[f64], b: &[u8]) -> f64 {
    a.iter().zip(b).map(|(&av, &bv)| av * bv as f64).sum()
}

#[inline]
fn bin_index(v: f64, g: f64) -> f64 {
    (v / g + EDGE_TOL).floor()
}

/// Returns `(ρ_B, V_B + g/2 − ρ_B)`: the offset of `V_B` inside its bin and
/// `V_B` moved to the center of that bin.
pub fn center_reference(v_b: f64, g: f64) -> (f64, f64) {
    let rho = (v_b - g * bin_index(v_b, g)).max(0.0);
    (rho, v_b + g / 2.0 - rho)
}

/// Maps `v` to the center of its bin on the comb shifted by `ρ_B`.
pub fn quantize_other(v: f64, rho_b: f64, g: f64) -> f64 {
    g * bin_index(v + g / 2.0 - rho_b, g) + g / 2.0
}

/// Intermediate digit `⌊v/g⌋ mod 2`.
pub fn sample_digit(v: f64, g: f64) -> u8 {
    (bin_index(v, g).rem_euclid(2.0)) as u8
}

/// One protocol round with freshly drawn synchronization choices.
pub fn run_round(params: &ProtocolParams, rng: &mut SimRng) -> Result<RoundTranscript> {
    run_round_with(params, None, rng)
}

/// One protocol round; `forced_sync` overrides the partners' coin flips.
pub fn run_round_with(
    params: &ProtocolParams,
    forced_sync: Option<SyncChoice>,
    rng: &mut SimRng,
) -> Result<RoundTranscript> {
    let n = params.n;
    let x = draw_phi0(n, rng)?;
    let y = draw_phi0(n, rng)?;
    let i = degrade(&x, params.k, rng);
    let j = degrade(&y, params.k, rng);
    let sigma_d_i = make_dispersion_perm(&i, rng)?;
    let sigma_d_j = make_dispersion_perm(&j, rng)?;
    let drawn = choose_sync(rng);
    let sync = forced_sync.unwrap_or(drawn);
    let (v_a, v_b) = decorrelate(&x, &y, &i, &j, &sigma_d_i, &sigma_d_j, sync)?;

    let g = params.gauge();
    let (rho_b, v_a_sampled, v_b_sampled) = if params.border_fix {
        let (rho, centered) = center_reference(v_b, g);
        (Some(rho), quantize_other(v_a, rho, g), centered)
    } else {
        (None, v_a, v_b)
    };

    let identity = Permutation::identity(n);
    let view = PublicView {
        i: &i,
        j: &j,
        mu_pair_a: [&identity, &sigma_d_j],
        mu_pair_b: [&identity, &sigma_d_i],
        rho_b,
    };
    let eve = adversary::eavesdrop_round(&view, params, rng);

    Ok(RoundTranscript {
        digit_a: sample_digit(v_a_sampled, g),
        digit_b: sample_digit(v_b_sampled, g),
        x,
        y,
        i,
        j,
        sigma_d_i,
        sigma_d_j,
        sync,
        v_a,
        v_b,
        rho_b,
        v_a_sampled,
        v_b_sampled,
        eve,
    })
}

/// Runs round `round` of a run seeded by `seed`, redrawing degenerate rounds
/// from fresh sub-seeds. Returns the transcript and the number of redraws.
pub fn run_round_seeded(
    params: &ProtocolParams,
    seed: u64,
    round: u64,
    forced_sync: Option<SyncChoice>,
) -> Result<(RoundTranscript, u32)> {
    for attempt in 0..MAX_ROUND_ATTEMPTS {
        let mut rng = seed::rng_for(seed, &[domain::ROUND, round, attempt as u64]);
        match run_round_with(params, forced_sync, &mut rng) {
            Ok(t) => return Ok((t, attempt)),
            Err(Error::Resample { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ResampleExhausted { round, attempts: MAX_ROUND_ATTEMPTS })
}
