//! Advantage distillation with repetition codewords, the eavesdropper's block
//! decoding, and multiply-add-shift privacy amplification.

use rand::Rng;

use crate::adversary::StrategyId;
use crate::error::{Error, Result};
use crate::seed::{self, domain, SimRng};
use crate::vector::check_len;

/// Per-round intermediate digits, in round order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DigitStreams {
    pub a: Vec<u8>,
    pub b: Vec<u8>,
    pub e: [Vec<u8>; 3],
}

impl DigitStreams {
    pub fn with_capacity(rounds: usize) -> Self {
        Self {
            a: Vec::with_capacity(rounds),
            b: Vec::with_capacity(rounds),
            e: std::array::from_fn(|_| Vec::with_capacity(rounds)),
        }
    }

    pub fn push(&mut self, a: u8, b: u8, e: [u8; 3]) {
        self.a.push(a);
        self.b.push(b);
        for (stream, bit) in self.e.iter_mut().zip(e) {
            stream.push(bit);
        }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        for len in [self.b.len(), self.e[0].len(), self.e[1].len(), self.e[2].len()] {
            check_len(self.a.len(), len)?;
        }
        Ok(())
    }
}

/// Result of one codeword block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockOutcome {
    pub accepted: bool,
    pub e_a: u8,
    /// B's decoded bit; meaningless unless `accepted`.
    pub e_b: u8,
    /// The eavesdropper's decoded bit per strategy; meaningless unless `accepted`.
    pub e_e: [u8; 3],
}

/// One repetition-code block of length `code_len`.
///
/// A hides a fresh secret bit `e_A` as `c = ẽ_A ⊕ e_A` (published). B decodes
/// `v_B = c ⊕ ẽ_B` and keeps the block only when `v_B` is constant. The
/// eavesdropper decodes `c ⊕ ẽ_E` by majority, flipping a coin on ties.
pub fn ad_block(
    a: &[u8],
    b: &[u8],
    e: [&[u8]; 3],
    code_len: usize,
    rng: &mut SimRng,
) -> Result<BlockOutcome> {
    for len in [a.len(), b.len(), e[0].len(), e[1].len(), e[2].len()] {
        if len != code_len {
            return Err(Error::invalid(format!("block of {len} digits, expected L = {code_len}")));
        }
    }
    let e_a = u8::from(rng.gen::<bool>());
    let first = a[0] ^ e_a ^ b[0];
    let accepted = a.iter().zip(b).all(|(&at, &bt)| at ^ e_a ^ bt == first);
    if !accepted {
        return Ok(BlockOutcome { accepted, e_a, e_b: 0, e_e: [0; 3] });
    }
    let mut e_e = [0u8; 3];
    for (out, stream) in e_e.iter_mut().zip(e) {
        let ones = a.iter().zip(stream).filter(|(&at, &et)| at ^ e_a ^ et == 1).count();
        *out = match (2 * ones).cmp(&code_len) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Equal => u8::from(rng.gen::<bool>()),
        };
    }
    Ok(BlockOutcome { accepted, e_a, e_b: first, e_e })
}

/// Splits the streams into consecutive non-overlapping blocks of `code_len`
/// rounds (leftovers dropped) and distills each with its own seeded stream.
pub fn distill(streams: &DigitStreams, code_len: usize, seed: u64) -> Result<Vec<BlockOutcome>> {
    streams.validate()?;
    if code_len == 0 {
        return Err(Error::invalid("L must be >= 1"));
    }
    let blocks = streams.len() / code_len;
    (0..blocks)
        .map(|blk| {
            let range = blk * code_len..(blk + 1) * code_len;
            let mut rng = seed::rng_for(seed, &[domain::BLOCK, blk as u64]);
            ad_block(
                &streams.a[range.clone()],
                &streams.b[range.clone()],
                std::array::from_fn(|s| &streams.e[s][range.clone()]),
                code_len,
                &mut rng,
            )
        })
        .collect()
}

/// Block counts feeding the rate estimates. Merging is associative and commutative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TallyCounts {
    pub blocks_total: u64,
    pub blocks_accepted: u64,
    /// Accepted blocks with `e_A ≠ e_B`.
    pub ab_disagree: u64,
    /// Accepted blocks with `e_E = e_B`, per strategy.
    pub eb_agree: [u64; 3],
    /// Accepted blocks with `e_E = e_A`, per strategy.
    pub ea_agree: [u64; 3],
}

impl TallyCounts {
    pub fn record(&mut self, o: &BlockOutcome) {
        self.blocks_total += 1;
        if !o.accepted {
            return;
        }
        self.blocks_accepted += 1;
        self.ab_disagree += u64::from(o.e_a != o.e_b);
        for s in StrategyId::ALL {
            let e = o.e_e[s.index()];
            self.eb_agree[s.index()] += u64::from(e == o.e_b);
            self.ea_agree[s.index()] += u64::from(e == o.e_a);
        }
    }

    pub fn merge(mut self, other: &TallyCounts) -> TallyCounts {
        self.blocks_total += other.blocks_total;
        self.blocks_accepted += other.blocks_accepted;
        self.ab_disagree += other.ab_disagree;
        for s in 0..3 {
            self.eb_agree[s] += other.eb_agree[s];
            self.ea_agree[s] += other.ea_agree[s];
        }
        self
    }
}

pub fn tally(outcomes: &[BlockOutcome]) -> TallyCounts {
    outcomes.iter().fold(TallyCounts::default(), |mut t, o| {
        t.record(o);
        t
    })
}

/// Public parameters of one multiply-add-shift hash `h_{a,b}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashKey {
    /// Odd multiplier in `[1, 2^PA)`.
    pub a: u64,
    pub b: u64,
}

impl HashKey {
    pub fn draw(pa: usize, rng: &mut SimRng) -> Self {
        let a = (rng.gen_range(0..1u64 << (pa - 1)) << 1) | 1;
        let b = rng.gen_range(0..1u64 << pa);
        HashKey { a, b }
    }

    /// Top bit of `(a·x + b) mod 2^PA`.
    pub fn hash(&self, x: u64, pa: usize) -> u8 {
        let mask = (1u64 << pa) - 1;
        ((self.a.wrapping_mul(x).wrapping_add(self.b) & mask) >> (pa - 1)) as u8
    }
}

fn check_pa(pa: usize) -> Result<()> {
    if (1..=62).contains(&pa) {
        Ok(())
    } else {
        Err(Error::invalid(format!("PA must be in 1..=62, got {pa}")))
    }
}

/// Draws one key per output digit for `input_len` input bits.
pub fn draw_hash_keys(input_len: usize, pa: usize, rng: &mut SimRng) -> Result<Vec<HashKey>> {
    check_pa(pa)?;
    Ok((0..input_len / pa).map(|_| HashKey::draw(pa, rng)).collect())
}

/// Hashes each consecutive `PA`-bit group (read MSB first) with its key.
/// Trailing bits that do not fill a group are dropped.
pub fn amplify_with_keys(bits: &[u8], pa: usize, keys: &[HashKey]) -> Result<Vec<u8>> {
    check_pa(pa)?;
    let groups = bits.len() / pa;
    if keys.len() < groups {
        return Err(Error::invalid(format!("{} hash keys for {groups} groups", keys.len())));
    }
    Ok(bits
        .chunks_exact(pa)
        .zip(keys)
        .map(|(group, key)| {
            let x = group.iter().fold(0u64, |acc, &bit| (acc << 1) | u64::from(bit));
            key.hash(x, pa)
        })
        .collect())
}

/// Privacy amplification with fresh keys drawn from `rng`. Streams that must
/// share public keys are hashed with identically seeded generators, or through
/// [`draw_hash_keys`] and [`amplify_with_keys`].
pub fn privacy_amplify(bits: &[u8], pa: usize, rng: &mut SimRng) -> Result<Vec<u8>> {
    let keys = draw_hash_keys(bits.len(), pa, rng)?;
    amplify_with_keys(bits, pa, &keys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn rng(seed: u64) -> SimRng {
        SimRng::seed_from_u64(seed)
    }

    /// Independent re-derivation of the discard rule.
    fn brute_accept(a: &[u8], b: &[u8]) -> bool {
        let x: Vec<u8> = a.iter().zip(b).map(|(p, q)| p ^ q).collect();
        x.iter().all(|&v| v == 0) || x.iter().all(|&v| v == 1)
    }

    #[test]
    fn length_one_blocks_always_accepted() {
        let mut r = rng(1);
        for bits in 0..32u8 {
            let d = |s: u8| bits >> s & 1;
            let o = ad_block(&[d(0)], &[d(1)], [&[d(2)], &[d(3)], &[d(4)]], 1, &mut r).unwrap();
            assert!(o.accepted);
        }
    }

    #[test]
    fn error_free_block_decodes_secret() {
        let mut r = rng(2);
        let a = [1, 0, 0, 1, 1];
        for _ in 0..50 {
            let o = ad_block(&a, &a, [&a, &a, &a], 5, &mut r).unwrap();
            assert!(o.accepted);
            assert_eq!(o.e_b, o.e_a);
            assert_eq!(o.e_e, [o.e_a; 3]);
        }
    }

    #[test]
    fn single_disagreement_discards() {
        let a = [0, 1, 1, 0];
        let b = [0, 1, 0, 0];
        let o = ad_block(&a, &b, [&a, &a, &a], 4, &mut rng(3)).unwrap();
        assert!(!o.accepted);
    }

    #[test]
    fn wrong_block_length_is_rejected() {
        let a = [0, 1, 1];
        assert!(ad_block(&a, &a, [&a, &a, &a], 4, &mut rng(4)).is_err());
    }

    #[test]
    fn majority_decode_flips_with_every_bit_odd_length() {
        let mut r = rng(5);
        let a = [1, 0, 1, 1, 0];
        let e = [1, 1, 1, 0, 0];
        let flipped: Vec<u8> = e.iter().map(|v| v ^ 1).collect();
        for _ in 0..20 {
            let seed = r.gen::<u64>();
            let o1 = ad_block(&a, &a, [&e, &e, &e], 5, &mut rng(seed)).unwrap();
            let o2 = ad_block(&a, &a, [&flipped, &flipped, &flipped], 5, &mut rng(seed)).unwrap();
            assert_eq!(o1.e_a, o2.e_a);
            assert_eq!(o1.e_e.map(|v| v ^ 1), o2.e_e);
        }
    }

    #[test]
    fn even_length_tie_frequency_matches_binomial() {
        // With ẽ_E independent and uniform, P(tie at L = 4) = C(4,2)/16 = 3/8; ties are coin flips.
        let mut r = rng(6);
        let blocks = 40_000;
        let mut ties = 0;
        let mut tie_ones = 0;
        for _ in 0..blocks {
            let a: Vec<u8> = (0..4).map(|_| r.gen::<bool>() as u8).collect();
            let e: Vec<u8> = (0..4).map(|_| r.gen::<bool>() as u8).collect();
            let o = ad_block(&a, &a, [&e, &e, &e], 4, &mut r).unwrap();
            let ones = a.iter().zip(&e).filter(|(&x, &y)| x ^ o.e_a ^ y == 1).count();
            if ones == 2 {
                ties += 1;
                tie_ones += o.e_e[0] as usize;
            }
        }
        let p = ties as f64 / blocks as f64;
        let se = (0.375 * 0.625 / blocks as f64).sqrt();
        assert!((p - 0.375).abs() < 4.0 * se, "tie rate {p}");
        let coin = tie_ones as f64 / ties as f64;
        assert!((coin - 0.5).abs() < 4.0 * (0.25 / ties as f64).sqrt());
    }

    #[test]
    fn published_word_is_uniform_for_uniform_digits() {
        // c_t = ẽ_A,t ⊕ e_A; rebuild c from the outcome and check bit frequency.
        let mut r = rng(7);
        let blocks = 20_000;
        let mut ones = 0usize;
        for _ in 0..blocks {
            let a: Vec<u8> = (0..4).map(|_| r.gen::<bool>() as u8).collect();
            let o = ad_block(&a, &a, [&a, &a, &a], 4, &mut r).unwrap();
            ones += a.iter().map(|&x| (x ^ o.e_a) as usize).sum::<usize>();
        }
        let n = (blocks * 4) as f64;
        assert!((ones as f64 / n - 0.5).abs() < 3.0 * (0.25 / n).sqrt());
    }

    #[test]
    fn distill_drops_leftover_rounds_and_is_seeded() {
        let mut s = DigitStreams::default();
        for t in 0..11u8 {
            s.push(t & 1, t & 1, [0, 1, t & 1]);
        }
        let out = distill(&s, 4, 9).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|o| o.accepted));
        assert_eq!(out, distill(&s, 4, 9).unwrap());

        let mut bad = s.clone();
        bad.e[1].pop();
        assert!(distill(&bad, 4, 9).is_err());
    }

    #[test]
    fn tally_examples() {
        assert_eq!(tally(&[]), TallyCounts::default());
        let rejected = BlockOutcome { accepted: false, e_a: 1, e_b: 0, e_e: [1, 1, 1] };
        let t = tally(&[rejected; 5]);
        assert_eq!((t.blocks_total, t.blocks_accepted, t.ab_disagree), (5, 0, 0));
        assert_eq!(t.eb_agree, [0; 3]);

        let outcomes = [
            BlockOutcome { accepted: true, e_a: 1, e_b: 1, e_e: [1, 0, 1] },
            BlockOutcome { accepted: true, e_a: 0, e_b: 1, e_e: [1, 0, 0] },
            BlockOutcome { accepted: true, e_a: 0, e_b: 0, e_e: [0, 0, 1] },
            rejected,
        ];
        let t = tally(&outcomes);
        assert_eq!(t.blocks_total, 4);
        assert_eq!(t.blocks_accepted, 3);
        assert_eq!(t.ab_disagree, 1);
        assert_eq!(t.eb_agree, [3, 1, 1]);
        assert_eq!(t.ea_agree, [2, 2, 2]);
        let merged = tally(&outcomes[..2]).merge(&tally(&outcomes[2..]));
        assert_eq!(merged, t);
    }

    #[test]
    fn hash_examples() {
        assert_eq!(HashKey { a: 3, b: 1 }.hash(5, 3), 0);
        assert_eq!(HashKey { a: 3, b: 1 }.hash(2, 3), 1);
        for b in 0..2 {
            for x in 0..2 {
                assert_eq!(HashKey { a: 1, b }.hash(x, 1), (x ^ b) as u8);
            }
        }
        let mut r = rng(8);
        for _ in 0..100 {
            assert_eq!(HashKey::draw(1, &mut r).a, 1);
            let k = HashKey::draw(7, &mut r);
            assert!(k.a % 2 == 1 && k.a < 128 && k.b < 128);
        }
    }

    #[test]
    fn hash_collision_bound() {
        // Exhaustive over odd a and all b: P(h(x) = h(x')) ≤ 1/2 + 2^{1−PA}.
        for pa in 1..=8usize {
            let m = 1u64 << pa;
            for x in 0..m {
                for y in (x + 1)..m {
                    let mut same = 0u64;
                    let mut total = 0u64;
                    for a in (1..m).step_by(2) {
                        for b in 0..m {
                            let k = HashKey { a, b };
                            same += u64::from(k.hash(x, pa) == k.hash(y, pa));
                            total += 1;
                        }
                    }
                    let bound = 0.5 + 2f64.powi(1 - pa as i32);
                    assert!(same as f64 / total as f64 <= bound, "pa={pa} x={x} y={y}");
                }
            }
        }
    }

    #[test]
    fn amplify_groups_msb_first() {
        let keys = [HashKey { a: 3, b: 1 }, HashKey { a: 3, b: 1 }];
        // 101 = 5 → 0, 010 = 2 → 1, trailing bit dropped.
        let out = amplify_with_keys(&[1, 0, 1, 0, 1, 0, 1], 3, &keys).unwrap();
        assert_eq!(out, vec![0, 1]);
        assert!(amplify_with_keys(&[1, 0, 1], 3, &[]).is_err());
        assert!(privacy_amplify(&[1, 0], 0, &mut rng(0)).is_err());
    }

    #[test]
    fn amplified_uniform_input_stays_uniform() {
        let mut r = rng(10);
        let bits: Vec<u8> = (0..300_000).map(|_| r.gen::<bool>() as u8).collect();
        for pa in [1, 3, 10] {
            let out = privacy_amplify(&bits, pa, &mut r).unwrap();
            assert_eq!(out.len(), bits.len() / pa);
            let n = out.len() as f64;
            let ones = out.iter().map(|&b| b as f64).sum::<f64>();
            assert!((ones - n / 2.0).abs() <= 3.0 * (n / 4.0).sqrt(), "pa={pa}");
        }
    }

    #[test]
    fn shared_seed_shares_keys() {
        let bits = [1, 1, 0, 1, 0, 0, 1, 0];
        let k1 = draw_hash_keys(bits.len(), 2, &mut rng(77)).unwrap();
        let k2 = draw_hash_keys(bits.len(), 2, &mut rng(77)).unwrap();
        assert_eq!(k1, k2);
        assert_eq!(
            privacy_amplify(&bits, 2, &mut rng(77)).unwrap(),
            amplify_with_keys(&bits, 2, &k1).unwrap()
        );
    }

    proptest! {
        #[test]
        fn acceptance_matches_brute_force(
            a in proptest::collection::vec(0u8..2, 1..12),
            flips in proptest::collection::vec(0u8..2, 12),
            seed in any::<u64>(),
        ) {
            let len = a.len();
            let b: Vec<u8> = a.iter().zip(&flips).map(|(x, f)| x ^ f).collect();
            let o = ad_block(&a, &b, [&a, &b, &a], len, &mut rng(seed)).unwrap();
            prop_assert_eq!(o.accepted, brute_accept(&a, &b));
            if o.accepted {
                prop_assert_eq!(o.e_a ^ o.e_b, a[0] ^ b[0]);
            }
        }
    }
}
