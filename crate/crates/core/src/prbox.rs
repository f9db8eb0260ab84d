//! Popescu-Rohrlich boxes, the nested box pyramid retrieving one bit of a
//! 2^L-entry database with a single transmitted bit, and the resulting
//! perfect f-RAC. Bits here are {0,1} with xor arithmetic; the Boolean
//! function layer converts at the boundary (-1 maps to 1).

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::boolfn::{BitString, BooleanFunction};
use crate::error::{Error, Result};
use crate::frac::{sequence_count, sequences_enumerate, Protocol, SequenceIndex};

/// Largest supported address width; the pyramid holds 2^L - 1 boxes.
pub const MAX_ADDRESS_BITS: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

/// One PR box: single use per party, outputs satisfying a xor b = x and y,
/// both marginals uniform.
#[derive(Debug, Default)]
pub struct PrBox {
    alice: Option<(u8, u8)>,
    bob: Option<(u8, u8)>,
}

impl PrBox {
    pub fn new() -> Self {
        PrBox::default()
    }

    pub fn use_box(&mut self, party: Party, input: u8, rng: &mut dyn RngCore) -> Result<u8> {
        let input = input & 1;
        let (own, other) = match party {
            Party::Alice => (&self.alice, &self.bob),
            Party::Bob => (&self.bob, &self.alice),
        };
        if own.is_some() {
            return Err(Error::BoxReuse(match party {
                Party::Alice => "alice",
                Party::Bob => "bob",
            }));
        }
        let out = match other {
            // second output is forced by a xor b = xy
            Some((other_in, other_out)) => other_out ^ (input & other_in),
            None => rng.random::<bool>() as u8,
        };
        match party {
            Party::Alice => self.alice = Some((input, out)),
            Party::Bob => self.bob = Some((input, out)),
        }
        Ok(out)
    }
}

/// Complete binary tree of 2^L - 1 PR boxes in heap layout (root at 1),
/// lazily materialized. Alice's encode touches every box once; Bob's
/// decode touches the L boxes on his address path.
pub struct BoxPyramid {
    l: usize,
    boxes: Vec<Option<PrBox>>,
    encoded: bool,
    decoded: bool,
    alice_uses: usize,
    bob_uses: usize,
}

impl BoxPyramid {
    pub fn new(l: usize) -> Result<Self> {
        if l > MAX_ADDRESS_BITS {
            return Err(Error::DatabaseTooLarge {
                got: 1 << l.min(63),
                bits: l,
                max: MAX_ADDRESS_BITS,
            });
        }
        let mut boxes = Vec::new();
        boxes.resize_with(1 << l, || None);
        Ok(BoxPyramid {
            l,
            boxes,
            encoded: false,
            decoded: false,
            alice_uses: 0,
            bob_uses: 0,
        })
    }

    pub fn address_bits(&self) -> usize {
        self.l
    }

    pub fn boxes_total(&self) -> usize {
        (1 << self.l) - 1
    }

    pub fn alice_uses(&self) -> usize {
        self.alice_uses
    }

    pub fn bob_uses(&self) -> usize {
        self.bob_uses
    }

    fn use_box(&mut self, v: usize, party: Party, input: u8, rng: &mut dyn RngCore) -> Result<u8> {
        let slot = &mut self.boxes[v];
        let b = slot.get_or_insert_with(PrBox::new);
        let out = b.use_box(party, input, rng)?;
        match party {
            Party::Alice => self.alice_uses += 1,
            Party::Bob => self.bob_uses += 1,
        }
        Ok(out)
    }

    /// Alice's pass: leaves compress database pairs, internal nodes
    /// compress their children's messages. Returns the one transmitted bit.
    pub fn encode(&mut self, database: &[u8], rng: &mut dyn RngCore) -> Result<u8> {
        if database.len() != 1 << self.l {
            return Err(Error::LengthMismatch {
                expected: 1 << self.l,
                got: database.len(),
            });
        }
        if self.encoded {
            return Err(Error::PyramidConsumed);
        }
        self.encoded = true;
        if self.l == 0 {
            return Ok(database[0] & 1);
        }
        let half = 1usize << (self.l - 1);
        // msg[v] for heap nodes v in [1, 2^l); filled bottom-up
        let mut msg = vec![0u8; 1 << self.l];
        for v in (half..1 << self.l).rev() {
            let (a0, a1) = (
                database[2 * (v - half)] & 1,
                database[2 * (v - half) + 1] & 1,
            );
            let a = self.use_box(v, Party::Alice, a0 ^ a1, rng)?;
            msg[v] = a0 ^ a;
        }
        for v in (1..half).rev() {
            let (y0, y1) = (msg[2 * v], msg[2 * v + 1]);
            let a = self.use_box(v, Party::Alice, y0 ^ y1, rng)?;
            msg[v] = y0 ^ a;
        }
        Ok(msg[1])
    }

    /// Bob's pass: walk the address path top-down (most significant bit
    /// first), output y xor the L box outputs.
    pub fn decode(&mut self, index: usize, y: u8, rng: &mut dyn RngCore) -> Result<u8> {
        if !self.encoded {
            return Err(Error::PyramidNotEncoded);
        }
        if self.decoded {
            return Err(Error::PyramidConsumed);
        }
        if index >= 1 << self.l {
            return Err(Error::Invalid(format!(
                "index {index} out of range for {} address bits",
                self.l
            )));
        }
        self.decoded = true;
        let mut acc = y & 1;
        let mut v = 1usize;
        for depth in 0..self.l {
            let bit = (index >> (self.l - 1 - depth)) as u8 & 1;
            acc ^= self.use_box(v, Party::Bob, bit, rng)?;
            v = 2 * v + bit as usize;
        }
        Ok(acc)
    }
}

/// Run log of one perfect f-RAC execution.
#[derive(Debug, Clone, Serialize)]
pub struct PrracAudit {
    pub l: usize,
    pub boxes_total: usize,
    pub boxes_bob: usize,
    pub bits_sent: usize,
    pub correct: bool,
}

impl PrracAudit {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("audit serializes")
    }
}

/// Address width for database length t: L = ceil(log2 t).
pub fn address_bits(t: u128) -> usize {
    (128 - (t.max(1) - 1).leading_zeros()) as usize
}

/// One run of the box protocol for f: builds the database a_S = f(x_S)
/// over lexicographic S, zero-padded to 2^L entries, and retrieves the
/// entry of `s_query` with one transmitted bit. Output is in {-1, +1}.
pub fn fprrac(
    x: &BitString,
    f: &BooleanFunction,
    s_query: &SequenceIndex,
    rng: &mut dyn RngCore,
) -> Result<(i8, PrracAudit)> {
    let n = x.len();
    let k = f.arity();
    if s_query.len() != k || s_query.indices().iter().any(|&i| i >= n) {
        return Err(Error::BadSequence {
            n,
            k: s_query.len(),
        });
    }
    let t = sequence_count(n, k);
    let l = address_bits(t);
    if l > MAX_ADDRESS_BITS {
        return Err(Error::DatabaseTooLarge {
            got: t as usize,
            bits: l,
            max: MAX_ADDRESS_BITS,
        });
    }
    let seqs = sequences_enumerate(n, k)?;
    let mut database = vec![0u8; 1 << l];
    for (i, s) in seqs.iter().enumerate() {
        database[i] = (f.eval(&x.select(s.indices()))? == -1) as u8;
    }
    let mut pyramid = BoxPyramid::new(l)?;
    let y = pyramid.encode(&database, rng)?;
    let bit = pyramid.decode(s_query.lexicographic_rank(n), y, rng)?;
    let out = if bit == 1 { -1 } else { 1 };
    let truth = f.eval(&x.select(s_query.indices()))?;
    debug_assert_eq!(pyramid.alice_uses(), pyramid.boxes_total());
    debug_assert_eq!(pyramid.bob_uses(), l);
    let audit = PrracAudit {
        l,
        boxes_total: pyramid.boxes_total(),
        boxes_bob: pyramid.bob_uses(),
        bits_sent: 1,
        correct: out == truth,
    };
    Ok((out, audit))
}

/// The box protocol as a Protocol: success probability 1 on every (x, S).
pub struct FpRrac {
    n: usize,
    f: BooleanFunction,
}

impl FpRrac {
    pub fn new(n: usize, f: BooleanFunction) -> Result<Self> {
        let t = sequence_count(n, f.arity());
        let l = address_bits(t);
        if l > MAX_ADDRESS_BITS {
            return Err(Error::DatabaseTooLarge {
                got: t as usize,
                bits: l,
                max: MAX_ADDRESS_BITS,
            });
        }
        Ok(FpRrac { n, f })
    }
}

impl Protocol for FpRrac {
    fn input_len(&self) -> usize {
        self.n
    }

    fn query_len(&self) -> usize {
        self.f.arity()
    }

    fn function(&self) -> &BooleanFunction {
        &self.f
    }

    fn name(&self) -> &str {
        "prrac"
    }

    fn trial(&self, x: &BitString, s: &SequenceIndex, rng: &mut dyn RngCore) -> Result<bool> {
        let (_, audit) = fprrac(x, &self.f, s, rng)?;
        Ok(audit.correct)
    }

    /// The output does not depend on the box outcomes, so one seeded run
    /// certifies the (x, S) cell.
    fn exact_success(&self, x: &BitString, s: &SequenceIndex) -> Result<f64> {
        use rand::SeedableRng;
        let seed = (x.to_index() as u64) << 32 | s.lexicographic_rank(self.n) as u64;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (_, audit) = fprrac(x, &self.f, s, &mut rng)?;
        Ok(audit.correct as u8 as f64)
    }

    fn exact_cost(&self) -> Option<u128> {
        Some(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn box_is_non_signaling_and_correlated() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // x = 0 or y = 0 forces a = b; x = y = 1 forces a != b
        for (x, y) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
            for _ in 0..200 {
                let mut bx = PrBox::new();
                let a = bx.use_box(Party::Alice, x, &mut rng).unwrap();
                let b = bx.use_box(Party::Bob, y, &mut rng).unwrap();
                assert_eq!(a ^ b, x & y);
            }
        }
    }

    #[test]
    fn box_marginal_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let draws = 100_000usize;
        let mut ones = 0usize;
        for _ in 0..draws {
            let mut bx = PrBox::new();
            ones += bx.use_box(Party::Alice, 1, &mut rng).unwrap() as usize;
        }
        let sigma = (draws as f64 * 0.25).sqrt();
        assert!((ones as f64 - draws as f64 / 2.0).abs() < 4.0 * sigma);
    }

    #[test]
    fn box_reuse_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut bx = PrBox::new();
        bx.use_box(Party::Alice, 0, &mut rng).unwrap();
        assert!(matches!(
            bx.use_box(Party::Alice, 1, &mut rng),
            Err(Error::BoxReuse(_))
        ));
        bx.use_box(Party::Bob, 1, &mut rng).unwrap();
        assert!(bx.use_box(Party::Bob, 0, &mut rng).is_err());
    }

    #[test]
    fn pyramid_exhaustive_small() {
        // every database x every index, multiple box seeds
        for l in 0..=3usize {
            for db_idx in 0..1usize << (1 << l) {
                let database: Vec<u8> = (0..1 << l).map(|i| (db_idx >> i) as u8 & 1).collect();
                for index in 0..1usize << l {
                    for seed in 0..(if l == 3 { 100 } else { 10 }) {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        let mut p = BoxPyramid::new(l).unwrap();
                        let y = p.encode(&database, &mut rng).unwrap();
                        let out = p.decode(index, y, &mut rng).unwrap();
                        assert_eq!(out, database[index], "l={l} db={db_idx} i={index}");
                        assert_eq!(p.alice_uses(), p.boxes_total());
                        assert_eq!(p.bob_uses(), l);
                    }
                }
            }
        }
    }

    #[test]
    fn pyramid_state_machine() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut p = BoxPyramid::new(2).unwrap();
        assert!(matches!(
            p.decode(0, 0, &mut rng),
            Err(Error::PyramidNotEncoded)
        ));
        let y = p.encode(&[0, 1, 1, 0], &mut rng).unwrap();
        assert!(matches!(
            p.encode(&[0, 1, 1, 0], &mut rng),
            Err(Error::PyramidConsumed)
        ));
        p.decode(3, y, &mut rng).unwrap();
        assert!(matches!(
            p.decode(3, y, &mut rng),
            Err(Error::PyramidConsumed)
        ));
    }

    #[test]
    fn bob_outputs_alone_carry_no_information() {
        // xor of Bob's box outputs, without y, must be uncorrelated with
        // the database bit
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 100_000usize;
        let mut agree = 0usize;
        for _ in 0..draws {
            let db = [
                rng.random::<bool>() as u8,
                rng.random::<bool>() as u8,
                rng.random::<bool>() as u8,
                rng.random::<bool>() as u8,
            ];
            let index = (rng.random::<u64>() % 4) as usize;
            let mut p = BoxPyramid::new(2).unwrap();
            let y = p.encode(&db, &mut rng).unwrap();
            let out = p.decode(index, y, &mut rng).unwrap();
            let bob_only = out ^ y;
            agree += (bob_only == db[index]) as usize;
        }
        let sigma = (draws as f64 * 0.25).sqrt();
        assert!((agree as f64 - draws as f64 / 2.0).abs() < 4.0 * sigma);
    }

    #[test]
    fn address_width_examples() {
        assert_eq!(address_bits(1), 0);
        assert_eq!(address_bits(2), 1);
        assert_eq!(address_bits(6), 3);
        assert_eq!(address_bits(12), 4);
        assert_eq!(address_bits(16), 4);
    }

    #[test]
    fn fprrac_exhaustive_certainty() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let cases: [(usize, BooleanFunction); 3] = [
            (3, BooleanFunction::xor(2).unwrap()),
            (4, BooleanFunction::and(2).unwrap()),
            (4, BooleanFunction::xor(3).unwrap()),
        ];
        for (n, f) in cases {
            let k = f.arity();
            let seqs = sequences_enumerate(n, k).unwrap();
            let l = address_bits(sequence_count(n, k));
            for idx in 0..1usize << n {
                let x = BitString::from_index(idx, n);
                for s in &seqs {
                    let (out, audit) = fprrac(&x, &f, s, &mut rng).unwrap();
                    assert_eq!(out, f.eval(&x.select(s.indices())).unwrap());
                    assert!(audit.correct);
                    assert_eq!(audit.bits_sent, 1);
                    assert_eq!(audit.boxes_bob, l);
                    assert_eq!(audit.boxes_total, (1 << l) - 1);
                }
            }
        }
    }

    #[test]
    fn fprrac_constant_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = BooleanFunction::constant(2, -1).unwrap();
        let x = BitString::from_index(5, 4);
        let s = SequenceIndex::new(4, vec![2, 0]).unwrap();
        let (out, audit) = fprrac(&x, &f, &s, &mut rng).unwrap();
        assert_eq!(out, -1);
        assert!(audit.correct);
    }

    #[test]
    fn audit_serializes() {
        let audit = PrracAudit {
            l: 4,
            boxes_total: 15,
            boxes_bob: 4,
            bits_sent: 1,
            correct: true,
        };
        let v: serde_json::Value = serde_json::from_str(&audit.to_json()).unwrap();
        assert_eq!(v["l"], 4);
        assert_eq!(v["bits_sent"], 1);
        assert_eq!(v["correct"], true);
    }

    #[test]
    fn protocol_reports_certainty() {
        let f = BooleanFunction::xor(2).unwrap();
        let p = FpRrac::new(3, f).unwrap();
        let r = crate::frac::exact_bias(&p, "xor").unwrap();
        assert_eq!(r.bias_avg, 1.0);
        assert_eq!(r.bias_worst, Some(1.0));
    }
}
