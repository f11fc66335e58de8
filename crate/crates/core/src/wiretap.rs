//! Seeded-Toeplitz wiretap code over GF(2).
//!
//! The inner code maps a secret `m ∈ F₂^{k1}` and a uniform randomiser
//! `l ∈ F₂^{k2}` to `a = (m ⊕ T(S) l, l)`; decoding is the universal-2 hash
//! `F_S(a) = a₁ ⊕ T(S) a₂`. An outer linear code adds reliability.
//!
//! Bit order: index 0 is the first and most significant bit. Hex strings are
//! the big-endian value of the bit string, left-padded to whole nibbles.

use std::fmt;

use bitvec::prelude::{BitVec as Bits, Msb0};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Packed GF(2) vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec(Bits<u8, Msb0>);

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self(Bits::repeat(false, len))
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self(bits.iter().copied().collect())
    }

    /// From 0/1 values; anything non-zero counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        Self(bits.iter().map(|&b| b != 0).collect())
    }

    /// The low `len` bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        Self((0..len).map(|i| (value >> (len - 1 - i)) & 1 == 1).collect())
    }

    pub fn to_u64(&self) -> u64 {
        assert!(self.len() <= 64);
        self.0.iter().fold(0u64, |acc, b| (acc << 1) | (*b as u64))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.0.set(i, v);
    }

    pub fn is_zero(&self) -> bool {
        self.0.not_any()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().map(|b| *b)
    }

    pub fn xor(&self, other: &BitVec) -> Result<BitVec> {
        check_len("xor operand", self.len(), other.len())?;
        let mut out = self.0.clone();
        out ^= &other.0;
        Ok(Self(out))
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = self.0.clone();
        out.extend_from_bitslice(&other.0);
        Self(out)
    }

    /// `(self[..at], self[at..])`.
    pub fn split_at(&self, at: usize) -> (BitVec, BitVec) {
        let (a, b) = self.0.split_at(at);
        (Self(a.to_bitvec()), Self(b.to_bitvec()))
    }

    pub fn to_hex(&self) -> String {
        let nibbles = self.len().div_ceil(4);
        let pad = nibbles * 4 - self.len();
        let mut out = String::with_capacity(nibbles);
        let mut acc = 0u8;
        for (i, bit) in std::iter::repeat_n(false, pad).chain(self.iter()).enumerate() {
            acc = (acc << 1) | bit as u8;
            if i % 4 == 3 {
                out.push(char::from_digit(acc as u32, 16).expect("nibble"));
                acc = 0;
            }
        }
        out
    }

    /// Parses exactly `len.div_ceil(4)` hex digits whose padding bits are zero.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let hex = hex.trim();
        let hex = hex.strip_prefix("0x").unwrap_or(hex);
        let nibbles = len.div_ceil(4);
        if hex.len() != nibbles {
            return Err(Error::BadHex(format!(
                "`{hex}` has {} digits, a {len}-bit value needs {nibbles}",
                hex.len()
            )));
        }
        let mut bits = Bits::<u8, Msb0>::with_capacity(nibbles * 4);
        for c in hex.chars() {
            let v = c.to_digit(16).ok_or_else(|| Error::BadHex(format!("`{c}` is not a hex digit")))?;
            for k in (0..4).rev() {
                bits.push((v >> k) & 1 == 1);
            }
        }
        let pad = nibbles * 4 - len;
        if bits[..pad].any() {
            return Err(Error::BadHex(format!("`{hex}` does not fit in {len} bits")));
        }
        Ok(Self(bits[pad..].to_bitvec()))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { what, expected, got });
    }
    Ok(())
}

/// Seed of a `k1 × k2` GF(2) Toeplitz matrix, `T[i][j] = seed[i + k2 − 1 − j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToeplitzSeed {
    k1: usize,
    k2: usize,
    seed: BitVec,
}

impl ToeplitzSeed {
    pub fn new(k1: usize, k2: usize, seed: BitVec) -> Result<Self> {
        if k1 == 0 || k2 == 0 {
            return Err(crate::error::invalid("k1/k2", "both dimensions must be positive"));
        }
        check_len("seed", k1 + k2 - 1, seed.len())?;
        Ok(Self { k1, k2, seed })
    }

    pub fn zero(k1: usize, k2: usize) -> Result<Self> {
        Self::new(k1, k2, BitVec::zeros((k1 + k2).saturating_sub(1)))
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn k2(&self) -> usize {
        self.k2
    }

    pub fn bits(&self) -> &BitVec {
        &self.seed
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.seed.get(i + self.k2 - 1 - j)
    }

    /// Row-major dense matrix, for inspection.
    pub fn matrix(&self) -> Vec<Vec<bool>> {
        (0..self.k1).map(|i| (0..self.k2).map(|j| self.entry(i, j)).collect()).collect()
    }
}

/// `T(S) v` over GF(2).
pub fn toeplitz_matvec(seed: &ToeplitzSeed, v: &BitVec) -> Result<BitVec> {
    check_len("toeplitz input", seed.k2, v.len())?;
    let mut out = BitVec::zeros(seed.k1);
    for i in 0..seed.k1 {
        let bit = (0..seed.k2).fold(false, |acc, j| acc ^ (seed.entry(i, j) & v.get(j)));
        out.set(i, bit);
    }
    Ok(out)
}

/// `(m ⊕ T(S) l, l)`.
pub fn inner_encode(m: &BitVec, l: &BitVec, seed: &ToeplitzSeed) -> Result<BitVec> {
    check_len("message", seed.k1, m.len())?;
    check_len("randomizer", seed.k2, l.len())?;
    let masked = m.xor(&toeplitz_matvec(seed, l)?)?;
    Ok(masked.concat(l))
}

/// `a₁ ⊕ T(S) a₂`: the message estimate, and the hash value `F_S(a)`.
pub fn inner_decode(a: &BitVec, seed: &ToeplitzSeed) -> Result<BitVec> {
    check_len("inner codeword", seed.k1 + seed.k2, a.len())?;
    let (head, tail) = a.split_at(seed.k1);
    head.xor(&toeplitz_matvec(seed, &tail)?)
}

/// Uniform seed bits, deterministic for a given `rng_seed`.
pub fn random_seed(k1: usize, k2: usize, rng_seed: u64) -> Result<ToeplitzSeed> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let len = (k1 + k2).saturating_sub(1);
    let bits: Vec<bool> = (0..len).map(|_| rng.random::<bool>()).collect();
    ToeplitzSeed::new(k1, k2, BitVec::from_bools(&bits))
}

/// Largest `k1 + k2` accepted by the exhaustive enumerations.
pub const ENUMERATION_LIMIT: usize = 14;

fn all_seeds(k1: usize, k2: usize) -> Result<impl Iterator<Item = ToeplitzSeed>> {
    if k1 + k2 > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge { bits: k1 + k2 - 1 });
    }
    ToeplitzSeed::zero(k1, k2)?;
    let len = k1 + k2 - 1;
    Ok((0..1u64 << len).map(move |s| ToeplitzSeed {
        k1,
        k2,
        seed: BitVec::from_u64(s, len),
    }))
}

/// Exact `Pr_S[F_S(a) = F_S(a′)]` over all `2^{k1+k2−1}` seeds.
pub fn collision_probability(k1: usize, k2: usize, a: &BitVec, a_prime: &BitVec) -> Result<Ratio<u64>> {
    check_len("a", k1 + k2, a.len())?;
    check_len("a'", k1 + k2, a_prime.len())?;
    let mut hits = 0u64;
    let mut total = 0u64;
    for s in all_seeds(k1, k2)? {
        total += 1;
        if inner_decode(a, &s)? == inner_decode(a_prime, &s)? {
            hits += 1;
        }
    }
    Ok(Ratio::new(hits, total))
}

/// Maximum of [`collision_probability`] over every pair `a ≠ a′`.
pub fn max_collision_probability(k1: usize, k2: usize) -> Result<Ratio<u64>> {
    let n = k1 + k2;
    if n > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge { bits: n - 1 });
    }
    let seeds: Vec<ToeplitzSeed> = all_seeds(k1, k2)?.collect();
    let words: Vec<BitVec> = (0..1u64 << n).map(|v| BitVec::from_u64(v, n)).collect();
    // hash table per seed, then count collisions pair by pair
    let hashes: Vec<Vec<u64>> = seeds
        .par_iter()
        .map(|s| words.iter().map(|w| inner_decode(w, s).map(|h| h.to_u64())).collect())
        .collect::<Result<_>>()?;
    let worst = (0..words.len())
        .into_par_iter()
        .map(|x| {
            ((x + 1)..words.len())
                .map(|y| hashes.iter().filter(|h| h[x] == h[y]).count() as u64)
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0);
    Ok(Ratio::new(worst, seeds.len() as u64))
}

/// Counts of `T(S) d` over all seeds, indexed by the output value.
pub fn hash_output_histogram(k1: usize, k2: usize, d: &BitVec) -> Result<Vec<u64>> {
    check_len("difference", k2, d.len())?;
    let mut counts = vec![0u64; 1 << k1];
    for s in all_seeds(k1, k2)? {
        counts[toeplitz_matvec(&s, d)?.to_u64() as usize] += 1;
    }
    Ok(counts)
}

/// Counts of the inner codeword over all seeds and all `(m, l)`, indexed by its value.
pub fn codeword_histogram(k1: usize, k2: usize) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; 1 << (k1 + k2)];
    for s in all_seeds(k1, k2)? {
        for m in 0..1u64 << k1 {
            for l in 0..1u64 << k2 {
                let a = inner_encode(&BitVec::from_u64(m, k1), &BitVec::from_u64(l, k2), &s)?;
                counts[a.to_u64() as usize] += 1;
            }
        }
    }
    Ok(counts)
}

/// Linear reliability code wrapped around the inner hash code.
pub trait OuterCode: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    /// `k1 + k2`.
    fn input_len(&self) -> usize;
    /// `n`.
    fn output_len(&self) -> usize;
    fn encode(&self, a: &BitVec) -> Result<BitVec>;
    fn decode(&self, y: &BitVec) -> Result<BitVec>;
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityCode {
    pub len: usize,
}

impl OuterCode for IdentityCode {
    fn name(&self) -> &'static str {
        "identity"
    }

    fn input_len(&self) -> usize {
        self.len
    }

    fn output_len(&self) -> usize {
        self.len
    }

    fn encode(&self, a: &BitVec) -> Result<BitVec> {
        check_len("outer input", self.len, a.len())?;
        Ok(a.clone())
    }

    fn decode(&self, y: &BitVec) -> Result<BitVec> {
        check_len("outer word", self.len, y.len())?;
        Ok(y.clone())
    }
}

/// Each bit sent three times in a row; majority-vote decoding.
#[derive(Debug, Clone, Copy)]
pub struct RepetitionCode {
    pub k: usize,
}

impl RepetitionCode {
    pub const REPS: usize = 3;
}

impl OuterCode for RepetitionCode {
    fn name(&self) -> &'static str {
        "rep3"
    }

    fn input_len(&self) -> usize {
        self.k
    }

    fn output_len(&self) -> usize {
        Self::REPS * self.k
    }

    fn encode(&self, a: &BitVec) -> Result<BitVec> {
        check_len("outer input", self.k, a.len())?;
        let bits: Vec<bool> = a.iter().flat_map(|b| [b; Self::REPS]).collect();
        Ok(BitVec::from_bools(&bits))
    }

    fn decode(&self, y: &BitVec) -> Result<BitVec> {
        check_len("outer word", self.output_len(), y.len())?;
        let bits: Vec<bool> = (0..self.k)
            .map(|i| (0..Self::REPS).filter(|r| y.get(i * Self::REPS + r)).count() * 2 > Self::REPS)
            .collect();
        Ok(BitVec::from_bools(&bits))
    }
}

/// Outer code by name: `identity` or `rep3`.
pub fn outer_code_by_name(name: &str, k: usize) -> Result<Box<dyn OuterCode>> {
    match name {
        "identity" => Ok(Box::new(IdentityCode { len: k })),
        "rep3" | "repetition" => Ok(Box::new(RepetitionCode { k })),
        other => Err(crate::error::invalid("outer", format!("unknown outer code `{other}`"))),
    }
}

/// The bundled outer code whose length matches `n`.
pub fn outer_code_for_length(k: usize, n: usize) -> Result<Box<dyn OuterCode>> {
    if n == k {
        Ok(Box::new(IdentityCode { len: k }))
    } else if n == RepetitionCode::REPS * k {
        Ok(Box::new(RepetitionCode { k }))
    } else {
        Err(crate::error::invalid(
            "n",
            format!("no bundled outer code maps {k} bits to {n} bits"),
        ))
    }
}

/// Registered wiretap code `Φ = outer ∘ inner`.
#[derive(Debug)]
pub struct WiretapCode {
    n: usize,
    k1: usize,
    k2: usize,
    outer: Box<dyn OuterCode>,
}

/// Largest `k1 + k2` for which registration checks `decode ∘ encode` exhaustively.
pub const REGISTRATION_CHECK_LIMIT: usize = 12;

impl WiretapCode {
    pub fn new(k1: usize, k2: usize, outer: Box<dyn OuterCode>) -> Result<Self> {
        if k1 == 0 || k2 == 0 {
            return Err(crate::error::invalid("k1/k2", "both dimensions must be positive"));
        }
        check_len("outer code input", k1 + k2, outer.input_len())?;
        let n = outer.output_len();
        if n < k1 + k2 {
            return Err(crate::error::invalid("outer", "output shorter than input cannot be injective"));
        }
        if k1 + k2 <= REGISTRATION_CHECK_LIMIT {
            for v in 0..1u64 << (k1 + k2) {
                let a = BitVec::from_u64(v, k1 + k2);
                let y = outer.encode(&a)?;
                check_len("outer code output", n, y.len())?;
                if outer.decode(&y)? != a {
                    return Err(Error::OuterCode(format!(
                        "{} does not invert its own encoding of {a}",
                        outer.name()
                    )));
                }
            }
        }
        Ok(Self { n, k1, k2, outer })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn k2(&self) -> usize {
        self.k2
    }

    pub fn outer(&self) -> &dyn OuterCode {
        self.outer.as_ref()
    }

    fn check_seed(&self, seed: &ToeplitzSeed) -> Result<()> {
        check_len("seed k1", self.k1, seed.k1)?;
        check_len("seed k2", self.k2, seed.k2)
    }

    pub fn encode(&self, m: &BitVec, l: &BitVec, seed: &ToeplitzSeed) -> Result<BitVec> {
        self.check_seed(seed)?;
        self.outer.encode(&inner_encode(m, l, seed)?)
    }

    pub fn decode(&self, y_hat: &BitVec, seed: &ToeplitzSeed) -> Result<BitVec> {
        self.check_seed(seed)?;
        let a = self
            .outer
            .decode(y_hat)
            .map_err(|e| Error::OuterCode(format!("decode failed: {e}")))?;
        inner_decode(&a, seed)
    }
}

/// Frame file `{k1, k2, n, seed_hex, payload_hex}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub k1: usize,
    pub k2: usize,
    pub n: usize,
    pub seed_hex: String,
    pub payload_hex: String,
}

impl Frame {
    pub fn seed(&self) -> Result<ToeplitzSeed> {
        let len = (self.k1 + self.k2).saturating_sub(1);
        ToeplitzSeed::new(self.k1, self.k2, BitVec::from_hex(&self.seed_hex, len)?)
    }

    pub fn payload(&self) -> Result<BitVec> {
        BitVec::from_hex(&self.payload_hex, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(bits: &[u8]) -> BitVec {
        BitVec::from_bits(bits)
    }

    fn worked_seed() -> ToeplitzSeed {
        ToeplitzSeed::new(2, 2, bv(&[1, 0, 1])).unwrap()
    }

    #[test]
    fn toeplitz_layout() {
        // T[i][j] = s[i + 1 - j]
        assert_eq!(worked_seed().matrix(), vec![vec![false, true], vec![true, false]]);
        let s = ToeplitzSeed::new(3, 2, bv(&[1, 1, 0, 0])).unwrap();
        assert_eq!(
            s.matrix(),
            vec![vec![true, true], vec![false, true], vec![false, false]]
        );
        assert!(ToeplitzSeed::new(2, 2, bv(&[1, 0])).is_err());
    }

    #[test]
    fn toeplitz_matvec_examples() {
        let zero = ToeplitzSeed::zero(3, 2).unwrap();
        assert!(toeplitz_matvec(&zero, &bv(&[1, 1])).unwrap().is_zero());
        assert_eq!(toeplitz_matvec(&worked_seed(), &bv(&[1, 1])).unwrap(), bv(&[1, 1]));
        assert_eq!(toeplitz_matvec(&worked_seed(), &bv(&[1, 0])).unwrap(), bv(&[0, 1]));
        assert!(toeplitz_matvec(&worked_seed(), &bv(&[0, 0])).unwrap().is_zero());
        assert!(matches!(
            toeplitz_matvec(&worked_seed(), &bv(&[1])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn matvec_matches_dense_product_exhaustively() {
        for k1 in 1..=3 {
            for k2 in 1..=3 {
                for s in all_seeds(k1, k2).unwrap() {
                    let t = s.matrix();
                    for v in 0..1u64 << k2 {
                        let v = BitVec::from_u64(v, k2);
                        let want: Vec<bool> = t
                            .iter()
                            .map(|row| row.iter().zip(v.iter()).filter(|(a, b)| **a && *b).count() % 2 == 1)
                            .collect();
                        assert_eq!(toeplitz_matvec(&s, &v).unwrap(), BitVec::from_bools(&want));
                    }
                }
            }
        }
    }

    #[test]
    fn inner_codec_examples() {
        let m = bv(&[1, 0]);
        let l = bv(&[1, 1]);
        let zero = ToeplitzSeed::zero(2, 2).unwrap();
        assert_eq!(inner_encode(&m, &l, &zero).unwrap(), m.concat(&l));
        assert_eq!(inner_encode(&m, &l, &worked_seed()).unwrap(), bv(&[0, 1, 1, 1]));
        assert_eq!(inner_encode(&m, &bv(&[0, 0]), &worked_seed()).unwrap(), bv(&[1, 0, 0, 0]));

        assert_eq!(inner_decode(&bv(&[0, 1, 1, 1]), &worked_seed()).unwrap(), m);
        assert_eq!(inner_decode(&bv(&[1, 0, 0, 0]), &worked_seed()).unwrap(), m);
        assert!(inner_decode(&bv(&[0, 1, 1]), &worked_seed()).is_err());
        assert!(inner_encode(&bv(&[1]), &l, &worked_seed()).is_err());
    }

    #[test]
    fn collision_examples() {
        let a = bv(&[1, 0, 1, 1, 0]);
        assert_eq!(collision_probability(3, 2, &a, &a).unwrap(), Ratio::new(1, 1));
        // d1 != 0, d2 = 0: hashes always differ by d1
        let b = bv(&[0, 0, 1, 1, 0]);
        assert_eq!(collision_probability(3, 2, &a, &b).unwrap(), Ratio::new(0, 1));
        // d2 != 0
        let c = bv(&[1, 0, 1, 0, 1]);
        assert_eq!(collision_probability(3, 2, &a, &c).unwrap(), Ratio::new(1, 8));
        assert!(matches!(
            collision_probability(8, 8, &BitVec::zeros(16), &BitVec::zeros(16)),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn max_collision_is_inverse_range() {
        assert_eq!(max_collision_probability(3, 2).unwrap(), Ratio::new(1, 8));
        for k1 in 1..=3 {
            for k2 in 1..=3 {
                let p = max_collision_probability(k1, k2).unwrap();
                assert!(p <= Ratio::new(1, 1u64 << k1), "({k1},{k2}) -> {p}");
            }
        }
    }

    #[test]
    fn hash_uniform_for_nonzero_difference() {
        for k1 in 1..=3 {
            for k2 in 1..=3 {
                for d in 1..1u64 << k2 {
                    let h = hash_output_histogram(k1, k2, &BitVec::from_u64(d, k2)).unwrap();
                    let seeds = 1u64 << (k1 + k2 - 1);
                    assert!(h.iter().all(|&c| c == seeds >> k1), "{h:?}");
                }
            }
        }
    }

    #[test]
    fn codeword_marginal_uniform() {
        for k1 in 1..=4 {
            for k2 in 1..=4 {
                let h = codeword_histogram(k1, k2).unwrap();
                let per = 1u64 << (k1 + k2 - 1);
                assert!(h.iter().all(|&c| c == per), "({k1},{k2}) {h:?}");
            }
        }
    }

    #[test]
    fn random_seed_properties() {
        assert_eq!(random_seed(5, 7, 3).unwrap(), random_seed(5, 7, 3).unwrap());
        assert_eq!(random_seed(5, 7, 3).unwrap().bits().len(), 11);
        let mut ones = vec![0u32; 11];
        for r in 0..10_000 {
            for (i, b) in random_seed(5, 7, r).unwrap().bits().iter().enumerate() {
                ones[i] += b as u32;
            }
        }
        assert!(ones.iter().all(|&c| (4500..=5500).contains(&c)), "{ones:?}");
    }

    #[test]
    fn repetition_outer_code() {
        let code = WiretapCode::new(2, 2, Box::new(RepetitionCode { k: 4 })).unwrap();
        assert_eq!(code.n(), 12);
        for s in all_seeds(2, 2).unwrap() {
            for m in 0..4 {
                for l in 0..4 {
                    let m = BitVec::from_u64(m, 2);
                    let l = BitVec::from_u64(l, 2);
                    let y = code.encode(&m, &l, &s).unwrap();
                    assert_eq!(code.decode(&y, &s).unwrap(), m);
                    for triple in 0..4 {
                        for pos in 0..3 {
                            let mut noisy = y.clone();
                            let i = triple * 3 + pos;
                            noisy.set(i, !noisy.get(i));
                            assert_eq!(code.decode(&noisy, &s).unwrap(), m);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn identity_outer_code_is_inner_codec() {
        let code = WiretapCode::new(2, 2, Box::new(IdentityCode { len: 4 })).unwrap();
        let (m, l) = (bv(&[1, 0]), bv(&[1, 1]));
        assert_eq!(
            code.encode(&m, &l, &worked_seed()).unwrap(),
            inner_encode(&m, &l, &worked_seed()).unwrap()
        );
    }

    #[derive(Debug)]
    struct Broken;

    impl OuterCode for Broken {
        fn name(&self) -> &'static str {
            "broken"
        }
        fn input_len(&self) -> usize {
            2
        }
        fn output_len(&self) -> usize {
            2
        }
        fn encode(&self, _: &BitVec) -> Result<BitVec> {
            Ok(BitVec::zeros(2))
        }
        fn decode(&self, y: &BitVec) -> Result<BitVec> {
            Ok(y.clone())
        }
    }

    #[test]
    fn registration_rejects_bad_outer_codes() {
        assert!(WiretapCode::new(1, 1, Box::new(Broken)).is_err());
        assert!(WiretapCode::new(2, 2, Box::new(IdentityCode { len: 3 })).is_err());
        assert!(outer_code_by_name("ldpc", 4).is_err());
        assert_eq!(outer_code_for_length(4, 12).unwrap().name(), "rep3");
        assert!(outer_code_for_length(4, 5).is_err());
    }

    #[test]
    fn hex_format() {
        assert_eq!(bv(&[1, 0, 1]).to_hex(), "5");
        assert_eq!(bv(&[1, 0, 1, 1, 0]).to_hex(), "16");
        assert_eq!(bv(&[0, 0, 0, 0, 1, 1, 1, 1]).to_hex(), "0f");
        assert_eq!(BitVec::from_hex("16", 5).unwrap(), bv(&[1, 0, 1, 1, 0]));
        assert_eq!(BitVec::from_hex("0F", 8).unwrap().to_hex(), "0f");
        assert!(BitVec::from_hex("20", 5).is_err());
        assert!(BitVec::from_hex("016", 5).is_err());
        assert!(BitVec::from_hex("g", 4).is_err());
        assert_eq!(BitVec::zeros(0).to_hex(), "");
    }

    #[test]
    fn frame_json() {
        let f: Frame =
            serde_json::from_str(r#"{"k1":2,"k2":2,"n":4,"seed_hex":"5","payload_hex":"7"}"#).unwrap();
        assert_eq!(f.seed().unwrap(), worked_seed());
        assert_eq!(f.payload().unwrap(), bv(&[0, 1, 1, 1]));
    }

    fn arb_bits(len: usize) -> impl Strategy<Value = BitVec> {
        proptest::collection::vec(any::<bool>(), len).prop_map(|v| BitVec::from_bools(&v))
    }

    fn arb_instance() -> impl Strategy<Value = (ToeplitzSeed, BitVec, BitVec, BitVec, BitVec)> {
        (1usize..=24, 1usize..=24).prop_flat_map(|(k1, k2)| {
            (
                arb_bits(k1 + k2 - 1).prop_map(move |s| ToeplitzSeed::new(k1, k2, s).unwrap()),
                arb_bits(k1),
                arb_bits(k2),
                arb_bits(k1),
                arb_bits(k2),
            )
        })
    }

    proptest! {
        #[test]
        fn round_trip_and_linearity((s, m, l, m2, l2) in arb_instance()) {
            let a = inner_encode(&m, &l, &s).unwrap();
            prop_assert_eq!(inner_decode(&a, &s).unwrap(), m.clone());

            let sum = inner_encode(&m.xor(&m2).unwrap(), &l.xor(&l2).unwrap(), &s).unwrap();
            let b = inner_encode(&m2, &l2, &s).unwrap();
            prop_assert_eq!(sum, a.xor(&b).unwrap());
        }

        #[test]
        fn hex_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..70)) {
            let v = BitVec::from_bools(&bits);
            prop_assert_eq!(BitVec::from_hex(&v.to_hex(), v.len()).unwrap(), v);
        }
    }
}
