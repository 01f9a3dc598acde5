//! Fixed-width bit vectors used as DRAM rows.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A row-sized bit vector. Bit `i` is lane `i`.
///
/// Bits at positions `>= width` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitRow {
    width: usize,
    words: Vec<u64>,
}

fn words_for(width: usize) -> usize {
    width.div_ceil(64)
}

impl BitRow {
    pub fn zeros(width: usize) -> Self {
        BitRow {
            width,
            words: vec![0; words_for(width)],
        }
    }

    pub fn ones(width: usize) -> Self {
        let mut r = BitRow {
            width,
            words: vec![u64::MAX; words_for(width)],
        };
        r.mask_tail();
        r
    }

    /// Broadcast a single bit to every lane.
    pub fn splat(width: usize, bit: bool) -> Self {
        if bit {
            Self::ones(width)
        } else {
            Self::zeros(width)
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut r = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            r.set(i, b);
        }
        r
    }

    /// Parse a string of `0`/`1`, lane 0 first.
    pub fn from_str_lanes(s: &str) -> Self {
        Self::from_bits(s.chars().filter(|c| !c.is_whitespace()).map(|c| c == '1'))
    }

    pub fn from_words(width: usize, words: &[u64]) -> Self {
        let mut r = Self::zeros(width);
        let n = r.words.len().min(words.len());
        r.words[..n].copy_from_slice(&words[..n]);
        r.mask_tail();
        r
    }

    pub fn random<R: Rng + ?Sized>(width: usize, rng: &mut R) -> Self {
        let mut r = Self::zeros(width);
        for w in r.words.iter_mut() {
            *w = rng.gen();
        }
        r.mask_tail();
        r
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.width, "lane {i} out of range for width {}", self.width);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        assert!(i < self.width, "lane {i} out of range for width {}", self.width);
        let m = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.width).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn mask_tail(&mut self) {
        let rem = self.width % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    fn zip(&self, other: &BitRow, f: impl Fn(u64, u64) -> u64) -> BitRow {
        assert_eq!(self.width, other.width, "row width mismatch");
        let mut r = BitRow {
            width: self.width,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        };
        r.mask_tail();
        r
    }

    pub fn and(&self, other: &BitRow) -> BitRow {
        self.zip(other, |a, b| a & b)
    }

    pub fn or(&self, other: &BitRow) -> BitRow {
        self.zip(other, |a, b| a | b)
    }

    pub fn xor(&self, other: &BitRow) -> BitRow {
        self.zip(other, |a, b| a ^ b)
    }

    pub fn not(&self) -> BitRow {
        let mut r = BitRow {
            width: self.width,
            words: self.words.iter().map(|w| !w).collect(),
        };
        r.mask_tail();
        r
    }

    /// Lane-wise three-input majority.
    pub fn majority(a: &BitRow, b: &BitRow, c: &BitRow) -> BitRow {
        assert!(a.width == b.width && b.width == c.width, "row width mismatch");
        let mut r = BitRow {
            width: a.width,
            words: a
                .words
                .iter()
                .zip(&b.words)
                .zip(&c.words)
                .map(|((&x, &y), &z)| (x & y) | (x & z) | (y & z))
                .collect(),
        };
        r.mask_tail();
        r
    }

    /// Shift toward higher lanes by one, filling lane 0 with `fill`.
    /// The bit leaving the top lane is dropped.
    pub fn shl1(&self, fill: bool) -> BitRow {
        let mut r = Self::zeros(self.width);
        let mut carry = fill as u64;
        for (dst, &w) in r.words.iter_mut().zip(&self.words) {
            *dst = (w << 1) | carry;
            carry = w >> 63;
        }
        r.mask_tail();
        r
    }

    /// Treat the row as a `width`-bit little-endian integer and add, modulo 2^width.
    pub fn wrapping_add(&self, other: &BitRow) -> BitRow {
        assert_eq!(self.width, other.width, "row width mismatch");
        let mut r = Self::zeros(self.width);
        let mut carry = 0u64;
        for ((dst, &a), &b) in r.words.iter_mut().zip(&self.words).zip(&other.words) {
            let (s1, c1) = a.overflowing_add(b);
            let (s2, c2) = s1.overflowing_add(carry);
            *dst = s2;
            carry = (c1 || c2) as u64;
        }
        r.mask_tail();
        r
    }

    /// Copy of lanes `[start, start + len)`, zero-padded past the end of `self`,
    /// as a row of width `out_width`.
    pub fn extract(&self, start: usize, len: usize, out_width: usize) -> BitRow {
        let mut r = Self::zeros(out_width);
        let n = len.min(out_width);
        if start % 64 == 0 {
            let first = start / 64;
            for (w, dst) in r.words.iter_mut().enumerate().take(n.div_ceil(64)) {
                *dst = self.words.get(first + w).copied().unwrap_or(0);
            }
            let rest = n % 64;
            if rest != 0 {
                r.words[n / 64] &= (1u64 << rest) - 1;
            }
            for w in n.div_ceil(64)..r.words.len() {
                r.words[w] = 0;
            }
            r.mask_tail();
            return r;
        }
        for i in 0..n {
            let src = start + i;
            if src < self.width && self.get(src) {
                r.set(i, true);
            }
        }
        r
    }

    /// Write the first `len` lanes of `src` into `self` starting at `start`.
    pub fn insert(&mut self, start: usize, src: &BitRow, len: usize) {
        let len = len.min(src.width);
        if start % 64 == 0 && len % 64 == 0 {
            let first = start / 64;
            for w in 0..len / 64 {
                if let Some(dst) = self.words.get_mut(first + w) {
                    *dst = src.words[w];
                }
            }
            self.mask_tail();
            return;
        }
        for i in 0..len {
            if start + i < self.width {
                self.set(start + i, src.get(i));
            }
        }
    }

    /// Keep only the first `len` lanes; the rest become zero.
    pub fn truncated(&self, len: usize) -> BitRow {
        let mut r = self.clone();
        for i in len.min(self.width)..self.width {
            r.set(i, false);
        }
        r
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.width <= 64 {
            let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
            write!(f, "BitRow({s})")
        } else {
            write!(f, "BitRow(width={}, ones={})", self.width, self.count_ones())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_bits_stay_clear() {
        let r = BitRow::ones(70);
        assert_eq!(r.count_ones(), 70);
        assert_eq!(r.not().count_ones(), 0);
        assert_eq!(BitRow::zeros(70).not().count_ones(), 70);
    }

    #[test]
    fn shift_and_add_match_integers() {
        let a = BitRow::from_words(10, &[0b11_0000_0001]);
        assert_eq!(a.shl1(true).words()[0], 0b10_0000_0011);
        let b = BitRow::from_words(10, &[0b11_1111_1111]);
        let one = BitRow::from_words(10, &[1]);
        assert!(b.wrapping_add(&one).is_zero());
    }

    #[test]
    fn carry_crosses_words() {
        let a = BitRow::from_words(128, &[u64::MAX, 0]);
        let one = BitRow::from_words(128, &[1, 0]);
        assert_eq!(a.wrapping_add(&one).words(), &[0, 1]);
        assert_eq!(a.shl1(false).words(), &[u64::MAX - 1, 1]);
    }

    #[test]
    fn extract_pads_with_zero() {
        let a = BitRow::from_str_lanes("1011");
        let e = a.extract(2, 4, 4);
        assert_eq!(e, BitRow::from_str_lanes("1100"));
    }

    proptest::proptest! {
        #[test]
        fn extract_insert_match_lane_loops(seed: u64, width in 1usize..300, start in 0usize..320, len in 0usize..300, out in 1usize..300) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = BitRow::random(width, &mut rng);
            let start = if seed % 2 == 0 { start / 64 * 64 } else { start };
            let e = a.extract(start, len, out);
            for i in 0..out {
                let want = i < len && start + i < width && a.get(start + i);
                proptest::prop_assert_eq!(e.get(i), want);
            }
            let mut b = BitRow::random(width, &mut rng);
            let before = b.clone();
            let src = BitRow::random(out, &mut rng);
            let len = if seed % 3 == 0 { len / 64 * 64 } else { len };
            b.insert(start, &src, len);
            for i in 0..width {
                let want = if i >= start && i - start < len.min(out) { src.get(i - start) } else { before.get(i) };
                proptest::prop_assert_eq!(b.get(i), want, "lane {}", i);
            }
        }
    }
}
