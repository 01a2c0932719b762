//! Rice coding for non-negative integers: unary quotient, fixed-width
//! binary remainder.

use crate::bitio::{BitReader, BitWriter};
use crate::error::Result;

/// Smallest `b` with `2^b >= n` (0 for `n <= 1`).
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Bits needed to Rice-code `value` with parameter `k`.
pub fn rice_cost(value: u64, k: u32) -> u64 {
    (value >> k) + 1 + k as u64
}

pub fn rice_encode(writer: &mut BitWriter, value: u64, k: u32) {
    let q = value >> k;
    for _ in 0..q {
        writer.write_bit(true);
    }
    writer.write_bit(false);
    if k > 0 {
        writer.write_bits(value & ((1u64 << k) - 1), k as usize);
    }
}

pub fn rice_decode(reader: &mut BitReader, k: u32) -> Result<u64> {
    let mut q = 0u64;
    while reader.read_bit()? {
        q += 1;
    }
    let r = if k > 0 { reader.read_bits(k as usize)? } else { 0 };
    Ok((q << k) | r)
}

/// Exhaustive search for the cheapest Rice parameter in `[0, ceil_log2(w)]`;
/// ties resolve to the smaller `k`. An empty list yields 0.
pub fn best_rice_k(values: &[u64], w: u64) -> u32 {
    let k_max = ceil_log2(w.max(1));
    let mut best_k = 0;
    let mut best_cost = u64::MAX;
    for k in 0..=k_max {
        let cost: u64 = values.iter().map(|&v| rice_cost(v, k)).sum();
        if cost < best_cost {
            best_cost = cost;
            best_k = k;
        }
    }
    if values.is_empty() {
        0
    } else {
        best_k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(0), 0);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(16), 4);
        assert_eq!(ceil_log2(17), 5);
    }

    #[test]
    fn roundtrip_over_small_values_and_parameters() {
        for k in 0..8 {
            let mut w = BitWriter::new();
            for v in 0..64u64 {
                rice_encode(&mut w, v, k);
            }
            let bytes = w.into_bytes();
            let mut r = BitReader::new(&bytes);
            for v in 0..64u64 {
                assert_eq!(rice_decode(&mut r, k).unwrap(), v);
            }
        }
    }

    #[test]
    fn cost_matches_emitted_bits() {
        for (v, k) in [(0u64, 0u32), (5, 0), (5, 2), (9, 3), (1000, 4)] {
            let mut w = BitWriter::new();
            rice_encode(&mut w, v, k);
            assert_eq!(w.bit_len() as u64, rice_cost(v, k));
        }
    }

    #[test]
    fn best_k_prefers_smaller_on_ties() {
        // {9,9,9,9} with w=16: k=2,3,4 all cost 20, so 2 wins
        assert_eq!(best_rice_k(&[9, 9, 9, 9], 16), 2);
    }

    #[test]
    fn best_k_edge_cases() {
        assert_eq!(best_rice_k(&[], 100), 0);
        assert_eq!(best_rice_k(&[0, 0, 0], 8), 0);
        // large uniform values favor large k
        let vals = [200u64, 201, 199, 198];
        let k = best_rice_k(&vals, 256);
        let cost: u64 = vals.iter().map(|&v| rice_cost(v, k)).sum();
        for other in 0..=ceil_log2(256) {
            let c: u64 = vals.iter().map(|&v| rice_cost(v, other)).sum();
            assert!(cost <= c);
        }
    }

    #[test]
    fn truncated_unary_errors() {
        let bytes = [0xFFu8];
        let mut r = BitReader::new(&bytes);
        assert!(rice_decode(&mut r, 0).is_err());
    }
}
