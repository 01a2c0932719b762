//! Integer arithmetic coder: 32-bit low/high registers, 16-bit quantized
//! frequencies, carry propagation via pending follow bits.

use crate::bitio::{BitReader, BitWriter};
use crate::error::Result;
use crate::geom::DccSymbol;

const MAX: u64 = 0xFFFF_FFFF;
const HALF: u64 = 1 << 31;
const QUARTER: u64 = 1 << 30;
const THREE_QUARTERS: u64 = 3 << 30;

/// Extra flush bits appended after the final disambiguation pair so the
/// decoder's 32-bit lookahead never runs off a valid stream.
const FLUSH_PAD_BITS: usize = 30;

/// Quantized next-symbol frequencies for {l, s, r}; each entry is at
/// least 1 and the total is exactly 2^16.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrequencyTriple {
    pub freqs: [u32; 3],
}

impl FrequencyTriple {
    pub const TOTAL: u32 = 1 << 16;

    /// Deterministic quantization by largest remainder, with a floor of 1
    /// per symbol so every symbol stays decodable.
    pub fn from_probabilities(p: &[f64; 3]) -> FrequencyTriple {
        let t = Self::TOTAL as f64;
        let mut freqs = [0i64; 3];
        let mut remainders = [0f64; 3];
        let mut sum = 0i64;
        for i in 0..3 {
            let scaled = (p[i].max(0.0) * t).min(t);
            freqs[i] = scaled.floor() as i64;
            remainders[i] = scaled - scaled.floor();
            sum += freqs[i];
        }
        let mut units = Self::TOTAL as i64 - sum;
        while units > 0 {
            let mut best = 0;
            for i in 1..3 {
                if remainders[i] > remainders[best] {
                    best = i;
                }
            }
            freqs[best] += 1;
            remainders[best] = -1.0;
            units -= 1;
        }
        while units < 0 {
            let max = (0..3).max_by_key(|&i| freqs[i]).unwrap();
            freqs[max] -= 1;
            units += 1;
        }
        for i in 0..3 {
            while freqs[i] < 1 {
                let max = (0..3).max_by_key(|&j| freqs[j]).unwrap();
                freqs[max] -= 1;
                freqs[i] += 1;
            }
        }
        FrequencyTriple {
            freqs: [freqs[0] as u32, freqs[1] as u32, freqs[2] as u32],
        }
    }

    fn cumulative(&self, index: usize) -> (u64, u64) {
        let mut lo = 0u64;
        for i in 0..index {
            lo += self.freqs[i] as u64;
        }
        (lo, lo + self.freqs[index] as u64)
    }

    pub fn probability(&self, sym: DccSymbol) -> f64 {
        self.freqs[sym.index()] as f64 / Self::TOTAL as f64
    }
}

#[derive(Clone, Debug)]
pub struct ArithmeticEncoder {
    low: u64,
    high: u64,
    pending: u64,
}

impl Default for ArithmeticEncoder {
    fn default() -> Self {
        ArithmeticEncoder {
            low: 0,
            high: MAX,
            pending: 0,
        }
    }
}

impl ArithmeticEncoder {
    pub fn new() -> ArithmeticEncoder {
        ArithmeticEncoder::default()
    }

    fn emit(&mut self, writer: &mut BitWriter, bit: bool) {
        writer.write_bit(bit);
        for _ in 0..self.pending {
            writer.write_bit(!bit);
        }
        self.pending = 0;
    }

    pub fn encode(&mut self, writer: &mut BitWriter, sym: DccSymbol, freq: &FrequencyTriple) {
        let (cum_lo, cum_hi) = freq.cumulative(sym.index());
        let total = FrequencyTriple::TOTAL as u64;
        let range = self.high - self.low + 1;
        self.high = self.low + range * cum_hi / total - 1;
        self.low += range * cum_lo / total;
        loop {
            if self.high < HALF {
                self.emit(writer, false);
            } else if self.low >= HALF {
                self.emit(writer, true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < THREE_QUARTERS {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
    }

    /// Terminate the stream: one disambiguation pair plus zero padding for
    /// the decoder's register lookahead.
    pub fn finish(mut self, writer: &mut BitWriter) {
        self.pending += 1;
        if self.low < QUARTER {
            self.emit(writer, false);
        } else {
            self.emit(writer, true);
        }
        writer.write_bits(0, FLUSH_PAD_BITS);
    }
}

#[derive(Debug)]
pub struct ArithmeticDecoder<'a> {
    reader: BitReader<'a>,
    low: u64,
    high: u64,
    value: u64,
}

impl<'a> ArithmeticDecoder<'a> {
    pub fn new(mut reader: BitReader<'a>) -> Result<ArithmeticDecoder<'a>> {
        let value = reader.read_bits(32)?;
        Ok(ArithmeticDecoder {
            reader,
            low: 0,
            high: MAX,
            value,
        })
    }

    pub fn decode(&mut self, freq: &FrequencyTriple) -> Result<DccSymbol> {
        let total = FrequencyTriple::TOTAL as u64;
        let range = self.high - self.low + 1;
        let target = ((self.value - self.low + 1) * total - 1) / range;
        let mut index = 0;
        let mut cum = freq.freqs[0] as u64;
        while index < 2 && target >= cum {
            index += 1;
            cum += freq.freqs[index] as u64;
        }
        let sym = DccSymbol::from_index(index).unwrap();
        let (cum_lo, cum_hi) = freq.cumulative(index);
        self.high = self.low + range * cum_hi / total - 1;
        self.low += range * cum_lo / total;
        loop {
            if self.high < HALF {
                // nothing to subtract
            } else if self.low >= HALF {
                self.low -= HALF;
                self.high -= HALF;
                self.value -= HALF;
            } else if self.low >= QUARTER && self.high < THREE_QUARTERS {
                self.low -= QUARTER;
                self.high -= QUARTER;
                self.value -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            self.value = (self.value << 1) | self.reader.read_bit()? as u64;
        }
        Ok(sym)
    }

    pub fn into_reader(self) -> BitReader<'a> {
        self.reader
    }
}

/// Encode a symbol sequence where the distribution for position `i` is a
/// function of the previously encoded symbols only.
pub fn ac_encode<F>(symbols: &[DccSymbol], mut provider: F) -> Vec<u8>
where
    F: FnMut(&[DccSymbol]) -> FrequencyTriple,
{
    let mut writer = BitWriter::new();
    let mut encoder = ArithmeticEncoder::new();
    for (i, &sym) in symbols.iter().enumerate() {
        let freq = provider(&symbols[..i]);
        encoder.encode(&mut writer, sym, &freq);
    }
    encoder.finish(&mut writer);
    writer.into_bytes()
}

/// Inverse of [`ac_encode`] given an identical provider.
pub fn ac_decode<F>(bytes: &[u8], count: usize, mut provider: F) -> Result<Vec<DccSymbol>>
where
    F: FnMut(&[DccSymbol]) -> FrequencyTriple,
{
    let mut decoder = ArithmeticDecoder::new(BitReader::new(bytes))?;
    let mut symbols = Vec::with_capacity(count);
    for _ in 0..count {
        let freq = provider(&symbols);
        symbols.push(decoder.decode(&freq)?);
    }
    Ok(symbols)
}
