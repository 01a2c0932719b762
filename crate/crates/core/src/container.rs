//! Bitstream container for losslessly coded contour sets: header, sorted
//! starting-point block, per-contour side information, and one arithmetic
//! payload over all chain-code symbols.

use crate::arith::{ArithmeticDecoder, ArithmeticEncoder, FrequencyTriple};
use crate::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};
use crate::geom::{AbsoluteDirection, DccContour, DccSymbol, GridPoint};
use crate::rice::{best_rice_k, ceil_log2, rice_decode, rice_encode};
use crate::tree::ContextTree;

const MAGIC: &[u8; 4] = b"CTC1";

/// Bit usage breakdown of one encoded image.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EncodeStats {
    pub header_bits: usize,
    pub starting_point_bits: usize,
    pub side_info_bits: usize,
    pub payload_bits: usize,
    pub total_bits: usize,
}

fn coord_bits(dim: u16) -> usize {
    ceil_log2(dim as u64 + 1) as usize
}

/// Width of the Rice parameter field for diffs bounded by `dim`.
fn k_field_bits(dim: u16) -> usize {
    ceil_log2(ceil_log2(dim as u64) as u64 + 1) as usize
}

fn axis_components(p: GridPoint, axis_y: bool) -> (u64, u64) {
    if axis_y {
        (p.y as u64, p.x as u64)
    } else {
        (p.x as u64, p.y as u64)
    }
}

fn sp_block_for_axis(
    points: &[GridPoint],
    width: u16,
    height: u16,
    axis_y: bool,
) -> (BitWriter, Vec<usize>) {
    let (primary_dim, secondary_dim) = if axis_y { (height, width) } else { (width, height) };
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by_key(|&i| axis_components(points[i], axis_y));
    let primaries: Vec<u64> = order
        .iter()
        .map(|&i| axis_components(points[i], axis_y).0)
        .collect();
    let diffs: Vec<u64> = primaries.windows(2).map(|w| w[1] - w[0]).collect();
    let k = best_rice_k(&diffs, primary_dim as u64);

    let mut writer = BitWriter::new();
    writer.write_bit(axis_y);
    writer.write_bits(k as u64, k_field_bits(primary_dim));
    writer.write_bits(primaries[0], coord_bits(primary_dim));
    for &d in &diffs {
        rice_encode(&mut writer, d, k);
    }
    for &i in &order {
        let (_, secondary) = axis_components(points[i], axis_y);
        writer.write_bits(secondary, coord_bits(secondary_dim));
    }
    (writer, order)
}

/// Encode the starting points, choosing the cheaper sorting axis.
/// Returns the bits and the contour order they imply.
pub fn encode_starting_points(
    points: &[GridPoint],
    width: u16,
    height: u16,
) -> (BitWriter, Vec<usize>) {
    let by_x = sp_block_for_axis(points, width, height, false);
    let by_y = sp_block_for_axis(points, width, height, true);
    if by_y.0.bit_len() < by_x.0.bit_len() {
        by_y
    } else {
        by_x
    }
}

pub fn decode_starting_points(
    reader: &mut BitReader,
    count: usize,
    width: u16,
    height: u16,
) -> Result<Vec<GridPoint>> {
    let axis_y = reader.read_bit()?;
    let (primary_dim, secondary_dim) = if axis_y { (height, width) } else { (width, height) };
    let k = reader.read_bits(k_field_bits(primary_dim))? as u32;
    let mut primaries = Vec::with_capacity(count);
    let mut value = reader.read_bits(coord_bits(primary_dim))?;
    primaries.push(value);
    for _ in 1..count {
        value += rice_decode(reader, k)?;
        primaries.push(value);
    }
    let mut points = Vec::with_capacity(count);
    for &primary in &primaries {
        let secondary = reader.read_bits(coord_bits(secondary_dim))?;
        if primary > primary_dim as u64 || secondary > secondary_dim as u64 {
            return Err(Error::CorruptStream("starting point out of bounds".into()));
        }
        let (x, y) = if axis_y { (secondary, primary) } else { (primary, secondary) };
        points.push(GridPoint::new(x as i32, y as i32));
    }
    Ok(points)
}

/// History window for next-symbol prediction: the last up-to-`depth`
/// symbols of the current contour, most recent first.
fn recent_history(symbols: &[DccSymbol], upto: usize, depth: usize) -> Vec<DccSymbol> {
    let d = upto.min(depth);
    (0..d).map(|k| symbols[upto - 1 - k]).collect()
}

fn next_symbol_freq(tree: &ContextTree, symbols: &[DccSymbol], upto: usize) -> FrequencyTriple {
    let history = recent_history(symbols, upto, tree.params.depth);
    FrequencyTriple::from_probabilities(&tree.lookup(&history))
}

pub fn encode_image(
    width: u16,
    height: u16,
    contours: &[DccContour],
    tree: &ContextTree,
) -> Result<Vec<u8>> {
    encode_image_with_stats(width, height, contours, tree).map(|(bytes, _)| bytes)
}

pub fn encode_image_with_stats(
    width: u16,
    height: u16,
    contours: &[DccContour],
    tree: &ContextTree,
) -> Result<(Vec<u8>, EncodeStats)> {
    if contours.len() > u16::MAX as usize {
        return Err(Error::CorruptStream("too many contours".into()));
    }
    for c in contours {
        if c.symbols.len() > u16::MAX as usize {
            return Err(Error::ContourTooLong {
                len: c.symbols.len(),
            });
        }
    }
    let mut writer = BitWriter::new();
    for &b in MAGIC {
        writer.write_bits(b as u64, 8);
    }
    writer.write_bits(width as u64, 16);
    writer.write_bits(height as u64, 16);
    writer.write_bits(contours.len() as u64, 16);
    writer.write_bits(tree.hash(), 64);
    let mut stats = EncodeStats {
        header_bits: writer.bit_len(),
        ..EncodeStats::default()
    };
    if !contours.is_empty() {
        let points: Vec<GridPoint> = contours.iter().map(|c| c.start).collect();
        let (sp_bits, order) = encode_starting_points(&points, width, height);
        stats.starting_point_bits = sp_bits.bit_len();
        let sp_bytes_len = sp_bits.bit_len();
        {
            // splice the block bit-by-bit to keep everything MSB-aligned
            let sp = sp_bits.into_bytes();
            let mut r = BitReader::new(&sp);
            for _ in 0..sp_bytes_len {
                writer.write_bit(r.read_bit().unwrap());
            }
        }
        let ordered: Vec<&DccContour> = order.iter().map(|&i| &contours[i]).collect();
        for c in &ordered {
            writer.write_bits(c.initial.code() as u64, 2);
            writer.write_bits(c.symbols.len() as u64, 16);
        }
        stats.side_info_bits = ordered.len() * 18;
        let before = writer.bit_len();
        let mut encoder = ArithmeticEncoder::new();
        for c in &ordered {
            for (i, &sym) in c.symbols.iter().enumerate() {
                let freq = next_symbol_freq(tree, &c.symbols, i);
                encoder.encode(&mut writer, sym, &freq);
            }
        }
        encoder.finish(&mut writer);
        stats.payload_bits = writer.bit_len() - before;
    }
    stats.total_bits = writer.bit_len();
    Ok((writer.into_bytes(), stats))
}

/// Decode a bitstream produced by [`encode_image`].
///
/// Contours come back in the canonical starting-point order.
pub fn decode_image(bytes: &[u8], tree: &ContextTree) -> Result<(u16, u16, Vec<DccContour>)> {
    let mut reader = BitReader::new(bytes);
    for &b in MAGIC {
        if reader.read_bits(8)? != b as u64 {
            return Err(Error::BadMagic);
        }
    }
    let width = reader.read_bits(16)? as u16;
    let height = reader.read_bits(16)? as u16;
    let count = reader.read_bits(16)? as usize;
    let stream_hash = reader.read_bits(64)?;
    let model_hash = tree.hash();
    if stream_hash != model_hash {
        return Err(Error::ModelHashMismatch {
            stream: stream_hash,
            model: model_hash,
        });
    }
    if count == 0 {
        return Ok((width, height, Vec::new()));
    }
    let points = decode_starting_points(&mut reader, count, width, height)?;
    let mut sides = Vec::with_capacity(count);
    for _ in 0..count {
        let code = reader.read_bits(2)? as u8;
        let initial = AbsoluteDirection::from_code(code).unwrap();
        let len = reader.read_bits(16)? as usize;
        sides.push((initial, len));
    }
    let mut decoder = ArithmeticDecoder::new(reader)?;
    let mut contours = Vec::with_capacity(count);
    for (start, (initial, len)) in points.into_iter().zip(sides) {
        let mut symbols = Vec::with_capacity(len);
        for i in 0..len {
            let freq = next_symbol_freq(tree, &symbols, i);
            symbols.push(decoder.decode(&freq)?);
        }
        contours.push(DccContour::new(start, initial, symbols));
    }
    Ok((width, height, contours))
}
