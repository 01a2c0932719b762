//! Binary raster masks, PBM input and between-pixel boundary tracing.

use crate::error::{Error, Result};
use crate::geom::{edges_to_dcc, AbsoluteDirection, DccContour, GridPoint};

/// A W×H binary raster; `true` is foreground.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMask {
    pub width: usize,
    pub height: usize,
    data: Vec<bool>,
}

impl BitMask {
    pub fn new(width: usize, height: usize) -> BitMask {
        BitMask {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    pub fn get(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            false
        } else {
            self.data[y as usize * self.width + x as usize]
        }
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = value;
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }
}

/// Parse a PBM portable bitmap, either P1 (ASCII) or P4 (binary).
pub fn parse_pbm(bytes: &[u8]) -> Result<BitMask> {
    let mut pos = 0;
    let magic = read_token(bytes, &mut pos).ok_or_else(|| err("missing magic"))?;
    match magic.as_str() {
        "P1" => parse_p1(bytes, pos),
        "P4" => parse_p4(bytes, pos),
        other => Err(err(&format!("unsupported magic {other:?}"))),
    }
}

fn err(reason: &str) -> Error {
    Error::InvalidPbm(reason.to_string())
}

fn skip_ws_and_comments(bytes: &[u8], pos: &mut usize) {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            return;
        }
    }
}

fn read_token(bytes: &[u8], pos: &mut usize) -> Option<String> {
    skip_ws_and_comments(bytes, pos);
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
        *pos += 1;
    }
    if *pos > start {
        Some(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    } else {
        None
    }
}

fn read_dims(bytes: &[u8], pos: &mut usize) -> Result<(usize, usize)> {
    let w = read_token(bytes, pos)
        .and_then(|t| t.parse::<usize>().ok())
        .ok_or_else(|| err("bad width"))?;
    let h = read_token(bytes, pos)
        .and_then(|t| t.parse::<usize>().ok())
        .ok_or_else(|| err("bad height"))?;
    Ok((w, h))
}

fn parse_p1(bytes: &[u8], mut pos: usize) -> Result<BitMask> {
    let (width, height) = read_dims(bytes, &mut pos)?;
    let mut mask = BitMask::new(width, height);
    let mut count = 0;
    while count < width * height {
        skip_ws_and_comments(bytes, &mut pos);
        if pos >= bytes.len() {
            return Err(err("truncated pixel data"));
        }
        let bit = match bytes[pos] {
            b'0' => false,
            b'1' => true,
            c => return Err(err(&format!("unexpected byte {c:#04x} in pixel data"))),
        };
        mask.data[count] = bit;
        count += 1;
        pos += 1;
    }
    Ok(mask)
}

fn parse_p4(bytes: &[u8], mut pos: usize) -> Result<BitMask> {
    let (width, height) = read_dims(bytes, &mut pos)?;
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(err("missing raster separator"));
    }
    pos += 1;
    let row_bytes = width.div_ceil(8);
    if bytes.len() < pos + row_bytes * height {
        return Err(err("truncated raster"));
    }
    let mut mask = BitMask::new(width, height);
    for y in 0..height {
        let row = &bytes[pos + y * row_bytes..pos + (y + 1) * row_bytes];
        for x in 0..width {
            let bit = (row[x / 8] >> (7 - x % 8)) & 1 == 1;
            mask.set(x, y, bit);
        }
    }
    Ok(mask)
}

/// Serialize as P1 ASCII, mainly for fixtures and debugging.
pub fn write_pbm_p1(mask: &BitMask) -> String {
    let mut out = format!("P1\n{} {}\n", mask.width, mask.height);
    for y in 0..mask.height {
        for x in 0..mask.width {
            out.push(if mask.get(x as i64, y as i64) { '1' } else { '0' });
            out.push(if x + 1 == mask.width { '\n' } else { ' ' });
        }
    }
    out
}

/// Trace the closed between-pixel boundary of every 4-connected foreground
/// region, clockwise with the foreground to the right of traversal.
///
/// The starting point of each contour is the lexicographically smallest
/// (y, then x) boundary corner of its region; regions are returned in
/// row-major discovery order.
pub fn trace_mask(mask: &BitMask) -> Vec<DccContour> {
    let mut labels = vec![0u32; mask.width * mask.height];
    let mut contours = Vec::new();
    let mut next_label = 0u32;
    for y in 0..mask.height {
        for x in 0..mask.width {
            if mask.get(x as i64, y as i64) && labels[y * mask.width + x] == 0 {
                next_label += 1;
                flood_fill(mask, &mut labels, x, y, next_label);
                contours.push(trace_region(mask, &labels, next_label, x, y));
            }
        }
    }
    contours
}

fn flood_fill(mask: &BitMask, labels: &mut [u32], x: usize, y: usize, label: u32) {
    let mut stack = vec![(x, y)];
    labels[y * mask.width + x] = label;
    while let Some((cx, cy)) = stack.pop() {
        for (dx, dy) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
            let nx = cx as i64 + dx;
            let ny = cy as i64 + dy;
            if mask.get(nx, ny) {
                let idx = ny as usize * mask.width + nx as usize;
                if labels[idx] == 0 {
                    labels[idx] = label;
                    stack.push((nx as usize, ny as usize));
                }
            }
        }
    }
}

/// Crack following: at each corner, turn left if the front-left pixel is
/// foreground, go straight if only the front-right pixel is, else turn right.
fn trace_region(
    mask: &BitMask,
    labels: &[u32],
    label: u32,
    first_x: usize,
    first_y: usize,
) -> DccContour {
    let in_region = |x: i64, y: i64| -> bool {
        mask.get(x, y) && labels[y as usize * mask.width + x as usize] == label
    };
    // top-left corner of the first pixel in row-major order is the
    // lexicographically smallest boundary corner of the region
    let start = GridPoint::new(first_x as i32, first_y as i32);
    let mut dir = AbsoluteDirection::East;
    let mut pos = start;
    let mut edges = Vec::new();
    loop {
        pos = pos.step(dir);
        edges.push((pos, dir));
        if pos == start {
            break;
        }
        let (x, y) = (pos.x as i64, pos.y as i64);
        let (front_left, front_right) = match dir {
            AbsoluteDirection::East => ((x, y - 1), (x, y)),
            AbsoluteDirection::South => ((x, y), (x - 1, y)),
            AbsoluteDirection::West => ((x - 1, y), (x - 1, y - 1)),
            AbsoluteDirection::North => ((x - 1, y - 1), (x, y - 1)),
        };
        dir = if in_region(front_left.0, front_left.1) {
            dir.rotate(crate::geom::DccSymbol::Left)
        } else if in_region(front_right.0, front_right.1) {
            dir
        } else {
            dir.rotate(crate::geom::DccSymbol::Right)
        };
    }
    edges_to_dcc(&edges).expect("crack following never reverses or skips")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::format_symbols;

    fn mask_from(rows: &[&str]) -> BitMask {
        let height = rows.len();
        let width = rows[0].len();
        let mut m = BitMask::new(width, height);
        for (y, row) in rows.iter().enumerate() {
            for (x, c) in row.chars().enumerate() {
                m.set(x, y, c == '1');
            }
        }
        m
    }

    #[test]
    fn single_pixel_square() {
        let contours = trace_mask(&mask_from(&["1"]));
        assert_eq!(contours.len(), 1);
        let c = &contours[0];
        assert_eq!(c.start, GridPoint::new(0, 0));
        assert_eq!(c.initial, AbsoluteDirection::East);
        assert_eq!(format_symbols(&c.symbols), "rrr");
        assert_eq!(c.edge_count(), 4);
        assert!(c.is_closed());
    }

    #[test]
    fn horizontal_bar() {
        let contours = trace_mask(&mask_from(&["11"]));
        assert_eq!(contours.len(), 1);
        assert_eq!(contours[0].edge_count(), 6);
        assert!(contours[0].is_closed());
    }

    #[test]
    fn two_disjoint_pixels() {
        let contours = trace_mask(&mask_from(&["101"]));
        assert_eq!(contours.len(), 2);
        assert_eq!(contours[0].start, GridPoint::new(0, 0));
        assert_eq!(contours[1].start, GridPoint::new(2, 0));
    }

    #[test]
    fn diagonal_pixels_are_two_regions() {
        let contours = trace_mask(&mask_from(&["10", "01"]));
        assert_eq!(contours.len(), 2);
    }

    #[test]
    fn empty_mask() {
        assert!(trace_mask(&mask_from(&["000", "000"])).is_empty());
    }

    #[test]
    fn l_shape_closed() {
        let contours = trace_mask(&mask_from(&["10", "11"]));
        assert_eq!(contours.len(), 1);
        let c = &contours[0];
        assert!(c.is_closed());
        assert_eq!(c.edge_count(), 8);
    }

    #[test]
    fn pbm_p1_p4_agree() {
        let m = mask_from(&["10110110100", "01011010011", "11100000001"]);
        let p1 = write_pbm_p1(&m);
        assert_eq!(parse_pbm(p1.as_bytes()).unwrap(), m);
        // pack the same mask as P4
        let mut p4 = format!("P4\n{} {}\n", m.width, m.height).into_bytes();
        for y in 0..m.height {
            let mut row = vec![0u8; m.width.div_ceil(8)];
            for x in 0..m.width {
                if m.get(x as i64, y as i64) {
                    row[x / 8] |= 1 << (7 - x % 8);
                }
            }
            p4.extend_from_slice(&row);
        }
        assert_eq!(parse_pbm(&p4).unwrap(), m);
    }

    #[test]
    fn malformed_pbm() {
        assert!(parse_pbm(b"P5\n2 2\n").is_err());
        assert!(parse_pbm(b"P1\n2 2\n1 0 1").is_err());
        assert!(parse_pbm(b"P4\n9 2\nx").is_err());
    }
}
