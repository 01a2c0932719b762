//! Plain-text contour format, one contour per line: `x,y DIR symbols`,
//! e.g. `3,4 E srsllsrlrslrssrlss`. A single-edge contour omits the
//! symbol field.

use crate::error::{Error, Result};
use crate::geom::{format_symbols, parse_symbols, AbsoluteDirection, DccContour, GridPoint};

pub fn format_contour(contour: &DccContour) -> String {
    let mut line = format!(
        "{},{} {}",
        contour.start.x,
        contour.start.y,
        contour.initial.letter()
    );
    if !contour.symbols.is_empty() {
        line.push(' ');
        line.push_str(&format_symbols(&contour.symbols));
    }
    line
}

pub fn format_contours(contours: &[DccContour]) -> String {
    let mut out = String::new();
    for c in contours {
        out.push_str(&format_contour(c));
        out.push('\n');
    }
    out
}

pub fn parse_contour_line(line: &str, line_no: usize) -> Result<DccContour> {
    let bad = |reason: &str| Error::InvalidContourText {
        line: line_no,
        reason: reason.to_string(),
    };
    let mut fields = line.split_whitespace();
    let coords = fields.next().ok_or_else(|| bad("missing coordinates"))?;
    let (xs, ys) = coords
        .split_once(',')
        .ok_or_else(|| bad("coordinates must be x,y"))?;
    let x: i32 = xs.parse().map_err(|_| bad("bad x coordinate"))?;
    let y: i32 = ys.parse().map_err(|_| bad("bad y coordinate"))?;
    let dir_field = fields.next().ok_or_else(|| bad("missing direction"))?;
    let mut dir_chars = dir_field.chars();
    let dir = dir_chars
        .next()
        .and_then(AbsoluteDirection::from_letter)
        .filter(|_| dir_chars.next().is_none())
        .ok_or_else(|| bad("direction must be one of N,E,S,W"))?;
    let symbols = match fields.next() {
        Some(s) => parse_symbols(s).ok_or_else(|| bad("symbols must be over {l,s,r}"))?,
        None => Vec::new(),
    };
    if fields.next().is_some() {
        return Err(bad("trailing fields"));
    }
    Ok(DccContour::new(GridPoint::new(x, y), dir, symbols))
}

/// Parse a whole contour text file; blank lines and `#` comments are skipped.
pub fn parse_contours(text: &str) -> Result<Vec<DccContour>> {
    let mut contours = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        contours.push(parse_contour_line(line, i + 1)?);
    }
    Ok(contours)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::DccSymbol;

    #[test]
    fn roundtrip() {
        let c = DccContour::new(
            GridPoint::new(3, 4),
            AbsoluteDirection::East,
            parse_symbols("srsllsrlrslrssrlss").unwrap(),
        );
        let line = format_contour(&c);
        assert_eq!(line, "3,4 E srsllsrlrslrssrlss");
        assert_eq!(parse_contour_line(&line, 1).unwrap(), c);
    }

    #[test]
    fn single_edge_roundtrip() {
        let c = DccContour::new(GridPoint::new(-2, 7), AbsoluteDirection::North, vec![]);
        let line = format_contour(&c);
        assert_eq!(parse_contour_line(&line, 1).unwrap(), c);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_contour_line("3 E ss", 1).is_err());
        assert!(parse_contour_line("3,4 Q ss", 1).is_err());
        assert!(parse_contour_line("3,4 E sxs", 1).is_err());
        assert!(parse_contour_line("3,4 E ss extra", 1).is_err());
    }

    #[test]
    fn parse_file_skips_comments() {
        let text = "# header\n\n0,0 E ss\n1,1 S\n";
        let contours = parse_contours(text).unwrap();
        assert_eq!(contours.len(), 2);
        assert_eq!(contours[0].symbols, vec![DccSymbol::Straight; 2]);
    }
}
