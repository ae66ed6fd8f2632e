//! Plain-text clouds: one point per line, `x y z` or `x y z r g b`,
//! whitespace separated. `#` starts a comment.

use std::io::Write;

use crate::error::{PlanError, Result};
use crate::model::{Cell, Point, PointCloud, Rgb};

pub fn parse_xyz(text: &str) -> Result<PointCloud> {
    let mut points = Vec::new();
    let mut lines = 0;
    for (i, raw) in text.lines().enumerate() {
        lines = i + 1;
        let line = raw.split('#').next().unwrap_or_default();
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 3 && fields.len() != 6 {
            return Err(PlanError::parse(lines, format!("expected 3 or 6 fields, found {}", fields.len())));
        }
        let coord = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| PlanError::parse(lines, format!("bad coordinate {s:?}")))
        };
        let channel = |s: &str| s.parse::<u8>().map_err(|_| PlanError::parse(lines, format!("bad color value {s:?}")));
        let cell = Cell::new(coord(fields[0])?, coord(fields[1])?, coord(fields[2])?);
        let color = if fields.len() == 6 {
            Rgb::new(channel(fields[3])?, channel(fields[4])?, channel(fields[5])?)
        } else {
            Rgb::WHITE
        };
        points.push(Point::new(cell, color));
    }
    if points.is_empty() {
        return Err(PlanError::parse(lines.max(1), "no points"));
    }
    PointCloud::new(points)
}

/// Writes every point with its color, so parsing the output gives back the
/// same cloud.
pub fn write_xyz<W: Write>(cloud: &PointCloud, mut w: W) -> Result<()> {
    for p in cloud {
        let [r, g, b] = p.color.0;
        writeln!(w, "{} {} {} {r} {g} {b}", p.cell.x, p.cell.y, p.cell.z)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let c = parse_xyz("0 0 0\n1 2 3").unwrap();
        assert_eq!(c.points(), &[Point::white(0, 0, 0), Point::white(1, 2, 3)]);
    }

    #[test]
    fn explicit_color_and_comments() {
        let c = parse_xyz("# header\n\n0 0 0 10 20 30  # trailing\n").unwrap();
        assert_eq!(c.points()[0].color, Rgb::new(10, 20, 30));
    }

    #[test]
    fn duplicate_is_rejected() {
        let err = parse_xyz("0 0 0\n0 0 0\n").unwrap_err();
        assert!(matches!(err, PlanError::DuplicateCell(c) if c == Cell::new(0, 0, 0)));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_xyz("1 1 1\n1 2\n").unwrap_err();
        assert!(matches!(err, PlanError::Parse { line: 2, .. }));
        assert!(matches!(parse_xyz("1 1 1\n2 2 -2"), Err(PlanError::Parse { line: 2, .. })));
        assert!(matches!(parse_xyz("1 1 1 256 0 0"), Err(PlanError::Parse { line: 1, .. })));
        assert!(matches!(parse_xyz("# nothing\n"), Err(PlanError::Parse { .. })));
        assert!(matches!(parse_xyz(""), Err(PlanError::Parse { .. })));
    }

    #[test]
    fn round_trip() {
        let c = parse_xyz("5 6 7 1 2 3\n0 0 9\n").unwrap();
        let mut out = Vec::new();
        write_xyz(&c, &mut out).unwrap();
        assert_eq!(parse_xyz(std::str::from_utf8(&out).unwrap()).unwrap(), c);
    }
}
