//! ASCII PLY. Only the `vertex` and `face` elements are interpreted; other
//! elements are read according to their header and discarded.

use crate::error::{PlanError, Result};
use crate::model::{Cell, Point, PointCloud, Rgb};

use super::mesh::Mesh;

const SCALARS: &[&str] = &[
    "char", "uchar", "short", "ushort", "int", "uint", "float", "double", "int8", "uint8", "int16", "uint16", "int32",
    "uint32", "float32", "float64",
];

#[derive(Debug, Clone, PartialEq)]
enum Property {
    Scalar(String),
    List(String),
}

#[derive(Debug, Clone, PartialEq)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

/// Vertex positions, optional per-vertex colors and faces of a PLY file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlyData {
    pub vertices: Vec<[f64; 3]>,
    pub colors: Option<Vec<Rgb>>,
    pub faces: Vec<Vec<usize>>,
}

fn header(lines: &mut std::iter::Enumerate<std::str::Lines<'_>>) -> Result<Vec<Element>> {
    match lines.next() {
        Some((_, l)) if l.trim() == "ply" => {}
        _ => return Err(PlanError::parse(1, "missing \"ply\" magic")),
    }
    let mut elements: Vec<Element> = Vec::new();
    let mut format_seen = false;
    for (i, raw) in lines.by_ref() {
        let n = i + 1;
        let f: Vec<&str> = raw.split_whitespace().collect();
        match f.as_slice() {
            [] => {}
            ["comment" | "obj_info", ..] => {}
            ["format", "ascii", "1.0"] => format_seen = true,
            ["format", other, ..] => return Err(PlanError::parse(n, format!("unsupported format {other}"))),
            ["element", name, count] => {
                let count = count
                    .parse()
                    .map_err(|_| PlanError::parse(n, format!("bad element count {count:?}")))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            ["property", "list", ct, it, name] => {
                if !SCALARS.contains(ct) || !SCALARS.contains(it) {
                    return Err(PlanError::parse(n, "unknown list property type"));
                }
                let el = elements.last_mut().ok_or_else(|| PlanError::parse(n, "property before any element"))?;
                el.properties.push(Property::List(name.to_string()));
            }
            ["property", ty, name] => {
                if !SCALARS.contains(ty) {
                    return Err(PlanError::parse(n, format!("unknown property type {ty}")));
                }
                let el = elements.last_mut().ok_or_else(|| PlanError::parse(n, "property before any element"))?;
                el.properties.push(Property::Scalar(name.to_string()));
            }
            ["end_header"] => {
                if !format_seen {
                    return Err(PlanError::parse(n, "missing format line"));
                }
                return Ok(elements);
            }
            _ => return Err(PlanError::parse(n, format!("unexpected header line {raw:?}"))),
        }
    }
    Err(PlanError::parse(0, "missing end_header"))
}

fn number(tok: Option<&str>, n: usize) -> Result<f64> {
    let tok = tok.ok_or_else(|| PlanError::parse(n, "too few values"))?;
    let v: f64 = tok.parse().map_err(|_| PlanError::parse(n, format!("bad number {tok:?}")))?;
    if !v.is_finite() {
        return Err(PlanError::parse(n, format!("non-finite number {tok:?}")));
    }
    Ok(v)
}

fn index(tok: Option<&str>, n: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| PlanError::parse(n, "too few values"))?;
    tok.parse().map_err(|_| PlanError::parse(n, format!("bad index {tok:?}")))
}

pub fn parse_ply(text: &str) -> Result<PlyData> {
    let mut lines = text.lines().enumerate();
    let elements = header(&mut lines)?;
    let mut data = PlyData::default();
    let mut last = 0;
    for el in &elements {
        let pos = |axis: &str| {
            el.properties
                .iter()
                .position(|p| matches!(p, Property::Scalar(s) if s == axis))
        };
        let xyz = [pos("x"), pos("y"), pos("z")];
        let rgb = [pos("red"), pos("green"), pos("blue")];
        let is_vertex = el.name == "vertex";
        if is_vertex && xyz.iter().any(Option::is_none) {
            return Err(PlanError::parse(last, "vertex element lacks x, y or z"));
        }
        let colored = is_vertex && rgb.iter().all(Option::is_some);
        if colored {
            data.colors = Some(Vec::with_capacity(el.count.min(1 << 20)));
        }
        let mut read = 0;
        while read < el.count {
            let Some((i, raw)) = lines.next() else {
                return Err(PlanError::parse(
                    last + 1,
                    format!("element {} declares {} entries but {read} are present", el.name, el.count),
                ));
            };
            last = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            read += 1;
            let mut toks = raw.split_whitespace();
            let mut scalars = Vec::with_capacity(el.properties.len());
            let mut face = None;
            for p in &el.properties {
                match p {
                    Property::Scalar(_) => scalars.push(number(toks.next(), last)?),
                    Property::List(name) => {
                        let k = index(toks.next(), last)?;
                        let items = (0..k).map(|_| index(toks.next(), last)).collect::<Result<Vec<_>>>()?;
                        if el.name == "face" && (name == "vertex_indices" || name == "vertex_index") {
                            face = Some(items);
                        }
                    }
                }
            }
            if toks.next().is_some() {
                return Err(PlanError::parse(last, "too many values"));
            }
            if is_vertex {
                let at = |o: Option<usize>| o.map(|k| scalars[k]).unwrap_or_default();
                data.vertices.push([at(xyz[0]), at(xyz[1]), at(xyz[2])]);
                if let Some(colors) = data.colors.as_mut() {
                    let ch = |o: Option<usize>| {
                        let v = at(o);
                        if (0.0..=255.0).contains(&v) && v.fract() == 0.0 {
                            Ok(v as u8)
                        } else {
                            Err(PlanError::parse(last, format!("color value {v} is not in 0..=255")))
                        }
                    };
                    colors.push(Rgb::new(ch(rgb[0])?, ch(rgb[1])?, ch(rgb[2])?));
                }
            }
            if let Some(f) = face {
                data.faces.push(f);
            }
        }
    }
    if let Some((i, _)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(PlanError::parse(i + 1, "data after the last declared element"));
    }
    Ok(data)
}

/// Vertices as display cells. Coordinates must be whole, non-negative
/// numbers.
pub fn parse_ply_cloud(text: &str) -> Result<PointCloud> {
    let data = parse_ply(text)?;
    if data.vertices.is_empty() {
        return Err(PlanError::parse(1, "no vertices"));
    }
    let mut points = Vec::with_capacity(data.vertices.len());
    for (k, v) in data.vertices.iter().enumerate() {
        let mut c = [0u32; 3];
        for (dst, &x) in c.iter_mut().zip(v) {
            if x < 0.0 || x.fract() != 0.0 || x > u32::MAX as f64 {
                return Err(PlanError::parse(0, format!("vertex {k}: coordinate {x} is not a display cell")));
            }
            *dst = x as u32;
        }
        let color = data.colors.as_ref().map_or(Rgb::WHITE, |cs| cs[k]);
        points.push(Point::new(Cell::new(c[0], c[1], c[2]), color));
    }
    PointCloud::new(points)
}

pub fn parse_ply_mesh(text: &str) -> Result<Mesh> {
    let data = parse_ply(text)?;
    Mesh::new(data.vertices, data.faces)
}

/// ASCII PLY with integer vertex coordinates and colors.
pub fn write_ply_cloud<W: std::io::Write>(cloud: &PointCloud, mut w: W) -> Result<()> {
    write!(
        w,
        "ply\nformat ascii 1.0\nelement vertex {}\nproperty uint x\nproperty uint y\nproperty uint z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n",
        cloud.len()
    )?;
    for p in cloud {
        let [r, g, b] = p.color.0;
        writeln!(w, "{} {} {} {r} {g} {b}", p.cell.x, p.cell.y, p.cell.z)?;
    }
    Ok(())
}
