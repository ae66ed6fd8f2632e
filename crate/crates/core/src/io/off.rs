//! Object File Format meshes: `OFF`, then `vertices faces edges`, then the
//! vertex lines and face lines (`k i1 .. ik`, optional trailing color).

use crate::error::{PlanError, Result};

use super::mesh::Mesh;

pub fn parse_off(text: &str) -> Result<Mesh> {
    // Tokens of every non-comment line, with their line numbers.
    let mut lines = text.lines().enumerate().filter_map(|(i, l)| {
        let body = l.split('#').next().unwrap_or_default();
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    });
    let (n, mut head) = lines.next().ok_or_else(|| PlanError::parse(1, "empty file"))?;
    if head.first() != Some(&"OFF") {
        return Err(PlanError::parse(n, "missing \"OFF\" keyword"));
    }
    head.remove(0);
    let (n, counts) = if head.is_empty() {
        lines.next().ok_or_else(|| PlanError::parse(n, "missing counts line"))?
    } else {
        (n, head)
    };
    let count = |i: usize| -> Result<usize> {
        counts
            .get(i)
            .ok_or_else(|| PlanError::parse(n, "expected vertex, face and edge counts"))?
            .parse()
            .map_err(|_| PlanError::parse(n, "bad count"))
    };
    let (nv, nf) = (count(0)?, count(1)?);

    let mut vertices = Vec::with_capacity(nv.min(1 << 20));
    for k in 0..nv {
        let (n, toks) = lines
            .next()
            .ok_or_else(|| PlanError::parse(n, format!("{nv} vertices declared, {k} present")))?;
        if toks.len() < 3 {
            return Err(PlanError::parse(n, "vertex needs three coordinates"));
        }
        let mut v = [0.0; 3];
        for (dst, t) in v.iter_mut().zip(&toks) {
            *dst = t
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| PlanError::parse(n, format!("bad coordinate {t:?}")))?;
        }
        vertices.push(v);
    }
    let mut faces = Vec::with_capacity(nf.min(1 << 20));
    for k in 0..nf {
        let (n, toks) = lines
            .next()
            .ok_or_else(|| PlanError::parse(n, format!("{nf} faces declared, {k} present")))?;
        let idx = |t: &str| t.parse::<usize>().map_err(|_| PlanError::parse(n, format!("bad index {t:?}")));
        let len = idx(toks[0])?;
        if toks.len() < len + 1 {
            return Err(PlanError::parse(n, format!("face declares {len} vertices")));
        }
        faces.push(toks[1..=len].iter().map(|t| idx(t)).collect::<Result<Vec<_>>>()?);
    }
    if let Some((n, _)) = lines.next() {
        return Err(PlanError::parse(n, "data after the declared faces"));
    }
    Mesh::new(vertices, faces)
}
