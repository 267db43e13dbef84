//! Plain-text point-set files.
//!
//! ```text
//! # riesz-pointset 1
//! # manifold sphere
//! # dim 2
//! # n 3
//! # generator fibonacci
//! # seed 7
//! # params {"pool":1000}
//! 6.6666666666666674e-01,0.0000000000000000e+00,7.4535599249992990e-01
//! ...
//! ```
//!
//! `seed` and `params` are optional. Floats carry 17 significant digits so a
//! save/load cycle is lossless.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::manifold::{Manifold, ManifoldKind, Point};
use crate::pointsets::{PointSet, Provenance};

pub const FORMAT_MAGIC: &str = "riesz-pointset";
pub const FORMAT_VERSION: u32 = 1;

/// Points moved further than this by renormalization on load are reported.
pub const LOAD_WARN_TOL: f64 = 1e-9;

pub fn write_point_set(x: &PointSet) -> String {
    let m = x.manifold();
    let prov = x.provenance();
    let mut out = String::new();
    let _ = writeln!(out, "# {FORMAT_MAGIC} {FORMAT_VERSION}");
    let _ = writeln!(out, "# manifold {}", m.kind().name());
    let _ = writeln!(out, "# dim {}", m.dim());
    let _ = writeln!(out, "# n {}", x.len());
    let _ = writeln!(out, "# generator {}", prov.generator);
    if let Some(seed) = prov.seed {
        let _ = writeln!(out, "# seed {seed}");
    }
    if !prov.params.is_empty() {
        let params = serde_json::to_string(&prov.params).expect("params serialize");
        let _ = writeln!(out, "# params {params}");
    }
    for p in x.points() {
        let row: Vec<String> = p.coords().iter().map(|c| format!("{c:.16e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug)]
pub struct LoadedPointSet {
    pub points: PointSet,
    /// One message per point that moved more than [`LOAD_WARN_TOL`].
    pub warnings: Vec<String>,
}

pub fn read_point_set(text: &str) -> Result<LoadedPointSet> {
    let mut magic_seen = false;
    let mut kind = None;
    let mut dim = None;
    let mut n = None;
    let mut prov = Provenance::new("unknown");
    let mut rows: Vec<(usize, Vec<f64>)> = vec![];

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            let h = h.trim();
            let (key, value) = h.split_once(char::is_whitespace).unwrap_or((h, ""));
            let value = value.trim();
            let bad = || Error::input(format!("line {lineno}: invalid {key} '{value}'"));
            match key {
                FORMAT_MAGIC => {
                    let v: u32 = value.parse().map_err(|_| bad())?;
                    if v != FORMAT_VERSION {
                        return Err(Error::input(format!("unsupported format version {v}")));
                    }
                    magic_seen = true;
                }
                "manifold" => kind = Some(ManifoldKind::parse(value)?),
                "dim" => dim = Some(value.parse::<usize>().map_err(|_| bad())?),
                "n" => n = Some(value.parse::<usize>().map_err(|_| bad())?),
                "generator" => prov.generator = value.to_string(),
                "seed" => prov.seed = Some(value.parse().map_err(|_| bad())?),
                "params" => prov.params = serde_json::from_str(value).map_err(|_| bad())?,
                // free-form comment
                _ => {}
            }
            continue;
        }
        let coords = line
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::input(format!("line {lineno}: bad number '{}'", t.trim())))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((lineno, coords));
    }

    if !magic_seen {
        return Err(Error::input(format!("missing '# {FORMAT_MAGIC}' header")));
    }
    let kind = kind.ok_or_else(|| Error::input("missing 'manifold' header"))?;
    let dim = dim.ok_or_else(|| Error::input("missing 'dim' header"))?;
    let n = n.ok_or_else(|| Error::input("missing 'n' header"))?;
    let m = Manifold::new(kind, dim)?;
    if rows.len() != n {
        return Err(Error::input(format!("header says n = {n} but file has {} rows", rows.len())));
    }

    let mut warnings = vec![];
    let mut points = Vec::with_capacity(n);
    for (i, (lineno, coords)) in rows.into_iter().enumerate() {
        if coords.len() != m.ambient_dim() {
            return Err(Error::input(format!(
                "line {lineno}: expected {} coordinates, got {}",
                m.ambient_dim(),
                coords.len()
            )));
        }
        let raw = Point::from_raw(coords.clone());
        if m.check_point(&raw).is_ok() {
            points.push(raw);
            continue;
        }
        let p = m
            .point(coords.clone())
            .map_err(|e| Error::input(format!("line {lineno}: {e}")))?;
        // wrapping a torus coordinate by whole periods is not a move
        let moved = match kind {
            ManifoldKind::FlatTorus => 0.0,
            ManifoldKind::Sphere => coords
                .iter()
                .zip(p.coords())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt(),
        };
        if moved > LOAD_WARN_TOL {
            warnings.push(format!("point {i} moved by {moved:.3e} when projected onto the manifold"));
        }
        points.push(p);
    }
    Ok(LoadedPointSet {
        points: PointSet::new(m, points, prov)?,
        warnings,
    })
}
