//! Plain-text mesh format.
//!
//! ```text
//! NV NC
//! x y            (NV lines)
//! m i1 ... im    (NC lines, 0-based counter-clockwise vertex indices)
//! ```
//!
//! Blank lines and `#` comments are ignored. Coordinates are written with
//! the shortest representation that round-trips exactly.

use std::fmt::Write as _;
use std::path::Path;

use super::Mesh;
use crate::{Error, Point, Result};

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", mesh.n_vertices(), mesh.n_cells());
    for v in mesh.vertices() {
        let _ = writeln!(out, "{:?} {:?}", v.x, v.y);
    }
    for cell in mesh.cells() {
        let _ = write!(out, "{}", cell.len());
        for i in cell {
            let _ = write!(out, " {i}");
        }
        out.push('\n');
    }
    out
}

pub fn save_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_mesh(mesh))?;
    Ok(())
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    parse_mesh(&std::fs::read_to_string(path)?)
}

pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    });
    let parse_err = |line: usize, message: String| Error::Parse { line, message };

    let (line, header) = lines
        .next()
        .ok_or_else(|| parse_err(0, "empty mesh file".into()))?;
    let counts: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(line, format!("bad header: {e}")))?;
    let [nv, nc] = counts[..] else {
        return Err(parse_err(line, "header must be `NV NC`".into()));
    };

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, l) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("expected {nv} vertex lines")))?;
        let xy: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(line, format!("bad coordinate: {e}")))?;
        match xy[..] {
            [x, y] if x.is_finite() && y.is_finite() => vertices.push(Point::new(x, y)),
            _ => return Err(parse_err(line, "vertex line must be `x y`".into())),
        }
    }

    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (line, l) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("expected {nc} cell lines")))?;
        let ids: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(line, format!("bad index: {e}")))?;
        let Some((&m, rest)) = ids.split_first() else {
            return Err(parse_err(line, "empty cell line".into()));
        };
        if rest.len() != m {
            return Err(parse_err(
                line,
                format!("cell declares {m} vertices but lists {}", rest.len()),
            ));
        }
        cells.push(rest.to_vec());
    }
    if let Some((line, _)) = lines.next() {
        return Err(parse_err(line, "trailing content".into()));
    }
    Mesh::new(vertices, cells)
}
