use std::f64::consts::PI;

use super::Mesh;
use crate::{Error, Point, Result};

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rectangle {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn unit() -> Self {
        Self::new(0.0, 0.0, 1.0, 1.0)
    }
}

/// `nx × ny` congruent quadrilaterals. Vertices are numbered row by row from
/// the lower-left corner.
pub fn generate_rectangle_grid(nx: usize, ny: usize, domain: Rectangle) -> Result<Mesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidParameter(format!(
            "grid needs positive cell counts, got {nx} x {ny}"
        )));
    }
    let Rectangle { x0, y0, x1, y1 } = domain;
    if !(x1 > x0 && y1 > y0) || ![x0, y0, x1, y1].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "degenerate rectangle [{x0}, {x1}] x [{y0}, {y1}]"
        )));
    }
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        let y = if j == ny { y1 } else { y0 + (y1 - y0) * j as f64 / ny as f64 };
        for i in 0..=nx {
            let x = if i == nx { x1 } else { x0 + (x1 - x0) * i as f64 / nx as f64 };
            vertices.push(Point::new(x, y));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut cells = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    Mesh::new(vertices, cells)
}

/// Uniform grid of the unit square with interior vertices moved by
/// `(x, y) ↦ (x + δ s, y + δ s)`, `s = sin(2πx) sin(2πy)`. Boundary vertices
/// stay put.
pub fn generate_distorted_grid(nx: usize, ny: usize, delta: f64) -> Result<Mesh> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidParameter(format!(
            "distorted grid needs at least 2 x 2 cells, got {nx} x {ny}"
        )));
    }
    if !(0.0..0.25).contains(&delta) {
        return Err(Error::InvalidParameter(format!(
            "distortion must lie in [0, 0.25), got {delta}"
        )));
    }
    let base = generate_rectangle_grid(nx, ny, Rectangle::unit())?;
    if delta == 0.0 {
        return Ok(base);
    }
    let mut vertices = base.vertices().to_vec();
    for j in 1..ny {
        for i in 1..nx {
            let v = &mut vertices[j * (nx + 1) + i];
            let s = delta * (2.0 * PI * v.x).sin() * (2.0 * PI * v.y).sin();
            *v = Point::new(v.x + s, v.y + s);
        }
    }
    Mesh::new(vertices, base.cells().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_grid() {
        let m = generate_rectangle_grid(1, 1, Rectangle::unit()).unwrap();
        assert_eq!((m.n_cells(), m.n_vertices(), m.n_edges()), (1, 4, 4));
        assert!(m.edges().iter().all(|e| e.is_boundary()));
    }

    #[test]
    fn grid_area_partition() {
        let m = generate_rectangle_grid(4, 4, Rectangle::unit()).unwrap();
        assert!((m.total_area() - 1.0).abs() < 1e-12);
        let r = generate_rectangle_grid(3, 5, Rectangle::new(-1.0, 2.0, 2.0, 2.5)).unwrap();
        assert!((r.total_area() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(generate_rectangle_grid(0, 3, Rectangle::unit()).is_err());
        assert!(generate_rectangle_grid(2, 2, Rectangle::new(0.0, 0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn zero_distortion_is_the_uniform_grid() {
        let a = generate_distorted_grid(4, 4, 0.0).unwrap();
        let b = generate_rectangle_grid(4, 4, Rectangle::unit()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn distortion_keeps_boundary_and_orientation() {
        let uniform = generate_rectangle_grid(4, 4, Rectangle::unit()).unwrap();
        let m = generate_distorted_grid(4, 4, 0.1).unwrap();
        let on_boundary = uniform.boundary_vertices();
        for (i, flag) in on_boundary.iter().enumerate() {
            if *flag {
                assert_eq!(m.vertex(i), uniform.vertex(i));
            }
        }
        let m8 = generate_distorted_grid(8, 8, 0.1).unwrap();
        assert!(m8.geometries().iter().all(|g| g.area() > 0.0));
        assert!((m8.total_area() - 1.0).abs() < 1e-12);
        assert_ne!(m8.vertex(10), generate_rectangle_grid(8, 8, Rectangle::unit()).unwrap().vertex(10));
    }

    #[test]
    fn distortion_out_of_range_is_rejected() {
        assert!(generate_distorted_grid(4, 4, 0.3).is_err());
        assert!(generate_distorted_grid(1, 4, 0.1).is_err());
    }

    #[test]
    fn large_distortion_inverts_cells() {
        // det of the map is 1 + 2πδ sin(2π(x+y)); δ = 0.24 folds coarse cells
        let err = (2..12)
            .map(|n| generate_distorted_grid(n, n, 0.24))
            .find_map(|r| r.err());
        assert!(matches!(
            err,
            Some(Error::Orientation { .. }) | Some(Error::NotSimple { .. })
        ));
    }
}
