use crate::{Error, Point, Result};

/// Twice the signed area of the triangle `(a, b, c)`.
pub(crate) fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).perp(&(c - a))
}

pub(crate) fn signed_area(poly: &[Point]) -> f64 {
    let o = poly[0];
    let mut twice = 0.0;
    for i in 1..poly.len() - 1 {
        twice += orient(o, poly[i], poly[i + 1]);
    }
    0.5 * twice
}

/// Area-weighted centroid of a simple polygon.
pub(crate) fn polygon_centroid(poly: &[Point]) -> Point {
    let o = poly[0];
    let mut twice = 0.0;
    let mut acc = nalgebra::Vector2::zeros();
    for i in 1..poly.len() - 1 {
        let a = orient(o, poly[i], poly[i + 1]);
        twice += a;
        acc += a * ((poly[i] - o) + (poly[i + 1] - o)) / 3.0;
    }
    o + acc / twice
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: Point, b: Point, p: Point, d: f64| {
        d == 0.0
            && p.x >= a.x.min(b.x)
            && p.x <= a.x.max(b.x)
            && p.y >= a.y.min(b.y)
            && p.y <= a.y.max(b.y)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

/// Returns a description of the first self-intersection, if any.
fn simplicity_violation(poly: &[Point]) -> Option<String> {
    let m = poly.len();
    for i in 0..m {
        let (a, b) = (poly[i], poly[(i + 1) % m]);
        // consecutive edges may only share their common vertex
        let c = poly[(i + 2) % m];
        if orient(a, b, c) == 0.0 && (b - a).dot(&(c - b)) < 0.0 {
            return Some(format!("edges {i} and {} fold back", (i + 1) % m));
        }
        for j in i + 2..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            if segments_intersect(a, b, poly[j], poly[(j + 1) % m]) {
                return Some(format!("edges {i} and {j} intersect"));
            }
        }
    }
    None
}

fn point_in_triangle(p: Point, a: Point, b: Point, c: Point) -> bool {
    orient(a, b, p) >= 0.0 && orient(b, c, p) >= 0.0 && orient(c, a, p) >= 0.0
}

/// Ear-clipping triangulation of a simple counter-clockwise polygon.
fn ear_clip(poly: &[Point]) -> Vec<[Point; 3]> {
    let mut idx: Vec<usize> = (0..poly.len()).collect();
    let mut out = Vec::with_capacity(poly.len() - 2);
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for i in 0..m {
            let (ia, ib, ic) = (idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]);
            let (a, b, c) = (poly[ia], poly[ib], poly[ic]);
            if orient(a, b, c) <= 0.0 {
                continue;
            }
            let blocked = idx
                .iter()
                .filter(|&&j| j != ia && j != ib && j != ic)
                .any(|&j| point_in_triangle(poly[j], a, b, c));
            if !blocked {
                out.push([a, b, c]);
                idx.remove(i);
                clipped = true;
                break;
            }
        }
        if !clipped {
            // only collinear runs remain; they carry no area
            let (a, b, c) = (poly[idx[m - 1]], poly[idx[0]], poly[idx[1]]);
            out.push([a, b, c]);
            idx.remove(0);
        }
    }
    out.push([poly[idx[0]], poly[idx[1]], poly[idx[2]]]);
    out
}

/// Geometry of one polygonal cell: its vertex loop, centroid `x_K`,
/// diameter `h_K`, area `|K|` and a triangulation used for all volume
/// integrals.
///
/// The triangulation is the fan from the centroid whenever the cell is
/// star-shaped with respect to it, and an ear-clipping triangulation of the
/// vertices otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGeometry {
    vertices: Vec<Point>,
    centroid: Point,
    diameter: f64,
    area: f64,
    perimeter: f64,
    triangles: Vec<[Point; 3]>,
}

impl CellGeometry {
    /// `cell` is only used to label errors.
    pub fn new(cell: usize, vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateCell {
                cell,
                reason: format!("{} vertices", vertices.len()),
            });
        }
        let area = signed_area(&vertices);
        if area.is_nan() || area <= 0.0 {
            return Err(Error::Orientation { cell, area });
        }
        if let Some(reason) = simplicity_violation(&vertices) {
            return Err(Error::NotSimple { cell, reason });
        }
        let centroid = polygon_centroid(&vertices);
        let m = vertices.len();
        let mut diameter: f64 = 0.0;
        let mut perimeter = 0.0;
        for i in 0..m {
            perimeter += (vertices[(i + 1) % m] - vertices[i]).norm();
            for j in i + 1..m {
                diameter = diameter.max((vertices[j] - vertices[i]).norm());
            }
        }
        let fan_ok = (0..m).all(|i| orient(centroid, vertices[i], vertices[(i + 1) % m]) > 1e-12 * area);
        let triangles = if fan_ok {
            (0..m)
                .map(|i| [centroid, vertices[i], vertices[(i + 1) % m]])
                .collect()
        } else {
            ear_clip(&vertices)
        };
        Ok(Self {
            vertices,
            centroid,
            diameter,
            area,
            perimeter,
            triangles,
        })
    }

    /// Convenience constructor for a free-standing polygon.
    pub fn from_polygon(vertices: Vec<Point>) -> Result<Self> {
        Self::new(0, vertices)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn centroid(&self) -> Point {
        self.centroid
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// `|∂K|`.
    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn triangles(&self) -> &[[Point; 3]] {
        &self.triangles
    }

    /// Endpoints of local edge `j` (from vertex `j` to vertex `j + 1`).
    pub fn edge(&self, j: usize) -> (Point, Point) {
        let m = self.vertices.len();
        (self.vertices[j], self.vertices[(j + 1) % m])
    }

    /// Closed-set point inclusion test.
    pub fn contains(&self, p: Point) -> bool {
        polygon_contains(&self.vertices, p)
    }

    /// A copy scaled by `factor` about the origin.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(0, self.vertices.iter().map(|v| Point::from(v.coords * factor)).collect())
    }
}

/// Crossing-number inclusion test; points on the boundary count as inside.
pub(crate) fn polygon_contains(poly: &[Point], p: Point) -> bool {
    let m = poly.len();
    let mut inside = false;
    for i in 0..m {
        let (a, b) = (poly[i], poly[(i + 1) % m]);
        if orient(a, b, p) == 0.0
            && p.x >= a.x.min(b.x)
            && p.x <= a.x.max(b.x)
            && p.y >= a.y.min(b.y)
            && p.y <= a.y.max(b.y)
        {
            return true;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// A simple polygonal computational domain, stored counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    vertices: Vec<Point>,
}

impl Domain {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let geom = CellGeometry::new(0, vertices).map_err(|e| {
            Error::InvalidParameter(format!("domain polygon must be simple and counter-clockwise: {e}"))
        })?;
        Ok(Self {
            vertices: geom.vertices,
        })
    }

    pub fn unit_square() -> Self {
        Self::rectangle(0.0, 0.0, 1.0, 1.0)
    }

    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self {
            vertices: vec![
                Point::new(x0, y0),
                Point::new(x1, y0),
                Point::new(x1, y1),
                Point::new(x0, y1),
            ],
        }
    }

    /// `(0,1)²` with the closed square `[½,1]×[½,1]` removed.
    pub fn l_shape() -> Self {
        Self {
            vertices: vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 0.5),
                Point::new(0.5, 0.5),
                Point::new(0.5, 1.0),
                Point::new(0.0, 1.0),
            ],
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn contains(&self, p: Point) -> bool {
        polygon_contains(&self.vertices, p)
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            lo = Point::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Point::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (hi - lo).norm()
    }

    pub fn is_convex(&self) -> bool {
        let m = self.vertices.len();
        (0..m).all(|i| {
            orient(self.vertices[i], self.vertices[(i + 1) % m], self.vertices[(i + 2) % m]) >= 0.0
        })
    }

    /// Distance from `p` to the domain boundary.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        let m = self.vertices.len();
        (0..m)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % m]);
                let ab = b - a;
                let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
                (p - (a + ab * t)).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pentagon() -> Vec<Point> {
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.1),
            Point::new(1.3, 0.8),
            Point::new(0.5, 1.2),
            Point::new(-0.2, 0.7),
        ]
    }

    #[test]
    fn centroid_matches_triangulation() {
        let g = CellGeometry::from_polygon(pentagon()).unwrap();
        let mut a = 0.0;
        let mut c = nalgebra::Vector2::zeros();
        for t in g.triangles() {
            let ta = 0.5 * orient(t[0], t[1], t[2]);
            assert!(ta > 0.0);
            a += ta;
            c += ta * (t[0].coords + t[1].coords + t[2].coords) / 3.0;
        }
        assert!((a - g.area()).abs() < 1e-14);
        assert!((c / a - g.centroid().coords).norm() < 1e-14);
    }

    #[test]
    fn diameter_is_max_vertex_distance() {
        let g = CellGeometry::from_polygon(pentagon()).unwrap();
        assert!((g.diameter() - (Point::new(1.3, 0.8) - Point::new(0.0, 0.0)).norm()).abs() < 1e-15);
    }

    #[test]
    fn nonconvex_cell_falls_back_to_ear_clipping() {
        // U shape: the centroid sits in the notch, outside the polygon
        let u = vec![
            Point::new(0.0, 0.0),
            Point::new(3.0, 0.0),
            Point::new(3.0, 3.0),
            Point::new(2.0, 3.0),
            Point::new(2.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 3.0),
            Point::new(0.0, 3.0),
        ];
        let g = CellGeometry::from_polygon(u).unwrap();
        assert!(!g.contains(g.centroid()));
        assert_eq!(g.triangles().len(), 6);
        let sum: f64 = g.triangles().iter().map(|t| 0.5 * orient(t[0], t[1], t[2])).sum();
        assert!((sum - 7.0).abs() < 1e-14);
        assert!(g.triangles().iter().all(|t| orient(t[0], t[1], t[2]) > 0.0));
    }

    #[test]
    fn bow_tie_is_not_simple() {
        // positive signed area, but the last edge cuts through the first
        let bow = vec![
            Point::new(0.0, 0.0),
            Point::new(4.0, 0.0),
            Point::new(4.0, 4.0),
            Point::new(0.0, 4.0),
            Point::new(2.0, -2.0),
        ];
        assert!(matches!(
            CellGeometry::from_polygon(bow),
            Err(Error::NotSimple { .. })
        ));
    }

    #[test]
    fn domain_queries() {
        let l = Domain::l_shape();
        assert!((l.area() - 0.75).abs() < 1e-15);
        assert!(!l.is_convex());
        assert!(Domain::unit_square().is_convex());
        assert!(l.contains(Point::new(0.25, 0.75)));
        assert!(!l.contains(Point::new(0.75, 0.75)));
        assert!((l.boundary_distance(Point::new(0.25, 0.25)) - 0.25).abs() < 1e-15);
    }
}
