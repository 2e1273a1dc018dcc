//! Polygon geometry and integration that avoid the cell triangulations of
//! the crate under test.

use ipvem::Point;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::quadrature::gauss_legendre;

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Self {
        assert!(vertices.len() >= 3);
        Self { vertices }
    }

    /// Star-shaped polygon about a random centre with `n` vertices at sorted
    /// random angles and radii in `[0.5, 1]` times a random scale.
    pub fn random_star(seed: u64, n: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = rng.random_range(0.05..2.0);
        let centre = Point::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let gap = std::f64::consts::TAU / n as f64;
        let vertices = (0..n)
            .map(|i| {
                let angle = gap * (i as f64 + rng.random_range(-0.3..0.3));
                let r = scale * rng.random_range(0.5..1.0);
                centre + r * nalgebra::Vector2::new(angle.cos(), angle.sin())
            })
            .collect();
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge(&self, j: usize) -> (Point, Point) {
        (self.vertices[j], self.vertices[(j + 1) % self.len()])
    }

    pub fn area(&self) -> f64 {
        (0..self.len())
            .map(|j| {
                let (a, b) = self.edge(j);
                a.x * b.y - b.x * a.y
            })
            .sum::<f64>()
            / 2.0
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.len()).map(|j| {
            let (a, b) = self.edge(j);
            (b - a).norm()
        }).sum()
    }

    pub fn centroid(&self) -> Point {
        let (mut cx, mut cy) = (0.0, 0.0);
        for j in 0..self.len() {
            let (a, b) = self.edge(j);
            let cross = a.x * b.y - b.x * a.y;
            cx += (a.x + b.x) * cross;
            cy += (a.y + b.y) * cross;
        }
        let six_a = 6.0 * self.area();
        Point::new(cx / six_a, cy / six_a)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.vertices {
            for b in &self.vertices {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// `∫_K ((x − o_x)/s)^p ((y − o_y)/s)^q dx` by the divergence theorem,
    /// exact up to rounding.
    pub fn monomial_integral(&self, p: usize, q: usize, origin: Point, scale: f64) -> f64 {
        let (x, w) = gauss_legendre((p + q + 3).div_ceil(2));
        let mut total = 0.0;
        for j in 0..self.len() {
            let (a, b) = self.edge(j);
            let (a, b) = ((a - origin) / scale, (b - origin) / scale);
            let dy = b.y - a.y;
            if dy == 0.0 {
                continue;
            }
            for (s, ws) in x.iter().zip(&w) {
                let px = a.x + s * (b.x - a.x);
                let py = a.y + s * (b.y - a.y);
                total += ws * px.powi(p as i32 + 1) * py.powi(q as i32) * dy;
            }
        }
        total / (p as f64 + 1.0) * scale * scale
    }

    /// `∫_K f` over signed triangles `(v_0, v_j, v_{j+1})`, each split into
    /// `refinement²` similar pieces carrying a collapsed Gauss product rule
    /// with `order` points per direction.
    pub fn refined_integral(&self, f: impl Fn(Point) -> f64, refinement: usize, order: usize) -> f64 {
        let (x, w) = gauss_legendre(order);
        let (xv, wv) = gauss_legendre(order + 1);
        let piece = |a: Point, b: Point, c: Point| -> f64 {
            let jac = (b - a).perp(&(c - a));
            let mut s = 0.0;
            for (v, wvv) in xv.iter().zip(&wv) {
                for (u, wu) in x.iter().zip(&w) {
                    let p = a + (b - a) * (u * (1.0 - v)) + (c - a) * *v;
                    s += wu * wvv * (1.0 - v) * f(p);
                }
            }
            s * jac
        };
        let r = refinement.max(1);
        let v0 = self.vertices[0];
        let mut total = 0.0;
        for j in 1..self.len() - 1 {
            let (b, c) = (self.vertices[j], self.vertices[j + 1]);
            let node = |i: usize, l: usize| v0 + (b - v0) * (i as f64 / r as f64) + (c - v0) * (l as f64 / r as f64);
            for i in 0..r {
                for l in 0..r - i {
                    total += piece(node(i, l), node(i + 1, l), node(i, l + 1));
                    if i + l + 1 < r {
                        total += piece(node(i + 1, l), node(i + 1, l + 1), node(i, l + 1));
                    }
                }
            }
        }
        total
    }
}
