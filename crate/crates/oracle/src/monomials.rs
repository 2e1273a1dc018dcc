//! Scaled monomials `((x − c_x)/h)^a ((y − c_y)/h)^b` in graded order.

use ipvem::Point;

#[derive(Debug, Clone)]
pub struct Monomials {
    centroid: Point,
    diameter: f64,
    exponents: Vec<(usize, usize)>,
}

fn falling(n: usize, m: usize) -> f64 {
    if m > n {
        return 0.0;
    }
    ((n - m + 1)..=n).map(|v| v as f64).product()
}

impl Monomials {
    pub fn new(degree: usize, centroid: Point, diameter: f64) -> Self {
        let mut exponents = Vec::new();
        for d in 0..=degree {
            for b in 0..=d {
                exponents.push((d - b, b));
            }
        }
        Self {
            centroid,
            diameter,
            exponents,
        }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn centroid(&self) -> Point {
        self.centroid
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn exponents(&self) -> &[(usize, usize)] {
        &self.exponents
    }

    pub fn index_of(&self, a: usize, b: usize) -> Option<usize> {
        self.exponents.iter().position(|&e| e == (a, b))
    }

    /// `∂^{dx+dy} m_i / ∂x^dx ∂y^dy` at `p`.
    pub fn derivative(&self, i: usize, dx: usize, dy: usize, p: Point) -> f64 {
        let (a, b) = self.exponents[i];
        if dx > a || dy > b {
            return 0.0;
        }
        let h = self.diameter;
        let xi = (p.x - self.centroid.x) / h;
        let eta = (p.y - self.centroid.y) / h;
        falling(a, dx) * falling(b, dy) * xi.powi((a - dx) as i32) * eta.powi((b - dy) as i32)
            / h.powi((dx + dy) as i32)
    }

    pub fn value(&self, i: usize, p: Point) -> f64 {
        self.derivative(i, 0, 0, p)
    }

    /// Coefficients of `∂^{dx,dy} m_i` in the monomials of the same family,
    /// as `(index, factor)`.
    pub fn derivative_expansion(&self, i: usize, dx: usize, dy: usize) -> Option<(usize, f64)> {
        let (a, b) = self.exponents[i];
        if dx > a || dy > b {
            return None;
        }
        let f = falling(a, dx) * falling(b, dy) / self.diameter.powi((dx + dy) as i32);
        Some((self.index_of(a - dx, b - dy).unwrap(), f))
    }
}
