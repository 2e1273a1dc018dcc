//! Centroidal Voronoi meshes of a polygonal domain.
//!
//! Each Voronoi cell is obtained by clipping the domain polygon against the
//! bisector half-planes of nearby seeds. Lloyd's iteration moves every seed
//! to the centroid of its cell.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::geometry::{polygon_centroid, polygon_contains, signed_area};
use super::{Domain, Mesh};
use crate::{Error, Point, Result, Vector};

/// Uniform bucket grid over the domain's bounding box.
struct SeedGrid {
    origin: Point,
    size: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl SeedGrid {
    fn new(seeds: &[Point], domain: &Domain) -> Self {
        let (lo, hi) = domain.bounding_box();
        let span = hi - lo;
        let size = (span.x * span.y / seeds.len() as f64).sqrt().max(1e-300);
        let nx = ((span.x / size).ceil() as usize).max(1);
        let ny = ((span.y / size).ceil() as usize).max(1);
        let mut grid = Self {
            origin: lo,
            size,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        };
        for (i, &s) in seeds.iter().enumerate() {
            let (bx, by) = grid.bucket(s);
            grid.buckets[by * nx + bx].push(i);
        }
        grid
    }

    fn bucket(&self, p: Point) -> (usize, usize) {
        let clamp = |v: f64, n: usize| (v.max(0.0) as usize).min(n - 1);
        (
            clamp((p.x - self.origin.x) / self.size, self.nx),
            clamp((p.y - self.origin.y) / self.size, self.ny),
        )
    }

    /// Seeds in the square ring at Chebyshev distance `r` around bucket `(bx, by)`.
    fn ring(&self, bx: usize, by: usize, r: usize, out: &mut Vec<usize>) -> bool {
        let (bx, by, r) = (bx as isize, by as isize, r as isize);
        let mut any_bucket = false;
        for j in by - r..=by + r {
            if j < 0 || j >= self.ny as isize {
                continue;
            }
            let step = if j == by - r || j == by + r { 1 } else { (2 * r).max(1) };
            let mut i = bx - r;
            while i <= bx + r {
                if i >= 0 && i < self.nx as isize {
                    any_bucket = true;
                    out.extend_from_slice(&self.buckets[j as usize * self.nx + i as usize]);
                }
                i += step;
            }
        }
        any_bucket
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Mark {
    Vertex,
    Exit,
    Entry,
}

/// Keeps the part of `poly` with `(x − mid)·dir ≤ 0`. On a non-convex
/// polygon the kept part may fall apart; each connected piece is returned
/// as its own counter-clockwise ring.
fn clip_half_plane(poly: &[Point], mid: Point, dir: Vector) -> Vec<Vec<Point>> {
    let m = poly.len();
    let sides: Vec<f64> = poly.iter().map(|p| (p - mid).dot(&dir)).collect();
    if sides.iter().all(|&s| s <= 0.0) {
        return vec![poly.to_vec()];
    }
    if sides.iter().all(|&s| s > 0.0) {
        return Vec::new();
    }

    let mut items: Vec<(Point, Mark)> = Vec::with_capacity(m + 4);
    for i in 0..m {
        let (a, b) = (poly[i], poly[(i + 1) % m]);
        let (sa, sb) = (sides[i], sides[(i + 1) % m]);
        if sa <= 0.0 {
            items.push((a, Mark::Vertex));
        }
        if (sa <= 0.0) != (sb <= 0.0) {
            let p = if sa == 0.0 {
                a
            } else if sb == 0.0 {
                b
            } else {
                a + (b - a) * (sa / (sa - sb))
            };
            items.push((p, if sa <= 0.0 { Mark::Exit } else { Mark::Entry }));
        }
    }

    // walking along the cut line in the direction `w`, every exit is
    // followed by the entry that closes its piece
    let w = Vector::new(-dir.y, dir.x);
    let mut crossings: Vec<usize> = (0..items.len()).filter(|&i| items[i].1 != Mark::Vertex).collect();
    crossings.sort_by(|&i, &j| {
        let (ui, uj) = ((items[i].0 - mid).dot(&w), (items[j].0 - mid).dot(&w));
        ui.total_cmp(&uj).then((items[i].1 == Mark::Entry).cmp(&(items[j].1 == Mark::Entry)))
    });
    let mut link: Vec<Option<usize>> = vec![None; items.len()];
    let mut used = vec![false; items.len()];
    for (pos, &i) in crossings.iter().enumerate() {
        if items[i].1 != Mark::Exit {
            continue;
        }
        let entry = crossings[pos + 1..]
            .iter()
            .chain(&crossings[..pos])
            .copied()
            .find(|&j| items[j].1 == Mark::Entry && !used[j]);
        if let Some(j) = entry {
            used[j] = true;
            link[i] = Some(j);
        }
    }

    let scale = poly.iter().map(|p| (p - poly[0]).norm()).fold(0.0, f64::max);
    let min_area = 1e-14 * signed_area(poly).abs();
    let mut visited = vec![false; items.len()];
    let mut pieces = Vec::new();
    for start in 0..items.len() {
        if visited[start] {
            continue;
        }
        let mut ring: Vec<Point> = Vec::new();
        let mut i = start;
        while !visited[i] {
            visited[i] = true;
            let p = items[i].0;
            if ring.last().is_none_or(|q: &Point| (p - q).norm() > 1e-14 * scale) {
                ring.push(p);
            }
            i = match (items[i].1, link[i]) {
                (Mark::Exit, Some(j)) => j,
                _ => (i + 1) % items.len(),
            };
        }
        while ring.len() > 1 && (ring[0] - ring[ring.len() - 1]).norm() <= 1e-14 * scale {
            ring.pop();
        }
        if ring.len() >= 3 && signed_area(&ring) > min_area {
            pieces.push(ring);
        }
    }
    pieces
}

/// Pieces of the Voronoi region of seed `i`. The first piece holds the seed
/// (or is the largest when no piece does).
fn voronoi_cell(i: usize, seeds: &[Point], domain: &Domain, grid: &SeedGrid, scratch: &mut Vec<usize>) -> Vec<Vec<Point>> {
    let s = seeds[i];
    let mut pieces = vec![domain.vertices().to_vec()];
    let (bx, by) = grid.bucket(s);
    for r in 0.. {
        if pieces.is_empty() {
            break;
        }
        let radius = pieces.iter().flatten().map(|p| (p - s).norm()).fold(0.0, f64::max);
        if r >= 2 && (r - 1) as f64 * grid.size >= 2.0 * radius {
            break;
        }
        scratch.clear();
        if !grid.ring(bx, by, r, scratch) {
            break;
        }
        for &j in scratch.iter() {
            if j == i {
                continue;
            }
            let t = seeds[j];
            let mid = Point::from((s.coords + t.coords) * 0.5);
            pieces = pieces.iter().flat_map(|poly| clip_half_plane(poly, mid, t - s)).collect();
        }
    }
    let main = pieces
        .iter()
        .position(|poly| polygon_contains(poly, s))
        .or_else(|| {
            (0..pieces.len()).max_by(|&a, &b| signed_area(&pieces[a]).total_cmp(&signed_area(&pieces[b])))
        });
    if let Some(k) = main {
        pieces.swap(0, k);
    }
    pieces
}

/// Domain-clipped Voronoi regions of `seeds`, each a list of
/// counter-clockwise pieces. On a convex domain every region is a single
/// piece; on a non-convex one a region can be split by the boundary, and its
/// first piece is the one holding the seed. A region that vanished is empty.
pub fn voronoi_cells(seeds: &[Point], domain: &Domain) -> Vec<Vec<Vec<Point>>> {
    if seeds.is_empty() {
        return Vec::new();
    }
    let grid = SeedGrid::new(seeds, domain);
    let mut scratch = Vec::new();
    (0..seeds.len())
        .map(|i| voronoi_cell(i, seeds, domain, &grid, &mut scratch))
        .collect()
}

/// `n` points drawn uniformly from the domain by rejection sampling.
pub fn random_seeds(n: usize, domain: &Domain, rng_seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let (lo, hi) = domain.bounding_box();
    let mut seeds = Vec::with_capacity(n);
    while seeds.len() < n {
        let p = Point::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y));
        if domain.contains(p) && domain.boundary_distance(p) > 0.0 {
            seeds.push(p);
        }
    }
    seeds
}

fn checked_cells(seeds: &[Point], domain: &Domain) -> Result<Vec<Vec<Vec<Point>>>> {
    let cells = voronoi_cells(seeds, domain);
    if let Some(c) = cells.iter().position(|pieces| pieces.is_empty()) {
        return Err(Error::DegenerateCell {
            cell: c,
            reason: format!("Voronoi cell of seed {c} collapsed during clipping"),
        });
    }
    Ok(cells)
}

/// One Lloyd update: each seed moves to the centroid of the piece of its
/// Voronoi region that contains it. A seed whose target lies outside the
/// domain stays put.
pub fn lloyd_step(seeds: &[Point], domain: &Domain) -> Result<Vec<Point>> {
    Ok(checked_cells(seeds, domain)?
        .iter()
        .zip(seeds)
        .map(|(pieces, &s)| {
            let c = polygon_centroid(&pieces[0]);
            if domain.contains(c) { c } else { s }
        })
        .collect())
}

/// `Σ_i ∫_{V_i} |x − s_i|² dx` over the Voronoi regions `V_i` of the seeds.
pub fn cvt_energy(seeds: &[Point], domain: &Domain) -> Result<f64> {
    let cells = checked_cells(seeds, domain)?;
    let mut total = 0.0;
    for (pieces, s) in cells.iter().zip(seeds) {
        for poly in pieces {
            // exact second moment over a fan of signed triangles
            let a = poly[0] - s;
            for w in poly[1..].windows(2) {
                let (b, c) = (w[0] - s, w[1] - s);
                let area = 0.5 * (b - a).perp(&(c - a));
                let sum = a + b + c;
                total += area / 12.0 * (a.norm_squared() + b.norm_squared() + c.norm_squared() + sum.norm_squared());
            }
        }
    }
    Ok(total)
}

/// Merges nearly coincident points into shared vertex indices.
struct VertexWelder {
    tol: f64,
    points: Vec<Point>,
    lookup: HashMap<(i64, i64), Vec<usize>>,
}

impl VertexWelder {
    fn key(&self, p: Point) -> (i64, i64) {
        ((p.x / self.tol).floor() as i64, (p.y / self.tol).floor() as i64)
    }

    fn insert(&mut self, p: Point) -> usize {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.lookup.get(&(kx + dx, ky + dy)) {
                    if let Some(&id) = ids.iter().find(|&&id| (self.points[id] - p).norm() <= self.tol) {
                        return id;
                    }
                }
            }
        }
        let id = self.points.len();
        self.points.push(p);
        self.lookup.entry((kx, ky)).or_default().push(id);
        id
    }
}

/// Centroidal Voronoi mesh with `n_cells` cells: random seeds, then
/// `lloyd_iters` Lloyd updates, then the Voronoi cells of the final seeds.
/// Cell vertices closer than `1e-10 · sqrt(|Ω| / n_cells)` are merged.
///
/// On a non-convex domain a Voronoi region cut in two by the boundary
/// contributes its detached pieces as extra cells after the first
/// `n_cells`, so the mesh can have more cells than requested.
pub fn generate_cvt_polygonal(
    n_cells: usize,
    domain: &Domain,
    rng_seed: u64,
    lloyd_iters: usize,
) -> Result<Mesh> {
    if n_cells < 2 {
        return Err(Error::InvalidParameter(format!(
            "a Voronoi mesh needs at least 2 cells, got {n_cells}"
        )));
    }
    let mut seeds = random_seeds(n_cells, domain, rng_seed);
    for _ in 0..lloyd_iters {
        seeds = lloyd_step(&seeds, domain)?;
    }
    let regions = checked_cells(&seeds, domain)?;
    let mut polygons: Vec<&Vec<Point>> = regions.iter().map(|pieces| &pieces[0]).collect();
    polygons.extend(regions.iter().flat_map(|pieces| &pieces[1..]));

    let mut welder = VertexWelder {
        tol: 1e-10 * (domain.area() / n_cells as f64).sqrt(),
        points: Vec::new(),
        lookup: HashMap::new(),
    };
    let mut cells = Vec::with_capacity(n_cells);
    for (c, poly) in polygons.iter().enumerate() {
        let mut ids: Vec<usize> = Vec::with_capacity(poly.len());
        for &p in poly.iter() {
            let id = welder.insert(p);
            if ids.last() != Some(&id) {
                ids.push(id);
            }
        }
        while ids.len() > 1 && ids.first() == ids.last() {
            ids.pop();
        }
        if ids.len() < 3 {
            return Err(Error::DegenerateCell {
                cell: c,
                reason: "fewer than 3 vertices after merging".into(),
            });
        }
        cells.push(ids);
    }
    Mesh::new(welder.points, cells)
}
