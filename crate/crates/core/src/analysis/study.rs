//! Convergence studies over mesh sequences.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use nalgebra::DVector;

use super::{energy_error, fit_rate, l2_norm, running_rates, ManufacturedCase};
use crate::assembly::{assemble_system, solve, Discretization, PenaltyConfig, SolverOptions};
use crate::mesh::{
    generate_cvt_polygonal, generate_distorted_grid, generate_rectangle_grid, load_mesh, Domain,
    Mesh, Rectangle,
};
use crate::{Error, Point, Result};

/// Where the meshes of a study come from, one entry per level.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    /// Lloyd-relaxed Voronoi meshes of the case domain with the given cell counts.
    Cvt {
        counts: Vec<usize>,
        seed: u64,
        lloyd_iters: usize,
    },
    /// `n × n` sinusoidally distorted grids of the unit square.
    Distorted { sizes: Vec<usize>, delta: f64 },
    /// `n × n` grids of the bounding box of a rectangular domain.
    Grid { sizes: Vec<usize> },
    Files(Vec<PathBuf>),
}

impl MeshSource {
    pub fn n_levels(&self) -> usize {
        match self {
            MeshSource::Cvt { counts, .. } => counts.len(),
            MeshSource::Distorted { sizes, .. } | MeshSource::Grid { sizes } => sizes.len(),
            MeshSource::Files(paths) => paths.len(),
        }
    }

    /// Builds the mesh of `level` together with a short description.
    pub fn build(&self, level: usize, domain: &Domain) -> Result<(String, Mesh)> {
        match self {
            MeshSource::Cvt {
                counts,
                seed,
                lloyd_iters,
            } => {
                let n = counts[level];
                Ok((
                    format!("cvt:{n}"),
                    generate_cvt_polygonal(n, domain, *seed, *lloyd_iters)?,
                ))
            }
            MeshSource::Distorted { sizes, delta } => {
                require_rectangle(domain, &Domain::unit_square())?;
                let n = sizes[level];
                Ok((
                    format!("distorted:{n}x{n}"),
                    generate_distorted_grid(n, n, *delta)?,
                ))
            }
            MeshSource::Grid { sizes } => {
                let (lo, hi) = domain.bounding_box();
                require_rectangle(domain, &Domain::rectangle(lo.x, lo.y, hi.x, hi.y))?;
                let n = sizes[level];
                Ok((
                    format!("grid:{n}x{n}"),
                    generate_rectangle_grid(n, n, Rectangle::new(lo.x, lo.y, hi.x, hi.y))?,
                ))
            }
            MeshSource::Files(paths) => {
                let path = &paths[level];
                Ok((path.display().to_string(), load_mesh(path)?))
            }
        }
    }
}

fn require_rectangle(domain: &Domain, rect: &Domain) -> Result<()> {
    if (domain.area() - rect.area()).abs() > 1e-12 * rect.area() || domain.vertices().len() != 4 {
        return Err(Error::InvalidParameter(
            "structured grids only cover rectangular domains".into(),
        ));
    }
    Ok(())
}

/// Settings shared by every level and every `ε` of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub degree: usize,
    pub penalty: PenaltyConfig,
    pub solver: SolverOptions,
}

impl StudyConfig {
    pub fn new(degree: usize) -> Self {
        Self {
            degree,
            penalty: PenaltyConfig::default(),
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelResult {
    pub mesh: String,
    pub n_cells: usize,
    pub n_dofs: usize,
    /// Maximum cell diameter.
    pub h: f64,
    pub error: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub case: String,
    pub epsilon: f64,
    pub degree: usize,
    /// Ordered by decreasing `h`.
    pub levels: Vec<LevelResult>,
    /// Least-squares rate over all levels.
    pub rate: f64,
    pub seconds: f64,
}

impl ConvergenceReport {
    fn new(case: &ManufacturedCase, degree: usize, mut levels: Vec<LevelResult>) -> Result<Self> {
        levels.sort_by(|a, b| b.h.total_cmp(&a.h));
        let h: Vec<f64> = levels.iter().map(|l| l.h).collect();
        let err: Vec<f64> = levels.iter().map(|l| l.error).collect();
        Ok(Self {
            case: case.name.clone(),
            epsilon: case.epsilon,
            degree,
            rate: fit_rate(&h, &err)?,
            seconds: levels.iter().map(|l| l.seconds).sum(),
            levels,
        })
    }

    pub fn h(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.h).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.error).collect()
    }

    /// `N,h,Err,rate_running` rows; the first level has an empty rate.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,h,Err,rate_running\n");
        let rates = running_rates(&self.h(), &self.errors());
        for (l, r) in self.levels.iter().zip(rates) {
            let rate = r.map(|r| format!("{r:.16e}")).unwrap_or_default();
            writeln!(out, "{},{:.16e},{:.16e},{rate}", l.n_cells, l.h, l.error).unwrap();
        }
        out
    }

    /// `h Err` pairs for plotting.
    pub fn plot_data(&self) -> String {
        let mut out = String::from("# h Err\n");
        for l in &self.levels {
            writeln!(out, "{:.16e} {:.16e}", l.h, l.error).unwrap();
        }
        out
    }
}

/// One row per report, one column per level, and the fitted rate.
pub fn markdown_table(reports: &[ConvergenceReport]) -> String {
    let mut out = String::new();
    let Some(first) = reports.first() else {
        return out;
    };
    out.push_str("| ε |");
    for l in &first.levels {
        write!(out, " N={} |", l.n_cells).unwrap();
    }
    out.push_str(" Rate |\n|---|");
    out.push_str(&"---|".repeat(first.levels.len() + 1));
    out.push('\n');
    for r in reports {
        write!(out, "| {:e} |", r.epsilon).unwrap();
        for l in &r.levels {
            write!(out, " {:.4e} |", l.error).unwrap();
        }
        writeln!(out, " {:.2} |", r.rate).unwrap();
    }
    out
}

fn solve_level(
    mesh: &Mesh,
    disc: &Discretization,
    case: &ManufacturedCase,
    config: &StudyConfig,
) -> Result<DVector<f64>> {
    let system = assemble_system(
        mesh,
        disc,
        case.epsilon,
        case.rhs.as_ref(),
        &config.penalty,
        &case.boundary,
    )?;
    Ok(solve(&system, &config.solver)?.values)
}

/// Runs every case on every level of `source`. Meshes and element operators
/// are built once per level and shared by all cases, which must therefore
/// live on the same domain. Returns one report per case.
pub fn run_study(
    cases: &[ManufacturedCase],
    source: &MeshSource,
    config: &StudyConfig,
) -> Result<Vec<ConvergenceReport>> {
    config.penalty.validate()?;
    let Some(first) = cases.first() else {
        return Ok(Vec::new());
    };
    if cases.iter().any(|c| c.domain != first.domain) {
        return Err(Error::InvalidParameter(
            "all cases of a study must share one domain".into(),
        ));
    }
    let mut levels: Vec<Vec<LevelResult>> = vec![Vec::new(); cases.len()];
    for level in 0..source.n_levels() {
        let mut run = || -> Result<()> {
            let start = Instant::now();
            let (name, mesh) = source.build(level, &first.domain)?;
            let disc = Discretization::new(&mesh, config.degree)?;
            let setup = start.elapsed().as_secs_f64();
            for (case, out) in cases.iter().zip(levels.iter_mut()) {
                let start = Instant::now();
                let values = solve_level(&mesh, &disc, case, config)?;
                let f_norm = l2_norm(&mesh, &disc, case.rhs.as_ref());
                let error = energy_error(
                    &mesh,
                    &disc,
                    case.epsilon,
                    &values,
                    case.reference.as_ref(),
                    f_norm,
                );
                out.push(LevelResult {
                    mesh: name.clone(),
                    n_cells: mesh.n_cells(),
                    n_dofs: disc.n_dofs(),
                    h: mesh.h(),
                    error,
                    seconds: setup + start.elapsed().as_secs_f64(),
                });
            }
            Ok(())
        };
        run().map_err(|e| e.at_level(level))?;
    }
    cases
        .iter()
        .zip(levels)
        .map(|(case, l)| ConvergenceReport::new(case, config.degree, l))
        .collect()
}

/// [`run_study`] for a single case.
pub fn run_convergence(
    case: &ManufacturedCase,
    source: &MeshSource,
    config: &StudyConfig,
) -> Result<ConvergenceReport> {
    Ok(run_study(std::slice::from_ref(case), source, config)?.remove(0))
}

/// Samples `Π∇u_h` on an `n × n` raster over the bounding box of the mesh.
/// Lines are `x y value`; points outside the mesh are skipped.
pub fn field_dump(mesh: &Mesh, disc: &Discretization, solution: &DVector<f64>, n: usize) -> String {
    let (mut lo, mut hi) = (mesh.vertex(0), mesh.vertex(0));
    for v in mesh.vertices() {
        lo = lo.inf(v);
        hi = hi.sup(v);
    }
    let coeffs: Vec<DVector<f64>> = (0..mesh.n_cells())
        .map(|c| &disc.operator(c).p_nabla * disc.local_values(c, solution))
        .collect();
    let mut out = String::from("# x y value\n");
    let steps = n.max(2) - 1;
    for j in 0..=steps {
        for i in 0..=steps {
            let p = Point::new(
                lo.x + (hi.x - lo.x) * i as f64 / steps as f64,
                lo.y + (hi.y - lo.y) * j as f64 / steps as f64,
            );
            if let Some(c) = mesh.locate(p) {
                let v = disc.operator(c).basis.eval(coeffs[c].as_slice(), p);
                writeln!(out, "{:.16e} {:.16e} {:.16e}", p.x, p.y, v).unwrap();
            }
        }
    }
    out
}
