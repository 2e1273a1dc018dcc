use std::fs;
use std::io::Write;
use std::path::Path;

use ipvem::analysis::{
    example_case, field_dump, markdown_table, run_study, ConvergenceReport, ManufacturedCase,
    MeshSource, StudyConfig,
};
use ipvem::assembly::{
    assemble_system, solve, write_coordinate, Discretization, PenaltyConfig, SolverOptions,
};
use ipvem::mesh::{
    generate_cvt_polygonal, generate_distorted_grid, generate_rectangle_grid, save_mesh, Domain,
    Rectangle,
};

use crate::mesh_spec::{default_epsilons, default_mesh};
use crate::{DomainArg, DumpArgs, Format, MeshArgs, RunArgs};

type CommandResult = Result<(), Box<dyn std::error::Error>>;

fn configure_threads(threads: Option<usize>) -> CommandResult {
    if let Some(n) = threads {
        if n == 0 {
            return Err("--threads must be at least 1".into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn file_stem(report: &ConvergenceReport) -> String {
    format!("{}_eps{:e}", report.case, report.epsilon)
}

fn write_file(path: &Path, contents: &str) -> CommandResult {
    fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(())
}

fn csv_report(reports: &[ConvergenceReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!("# {} eps={:e} k={} rate={:.16e}\n", r.case, r.epsilon, r.degree, r.rate));
        out.push_str(&r.to_csv());
    }
    out
}

fn dump_finest(
    case: &ManufacturedCase,
    source: &MeshSource,
    config: &StudyConfig,
    resolution: usize,
    path: &Path,
) -> CommandResult {
    let (_, mesh) = source.build(source.n_levels() - 1, &case.domain)?;
    let disc = Discretization::new(&mesh, config.degree)?;
    let system = assemble_system(&mesh, &disc, case.epsilon, case.rhs.as_ref(), &config.penalty, &case.boundary)?;
    let values = solve(&system, &config.solver)?.values;
    write_file(path, &field_dump(&mesh, &disc, &values, resolution))
}

pub fn run(args: &RunArgs) -> CommandResult {
    configure_threads(args.solver.threads)?;
    let epsilons = if args.eps.is_empty() {
        default_epsilons(args.example)
    } else {
        args.eps.clone()
    };
    let cases = epsilons
        .iter()
        .map(|&eps| example_case(args.example, eps))
        .collect::<Result<Vec<_>, _>>()?;
    let degree = args.k.unwrap_or(cases[0].degree);
    let spec = args.mesh.clone().unwrap_or_else(|| default_mesh(args.example));
    let source = spec.source(args.generator.seed, args.generator.lloyd_iters, args.generator.delta);
    let config = StudyConfig {
        degree,
        penalty: PenaltyConfig::with_lambda(args.solver.lambda),
        solver: SolverOptions {
            tol: args.solver.tol,
            ..SolverOptions::default()
        },
    };

    let reports = run_study(&cases, &source, &config)?;
    let table = markdown_table(&reports);
    match args.format {
        Format::Markdown => print!("{table}"),
        Format::Csv => print!("{}", csv_report(&reports)),
    }

    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
        write_file(&dir.join(format!("example{}.md", args.example)), &table)?;
        for r in &reports {
            let stem = file_stem(r);
            write_file(&dir.join(format!("{stem}.csv")), &r.to_csv())?;
            write_file(&dir.join(format!("{stem}.dat")), &r.plot_data())?;
        }
    }
    if let Some(path) = &args.field_dump {
        dump_finest(&cases[0], &source, &config, args.field_resolution, path)?;
    }
    Ok(())
}

pub fn mesh(args: &MeshArgs) -> CommandResult {
    let domain = match args.domain {
        DomainArg::Square => Domain::unit_square(),
        DomainArg::LShape => Domain::l_shape(),
    };
    let structured = args.cvt.is_none();
    if structured && args.domain != DomainArg::Square {
        return Err("structured grids cover the unit square only".into());
    }
    let mesh = match (args.cvt, args.distorted, args.grid) {
        (Some(n), _, _) => generate_cvt_polygonal(n, &domain, args.generator.seed, args.generator.lloyd_iters)?,
        (_, Some(n), _) => generate_distorted_grid(n, n, args.generator.delta)?,
        (_, _, Some(n)) => generate_rectangle_grid(n, n, Rectangle::unit())?,
        _ => unreachable!("clap requires one mesh kind"),
    };
    save_mesh(&mesh, &args.out)?;
    println!(
        "{}: {} cells, {} vertices, {} edges, h = {:.6e}",
        args.out.display(),
        mesh.n_cells(),
        mesh.n_vertices(),
        mesh.n_edges(),
        mesh.h()
    );
    Ok(())
}

pub fn dump_system(args: &DumpArgs) -> CommandResult {
    if args.mesh.n_levels() != 1 {
        return Err("dump-system takes exactly one mesh".into());
    }
    let case = example_case(args.example, args.eps)?;
    let source = args.mesh.source(args.generator.seed, args.generator.lloyd_iters, args.generator.delta);
    let (_, mesh) = source.build(0, &case.domain)?;
    let disc = Discretization::new(&mesh, args.k)?;
    let system = assemble_system(
        &mesh,
        &disc,
        args.eps,
        case.rhs.as_ref(),
        &PenaltyConfig::with_lambda(args.lambda),
        &case.boundary,
    )?;
    match &args.out {
        Some(path) => {
            let mut file = std::io::BufWriter::new(fs::File::create(path)?);
            write_coordinate(&system.matrix, &mut file)?;
            file.flush()?;
        }
        None => write_coordinate(&system.matrix, std::io::stdout().lock())?,
    }
    Ok(())
}
