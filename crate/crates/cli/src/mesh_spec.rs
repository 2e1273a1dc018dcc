use std::path::PathBuf;

use ipvem::analysis::MeshSource;

/// A `--mesh` value: `cvt:N,...`, `distorted:N,...`, `grid:N,...` or
/// `files:PATH,...`.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshSpec {
    Cvt(Vec<usize>),
    Distorted(Vec<usize>),
    Grid(Vec<usize>),
    Files(Vec<PathBuf>),
}

fn sizes(list: &str) -> Result<Vec<usize>, String> {
    list.split(',')
        .map(|s| match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("invalid mesh size `{s}`")),
        })
        .collect()
}

pub fn parse_mesh_spec(s: &str) -> Result<MeshSpec, String> {
    let (kind, list) = s
        .split_once(':')
        .ok_or_else(|| format!("expected KIND:LIST, got `{s}`"))?;
    if list.trim().is_empty() {
        return Err(format!("no levels given in `{s}`"));
    }
    match kind {
        "cvt" => Ok(MeshSpec::Cvt(sizes(list)?)),
        "distorted" => Ok(MeshSpec::Distorted(sizes(list)?)),
        "grid" => Ok(MeshSpec::Grid(sizes(list)?)),
        "files" => Ok(MeshSpec::Files(list.split(',').map(PathBuf::from).collect())),
        other => Err(format!(
            "unknown mesh kind `{other}` (expected cvt, distorted, grid or files)"
        )),
    }
}

impl MeshSpec {
    pub fn n_levels(&self) -> usize {
        match self {
            MeshSpec::Cvt(v) | MeshSpec::Distorted(v) | MeshSpec::Grid(v) => v.len(),
            MeshSpec::Files(v) => v.len(),
        }
    }

    pub fn source(&self, seed: u64, lloyd_iters: usize, delta: f64) -> MeshSource {
        match self {
            MeshSpec::Cvt(counts) => MeshSource::Cvt {
                counts: counts.clone(),
                seed,
                lloyd_iters,
            },
            MeshSpec::Distorted(sizes) => MeshSource::Distorted {
                sizes: sizes.clone(),
                delta,
            },
            MeshSpec::Grid(sizes) => MeshSource::Grid {
                sizes: sizes.clone(),
            },
            MeshSpec::Files(paths) => MeshSource::Files(paths.clone()),
        }
    }
}

/// Mesh sequence used by each example when `--mesh` is absent.
pub fn default_mesh(example: u8) -> MeshSpec {
    match example {
        1 => MeshSpec::Cvt(vec![32, 64, 128, 256, 512]),
        2 => MeshSpec::Cvt(vec![100, 200, 300, 400, 500]),
        _ => MeshSpec::Distorted(vec![6, 8, 11, 16, 23]),
    }
}

pub fn default_epsilons(example: u8) -> Vec<f64> {
    match example {
        3 => vec![1e-8, 1e-10],
        _ => vec![1e-6, 1e-8],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        assert_eq!(parse_mesh_spec("cvt:32,64").unwrap(), MeshSpec::Cvt(vec![32, 64]));
        assert_eq!(parse_mesh_spec("distorted:6").unwrap(), MeshSpec::Distorted(vec![6]));
        assert_eq!(parse_mesh_spec("grid:2,4").unwrap(), MeshSpec::Grid(vec![2, 4]));
        assert_eq!(
            parse_mesh_spec("files:a.txt,b.txt").unwrap(),
            MeshSpec::Files(vec!["a.txt".into(), "b.txt".into()])
        );
    }

    #[test]
    fn rejects_malformed_specs() {
        for bad in ["cvt", "cvt:", "cvt:0", "cvt:3,x", "hex:4"] {
            assert!(parse_mesh_spec(bad).is_err(), "{bad}");
        }
    }
}
