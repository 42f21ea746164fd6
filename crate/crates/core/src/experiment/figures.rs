//! The four built-in experiment figures: laws, parameters and CSV output.

use std::path::{Path, PathBuf};

use super::derive_seed;
use super::moments::{curve_rows, moment_curves, MomentCurve, MomentOrder, TrialSetup};
use crate::bounds::{alpha_bound, SupOptions};
use crate::distribution::SubspaceDistribution;
use crate::error::{Error, Result};
use crate::linalg::SeededRng;
use crate::solver::ControlStrategy;

/// Header of the per-figure CSV files.
pub const FIGURE_CSV_HEADER: &str = "law,n,s,estimate,stderr,bound";

/// Tags mixed into the seed to draw the frozen random laws of figure 2.
const FIG2_TAGS: [u64; 2] = [0x0f16_0205, 0x0f16_0208];

#[derive(Debug, Clone)]
pub struct FigureLaw {
    pub name: String,
    pub dist: SubspaceDistribution,
}

#[derive(Debug, Clone)]
pub struct FigureSpec {
    pub which: u8,
    pub x_true: Vec<f64>,
    pub laws: Vec<FigureLaw>,
    pub orders: Vec<MomentOrder>,
    pub trials: usize,
    pub iterations: usize,
}

fn law(name: &str, dist: SubspaceDistribution) -> FigureLaw {
    FigureLaw {
        name: name.to_string(),
        dist,
    }
}

/// Parameters of figure `which` (1 to 4).
pub fn figure_spec(which: u8, seed: u64) -> Result<FigureSpec> {
    let all = MomentOrder::parse_list("2,1,0.5,log")?;
    let no_log = MomentOrder::parse_list("2,1,0.5")?;
    let spec = match which {
        1 => FigureSpec {
            which,
            x_true: vec![0.2296, 0.9361],
            laws: vec![
                law("roots3", SubspaceDistribution::roots_of_unity(3)?),
                law("roots5", SubspaceDistribution::roots_of_unity(5)?),
                law("invariant", SubspaceDistribution::invariant(1, 2)?),
            ],
            orders: all,
            trials: 3000,
            iterations: 40,
        },
        2 => {
            let random = |n: usize, tag: u64| {
                let mut rng = SeededRng::new(derive_seed(seed, tag), 0);
                SubspaceDistribution::random_uniform(n, 2, 5, &mut rng)
            };
            FigureSpec {
                which,
                x_true: vec![1.0; 5],
                laws: vec![
                    law("random5", random(5, FIG2_TAGS[0])?),
                    law("random8", random(8, FIG2_TAGS[1])?),
                    law("invariant", SubspaceDistribution::invariant(2, 5)?),
                ],
                orders: all,
                trials: 3000,
                iterations: 40,
            }
        }
        3 => FigureSpec {
            which,
            x_true: vec![1.0; 100],
            laws: vec![
                law("ronb", SubspaceDistribution::ronb(100)?),
                law("invariant", SubspaceDistribution::invariant(1, 100)?),
            ],
            orders: no_log,
            trials: 9000,
            iterations: 600,
        },
        4 => FigureSpec {
            which,
            x_true: vec![1.0; 100],
            laws: vec![
                law("block_onb", SubspaceDistribution::block_onb(100, 4)?),
                law("invariant", SubspaceDistribution::invariant(4, 100)?),
            ],
            orders: no_log,
            trials: 9000,
            iterations: 600,
        },
        _ => return Err(Error::Config(format!("figure must be 1, 2, 3 or 4, got {which}"))),
    };
    Ok(spec)
}

/// Moment curves with bound overlays for every law of `spec`, in law order.
pub fn figure_curves(spec: &FigureSpec, seed: u64) -> Result<Vec<(String, Vec<MomentCurve>)>> {
    let d = spec.x_true.len();
    let x0 = vec![0.0; d];
    let opts = SupOptions {
        seed,
        ..SupOptions::default()
    };
    spec.laws
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let strategy = ControlStrategy::IidStream(l.dist.clone());
            let setup = TrialSetup {
                strategy: &strategy,
                x_true: &spec.x_true,
                x0: &x0,
                trials: spec.trials,
                iterations: spec.iterations,
                seed: derive_seed(seed, i as u64 + 1),
                epsilon: 0.0,
            };
            let curves = moment_curves(&setup, &spec.orders)?
                .into_iter()
                .map(|c| {
                    let alpha = alpha_bound(&l.dist, c.order.s(), &opts)?.value;
                    Ok(c.with_bound(alpha))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((l.name.clone(), curves))
        })
        .collect()
}

/// File name of the CSV for figure `which` and `order`.
pub fn figure_file_name(which: u8, order: MomentOrder) -> String {
    format!("fig{which}_s{order}.csv")
}

/// Writes one CSV per moment order into `out_dir` (created if missing) and,
/// for figure 2, the frozen random laws. Returns the written paths.
pub fn reproduce_figure(which: u8, seed: u64, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let spec = figure_spec(which, seed)?;
    let curves = figure_curves(&spec, seed)?;
    write_figure(&spec, &curves, out_dir)
}

pub fn write_figure(
    spec: &FigureSpec,
    curves: &[(String, Vec<MomentCurve>)],
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for (o, order) in spec.orders.iter().enumerate() {
        let mut out = format!("{FIGURE_CSV_HEADER}\n");
        for (name, law_curves) in curves {
            curve_rows(Some(name), &law_curves[o], &mut out);
        }
        let path = out_dir.join(figure_file_name(spec.which, *order));
        std::fs::write(&path, out)?;
        written.push(path);
    }
    if spec.which == 2 {
        for l in spec.laws.iter().filter(|l| !l.dist.is_invariant()) {
            let path = out_dir.join(format!("fig2_{}.txt", l.name));
            std::fs::write(&path, l.dist.to_text())?;
            written.push(path);
        }
    }
    Ok(written)
}
