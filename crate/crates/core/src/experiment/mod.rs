//! Monte Carlo experiments: moment curves, figure reproduction and the
//! noise check.

mod config;
mod figures;
mod moments;
mod noise;

pub use config::{ExperimentConfig, VectorSpec};
pub use figures::{
    figure_curves, figure_file_name, figure_spec, reproduce_figure, write_figure, FigureLaw,
    FigureSpec, FIGURE_CSV_HEADER,
};
pub use moments::{
    curve_rows, curves_to_csv, moment_curves, theoretical_curve, MomentCurve, MomentOrder,
    TrialSetup, CHUNK_TRIALS, CSV_HEADER,
};
pub use noise::{noisy_bound, noisy_bound_check, NoiseReport};

use crate::bounds::{alpha_bound, SupOptions};
use crate::error::Result;
use crate::solver::ControlStrategy;

/// Mixes `tag` into `seed` (SplitMix64 finalizer) to key independent
/// sub-experiments.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Moment curves for `cfg`, each with the law's bound of matching order
/// attached.
pub fn mc_moment_curves(cfg: &ExperimentConfig) -> Result<Vec<MomentCurve>> {
    let x_true = cfg.x_true_vector()?;
    let x0 = cfg.x0_vector()?;
    let strategy = ControlStrategy::IidStream(cfg.distribution.clone());
    let setup = TrialSetup {
        strategy: &strategy,
        x_true: &x_true,
        x0: &x0,
        trials: cfg.trials,
        iterations: cfg.iterations,
        seed: cfg.seed,
        epsilon: cfg.epsilon,
    };
    let opts = SupOptions {
        seed: cfg.seed,
        ..SupOptions::default()
    };
    moment_curves(&setup, &cfg.orders)?
        .into_iter()
        .map(|c| {
            let alpha = alpha_bound(&cfg.distribution, c.order.s(), &opts)?.value;
            Ok(c.with_bound(alpha))
        })
        .collect()
}
