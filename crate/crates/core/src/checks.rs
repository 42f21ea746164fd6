//! Verification suites behind `check --suite`.

use subspace_action::bounds::{lyapunov_check, tightness_test, SupOptions};
use subspace_action::distribution::SubspaceDistribution;
use subspace_action::experiment::{noisy_bound_check, ExperimentConfig};
use subspace_action::linalg::SeededRng;
use subspace_action::solver::{run_recorded, verify_error_identities, ControlStrategy, NoiseModel};
use subspace_action::Result;

pub type Outcomes = Vec<(String, bool)>;

/// Error identities on 100 random noiseless runs.
pub fn identities(seed: u64) -> Result<Outcomes> {
    let mut failures = 0;
    for i in 0..100u64 {
        let mut rng = SeededRng::new(seed, i);
        let d = 2 + rng.index(9);
        let k = 1 + rng.index(d);
        let dist = if i % 2 == 0 {
            SubspaceDistribution::invariant(k, d)?
        } else {
            SubspaceDistribution::random_uniform(1 + rng.index(6), k, d, &mut rng)?
        };
        let x: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
        let x0: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
        let rec = run_recorded(&ControlStrategy::IidStream(dist), &x, &x0, 50, NoiseModel::None, &mut rng)?;
        if !verify_error_identities(&rec).passed() {
            failures += 1;
        }
    }
    Ok(vec![(format!("error identities on 100 runs ({failures} failed)"), failures == 0)])
}

pub fn tightness(seed: u64) -> Result<Outcomes> {
    let mut out = Vec::new();
    let mut rng = SeededRng::new(seed, 0);
    for (k, d) in [(1, 2), (1, 3), (2, 5)] {
        for s in [0.0, 0.5, 1.0, 2.0] {
            let r = tightness_test(&SubspaceDistribution::invariant(k, d)?, s, 4, &mut rng, 1e-10)?;
            out.push((format!("invariant({k},{d}) s={s} tight"), r.tight));
        }
    }
    for (name, law) in [
        ("roots5", SubspaceDistribution::roots_of_unity(5)?),
        ("icosa", SubspaceDistribution::icosahedral()?),
    ] {
        let r = tightness_test(&law, 1.0, 32, &mut rng, 1e-10)?;
        out.push((format!("{name} s=1 tight"), r.tight));
    }
    let r = tightness_test(&SubspaceDistribution::ronb(2)?, 0.5, 32, &mut rng, 1e-10)?;
    out.push(("ronb(2) s=0.5 not tight".into(), !r.tight));
    Ok(out)
}

/// Noise bound for ronb(10), ε = 0.01.
pub fn noise(seed: u64) -> Result<Outcomes> {
    let cfg = ExperimentConfig::parse(&format!(
        "distribution = ronb:10\nx_true = ones\ntrials = 3000\niterations = 200\ns_list = 1\nseed = {seed}\nepsilon = 0.01\n"
    ))?;
    [0.5, 1.0, 2.0]
        .iter()
        .map(|&s| {
            let r = noisy_bound_check(&cfg, s)?;
            Ok((format!("noise bound s={s} ({} violations)", r.violations.len()), r.ok()))
        })
        .collect()
}

pub fn lyapunov(seed: u64) -> Result<Outcomes> {
    let opts = SupOptions {
        seed,
        ..SupOptions::default()
    };
    let s_list = [0.25, 0.5, 1.0, 2.0, 4.0];
    let mut rng = SeededRng::new(seed, 0);
    let laws = [
        ("ronb(5)", SubspaceDistribution::ronb(5)?),
        ("invariant(1,3)", SubspaceDistribution::invariant(1, 3)?),
        ("roots(3)", SubspaceDistribution::roots_of_unity(3)?),
        ("random(4,2,5)", SubspaceDistribution::random_uniform(4, 2, 5, &mut rng)?),
    ];
    laws.into_iter()
        .map(|(name, law)| {
            let r = lyapunov_check(&law, &s_list, &opts, 1e-10)?;
            Ok((format!("{name} bounds nondecreasing in s"), r.monotone))
        })
        .collect()
}
