//! Seeded point distributions. All randomness comes from `ChaCha8Rng`, so a
//! `(distribution, n, seed)` triple yields the same coordinates on every
//! platform.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use serde::Deserialize;
use spanner_core::PointSet;

use crate::error::CliError;

/// Name of the generator recorded next to benchmark output.
pub const RNG_NAME: &str = "chacha8";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    Uniform,
    Clustered,
    Normal,
}

impl Distribution {
    pub fn name(self) -> &'static str {
        match self {
            Distribution::Uniform => "uniform",
            Distribution::Clustered => "clustered",
            Distribution::Normal => "normal",
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distribution {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Distribution::Uniform),
            "clustered" => Ok(Distribution::Clustered),
            "normal" => Ok(Distribution::Normal),
            other => Err(CliError::UnknownDistribution(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneratorSpec {
    pub distribution: Distribution,
    pub n: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(distribution: Distribution, n: usize, seed: u64) -> Self {
        GeneratorSpec { distribution, n, seed }
    }
}

/// Points inside `[0, sqrt n]^2`.
///
/// * uniform: independent uniform points.
/// * clustered: `ceil(sqrt n)` uniform centers, each followed by `ceil(sqrt n)`
///   uniform points in the square of side `n^(1/4)` around it (clipped to the
///   outer square); the sequence is cut after `n` points.
/// * normal: isotropic normal around the middle with deviation `sqrt n / 6`;
///   points outside the square are drawn again.
pub fn generate(spec: &GeneratorSpec) -> PointSet {
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let side = (n as f64).sqrt();
    let mut coords: Vec<(f64, f64)> = Vec::with_capacity(n);
    match spec.distribution {
        Distribution::Uniform => {
            for _ in 0..n {
                coords.push((rng.random::<f64>() * side, rng.random::<f64>() * side));
            }
        }
        Distribution::Clustered => {
            let k = side.ceil() as usize;
            let half = (n as f64).powf(0.25) / 2.0;
            let centers: Vec<(f64, f64)> =
                (0..k).map(|_| (rng.random::<f64>() * side, rng.random::<f64>() * side)).collect();
            'outer: for (cx, cy) in centers {
                let (x0, x1) = ((cx - half).max(0.0), (cx + half).min(side));
                let (y0, y1) = ((cy - half).max(0.0), (cy + half).min(side));
                for _ in 0..k {
                    if coords.len() == n {
                        break 'outer;
                    }
                    coords.push((x0 + rng.random::<f64>() * (x1 - x0), y0 + rng.random::<f64>() * (y1 - y0)));
                }
            }
        }
        Distribution::Normal => {
            if n > 0 {
                let normal = Normal::new(side / 2.0, side / 6.0).expect("positive deviation");
                while coords.len() < n {
                    let (x, y) = (normal.sample(&mut rng), normal.sample(&mut rng));
                    if (0.0..=side).contains(&x) && (0.0..=side).contains(&y) {
                        coords.push((x, y));
                    }
                }
            }
        }
    }
    PointSet::new(coords).expect("generated coordinates are finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [Distribution; 3] = [Distribution::Uniform, Distribution::Clustered, Distribution::Normal];

    #[test]
    fn sizes_and_bounds() {
        for d in ALL {
            for n in [0, 1, 2, 4, 17, 100, 1000] {
                let ps = generate(&GeneratorSpec::new(d, n, 9));
                assert_eq!(ps.len(), n, "{d} n={n}");
                let side = (n as f64).sqrt();
                assert!(ps.iter().all(|p| (0.0..=side).contains(&p.x) && (0.0..=side).contains(&p.y)));
            }
        }
        let four = generate(&GeneratorSpec::new(Distribution::Uniform, 4, 123));
        assert!(four.iter().all(|p| p.x <= 2.0 && p.y <= 2.0));
    }

    #[test]
    fn deterministic_per_seed() {
        for d in ALL {
            let a = generate(&GeneratorSpec::new(d, 500, 7));
            let b = generate(&GeneratorSpec::new(d, 500, 7));
            let c = generate(&GeneratorSpec::new(d, 500, 8));
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
    }

    #[test]
    fn clusters_are_tight() {
        let n = 10_000;
        let ps = generate(&GeneratorSpec::new(Distribution::Clustered, n, 1));
        let half = (n as f64).powf(0.25) / 2.0;
        // Every block of 100 consecutive points shares one center.
        for block in ps.points().chunks(100) {
            let (mut lo, mut hi) = ((f64::MAX, f64::MAX), (f64::MIN, f64::MIN));
            for p in block {
                lo = (lo.0.min(p.x), lo.1.min(p.y));
                hi = (hi.0.max(p.x), hi.1.max(p.y));
            }
            assert!(hi.0 - lo.0 <= 2.0 * half && hi.1 - lo.1 <= 2.0 * half);
        }
    }

    #[test]
    fn names_round_trip() {
        for d in ALL {
            assert_eq!(d.name().parse::<Distribution>().unwrap(), d);
        }
        assert!("gaussian".parse::<Distribution>().is_err());
    }
}
