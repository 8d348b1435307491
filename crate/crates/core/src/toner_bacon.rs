//! Monte-Carlo simulation of the one-bit protocol that reproduces singlet
//! correlations, with the roles arranged so Bob sends the message.
//!
//! Both parties share two unit vectors drawn uniformly on the sphere each
//! round. Bob outputs B = -sgn(b.l1) and sends X = sgn(b.l1) * sgn(b.l2);
//! Alice outputs A = sgn(a.(l1 + X*l2)). In the +-1 convention the correlator
//! is exactly -a.b; outcomes map to bits via v -> (1-v)/2. sgn(0) is +1.
//!
//! Parallel runs are deterministic: rounds are split into chunks, each with
//! its own counter-mode stream derived from (seed, chunk index), and tallies
//! combine additively, so results do not depend on thread scheduling.

use crate::chsh::ChshVariant;
use crate::error::{Error, Result};
use crate::info::binary_entropy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

pub const MIN_CHSH_ROUNDS: u64 = 4;
pub const MIN_QUADRATURE_NODES: usize = 100;
pub const MIN_MC_SAMPLES: usize = 100_000;
/// Composite Simpson at this node count carries ~7e-11 absolute error.
pub const DEFAULT_QUADRATURE_NODES: usize = 2000;

pub type Vec3 = [f64; 3];

fn dot(u: Vec3, v: Vec3) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn sgn(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn check_unit(v: Vec3) -> Result<()> {
    let norm = dot(v, v).sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Domain { value: norm, lo: 1.0, hi: 1.0 });
    }
    Ok(())
}

/// Uniform point on the unit sphere: cos(theta) uniform on [-1, 1], azimuth
/// uniform on [0, 2pi).
pub fn sample_unit_vector(rng: &mut impl Rng) -> Vec3 {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..TAU);
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

/// One simulated round; outcomes as bits, the message in the +-1 convention.
#[derive(Debug, Clone, Copy)]
pub struct TbRound {
    pub a_bit: u8,
    pub b_bit: u8,
    pub x: i8,
}

fn to_bit(v: f64) -> u8 {
    if v < 0.0 {
        1
    } else {
        0
    }
}

pub fn tb_round(a: Vec3, b: Vec3, rng: &mut impl Rng) -> TbRound {
    let l1 = sample_unit_vector(rng);
    let l2 = sample_unit_vector(rng);
    let s1 = sgn(dot(b, l1));
    let x = s1 * sgn(dot(b, l2));
    let combined = [l1[0] + x * l2[0], l1[1] + x * l2[1], l1[2] + x * l2[2]];
    let a_pm = sgn(dot(a, combined));
    TbRound { a_bit: to_bit(a_pm), b_bit: to_bit(-s1), x: x as i8 }
}

#[derive(Debug, Clone, Copy)]
pub struct TbConfig {
    pub a: Vec3,
    pub b: Vec3,
    pub rounds: u64,
    pub seed: u64,
    pub chunks: u32,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TbEstimate {
    pub correlator: f64,
    pub stderr: f64,
    /// `counts[a_bit][b_bit]` outcome tallies.
    pub counts: [[u64; 2]; 2],
    pub rounds: u64,
    pub seed: u64,
    pub chunks: u32,
}

fn add_counts(mut x: [[u64; 2]; 2], y: [[u64; 2]; 2]) -> [[u64; 2]; 2] {
    for i in 0..2 {
        for j in 0..2 {
            x[i][j] += y[i][j];
        }
    }
    x
}

/// Tallies `rounds` rounds of the pair (a, b) across chunked streams; stream
/// ids start at `stream_base` so distinct setting pairs never share one.
fn pair_counts(a: Vec3, b: Vec3, rounds: u64, seed: u64, chunks: u32, stream_base: u64) -> [[u64; 2]; 2] {
    (0..chunks as u64)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream_base + chunk);
            let n = rounds / chunks as u64 + u64::from(chunk < rounds % chunks as u64);
            let mut counts = [[0u64; 2]; 2];
            for _ in 0..n {
                let round = tb_round(a, b, &mut rng);
                counts[round.a_bit as usize][round.b_bit as usize] += 1;
            }
            counts
        })
        .reduce(|| [[0u64; 2]; 2], add_counts)
}

fn correlator_of(counts: [[u64; 2]; 2], rounds: u64) -> (f64, f64) {
    let same = (counts[0][0] + counts[1][1]) as f64;
    let diff = (counts[0][1] + counts[1][0]) as f64;
    let n = rounds as f64;
    let correlator = (same - diff) / n;
    let stderr = ((1.0 - correlator * correlator).max(0.0) / n).sqrt();
    (correlator, stderr)
}

/// Estimates E[A*B] in the +-1 convention for one setting pair.
pub fn tb_correlator(cfg: &TbConfig) -> Result<TbEstimate> {
    check_unit(cfg.a)?;
    check_unit(cfg.b)?;
    if cfg.rounds == 0 {
        return Err(Error::EmptySample { got: 0, need: 1 });
    }
    let chunks = cfg.chunks.max(1);
    let counts = pair_counts(cfg.a, cfg.b, cfg.rounds, cfg.seed, chunks, 0);
    let (correlator, stderr) = correlator_of(counts, cfg.rounds);
    Ok(TbEstimate { correlator, stderr, counts, rounds: cfg.rounds, seed: cfg.seed, chunks })
}

/// Measurement directions for the four-setting game.
#[derive(Debug, Clone, Copy)]
pub struct TbChshSettings {
    pub alice: [Vec3; 2],
    pub bob: [Vec3; 2],
}

impl TbChshSettings {
    /// Coplanar optimum: Alice at 0 and 90 degrees, Bob at 45 and 135, all in
    /// the xz-plane. Peaks at the quantum value under sign variant 6.
    pub fn coplanar_default() -> TbChshSettings {
        let dir = |deg: f64| {
            let rad = deg.to_radians();
            [rad.sin(), 0.0, rad.cos()]
        };
        TbChshSettings { alice: [dir(0.0), dir(90.0)], bob: [dir(45.0), dir(135.0)] }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TbChshEstimate {
    /// Best variant's normalized score.
    pub score: f64,
    pub best_variant: u8,
    pub stderr: f64,
    pub variant_scores: [f64; 8],
    /// `correlators[i][j]` = estimated E[A*B] for (alice i, bob j).
    pub correlators: [[f64; 2]; 2],
    pub rounds_per_pair: u64,
    pub rounds_used: u64,
    pub seed: u64,
    pub chunks: u32,
}

/// Plays the four setting pairs rounds/4 times each and scores all eight
/// sign variants, reporting the best.
pub fn tb_chsh(settings: &TbChshSettings, rounds: u64, seed: u64, chunks: u32) -> Result<TbChshEstimate> {
    for v in settings.alice.iter().chain(settings.bob.iter()) {
        check_unit(*v)?;
    }
    if rounds < MIN_CHSH_ROUNDS {
        return Err(Error::EmptySample { got: rounds, need: MIN_CHSH_ROUNDS });
    }
    let per = rounds / 4;
    let chunks = chunks.max(1);

    let mut same_frac = [[0.0f64; 2]; 2];
    let mut correlators = [[0.0f64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let stream_base = ((i * 2 + j) as u64) * chunks as u64;
            let counts = pair_counts(settings.alice[i], settings.bob[j], per, seed, chunks, stream_base);
            same_frac[i][j] = (counts[0][0] + counts[1][1]) as f64 / per as f64;
            correlators[i][j] = 2.0 * same_frac[i][j] - 1.0;
        }
    }

    let mut variant_scores = [0.0f64; 8];
    for variant in ChshVariant::all() {
        let mut score = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let win = if variant.target(i, j) == 0 { same_frac[i][j] } else { 1.0 - same_frac[i][j] };
                score += 0.25 * win;
            }
        }
        variant_scores[variant.index() as usize] = score;
    }
    let mut best_variant = 0u8;
    for v in 1..8 {
        if variant_scores[v] > variant_scores[best_variant as usize] {
            best_variant = v as u8;
        }
    }
    let var_sum: f64 = same_frac
        .iter()
        .flatten()
        .map(|&p| p * (1.0 - p) / per as f64)
        .sum();
    let stderr = 0.25 * var_sum.sqrt();

    Ok(TbChshEstimate {
        score: variant_scores[best_variant as usize],
        best_variant,
        stderr,
        variant_scores,
        correlators,
        rounds_per_pair: per,
        rounds_used: per * 4,
        seed,
        chunks,
    })
}

/// How the per-round message entropy is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyMethod {
    /// Composite Simpson over the inter-vector angle.
    Quadrature,
    /// Sample mean over random shared-vector pairs.
    MonteCarlo { seed: u64 },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EntropyEstimate {
    pub bits: f64,
    /// Standard error of the sample mean; None for quadrature.
    pub stderr: Option<f64>,
    pub resolution: usize,
}

/// Conditional message entropy at a fixed angle between the shared vectors:
/// averaged over the receiver-side direction, P(X=+1 | theta) = 1 - theta/pi,
/// so the entropy is h(theta/pi). Useful as a spot check (1 bit at pi/2,
/// 0 bits at 0).
pub fn message_entropy_at_angle(theta: f64) -> f64 {
    binary_entropy(theta / PI)
}

fn entropy_integrand(theta: f64) -> f64 {
    0.5 * theta.sin() * binary_entropy(theta / PI)
}

/// Mean per-round entropy of the message given the shared vectors,
/// E[h(theta/pi)] with theta the angle between them (density sin(theta)/2).
pub fn tb_message_entropy(method: EntropyMethod, resolution: usize) -> Result<EntropyEstimate> {
    match method {
        EntropyMethod::Quadrature => {
            if resolution < MIN_QUADRATURE_NODES {
                return Err(Error::ResolutionTooLow { got: resolution, need: MIN_QUADRATURE_NODES });
            }
            let n = resolution + (resolution & 1);
            let h = PI / n as f64;
            let mut sum = entropy_integrand(0.0) + entropy_integrand(PI);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                sum += w * entropy_integrand(i as f64 * h);
            }
            Ok(EntropyEstimate { bits: sum * h / 3.0, stderr: None, resolution: n })
        }
        EntropyMethod::MonteCarlo { seed } => {
            if resolution < MIN_MC_SAMPLES {
                return Err(Error::ResolutionTooLow { got: resolution, need: MIN_MC_SAMPLES });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..resolution {
                let cos_theta: f64 = rng.random_range(-1.0..=1.0);
                let v = binary_entropy(cos_theta.acos() / PI);
                sum += v;
                sumsq += v * v;
            }
            let n = resolution as f64;
            let mean = sum / n;
            let var = (sumsq / n - mean * mean).max(0.0);
            Ok(EntropyEstimate { bits: mean, stderr: Some((var / n).sqrt()), resolution })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chsh::TSIRELSON_SCORE;

    // Frozen from independent adaptive quadrature of the entropy integral.
    const ENTROPY_GOLDEN: f64 = 0.8504541153292665;

    const Z: Vec3 = [0.0, 0.0, 1.0];

    fn tilted(deg: f64) -> Vec3 {
        let rad = deg.to_radians();
        [rad.sin(), 0.0, rad.cos()]
    }

    #[test]
    fn aligned_settings_are_perfectly_anticorrelated() {
        let cfg = TbConfig { a: Z, b: Z, rounds: 20_000, seed: 11, chunks: 8 };
        let est = tb_correlator(&cfg).unwrap();
        assert_eq!(est.correlator, -1.0);
        assert_eq!(est.counts[0][0] + est.counts[1][1], 0);
    }

    #[test]
    fn correlator_tracks_minus_cosine() {
        for (deg, seed) in [(60.0, 1u64), (90.0, 2), (120.0, 3)] {
            let cfg = TbConfig { a: Z, b: tilted(deg), rounds: 400_000, seed, chunks: 16 };
            let est = tb_correlator(&cfg).unwrap();
            let expected = -(deg as f64).to_radians().cos();
            assert!(
                (est.correlator - expected).abs() <= 3.0 * est.stderr,
                "{deg} deg: {} vs {expected} (3 sigma = {})",
                est.correlator,
                3.0 * est.stderr
            );
        }
    }

    #[test]
    fn non_unit_vectors_are_rejected() {
        let cfg = TbConfig { a: [0.0, 0.0, 2.0], b: Z, rounds: 100, seed: 0, chunks: 1 };
        assert!(matches!(tb_correlator(&cfg), Err(Error::Domain { .. })));
    }

    #[test]
    fn zero_rounds_is_an_empty_sample() {
        let cfg = TbConfig { a: Z, b: Z, rounds: 0, seed: 0, chunks: 1 };
        assert!(matches!(tb_correlator(&cfg), Err(Error::EmptySample { .. })));
    }

    #[test]
    fn tallies_are_scheduling_independent() {
        let cfg = TbConfig { a: Z, b: tilted(45.0), rounds: 100_000, seed: 7, chunks: 16 };
        let parallel = tb_correlator(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| tb_correlator(&cfg).unwrap());
        assert_eq!(parallel.counts, serial.counts);
        let again = tb_correlator(&cfg).unwrap();
        assert_eq!(parallel.counts, again.counts);
    }

    #[test]
    fn message_sign_probability_matches_closed_form() {
        // P(X = +1 | theta) = 1 - theta/pi, averaged over the receiver-side
        // direction, at theta in {pi/6, pi/2, 5pi/6}.
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for frac in [1.0 / 6.0, 0.5, 5.0 / 6.0] {
            let theta = frac * PI;
            let l1 = Z;
            let l2 = [theta.sin(), 0.0, theta.cos()];
            let n = 200_000u64;
            let mut plus = 0u64;
            for _ in 0..n {
                let b = sample_unit_vector(&mut rng);
                if sgn(dot(b, l1)) * sgn(dot(b, l2)) > 0.0 {
                    plus += 1;
                }
            }
            let p = plus as f64 / n as f64;
            let expected = 1.0 - frac;
            let sigma = (expected * (1.0 - expected) / n as f64).sqrt();
            assert!((p - expected).abs() <= 3.0 * sigma, "theta = {frac} pi: {p} vs {expected}");
        }
    }

    #[test]
    fn chsh_at_coplanar_optimum() {
        let est = tb_chsh(&TbChshSettings::coplanar_default(), 200_000, 5, 8).unwrap();
        assert_eq!(est.best_variant, 6);
        assert!(
            (est.score - TSIRELSON_SCORE).abs() <= 4.0 * est.stderr,
            "score {} vs {TSIRELSON_SCORE} (stderr {})",
            est.score,
            est.stderr
        );
        assert_eq!(est.rounds_used, 200_000);
    }

    #[test]
    fn chsh_with_identical_settings_is_classical() {
        let settings = TbChshSettings { alice: [Z, Z], bob: [Z, Z] };
        let est = tb_chsh(&settings, 100_000, 5, 8).unwrap();
        // Every pair is perfectly anticorrelated; three cells of four can win.
        assert!(est.score <= 0.75 + 3.0 * est.stderr);
    }

    #[test]
    fn chsh_rejects_tiny_budgets() {
        let got = tb_chsh(&TbChshSettings::coplanar_default(), 3, 0, 1);
        assert!(matches!(got, Err(Error::EmptySample { got: 3, need: 4 })));
    }

    #[test]
    fn entropy_fixed_angle_spot_checks() {
        assert_eq!(message_entropy_at_angle(0.0), 0.0);
        assert!((message_entropy_at_angle(PI / 2.0) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn quadrature_matches_golden() {
        let est = tb_message_entropy(EntropyMethod::Quadrature, DEFAULT_QUADRATURE_NODES).unwrap();
        assert!((est.bits - ENTROPY_GOLDEN).abs() <= 1e-9, "bits = {}", est.bits);
        let coarse = tb_message_entropy(EntropyMethod::Quadrature, MIN_QUADRATURE_NODES).unwrap();
        assert!((coarse.bits - ENTROPY_GOLDEN).abs() <= 1e-6);
    }

    #[test]
    fn monte_carlo_agrees_with_quadrature() {
        let quad = tb_message_entropy(EntropyMethod::Quadrature, DEFAULT_QUADRATURE_NODES).unwrap();
        let mc = tb_message_entropy(EntropyMethod::MonteCarlo { seed: 99 }, 200_000).unwrap();
        let sigma = mc.stderr.unwrap();
        assert!((mc.bits - quad.bits).abs() <= 3.0 * sigma, "{} vs {}", mc.bits, quad.bits);
    }

    #[test]
    fn entropy_resolution_floors() {
        assert!(matches!(
            tb_message_entropy(EntropyMethod::Quadrature, 99),
            Err(Error::ResolutionTooLow { need: 100, .. })
        ));
        assert!(matches!(
            tb_message_entropy(EntropyMethod::MonteCarlo { seed: 0 }, 99_999),
            Err(Error::ResolutionTooLow { .. })
        ));
    }
}
