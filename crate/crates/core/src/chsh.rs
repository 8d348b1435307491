//! Scoring the two-setting, two-outcome game in normalized form.
//!
//! The base game is won when A xor B = a*b; the normalized score is the win
//! probability averaged over the four uniformly weighted setting pairs. The
//! no-communication bound is 3/4; the quantum value is (2 + sqrt 2)/4; the
//! algebraic maximum is 1. Seven sign-flipped variants relabel the target
//! predicate to A xor B = a*b xor s*a xor t*b xor r.

use crate::dist::{
    bit_point, enumerate_joint, validate_model, AliceStrategy, HvcModel, JointDistribution, Var,
    VarSet, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::info::{guessed_info, Target};
use serde::Serialize;

pub const LOCAL_BOUND: f64 = 0.75;
pub const TSIRELSON_SCORE: f64 = (2.0 + std::f64::consts::SQRT_2) / 4.0;

/// One of the eight sign variants, encoded as s | t<<1 | r<<2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChshVariant(u8);

impl ChshVariant {
    pub const BASE: ChshVariant = ChshVariant(0);

    pub fn new(v: u8) -> Result<ChshVariant> {
        if v > 7 {
            return Err(Error::Domain { value: v as f64, lo: 0.0, hi: 7.0 });
        }
        Ok(ChshVariant(v))
    }

    pub fn all() -> [ChshVariant; 8] {
        [0, 1, 2, 3, 4, 5, 6, 7].map(ChshVariant)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    fn s(self) -> usize {
        (self.0 & 1) as usize
    }

    fn t(self) -> usize {
        ((self.0 >> 1) & 1) as usize
    }

    fn r(self) -> usize {
        ((self.0 >> 2) & 1) as usize
    }

    /// Winning value of A xor B under settings (a, b).
    pub fn target(self, a: usize, b: usize) -> usize {
        (a & b) ^ (self.s() & a) ^ (self.t() & b) ^ self.r()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChshReport {
    pub variant: u8,
    /// `win_probs[a][b]` = P(A xor B = target | a, b).
    pub win_probs: [[f64; 2]; 2],
    /// Mean of the four win probabilities.
    pub score: f64,
    /// (1/2) J(lambda,X -> B) + (1/2) J(lambda,X -> B xor b); the score an
    /// optimal Alice attains, for any variant.
    pub ichsh_lhs: f64,
    pub local_bound: f64,
    pub tsirelson_score: f64,
}

/// Scores the joint for one variant. Requires uniform setting weights.
pub fn chsh_score(joint: &JointDistribution, variant: ChshVariant) -> Result<ChshReport> {
    if !joint.settings_uniform(DEFAULT_TOL) {
        return Err(Error::WeightedSettings);
    }
    let mut cell = [[0.0f64; 2]; 2];
    let mut win = [[0.0f64; 2]; 2];
    for (idx, p) in joint.iter() {
        let (a, b) = (idx[0], idx[1]);
        cell[a][b] += p;
        if idx[5] ^ idx[3] == variant.target(a, b) {
            win[a][b] += p;
        }
    }
    let mut win_probs = [[0.0f64; 2]; 2];
    let mut score = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            win_probs[a][b] = win[a][b] / cell[a][b];
            score += 0.25 * win_probs[a][b];
        }
    }
    Ok(ChshReport {
        variant: variant.index(),
        win_probs,
        score,
        ichsh_lhs: ichsh_lhs(joint)?,
        local_bound: LOCAL_BOUND,
        tsirelson_score: TSIRELSON_SCORE,
    })
}

/// Left side of the guessing form of the inequality:
/// (1/2) J(lambda,X -> B) + (1/2) J(lambda,X -> B xor b).
pub fn ichsh_lhs(joint: &JointDistribution) -> Result<f64> {
    let lx = VarSet::new(&[Var::Hidden, Var::Message]);
    let j_out = guessed_info(joint, lx, Target::Var(Var::BobOutcome))?;
    let j_xor = guessed_info(joint, lx, Target::BobOutcomeXorSetting)?;
    Ok(0.5 * j_out + 0.5 * j_xor)
}

/// An optimal-Alice resolution: the derived strategy, the model carrying it,
/// and the achieved report.
#[derive(Debug, Clone)]
pub struct OptimalAlice {
    pub strategy: Vec<Vec<Vec<[f64; 2]>>>,
    pub model: HvcModel,
    pub report: ChshReport,
}

/// Derives the best deterministic Alice response per (a, lambda, X): pick the
/// A maximizing the posterior win probability, ties toward A=0. Works whether
/// the model's own Alice is explicit or the optimal placeholder.
pub fn optimal_alice(model: &HvcModel, variant: ChshVariant) -> Result<OptimalAlice> {
    // The model's own alice table is about to be replaced, so validate with
    // it blanked out; everything else must hold.
    let mut probe = model.clone();
    probe.alice = AliceStrategy::Optimal;
    let violations = validate_model(&probe);
    if !violations.is_empty() {
        return Err(Error::InvalidModel(violations));
    }
    if !model.settings_uniform(DEFAULT_TOL) {
        return Err(Error::WeightedSettings);
    }

    let l = model.lambda_card();
    let m = model.message_card();

    // Unnormalized posterior over (b, B) for each (lambda, x). The setting a
    // is independent of the chain (b, lambda, B, X), so it never reweights.
    let mut posterior = vec![[[0.0f64; 2]; 2]; l * m];
    for b in 0..2 {
        for lam in 0..l {
            let p_bl = model.bob_settings[b] * model.lambda_prior[lam];
            for out_b in 0..2 {
                let p = p_bl * model.bob_outcome[b][lam][out_b];
                for x in 0..m {
                    posterior[lam * m + x][b][out_b] += p * model.message[b][out_b][lam][x];
                }
            }
        }
    }

    let mut strategy = vec![vec![vec![[0.0f64; 2]; m]; l]; 2];
    for a in 0..2 {
        for lam in 0..l {
            for x in 0..m {
                let w = &posterior[lam * m + x];
                let mut win = [0.0f64; 2];
                for b in 0..2 {
                    for out_b in 0..2 {
                        win[out_b ^ variant.target(a, b)] += w[b][out_b];
                    }
                }
                let best = if win[1] > win[0] { 1 } else { 0 };
                strategy[a][lam][x] = bit_point(best);
            }
        }
    }

    let mut resolved = model.clone();
    resolved.alice = AliceStrategy::Explicit(strategy.clone());
    let joint = enumerate_joint(&resolved)?;
    let report = chsh_score(&joint, variant)?;
    Ok(OptimalAlice { strategy, model: resolved, report })
}

/// Best optimal-Alice score over all eight variants, with the winning variant
/// (ties toward the lowest index).
pub fn max_optimal_score(model: &HvcModel) -> Result<(f64, ChshVariant)> {
    let mut best = f64::NEG_INFINITY;
    let mut best_variant = ChshVariant::BASE;
    for variant in ChshVariant::all() {
        let score = optimal_alice(model, variant)?.report.score;
        if score > best {
            best = score;
            best_variant = variant;
        }
    }
    Ok((best, best_variant))
}

/// The curve f(J) = J/2 + 1/(4J) on J in [1/2, 1]: equal to 3/4 at both
/// endpoints, dipping to 1/sqrt(2) at J = 1/sqrt(2), never above 3/4. Quoted
/// as the score cap at outcome-guessing level J when nothing is known about
/// the setting b.
pub fn no_setting_info_bound(j: f64) -> Result<f64> {
    if !(0.5 - 1e-12..=1.0 + 1e-12).contains(&j) {
        return Err(Error::Domain { value: j, lo: 0.5, hi: 1.0 });
    }
    Ok(j / 2.0 + 1.0 / (4.0 * j))
}

/// Exhaustive maximum over deterministic no-communication strategies with a
/// shared uniform binary hidden value: all 16 Alice response functions
/// f(a, lambda) against all 16 Bob response functions g(b, lambda), scored
/// through the full pipeline. The result is exactly 3/4 for every variant.
pub fn best_deterministic_local_score(variant: ChshVariant) -> f64 {
    let mut best = 0.0f64;
    for f in 0u32..16 {
        for g in 0u32..16 {
            let f_bit = |a: usize, lam: usize| (f >> (a * 2 + lam)) & 1;
            let g_bit = |b: usize, lam: usize| ((g >> (b * 2 + lam)) & 1) as usize;
            let model = HvcModel {
                lambda_prior: vec![0.5, 0.5],
                alice_settings: [0.5, 0.5],
                bob_settings: [0.5, 0.5],
                bob_outcome: (0..2)
                    .map(|b| (0..2).map(|lam| bit_point(g_bit(b, lam))).collect())
                    .collect(),
                message: vec![vec![vec![vec![1.0]; 2]; 2]; 2],
                alice: AliceStrategy::Explicit(
                    (0..2)
                        .map(|a| (0..2).map(|lam| vec![bit_point(f_bit(a, lam) as usize)]).collect())
                        .collect(),
                ),
            };
            let joint = enumerate_joint(&model).expect("deterministic local model enumerates");
            let score = chsh_score(&joint, variant).expect("uniform settings").score;
            best = best.max(score);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn toy() -> HvcModel {
        zoo::zoo_get("toy-tsirelson").unwrap().model
    }

    fn footnote() -> HvcModel {
        zoo::zoo_get("footnote-maximal").unwrap().model
    }

    #[test]
    fn variant_targets() {
        let base = ChshVariant::BASE;
        assert_eq!(
            [base.target(0, 0), base.target(0, 1), base.target(1, 0), base.target(1, 1)],
            [0, 0, 0, 1]
        );
        let v6 = ChshVariant::new(6).unwrap(); // s=0, t=1, r=1
        assert_eq!(
            [v6.target(0, 0), v6.target(0, 1), v6.target(1, 0), v6.target(1, 1)],
            [1, 0, 1, 1]
        );
        assert!(ChshVariant::new(8).is_err());
    }

    #[test]
    fn toy_scores_at_the_quantum_value() {
        let joint = enumerate_joint(&toy()).unwrap();
        let report = chsh_score(&joint, ChshVariant::BASE).unwrap();
        assert!((report.score - TSIRELSON_SCORE).abs() <= 1e-12, "score = {}", report.score);
        let expected_win = std::f64::consts::SQRT_2 - 1.0;
        assert!((report.win_probs[1][1] - expected_win).abs() <= 1e-12);
        for (a, b) in [(0, 0), (0, 1), (1, 0)] {
            assert!((report.win_probs[a][b] - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn footnote_scores_one() {
        let joint = enumerate_joint(&footnote()).unwrap();
        let report = chsh_score(&joint, ChshVariant::BASE).unwrap();
        assert!((report.score - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn weighted_settings_are_rejected() {
        let mut model = toy();
        model.bob_settings = [0.25, 0.75];
        let joint = enumerate_joint(&model).unwrap();
        assert!(matches!(chsh_score(&joint, ChshVariant::BASE), Err(Error::WeightedSettings)));
        assert!(matches!(optimal_alice(&model, ChshVariant::BASE), Err(Error::WeightedSettings)));
    }

    #[test]
    fn ichsh_values() {
        let toy_joint = enumerate_joint(&toy()).unwrap();
        let lhs = ichsh_lhs(&toy_joint).unwrap();
        assert!((lhs - TSIRELSON_SCORE).abs() <= 1e-12, "toy lhs = {lhs}");

        let foot_joint = enumerate_joint(&footnote()).unwrap();
        assert!((ichsh_lhs(&foot_joint).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn optimal_alice_recovers_toy_strategy() {
        let mut model = toy();
        model.alice = AliceStrategy::Optimal;
        let resolved = optimal_alice(&model, ChshVariant::BASE).unwrap();
        assert!((resolved.report.score - TSIRELSON_SCORE).abs() <= 1e-12);
        assert!((resolved.report.score - resolved.report.ichsh_lhs).abs() <= 1e-12);

        // Equivalent to A = a*X xor lambda wherever (lambda, X) has mass;
        // every toy posterior has a unique maximizer, so equality is exact.
        for a in 0..2 {
            for lam in 0..2 {
                for x in 0..2 {
                    let expected = ((a & x) ^ lam) as f64;
                    assert_eq!(resolved.strategy[a][lam][x][1], expected, "cell a={a} lam={lam} x={x}");
                }
            }
        }
    }

    #[test]
    fn optimal_alice_recovers_footnote_strategy() {
        let mut model = footnote();
        model.alice = AliceStrategy::Optimal;
        let resolved = optimal_alice(&model, ChshVariant::BASE).unwrap();
        assert!((resolved.report.score - 1.0).abs() <= 1e-12);

        // A = a*(X xor lambda) xor X on the positive-probability cells, which
        // are exactly those with X = B = lambda xor b reachable: all (lam, x).
        for a in 0..2 {
            for lam in 0..2 {
                for x in 0..2 {
                    let expected = ((a & (x ^ lam)) ^ x) as f64;
                    assert_eq!(resolved.strategy[a][lam][x][1], expected, "cell a={a} lam={lam} x={x}");
                }
            }
        }
    }

    #[test]
    fn optimal_alice_never_beaten_by_explicit_alice() {
        let toy_model = toy();
        let joint = enumerate_joint(&toy_model).unwrap();
        for variant in ChshVariant::all() {
            let explicit = chsh_score(&joint, variant).unwrap().score;
            let optimal = optimal_alice(&toy_model, variant).unwrap().report.score;
            assert!(optimal >= explicit - 1e-12);
        }
    }

    #[test]
    fn optimal_score_is_variant_independent() {
        // Relabelings are absorbed into the strategy, so every variant's
        // optimal score coincides.
        let model = toy();
        let base = optimal_alice(&model, ChshVariant::BASE).unwrap().report.score;
        for variant in ChshVariant::all() {
            let s = optimal_alice(&model, variant).unwrap().report.score;
            assert!((s - base).abs() <= 1e-12);
        }
        let (max, _) = max_optimal_score(&model).unwrap();
        assert!((max - base).abs() <= 1e-12);
    }

    #[test]
    fn blind_message_family_caps_at_local_bound() {
        // B = lambda, constant message: Alice learns nothing about b, and the
        // optimal score collapses to 3/4.
        let model = HvcModel {
            lambda_prior: vec![0.5, 0.5],
            alice_settings: [0.5, 0.5],
            bob_settings: [0.5, 0.5],
            bob_outcome: vec![
                vec![[1.0, 0.0], [0.0, 1.0]],
                vec![[1.0, 0.0], [0.0, 1.0]],
            ],
            message: vec![vec![vec![vec![1.0]; 2]; 2]; 2],
            alice: AliceStrategy::Optimal,
        };
        let resolved = optimal_alice(&model, ChshVariant::BASE).unwrap();
        assert!((resolved.report.score - LOCAL_BOUND).abs() <= 1e-12);
    }

    #[test]
    fn deterministic_local_maximum_is_exactly_three_quarters() {
        for variant in ChshVariant::all() {
            assert_eq!(best_deterministic_local_score(variant), 0.75);
        }
    }

    #[test]
    fn setting_info_bound_shape() {
        assert!((no_setting_info_bound(0.5).unwrap() - 0.75).abs() <= 1e-12);
        assert!((no_setting_info_bound(1.0).unwrap() - 0.75).abs() <= 1e-12);
        let at_min = no_setting_info_bound(FRAC_1_SQRT_2).unwrap();
        assert!((at_min - FRAC_1_SQRT_2).abs() <= 1e-12);
        assert!(matches!(no_setting_info_bound(0.3), Err(Error::Domain { .. })));
        assert!(matches!(no_setting_info_bound(1.2), Err(Error::Domain { .. })));
    }
}
