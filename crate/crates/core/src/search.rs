//! Random-restart hill climbing over model kernels.
//!
//! Candidates live in a constraint-specific parameter space: only the simplex
//! rows the constraint leaves free are represented, and materialization
//! expands them into a full model. That makes every constraint structural -
//! a candidate cannot drift off the constraint surface, so no penalty terms
//! or projections are needed. The objective is the optimal-Alice score, which
//! is the same for every sign variant.

use crate::chsh::{max_optimal_score, optimal_alice, ChshVariant};
use crate::conditions::{condition_profile, ConditionProfile};
use crate::dist::{AliceStrategy, HvcModel, DEFAULT_TOL};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    /// Unconstrained: every kernel row is free.
    None,
    /// Both the outcome and message kernels ignore the receiver setting b,
    /// which forces J(lambda,X -> b) = 1/2 exactly.
    MessageIndependentOfB,
    /// The outcome is a fair coin regardless of (b, lambda), forcing
    /// J(lambda,X -> B) = 1/2 exactly.
    OutcomeUninformative,
    /// The message kernel depends on lambda alone, so conditioning on X adds
    /// nothing: both transmitted-information deltas vanish exactly.
    DeltaBZeroStructural,
}

impl Constraint {
    pub const ALL: [Constraint; 4] = [
        Constraint::None,
        Constraint::MessageIndependentOfB,
        Constraint::OutcomeUninformative,
        Constraint::DeltaBZeroStructural,
    ];

    pub fn parse(name: &str) -> Result<Constraint> {
        match name {
            "none" => Ok(Constraint::None),
            "message-independent-of-b" => Ok(Constraint::MessageIndependentOfB),
            "outcome-uninformative" => Ok(Constraint::OutcomeUninformative),
            "delta-b-zero" => Ok(Constraint::DeltaBZeroStructural),
            other => Err(Error::UnknownConstraint(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constraint::None => "none",
            Constraint::MessageIndependentOfB => "message-independent-of-b",
            Constraint::OutcomeUninformative => "outcome-uninformative",
            Constraint::DeltaBZeroStructural => "delta-b-zero",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchConfig {
    pub lambda_card: usize,
    pub message_card: usize,
    pub constraint: Constraint,
    pub restarts: usize,
    pub steps_per_restart: usize,
    pub step_size: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            lambda_card: 2,
            message_card: 2,
            constraint: Constraint::None,
            restarts: 50,
            steps_per_restart: 2000,
            step_size: 0.1,
            seed: 0,
        }
    }
}

/// Row layout of the free parameter block: row 0 is the hidden-variable
/// prior, then the free outcome rows, then the free message rows.
struct Layout {
    l: usize,
    m: usize,
    constraint: Constraint,
    bob_rows: usize,
    msg_rows: usize,
}

impl Layout {
    fn new(l: usize, m: usize, constraint: Constraint) -> Layout {
        let (bob_rows, msg_rows) = match constraint {
            Constraint::None => (2 * l, 4 * l),
            Constraint::MessageIndependentOfB => (l, 2 * l),
            Constraint::OutcomeUninformative => (0, 2 * l),
            Constraint::DeltaBZeroStructural => (2 * l, l),
        };
        Layout { l, m, constraint, bob_rows, msg_rows }
    }

    fn row_len(&self, row: usize) -> usize {
        if row == 0 {
            self.l
        } else if row <= self.bob_rows {
            2
        } else {
            self.m
        }
    }

    fn total_rows(&self) -> usize {
        1 + self.bob_rows + self.msg_rows
    }

    fn random(&self, rng: &mut impl Rng) -> Vec<Vec<f64>> {
        (0..self.total_rows()).map(|row| random_simplex(rng, self.row_len(row))).collect()
    }

    fn materialize(&self, rows: &[Vec<f64>]) -> HvcModel {
        let l = self.l;
        let bob_free = &rows[1..1 + self.bob_rows];
        let msg_free = &rows[1 + self.bob_rows..];
        let bob_pair = |row: &Vec<f64>| [row[0], row[1]];

        let (bob_outcome, message) = match self.constraint {
            Constraint::None => {
                let bob: Vec<Vec<[f64; 2]>> =
                    (0..2).map(|b| (0..l).map(|lam| bob_pair(&bob_free[b * l + lam])).collect()).collect();
                let msg: Vec<Vec<Vec<Vec<f64>>>> = (0..2)
                    .map(|b| (0..2).map(|bb| (0..l).map(|lam| msg_free[(b * 2 + bb) * l + lam].clone()).collect()).collect())
                    .collect();
                (bob, msg)
            }
            Constraint::MessageIndependentOfB => {
                let bob_row: Vec<[f64; 2]> = (0..l).map(|lam| bob_pair(&bob_free[lam])).collect();
                let msg_slice: Vec<Vec<Vec<f64>>> =
                    (0..2).map(|bb| (0..l).map(|lam| msg_free[bb * l + lam].clone()).collect()).collect();
                (vec![bob_row.clone(), bob_row], vec![msg_slice.clone(), msg_slice])
            }
            Constraint::OutcomeUninformative => {
                let bob_row: Vec<[f64; 2]> = vec![[0.5, 0.5]; l];
                let msg: Vec<Vec<Vec<Vec<f64>>>> = (0..2)
                    .map(|b| {
                        let slice: Vec<Vec<f64>> = (0..l).map(|lam| msg_free[b * l + lam].clone()).collect();
                        vec![slice.clone(), slice]
                    })
                    .collect();
                (vec![bob_row.clone(), bob_row], msg)
            }
            Constraint::DeltaBZeroStructural => {
                let bob: Vec<Vec<[f64; 2]>> =
                    (0..2).map(|b| (0..l).map(|lam| bob_pair(&bob_free[b * l + lam])).collect()).collect();
                let slice: Vec<Vec<f64>> = (0..l).map(|lam| msg_free[lam].clone()).collect();
                let msg: Vec<Vec<Vec<Vec<f64>>>> = (0..2).map(|_| vec![slice.clone(), slice.clone()]).collect();
                (bob, msg)
            }
        };

        HvcModel {
            lambda_prior: rows[0].clone(),
            alice_settings: [0.5, 0.5],
            bob_settings: [0.5, 0.5],
            bob_outcome,
            message,
            alice: AliceStrategy::Optimal,
        }
    }
}

fn random_simplex(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut row: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let sum: f64 = row.iter().sum();
    if sum <= 0.0 {
        return vec![1.0 / n as f64; n];
    }
    for x in &mut row {
        *x /= sum;
    }
    row
}

/// Moves one coordinate of one free row and renormalizes that row. Returns
/// false when the move degenerates (row collapsed to zero mass).
fn perturb(rows: &mut [Vec<f64>], layout: &Layout, rng: &mut impl Rng, step: f64) -> bool {
    let movable: Vec<usize> = (0..layout.total_rows()).filter(|&r| layout.row_len(r) >= 2).collect();
    if movable.is_empty() {
        return false;
    }
    let row_i = movable[rng.random_range(0..movable.len())];
    let coord = rng.random_range(0..rows[row_i].len());
    let delta: f64 = step * rng.random_range(-1.0..=1.0);
    let mut row = rows[row_i].clone();
    row[coord] = (row[coord] + delta).max(0.0);
    let sum: f64 = row.iter().sum();
    if sum <= 0.0 {
        return false;
    }
    for x in &mut row {
        *x /= sum;
    }
    rows[row_i] = row;
    true
}

/// A random model from the constraint family, mainly for sampling sweeps.
pub fn random_model(lambda_card: usize, message_card: usize, constraint: Constraint, rng: &mut impl Rng) -> HvcModel {
    let layout = Layout::new(lambda_card, message_card, constraint);
    let rows = layout.random(rng);
    layout.materialize(&rows)
}

fn model_as_file<S: serde::Serializer>(model: &HvcModel, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::model_file::ModelFile::from_model(model, None).serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub config: SearchConfig,
    /// Best max-variant optimal-Alice score found.
    pub best_score: f64,
    pub best_variant: u8,
    pub best_restart: usize,
    /// Final score of each restart, in restart order.
    pub trajectory: Vec<f64>,
    /// Best model with the optimal strategy materialized, in file layout.
    #[serde(serialize_with = "model_as_file")]
    pub best_model: HvcModel,
    pub profile: ConditionProfile,
}

fn eval(layout: &Layout, rows: &[Vec<f64>]) -> f64 {
    let model = layout.materialize(rows);
    optimal_alice(&model, ChshVariant::BASE)
        .expect("materialized candidates are structurally valid")
        .report
        .score
}

/// Runs `restarts` independent climbs (one deterministic stream each) and
/// keeps the best result; ties go to the lowest restart index.
pub fn hill_climb(config: &SearchConfig) -> Result<SearchResult> {
    if config.lambda_card == 0 || config.message_card == 0 {
        return Err(Error::Domain { value: 0.0, lo: 1.0, hi: f64::INFINITY });
    }
    if config.restarts == 0 {
        return Err(Error::EmptySample { got: 0, need: 1 });
    }
    if !(config.step_size > 0.0 && config.step_size.is_finite()) {
        return Err(Error::Domain { value: config.step_size, lo: f64::MIN_POSITIVE, hi: f64::INFINITY });
    }
    let layout = Layout::new(config.lambda_card, config.message_card, config.constraint);

    let runs: Vec<(usize, f64, Vec<Vec<f64>>)> = (0..config.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(restart as u64);
            let mut rows = layout.random(&mut rng);
            let mut score = eval(&layout, &rows);
            let mut step = config.step_size;
            let mut accepted = 0usize;
            for _ in 0..config.steps_per_restart {
                let mut cand = rows.clone();
                if !perturb(&mut cand, &layout, &mut rng, step) {
                    continue;
                }
                let cand_score = eval(&layout, &cand);
                if cand_score > score {
                    rows = cand;
                    score = cand_score;
                    accepted += 1;
                    if accepted % 100 == 0 {
                        step *= 0.95;
                    }
                }
            }
            (restart, score, rows)
        })
        .collect();

    let mut best = &runs[0];
    for run in &runs[1..] {
        if run.1 > best.1 {
            best = run;
        }
    }
    let trajectory: Vec<f64> = runs.iter().map(|r| r.1).collect();

    let model = layout.materialize(&best.2);
    let resolved = optimal_alice(&model, ChshVariant::BASE)?;
    let (best_score, best_variant) = max_optimal_score(&model)?;
    let profile = condition_profile(&resolved.model, DEFAULT_TOL)?;
    Ok(SearchResult {
        config: config.clone(),
        best_score,
        best_variant: best_variant.index(),
        best_restart: best.0,
        trajectory,
        best_model: resolved.model,
        profile,
    })
}
