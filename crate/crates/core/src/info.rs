//! Guessing-based information measures on exact joints.
//!
//! The central quantity is the guessed information J(from -> target): the
//! success probability of the best single guess of the target after seeing
//! the source variables, sum_i P(from=i) * max_j P(target=j | from=i). All
//! entropies are in bits.

use crate::dist::{FiniteDistribution, JointDistribution, Var, VarSet, DEFAULT_TOL};
use crate::error::{Error, Result};
use serde::Serialize;

/// What a guesser is asked to predict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Var(Var),
    /// The derived bit B xor b.
    BobOutcomeXorSetting,
    /// The setting pair (a, b) as one four-valued variable.
    SettingsPair,
}

impl From<Var> for Target {
    fn from(v: Var) -> Target {
        Target::Var(v)
    }
}

impl Target {
    pub fn cardinality(self, joint: &JointDistribution) -> usize {
        match self {
            Target::Var(v) => joint.dim(v),
            Target::BobOutcomeXorSetting => 2,
            Target::SettingsPair => joint.dim(Var::AliceSetting) * joint.dim(Var::BobSetting),
        }
    }

    fn value(self, idx: &[usize; 6], joint: &JointDistribution) -> usize {
        match self {
            Target::Var(v) => idx[v.axis()],
            Target::BobOutcomeXorSetting => idx[Var::BobOutcome.axis()] ^ idx[Var::BobSetting.axis()],
            Target::SettingsPair => idx[0] * joint.dim(Var::BobSetting) + idx[1],
        }
    }
}

/// Source-key projection: flat mixed-radix index over the `from` variables.
fn key_of(idx: &[usize; 6], vars: &[Var], dims: &[usize]) -> usize {
    let mut key = 0;
    for (v, d) in vars.iter().zip(dims) {
        key = key * d + idx[v.axis()];
    }
    key
}

/// Joint mass table P(from=i, target=j), flattened as `keys x target values`.
fn source_target_table(
    joint: &JointDistribution,
    from: VarSet,
    target: Target,
) -> Result<(Vec<f64>, usize, usize)> {
    if from.is_empty() {
        return Err(Error::EmptySource);
    }
    let vars: Vec<Var> = from.iter().collect();
    let dims: Vec<usize> = vars.iter().map(|v| joint.dim(*v)).collect();
    let keys: usize = dims.iter().product();
    let tcard = target.cardinality(joint);

    let mut table = vec![0.0; keys * tcard];
    for (idx, p) in joint.iter() {
        let k = key_of(&idx, &vars, &dims);
        table[k * tcard + target.value(&idx, joint)] += p;
    }
    Ok((table, keys, tcard))
}

/// J(from -> target): best-single-guess success probability. Source values of
/// zero probability contribute nothing.
pub fn guessed_info(joint: &JointDistribution, from: VarSet, target: Target) -> Result<f64> {
    let (table, keys, tcard) = source_target_table(joint, from, target)?;
    let mut j = 0.0;
    for k in 0..keys {
        let row = &table[k * tcard..(k + 1) * tcard];
        j += row.iter().cloned().fold(0.0, f64::max);
    }
    Ok(j)
}

/// Information the extra variables transmit about the target on top of the
/// base: J(base + extra -> target) - J(base -> target). Never negative.
pub fn transmitted_info(
    joint: &JointDistribution,
    extra: VarSet,
    base: VarSet,
    target: Target,
) -> Result<f64> {
    let with = guessed_info(joint, base.union(extra), target)?;
    let without = guessed_info(joint, base, target)?;
    Ok(with - without)
}

/// -sum p log2 p over positive entries. The `+ 0.0` turns the -0.0 of a
/// point mass into a plain zero.
fn entropy_of(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        + 0.0
}

pub fn shannon_entropy(dist: &FiniteDistribution) -> f64 {
    entropy_of(dist.probs().iter().cloned())
}

/// Binary entropy h(p) in bits; zero at and outside the endpoints.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

fn marginal_probs(joint: &JointDistribution, keep: VarSet) -> Result<Vec<f64>> {
    if keep.is_empty() {
        return Err(Error::EmptySource);
    }
    let vars: Vec<Var> = keep.iter().collect();
    let dims: Vec<usize> = vars.iter().map(|v| joint.dim(*v)).collect();
    let mut probs = vec![0.0; dims.iter().product()];
    for (idx, p) in joint.iter() {
        probs[key_of(&idx, &vars, &dims)] += p;
    }
    Ok(probs)
}

/// I(X:Y) = H(X) + H(Y) - H(X,Y) in bits, clamped at zero against rounding.
pub fn mutual_info(joint: &JointDistribution, x: VarSet, y: VarSet) -> Result<f64> {
    let hx = entropy_of(marginal_probs(joint, x)?);
    let hy = entropy_of(marginal_probs(joint, y)?);
    let hxy = entropy_of(marginal_probs(joint, x.union(y))?);
    Ok((hx + hy - hxy).max(0.0))
}

/// H_min(target | given) = -sum_x P(x) log2 max_y P(y|x), in bits.
pub fn conditional_min_entropy(
    joint: &JointDistribution,
    given: VarSet,
    target: Target,
) -> Result<f64> {
    let (table, keys, tcard) = source_target_table(joint, given, target)?;
    let mut h = 0.0;
    for k in 0..keys {
        let row = &table[k * tcard..(k + 1) * tcard];
        let px: f64 = row.iter().sum();
        if px > 0.0 {
            let best = row.iter().cloned().fold(0.0, f64::max);
            h -= px * (best / px).log2();
        }
    }
    Ok(h)
}

/// Report on the product relation lhs >= rhs with lhs = J(l,X -> b) and
/// rhs = J(l,X -> B) * J(l,X -> B xor b). Satisfied by the reference models,
/// but not an identity of the model class - when the two outcome guesses
/// succeed or fail together the product can exceed lhs, whose true floor is
/// J(l,X -> B) + J(l,X -> B xor b) - 1. `holds` is a per-joint diagnostic.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProductBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn product_bound_check(joint: &JointDistribution) -> Result<ProductBound> {
    let lx = VarSet::new(&[Var::Hidden, Var::Message]);
    let lhs = guessed_info(joint, lx, Target::Var(Var::BobSetting))?;
    let j_out = guessed_info(joint, lx, Target::Var(Var::BobOutcome))?;
    let j_xor = guessed_info(joint, lx, Target::BobOutcomeXorSetting)?;
    let rhs = j_out * j_xor;
    Ok(ProductBound { lhs, rhs, holds: lhs >= rhs - DEFAULT_TOL })
}

/// Every guessing and entropy quantity the reports care about, computed from
/// one joint. Field names match the wire format.
#[derive(Debug, Clone, Copy, Serialize)]
#[allow(non_snake_case)]
pub struct InfoReport {
    pub j_lx_to_b: f64,
    pub j_lx_to_B: f64,
    pub j_lx_to_BxorB: f64,
    pub j_l_to_b: f64,
    pub j_l_to_B: f64,
    pub delta_x_to_b: f64,
    pub delta_x_to_B: f64,
    pub h_X_bits: f64,
    pub i_X_b_bits: f64,
    pub i_lambda_ab_bits: f64,
    pub hmin_b_given_lx_bits: f64,
}

impl InfoReport {
    #[allow(non_snake_case)]
    pub fn from_joint(joint: &JointDistribution) -> Result<InfoReport> {
        let l = VarSet::from(Var::Hidden);
        let lx = l.with(Var::Message);
        let j_lx_to_b = guessed_info(joint, lx, Target::Var(Var::BobSetting))?;
        let j_lx_to_B = guessed_info(joint, lx, Target::Var(Var::BobOutcome))?;
        let j_lx_to_BxorB = guessed_info(joint, lx, Target::BobOutcomeXorSetting)?;
        let j_l_to_b = guessed_info(joint, l, Target::Var(Var::BobSetting))?;
        let j_l_to_B = guessed_info(joint, l, Target::Var(Var::BobOutcome))?;
        let h_X_bits = entropy_of(marginal_probs(joint, VarSet::from(Var::Message))?);
        let i_X_b_bits = mutual_info(joint, VarSet::from(Var::Message), VarSet::from(Var::BobSetting))?;
        let i_lambda_ab_bits = mutual_info(
            joint,
            l,
            VarSet::new(&[Var::AliceSetting, Var::BobSetting]),
        )?;
        let hmin_b_given_lx_bits = conditional_min_entropy(joint, lx, Target::Var(Var::BobSetting))?;
        Ok(InfoReport {
            j_lx_to_b,
            j_lx_to_B,
            j_lx_to_BxorB,
            j_l_to_b,
            j_l_to_B,
            delta_x_to_b: j_lx_to_b - j_l_to_b,
            delta_x_to_B: j_lx_to_B - j_l_to_B,
            h_X_bits,
            i_X_b_bits,
            i_lambda_ab_bits,
            hmin_b_given_lx_bits,
        })
    }
}
