//! Independence conditions at the hidden-variable level, and the ledger
//! profile that collects them next to the guessing quantities.
//!
//! Setting independence (SI): P(A | a, b, lambda) does not depend on the
//! distant setting b, and P(B | a, b, lambda) not on a. Outcome independence
//! (OI): P(A | a, b, B, lambda) does not depend on B, and vice versa. Freedom
//! of choice: lambda carries no information about the setting pair.

use crate::chsh::{max_optimal_score, optimal_alice, ChshVariant};
use crate::dist::{enumerate_joint, JointDistribution, HvcModel, Var, VarSet, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::info::{guessed_info, mutual_info, InfoReport, Target};
use serde::Serialize;

/// Verdict plus the measured deviation, per side and overall.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IndependenceCheck {
    pub holds: bool,
    pub max_deviation: f64,
    pub alice_side: f64,
    pub bob_side: f64,
}

/// Spread (max minus min) of each conditional row across the `probe` axis,
/// maximized over everything else. `group` maps a joint cell to the row key
/// and must fold in the predicted value; `probe` picks the compared axis.
fn conditional_spread(
    joint: &JointDistribution,
    group: impl Fn(&[usize; 6]) -> usize,
    groups: usize,
    probe: Var,
) -> f64 {
    let probe_card = joint.dim(probe);
    // mass[g][v] = P(group cell g, probe = v); the group key folds the
    // predicted value in its lowest digit, so g/outcome_card is the context.
    let mut value_mass = vec![0.0f64; groups * probe_card];
    let mut context_mass = vec![0.0f64; (groups / 2) * probe_card];
    for (idx, p) in joint.iter() {
        let g = group(&idx);
        let v = idx[probe.axis()];
        value_mass[g * probe_card + v] += p;
        context_mass[(g / 2) * probe_card + v] += p;
    }
    let mut spread = 0.0f64;
    for g in 0..groups {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in 0..probe_card {
            let ctx = context_mass[(g / 2) * probe_card + v];
            if ctx > 0.0 {
                let cond = value_mass[g * probe_card + v] / ctx;
                lo = lo.min(cond);
                hi = hi.max(cond);
            }
        }
        if hi > lo {
            spread = spread.max(hi - lo);
        }
    }
    spread
}

/// Setting independence at the hidden-variable level (message integrated out).
pub fn check_si(joint: &JointDistribution, tol: f64) -> IndependenceCheck {
    let l = joint.dim(Var::Hidden);
    // Alice side: rows (a, lambda, A), probe axis b.
    let alice_side = conditional_spread(
        joint,
        |idx| (idx[0] * l + idx[2]) * 2 + idx[5],
        2 * l * 2,
        Var::BobSetting,
    );
    // Bob side: rows (b, lambda, B), probe axis a.
    let bob_side = conditional_spread(
        joint,
        |idx| (idx[1] * l + idx[2]) * 2 + idx[3],
        2 * l * 2,
        Var::AliceSetting,
    );
    let max_deviation = alice_side.max(bob_side);
    IndependenceCheck { holds: max_deviation <= tol, max_deviation, alice_side, bob_side }
}

/// Outcome independence at the hidden-variable level.
pub fn check_oi(joint: &JointDistribution, tol: f64) -> IndependenceCheck {
    let l = joint.dim(Var::Hidden);
    // Alice side: rows (a, b, lambda, A), probe axis B.
    let alice_side = conditional_spread(
        joint,
        |idx| ((idx[0] * 2 + idx[1]) * l + idx[2]) * 2 + idx[5],
        2 * 2 * l * 2,
        Var::BobOutcome,
    );
    // Bob side: rows (a, b, lambda, B), probe axis A.
    let bob_side = conditional_spread(
        joint,
        |idx| ((idx[0] * 2 + idx[1]) * l + idx[2]) * 2 + idx[3],
        2 * 2 * l * 2,
        Var::AliceOutcome,
    );
    let max_deviation = alice_side.max(bob_side);
    IndependenceCheck { holds: max_deviation <= tol, max_deviation, alice_side, bob_side }
}

/// Dependence of P(A | a, b, B, lambda) on b: the quantity outcome
/// independence does not constrain. Reported without a verdict.
pub fn alice_setting_dependence_given_outcome(joint: &JointDistribution) -> f64 {
    let l = joint.dim(Var::Hidden);
    // Rows (a, B, lambda, A), probe axis b.
    conditional_spread(
        joint,
        |idx| ((idx[0] * 2 + idx[3]) * l + idx[2]) * 2 + idx[5],
        2 * 2 * l * 2,
        Var::BobSetting,
    )
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FreedomCheck {
    pub holds: bool,
    pub i_lambda_ab_bits: f64,
    pub j_lambda_to_ab: f64,
}

/// Freedom of choice: I(lambda : (a,b)) = 0 and J(lambda -> (a,b)) = 1/4.
/// Computed on the settings-lambda block, so it never needs Alice resolved.
pub fn check_freedom(model: &HvcModel) -> Result<FreedomCheck> {
    let l = model.lambda_card();
    if l == 0 {
        return Err(Error::InvalidModel(model.validate()));
    }
    let mut table = Vec::with_capacity(4 * l);
    for a in 0..2 {
        for b in 0..2 {
            for lam in 0..l {
                table.push(model.alice_settings[a] * model.bob_settings[b] * model.lambda_prior[lam]);
            }
        }
    }
    let block = JointDistribution::from_table([2, 2, l, 1, 1, 1], table);
    let lambda = VarSet::from(Var::Hidden);
    let i = mutual_info(&block, lambda, VarSet::new(&[Var::AliceSetting, Var::BobSetting]))?;
    let j = guessed_info(&block, lambda, Target::SettingsPair)?;
    Ok(FreedomCheck {
        holds: i <= 1e-12 && (j - 0.25).abs() <= DEFAULT_TOL,
        i_lambda_ab_bits: i,
        j_lambda_to_ab: j,
    })
}

/// A measured condition: the value and whether it sits at its ledger target
/// (1/2 for the guessing rows, 0 for the transmitted rows).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConditionValue {
    pub value: f64,
    pub satisfied: bool,
}

/// Full condition ledger for one model.
#[derive(Debug, Clone, Serialize)]
#[allow(non_snake_case)]
pub struct ConditionProfile {
    pub tol: f64,
    /// Guessing rows, satisfied when the value is 1/2 within tol.
    pub j_lx_to_b: ConditionValue,
    pub j_lx_to_B: ConditionValue,
    pub j_l_to_b: ConditionValue,
    pub j_l_to_B: ConditionValue,
    /// Transmitted rows, satisfied when the value is 0 within tol.
    pub delta_x_to_b: ConditionValue,
    pub delta_x_to_B: ConditionValue,
    pub si: IndependenceCheck,
    pub oi: IndependenceCheck,
    pub freedom: FreedomCheck,
    /// Informational extra: b-dependence of P(A | a, b, B, lambda).
    pub alice_dep_on_b_given_outcome: f64,
    /// Best optimal-Alice score over all eight variants; None when the
    /// setting priors are weighted and scoring is undefined.
    pub chsh_max: Option<f64>,
    pub chsh_max_variant: Option<u8>,
}

fn at_half(value: f64, tol: f64) -> ConditionValue {
    ConditionValue { value, satisfied: (value - 0.5).abs() <= tol }
}

fn at_zero(value: f64, tol: f64) -> ConditionValue {
    ConditionValue { value, satisfied: value.abs() <= tol }
}

/// Computes every ledger row for a valid model. A placeholder Alice is
/// resolved optimally (base variant) first; the SI/OI rows then describe the
/// resolved model.
pub fn condition_profile(model: &HvcModel, tol: f64) -> Result<ConditionProfile> {
    let violations = model.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidModel(violations));
    }
    let resolved = if model.alice.is_explicit() {
        model.clone()
    } else {
        optimal_alice(model, ChshVariant::BASE)?.model
    };
    let joint = enumerate_joint(&resolved)?;
    let info = InfoReport::from_joint(&joint)?;

    let (chsh_max, chsh_max_variant) = if model.settings_uniform(DEFAULT_TOL) {
        let (score, variant) = max_optimal_score(model)?;
        (Some(score), Some(variant.index()))
    } else {
        (None, None)
    };

    Ok(ConditionProfile {
        tol,
        j_lx_to_b: at_half(info.j_lx_to_b, tol),
        j_lx_to_B: at_half(info.j_lx_to_B, tol),
        j_l_to_b: at_half(info.j_l_to_b, tol),
        j_l_to_B: at_half(info.j_l_to_B, tol),
        delta_x_to_b: at_zero(info.delta_x_to_b, tol),
        delta_x_to_B: at_zero(info.delta_x_to_B, tol),
        si: check_si(&joint, tol),
        oi: check_oi(&joint, tol),
        freedom: check_freedom(model)?,
        alice_dep_on_b_given_outcome: alice_setting_dependence_given_outcome(&joint),
        chsh_max,
        chsh_max_variant,
    })
}
