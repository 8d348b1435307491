//! Built-in reference models with frozen expected values.

use crate::dist::{bit_point, AliceStrategy, HvcModel};
use crate::error::{Error, Result};
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

/// One expected quantity of a zoo entry; `name` matches the report keys.
#[derive(Debug, Clone, Copy)]
pub struct Expected {
    pub name: &'static str,
    pub value: f64,
    pub tol: f64,
}

#[derive(Debug, Clone)]
pub struct ZooEntry {
    pub name: &'static str,
    pub summary: &'static str,
    /// False when the setting priors are degenerate by design.
    pub free_choice: bool,
    pub model: HvcModel,
    pub expected: Vec<Expected>,
}

pub const ZOO_NAMES: [&str; 5] =
    ["toy-tsirelson", "footnote-maximal", "pr-box", "lhv-best", "superdet-demo"];

pub fn zoo_list() -> Vec<(&'static str, &'static str)> {
    ZOO_NAMES
        .iter()
        .map(|&name| {
            let entry = zoo_get(name).expect("registry names resolve");
            (entry.name, entry.summary)
        })
        .collect()
}

pub fn zoo_get(name: &str) -> Result<ZooEntry> {
    match name {
        "toy-tsirelson" => Ok(toy_tsirelson()),
        "footnote-maximal" => Ok(footnote_maximal()),
        "pr-box" => Ok(pr_box()),
        "lhv-best" => Ok(lhv_best()),
        "superdet-demo" => Ok(superdet_demo()),
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

fn uniform_settings() -> ([f64; 2], [f64; 2]) {
    ([0.5, 0.5], [0.5, 0.5])
}

/// Reaches the quantum value with a binary message that only sometimes leaks
/// Bob's setting: B = lambda; for b=0 the message is always 0, for b=1 it is
/// 1 with probability sqrt(2)-1; A = a*X xor lambda.
fn toy_tsirelson() -> ZooEntry {
    let p = SQRT_2 - 1.0;
    let (alice_settings, bob_settings) = uniform_settings();
    let model = HvcModel {
        lambda_prior: vec![0.5, 0.5],
        alice_settings,
        bob_settings,
        bob_outcome: vec![
            (0..2).map(bit_point).collect(),
            (0..2).map(bit_point).collect(),
        ],
        message: vec![
            vec![vec![vec![1.0, 0.0]; 2]; 2],
            vec![vec![vec![1.0 - p, p]; 2]; 2],
        ],
        alice: AliceStrategy::Explicit(
            (0..2)
                .map(|a| {
                    (0..2)
                        .map(|lam| (0..2).map(|x| bit_point((a & x) ^ lam)).collect())
                        .collect()
                })
                .collect(),
        ),
    };
    ZooEntry {
        name: "toy-tsirelson",
        summary: "binary message leaking the setting just often enough for the quantum value",
        free_choice: true,
        model,
        expected: vec![
            Expected { name: "chsh_score", value: (2.0 + SQRT_2) / 4.0, tol: 1e-12 },
            Expected { name: "j_lx_to_b", value: FRAC_1_SQRT_2, tol: 1e-12 },
            Expected { name: "j_lx_to_B", value: 1.0, tol: 1e-12 },
            Expected { name: "j_lx_to_BxorB", value: FRAC_1_SQRT_2, tol: 1e-12 },
            Expected { name: "j_l_to_b", value: 0.5, tol: 1e-12 },
            Expected { name: "j_l_to_B", value: 1.0, tol: 1e-12 },
            Expected { name: "delta_x_to_b", value: FRAC_1_SQRT_2 - 0.5, tol: 1e-12 },
            Expected { name: "delta_x_to_B", value: 0.0, tol: 1e-12 },
            // Frozen from independent high-precision computation.
            Expected { name: "h_X_bits", value: 0.7359159380345967, tol: 1e-9 },
            Expected { name: "i_X_b_bits", value: 0.24658589585951687, tol: 1e-9 },
            Expected { name: "hmin_b_given_lx_bits", value: 0.5274313736907413, tol: 1e-9 },
        ],
    }
}

/// Forwards Bob's outcome as the message and wins every round: B = lambda
/// xor b, X = B, A = a*(X xor lambda) xor X.
fn footnote_maximal() -> ZooEntry {
    let (alice_settings, bob_settings) = uniform_settings();
    let model = HvcModel {
        lambda_prior: vec![0.5, 0.5],
        alice_settings,
        bob_settings,
        bob_outcome: (0..2)
            .map(|b| (0..2).map(|lam| bit_point(lam ^ b)).collect())
            .collect(),
        message: (0..2)
            .map(|_b| {
                (0..2)
                    .map(|out| vec![{ let mut row = vec![0.0, 0.0]; row[out] = 1.0; row }; 2])
                    .collect()
            })
            .collect(),
        alice: AliceStrategy::Explicit(
            (0..2)
                .map(|a| {
                    (0..2)
                        .map(|lam| (0..2).map(|x| bit_point((a & (x ^ lam)) ^ x)).collect())
                        .collect()
                })
                .collect(),
        ),
    };
    ZooEntry {
        name: "footnote-maximal",
        summary: "outcome relayed as the message; wins every round (algebraic maximum)",
        free_choice: true,
        model,
        expected: vec![
            Expected { name: "chsh_score", value: 1.0, tol: 1e-12 },
            Expected { name: "j_lx_to_b", value: 1.0, tol: 1e-12 },
            Expected { name: "j_lx_to_B", value: 1.0, tol: 1e-12 },
            Expected { name: "j_lx_to_BxorB", value: 1.0, tol: 1e-12 },
            Expected { name: "j_l_to_b", value: 0.5, tol: 1e-12 },
            Expected { name: "j_l_to_B", value: 0.5, tol: 1e-12 },
            Expected { name: "delta_x_to_b", value: 0.5, tol: 1e-12 },
            Expected { name: "delta_x_to_B", value: 0.5, tol: 1e-12 },
            Expected { name: "h_X_bits", value: 1.0, tol: 1e-12 },
        ],
    }
}

/// Perfect nonlocal-box correlations via a four-valued message: B is a fair
/// coin, X encodes the pair (B, b xor B), and Alice reads off component a, so
/// A xor B = ab on every round while both single-party marginals stay
/// uniform. The one violating entry whose Alice marginal never depends on b.
fn pr_box() -> ZooEntry {
    let (alice_settings, bob_settings) = uniform_settings();
    let model = HvcModel {
        lambda_prior: vec![1.0],
        alice_settings,
        bob_settings,
        bob_outcome: vec![vec![[0.5, 0.5]]; 2],
        message: (0..2)
            .map(|b| {
                (0..2)
                    .map(|out| {
                        let mut row = vec![0.0; 4];
                        row[out | ((b ^ out) << 1)] = 1.0;
                        vec![row]
                    })
                    .collect()
            })
            .collect(),
        alice: AliceStrategy::Explicit(
            (0..2)
                .map(|a| {
                    vec![(0..4).map(|x| bit_point((x >> a) & 1)).collect()]
                })
                .collect(),
        ),
    };
    ZooEntry {
        name: "pr-box",
        summary: "perfect box correlations with setting-independent marginals",
        free_choice: true,
        model,
        // All probabilities are dyadic, so every quantity is exact.
        expected: vec![
            Expected { name: "chsh_score", value: 1.0, tol: 0.0 },
            Expected { name: "j_lx_to_b", value: 1.0, tol: 0.0 },
            Expected { name: "j_lx_to_B", value: 1.0, tol: 0.0 },
            Expected { name: "j_lx_to_BxorB", value: 1.0, tol: 0.0 },
            Expected { name: "j_l_to_b", value: 0.5, tol: 0.0 },
            Expected { name: "j_l_to_B", value: 0.5, tol: 0.0 },
            Expected { name: "delta_x_to_b", value: 0.5, tol: 0.0 },
            Expected { name: "delta_x_to_B", value: 0.5, tol: 0.0 },
            Expected { name: "h_X_bits", value: 2.0, tol: 0.0 },
        ],
    }
}

/// Best deterministic no-communication model: B = lambda, A = lambda, so
/// A xor B = 0, winning the three cells with a*b = 0.
fn lhv_best() -> ZooEntry {
    let (alice_settings, bob_settings) = uniform_settings();
    let model = HvcModel {
        lambda_prior: vec![0.5, 0.5],
        alice_settings,
        bob_settings,
        bob_outcome: (0..2)
            .map(|_b| (0..2).map(bit_point).collect())
            .collect(),
        message: vec![vec![vec![vec![1.0]; 2]; 2]; 2],
        alice: AliceStrategy::Explicit(
            (0..2)
                .map(|_a| (0..2).map(|lam| vec![bit_point(lam)]).collect())
                .collect(),
        ),
    };
    ZooEntry {
        name: "lhv-best",
        summary: "best deterministic no-communication model (3/4)",
        free_choice: true,
        model,
        expected: vec![
            Expected { name: "chsh_score", value: 0.75, tol: 1e-12 },
            Expected { name: "j_lx_to_b", value: 0.5, tol: 1e-12 },
            Expected { name: "j_lx_to_B", value: 1.0, tol: 1e-12 },
            Expected { name: "j_l_to_b", value: 0.5, tol: 1e-12 },
            Expected { name: "j_l_to_B", value: 1.0, tol: 1e-12 },
            Expected { name: "delta_x_to_b", value: 0.0, tol: 1e-12 },
            Expected { name: "delta_x_to_B", value: 0.0, tol: 1e-12 },
            Expected { name: "h_X_bits", value: 0.0, tol: 1e-12 },
        ],
    }
}

/// Settings determined by the hidden value: both parties' priors are point
/// masses and lambda encodes the pair (a, b), realized on lambda = 2a + b.
/// Every quantity below is a product of 0s, 1s, and one 1.0 prior, so the
/// expectations hold with tolerance zero.
fn superdet_demo() -> ZooEntry {
    let model = HvcModel {
        lambda_prior: vec![1.0, 0.0, 0.0, 0.0],
        alice_settings: [1.0, 0.0],
        bob_settings: [1.0, 0.0],
        // B copies the b-component of lambda.
        bob_outcome: (0..2)
            .map(|_b| (0..4).map(|lam| bit_point(lam & 1)).collect())
            .collect(),
        // X relays B.
        message: (0..2)
            .map(|_b| {
                (0..2)
                    .map(|out| vec![{ let mut row = vec![0.0, 0.0]; row[out] = 1.0; row }; 4])
                    .collect()
            })
            .collect(),
        // A copies the a-component of lambda.
        alice: AliceStrategy::Explicit(
            (0..2)
                .map(|_a| (0..4).map(|lam| (0..2).map(|_x| bit_point((lam >> 1) & 1)).collect()).collect())
                .collect(),
        ),
    };
    ZooEntry {
        name: "superdet-demo",
        summary: "settings determined by the hidden value (degenerate priors, flagged non-free)",
        free_choice: false,
        model,
        expected: vec![
            Expected { name: "j_l_to_b", value: 1.0, tol: 0.0 },
            Expected { name: "j_l_to_B", value: 1.0, tol: 0.0 },
            Expected { name: "delta_x_to_b", value: 0.0, tol: 0.0 },
            Expected { name: "delta_x_to_B", value: 0.0, tol: 0.0 },
        ],
    }
}

/// Looks up an expected-quantity name in a computed report pair.
pub fn lookup_quantity(
    name: &str,
    info: &crate::info::InfoReport,
    chsh_score: Option<f64>,
) -> Option<f64> {
    match name {
        "chsh_score" => chsh_score,
        "j_lx_to_b" => Some(info.j_lx_to_b),
        "j_lx_to_B" => Some(info.j_lx_to_B),
        "j_lx_to_BxorB" => Some(info.j_lx_to_BxorB),
        "j_l_to_b" => Some(info.j_l_to_b),
        "j_l_to_B" => Some(info.j_l_to_B),
        "delta_x_to_b" => Some(info.delta_x_to_b),
        "delta_x_to_B" => Some(info.delta_x_to_B),
        "h_X_bits" => Some(info.h_X_bits),
        "i_X_b_bits" => Some(info.i_X_b_bits),
        "i_lambda_ab_bits" => Some(info.i_lambda_ab_bits),
        "hmin_b_given_lx_bits" => Some(info.hmin_b_given_lx_bits),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chsh::{chsh_score, ChshVariant};
    use crate::dist::enumerate_joint;
    use crate::info::InfoReport;

    #[test]
    fn unknown_name_is_an_error() {
        assert!(matches!(zoo_get("toy"), Err(Error::UnknownModel(_))));
    }

    #[test]
    fn listing_covers_the_registry() {
        let listing = zoo_list();
        assert_eq!(listing.len(), ZOO_NAMES.len());
        for ((name, summary), expected) in listing.iter().zip(ZOO_NAMES) {
            assert_eq!(*name, expected);
            assert!(!summary.is_empty());
        }
    }

    #[test]
    fn every_entry_matches_its_expected_table() {
        for name in ZOO_NAMES {
            let entry = zoo_get(name).unwrap();
            let joint = enumerate_joint(&entry.model).unwrap();
            let info = InfoReport::from_joint(&joint).unwrap();
            let score = if entry.model.settings_uniform(1e-9) {
                Some(chsh_score(&joint, ChshVariant::BASE).unwrap().score)
            } else {
                None
            };
            for exp in &entry.expected {
                let got = lookup_quantity(exp.name, &info, score)
                    .unwrap_or_else(|| panic!("{name}: unknown quantity {}", exp.name));
                assert!(
                    (got - exp.value).abs() <= exp.tol,
                    "{name}: {} = {got}, expected {} within {}",
                    exp.name,
                    exp.value,
                    exp.tol
                );
            }
        }
    }

    #[test]
    fn superdet_is_flagged_non_free() {
        assert!(!zoo_get("superdet-demo").unwrap().free_choice);
        for name in ["toy-tsirelson", "footnote-maximal", "pr-box", "lhv-best"] {
            assert!(zoo_get(name).unwrap().free_choice);
        }
    }

    #[test]
    fn pr_box_marginals_ignore_the_distant_setting() {
        use crate::conditions::{check_oi, check_si};
        let entry = zoo_get("pr-box").unwrap();
        let joint = enumerate_joint(&entry.model).unwrap();
        let si = check_si(&joint, 1e-9);
        let oi = check_oi(&joint, 1e-9);
        assert!(si.holds && si.max_deviation == 0.0);
        assert!(!oi.holds && oi.max_deviation == 1.0);
        assert_eq!(chsh_score(&joint, ChshVariant::BASE).unwrap().score, 1.0);
    }
}
