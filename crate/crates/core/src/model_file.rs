//! On-disk JSON format for models and its mapping onto `HvcModel`.
//!
//! The format is explicit about shapes: a `cardinality` field that must match
//! the prior's length, kernels as nested arrays indexed the way the docs
//! spell out, and an `alice` field that is either the literal string
//! "optimal" or a full strategy table. Rendering uses shortest round-trip
//! float formatting, so export -> parse -> export is byte-stable and parsed
//! values are bit-identical to the originals.

use crate::dist::{validate_model, AliceStrategy, HvcModel};
use crate::error::{Error, Result, Violation};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaSection {
    pub cardinality: usize,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingsSection {
    pub alice_probs: Vec<f64>,
    pub bob_probs: Vec<f64>,
}

/// Either the sentinel string "optimal" or rows `[a][lambda][x] -> [p0, p1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AliceField {
    Sentinel(String),
    Table(Vec<Vec<Vec<Vec<f64>>>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
    pub lambda: LambdaSection,
    pub settings: SettingsSection,
    /// `bob_outcome[b][lambda] -> [p0, p1]`.
    pub bob_outcome: Vec<Vec<Vec<f64>>>,
    /// `message[b][B][lambda] -> distribution over messages`.
    pub message: Vec<Vec<Vec<Vec<f64>>>>,
    pub alice: AliceField,
}

pub fn parse_model_file(text: &str) -> Result<ModelFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn render_model_file(file: &ModelFile) -> String {
    let mut out = serde_json::to_string_pretty(file).expect("model files serialize");
    out.push('\n');
    out
}

fn pair(row: &[f64], path: String, violations: &mut Vec<Violation>) -> [f64; 2] {
    if row.len() == 2 {
        [row[0], row[1]]
    } else {
        violations.push(Violation { location: path, detail: format!("expected 2 entries, found {}", row.len()) });
        [0.0; 2]
    }
}

impl ModelFile {
    /// Checks the declared shapes, then every distribution invariant; all
    /// breaches are reported together, named by their JSON path.
    pub fn to_model(&self) -> Result<HvcModel> {
        let mut shape = Vec::new();
        let l = self.lambda.cardinality;
        if self.lambda.probs.len() != l {
            shape.push(Violation {
                location: "lambda.cardinality".into(),
                detail: format!("cardinality {} but probs has {} entries", l, self.lambda.probs.len()),
            });
        }
        let alice_settings = pair(&self.settings.alice_probs, "settings.alice_probs".into(), &mut shape);
        let bob_settings = pair(&self.settings.bob_probs, "settings.bob_probs".into(), &mut shape);

        if self.bob_outcome.len() != 2 {
            shape.push(Violation {
                location: "bob_outcome".into(),
                detail: format!("expected 2 setting slices, found {}", self.bob_outcome.len()),
            });
        }
        let mut bob_outcome = Vec::new();
        for (b, rows) in self.bob_outcome.iter().enumerate().take(2) {
            if rows.len() != l {
                shape.push(Violation {
                    location: format!("bob_outcome[{b}]"),
                    detail: format!("expected {} rows, found {}", l, rows.len()),
                });
            }
            bob_outcome
                .push(rows.iter().enumerate().map(|(lam, row)| pair(row, format!("bob_outcome[{b}][{lam}]"), &mut shape)).collect());
        }

        if self.message.len() != 2 {
            shape.push(Violation {
                location: "message".into(),
                detail: format!("expected 2 setting slices, found {}", self.message.len()),
            });
        }
        for (b, slice) in self.message.iter().enumerate() {
            if slice.len() != 2 {
                shape.push(Violation {
                    location: format!("message[{b}]"),
                    detail: format!("expected 2 outcome slices, found {}", slice.len()),
                });
            }
            for (bb, rows) in slice.iter().enumerate() {
                if rows.len() != l {
                    shape.push(Violation {
                        location: format!("message[{b}][{bb}]"),
                        detail: format!("expected {} rows, found {}", l, rows.len()),
                    });
                }
            }
        }

        let alice = match &self.alice {
            AliceField::Sentinel(s) if s == "optimal" => AliceStrategy::Optimal,
            AliceField::Sentinel(s) => {
                shape.push(Violation {
                    location: "alice".into(),
                    detail: format!("unknown sentinel {s:?}; expected \"optimal\" or a strategy table"),
                });
                AliceStrategy::Optimal
            }
            AliceField::Table(table) => AliceStrategy::Explicit(
                table
                    .iter()
                    .enumerate()
                    .map(|(a, per_lam)| {
                        per_lam
                            .iter()
                            .enumerate()
                            .map(|(lam, per_x)| {
                                per_x
                                    .iter()
                                    .enumerate()
                                    .map(|(x, row)| pair(row, format!("alice[{a}][{lam}][{x}]"), &mut shape))
                                    .collect()
                            })
                            .collect()
                    })
                    .collect(),
            ),
        };
        if !shape.is_empty() {
            return Err(Error::InvalidModel(shape));
        }

        let model = HvcModel {
            lambda_prior: self.lambda.probs.clone(),
            alice_settings,
            bob_settings,
            bob_outcome,
            message: self.message.clone(),
            alice,
        };
        let violations = validate_model(&model);
        if !violations.is_empty() {
            return Err(Error::InvalidModel(violations));
        }
        Ok(model)
    }

    pub fn from_model(model: &HvcModel, meta: Option<Meta>) -> ModelFile {
        ModelFile {
            meta,
            lambda: LambdaSection { cardinality: model.lambda_card(), probs: model.lambda_prior.clone() },
            settings: SettingsSection {
                alice_probs: model.alice_settings.to_vec(),
                bob_probs: model.bob_settings.to_vec(),
            },
            bob_outcome: model
                .bob_outcome
                .iter()
                .map(|rows| rows.iter().map(|r| r.to_vec()).collect())
                .collect(),
            message: model.message.clone(),
            alice: match &model.alice {
                AliceStrategy::Optimal => AliceField::Sentinel("optimal".into()),
                AliceStrategy::Explicit(table) => AliceField::Table(
                    table
                        .iter()
                        .map(|per_lam| {
                            per_lam.iter().map(|per_x| per_x.iter().map(|r| r.to_vec()).collect()).collect()
                        })
                        .collect(),
                ),
            },
        }
    }
}
