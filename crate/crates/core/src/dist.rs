//! Exact probability tables for one round of a two-setting, two-outcome game
//! played through a hidden variable and a one-way message.
//!
//! Generative order: the settings a, b and the hidden value lambda are drawn
//! independently; Bob produces his outcome B from (b, lambda); the message X
//! is drawn from (b, B, lambda); Alice produces A from (a, lambda, X). The
//! joint over all six variables is the product of those factors, enumerated
//! densely.

use crate::error::{Error, Result, Violation};

/// Default absolute tolerance for probability equality checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Tighter tolerance for normalization and other enumeration-internal checks.
pub const ENUM_TOL: f64 = 1e-12;

/// The six variables of one round, in canonical axis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    AliceSetting,
    BobSetting,
    Hidden,
    BobOutcome,
    Message,
    AliceOutcome,
}

impl Var {
    pub const ALL: [Var; 6] = [
        Var::AliceSetting,
        Var::BobSetting,
        Var::Hidden,
        Var::BobOutcome,
        Var::Message,
        Var::AliceOutcome,
    ];

    /// Axis of this variable in a joint table.
    pub fn axis(self) -> usize {
        match self {
            Var::AliceSetting => 0,
            Var::BobSetting => 1,
            Var::Hidden => 2,
            Var::BobOutcome => 3,
            Var::Message => 4,
            Var::AliceOutcome => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::AliceSetting => "a",
            Var::BobSetting => "b",
            Var::Hidden => "lambda",
            Var::BobOutcome => "B",
            Var::Message => "X",
            Var::AliceOutcome => "A",
        }
    }

    /// Case-sensitive lookup by short name: a, b, lambda, B, X, A.
    pub fn parse(name: &str) -> Result<Var> {
        match name {
            "a" => Ok(Var::AliceSetting),
            "b" => Ok(Var::BobSetting),
            "lambda" => Ok(Var::Hidden),
            "B" => Ok(Var::BobOutcome),
            "X" => Ok(Var::Message),
            "A" => Ok(Var::AliceOutcome),
            other => Err(Error::UnknownVariable(other.to_string())),
        }
    }
}

/// A subset of the six variables, iterated in canonical axis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct VarSet(u8);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn new(vars: &[Var]) -> VarSet {
        let mut s = VarSet::EMPTY;
        for &v in vars {
            s.insert(v);
        }
        s
    }

    pub fn insert(&mut self, v: Var) {
        self.0 |= 1 << v.axis();
    }

    pub fn with(mut self, v: Var) -> VarSet {
        self.insert(v);
        self
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn contains(self, v: Var) -> bool {
        self.0 & (1 << v.axis()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Var> {
        Var::ALL.into_iter().filter(move |v| self.contains(*v))
    }
}

impl std::fmt::Display for VarSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<&str> = self.iter().map(Var::name).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

impl From<Var> for VarSet {
    fn from(v: Var) -> VarSet {
        VarSet::EMPTY.with(v)
    }
}

/// A validated distribution over labeled outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl FiniteDistribution {
    /// Checks label/prob arity, nonnegativity, and normalization (within
    /// [`ENUM_TOL`]) before accepting the table.
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<FiniteDistribution> {
        if labels.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} labels but {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "entry {i} ({}) is {p}",
                    labels[i]
                )));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > ENUM_TOL {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
        Ok(FiniteDistribution { labels, probs })
    }

    pub fn uniform(n: usize) -> FiniteDistribution {
        let p = 1.0 / n as f64;
        FiniteDistribution {
            labels: (0..n).map(|i| i.to_string()).collect(),
            probs: vec![p; n],
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    /// Probability of the outcome carrying `label`, if present.
    pub fn prob_of(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.probs[i])
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().cloned().fold(0.0, f64::max)
    }
}

/// Alice's strategy table, or the placeholder asking the engine to derive one.
#[derive(Debug, Clone, PartialEq)]
pub enum AliceStrategy {
    /// Resolve with the score optimizer before enumeration.
    Optimal,
    /// `rows[a][lambda][x]` is `[P(A=0), P(A=1)]`.
    Explicit(Vec<Vec<Vec<[f64; 2]>>>),
}

impl AliceStrategy {
    pub fn is_explicit(&self) -> bool {
        matches!(self, AliceStrategy::Explicit(_))
    }
}

/// A hidden-variable model of one round with one-way messaging (Bob sends).
#[derive(Debug, Clone, PartialEq)]
pub struct HvcModel {
    pub lambda_prior: Vec<f64>,
    /// `[P(a=0), P(a=1)]`; uniform unless an experiment says otherwise.
    pub alice_settings: [f64; 2],
    pub bob_settings: [f64; 2],
    /// `bob_outcome[b][lambda]` is `[P(B=0), P(B=1)]`.
    pub bob_outcome: Vec<Vec<[f64; 2]>>,
    /// `message[b][B][lambda]` is a distribution over the X alphabet.
    pub message: Vec<Vec<Vec<Vec<f64>>>>,
    pub alice: AliceStrategy,
}

impl HvcModel {
    pub fn lambda_card(&self) -> usize {
        self.lambda_prior.len()
    }

    /// Message alphabet size, read off the first kernel row.
    pub fn message_card(&self) -> usize {
        self.message
            .first()
            .and_then(|by_b| by_b.first())
            .and_then(|by_out| by_out.first())
            .map(|row| row.len())
            .unwrap_or(0)
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_model(self)
    }

    pub fn settings_uniform(&self, tol: f64) -> bool {
        self.alice_settings.iter().chain(self.bob_settings.iter()).all(|&p| (p - 0.5).abs() <= tol)
    }
}

fn check_row(out: &mut Vec<Violation>, location: &str, row: &[f64]) {
    for (i, &p) in row.iter().enumerate() {
        if !p.is_finite() {
            out.push(Violation::new(location, format!("entry {i} is {p}")));
            return;
        }
        if p < 0.0 {
            out.push(Violation::new(location, format!("entry {i} is negative ({p})")));
            return;
        }
    }
    let total: f64 = row.iter().sum();
    if (total - 1.0).abs() > ENUM_TOL {
        out.push(Violation::new(location, format!("sums to {total}, expected 1")));
    }
}

/// Checks every structural invariant of a model and reports all breaches with
/// their index paths (model-file notation). An empty result means valid.
pub fn validate_model(model: &HvcModel) -> Vec<Violation> {
    let mut v = Vec::new();
    let l = model.lambda_prior.len();

    if l == 0 {
        v.push(Violation::new("lambda.probs", "hidden variable needs at least one value"));
    } else {
        check_row(&mut v, "lambda.probs", &model.lambda_prior);
    }
    check_row(&mut v, "settings.alice_probs", &model.alice_settings);
    check_row(&mut v, "settings.bob_probs", &model.bob_settings);

    if model.bob_outcome.len() != 2 {
        v.push(Violation::new(
            "bob_outcome",
            format!("expected 2 setting slices, found {}", model.bob_outcome.len()),
        ));
    }
    for (b, by_l) in model.bob_outcome.iter().enumerate() {
        if by_l.len() != l {
            v.push(Violation::new(
                format!("bob_outcome[{b}]"),
                format!("expected {l} hidden-value rows, found {}", by_l.len()),
            ));
            continue;
        }
        for (lam, row) in by_l.iter().enumerate() {
            check_row(&mut v, &format!("bob_outcome[{b}][{lam}]"), row);
        }
    }

    let m = model.message_card();
    if m == 0 {
        v.push(Violation::new("message", "message alphabet is empty"));
    }
    if model.message.len() != 2 {
        v.push(Violation::new(
            "message",
            format!("expected 2 setting slices, found {}", model.message.len()),
        ));
    }
    for (b, by_out) in model.message.iter().enumerate() {
        if by_out.len() != 2 {
            v.push(Violation::new(
                format!("message[{b}]"),
                format!("expected 2 outcome slices, found {}", by_out.len()),
            ));
            continue;
        }
        for (out, by_l) in by_out.iter().enumerate() {
            if by_l.len() != l {
                v.push(Violation::new(
                    format!("message[{b}][{out}]"),
                    format!("expected {l} hidden-value rows, found {}", by_l.len()),
                ));
                continue;
            }
            for (lam, row) in by_l.iter().enumerate() {
                let loc = format!("message[{b}][{out}][{lam}]");
                if row.len() != m {
                    v.push(Violation::new(loc, format!("expected {m} entries, found {}", row.len())));
                    continue;
                }
                check_row(&mut v, &loc, row);
            }
        }
    }

    if let AliceStrategy::Explicit(rows) = &model.alice {
        if rows.len() != 2 {
            v.push(Violation::new(
                "alice",
                format!("expected 2 setting slices, found {}", rows.len()),
            ));
        }
        for (a, by_l) in rows.iter().enumerate() {
            if by_l.len() != l {
                v.push(Violation::new(
                    format!("alice[{a}]"),
                    format!("expected {l} hidden-value rows, found {}", by_l.len()),
                ));
                continue;
            }
            for (lam, by_x) in by_l.iter().enumerate() {
                if by_x.len() != m {
                    v.push(Violation::new(
                        format!("alice[{a}][{lam}]"),
                        format!("expected {m} message rows, found {}", by_x.len()),
                    ));
                    continue;
                }
                for (x, row) in by_x.iter().enumerate() {
                    check_row(&mut v, &format!("alice[{a}][{lam}][{x}]"), row);
                }
            }
        }
    }

    v
}

/// The exact joint over (a, b, lambda, B, X, A), stored dense in row-major
/// canonical axis order.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    dims: [usize; 6],
    table: Vec<f64>,
}

impl JointDistribution {
    pub(crate) fn from_table(dims: [usize; 6], table: Vec<f64>) -> JointDistribution {
        debug_assert_eq!(table.len(), dims.iter().product::<usize>());
        JointDistribution { dims, table }
    }

    pub fn dims(&self) -> [usize; 6] {
        self.dims
    }

    pub fn dim(&self, v: Var) -> usize {
        self.dims[v.axis()]
    }

    fn offset(&self, idx: [usize; 6]) -> usize {
        let mut off = 0;
        for ax in 0..6 {
            debug_assert!(idx[ax] < self.dims[ax]);
            off = off * self.dims[ax] + idx[ax];
        }
        off
    }

    pub fn get(&self, idx: [usize; 6]) -> f64 {
        self.table[self.offset(idx)]
    }

    pub fn total(&self) -> f64 {
        self.table.iter().sum()
    }

    /// Iterates (index, probability) over every cell, including zero cells.
    pub fn iter(&self) -> impl Iterator<Item = ([usize; 6], f64)> + '_ {
        let dims = self.dims;
        self.table.iter().enumerate().map(move |(flat, &p)| {
            let mut idx = [0usize; 6];
            let mut rest = flat;
            for ax in (0..6).rev() {
                idx[ax] = rest % dims[ax];
                rest /= dims[ax];
            }
            (idx, p)
        })
    }

    /// P(a, b) as a 2x2 table.
    pub fn settings_marginal(&self) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for (idx, p) in self.iter() {
            out[idx[0]][idx[1]] += p;
        }
        out
    }

    /// True when all four setting pairs carry probability 1/4 within `tol`.
    pub fn settings_uniform(&self, tol: f64) -> bool {
        let m = self.settings_marginal();
        m.iter().flatten().all(|&p| (p - 0.25).abs() <= tol)
    }
}

/// Builds the exact joint table from a validated model with explicit Alice rows.
pub fn enumerate_joint(model: &HvcModel) -> Result<JointDistribution> {
    let alice = match &model.alice {
        AliceStrategy::Optimal => return Err(Error::AliceUnresolved),
        AliceStrategy::Explicit(rows) => rows,
    };
    let violations = validate_model(model);
    if !violations.is_empty() {
        return Err(Error::InvalidModel(violations));
    }

    let l = model.lambda_card();
    let m = model.message_card();
    let dims = [2, 2, l, 2, m, 2];
    let mut table = Vec::with_capacity(dims.iter().product());
    for a in 0..2 {
        for b in 0..2 {
            for lam in 0..l {
                let p_base = model.alice_settings[a] * model.bob_settings[b] * model.lambda_prior[lam];
                for out_b in 0..2 {
                    let p_b = p_base * model.bob_outcome[b][lam][out_b];
                    for x in 0..m {
                        let p_x = p_b * model.message[b][out_b][lam][x];
                        for out_a in 0..2 {
                            table.push(p_x * alice[a][lam][x][out_a]);
                        }
                    }
                }
            }
        }
    }
    let joint = JointDistribution::from_table(dims, table);
    debug_assert!((joint.total() - 1.0).abs() <= ENUM_TOL);
    Ok(joint)
}

/// Projects the joint onto `keep`, returning a labeled distribution whose
/// outcomes enumerate the kept variables row-major in canonical axis order.
pub fn marginalize(joint: &JointDistribution, keep: VarSet) -> Result<FiniteDistribution> {
    if keep.is_empty() {
        return Err(Error::EmptySource);
    }
    let kept: Vec<Var> = keep.iter().collect();
    let kept_dims: Vec<usize> = kept.iter().map(|v| joint.dim(*v)).collect();
    let n: usize = kept_dims.iter().product();

    let mut probs = vec![0.0; n];
    for (idx, p) in joint.iter() {
        let mut key = 0;
        for (v, d) in kept.iter().zip(&kept_dims) {
            key = key * d + idx[v.axis()];
        }
        probs[key] += p;
    }

    let mut labels = Vec::with_capacity(n);
    for flat in 0..n {
        let mut parts = Vec::with_capacity(kept.len());
        let mut rest = flat;
        for (v, d) in kept.iter().zip(&kept_dims).rev() {
            parts.push(format!("{}={}", v.name(), rest % d));
            rest /= d;
        }
        parts.reverse();
        labels.push(parts.join(","));
    }
    FiniteDistribution::new(labels, probs)
}

/// Conditions the joint on a partial assignment. The result keeps all six
/// axes; cells outside the assignment are zero and the rest are renormalized
/// by the event mass.
pub fn condition(joint: &JointDistribution, given: &[(Var, usize)]) -> Result<JointDistribution> {
    for &(v, val) in given {
        let d = joint.dim(v);
        if val >= d {
            return Err(Error::Domain { value: val as f64, lo: 0.0, hi: (d - 1) as f64 });
        }
    }
    let matches = |idx: &[usize; 6]| given.iter().all(|&(v, val)| idx[v.axis()] == val);

    let mut mass = 0.0;
    for (idx, p) in joint.iter() {
        if matches(&idx) {
            mass += p;
        }
    }
    if mass == 0.0 {
        return Err(Error::ZeroCondition);
    }

    let table: Vec<f64> = joint.iter().map(|(idx, p)| if matches(&idx) { p / mass } else { 0.0 }).collect();
    Ok(JointDistribution::from_table(joint.dims, table))
}

/// Point-mass row `[P(A=0), P(A=1)]` on `bit`.
pub fn bit_point(bit: usize) -> [f64; 2] {
    match bit {
        0 => [1.0, 0.0],
        _ => [0.0, 1.0],
    }
}
