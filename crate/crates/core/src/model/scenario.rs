//! Scenario files and the validated, immutable scenario they load into.
//!
//! A scenario is one JSON document:
//!
//! ```json
//! {
//!   "name": "fork",
//!   "workspace": {
//!     "state_space":   { "lower": [...], "upper": [...] },
//!     "control_space": { "lower": [...], "upper": [...] },
//!     "obstacles": [ { "type": "box", "lower": [...], "upper": [...] } ]
//!   },
//!   "dynamics": { "model": "second_order_car", "wheelbase": 0.5, ... },
//!   "regions": [ { "name": "gate_a", "shape": {...}, "labels": [], "uncertain": ["obs"] } ],
//!   "observation_regions": [ { "name": "look_a", "shape": {...}, "target": "gate_a", "accuracy": 0.85 } ],
//!   "prior": { "independent": { "gate_a.obs": 0.5 } },
//!   "task": { "propositions": ["obs", "exit"], "formula": "!obs U exit" },
//!   "initial": { "state": [...] },
//!   "planning": { "t_prop_max": 1.0 }
//! }
//! ```
//!
//! `state_space` covers the model's own state dimensions; a fuel dimension,
//! when present, is bounded by `[0, capacity]` implicitly. Two proposition
//! names have built-in meaning: `obs` holds inside obstacles and outside the
//! state box, `fuel` holds while the fuel dimension is positive.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::dynamics::{DynamicsModel, StateVec};
use super::geometry::{Bounds, Shape};
use super::hypothesis::{EnvHypothesis, HypothesisSpace, MemoryVector, UncertainPair, DEFAULT_MAX_UNCERTAIN_PAIRS};
use crate::error::{BeliefError, ScenarioError};
use crate::ltlf::{compile_dfa_with, parse_ltlf, CompileOptions, Dfa, LtlfFormula, PropositionSet, Symbol};

/// Propositions with built-in semantics.
pub const OBSTACLE_PROP: &str = "obs";
pub const FUEL_PROP: &str = "fuel";

/// Most observation regions a memory vector can track.
pub const MAX_OBSERVATION_REGIONS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub workspace: WorkspaceSpec,
    pub dynamics: DynamicsModel,
    #[serde(default)]
    pub regions: Vec<RegionSpec>,
    #[serde(default)]
    pub observation_regions: Vec<ObservationSpec>,
    #[serde(default)]
    pub prior: PriorSpec,
    pub task: TaskSpec,
    pub initial: InitialSpec,
    #[serde(default)]
    pub planning: PlanningParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceSpec {
    pub state_space: Bounds,
    pub control_space: Bounds,
    #[serde(default)]
    pub obstacles: Vec<Shape>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub name: String,
    pub shape: Shape,
    #[serde(default)]
    pub labels: Vec<String>,
    #[serde(default)]
    pub uncertain: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationSpec {
    pub name: String,
    pub shape: Shape,
    pub target: String,
    /// Symmetric sensor: the true local hypothesis is reported with this
    /// probability, the remaining mass is split evenly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    /// Full table, `table[h][o]` for local hypothesis `h` and symbol `o`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSpec {
    /// `"region.prop" -> P(true)`, expanded to the product distribution.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub independent: BTreeMap<String, f64>,
    /// Explicit joint table; hypotheses not listed have probability zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint: Option<Vec<JointEntry>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointEntry {
    /// Pairs (`"region.prop"`) that are true; all others are false.
    #[serde(rename = "true")]
    pub true_pairs: Vec<String>,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub propositions: Vec<String>,
    pub formula: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub state: Vec<f64>,
    /// Observation regions already visited.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub visited: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanningParams {
    /// Upper end of the sampled propagation duration.
    #[serde(default = "default_t_prop")]
    pub t_prop_max: f64,
    /// Fixed RK4 step; defaults to `min(t_prop_max, narrowest guard) / 20`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integration_step: Option<f64>,
    #[serde(default = "default_event_tolerance")]
    pub event_tolerance: f64,
    /// Step budget for leaving the region a node sits in.
    #[serde(default = "default_exit_budget")]
    pub exit_step_budget: usize,
    #[serde(default = "default_max_pairs")]
    pub max_uncertain_pairs: usize,
    #[serde(default = "default_max_dfa_states")]
    pub max_dfa_states: usize,
}

fn default_t_prop() -> f64 {
    1.0
}
fn default_event_tolerance() -> f64 {
    1e-6
}
fn default_exit_budget() -> usize {
    10_000
}
fn default_max_pairs() -> usize {
    DEFAULT_MAX_UNCERTAIN_PAIRS
}
fn default_max_dfa_states() -> usize {
    CompileOptions::default().max_states
}

impl Default for PlanningParams {
    fn default() -> Self {
        PlanningParams {
            t_prop_max: default_t_prop(),
            integration_step: None,
            event_tolerance: default_event_tolerance(),
            exit_step_budget: default_exit_budget(),
            max_uncertain_pairs: default_max_pairs(),
            max_dfa_states: default_max_dfa_states(),
        }
    }
}

/// A labeled region. `uncertain` holds `(proposition, hypothesis bit)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemanticRegion {
    pub name: String,
    pub shape: Shape,
    pub certain: Symbol,
    pub uncertain: Vec<(usize, usize)>,
}

/// A sensing region over one semantic region's hidden propositions.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationRegion {
    pub name: String,
    pub shape: Shape,
    pub target: usize,
    /// Hypothesis bits of the target region, in local-index order.
    pub bits: Vec<usize>,
    /// `table[h][o]`.
    pub table: Vec<Vec<f64>>,
}

impl ObservationRegion {
    pub fn num_symbols(&self) -> usize {
        1 << self.bits.len()
    }
}

/// Validated scenario. Immutable after loading.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub file: ScenarioFile,
    pub ap: PropositionSet,
    pub formula: LtlfFormula,
    pub dfa: Dfa,
    pub dynamics: DynamicsModel,
    pub state_bounds: Bounds,
    pub control_bounds: Bounds,
    pub obstacles: Vec<Shape>,
    pub regions: Vec<SemanticRegion>,
    pub observation_regions: Vec<ObservationRegion>,
    pub hypotheses: HypothesisSpace,
    pub x0: StateVec,
    pub m0: MemoryVector,
    pub planning: PlanningParams,
    position_dims: Vec<usize>,
    obs_prop: Option<usize>,
    fuel_prop: Option<usize>,
    step: f64,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        Self::from_file(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| ScenarioError::invalid(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.file).expect("scenario serializes")
    }

    pub fn from_file(file: ScenarioFile) -> Result<Self, ScenarioError> {
        let inv = |msg: String| ScenarioError::Invalid(msg);
        let dynamics = file.dynamics.clone();
        dynamics.validate().map_err(inv)?;
        let ws = &file.workspace;
        ws.state_space.validate("state_space").map_err(inv)?;
        ws.control_space.validate("control_space").map_err(inv)?;
        if ws.state_space.dim() != dynamics.base_dim() {
            return Err(inv(format!(
                "state_space has {} dimensions, the dynamics model has {}",
                ws.state_space.dim(),
                dynamics.base_dim()
            )));
        }
        if ws.control_space.dim() != dynamics.control_dim() {
            return Err(inv(format!(
                "control_space has {} dimensions, the dynamics model takes {}",
                ws.control_space.dim(),
                dynamics.control_dim()
            )));
        }
        let position_dims = dynamics.position_dims();
        let pdim = position_dims.len();
        let check_shape = |shape: &Shape, what: &str| -> Result<(), ScenarioError> {
            shape.validate(what).map_err(inv)?;
            if shape.dim() != pdim {
                return Err(inv(format!("{what}: geometry has {} dimensions, positions have {pdim}", shape.dim())));
            }
            Ok(())
        };
        for (i, o) in ws.obstacles.iter().enumerate() {
            check_shape(o, &format!("obstacle {i}"))?;
        }

        let ap = PropositionSet::new(file.task.propositions.iter().cloned()).map_err(inv)?;
        let formula = parse_ltlf(&file.task.formula, &ap)?;
        let dfa = compile_dfa_with(
            &formula,
            &ap,
            &CompileOptions {
                max_states: file.planning.max_dfa_states,
            },
        )?;

        let prop = |name: &str, what: &str| -> Result<usize, ScenarioError> {
            ap.index_of(name)
                .ok_or_else(|| inv(format!("{what}: '{name}' is not a declared proposition")))
        };

        let mut regions = Vec::with_capacity(file.regions.len());
        let mut pairs = Vec::new();
        let mut pair_names = Vec::new();
        for (id, spec) in file.regions.iter().enumerate() {
            let what = format!("region '{}'", spec.name);
            if file.regions[..id].iter().any(|r| r.name == spec.name) {
                return Err(inv(format!("{what} is declared twice")));
            }
            check_shape(&spec.shape, &what)?;
            let mut certain = Symbol::EMPTY;
            for l in &spec.labels {
                certain = certain.with(prop(l, &what)?);
            }
            let mut uncertain = Vec::new();
            for u in &spec.uncertain {
                let p = prop(u, &what)?;
                if certain.contains(p) {
                    return Err(inv(format!("{what}: '{u}' is both certain and uncertain")));
                }
                if uncertain.iter().any(|&(q, _)| q == p) {
                    return Err(inv(format!("{what}: '{u}' listed twice")));
                }
                uncertain.push((p, pairs.len()));
                pairs.push(UncertainPair { region: id, prop: p });
                pair_names.push(format!("{}.{}", spec.name, u));
            }
            regions.push(SemanticRegion {
                name: spec.name.clone(),
                shape: spec.shape.clone(),
                certain,
                uncertain,
            });
        }
        if pairs.len() > file.planning.max_uncertain_pairs.min(31) {
            return Err(inv(format!(
                "{} uncertain region propositions exceed the hypothesis cap of {}",
                pairs.len(),
                file.planning.max_uncertain_pairs
            )));
        }

        if file.observation_regions.len() > MAX_OBSERVATION_REGIONS {
            return Err(inv(format!("at most {MAX_OBSERVATION_REGIONS} observation regions are supported")));
        }
        let mut observation_regions = Vec::with_capacity(file.observation_regions.len());
        for (id, spec) in file.observation_regions.iter().enumerate() {
            let what = format!("observation region '{}'", spec.name);
            if file.observation_regions[..id].iter().any(|r| r.name == spec.name) {
                return Err(inv(format!("{what} is declared twice")));
            }
            check_shape(&spec.shape, &what)?;
            let target = regions
                .iter()
                .position(|r| r.name == spec.target)
                .ok_or_else(|| inv(format!("{what}: unknown target region '{}'", spec.target)))?;
            let bits: Vec<usize> = regions[target].uncertain.iter().map(|&(_, b)| b).collect();
            if bits.is_empty() {
                return Err(inv(format!("{what}: target '{}' has no uncertain propositions", spec.target)));
            }
            let n = 1usize << bits.len();
            let table = match (spec.accuracy, &spec.table) {
                (Some(a), None) => {
                    if !(0.0..=1.0).contains(&a) {
                        return Err(inv(format!("{what}: accuracy {a} is outside [0, 1]")));
                    }
                    let off = (1.0 - a) / (n - 1) as f64;
                    (0..n).map(|h| (0..n).map(|o| if o == h { a } else { off }).collect()).collect()
                }
                (None, Some(t)) => {
                    if t.len() != n || t.iter().any(|row| row.len() != n) {
                        return Err(inv(format!("{what}: table must be {n} x {n}")));
                    }
                    for (h, row) in t.iter().enumerate() {
                        if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                            return Err(inv(format!("{what}: table row {h} has an invalid entry")));
                        }
                        let s: f64 = row.iter().sum();
                        if (s - 1.0).abs() > 1e-9 {
                            return Err(inv(format!("{what}: table row {h} sums to {s}")));
                        }
                    }
                    t.clone()
                }
                _ => return Err(inv(format!("{what}: give exactly one of 'accuracy' or 'table'"))),
            };
            observation_regions.push(ObservationRegion {
                name: spec.name.clone(),
                shape: spec.shape.clone(),
                target,
                bits,
                table,
            });
        }

        let pair_bit = |name: &str| -> Result<usize, ScenarioError> {
            pair_names
                .iter()
                .position(|p| p == name)
                .ok_or_else(|| inv(format!("prior: '{name}' is not an uncertain region proposition")))
        };
        let hypotheses = match (&file.prior.joint, file.prior.independent.is_empty()) {
            (Some(_), false) => return Err(inv("prior: give either 'independent' or 'joint', not both".into())),
            (Some(joint), true) => {
                let mut table = Vec::with_capacity(joint.len());
                for entry in joint {
                    let mut e = EnvHypothesis(0);
                    for name in &entry.true_pairs {
                        e = e.with(pair_bit(name)?, true);
                    }
                    table.push((e, entry.probability));
                }
                HypothesisSpace::from_joint(pairs, table).map_err(inv)?
            }
            (None, _) => {
                let mut marginals = vec![f64::NAN; pairs.len()];
                for (name, p) in &file.prior.independent {
                    marginals[pair_bit(name)?] = *p;
                }
                if let Some(k) = marginals.iter().position(|p| p.is_nan()) {
                    return Err(inv(format!("prior: no marginal for '{}'", pair_names[k])));
                }
                HypothesisSpace::from_independent(pairs, &marginals).map_err(inv)?
            }
        };

        let x0: StateVec = file.initial.state.iter().copied().collect();
        if x0.len() != dynamics.state_dim() {
            return Err(inv(format!(
                "initial state has {} entries, expected {}",
                x0.len(),
                dynamics.state_dim()
            )));
        }
        let mut m0 = MemoryVector::EMPTY;
        for name in &file.initial.visited {
            let k = observation_regions
                .iter()
                .position(|r| &r.name == name)
                .ok_or_else(|| inv(format!("initial: unknown observation region '{name}'")))?;
            m0 = m0.update(k);
        }

        let p = &file.planning;
        if !(p.t_prop_max.is_finite() && p.t_prop_max > 0.0) {
            return Err(inv("planning: t_prop_max must be positive".into()));
        }
        if !(p.event_tolerance > 0.0) {
            return Err(inv("planning: event_tolerance must be positive".into()));
        }
        let narrowest = ws
            .obstacles
            .iter()
            .chain(regions.iter().map(|r| &r.shape))
            .chain(observation_regions.iter().map(|r| &r.shape))
            .map(Shape::min_width)
            .fold(f64::INFINITY, f64::min);
        let step = match p.integration_step {
            Some(h) if h > 0.0 && h.is_finite() => h,
            Some(h) => return Err(inv(format!("planning: integration_step {h} must be positive"))),
            None => p.t_prop_max.min(narrowest) / 20.0,
        };

        let scenario = Scenario {
            name: file.name.clone(),
            ap: ap.clone(),
            formula,
            dfa,
            dynamics,
            state_bounds: ws.state_space.clone(),
            control_bounds: ws.control_space.clone(),
            obstacles: ws.obstacles.clone(),
            regions,
            observation_regions,
            hypotheses,
            x0,
            m0,
            planning: file.planning.clone(),
            position_dims,
            obs_prop: ap.index_of(OBSTACLE_PROP),
            fuel_prop: if file.dynamics.fuel.is_some() { ap.index_of(FUEL_PROP) } else { None },
            step,
            file,
        };
        if scenario.in_obstacle(&scenario.x0) {
            return Err(inv("initial state lies inside an obstacle".into()));
        }
        if scenario.out_of_bounds(&scenario.x0) {
            return Err(inv("initial state lies outside the state space".into()));
        }
        Ok(scenario)
    }

    /// Fixed RK4 step used by the propagator.
    pub fn integration_step(&self) -> f64 {
        self.step
    }

    pub fn position(&self, x: &[f64]) -> SmallVec<[f64; 3]> {
        self.position_dims.iter().map(|&d| x[d]).collect()
    }

    pub fn position_dims(&self) -> &[usize] {
        &self.position_dims
    }

    /// Bounds of the position sub-space, taken from the state box.
    pub fn position_bounds(&self) -> Bounds {
        Bounds::new(
            self.position_dims.iter().map(|&d| self.state_bounds.lower[d]).collect(),
            self.position_dims.iter().map(|&d| self.state_bounds.upper[d]).collect(),
        )
    }

    pub fn in_obstacle(&self, x: &[f64]) -> bool {
        let p = self.position(x);
        self.obstacles.iter().any(|o| o.contains(&p))
    }

    /// Outside the state box (angles exempt), fuel below zero, or non-finite.
    pub fn out_of_bounds(&self, x: &[f64]) -> bool {
        if x.iter().any(|v| !v.is_finite()) {
            return true;
        }
        let wrapped = self.dynamics.wrapped_dims();
        let outside = (0..self.state_bounds.dim()).any(|i| {
            !wrapped.contains(&i) && (x[i] < self.state_bounds.lower[i] || x[i] > self.state_bounds.upper[i])
        });
        outside || self.dynamics.fuel_dim().is_some_and(|f| x[f] < 0.0)
    }

    /// Semantic regions whose geometry contains `x`, as a bitmask.
    pub fn regions_containing(&self, x: &[f64]) -> u64 {
        let p = self.position(x);
        self.regions
            .iter()
            .enumerate()
            .filter(|(_, r)| r.shape.contains(&p))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Observation regions whose geometry contains `x`, as a bitmask.
    pub fn observation_regions_containing(&self, x: &[f64]) -> u64 {
        let p = self.position(x);
        self.observation_regions
            .iter()
            .enumerate()
            .filter(|(_, r)| r.shape.contains(&p))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// `G_R`: inside some labeled region.
    pub fn guard_r(&self, x: &[f64]) -> bool {
        self.regions_containing(x) != 0
    }

    /// `G_T`: lowest-id observation region containing `x`.
    pub fn guard_t(&self, x: &[f64]) -> Option<usize> {
        let mask = self.observation_regions_containing(x);
        (mask != 0).then(|| mask.trailing_zeros() as usize)
    }

    /// The labeling `L(x)` under hypothesis `e`.
    pub fn label_at(&self, x: &[f64], e: EnvHypothesis) -> Symbol {
        let p = self.position(x);
        let mut label = Symbol::EMPTY;
        for r in &self.regions {
            if r.shape.contains(&p) {
                label = label.union(r.certain);
                for &(prop, bit) in &r.uncertain {
                    if e.get(bit) {
                        label = label.with(prop);
                    }
                }
            }
        }
        if let Some(obs) = self.obs_prop {
            if self.obstacles.iter().any(|o| o.contains(&p)) || self.out_of_bounds_position(x) {
                label = label.with(obs);
            }
        }
        if let (Some(fuel), Some(dim)) = (self.fuel_prop, self.dynamics.fuel_dim()) {
            if x[dim] > 0.0 {
                label = label.with(fuel);
            }
        }
        label
    }

    fn out_of_bounds_position(&self, x: &[f64]) -> bool {
        let wrapped = self.dynamics.wrapped_dims();
        x.iter().any(|v| !v.is_finite())
            || (0..self.state_bounds.dim()).any(|i| {
                !wrapped.contains(&i) && (x[i] < self.state_bounds.lower[i] || x[i] > self.state_bounds.upper[i])
            })
    }

    /// `Z(o | x, r^o, e, m)`. A visited region yields the uniform null
    /// observation.
    pub fn obs_likelihood(
        &self,
        region: usize,
        e: EnvHypothesis,
        m: MemoryVector,
        o: usize,
    ) -> Result<f64, BeliefError> {
        let r = self.observation_regions.get(region).ok_or(BeliefError::UnknownRegion(region))?;
        let n = r.num_symbols();
        if o >= n {
            return Err(BeliefError::UnknownObservation { region, symbol: o });
        }
        if m.is_visited(region) {
            return Ok(1.0 / n as f64);
        }
        Ok(r.table[e.project(&r.bits)][o])
    }

    /// Human-readable observation symbol, e.g. `fire` or `!fire`.
    pub fn observation_name(&self, region: usize, o: usize) -> String {
        let r = &self.observation_regions[region];
        let target = &self.regions[r.target];
        target
            .uncertain
            .iter()
            .enumerate()
            .map(|(j, &(prop, _))| {
                let name = self.ap.name(prop);
                if o >> j & 1 == 1 {
                    name.to_string()
                } else {
                    format!("!{name}")
                }
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn region_id(&self, name: &str) -> Option<usize> {
        self.regions.iter().position(|r| r.name == name)
    }

    pub fn observation_region_id(&self, name: &str) -> Option<usize> {
        self.observation_regions.iter().position(|r| r.name == name)
    }

    pub fn obstacle_prop(&self) -> Option<usize> {
        self.obs_prop
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::dynamics::Dynamics;

    /// Unit square, single integrator, one uncertain fire site with two
    /// overlapping sensing regions and an obstacle.
    pub(crate) fn fire_fixture() -> ScenarioFile {
        ScenarioFile {
            name: "fixture".into(),
            description: String::new(),
            workspace: WorkspaceSpec {
                state_space: Bounds::new(vec![0.0, 0.0], vec![10.0, 10.0]),
                control_space: Bounds::new(vec![-1.0, -1.0], vec![1.0, 1.0]),
                obstacles: vec![Shape::aabb(vec![8.0, 8.0], vec![9.0, 9.0])],
            },
            dynamics: DynamicsModel::new(Dynamics::SingleIntegrator { dim: 2 }),
            regions: vec![
                RegionSpec {
                    name: "site".into(),
                    shape: Shape::aabb(vec![4.0, 4.0], vec![5.0, 5.0]),
                    labels: vec!["site".into()],
                    uncertain: vec!["fire".into()],
                },
                RegionSpec {
                    name: "exit_a".into(),
                    shape: Shape::aabb(vec![0.0, 9.0], vec![1.0, 10.0]),
                    labels: vec!["A".into()],
                    uncertain: vec![],
                },
            ],
            observation_regions: vec![
                ObservationSpec {
                    name: "near".into(),
                    shape: Shape::ball(vec![4.5, 4.5], 1.5),
                    target: "site".into(),
                    accuracy: Some(0.8),
                    table: None,
                },
                ObservationSpec {
                    name: "far".into(),
                    shape: Shape::ball(vec![4.5, 4.5], 3.0),
                    target: "site".into(),
                    accuracy: Some(0.6),
                    table: None,
                },
            ],
            prior: PriorSpec {
                independent: [("site.fire".to_string(), 0.35)].into_iter().collect(),
                joint: None,
            },
            task: TaskSpec {
                propositions: vec!["fire".into(), "site".into(), "A".into(), "obs".into()],
                formula: "G(!obs) & G(fire -> F(A))".into(),
            },
            initial: InitialSpec {
                state: vec![0.5, 0.5],
                visited: vec![],
            },
            planning: PlanningParams::default(),
        }
    }

    fn fixture() -> Scenario {
        Scenario::from_file(fire_fixture()).unwrap()
    }

    fn ap_sym(s: &Scenario, names: &[&str]) -> Symbol {
        s.ap.symbol(names.iter().copied()).unwrap()
    }

    #[test]
    fn label_outside_regions_is_empty() {
        let s = fixture();
        assert_eq!(s.label_at(&[2.0, 2.0], EnvHypothesis(1)), Symbol::EMPTY);
    }

    #[test]
    fn label_in_site_follows_hypothesis() {
        let s = fixture();
        assert_eq!(s.label_at(&[4.5, 4.5], EnvHypothesis(1)), ap_sym(&s, &["fire", "site"]));
        assert_eq!(s.label_at(&[4.5, 4.5], EnvHypothesis(0)), ap_sym(&s, &["site"]));
    }

    #[test]
    fn label_in_obstacle_is_obs() {
        let s = fixture();
        assert_eq!(s.label_at(&[8.5, 8.5], EnvHypothesis(0)), ap_sym(&s, &["obs"]));
        assert_eq!(s.label_at(&[-1.0, 5.0], EnvHypothesis(0)), ap_sym(&s, &["obs"]));
    }

    #[test]
    fn guards() {
        let s = fixture();
        assert!(s.guard_r(&[4.2, 4.9]));
        assert!(!s.guard_r(&[2.0, 2.0]));
        assert_eq!(s.guard_t(&[0.5, 0.5]), None);
        // Inside both sensing balls: the lower id wins.
        assert_eq!(s.guard_t(&[4.5, 3.5]), Some(0));
        assert_eq!(s.guard_t(&[4.5, 2.0]), Some(1));
    }

    #[test]
    fn likelihood_examples() {
        let s = fixture();
        let fresh = MemoryVector::EMPTY;
        let fire = EnvHypothesis(1);
        assert!((s.obs_likelihood(0, fire, fresh, 1).unwrap() - 0.8).abs() < 1e-12);
        assert!((s.obs_likelihood(0, fire, fresh, 0).unwrap() - 0.2).abs() < 1e-12);
        let visited = fresh.update(0);
        assert_eq!(s.obs_likelihood(0, fire, visited, 0).unwrap(), 0.5);
        assert_eq!(s.obs_likelihood(0, fire, visited, 1).unwrap(), 0.5);
        assert_eq!(
            s.obs_likelihood(0, fire, fresh, 2),
            Err(BeliefError::UnknownObservation { region: 0, symbol: 2 })
        );
        assert_eq!(s.observation_name(0, 1), "fire");
        assert_eq!(s.observation_name(0, 0), "!fire");
    }

    #[test]
    fn perfect_sensor() {
        let mut f = fire_fixture();
        f.observation_regions[0].accuracy = Some(1.0);
        let s = Scenario::from_file(f).unwrap();
        assert_eq!(s.obs_likelihood(0, EnvHypothesis(0), MemoryVector::EMPTY, 0).unwrap(), 1.0);
    }

    #[test]
    fn json_round_trip() {
        let s = fixture();
        let again = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(again.file, s.file);
        assert_eq!(again.hypotheses, s.hypotheses);
    }

    #[test]
    fn validation_errors() {
        let mut f = fire_fixture();
        f.initial.state = vec![8.5, 8.5];
        assert!(Scenario::from_file(f).is_err());

        let mut f = fire_fixture();
        f.regions[0].labels.push("fire".into());
        assert!(Scenario::from_file(f).is_err());

        let mut f = fire_fixture();
        f.observation_regions[0].table = Some(vec![vec![0.5, 0.4], vec![0.5, 0.5]]);
        f.observation_regions[0].accuracy = None;
        assert!(Scenario::from_file(f).is_err());

        let mut f = fire_fixture();
        f.task.formula = "F(smoke)".into();
        assert!(matches!(Scenario::from_file(f), Err(ScenarioError::Formula(_))));

        let mut f = fire_fixture();
        f.prior.independent.clear();
        assert!(Scenario::from_file(f).is_err());
    }

    #[test]
    fn default_step_tracks_narrowest_guard() {
        let s = fixture();
        assert!((s.integration_step() - 1.0 / 20.0).abs() < 1e-15);
    }
}
