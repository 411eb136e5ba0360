//! Anytime policy synthesis: the bandit-guided planner and two baselines
//! sharing its tree, belief, and propagation machinery.

mod mcts;
mod rrt;
mod sabpi;
mod spatial;

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::artifact::PolicyArtifact;
use crate::belief::HybridBelief;
use crate::model::{Scenario, StateVec};
use crate::propagate::{propagate, Outcome};
use crate::tree::{NewChild, NodeId, PolicyTree};

pub use spatial::SpatialIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Sabpi,
    Rrt,
    MctsPw,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Sabpi, Algorithm::Rrt, Algorithm::MctsPw];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sabpi => "sabpi",
            Algorithm::Rrt => "rrt",
            Algorithm::MctsPw => "mcts-pw",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sabpi" => Ok(Algorithm::Sabpi),
            "rrt" => Ok(Algorithm::Rrt),
            "mcts-pw" | "mcts_pw" => Ok(Algorithm::MctsPw),
            other => Err(format!("unknown algorithm '{other}' (expected sabpi, rrt or mcts-pw)")),
        }
    }
}

/// How an expansion node is drawn from the current policy subtree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Uniformly among expandable nodes.
    Uniform,
    /// Nearest expandable node to a uniformly sampled position.
    Voronoi,
    /// A uniformly drawn discrete belief mode (automaton distribution and
    /// sensing memory), then Voronoi among that mode's nodes.
    HybridVoronoi,
}

impl std::str::FromStr for Selection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uniform" => Ok(Selection::Uniform),
            "voronoi" => Ok(Selection::Voronoi),
            "hybrid-voronoi" => Ok(Selection::HybridVoronoi),
            other => Err(format!("unknown selection '{other}' (expected uniform, voronoi or hybrid-voronoi)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    pub algorithm: Algorithm,
    /// Expansions per selected policy subtree.
    pub k: usize,
    /// UCB exploration constant.
    pub c: f64,
    /// Wall-clock budget in seconds.
    pub time_limit: f64,
    /// Optional cap on outer iterations; makes runs independent of timing.
    pub max_iterations: Option<u64>,
    pub success_threshold: f64,
    pub seed: u64,
    pub selection: Selection,
    /// Progressive widening: a node with `N` visits admits `k_w * N^alpha_w` arms.
    pub widening_k: f64,
    pub widening_alpha: f64,
    /// UCB constant for the MCTS baseline's sampled returns.
    pub mcts_c: f64,
    /// Random controls applied in an MCTS rollout.
    pub rollout_depth: usize,
    /// Memory guard; planning stops when the tree reaches this many nodes.
    pub max_nodes: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            algorithm: Algorithm::Sabpi,
            k: 1000,
            c: 0.05,
            time_limit: 60.0,
            max_iterations: None,
            success_threshold: 1.0,
            seed: 0,
            selection: Selection::HybridVoronoi,
            widening_k: 2.0,
            widening_alpha: 0.5,
            mcts_c: std::f64::consts::FRAC_1_SQRT_2,
            rollout_depth: 10,
            max_nodes: 4_000_000,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.k == 0 {
            return Err("k must be at least 1".into());
        }
        if !(self.c >= 0.0 && self.mcts_c >= 0.0) {
            return Err("exploration constants must be non-negative".into());
        }
        if !(0.0..=1.0).contains(&self.success_threshold) {
            return Err("success_threshold must lie in [0, 1]".into());
        }
        if !(self.time_limit >= 0.0) {
            return Err("time_limit must be non-negative".into());
        }
        if !(self.widening_k > 0.0 && self.widening_alpha > 0.0 && self.widening_alpha <= 1.0) {
            return Err("widening parameters must satisfy k_w > 0, 0 < alpha_w <= 1".into());
        }
        Ok(())
    }

    /// Arms admitted at a node with `visits` visits under progressive widening.
    pub fn widening_limit(&self, visits: u64) -> usize {
        (self.widening_k * (visits as f64).powf(self.widening_alpha)).floor().max(1.0) as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnytimeSample {
    pub time: f64,
    pub iteration: u64,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    TimeLimit,
    IterationLimit,
    Solved,
    Threshold,
    NodeLimit,
    /// No expandable node remains.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub scenario: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub value: f64,
    pub iterations: u64,
    pub expansions: u64,
    pub nodes: usize,
    pub wall_time: f64,
    pub termination: Termination,
    pub anytime: Vec<AnytimeSample>,
}

impl PlanReport {
    /// The report without wall-clock fields, for reproducibility checks.
    pub fn timeless(&self) -> PlanReport {
        let mut r = self.clone();
        r.wall_time = 0.0;
        for s in &mut r.anytime {
            s.time = 0.0;
        }
        r
    }
}

pub struct PlanOutput {
    pub tree: PolicyTree,
    pub policy: PolicyArtifact,
    pub report: PlanReport,
}

/// Runs the configured algorithm.
pub fn plan(s: &Scenario, cfg: &PlannerConfig) -> PlanOutput {
    plan_with_observer(s, cfg, |_, _| {})
}

/// As [`plan`], calling `observer(tree, iteration)` after every outer
/// iteration (every simulation for MCTS).
pub fn plan_with_observer(s: &Scenario, cfg: &PlannerConfig, observer: impl FnMut(&PolicyTree, u64)) -> PlanOutput {
    cfg.validate().expect("invalid planner configuration");
    let mut run = Run::new(s, cfg);
    let termination = match cfg.algorithm {
        Algorithm::Sabpi => sabpi::run(&mut run, observer),
        Algorithm::Rrt => rrt::run(&mut run, observer),
        Algorithm::MctsPw => mcts::run(&mut run, observer),
    };
    run.finish(termination)
}

/// State shared by all algorithms during one planning run.
pub(crate) struct Run<'a> {
    pub s: &'a Scenario,
    pub cfg: &'a PlannerConfig,
    pub tree: PolicyTree,
    pub rng: rand_chacha::ChaCha8Rng,
    pub start: Instant,
    pub iterations: u64,
    pub expansions: u64,
    pub anytime: Vec<AnytimeSample>,
}

impl<'a> Run<'a> {
    fn new(s: &'a Scenario, cfg: &'a PlannerConfig) -> Self {
        use rand::SeedableRng;
        let tree = PolicyTree::new(HybridBelief::initial(s), Arc::new(s.dfa.clone()));
        let v0 = tree.root().value;
        Run {
            s,
            cfg,
            tree,
            rng: rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed),
            start: Instant::now(),
            iterations: 0,
            expansions: 0,
            anytime: vec![AnytimeSample {
                time: 0.0,
                iteration: 0,
                value: v0,
            }],
        }
    }

    pub fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    pub fn out_of_time(&self) -> bool {
        self.elapsed() >= self.cfg.time_limit
    }

    /// Checked between iterations.
    pub fn termination(&self) -> Option<Termination> {
        let root = self.tree.root();
        if root.solved {
            return Some(Termination::Solved);
        }
        if root.value >= self.cfg.success_threshold {
            return Some(Termination::Threshold);
        }
        if !root.is_expandable() {
            return Some(Termination::Exhausted);
        }
        if self.cfg.max_iterations.is_some_and(|m| self.iterations >= m) {
            return Some(Termination::IterationLimit);
        }
        if self.tree.len() >= self.cfg.max_nodes {
            return Some(Termination::NodeLimit);
        }
        if self.out_of_time() {
            return Some(Termination::TimeLimit);
        }
        None
    }

    /// Records an anytime sample if the root value improved.
    pub fn sample(&mut self) {
        let v = self.tree.root().value;
        if v > self.anytime.last().map_or(f64::NEG_INFINITY, |a| a.value) {
            let time = self.elapsed();
            self.anytime.push(AnytimeSample {
                time,
                iteration: self.iterations,
                value: v,
            });
        }
    }

    pub fn sample_control(&mut self) -> (StateVec, f64) {
        sample_control(self.s, &mut self.rng)
    }

    /// Uniform position inside the state box's position sub-space.
    pub fn sample_position(&mut self) -> StateVec {
        let b = &self.s.state_bounds;
        self.s
            .position_dims()
            .iter()
            .map(|&d| self.rng.gen_range(b.lower[d]..=b.upper[d]))
            .collect()
    }

    /// One propagation from `node`; see [`expand`].
    pub fn expand(&mut self, node: NodeId, u: StateVec, t_req: f64) -> Option<Vec<NodeId>> {
        self.expansions += 1;
        expand(&mut self.tree, self.s, node, u, t_req)
    }

    fn finish(mut self, termination: Termination) -> PlanOutput {
        self.sample();
        let wall_time = self.elapsed();
        let value = self.tree.root().value;
        let last = *self.anytime.last().unwrap();
        if last.iteration != self.iterations {
            self.anytime.push(AnytimeSample {
                time: wall_time,
                iteration: self.iterations,
                value,
            });
        }
        let policy = PolicyArtifact::from_tree(&self.tree, self.s, self.cfg.algorithm.name());
        let report = PlanReport {
            scenario: self.s.name.clone(),
            algorithm: self.cfg.algorithm,
            seed: self.cfg.seed,
            value,
            iterations: self.iterations,
            expansions: self.expansions,
            nodes: self.tree.len(),
            wall_time,
            termination,
            anytime: self.anytime,
        };
        PlanOutput {
            tree: self.tree,
            policy,
            report,
        }
    }
}

/// Uniform control from the control box and duration from `(0, t_prop_max]`.
pub fn sample_control<R: Rng>(s: &Scenario, rng: &mut R) -> (StateVec, f64) {
    let b = &s.control_bounds;
    let u = (0..b.dim()).map(|i| rng.gen_range(b.lower[i]..=b.upper[i])).collect();
    let t = s.planning.t_prop_max * (1.0 - rng.gen::<f64>());
    (u, t)
}

/// The children an arm produces, or `None` when the propagation yields no
/// usable outcome.
pub fn arm_children(s: &Scenario, belief: &HybridBelief, outcome: Outcome, x_end: StateVec) -> Option<Vec<NewChild>> {
    let moved = belief.with_state(x_end);
    let single = |b: HybridBelief| {
        Some(vec![NewChild {
            prob: 1.0,
            belief: b,
            observation: None,
        }])
    };
    match outcome {
        Outcome::FullDuration => single(moved),
        Outcome::HitRegion(_) => single(moved.region_jump(s)),
        Outcome::HitObservation(r) => {
            let outs = moved.observation_outcomes(s, r).ok()?;
            Some(
                outs.into_iter()
                    .map(|o| NewChild {
                        prob: o.probability,
                        belief: o.belief,
                        observation: Some((r, o.symbol)),
                    })
                    .collect(),
            )
        }
        // Under a task that forbids the obstacle label, the collision state
        // is a trap: keep it so the arm's zero value is accounted for.
        // Otherwise the motion is simply infeasible.
        Outcome::Collided | Outcome::LeftBounds => {
            let jumped = moved.region_jump(s);
            if jumped.is_doomed(&s.dfa) {
                single(jumped)
            } else {
                None
            }
        }
        Outcome::Degenerate => None,
    }
}

/// Propagates from `node` under `(u, t_req)` and, if the outcome is usable,
/// adds the arm and backs up values. Returns the new child ids.
pub fn expand(tree: &mut PolicyTree, s: &Scenario, node: NodeId, u: StateVec, t_req: f64) -> Option<Vec<NodeId>> {
    let belief = &tree.node(node).belief;
    let r = propagate(s, &belief.x, belief.memory, &u, t_req);
    let children = arm_children(s, belief, r.outcome, r.x_end)?;
    Some(tree.add_arm(node, u, t_req, r.t_actual, r.outcome, children))
}
