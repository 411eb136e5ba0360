//! Exact optimal values for small grid worlds by backward induction.
//!
//! An instance is a grid of unit cells with 4-connected moves. Labeled
//! regions and sensors each occupy one cell. The DFA steps when a region cell
//! is entered and when an unvisited sensor cell is entered (on that cell's
//! label), mirroring the jump structure of the continuous model. Accepting
//! DFA states are absorbing.
//!
//! Beliefs are kept unnormalized: one weight per hypothesis equal to the
//! joint probability of that hypothesis and the observations so far. The
//! value of a belief is then the accepted weight summed over its outcome
//! branches, so no normalization is ever needed.
//!
//! [`OracleInstance::twin`] builds the matching continuous scenario: a planar
//! single integrator with one unit box per cell.

use std::collections::{BTreeMap, HashMap};

use serde_json::json;

use crate::error::EvalError;
use crate::ltlf::{compile_dfa, parse_ltlf, Dfa, PropositionSet, StateId, Symbol};
use crate::model::Scenario;

pub const MAX_CELLS: usize = 50;
pub const MAX_UNCERTAIN: usize = 2;
pub const MAX_HORIZON: usize = 12;
/// Memo entries allowed before giving up.
pub const STATE_BUDGET: usize = 4_000_000;

pub type Cell = (usize, usize);

const MOVES: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

#[derive(Clone, Debug, PartialEq)]
pub struct GridRegion {
    pub name: String,
    pub cell: Cell,
    pub labels: Vec<String>,
    pub uncertain: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSensor {
    pub name: String,
    pub cell: Cell,
    pub target: String,
    /// Probability of reporting the true local assignment; errors are spread
    /// evenly over the other symbols.
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleInstance {
    pub name: String,
    pub width: usize,
    pub height: usize,
    pub obstacles: Vec<Cell>,
    pub regions: Vec<GridRegion>,
    pub sensors: Vec<GridSensor>,
    /// Joint prior: the `region.prop` pairs that hold, with probability.
    pub prior: Vec<(Vec<String>, f64)>,
    pub propositions: Vec<String>,
    pub formula: String,
    pub start: Cell,
    pub horizon: usize,
}

impl OracleInstance {
    pub fn new(name: &str, width: usize, height: usize, start: Cell) -> Self {
        OracleInstance {
            name: name.into(),
            width,
            height,
            obstacles: Vec::new(),
            regions: Vec::new(),
            sensors: Vec::new(),
            prior: vec![(Vec::new(), 1.0)],
            propositions: Vec::new(),
            formula: String::new(),
            start,
            horizon: MAX_HORIZON,
        }
    }

    pub fn task(mut self, props: &[&str], formula: &str) -> Self {
        self.propositions = props.iter().map(|s| s.to_string()).collect();
        self.formula = formula.into();
        self
    }

    pub fn region(mut self, name: &str, cell: Cell, labels: &[&str], uncertain: &[&str]) -> Self {
        self.regions.push(GridRegion {
            name: name.into(),
            cell,
            labels: labels.iter().map(|s| s.to_string()).collect(),
            uncertain: uncertain.iter().map(|s| s.to_string()).collect(),
        });
        self
    }

    pub fn sensor(mut self, name: &str, cell: Cell, target: &str, accuracy: f64) -> Self {
        self.sensors.push(GridSensor {
            name: name.into(),
            cell,
            target: target.into(),
            accuracy,
        });
        self
    }

    pub fn obstacles(mut self, cells: &[Cell]) -> Self {
        self.obstacles.extend_from_slice(cells);
        self
    }

    pub fn joint_prior(mut self, entries: &[(&[&str], f64)]) -> Self {
        self.prior = entries
            .iter()
            .map(|(t, p)| (t.iter().map(|s| s.to_string()).collect(), *p))
            .collect();
        self
    }

    /// Product prior from independent marginals.
    pub fn independent_prior(mut self, marginals: &[(&str, f64)]) -> Self {
        let mut joint: Vec<(Vec<String>, f64)> = vec![(Vec::new(), 1.0)];
        for &(pair, p) in marginals {
            joint = joint
                .into_iter()
                .flat_map(|(t, q)| {
                    let mut with = t.clone();
                    with.push(pair.to_string());
                    [(with, q * p), (t, q * (1.0 - p))]
                })
                .filter(|(_, q)| *q > 0.0)
                .collect();
        }
        self.prior = joint;
        self
    }

    pub fn with_horizon(mut self, h: usize) -> Self {
        self.horizon = h;
        self
    }

    /// The continuous twin as a scenario document.
    pub fn twin_json(&self) -> serde_json::Value {
        let cell_box = |(i, j): Cell| {
            json!({ "type": "box", "lower": [i as f64, j as f64], "upper": [i as f64 + 1.0, j as f64 + 1.0] })
        };
        let accuracy_of = |s: &GridSensor| s.accuracy;
        json!({
            "name": self.name,
            "workspace": {
                "state_space": { "lower": [0.0, 0.0], "upper": [self.width as f64, self.height as f64] },
                "control_space": { "lower": [-1.0, -1.0], "upper": [1.0, 1.0] },
                "obstacles": self.obstacles.iter().map(|&c| cell_box(c)).collect::<Vec<_>>(),
            },
            "dynamics": { "model": "single_integrator", "dim": 2 },
            "regions": self.regions.iter().map(|r| json!({
                "name": r.name, "shape": cell_box(r.cell), "labels": r.labels, "uncertain": r.uncertain,
            })).collect::<Vec<_>>(),
            "observation_regions": self.sensors.iter().map(|s| json!({
                "name": s.name, "shape": cell_box(s.cell), "target": s.target, "accuracy": accuracy_of(s),
            })).collect::<Vec<_>>(),
            "prior": {
                "joint": self.prior.iter().map(|(t, p)| json!({ "true": t, "probability": p })).collect::<Vec<_>>(),
            },
            "task": { "propositions": self.propositions, "formula": self.formula },
            "initial": { "state": [self.start.0 as f64 + 0.5, self.start.1 as f64 + 0.5] },
            "planning": { "t_prop_max": 1.0 },
        })
    }

    pub fn twin(&self) -> Result<Scenario, EvalError> {
        Ok(Scenario::from_json(&self.twin_json().to_string())?)
    }
}

/// Compiled form used by the search.
struct Grid {
    width: usize,
    height: usize,
    blocked: Vec<bool>,
    /// Region id per cell.
    region: Vec<Option<usize>>,
    /// Sensor id per cell.
    sensor: Vec<Option<usize>>,
    certain: Vec<Symbol>,
    /// Per region: (proposition, hypothesis bit).
    uncertain: Vec<Vec<(usize, usize)>>,
    /// Per sensor: target region and accuracy.
    sensors: Vec<(usize, f64)>,
    hypotheses: Vec<u32>,
    prior: Vec<f64>,
    dfa: Dfa,
}

impl Grid {
    fn build(inst: &OracleInstance) -> Result<Self, EvalError> {
        let bad = |m: String| EvalError::BudgetExceeded(format!("{}: {m}", inst.name));
        let cells = inst.width * inst.height;
        if cells == 0 || cells > MAX_CELLS {
            return Err(bad(format!("{cells} cells (at most {MAX_CELLS})")));
        }
        if inst.horizon > MAX_HORIZON {
            return Err(bad(format!("horizon {} (at most {MAX_HORIZON})", inst.horizon)));
        }
        let ap = PropositionSet::new(inst.propositions.iter().cloned()).map_err(|m| bad(m))?;
        let formula = parse_ltlf(&inst.formula, &ap).map_err(|e| bad(e.to_string()))?;
        let dfa = compile_dfa(&formula, &ap).map_err(|e| bad(e.to_string()))?;
        let prop = |name: &str| ap.index_of(name).ok_or_else(|| bad(format!("unknown proposition '{name}'")));
        let index = |(i, j): Cell| -> Result<usize, EvalError> {
            if i < inst.width && j < inst.height {
                Ok(j * inst.width + i)
            } else {
                Err(bad(format!("cell ({i}, {j}) outside the grid")))
            }
        };

        let mut blocked = vec![false; cells];
        for &c in &inst.obstacles {
            blocked[index(c)?] = true;
        }
        let mut region = vec![None; cells];
        let mut certain = Vec::new();
        let mut uncertain = Vec::new();
        let mut pairs: Vec<String> = Vec::new();
        for (id, r) in inst.regions.iter().enumerate() {
            region[index(r.cell)?] = Some(id);
            let mut sym = Symbol::EMPTY;
            for l in &r.labels {
                sym = sym.with(prop(l)?);
            }
            certain.push(sym);
            let mut u = Vec::new();
            for l in &r.uncertain {
                u.push((prop(l)?, pairs.len()));
                pairs.push(format!("{}.{l}", r.name));
            }
            uncertain.push(u);
        }
        if pairs.len() > MAX_UNCERTAIN {
            return Err(bad(format!("{} uncertain pairs (at most {MAX_UNCERTAIN})", pairs.len())));
        }
        let mut sensor = vec![None; cells];
        let mut sensors = Vec::new();
        for (id, s) in inst.sensors.iter().enumerate() {
            sensor[index(s.cell)?] = Some(id);
            let target = inst
                .regions
                .iter()
                .position(|r| r.name == s.target)
                .ok_or_else(|| bad(format!("sensor '{}' targets unknown region", s.name)))?;
            sensors.push((target, s.accuracy));
        }
        let mut joint: BTreeMap<u32, f64> = BTreeMap::new();
        for (truths, p) in &inst.prior {
            let mut e = 0u32;
            for t in truths {
                let bit = pairs
                    .iter()
                    .position(|q| q == t)
                    .ok_or_else(|| bad(format!("prior names unknown pair '{t}'")))?;
                e |= 1 << bit;
            }
            *joint.entry(e).or_default() += p;
        }
        Ok(Grid {
            width: inst.width,
            height: inst.height,
            blocked,
            region,
            sensor,
            certain,
            uncertain,
            sensors,
            hypotheses: joint.keys().copied().collect(),
            prior: joint.values().copied().collect(),
            dfa,
        })
    }

    fn label(&self, cell: usize, e: u32) -> Symbol {
        match self.region[cell] {
            None => Symbol::EMPTY,
            Some(r) => self.uncertain[r]
                .iter()
                .filter(|&&(_, bit)| e >> bit & 1 == 1)
                .fold(self.certain[r], |s, &(p, _)| s.with(p)),
        }
    }

    fn neighbors(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = ((cell % self.width) as i64, (cell / self.width) as i64);
        MOVES.iter().filter_map(move |&(di, dj)| {
            let (a, b) = (i + di, j + dj);
            if a < 0 || b < 0 || a >= self.width as i64 || b >= self.height as i64 {
                return None;
            }
            let c = b as usize * self.width + a as usize;
            (!self.blocked[c]).then_some(c)
        })
    }

    /// `Z(o | e)` for an unvisited sensor.
    fn likelihood(&self, sensor: usize, e: u32, o: usize) -> f64 {
        let (target, a) = self.sensors[sensor];
        let bits = &self.uncertain[target];
        let n = 1usize << bits.len();
        let truth = bits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (k, &(_, bit))| acc | (((e >> bit) & 1) as usize) << k);
        if o == truth {
            a
        } else {
            (1.0 - a) / (n - 1) as f64
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Key {
    cell: usize,
    memory: u64,
    h: usize,
    q: Vec<StateId>,
    w: Vec<u64>,
}

struct Search<'a> {
    g: &'a Grid,
    memo: HashMap<Key, f64>,
}

impl Search<'_> {
    fn accepted(&self, q: &[StateId], w: &[f64]) -> f64 {
        q.iter().zip(w).filter(|(q, _)| self.g.dfa.is_accepting(**q)).map(|(_, w)| w).sum()
    }

    fn value(&mut self, cell: usize, memory: u64, h: usize, q: Vec<StateId>, w: Vec<f64>) -> Result<f64, EvalError> {
        let acc = self.accepted(&q, &w);
        let open: f64 = q
            .iter()
            .zip(&w)
            .filter(|(q, _)| !self.g.dfa.is_accepting(**q) && !self.g.dfa.is_trap(**q))
            .map(|(_, w)| w)
            .sum();
        if h == 0 || open == 0.0 {
            return Ok(acc);
        }
        let key = Key {
            cell,
            memory,
            h,
            q: q.clone(),
            w: w.iter().map(|x| x.to_bits()).collect(),
        };
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        if self.memo.len() >= STATE_BUDGET {
            return Err(EvalError::BudgetExceeded(format!("more than {STATE_BUDGET} belief states")));
        }
        let mut best = acc;
        let next: Vec<usize> = self.g.neighbors(cell).collect();
        for c in next {
            let v = self.enter(c, memory, h - 1, &q, &w)?;
            if v > best {
                best = v;
            }
        }
        self.memo.insert(key, best);
        Ok(best)
    }

    fn enter(&mut self, c: usize, memory: u64, h: usize, q: &[StateId], w: &[f64]) -> Result<f64, EvalError> {
        let g = self.g;
        let fresh_sensor = g.sensor[c].filter(|&s| memory >> s & 1 == 0);
        let jumps = g.region[c].is_some() || fresh_sensor.is_some();
        let q2: Vec<StateId> = if jumps {
            q.iter()
                .zip(&g.hypotheses)
                .map(|(&q, &e)| if g.dfa.is_accepting(q) { q } else { g.dfa.step(q, g.label(c, e)) })
                .collect()
        } else {
            q.to_vec()
        };
        match fresh_sensor {
            None => self.value(c, memory, h, q2, w.to_vec()),
            Some(s) => {
                let n = 1usize << g.uncertain[g.sensors[s].0].len();
                let mut total = 0.0;
                for o in 0..n {
                    let w2: Vec<f64> = w
                        .iter()
                        .zip(&g.hypotheses)
                        .map(|(&w, &e)| w * g.likelihood(s, e, o))
                        .collect();
                    if w2.iter().any(|&x| x > 0.0) {
                        total += self.value(c, memory | 1 << s, h, q2.clone(), w2)?;
                    }
                }
                Ok(total)
            }
        }
    }
}

/// Exact optimal probability of satisfying the task within the instance's
/// move horizon.
pub fn oracle_optimal_value(inst: &OracleInstance) -> Result<f64, EvalError> {
    let g = Grid::build(inst)?;
    let start = inst.start.1 * inst.width + inst.start.0;
    if inst.start.0 >= inst.width || inst.start.1 >= inst.height || g.blocked[start] {
        return Err(EvalError::BudgetExceeded(format!("{}: invalid start cell", inst.name)));
    }
    // The start cell's label is read once, as for the continuous initial belief.
    let q0: Vec<StateId> = g
        .hypotheses
        .iter()
        .map(|&e| g.dfa.step(g.dfa.initial(), g.label(start, e)))
        .collect();
    let mut search = Search {
        g: &g,
        memo: HashMap::new(),
    };
    search.value(start, 0, inst.horizon, q0, g.prior.clone())
}

/// The ten reference instances used for soundness and convergence checks.
pub fn suite() -> Vec<OracleInstance> {
    let exits = |name: &str| {
        OracleInstance::new(name, 5, 3, (2, 0))
            .task(&["exit", "good"], "F(exit) & G(exit -> good)")
            .region("left", (0, 2), &["exit"], &["good"])
            .region("right", (4, 2), &["exit"], &["good"])
    };
    let gates = |name: &str| {
        OracleInstance::new(name, 5, 3, (0, 1))
            .task(&["haz", "goal"], "!haz U goal")
            .obstacles(&[(2, 1)])
            .region("gate_low", (2, 0), &[], &["haz"])
            .region("gate_high", (2, 2), &[], &["haz"])
            .region("goal", (4, 1), &["goal"], &[])
            .independent_prior(&[("gate_low.haz", 0.5), ("gate_high.haz", 0.3)])
    };
    vec![
        OracleInstance::new("reach", 5, 4, (0, 0))
            .task(&["goal"], "F(goal)")
            .region("goal", (4, 3), &["goal"], &[]),
        OracleInstance::new("detour", 5, 4, (0, 0))
            .task(&["haz", "goal"], "!haz U goal")
            .region("haz_1", (2, 0), &["haz"], &[])
            .region("haz_2", (2, 1), &["haz"], &[])
            .region("goal", (4, 0), &["goal"], &[]),
        exits("blind_commit").joint_prior(&[(&["left.good"], 0.7), (&["right.good"], 0.3)]),
        exits("sense_commit")
            .sensor("look", (2, 2), "left", 0.8)
            .joint_prior(&[(&["left.good"], 0.5), (&["right.good"], 0.5)]),
        exits("weak_sensor")
            .sensor("look", (2, 2), "left", 0.65)
            .joint_prior(&[(&["left.good"], 0.7), (&["right.good"], 0.3)]),
        exits("two_sensors")
            .sensor("look_left", (1, 1), "left", 0.8)
            .sensor("look_right", (3, 1), "right", 0.8)
            .independent_prior(&[("left.good", 0.5), ("right.good", 0.4)]),
        gates("gates"),
        gates("gates_sensed").sensor("look_high", (0, 2), "gate_high", 0.9),
        OracleInstance::new("key_door", 5, 3, (1, 1))
            .task(
                &["key", "correctkey", "door"],
                "F(door) & (!door U correctkey) & G(key -> correctkey)",
            )
            .region("key_1", (0, 2), &["key"], &["correctkey"])
            .region("key_2", (4, 2), &["key"], &["correctkey"])
            .region("door", (2, 0), &["door"], &[])
            .sensor("look_1", (2, 2), "key_1", 1.0)
            .joint_prior(&[(&["key_1.correctkey"], 0.6), (&["key_2.correctkey"], 0.4)]),
        OracleInstance::new("sequence", 3, 3, (1, 1))
            .task(&["a", "b"], "F(a & F(b))")
            .region("a_1", (0, 2), &[], &["a"])
            .region("a_2", (2, 2), &[], &["a"])
            .region("b", (1, 0), &["b"], &[])
            .independent_prior(&[("a_1.a", 0.6), ("a_2.a", 0.5)]),
    ]
}
