//! Uniform-grid nearest-neighbour index over node positions.

use rand::Rng;

use crate::model::Bounds;
use crate::tree::NodeId;

const MAX_DIM: usize = 3;

pub struct SpatialIndex {
    lower: [f64; MAX_DIM],
    cell: f64,
    shape: [usize; MAX_DIM],
    dim: usize,
    cells: Vec<Vec<(NodeId, [f64; MAX_DIM])>>,
}

impl SpatialIndex {
    /// Roughly `target_cells` cells over `bounds`, cubic cells.
    pub fn new(bounds: &Bounds, target_cells: usize) -> Self {
        let dim = bounds.dim().min(MAX_DIM);
        let volume: f64 = (0..dim).map(|i| bounds.width(i)).product();
        let cell = (volume / target_cells.max(1) as f64).powf(1.0 / dim as f64);
        let mut lower = [0.0; MAX_DIM];
        let mut shape = [1; MAX_DIM];
        for i in 0..dim {
            lower[i] = bounds.lower[i];
            shape[i] = ((bounds.width(i) / cell).ceil() as usize).max(1);
        }
        SpatialIndex {
            lower,
            cell,
            shape,
            dim,
            cells: vec![Vec::new(); shape.iter().product()],
        }
    }

    fn coords(&self, p: &[f64]) -> [usize; MAX_DIM] {
        let mut c = [0; MAX_DIM];
        for i in 0..self.dim {
            let k = ((p[i] - self.lower[i]) / self.cell).floor();
            c[i] = if k.is_finite() { (k.max(0.0) as usize).min(self.shape[i] - 1) } else { 0 };
        }
        c
    }

    fn flat(&self, c: [usize; MAX_DIM]) -> usize {
        c[0] + self.shape[0] * (c[1] + self.shape[1] * c[2])
    }

    fn point(&self, p: &[f64]) -> [f64; MAX_DIM] {
        let mut out = [0.0; MAX_DIM];
        out[..self.dim].copy_from_slice(&p[..self.dim]);
        out
    }

    pub fn insert(&mut self, id: NodeId, p: &[f64]) {
        let c = self.coords(p);
        let f = self.flat(c);
        let pt = self.point(p);
        self.cells[f].push((id, pt));
    }

    /// Nearest entry accepted by `keep`; uniform random among exact ties.
    pub fn nearest<R: Rng>(&self, p: &[f64], keep: impl Fn(NodeId) -> bool, rng: &mut R) -> Option<NodeId> {
        let q = self.point(p);
        let c = self.coords(p);
        let max_ring = *self.shape.iter().max().unwrap();
        let mut best = f64::INFINITY;
        let mut ties: Vec<NodeId> = Vec::new();
        for ring in 0..=max_ring {
            let lo = |i: usize| c[i].saturating_sub(ring);
            let hi = |i: usize| (c[i] + ring).min(self.shape[i] - 1);
            for z in lo(2)..=hi(2) {
                for y in lo(1)..=hi(1) {
                    for x in lo(0)..=hi(0) {
                        let cheb = [x.abs_diff(c[0]), y.abs_diff(c[1]), z.abs_diff(c[2])];
                        if *cheb.iter().max().unwrap() != ring {
                            continue;
                        }
                        for &(id, pt) in &self.cells[self.flat([x, y, z])] {
                            if !keep(id) {
                                continue;
                            }
                            let d: f64 = (0..self.dim).map(|i| (pt[i] - q[i]) * (pt[i] - q[i])).sum();
                            if d < best {
                                best = d;
                                ties.clear();
                                ties.push(id);
                            } else if d == best {
                                ties.push(id);
                            }
                        }
                    }
                }
            }
            // Everything beyond this ring is at least `ring * cell` away.
            let reach = ring as f64 * self.cell;
            if !ties.is_empty() && best < reach * reach {
                break;
            }
        }
        match ties.len() {
            0 => None,
            1 => Some(ties[0]),
            n => Some(ties[rng.gen_range(0..n)]),
        }
    }
}
