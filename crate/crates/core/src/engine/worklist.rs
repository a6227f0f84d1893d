use std::collections::BTreeSet;

use crate::cfg::{reverse_post_order, BlockId, Cfg, EdgeKind};
use crate::error::{Error, Result};

/// The order function slot: a join-semilattice.
pub trait Lattice: Clone {
    fn bottom() -> Self;
    fn join(&self, other: &Self) -> Self;
    fn leq(&self, other: &Self) -> bool;
}

/// The flow function slot: how facts cross a block and then an edge, and how
/// loop heads are widened.
pub trait Flow {
    type State: Lattice;
    fn block(&self, block: BlockId, input: &Self::State) -> Self::State;
    fn edge(&self, from: BlockId, kind: EdgeKind, out: &Self::State) -> Self::State;
    fn widen(&self, old: &Self::State, new: &Self::State) -> Self::State;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorklistConfig {
    /// Visits of a loop header after which joins there become widenings.
    pub widen_delay: u32,
    pub max_visits: u32,
}

impl Default for WorklistConfig {
    fn default() -> Self {
        WorklistConfig { widen_delay: 3, max_visits: 1000 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Convergence {
    /// Blocks processed.
    pub iterations: u32,
    pub widenings: u32,
    pub visits: Vec<u32>,
}

/// Forward worklist fixpoint from the entry block. Returns the in-state of
/// every block. The next block is always the pending one earliest in reverse
/// post-order.
pub fn run_worklist<F: Flow>(cfg: &Cfg, initial: F::State, flow: &F, config: WorklistConfig) -> Result<(Vec<F::State>, Convergence)> {
    let n = cfg.blocks.len();
    let rpo = reverse_post_order(cfg);
    let mut priority = vec![usize::MAX; n];
    for (i, b) in rpo.iter().enumerate() {
        priority[*b] = i;
    }
    let mut states = vec![F::State::bottom(); n];
    states[Cfg::ENTRY] = initial;
    let mut stats = Convergence { visits: vec![0; n], ..Default::default() };
    let mut worklist = BTreeSet::from([(priority[Cfg::ENTRY], Cfg::ENTRY)]);

    while let Some((_, b)) = worklist.pop_first() {
        stats.visits[b] += 1;
        stats.iterations += 1;
        if stats.visits[b] > config.max_visits {
            return Err(Error::IterationLimitExceeded { function: cfg.function.clone(), block: b, visits: stats.visits[b] as usize });
        }
        let out = flow.block(b, &states[b]);
        for (succ, kind) in cfg.blocks[b].successors() {
            let candidate = flow.edge(b, kind, &out);
            let old = &states[succ];
            let mut new = old.join(&candidate);
            if cfg.loop_headers.contains(&succ) && stats.visits[succ] >= config.widen_delay {
                new = flow.widen(old, &new);
                stats.widenings += 1;
            }
            if !new.leq(old) {
                states[succ] = new;
                worklist.insert((priority[succ], succ));
            }
        }
    }
    Ok((states, stats))
}
