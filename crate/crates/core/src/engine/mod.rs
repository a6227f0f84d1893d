//! Forward interval analysis over lowered functions.

mod dump;
mod events;
mod transfer;
mod worklist;

use std::collections::BTreeSet;

pub use dump::dump_states;
pub use events::{AnalysisEvent, ConditionSite, EventKind, Named};
pub use transfer::IntervalFlow;
pub use worklist::{run_worklist, Convergence, Flow, Lattice, WorklistConfig};

use crate::cfg::{lower_contract, reverse_post_order, BlockId, Cfg, Terminator, VarId};
use crate::domain::{AbstractState, AbstractValue, Domain, Interval};
use crate::error::Result;
use crate::frontend::ast::ContractDef;
use crate::frontend::{SymbolTable, Ty};
use transfer::Trace;

/// Fixpoint states of one function plus the events seen on reachable paths.
#[derive(Debug, Clone)]
pub struct AnalysisResult {
    pub function: String,
    pub block_in: Vec<AbstractState>,
    pub block_out: Vec<AbstractState>,
    /// State before each instruction, indexed like `cfg.blocks[b].instrs`.
    pub instr_in: Vec<Vec<AbstractState>>,
    /// Join of the states leaving the function normally.
    pub exit_state: AbstractState,
    pub events: Vec<AnalysisEvent>,
    pub convergence: Convergence,
}

impl AnalysisResult {
    /// State after instruction `i` of block `b`.
    pub fn instr_out(&self, b: BlockId, i: usize) -> &AbstractState {
        self.instr_in[b].get(i + 1).unwrap_or(&self.block_out[b])
    }
}

/// Runs the fixpoint from `initial`, then replays every block once to
/// collect per-instruction states and events.
pub fn analyze_function(cfg: &Cfg, initial: AbstractState, config: WorklistConfig) -> Result<AnalysisResult> {
    let flow = IntervalFlow::new(cfg);
    let (block_in, convergence) = run_worklist(cfg, initial, &flow, config)?;
    let n = cfg.blocks.len();
    let mut trace = Trace::default();
    let mut instr_in = vec![Vec::new(); n];
    let mut block_out = vec![AbstractState::bottom(); n];
    for b in reverse_post_order(cfg) {
        trace.instr_in.clear();
        block_out[b] = flow.run_block(b, &block_in[b], Some(&mut trace));
        instr_in[b] = std::mem::take(&mut trace.instr_in);
    }
    let exit_state = cfg
        .blocks
        .iter()
        .enumerate()
        .filter(|(_, blk)| blk.term == Terminator::Exit)
        .fold(AbstractState::bottom(), |acc, (b, _)| acc.join(&block_out[b]));
    Ok(AnalysisResult { function: cfg.function.clone(), block_in, block_out, instr_in, exit_state, events: trace.events, convergence })
}

/// Every function of a contract with its analysis. The constructor comes
/// first.
#[derive(Debug, Clone)]
pub struct ContractAnalysis {
    pub name: String,
    pub cfgs: Vec<Cfg>,
    pub results: Vec<AnalysisResult>,
}

fn msg_value(cfg: &Cfg) -> AbstractValue {
    let itv = if cfg.payable { Domain::Uint(256).top() } else { Interval::singleton(0) };
    AbstractValue::scalar(itv, Domain::Uint(256))
}

fn entry_state(cfg: &Cfg, state_vars: impl IntoIterator<Item = (VarId, AbstractValue)>) -> AbstractState {
    let mut s = AbstractState::new();
    for (v, value) in state_vars {
        s.set(v, value);
    }
    s.set(VarId::MsgSender, AbstractValue::top_value(&Ty::Address));
    s.set(VarId::MsgValue, msg_value(cfg));
    for &p in &cfg.params {
        s.set(p, AbstractValue::top_value(cfg.var_type(p)));
    }
    s
}

/// Analyzes the constructor from zero-initialized storage, then every other
/// function. A state variable some function writes may hold anything that
/// function could have stored, so it starts as the join of its
/// post-constructor value and Top; others keep their post-constructor value.
pub fn analyze_contract(contract: &ContractDef, symbols: &SymbolTable, config: WorklistConfig) -> Result<ContractAnalysis> {
    let cfgs = lower_contract(contract, symbols)?;
    let ctor = &cfgs[0];
    let state_ids: Vec<VarId> = (0..ctor.state_vars.len() as u32).map(VarId::State).collect();
    let defaults = state_ids.iter().map(|&v| (v, AbstractValue::default_value(ctor.var_type(v))));
    let mut results = vec![analyze_function(ctor, entry_state(ctor, defaults), config)?];

    let after = &results[0].exit_state;
    let written: BTreeSet<VarId> = cfgs[1..]
        .iter()
        .flat_map(|c| c.blocks.iter().flat_map(|b| b.instrs.iter()))
        .filter_map(|i| i.kind.dest().map(|d| d.base))
        .filter(|v| matches!(v, VarId::State(_)))
        .collect();
    let storage: Vec<(VarId, AbstractValue)> = state_ids
        .iter()
        .map(|&v| {
            let ty = ctor.var_type(v);
            let post = after.get(v).cloned().unwrap_or_else(|| AbstractValue::default_value(ty));
            let start = if written.contains(&v) { post.join(&AbstractValue::top_value(ty)) } else { post };
            (v, start)
        })
        .collect();

    for cfg in &cfgs[1..] {
        results.push(analyze_function(cfg, entry_state(cfg, storage.iter().cloned()), config)?);
    }
    Ok(ContractAnalysis { name: contract.name.name.clone(), cfgs, results })
}
