//! Three-address IR and per-function control-flow graphs.

mod ir;
mod lower;

use std::fmt::Write;

pub use ir::*;
pub use lower::{lower_constructor, lower_contract, lower_function};

/// Reverse post-order from the entry, visiting true successors before false
/// ones. Deterministic for a given graph.
pub fn reverse_post_order(cfg: &Cfg) -> Vec<BlockId> {
    let n = cfg.blocks.len();
    let mut visited = vec![false; n];
    let mut post = Vec::with_capacity(n);
    // iterative DFS: (block, index of next successor to explore)
    let mut stack = vec![(Cfg::ENTRY, 0usize)];
    visited[Cfg::ENTRY] = true;
    while let Some((b, i)) = stack.pop() {
        let succs = cfg.blocks[b].successors();
        if let Some(&(s, _)) = succs.get(i) {
            stack.push((b, i + 1));
            if !visited[s] {
                visited[s] = true;
                stack.push((s, 0));
            }
        } else {
            post.push(b);
        }
    }
    post.reverse();
    post
}

/// Checks the structural invariants of a lowered graph.
pub fn check_invariants(cfg: &Cfg) -> Result<(), String> {
    if cfg.blocks.is_empty() {
        return Err("no blocks".into());
    }
    let preds = cfg.predecessors();
    if !preds[Cfg::ENTRY].is_empty() {
        return Err("entry block has predecessors".into());
    }
    for (i, b) in cfg.blocks.iter().enumerate() {
        if let Terminator::Branch { then_block, else_block, .. } = b.term {
            if then_block == else_block {
                return Err(format!("B{i} branches twice to B{then_block}"));
            }
        }
        for (s, _) in b.successors() {
            if s >= cfg.blocks.len() {
                return Err(format!("B{i} jumps to missing block B{s}"));
            }
        }
    }
    let order = reverse_post_order(cfg);
    if order.len() != cfg.blocks.len() {
        return Err(format!("{} of {} blocks are unreachable", cfg.blocks.len() - order.len(), cfg.blocks.len()));
    }
    // temps: defined exactly once, and the definition precedes every use
    let mut defs = std::collections::BTreeMap::new();
    for (bi, b) in cfg.blocks.iter().enumerate() {
        for (ii, instr) in b.instrs.iter().enumerate() {
            if let Some(Place { base: VarId::Temp(t), .. }) = instr.kind.dest() {
                if defs.insert(*t, (bi, ii)).is_some() {
                    return Err(format!("temp t{t} assigned twice"));
                }
            }
        }
    }
    let position: std::collections::HashMap<BlockId, usize> = order.iter().enumerate().map(|(i, b)| (*b, i)).collect();
    let check_use = |t: u32, at: (BlockId, usize)| -> Result<(), String> {
        let Some(&(db, di)) = defs.get(&t) else {
            return Err(format!("temp t{t} used but never assigned"));
        };
        let before = if db == at.0 { di < at.1 } else { position[&db] < position[&at.0] };
        if before {
            Ok(())
        } else {
            Err(format!("temp t{t} used in B{} before its definition", at.0))
        }
    };
    for (bi, b) in cfg.blocks.iter().enumerate() {
        for (ii, instr) in b.instrs.iter().enumerate() {
            for p in instr.kind.reads() {
                for v in p.vars() {
                    if let VarId::Temp(t) = v {
                        check_use(t, (bi, ii))?;
                    }
                }
            }
        }
        if let Terminator::Branch { cond: Operand::Place(p), .. } = &b.term {
            for v in p.vars() {
                if let VarId::Temp(t) = v {
                    check_use(t, (bi, b.instrs.len()))?;
                }
            }
        }
    }
    Ok(())
}

/// Plain-text listing: one paragraph per block, then the edges.
pub fn dump_cfg(cfg: &Cfg) -> String {
    let mut out = String::new();
    writeln!(out, "function {}:", cfg.function).unwrap();
    for (i, b) in cfg.blocks.iter().enumerate() {
        writeln!(out, "B{i}:").unwrap();
        for instr in &b.instrs {
            writeln!(out, "  {}", InstrDisplay { cfg, instr: &instr.kind }).unwrap();
        }
        if let Terminator::Branch { cond, .. } = &b.term {
            writeln!(out, "  branch {}", cfg.operand_name(cond)).unwrap();
        }
        out.push('\n');
    }
    out.push_str("edges:\n");
    for (from, to, kind) in cfg.edges() {
        let tag = match kind {
            EdgeKind::Unconditional => "",
            EdgeKind::True => " [true]",
            EdgeKind::False => " [false]",
        };
        writeln!(out, "B{from}->B{to}{tag}").unwrap();
    }
    out
}
