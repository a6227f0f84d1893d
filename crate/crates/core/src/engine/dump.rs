use std::collections::BTreeMap;
use std::fmt::Write;

use super::transfer::IntervalFlow;
use super::AnalysisResult;
use crate::cfg::{reverse_post_order, Cfg, InstrDisplay, PathElem, Place};
use crate::domain::{AbstractState, Interval};

/// Indexed locations mentioned anywhere in the function, such as
/// `_votes[msg.sender]`, listed alongside whole variables.
fn tracked_places(cfg: &Cfg) -> Vec<Place> {
    let mut out = Vec::new();
    for b in &cfg.blocks {
        for i in &b.instrs {
            let places = i.kind.reads().into_iter().chain(i.kind.dest());
            for p in places {
                if !p.base.is_temp() && p.path.iter().any(|e| matches!(e, PathElem::Index(_))) && !out.contains(p) {
                    out.push(p.clone());
                }
            }
        }
    }
    out
}

fn render_state(cfg: &Cfg, flow: &IntervalFlow<'_>, tracked: &[Place], state: &AbstractState, out: &mut String) {
    if state.is_bottom() {
        out.push_str("    ⊥\n");
        return;
    }
    let mut lines: BTreeMap<String, Interval> = BTreeMap::new();
    let mut order = Vec::new();
    for (v, value) in state.iter() {
        if v.is_temp() {
            continue;
        }
        let name = cfg.var_name(*v);
        for (suffix, itv) in value.flatten() {
            order.push(format!("{name}{suffix}"));
            lines.insert(format!("{name}{suffix}"), itv);
        }
    }
    for p in tracked {
        // the index must already be computed at this point
        if !p.vars().iter().all(|v| state.get(*v).is_some()) {
            continue;
        }
        let name = cfg.source_name(p);
        for (suffix, itv) in flow.read_place(state, p).flatten() {
            let key = format!("{name}{suffix}");
            if !lines.contains_key(&key) {
                order.push(key.clone());
            }
            lines.insert(key, itv);
        }
    }
    for key in order {
        writeln!(out, "    {key} ∈ {}", lines[&key]).unwrap();
    }
}

/// One entry per instruction in reverse post-order: its source position,
/// its text and the state before it. The state at normal exit closes the
/// listing under `end:`.
pub fn dump_states(cfg: &Cfg, result: &AnalysisResult) -> String {
    let flow = IntervalFlow::new(cfg);
    let tracked = tracked_places(cfg);
    let mut out = String::new();
    writeln!(out, "function {}:", cfg.function).unwrap();
    for b in reverse_post_order(cfg) {
        for (i, instr) in cfg.blocks[b].instrs.iter().enumerate() {
            writeln!(out, "  {}:{}: {}", instr.span.line, instr.span.column, InstrDisplay { cfg, instr: &instr.kind }).unwrap();
            render_state(cfg, &flow, &tracked, &result.instr_in[b][i], &mut out);
        }
    }
    out.push_str("  end:\n");
    render_state(cfg, &flow, &tracked, &result.exit_state, &mut out);
    out
}
