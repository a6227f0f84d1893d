mod common;

use std::collections::BTreeSet;

use minisol_iv::cfg::{check_invariants, dump_cfg, lower_contract, reverse_post_order, Cfg, EdgeKind, InstrKind, Terminator};
use minisol_iv::frontend::load;

fn lower(source: &str) -> Vec<Cfg> {
    let (unit, symbols) = load(source).unwrap();
    unit.contracts.iter().flat_map(|c| lower_contract(c, &symbols).unwrap()).collect()
}

fn lower_fixture(rel: &str) -> Vec<Cfg> {
    lower(&common::read(&common::fixtures().join(rel)))
}

fn function<'a>(cfgs: &'a [Cfg], name: &str) -> &'a Cfg {
    cfgs.iter().find(|c| c.function == name).unwrap()
}

#[test]
fn invariants_hold_on_every_fixture() {
    for path in common::all_fixture_files() {
        for cfg in lower(&common::read(&path)) {
            check_invariants(&cfg).unwrap_or_else(|e| panic!("{} {}: {e}", path.display(), cfg.function));
        }
    }
}

#[test]
fn lowering_is_deterministic() {
    for path in common::all_fixture_files() {
        let src = common::read(&path);
        let (a, b) = (lower(&src), lower(&src));
        assert_eq!(a, b);
        let dumps = |v: &[Cfg]| v.iter().map(dump_cfg).collect::<Vec<_>>();
        assert_eq!(dumps(&a), dumps(&b));
    }
}

#[test]
fn rpo_covers_reachable_blocks_once_entry_first() {
    for path in common::all_fixture_files() {
        for cfg in lower(&common::read(&path)) {
            let rpo = reverse_post_order(&cfg);
            assert_eq!(rpo[0], Cfg::ENTRY);
            let unique: BTreeSet<_> = rpo.iter().collect();
            assert_eq!(unique.len(), rpo.len());
            // every non-back edge goes forward in the order
            let pos = |b| rpo.iter().position(|x| *x == b).unwrap();
            for (from, to, _) in cfg.edges() {
                if !cfg.loop_headers.contains(&to) || pos(to) > pos(from) {
                    assert!(pos(from) < pos(to), "{}: B{from}->B{to}", cfg.function);
                }
            }
        }
    }
}

#[test]
fn straight_line_function_is_one_block() {
    let cfgs = lower_fixture("corpus/unmatched_type.sol");
    let vote = function(&cfgs, "vote");
    assert_eq!(vote.blocks.len(), 1);
    assert_eq!(vote.blocks[0].term, Terminator::Exit);
    let casts = vote.blocks[0].instrs.iter().filter(|i| matches!(i.kind, InstrKind::EnumCast { .. })).count();
    assert_eq!(casts, 2);
}

#[test]
fn for_loop_has_one_header_and_one_back_edge() {
    let cfgs = lower_fixture("extra/bounded_loop.sol");
    let count = function(&cfgs, "count");
    assert_eq!(count.loop_headers.len(), 1);
    let header = *count.loop_headers.iter().next().unwrap();
    assert!(matches!(count.blocks[header].term, Terminator::Branch { .. }));
    let into_header: Vec<_> = count.edges().into_iter().filter(|e| e.1 == header).collect();
    assert_eq!(into_header.len(), 2);
    assert!(count.literals.contains(&10.into()));
}

#[test]
fn if_else_forms_a_diamond() {
    let cfgs = lower("contract C { function f(uint a) public returns (uint) { uint r; if (a > 3) { r = 1; } else { r = 2; } return r; } }");
    let f = function(&cfgs, "f");
    let Terminator::Branch { then_block, else_block, .. } = f.blocks[Cfg::ENTRY].term else { panic!("{}", dump_cfg(f)) };
    let (Terminator::Jump(a), Terminator::Jump(b)) = (&f.blocks[then_block].term, &f.blocks[else_block].term) else {
        panic!("{}", dump_cfg(f))
    };
    assert_eq!(a, b);
    let kinds: Vec<_> = f.edges().into_iter().filter(|e| e.0 == Cfg::ENTRY).map(|e| e.2).collect();
    assert_eq!(kinds, [EdgeKind::True, EdgeKind::False]);
    assert!(f.loop_headers.is_empty());
}

#[test]
fn modifier_body_is_inlined_around_the_function() {
    let cfgs = lower_fixture("corpus/uninitialized.sol");
    let set = function(&cfgs, "setValue");
    let instrs: Vec<_> = set.blocks.iter().flat_map(|b| &b.instrs).collect();
    let require = instrs.iter().position(|i| matches!(i.kind, InstrKind::Require { .. })).unwrap();
    let write = instrs.iter().position(|i| i.kind.dest().is_some_and(|d| set.place_name(d) == "value")).unwrap();
    assert!(require < write);
}

#[test]
fn every_contract_gets_a_constructor_graph() {
    for cfgs in [lower_fixture("corpus/tautology.sol"), lower_fixture("extra/constructor_owner.sol")] {
        assert_eq!(cfgs[0].function, "constructor");
    }
}
