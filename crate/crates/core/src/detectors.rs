//! The six detectors, fed by analysis events and contract structure.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::cfg::{Cfg, InstrKind, Operand, Place, Terminator, VarId};
use crate::domain::{AbstractValue, Interval};
use crate::engine::{AnalysisEvent, ConditionSite, ContractAnalysis, EventKind};
use crate::error::{Error, Result};
use crate::frontend::ast::ContractDef;
use crate::frontend::{Span, Ty};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DetectorId {
    TautologyContradiction,
    DivByZero,
    DivisionRemainder,
    UninitializedVariable,
    UnvalidatedInput,
    UnmatchedType,
}

impl DetectorId {
    pub const ALL: [DetectorId; 6] = [
        DetectorId::TautologyContradiction,
        DetectorId::DivByZero,
        DetectorId::DivisionRemainder,
        DetectorId::UninitializedVariable,
        DetectorId::UnvalidatedInput,
        DetectorId::UnmatchedType,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DetectorId::TautologyContradiction => "D1-tautology-contradiction",
            DetectorId::DivByZero => "D2-div-by-zero",
            DetectorId::DivisionRemainder => "D3-division-remainder",
            DetectorId::UninitializedVariable => "D4-uninitialized-variable",
            DetectorId::UnvalidatedInput => "D5-unvalidated-input",
            DetectorId::UnmatchedType => "D6-unmatched-type",
        }
    }
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Accepts the full id or its `D<n>` prefix, in any case.
impl FromStr for DetectorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        DetectorId::ALL
            .into_iter()
            .find(|d| {
                let id = d.as_str();
                id.eq_ignore_ascii_case(s) || id[..2].eq_ignore_ascii_case(s)
            })
            .ok_or_else(|| Error::Config(format!("unknown detector `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Severity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "info" => Ok(Severity::Info),
            "warning" => Ok(Severity::Warning),
            "error" => Ok(Severity::Error),
            other => Err(Error::Config(format!("unknown severity `{other}`"))),
        }
    }
}

/// Named intervals backing a finding, in display order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Evidence(pub Vec<(String, String)>);

impl Evidence {
    fn push(&mut self, name: impl Into<String>, itv: &Interval) {
        self.0.push((name.into(), itv.render()));
    }

    fn of(items: &[(&str, &Interval)]) -> Evidence {
        let mut e = Evidence::default();
        for (n, i) in items {
            e.push(*n, i);
        }
        e
    }
}

impl Serialize for Evidence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub detector: DetectorId,
    pub severity: Severity,
    pub span: Span,
    pub message: String,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectorConfig {
    pub enabled: BTreeSet<DetectorId>,
    pub severity: BTreeMap<DetectorId, Severity>,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig { enabled: DetectorId::ALL.into_iter().collect(), severity: BTreeMap::new() }
    }
}

impl DetectorConfig {
    /// Enables only the comma-separated detectors in `list`.
    pub fn only(list: &str) -> Result<DetectorConfig> {
        let enabled = list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect::<Result<BTreeSet<_>>>()?;
        if enabled.is_empty() {
            return Err(Error::Config("no detectors selected".into()));
        }
        Ok(DetectorConfig { enabled, severity: BTreeMap::new() })
    }

    /// Parses `ID=LEVEL` and records the override.
    pub fn set_severity(&mut self, spec: &str) -> Result<()> {
        let (id, level) = spec.split_once('=').ok_or_else(|| Error::Config(format!("expected ID=LEVEL, got `{spec}`")))?;
        self.severity.insert(id.parse()?, level.parse()?);
        Ok(())
    }
}

/// Runs the enabled detectors over one analyzed contract. Findings are
/// deduplicated by detector and span.
pub fn run_detectors(contract: &ContractDef, analysis: &ContractAnalysis, config: &DetectorConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (cfg, result) in analysis.cfgs.iter().zip(&analysis.results) {
        for event in &result.events {
            let found = match &event.kind {
                EventKind::ConditionVerdict { .. } => tautology_contradiction(event),
                EventKind::DivisorInterval { .. } => division_by_zero(event),
                EventKind::ValueTransferOfQuotient { .. } => division_remainder(event, cfg),
                EventKind::IndexAccess { .. } => unvalidated_input(event),
                EventKind::EnumCastSource { .. } => unmatched_type(event),
            };
            out.extend(found);
        }
    }
    out.extend(uninitialized_variables(contract, analysis));

    let mut seen = BTreeSet::new();
    out.retain(|d| config.enabled.contains(&d.detector) && seen.insert((d.detector, d.span)));
    for d in &mut out {
        if let Some(s) = config.severity.get(&d.detector) {
            d.severity = *s;
        }
    }
    out
}

fn diag(detector: DetectorId, severity: Severity, span: Span, message: String, evidence: Evidence) -> Option<Diagnostic> {
    Some(Diagnostic { detector, severity, span, message, evidence })
}

fn tautology_contradiction(event: &AnalysisEvent) -> Option<Diagnostic> {
    let EventKind::ConditionVerdict { site, condition, verdict, constant } = &event.kind else { return None };
    let always = verdict.as_singleton()?;
    let evidence = Evidence::of(&[(condition.as_str(), verdict)]);
    let id = DetectorId::TautologyContradiction;
    match site {
        ConditionSite::Require | ConditionSite::Assert => {
            if always.is_zero() {
                diag(id, Severity::Error, event.span, "contradiction: transaction can never complete".into(), evidence)
            } else {
                diag(id, Severity::Warning, event.span, "tautology: condition always true".into(), evidence)
            }
        }
        // `while (true)` and friends are intentional
        ConditionSite::Branch if *constant => None,
        ConditionSite::Branch => {
            let msg = if always.is_zero() {
                "condition always false: the true branch is dead"
            } else {
                "condition always true: the false branch is dead"
            };
            diag(id, Severity::Info, event.span, msg.into(), evidence)
        }
    }
}

fn division_by_zero(event: &AnalysisEvent) -> Option<Diagnostic> {
    let EventKind::DivisorInterval { divisor, .. } = &event.kind else { return None };
    if !divisor.itv.contains_zero() {
        return None;
    }
    let evidence = Evidence::of(&[(divisor.name.as_str(), &divisor.itv)]);
    let id = DetectorId::DivByZero;
    if divisor.itv.as_singleton().is_some() {
        diag(id, Severity::Error, event.span, format!("division by zero certain: `{}` is always 0", divisor.name), evidence)
    } else {
        diag(id, Severity::Warning, event.span, format!("division by zero possible: `{}` may be 0", divisor.name), evidence)
    }
}

fn division_remainder(event: &AnalysisEvent, cfg: &Cfg) -> Option<Diagnostic> {
    let EventKind::ValueTransferOfQuotient { dividend, divisor, lhs, rhs, division } = &event.kind else { return None };
    // a possibly zero divisor is the division-by-zero detector's finding
    if divisor.itv.contains_zero() {
        return None;
    }
    let one = Interval::singleton(BigInt::one());
    let exact = match (dividend.itv.as_singleton(), divisor.itv.as_singleton()) {
        (Some(a), Some(b)) => (a % b).is_zero(),
        _ => false,
    };
    if divisor.itv.leq(&one) || dividend.itv == Interval::singleton(BigInt::zero()) || exact {
        return None;
    }
    let remainder_taken = cfg.blocks.iter().flat_map(|b| &b.instrs).any(|i| {
        matches!(&i.kind, InstrKind::BinOp { op: crate::frontend::ast::BinaryOp::Mod, lhs: l, rhs: r, .. } if l == lhs && r == rhs)
    });
    if remainder_taken {
        return None;
    }
    let span = cfg.blocks[division.0].instrs[division.1].span;
    let evidence = Evidence::of(&[(dividend.name.as_str(), &dividend.itv), (divisor.name.as_str(), &divisor.itv)]);
    diag(
        DetectorId::DivisionRemainder,
        Severity::Info,
        span,
        format!("remainder of `{} / {}` is discarded and the quotient is transferred; the rest stays locked", dividend.name, divisor.name),
        evidence,
    )
}

fn unvalidated_input(event: &AnalysisEvent) -> Option<Diagnostic> {
    let EventKind::IndexAccess { index, length, guarded } = &event.kind else { return None };
    if *guarded {
        return None;
    }
    let (Some(hi), Some(lo)) = (index.itv.hi(), length.itv.lo()) else { return None };
    if hi < lo {
        return None;
    }
    let evidence = Evidence::of(&[(index.name.as_str(), &index.itv), (length.name.as_str(), &length.itv)]);
    diag(
        DetectorId::UnvalidatedInput,
        Severity::Warning,
        event.span,
        format!("index `{}` is not validated against `{}` and may be out of bounds", index.name, length.name),
        evidence,
    )
}

fn unmatched_type(event: &AnalysisEvent) -> Option<Diagnostic> {
    let EventKind::EnumCastSource { source, enum_name, variants, stored } = &event.kind else { return None };
    let range = Interval::new(0, i64::from(*variants) - 1);
    if !*stored || source.itv.leq(&range) {
        return None;
    }
    let evidence = Evidence::of(&[(source.name.as_str(), &source.itv), ("enumRange", &range)]);
    diag(
        DetectorId::UnmatchedType,
        Severity::Warning,
        event.span,
        format!("`{}` ranges over {} but {enum_name} only holds {}; larger values revert", source.name, source.itv, range),
        evidence,
    )
}

fn default_description(ty: &Ty) -> String {
    match ty {
        Ty::Address => "zero address".into(),
        Ty::Bool => "false".into(),
        Ty::Enum(e) => e.variants.first().cloned().unwrap_or_else(|| "0".into()),
        Ty::Uint(_) | Ty::Int(_) => "0".into(),
        _ => "its default value".into(),
    }
}

/// Variables a condition operand depends on, through temp definitions.
fn condition_vars(cfg: &Cfg, op: &Operand, out: &mut BTreeSet<VarId>) {
    let Operand::Place(p) = op else { return };
    for v in p.vars() {
        match v {
            VarId::Temp(t) => {
                if let Some(def) = cfg.temp_def(t) {
                    for o in def.kind.operands() {
                        condition_vars(cfg, o, out);
                    }
                }
            }
            other => {
                out.insert(other);
            }
        }
    }
}

fn writes(cfg: &Cfg, v: VarId) -> bool {
    cfg.blocks.iter().flat_map(|b| &b.instrs).any(|i| i.kind.dest().is_some_and(|d| d.base == v))
}

fn reads(cfg: &Cfg, v: VarId) -> bool {
    let in_instrs = cfg.blocks.iter().flat_map(|b| &b.instrs).any(|i| i.kind.reads().iter().any(|p: &&Place| p.vars().contains(&v)));
    let in_branches = cfg.blocks.iter().any(|b| match &b.term {
        Terminator::Branch { cond: Operand::Place(p), .. } => p.vars().contains(&v),
        _ => false,
    });
    in_instrs || in_branches
}

/// A checked condition reading `v`, with the modifier it sits in.
fn checked_read<'a>(contract: &'a ContractDef, cfg: &Cfg, v: VarId) -> Option<(Span, Option<&'a str>, bool)> {
    for instr in cfg.blocks.iter().flat_map(|b| &b.instrs) {
        let (InstrKind::Require { cond } | InstrKind::Assert { cond }) = &instr.kind else { continue };
        let mut vars = BTreeSet::new();
        condition_vars(cfg, cond, &mut vars);
        if vars.contains(&v) {
            let modifier = contract
                .modifiers
                .iter()
                .find(|m| m.span.start <= instr.span.start && instr.span.end <= m.span.end)
                .map(|m| m.name.name.as_str());
            return Some((instr.span, modifier, vars.contains(&VarId::MsgSender)));
        }
    }
    None
}

fn uninitialized_variables(contract: &ContractDef, analysis: &ContractAnalysis) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let Some(first) = analysis.cfgs.first() else { return out };
    for (i, info) in first.state_vars.iter().enumerate() {
        let v = VarId::State(i as u32);
        if info.has_initializer || analysis.cfgs.iter().any(|c| writes(c, v)) || !analysis.cfgs.iter().any(|c| reads(c, v)) {
            continue;
        }
        let default = default_description(&info.ty);
        let mut evidence = Evidence::default();
        for (suffix, itv) in AbstractValue::default_value(&info.ty).flatten() {
            evidence.push(format!("{}{suffix}", info.name), &itv);
        }
        let checked = analysis.cfgs.iter().find_map(|c| checked_read(contract, c, v));
        let (severity, message) = match checked {
            Some((_, Some(m), true)) => {
                (Severity::Error, format!("{} stuck at {default}; {m} can never pass for a real sender", info.name))
            }
            Some((_, Some(m), false)) => (Severity::Error, format!("{} stuck at {default}; the check in {m} never sees another value", info.name)),
            Some((_, None, _)) => (Severity::Error, format!("{} stuck at {default}; checks reading it never see another value", info.name)),
            None => (Severity::Warning, format!("{} is never assigned and stays at {default}", info.name)),
        };
        out.extend(diag(DetectorId::UninitializedVariable, severity, info.span, message, evidence));
    }
    out
}
