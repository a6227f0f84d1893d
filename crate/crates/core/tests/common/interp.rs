//! Reference concrete interpreter over lowered CFGs, used to check that
//! every value a real execution produces lies inside the computed interval.

use std::collections::BTreeMap;

use minisol_iv::cfg::{Cfg, InstrKind, Operand, PathElem, Place, Terminator, VarId};
use minisol_iv::domain::{AbstractState, AbstractValue, Elements};
use minisol_iv::engine::{analyze_contract, ContractAnalysis, WorklistConfig};
use minisol_iv::frontend::ast::{BinaryOp, UnaryOp};
use minisol_iv::frontend::{self, Ty};
use num_bigint::{BigInt, RandBigInt};
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(BigInt),
    Array(Vec<Value>),
    Mapping(BTreeMap<BigInt, Value>),
    Struct(Vec<(String, Value)>),
}

impl Value {
    fn int(&self) -> &BigInt {
        match self {
            Value::Int(v) => v,
            other => panic!("expected an integer, got {other:?}"),
        }
    }
}

/// Value range of a scalar type, computed from the Solidity rules.
pub fn type_range(ty: &Ty) -> Option<(BigInt, BigInt)> {
    let two = BigInt::from(2);
    Some(match ty {
        Ty::Uint(n) => (BigInt::zero(), two.pow(u32::from(*n)) - 1),
        Ty::Int(n) => (-two.pow(u32::from(*n) - 1), two.pow(u32::from(*n) - 1) - 1),
        Ty::Bool => (BigInt::zero(), BigInt::one()),
        Ty::Address => (BigInt::zero(), two.pow(160) - 1),
        Ty::Enum(e) => (BigInt::zero(), BigInt::from(e.variants.len() - 1)),
        _ => return None,
    })
}

pub fn default_of(ty: &Ty) -> Value {
    match ty {
        Ty::Array { elem, len: Some(n) } => Value::Array(vec![default_of(elem); *n as usize]),
        Ty::Array { len: None, .. } => Value::Array(Vec::new()),
        Ty::Mapping { .. } => Value::Mapping(BTreeMap::new()),
        Ty::Struct(s) => Value::Struct(s.fields.iter().map(|(n, t)| (n.clone(), default_of(t))).collect()),
        _ => Value::Int(BigInt::zero()),
    }
}

/// Edge values and uniform picks, mixed.
pub fn random_scalar(rng: &mut StdRng, lo: &BigInt, hi: &BigInt) -> BigInt {
    let small_hi = hi.clone().min(lo + 20);
    match rng.gen_range(0..6) {
        0 => lo.clone(),
        1 => hi.clone(),
        2 if lo <= &BigInt::zero() && &BigInt::zero() <= hi => BigInt::zero(),
        3 => rng.gen_bigint_range(lo, &(small_hi + 1)),
        _ => rng.gen_bigint_range(lo, &(hi + 1)),
    }
}

pub fn random_value(rng: &mut StdRng, ty: &Ty) -> Value {
    if let Some((lo, hi)) = type_range(ty) {
        return Value::Int(random_scalar(rng, &lo, &hi));
    }
    match ty {
        Ty::Array { elem, len: Some(n) } => Value::Array((0..*n).map(|_| random_value(rng, elem)).collect()),
        Ty::Array { elem, len: None } => {
            let n = rng.gen_range(0..4);
            Value::Array((0..n).map(|_| random_value(rng, elem)).collect())
        }
        Ty::Mapping { value, .. } => {
            let mut m = BTreeMap::new();
            for _ in 0..rng.gen_range(0..3) {
                m.insert(BigInt::from(rng.gen_range(0..4)), random_value(rng, value));
            }
            Value::Mapping(m)
        }
        Ty::Struct(s) => Value::Struct(s.fields.iter().map(|(n, t)| (n.clone(), random_value(rng, t))).collect()),
        other => panic!("no random value for {other}"),
    }
}

/// Whether a concrete value is described by an abstract one.
pub fn within(c: &Value, a: &AbstractValue) -> bool {
    match (c, a) {
        (Value::Int(v), AbstractValue::Scalar { itv, .. }) => itv.contains(v),
        (Value::Array(items), AbstractValue::Array { length, elems, .. }) => {
            length.contains(&BigInt::from(items.len()))
                && match elems {
                    Elements::Summary(s) => items.iter().all(|i| within(i, s)),
                    Elements::Exact(v) => items.len() == v.len() && items.iter().zip(v).all(|(i, e)| within(i, e)),
                }
        }
        (Value::Mapping(m), AbstractValue::Mapping { value, .. }) => m.values().all(|v| within(v, value)),
        (Value::Struct(fs), AbstractValue::Struct { fields, .. }) => {
            fs.iter().zip(fields).all(|((n1, v), (n2, a))| n1 == n2 && within(v, a))
        }
        _ => false,
    }
}

pub struct Revert;

pub struct Machine<'a> {
    pub cfg: &'a Cfg,
    pub env: BTreeMap<VarId, Value>,
    pub rng: &'a mut StdRng,
    pub steps: usize,
}

type Exec<T> = Result<T, Revert>;

fn checked(v: BigInt, ty: &Ty) -> Exec<Value> {
    let (lo, hi) = type_range(ty).expect("scalar type");
    if v < lo || v > hi {
        Err(Revert)
    } else {
        Ok(Value::Int(v))
    }
}

impl Machine<'_> {
    fn operand(&self, op: &Operand) -> Exec<Value> {
        match op {
            Operand::Const(c) => Ok(Value::Int(c.clone())),
            Operand::Place(p) => self.read(p),
        }
    }

    fn key(&self, op: &Operand) -> Exec<BigInt> {
        Ok(self.operand(op)?.int().clone())
    }

    fn read(&self, p: &Place) -> Exec<Value> {
        let mut cur = self.env.get(&p.base).cloned().expect("variable is bound");
        let mut ty = self.cfg.var_type(p.base).clone();
        for e in &p.path {
            let (next, next_ty) = match (cur, e, ty) {
                (Value::Struct(fs), PathElem::Field(f), Ty::Struct(s)) => {
                    (fs.into_iter().find(|(n, _)| n == f).unwrap().1, s.field(f).unwrap().clone())
                }
                (Value::Array(items), PathElem::Length, _) => (Value::Int(BigInt::from(items.len())), Ty::UINT256),
                (Value::Array(items), PathElem::Index(i), Ty::Array { elem, .. }) => {
                    let k = self.key(i)?;
                    if k.is_negative() || k >= BigInt::from(items.len()) {
                        return Err(Revert);
                    }
                    let idx: usize = k.try_into().unwrap();
                    (items[idx].clone(), *elem)
                }
                (Value::Mapping(m), PathElem::Index(i), Ty::Mapping { value, .. }) => {
                    let k = self.key(i)?;
                    (m.get(&k).cloned().unwrap_or_else(|| default_of(&value)), *value)
                }
                (v, e, t) => panic!("bad access {e:?} on {v:?}: {t}"),
            };
            cur = next;
            ty = next_ty;
        }
        Ok(cur)
    }

    fn write(&mut self, p: &Place, value: Value) -> Exec<()> {
        let keys: Vec<Option<BigInt>> = p
            .path
            .iter()
            .map(|e| match e {
                PathElem::Index(i) => self.key(i).map(Some),
                _ => Ok(None),
            })
            .collect::<Exec<_>>()?;
        let ty = self.cfg.var_type(p.base).clone();
        let slot = self.env.entry(p.base).or_insert_with(|| default_of(&ty));
        let mut cur = slot;
        let mut cur_ty = ty;
        for (e, k) in p.path.iter().zip(keys) {
            let (next, next_ty) = match (cur, e, cur_ty) {
                (Value::Struct(fs), PathElem::Field(f), Ty::Struct(s)) => {
                    (&mut fs.iter_mut().find(|(n, _)| n == f).unwrap().1, s.field(f).unwrap().clone())
                }
                (Value::Array(items), PathElem::Index(_), Ty::Array { elem, .. }) => {
                    let k = k.unwrap();
                    if k.is_negative() || k >= BigInt::from(items.len()) {
                        return Err(Revert);
                    }
                    let idx: usize = k.try_into().unwrap();
                    (&mut items[idx], *elem)
                }
                (Value::Mapping(m), PathElem::Index(_), Ty::Mapping { value, .. }) => {
                    let d = default_of(&value);
                    (m.entry(k.unwrap()).or_insert(d), *value)
                }
                (v, e, t) => panic!("bad write {e:?} into {v:?}: {t}"),
            };
            cur = next;
            cur_ty = next_ty;
        }
        *cur = value;
        Ok(())
    }

    fn step(&mut self, kind: &InstrKind) -> Exec<()> {
        match kind {
            InstrKind::Assign { dest, src } => {
                let v = self.operand(src)?;
                self.write(dest, v)
            }
            InstrKind::BinOp { dest, op, lhs, rhs } => {
                let a = self.operand(lhs)?.int().clone();
                let b = self.operand(rhs)?.int().clone();
                let ty = self.cfg.place_type(dest);
                let v = match op {
                    BinaryOp::Add => checked(a + b, &ty)?,
                    BinaryOp::Sub => checked(a - b, &ty)?,
                    BinaryOp::Mul => checked(a * b, &ty)?,
                    BinaryOp::Div | BinaryOp::Mod if b.is_zero() => return Err(Revert),
                    // BigInt `/` and `%` truncate toward zero like Solidity
                    BinaryOp::Div => checked(a / b, &ty)?,
                    BinaryOp::Mod => checked(a % b, &ty)?,
                    BinaryOp::Lt => Value::Int(BigInt::from((a < b) as u8)),
                    BinaryOp::Le => Value::Int(BigInt::from((a <= b) as u8)),
                    BinaryOp::Gt => Value::Int(BigInt::from((a > b) as u8)),
                    BinaryOp::Ge => Value::Int(BigInt::from((a >= b) as u8)),
                    BinaryOp::Eq => Value::Int(BigInt::from((a == b) as u8)),
                    BinaryOp::Ne => Value::Int(BigInt::from((a != b) as u8)),
                    BinaryOp::And => Value::Int(BigInt::from((!a.is_zero() && !b.is_zero()) as u8)),
                    BinaryOp::Or => Value::Int(BigInt::from((!a.is_zero() || !b.is_zero()) as u8)),
                };
                self.write(dest, v)
            }
            InstrKind::UnOp { dest, op, src } => {
                let a = self.operand(src)?.int().clone();
                let v = match op {
                    UnaryOp::Not => Value::Int(BigInt::from(a.is_zero() as u8)),
                    UnaryOp::Neg => checked(-a, &self.cfg.place_type(dest))?,
                };
                self.write(dest, v)
            }
            InstrKind::EnumCast { dest, variants, src, .. } => {
                let a = self.operand(src)?.int().clone();
                if a.is_negative() || a >= BigInt::from(*variants) {
                    return Err(Revert);
                }
                self.write(dest, Value::Int(a))
            }
            InstrKind::Require { cond } | InstrKind::Assert { cond } => {
                if self.operand(cond)?.int().is_zero() {
                    Err(Revert)
                } else {
                    Ok(())
                }
            }
            InstrKind::Revert => Err(Revert),
            InstrKind::ExternalTransfer { recipient, amount, success } => {
                self.operand(recipient)?;
                self.operand(amount)?;
                match success {
                    Some(s) => {
                        let ok = self.rng.gen_bool(0.7);
                        self.write(s, Value::Int(BigInt::from(ok as u8)))
                    }
                    None => Ok(()),
                }
            }
            InstrKind::Return { values } => {
                for v in values {
                    self.operand(v)?;
                }
                Ok(())
            }
            InstrKind::InitDefault { dest } => {
                let d = default_of(&self.cfg.place_type(dest));
                self.write(dest, d)
            }
            InstrKind::ArrayLit { dest, elems } => {
                let items = elems.iter().map(|e| self.operand(e)).collect::<Exec<Vec<_>>>()?;
                self.write(dest, Value::Array(items))
            }
        }
    }
}

/// Outcome of one checked concrete run.
pub enum Run {
    Completed,
    Reverted,
    /// Step budget exhausted (a loop that does not stop on this input).
    Diverged,
}

/// First program point where the concrete state escapes the abstract one.
fn violation(env: &BTreeMap<VarId, Value>, state: &AbstractState, cfg: &Cfg, at: &str) -> Option<String> {
    if state.is_bottom() {
        return Some(format!("{}: reached {at}, which the analysis considers unreachable", cfg.function));
    }
    for (v, a) in state.iter() {
        if let Some(c) = env.get(v) {
            if !within(c, a) {
                return Some(format!("{}: at {at}, {} = {c:?} escapes {a:?}", cfg.function, cfg.var_name(*v)));
            }
        }
    }
    None
}

/// Executes one function from `storage`, checking every instruction's
/// in-state. Returns the final storage on completion.
pub fn run_checked(
    cfg: &Cfg,
    analysis: &minisol_iv::engine::AnalysisResult,
    storage: &BTreeMap<VarId, Value>,
    rng: &mut StdRng,
    step_limit: usize,
) -> Result<(Run, BTreeMap<VarId, Value>), String> {
    let mut env = storage.clone();
    env.insert(VarId::MsgSender, Value::Int(random_scalar(rng, &BigInt::zero(), &type_range(&Ty::Address).unwrap().1)));
    let value = if cfg.payable { random_scalar(rng, &BigInt::zero(), &type_range(&Ty::UINT256).unwrap().1) } else { BigInt::zero() };
    env.insert(VarId::MsgValue, Value::Int(value));
    for &p in &cfg.params {
        env.insert(p, random_value(rng, cfg.var_type(p)));
    }
    let mut m = Machine { cfg, env, rng, steps: 0 };
    let mut b = Cfg::ENTRY;
    loop {
        for (i, instr) in cfg.blocks[b].instrs.iter().enumerate() {
            if let Some(v) = violation(&m.env, &analysis.instr_in[b][i], cfg, &format!("B{b}[{i}]")) {
                return Err(v);
            }
            m.steps += 1;
            if m.steps > step_limit {
                return Ok((Run::Diverged, storage.clone()));
            }
            if m.step(&instr.kind).is_err() {
                return Ok((Run::Reverted, storage.clone()));
            }
        }
        if let Some(v) = violation(&m.env, &analysis.block_out[b], cfg, &format!("end of B{b}")) {
            return Err(v);
        }
        b = match &cfg.blocks[b].term {
            Terminator::Jump(t) => *t,
            Terminator::Branch { cond, then_block, else_block, .. } => {
                let c = m.operand(cond).map_err(|_| format!("{}: branch condition reverted", cfg.function))?;
                if c.int().is_zero() {
                    *else_block
                } else {
                    *then_block
                }
            }
            Terminator::Exit => {
                if let Some(v) = violation(&m.env, &analysis.exit_state, cfg, "exit") {
                    return Err(v);
                }
                let out = m.env.into_iter().filter(|(k, _)| matches!(k, VarId::State(_))).collect();
                return Ok((Run::Completed, out));
            }
        };
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SoundnessStats {
    pub functions: usize,
    pub vectors: usize,
    pub completed: usize,
    pub reverted: usize,
}

/// For every function of every contract in `source`, runs `vectors` random
/// executions. Each starts from storage produced by the constructor plus a
/// few random earlier calls, so persistent state is exercised too.
pub fn check_source(source: &str, seed: u64, vectors: usize) -> Result<SoundnessStats, String> {
    let (unit, symbols) = frontend::load(source).map_err(|e| e.to_string())?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut stats = SoundnessStats::default();
    for contract in &unit.contracts {
        let analysis: ContractAnalysis =
            analyze_contract(contract, &symbols, WorklistConfig::default()).map_err(|e| e.to_string())?;
        let ctor = &analysis.cfgs[0];
        let defaults: BTreeMap<VarId, Value> =
            (0..ctor.state_vars.len() as u32).map(|i| (VarId::State(i), default_of(ctor.var_type(VarId::State(i))))).collect();
        stats.functions += analysis.cfgs.len();
        for target in 0..analysis.cfgs.len() {
            for _ in 0..vectors {
                let (run, mut storage) = run_checked(ctor, &analysis.results[0], &defaults, &mut rng, 10_000)?;
                if !matches!(run, Run::Completed) {
                    stats.vectors += 1;
                    continue;
                }
                if target == 0 {
                    stats.vectors += 1;
                    stats.completed += 1;
                    continue;
                }
                for _ in 0..rng.gen_range(0..3) {
                    let f = rng.gen_range(1..analysis.cfgs.len());
                    storage = run_checked(&analysis.cfgs[f], &analysis.results[f], &storage, &mut rng, 10_000)?.1;
                }
                let (run, _) = run_checked(&analysis.cfgs[target], &analysis.results[target], &storage, &mut rng, 10_000)?;
                stats.vectors += 1;
                match run {
                    Run::Completed => stats.completed += 1,
                    Run::Reverted => stats.reverted += 1,
                    Run::Diverged => {}
                }
            }
        }
    }
    Ok(stats)
}
