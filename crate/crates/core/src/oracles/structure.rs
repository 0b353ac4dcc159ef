//! Explicit finite structures and brute-force Tarskian evaluation.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_integer::Integer;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::formula::{Formula, Term};
use super::{Backend, ConsistencyOracle, Param, Witness};
use crate::error::{Error, Result};
use crate::index::IndexSpace;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Relation {
    // None only for a relation given with no tuples
    arity: Option<usize>,
    tuples: HashSet<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Function {
    arity: usize,
    // row-major over argument positions in universe order
    table: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteStructure {
    universe: Vec<String>,
    lookup: HashMap<String, usize>,
    relations: BTreeMap<String, Relation>,
    functions: BTreeMap<String, Function>,
    constants: BTreeMap<String, usize>,
}

fn element_text(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        other => Err(Error::Structure(format!("universe elements must be scalars, got {other}"))),
    }
}

impl FiniteStructure {
    pub fn new(universe: Vec<String>) -> Result<Self> {
        if universe.is_empty() {
            return Err(Error::Structure("universe is empty".into()));
        }
        let mut lookup = HashMap::new();
        for (i, e) in universe.iter().enumerate() {
            if lookup.insert(e.clone(), i).is_some() {
                return Err(Error::Structure(format!("duplicate universe element {e}")));
            }
        }
        Ok(FiniteStructure {
            universe,
            lookup,
            relations: BTreeMap::new(),
            functions: BTreeMap::new(),
            constants: BTreeMap::new(),
        })
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn element(&self, text: &str) -> Result<usize> {
        self.lookup
            .get(text)
            .copied()
            .ok_or_else(|| Error::Structure(format!("{text} is not in the universe")))
    }

    fn elements(&self, texts: &[String]) -> Result<Vec<usize>> {
        texts.iter().map(|t| self.element(t)).collect()
    }

    pub fn add_relation(&mut self, name: &str, tuples: &[Vec<String>]) -> Result<()> {
        let arity = tuples.first().map(Vec::len);
        let mut set = HashSet::new();
        for t in tuples {
            if Some(t.len()) != arity {
                return Err(Error::Structure(format!("relation {name} mixes tuple lengths")));
            }
            set.insert(self.elements(t)?);
        }
        self.relations.insert(name.to_string(), Relation { arity, tuples: set });
        Ok(())
    }

    /// `table` maps argument tuples to values; it must be total.
    pub fn add_function(&mut self, name: &str, table: &[(Vec<String>, String)]) -> Result<()> {
        let arity = table
            .first()
            .map(|(args, _)| args.len())
            .ok_or_else(|| Error::Structure(format!("function {name} has an empty table")))?;
        if arity == 0 {
            return Err(Error::Structure(format!("function {name}: use a constant for arity 0")));
        }
        let n = self.universe.len();
        let size = n
            .checked_pow(arity as u32)
            .ok_or_else(|| Error::Structure(format!("function {name} table too large")))?;
        let mut cells: Vec<Option<usize>> = vec![None; size];
        for (args, value) in table {
            if args.len() != arity {
                return Err(Error::Structure(format!("function {name} mixes arities")));
            }
            let at = self.elements(args)?.iter().fold(0, |acc, &a| acc * n + a);
            let v = self.element(value)?;
            if cells[at].replace(v).is_some_and(|old| old != v) {
                return Err(Error::Structure(format!("function {name} is not single-valued")));
            }
        }
        let table = cells
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Structure(format!("function {name} is not total")))?;
        self.functions.insert(name.to_string(), Function { arity, table });
        Ok(())
    }

    pub fn add_constant(&mut self, name: &str, value: &str) -> Result<()> {
        let v = self.element(value)?;
        self.constants.insert(name.to_string(), v);
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Structure(e.to_string()))?;
        Self::from_value(&v)
    }

    /// `{"universe":[…], "relations":{name:[[…],…]}, "functions":{name:{"a,b":v,…}},
    /// "constants":{name:v}}`; function keys join argument elements with commas.
    pub fn from_value(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Structure("expected a JSON object".into()))?;
        let section = |key: &str| -> Result<Option<&Map<String, Value>>> {
            match obj.get(key) {
                None => Ok(None),
                Some(Value::Object(m)) => Ok(Some(m)),
                Some(_) => Err(Error::Structure(format!("{key} must be an object"))),
            }
        };
        let universe = obj
            .get("universe")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Structure("missing universe array".into()))?
            .iter()
            .map(element_text)
            .collect::<Result<Vec<_>>>()?;
        let mut s = Self::new(universe)?;
        for (name, tuples) in section("relations")?.into_iter().flatten() {
            let tuples = tuples
                .as_array()
                .ok_or_else(|| Error::Structure(format!("relation {name} must be a list of tuples")))?
                .iter()
                .map(|t| match t {
                    Value::Array(items) => items.iter().map(element_text).collect(),
                    scalar => Ok(vec![element_text(scalar)?]),
                })
                .collect::<Result<Vec<_>>>()?;
            s.add_relation(name, &tuples)?;
        }
        for (name, table) in section("functions")?.into_iter().flatten() {
            let table = table
                .as_object()
                .ok_or_else(|| Error::Structure(format!("function {name} must be an object")))?
                .iter()
                .map(|(k, v)| Ok((k.split(',').map(|a| a.trim().to_string()).collect(), element_text(v)?)))
                .collect::<Result<Vec<_>>>()?;
            s.add_function(name, &table)?;
        }
        for (name, value) in section("constants")?.into_iter().flatten() {
            s.add_constant(name, &element_text(value)?)?;
        }
        Ok(s)
    }

    pub fn to_value(&self) -> Value {
        let text = |i: usize| Value::String(self.universe[i].clone());
        let relations: Map<String, Value> = self
            .relations
            .iter()
            .map(|(name, r)| {
                let mut tuples: Vec<&Vec<usize>> = r.tuples.iter().collect();
                tuples.sort();
                let tuples = tuples.into_iter().map(|t| Value::Array(t.iter().map(|&e| text(e)).collect()));
                (name.clone(), Value::Array(tuples.collect()))
            })
            .collect();
        let n = self.universe.len();
        let functions: Map<String, Value> = self
            .functions
            .iter()
            .map(|(name, f)| {
                let entries: Map<String, Value> = f
                    .table
                    .iter()
                    .enumerate()
                    .map(|(at, &v)| {
                        let args: Vec<&str> = (0..f.arity)
                            .rev()
                            .map(|p| self.universe[at / n.pow(p as u32) % n].as_str())
                            .collect();
                        (args.join(","), text(v))
                    })
                    .collect();
                (name.clone(), Value::Object(entries))
            })
            .collect();
        let constants: Map<String, Value> = self.constants.iter().map(|(k, &v)| (k.clone(), text(v))).collect();
        json!({
            "universe": self.universe,
            "relations": relations,
            "functions": functions,
            "constants": constants,
        })
    }
}

/// Divisors of `n` under divisibility, with `gcd`/`lcm` and constants
/// `bottom` = 1, `top` = n.
pub fn divisor_lattice(n: u64) -> Result<FiniteStructure> {
    if n == 0 {
        return Err(Error::Precondition("divisor lattice of 0 is infinite".into()));
    }
    let divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    let texts: Vec<String> = divisors.iter().map(u64::to_string).collect();
    let mut s = FiniteStructure::new(texts.clone())?;
    let mut divides = Vec::new();
    let mut gcd = Vec::new();
    let mut lcm = Vec::new();
    for &a in &divisors {
        for &b in &divisors {
            let pair = vec![a.to_string(), b.to_string()];
            if b % a == 0 {
                divides.push(pair.clone());
            }
            gcd.push((pair.clone(), a.gcd(&b).to_string()));
            lcm.push((pair, a.lcm(&b).to_string()));
        }
    }
    s.add_relation("divides", &divides)?;
    s.add_function("gcd", &gcd)?;
    s.add_function("lcm", &lcm)?;
    s.add_constant("bottom", "1")?;
    s.add_constant("top", &n.to_string())?;
    Ok(s)
}

#[derive(Clone, Debug)]
enum CTerm {
    Slot(usize),
    Elem(usize),
    App(usize, Vec<CTerm>),
}

#[derive(Clone, Debug)]
enum CFormula {
    Eq(CTerm, CTerm),
    Rel(usize, Vec<CTerm>),
    Never,
    Not(Box<CFormula>),
    And(Vec<CFormula>),
    Or(Vec<CFormula>),
    Implies(Box<CFormula>, Box<CFormula>),
    Exists(Box<CFormula>),
    Forall(Box<CFormula>),
}

/// A formula with every name resolved against a structure. The first
/// `free.len()` slots hold the free variables in the given order.
#[derive(Clone, Debug)]
struct Compiled {
    body: CFormula,
    slots: usize,
}

struct Compiler<'a> {
    s: &'a FiniteStructure,
    scope: Vec<String>,
    max: usize,
    relations: Vec<&'a Relation>,
    functions: Vec<&'a Function>,
}

impl<'a> Compiler<'a> {
    fn term(&mut self, t: &Term) -> Result<CTerm> {
        match t {
            Term::Name(n) => {
                if let Some(slot) = self.scope.iter().rposition(|v| v == n) {
                    Ok(CTerm::Slot(slot))
                } else if let Some(&c) = self.s.constants.get(n) {
                    Ok(CTerm::Elem(c))
                } else if let Some(&e) = self.s.lookup.get(n) {
                    Ok(CTerm::Elem(e))
                } else if self.s.functions.contains_key(n) || self.s.relations.contains_key(n) {
                    Err(Error::ArityMismatch {
                        symbol: n.clone(),
                        expected: self.s.functions.get(n).map_or(0, |f| f.arity),
                        found: 0,
                    })
                } else {
                    Err(Error::UnboundVariable(n.clone()))
                }
            }
            Term::App(name, args) => {
                let f = self.s.functions.get(name).ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
                if f.arity != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: name.clone(),
                        expected: f.arity,
                        found: args.len(),
                    });
                }
                let args = args.iter().map(|a| self.term(a)).collect::<Result<_>>()?;
                self.functions.push(f);
                Ok(CTerm::App(self.functions.len() - 1, args))
            }
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<CFormula> {
        Ok(match f {
            Formula::Eq(a, b) => CFormula::Eq(self.term(a)?, self.term(b)?),
            Formula::Rel(name, args) => {
                let r = self.s.relations.get(name).ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
                if let Some(arity) = r.arity.filter(|&a| a != args.len()) {
                    return Err(Error::ArityMismatch {
                        symbol: name.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                let args = args.iter().map(|a| self.term(a)).collect::<Result<_>>()?;
                if r.arity.is_none() {
                    CFormula::Never
                } else {
                    self.relations.push(r);
                    CFormula::Rel(self.relations.len() - 1, args)
                }
            }
            Formula::Not(g) => CFormula::Not(Box::new(self.formula(g)?)),
            Formula::And(gs) => CFormula::And(gs.iter().map(|g| self.formula(g)).collect::<Result<_>>()?),
            Formula::Or(gs) => CFormula::Or(gs.iter().map(|g| self.formula(g)).collect::<Result<_>>()?),
            Formula::Implies(a, b) => CFormula::Implies(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                self.scope.push(v.clone());
                self.max = self.max.max(self.scope.len());
                let body = self.formula(g);
                self.scope.pop();
                let body = Box::new(body?);
                if matches!(f, Formula::Exists(..)) {
                    CFormula::Exists(body)
                } else {
                    CFormula::Forall(body)
                }
            }
        })
    }
}

/// Symbol tables are flattened into the compiled formula so evaluation
/// needs no lookups.
struct Program<'a> {
    compiled: Compiled,
    relations: Vec<&'a Relation>,
    functions: Vec<&'a Function>,
    n: usize,
}

impl<'a> Program<'a> {
    fn new(s: &'a FiniteStructure, f: &Formula, free: &[String]) -> Result<Self> {
        let mut c = Compiler {
            s,
            scope: free.to_vec(),
            max: free.len(),
            relations: Vec::new(),
            functions: Vec::new(),
        };
        let body = c.formula(f)?;
        Ok(Program {
            compiled: Compiled { body, slots: c.max },
            relations: c.relations,
            functions: c.functions,
            n: s.universe.len(),
        })
    }

    fn env(&self, free: &[usize]) -> Vec<usize> {
        let mut env = free.to_vec();
        env.resize(self.compiled.slots, 0);
        env
    }

    fn term(&self, t: &CTerm, env: &[usize]) -> usize {
        match t {
            CTerm::Slot(s) => env[*s],
            CTerm::Elem(e) => *e,
            CTerm::App(f, args) => {
                let f = self.functions[*f];
                let at = args.iter().fold(0, |acc, a| acc * self.n + self.term(a, env));
                f.table[at]
            }
        }
    }

    /// `depth` is the number of slots currently bound.
    fn eval(&self, f: &CFormula, env: &mut [usize], depth: usize) -> bool {
        match f {
            CFormula::Eq(a, b) => self.term(a, env) == self.term(b, env),
            CFormula::Rel(r, args) => {
                let tuple: Vec<usize> = args.iter().map(|a| self.term(a, env)).collect();
                self.relations[*r].tuples.contains(&tuple)
            }
            CFormula::Never => false,
            CFormula::Not(g) => !self.eval(g, env, depth),
            CFormula::And(gs) => gs.iter().all(|g| self.eval(g, env, depth)),
            CFormula::Or(gs) => gs.iter().any(|g| self.eval(g, env, depth)),
            CFormula::Implies(a, b) => !self.eval(a, env, depth) || self.eval(b, env, depth),
            CFormula::Exists(g) => (0..self.n).any(|e| {
                env[depth] = e;
                self.eval(g, env, depth + 1)
            }),
            CFormula::Forall(g) => (0..self.n).all(|e| {
                env[depth] = e;
                self.eval(g, env, depth + 1)
            }),
        }
    }

    fn run(&self, free: &[usize]) -> bool {
        let mut env = self.env(free);
        self.eval(&self.compiled.body, &mut env, free.len())
    }
}

/// Evaluates `f` under `asg` (variable → universe element text). Every
/// free name must be assigned, a constant, or a universe element.
pub fn eval_formula(s: &FiniteStructure, f: &Formula, asg: &BTreeMap<String, String>) -> Result<bool> {
    let names: Vec<String> = asg.keys().cloned().collect();
    let values: Vec<usize> = asg.values().map(|v| s.element(v)).collect::<Result<_>>()?;
    Ok(Program::new(s, f, &names)?.run(&values))
}

/// Parameters for a formula `φ(x̄; ȳ)`: one universe tuple per label,
/// matching the ȳ block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureWitness {
    space: IndexSpace,
    x_vars: Vec<String>,
    y_vars: Vec<String>,
    params: Vec<Vec<usize>>,
}

impl StructureWitness {
    pub fn new(
        s: &FiniteStructure,
        space: IndexSpace,
        x_vars: Vec<String>,
        y_vars: Vec<String>,
        params: &[Vec<String>],
    ) -> Result<Self> {
        if params.len() != space.len() {
            return Err(Error::IndexMismatch(format!(
                "{} parameters for {} labels",
                params.len(),
                space.len()
            )));
        }
        if x_vars.is_empty() {
            return Err(Error::Precondition("at least one x variable is required".into()));
        }
        let params = params
            .iter()
            .map(|tuple| {
                if tuple.len() != y_vars.len() {
                    return Err(Error::ArityMismatch {
                        symbol: "parameter tuple".into(),
                        expected: y_vars.len(),
                        found: tuple.len(),
                    });
                }
                s.elements(tuple)
            })
            .collect::<Result<_>>()?;
        Ok(StructureWitness {
            space,
            x_vars,
            y_vars,
            params,
        })
    }

    /// Reads a skolem witness's integers as universe elements for the single
    /// parameter variable `y`.
    pub fn from_witness(s: &FiniteStructure, w: &Witness, x: &str, y: &str) -> Result<Self> {
        if w.backend() != Backend::Skolem {
            return Err(Error::Precondition("only skolem witnesses map to universe elements".into()));
        }
        let params: Vec<Vec<String>> = w.params().iter().map(|p| vec![p.to_text()]).collect();
        debug_assert!(w.params().iter().all(|p| matches!(p, Param::Nat(_))));
        Self::new(s, *w.space(), vec![x.to_string()], vec![y.to_string()], &params)
    }

    pub fn space(&self) -> &IndexSpace {
        &self.space
    }
}

/// Brute-force oracle: `J` is consistent iff some x̄ in the universe
/// satisfies `φ(x̄; a_j)` for every `j ∈ J`.
pub struct FoOracle<'a> {
    program: Program<'a>,
    witness: &'a StructureWitness,
}

impl<'a> FoOracle<'a> {
    pub fn new(s: &'a FiniteStructure, f: &Formula, w: &'a StructureWitness) -> Result<Self> {
        let vars: Vec<String> = w.x_vars.iter().chain(&w.y_vars).cloned().collect();
        let program = Program::new(s, f, &vars)?;
        Ok(FoOracle { program, witness: w })
    }

    fn realizes(&self, x: usize, subset: &[usize]) -> bool {
        let n = self.program.n;
        let k = self.witness.x_vars.len();
        let mut env = self.program.env(&[]);
        for p in 0..k {
            env[k - 1 - p] = x / n.pow(p as u32) % n;
        }
        let free = k + self.witness.y_vars.len();
        subset.iter().all(|&j| {
            env[k..free].copy_from_slice(&self.witness.params[j]);
            self.program.eval(&self.program.compiled.body, &mut env, free)
        })
    }
}

impl ConsistencyOracle for FoOracle<'_> {
    fn index(&self) -> &IndexSpace {
        &self.witness.space
    }

    fn consistent(&self, subset: &[usize]) -> bool {
        let candidates = self.program.n.pow(self.witness.x_vars.len() as u32);
        if candidates <= 256 {
            (0..candidates).any(|x| self.realizes(x, subset))
        } else {
            (0..candidates).into_par_iter().any(|x| self.realizes(x, subset))
        }
    }
}

pub fn fo_consistent(s: &FiniteStructure, f: &Formula, w: &StructureWitness, subset: &[usize]) -> Result<bool> {
    Ok(FoOracle::new(s, f, w)?.consistent(subset))
}
