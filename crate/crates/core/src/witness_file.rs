//! JSON witness files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "index": {"kind": "tree", "branching": 2, "depth": 2},
//!   "pattern": {"kind": "atp", "branching": 2, "depth": 2},
//!   "backend": "skolem",
//!   "params": {"": "2", "0": "3", "1": "3"}
//! }
//! ```
//!
//! Boolean files add `"width"` and write parameters as `0x…` hex with bit 0
//! least significant. Tuple witnesses keep the base parameters under
//! `"params"`, describe the base under `"source_index"` and add
//! `"provenance"` (label → base labels) and `"components"` (label → base
//! parameter texts, redundant but handy to read).

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::index::IndexSpace;
use crate::oracles::{Backend, Param, Witness};
use crate::patterns::PatternSpec;
use crate::transforms::TupleWitness;
use crate::tree::TreeDomain;

pub const WITNESS_FILE_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessFile {
    pub pattern: PatternSpec,
    pub witness: TupleWitness,
}

fn bad(reason: impl Into<String>) -> Error {
    Error::WitnessFile(reason.into())
}

pub fn index_descriptor(space: &IndexSpace) -> Value {
    match space {
        IndexSpace::Tree(d) => {
            let mut v = json!({"kind": "tree", "branching": d.branching, "depth": d.depth});
            if d.leaf_level {
                v["leaf_level"] = json!(true);
            }
            v
        }
        IndexSpace::Array { rows, cols } => json!({"kind": "array", "rows": rows, "cols": cols}),
        IndexSpace::Set { size } => json!({"kind": "set", "size": size}),
    }
}

pub fn parse_index_descriptor(v: &Value) -> Result<IndexSpace> {
    let uint = |key: &str| -> Result<usize> {
        v.get(key)
            .and_then(Value::as_u64)
            .map(|n| n as usize)
            .ok_or_else(|| bad(format!("index descriptor needs a natural {key}")))
    };
    match v.get("kind").and_then(Value::as_str) {
        Some("tree") => {
            let b = u32::try_from(uint("branching")?).map_err(|_| bad("branching too large"))?;
            let mut d = TreeDomain::new(b, uint("depth")?)?;
            if v.get("leaf_level").and_then(Value::as_bool) == Some(true) {
                d = d.with_leaf_level();
            }
            Ok(IndexSpace::Tree(d))
        }
        Some("array") => Ok(IndexSpace::Array {
            rows: uint("rows")?,
            cols: uint("cols")?,
        }),
        Some("set") => Ok(IndexSpace::Set { size: uint("size")? }),
        _ => Err(bad("index kind must be tree, array or set")),
    }
}

fn label_map<T>(space: &IndexSpace, values: impl IntoIterator<Item = T>, f: impl Fn(T) -> Value) -> Value {
    let labels = space.labels();
    let map: Map<String, Value> = labels
        .iter()
        .zip(values)
        .map(|(l, v)| (space.label_text(l), f(v)))
        .collect();
    Value::Object(map)
}

/// Reads a label-keyed object into position order, requiring every label
/// exactly once.
fn read_label_map<'a>(space: &IndexSpace, v: &'a Value, what: &str) -> Result<Vec<&'a Value>> {
    let obj = v.as_object().ok_or_else(|| bad(format!("{what} must be an object")))?;
    let mut slots: Vec<Option<&Value>> = vec![None; space.len()];
    for (key, value) in obj {
        let label = space.parse_label(key).map_err(|e| bad(format!("{what} key {key:?}: {e}")))?;
        let at = space.position(&label).expect("parsed labels are in the space");
        if slots[at].replace(value).is_some() {
            return Err(bad(format!("{what} lists {key:?} twice")));
        }
    }
    let labels = space.labels();
    slots
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| bad(format!("{what} is missing {:?}", space.label_text(&labels[i])))))
        .collect()
}

impl WitnessFile {
    pub fn new(pattern: PatternSpec, witness: TupleWitness) -> Result<Self> {
        if pattern.space != *witness.space() {
            return Err(Error::IndexMismatch("pattern and witness index differ".into()));
        }
        Ok(WitnessFile { pattern, witness })
    }

    pub fn plain(pattern: PatternSpec, witness: Witness) -> Result<Self> {
        Self::new(pattern, TupleWitness::identity(witness))
    }

    pub fn to_value(&self) -> Value {
        let base = self.witness.base();
        let mut v = json!({
            "version": WITNESS_FILE_VERSION,
            "index": index_descriptor(self.witness.space()),
            "pattern": self.pattern.descriptor(),
            "backend": base.backend().name(),
        });
        if base.backend() == Backend::Boolean {
            v["width"] = json!(base.width());
        }
        v["params"] = label_map(base.space(), base.params(), |p| Value::String(p.to_text()));
        if !self.witness.is_identity() {
            let src = base.space();
            v["source_index"] = index_descriptor(src);
            let components = self
                .witness
                .components()
                .iter()
                .map(|c| c.iter().map(|&i| Value::String(base.param(i).to_text())).collect::<Vec<_>>());
            v["components"] = label_map(self.witness.space(), components, Value::Array);
            let labels = src.labels();
            let provenance = self
                .witness
                .components()
                .iter()
                .map(|c| c.iter().map(|&i| Value::String(src.label_text(&labels[i]))).collect::<Vec<_>>());
            v["provenance"] = label_map(self.witness.space(), provenance, Value::Array);
        }
        v
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        match v.get("version").and_then(Value::as_u64) {
            Some(WITNESS_FILE_VERSION) => {}
            Some(other) => return Err(bad(format!("unsupported version {other}"))),
            None => return Err(bad("missing version")),
        }
        let space = parse_index_descriptor(v.get("index").ok_or_else(|| bad("missing index"))?)?;
        let pattern = PatternSpec::from_descriptor(v.get("pattern").ok_or_else(|| bad("missing pattern"))?)?;
        let backend = Backend::parse(v.get("backend").and_then(Value::as_str).ok_or_else(|| bad("missing backend"))?)?;
        let width = match backend {
            Backend::Boolean => v
                .get("width")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("boolean witnesses need a width"))? as usize,
            Backend::Skolem => 0,
        };
        let tuple = v.get("provenance").is_some();
        let source = match (tuple, v.get("source_index")) {
            (true, Some(s)) => parse_index_descriptor(s)?,
            (true, None) => return Err(bad("tuple witnesses need a source_index")),
            (false, _) => space,
        };
        let params = read_label_map(&source, v.get("params").ok_or_else(|| bad("missing params"))?, "params")?
            .into_iter()
            .map(|p| {
                let text = p.as_str().ok_or_else(|| bad("parameters are strings"))?;
                Param::parse(text, backend, width)
            })
            .collect::<Result<Vec<_>>>()?;
        let base = Witness::new(source, backend, width, params)?;
        let witness = if tuple {
            let components = read_label_map(&space, &v["provenance"], "provenance")?
                .into_iter()
                .map(|list| {
                    list.as_array()
                        .ok_or_else(|| bad("provenance entries are lists"))?
                        .iter()
                        .map(|t| {
                            let text = t.as_str().ok_or_else(|| bad("provenance labels are strings"))?;
                            let label = source.parse_label(text)?;
                            Ok(source.position(&label).expect("parsed"))
                        })
                        .collect::<Result<Vec<usize>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let w = TupleWitness::new(base, space, components)?;
            if let Some(listed) = v.get("components") {
                let listed = read_label_map(&space, listed, "components")?;
                for (i, entry) in listed.iter().enumerate() {
                    let want: Vec<String> = w.component_params(i).iter().map(|p| p.to_text()).collect();
                    let got: Option<Vec<&str>> = entry.as_array().and_then(|a| a.iter().map(Value::as_str).collect());
                    if got != Some(want.iter().map(String::as_str).collect()) {
                        return Err(bad("components disagree with params and provenance"));
                    }
                }
            }
            w
        } else {
            TupleWitness::identity(base)
        };
        Self::new(pattern, witness)
    }
}
