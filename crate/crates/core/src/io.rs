//! JSON encodings of complexes, chain maps and big integers.
//!
//! A complex file looks like
//!
//! ```json
//! {
//!   "group": {"type": "cyclic", "order": 5},
//!   "ranks": [1, 1, 1, 1, 1, 1],
//!   "differentials": [ [[ [[1, 0], [-1, 4]] ]], ... ],
//!   "generators": {"top": [1], "bottom": [1]}
//! }
//! ```
//!
//! Ranks and differentials run from the top degree down. Every matrix entry is
//! a list of `[coefficient, element]` terms; for cyclic groups a polynomial
//! string such as `"1 - t^4"` is accepted as well. Coefficients are JSON
//! numbers when they fit in an `i64` and decimal strings otherwise. Writing is
//! canonical (terms sorted, zero terms dropped), so a written file reads back
//! and rewrites to the same bytes.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::complex::{ChainComplex, ChainMap, Generators};
use crate::error::{Error, Result};
use crate::group::{cyclic_group, group_from_table, parse_cyclic, FiniteGroup, GroupRingElement};
use crate::grmat::GRMatrix;

pub fn bigint_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(x.to_string()),
    }
}

pub fn bigint_from_json(v: &Value, at: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(Error::Parse(format!("{at}: expected an integer, found {n}")))
            }
        }
        Value::String(s) => s.trim().parse().map_err(|_| Error::Parse(format!("{at}: bad integer {s:?}"))),
        other => Err(Error::Parse(format!("{at}: expected an integer, found {other}"))),
    }
}

/// Serde adapter for `Vec<BigInt>` fields.
pub mod bigint_vec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(super::bigint_to_json).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<serde_json::Value>::deserialize(d)?;
        raw.iter()
            .map(|v| super::bigint_from_json(v, "integer list").map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter for `Option<Vec<BigInt>>` fields (serialize only).
pub mod opt_bigint_vec {
    use num_bigint::BigInt;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|v| v.iter().map(super::bigint_to_json).collect::<Vec<_>>()).serialize(s)
    }
}

/// Serde adapter for `Option<(BigInt, BigInt)>` fields (serialize only).
pub mod opt_bigint_pair {
    use num_bigint::BigInt;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<(BigInt, BigInt)>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|(a, b)| [super::bigint_to_json(a), super::bigint_to_json(b)]).serialize(s)
    }
}

/// Serde adapter for a single `BigInt` (serialize only).
pub mod bigint {
    use num_bigint::BigInt;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        super::bigint_to_json(v).serialize(s)
    }
}

pub fn element_to_json(a: &GroupRingElement) -> Value {
    Value::Array(a.terms().iter().map(|(c, g)| json!([bigint_to_json(c), g])).collect())
}

pub fn element_from_json(group: &Arc<FiniteGroup>, v: &Value, at: &str) -> Result<GroupRingElement> {
    match v {
        Value::String(s) if group.is_cyclic() => {
            parse_cyclic(group, s).map_err(|e| Error::Parse(format!("{at}: {e}")))
        }
        Value::String(_) => Err(Error::Parse(format!("{at}: polynomial strings need a cyclic group"))),
        Value::Array(terms) => {
            let mut coeffs = vec![BigInt::from(0); group.order()];
            for (k, term) in terms.iter().enumerate() {
                let here = format!("{at}[{k}]");
                let pair = term
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| Error::Parse(format!("{here}: expected [coefficient, element]")))?;
                let c = bigint_from_json(&pair[0], &here)?;
                let g = pair[1]
                    .as_u64()
                    .map(|g| g as usize)
                    .filter(|&g| g < group.order())
                    .ok_or_else(|| Error::Parse(format!("{here}: element index out of range")))?;
                coeffs[g] += c;
            }
            GroupRingElement::from_coeffs(group, coeffs)
        }
        other => Err(Error::Parse(format!("{at}: expected a term list, found {other}"))),
    }
}

pub fn matrix_to_json(m: &GRMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(element_to_json).collect())).collect())
}

/// Reads a `rows x cols` grid. An empty grid is accepted for zero rows.
pub fn matrix_from_json(group: &Arc<FiniteGroup>, v: &Value, rows: usize, cols: usize, at: &str) -> Result<GRMatrix> {
    let grid = v.as_array().ok_or_else(|| Error::Parse(format!("{at}: expected a matrix")))?;
    if grid.len() != rows {
        return Err(Error::Parse(format!("{at}: expected {rows} rows, found {}", grid.len())));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for (i, row) in grid.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| Error::Parse(format!("{at}[{i}]: expected a row")))?;
        if row.len() != cols {
            return Err(Error::Parse(format!("{at}[{i}]: expected {cols} entries, found {}", row.len())));
        }
        for (j, e) in row.iter().enumerate() {
            entries.push(element_from_json(group, e, &format!("{at}[{i}][{j}]"))?);
        }
    }
    GRMatrix::from_entries(group, rows, cols, entries)
}

pub fn group_to_json(g: &FiniteGroup) -> Value {
    if g.is_cyclic() {
        json!({"type": "cyclic", "order": g.order()})
    } else {
        json!({"type": "table", "mul": g.mul_rows()})
    }
}

pub fn group_from_json(v: &Value) -> Result<Arc<FiniteGroup>> {
    let kind = v.get("type").and_then(Value::as_str).ok_or_else(|| Error::Parse("group.type: missing".into()))?;
    match kind {
        "cyclic" => {
            let n = v
                .get("order")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Parse("group.order: expected a positive integer".into()))?;
            cyclic_group(n as usize).map_err(|e| Error::Parse(format!("group.order: {e}")))
        }
        "table" => {
            let table: Vec<Vec<usize>> = v
                .get("mul")
                .cloned()
                .and_then(|m| serde_json::from_value(m).ok())
                .ok_or_else(|| Error::Parse("group.mul: expected a square table of indices".into()))?;
            group_from_table(&table).map_err(|e| Error::Parse(format!("group.mul: {e}")))
        }
        other => Err(Error::Parse(format!("group.type: unknown kind {other:?}"))),
    }
}

fn int_list(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(bigint_to_json).collect())
}

fn int_list_from(v: &Value, at: &str) -> Result<Vec<BigInt>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("{at}: expected a list")))?
        .iter()
        .enumerate()
        .map(|(k, x)| bigint_from_json(x, &format!("{at}[{k}]")))
        .collect()
}

pub fn complex_to_json(c: &ChainComplex) -> Value {
    let top = c.top_degree();
    let ranks: Vec<usize> = c.ranks().iter().rev().copied().collect();
    let diffs: Vec<Value> = (1..=top).rev().map(|i| matrix_to_json(c.differential(i))).collect();
    let mut out = serde_json::Map::new();
    out.insert("group".into(), group_to_json(c.group()));
    out.insert("ranks".into(), json!(ranks));
    out.insert("differentials".into(), Value::Array(diffs));
    if let Some(g) = c.generators() {
        out.insert("generators".into(), json!({"top": int_list(&g.top), "bottom": int_list(&g.bottom)}));
    }
    Value::Object(out)
}

pub fn complex_from_json(v: &Value) -> Result<ChainComplex> {
    let group = group_from_json(v.get("group").ok_or_else(|| Error::Parse("group: missing".into()))?)?;
    let ranks: Vec<usize> = v
        .get("ranks")
        .cloned()
        .and_then(|r| serde_json::from_value(r).ok())
        .ok_or_else(|| Error::Parse("ranks: expected a list of non-negative integers".into()))?;
    if ranks.is_empty() {
        return Err(Error::Parse("ranks: empty".into()));
    }
    let top = ranks.len() - 1;
    let diffs = v.get("differentials").and_then(Value::as_array).ok_or_else(|| Error::Parse("differentials: missing".into()))?;
    if diffs.len() != top {
        return Err(Error::Parse(format!("differentials: expected {top}, found {}", diffs.len())));
    }
    // ranks[k] is the rank in degree top - k; diffs[k] is d_{top - k}
    let mut by_degree = Vec::with_capacity(top);
    for (k, d) in diffs.iter().enumerate() {
        by_degree.push(matrix_from_json(&group, d, ranks[k + 1], ranks[k], &format!("differentials[{k}]"))?);
    }
    let c = ChainComplex::from_top_down(&group, ranks, by_degree)?;
    match v.get("generators") {
        None | Some(Value::Null) => Ok(c),
        Some(g) => {
            let top = int_list_from(g.get("top").unwrap_or(&Value::Null), "generators.top")?;
            let bottom = int_list_from(g.get("bottom").unwrap_or(&Value::Null), "generators.bottom")?;
            c.with_generators(Generators { top, bottom }).map_err(|e| Error::Parse(format!("generators: {e}")))
        }
    }
}

/// Component list from the top degree down.
pub fn map_to_json(f: &ChainMap) -> Value {
    json!({"components": f.components.iter().rev().map(matrix_to_json).collect::<Vec<_>>()})
}

pub fn map_from_json(v: &Value, source: &ChainComplex, target: &ChainComplex) -> Result<ChainMap> {
    let comps = v.get("components").and_then(Value::as_array).ok_or_else(|| Error::Parse("components: missing".into()))?;
    let top = source.top_degree();
    if comps.len() != top + 1 {
        return Err(Error::Parse(format!("components: expected {}, found {}", top + 1, comps.len())));
    }
    let mut by_degree = Vec::with_capacity(top + 1);
    for (k, m) in comps.iter().enumerate().rev() {
        let deg = top - k;
        by_degree.push(matrix_from_json(
            source.group(),
            m,
            target.rank(deg),
            source.rank(deg),
            &format!("components[{k}]"),
        )?);
    }
    ChainMap::new(source, target, by_degree)
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

pub fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))
}

pub fn read_complex(text: &str) -> Result<ChainComplex> {
    complex_from_json(&parse_value(text)?)
}

pub fn write_complex(c: &ChainComplex) -> String {
    to_pretty(&complex_to_json(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::norm_element;

    fn sample() -> ChainComplex {
        let g = cyclic_group(5).unwrap();
        let s = GRMatrix::single(&norm_element(&g));
        let a = GRMatrix::single(&parse_cyclic(&g, "1 - t^-1").unwrap());
        let b = GRMatrix::single(&parse_cyclic(&g, "1 - t").unwrap());
        ChainComplex::from_top_down(&g, vec![1; 6], vec![a.clone(), s.clone(), a, s, b])
            .unwrap()
            .with_generators(Generators { top: vec![1.into()], bottom: vec![1.into()] })
            .unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let c = sample();
        let text = write_complex(&c);
        let back = read_complex(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(write_complex(&back), text);
    }

    #[test]
    fn polynomial_strings_and_big_coefficients() {
        let text = r#"{"group":{"type":"cyclic","order":3},"ranks":[1,1],
            "differentials":[[["1 - t"]]]}"#;
        let c = read_complex(text).unwrap();
        assert_eq!(c.differential(1).get(0, 0).to_string(), "1 - t");

        let big = "123456789012345678901234567890";
        let text = format!(r#"{{"group":{{"type":"cyclic","order":2}},"ranks":[1,1],"differentials":[[[[["{big}",1]]]]]}}"#);
        let c = read_complex(&text).unwrap();
        let out = write_complex(&c);
        assert!(out.contains(&format!("\"{big}\"")));
        assert_eq!(write_complex(&read_complex(&out).unwrap()), out);
    }

    #[test]
    fn table_groups() {
        let text = r#"{"group":{"type":"table","mul":[[0,1],[1,0]]},"ranks":[1,1],
            "differentials":[[[[[1,0],[1,1]]]]]}"#;
        let c = read_complex(text).unwrap();
        assert_eq!(c.group().order(), 2);
        assert_eq!(write_complex(&read_complex(&write_complex(&c)).unwrap()), write_complex(&c));
    }

    #[test]
    fn errors_carry_locations() {
        let bad = r#"{"group":{"type":"cyclic","order":3},"ranks":[1,1],"differentials":[[[[[1,7]]]]]}"#;
        let e = read_complex(bad).unwrap_err().to_string();
        assert!(e.contains("differentials[0][0][0][0]"), "{e}");
        let bad = r#"{"group":{"type":"cyclic","order":3},"ranks":[2,1],"differentials":[[[[]]]]}"#;
        assert!(read_complex(bad).unwrap_err().to_string().contains("differentials[0]"));
        assert!(read_complex("{").unwrap_err().to_string().contains("line 1"));
    }
}
