//! JSON schemas for graphs, order isomorphisms, metrics, jump/killing data
//! and verification reports.
//!
//! Every real number is written with 17 significant digits (`%.17g`), which
//! round-trips any double exactly.

use std::collections::HashMap;

use dirikit::{GraphForm, JumpKilling, MeasureSpace, OrderIso, PseudoMetric, VerificationReport};
use serde::Deserialize;
use serde_json::{Map, Number, Value};

use crate::error::{CliError, Result};

/// `x` in `%.17g` style: fixed notation for decimal exponents in `[-5, 17)`,
/// scientific otherwise, trailing zeros removed.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let fixed = format!("{x:.*}", (16 - exp) as usize);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A JSON number carrying exactly [`format_f64`]'s digits; `null` when not
/// finite.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(format_f64(x).parse::<Number>().expect("valid JSON number"))
}

pub fn num_array(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// `{vertex: value}` in vertex order.
pub fn vertex_map(space: &MeasureSpace, values: &[f64]) -> Value {
    let mut m = Map::new();
    for (id, &v) in space.vertices().iter().zip(values) {
        m.insert(id.clone(), num(v));
    }
    Value::Object(m)
}

fn object<const N: usize>(entries: [(&str, Value); N]) -> Value {
    Value::Object(
        entries
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
    )
}

/// Pretty-printed JSON followed by a newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_value(text: &str, origin: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| CliError::Json {
        origin: origin.to_string(),
        message: e.to_string(),
    })
}

fn from_value<T: for<'de> Deserialize<'de>>(v: Value, origin: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| CliError::Json {
        origin: origin.to_string(),
        message: e.to_string(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: Vec<String>,
    m: HashMap<String, f64>,
    #[serde(default)]
    edges: Vec<EdgeDoc>,
    #[serde(default)]
    killing: HashMap<String, f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    u: String,
    v: String,
    b: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IsoDoc {
    tau: HashMap<String, String>,
    h: HashMap<String, f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricDoc {
    d: Vec<Vec<f64>>,
}

fn unknown_keys<'a>(
    keys: impl Iterator<Item = &'a String>,
    vertices: &[String],
    what: &str,
) -> Result<()> {
    for k in keys {
        if !vertices.contains(k) {
            return Err(CliError::Input(format!(
                "{what} names unknown vertex `{k}`"
            )));
        }
    }
    Ok(())
}

pub fn graph_from_value(v: Value, origin: &str) -> Result<GraphForm> {
    let doc: GraphDoc = from_value(v, origin)?;
    unknown_keys(doc.m.keys(), &doc.vertices, "\"m\"")?;
    let mut builder = GraphForm::builder();
    for id in &doc.vertices {
        let m = doc
            .m
            .get(id)
            .ok_or_else(|| CliError::Input(format!("{origin}: no measure for vertex `{id}`")))?;
        builder = builder.vertex(id.clone(), *m);
    }
    for e in doc.edges {
        builder = builder.edge(e.u, e.v, e.b);
    }
    let mut killing: Vec<_> = doc.killing.into_iter().collect();
    killing.sort_by(|a, b| a.0.cmp(&b.0));
    for (id, c) in killing {
        builder = builder.killing(id, c);
    }
    Ok(builder.build()?)
}

pub fn graph_to_value(q: &GraphForm) -> Value {
    let space = q.space();
    let vertices = space
        .vertices()
        .iter()
        .cloned()
        .map(Value::String)
        .collect();
    let edges = q
        .edges()
        .map(|(i, j, b)| {
            object([
                ("u", Value::String(space.vertex(i).to_string())),
                ("v", Value::String(space.vertex(j).to_string())),
                ("b", num(b)),
            ])
        })
        .collect();
    let mut killing = Map::new();
    for (id, &c) in space.vertices().iter().zip(q.killing()) {
        if c != 0.0 {
            killing.insert(id.clone(), num(c));
        }
    }
    object([
        ("vertices", Value::Array(vertices)),
        ("m", vertex_map(space, space.measure())),
        ("edges", Value::Array(edges)),
        ("killing", Value::Object(killing)),
    ])
}

pub fn iso_from_value(
    v: Value,
    source: &MeasureSpace,
    target: &MeasureSpace,
    origin: &str,
) -> Result<OrderIso> {
    let doc: IsoDoc = from_value(v, origin)?;
    Ok(OrderIso::from_labels(
        source.clone(),
        target.clone(),
        doc.tau.iter().map(|(y, x)| (y.as_str(), x.as_str())),
        doc.h.iter().map(|(y, h)| (y.as_str(), *h)),
    )?)
}

pub fn iso_to_value(u: &OrderIso) -> Value {
    let (source, target) = (u.source(), u.target());
    let mut tau = Map::new();
    for (y, &x) in u.tau().iter().enumerate() {
        tau.insert(
            target.vertex(y).to_string(),
            Value::String(source.vertex(x).to_string()),
        );
    }
    object([
        ("tau", Value::Object(tau)),
        ("h", vertex_map(target, u.scaling())),
    ])
}

pub fn metric_from_value(v: Value, n: usize, origin: &str) -> Result<PseudoMetric> {
    let doc: MetricDoc = from_value(v, origin)?;
    if doc.d.len() != n {
        return Err(CliError::Input(format!(
            "{origin}: metric has {} rows, the graph has {n} vertices",
            doc.d.len()
        )));
    }
    Ok(PseudoMetric::from_rows(&doc.d)?)
}

pub fn metric_to_value(d: &PseudoMetric) -> Value {
    let rows = d.rows().iter().map(|r| num_array(r)).collect();
    object([("d", Value::Array(rows))])
}

pub fn jump_killing_to_value(jk: &JumpKilling) -> Value {
    let space = jk.space();
    let vertices = space
        .vertices()
        .iter()
        .cloned()
        .map(Value::String)
        .collect();
    let jumps = jk
        .jumps()
        .map(|(x, y, j)| {
            object([
                ("u", Value::String(space.vertex(x).to_string())),
                ("v", Value::String(space.vertex(y).to_string())),
                ("j", num(j)),
            ])
        })
        .collect();
    object([
        ("vertices", Value::Array(vertices)),
        ("m", vertex_map(space, space.measure())),
        ("J", Value::Array(jumps)),
        ("k", vertex_map(space, jk.killing())),
    ])
}

pub fn report_to_value(r: &VerificationReport) -> Value {
    let checks = r
        .checks()
        .iter()
        .map(|c| {
            let mut o = Map::new();
            o.insert("name".into(), Value::String(c.name.clone()));
            o.insert("residual".into(), num(c.residual));
            o.insert("tol".into(), num(c.tol));
            o.insert("pass".into(), Value::Bool(c.pass));
            if let Some(d) = &c.detail {
                o.insert("detail".into(), Value::String(d.clone()));
            }
            Value::Object(o)
        })
        .collect();
    object([
        ("checks", Value::Array(checks)),
        ("verdict", Value::Bool(r.verdict())),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_f64(1.0), "1");
        assert_eq!(format_f64(0.1), "0.10000000000000001");
        assert_eq!(format_f64(-2.5), "-2.5");
        assert_eq!(format_f64(1e20), "1e20");
        assert_eq!(format_f64(1.5e-7), "1.4999999999999999e-7");
        assert_eq!(format_f64(123456.0), "123456");
        assert_eq!(format_f64(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(format_f64(2.0 / 3.0), "0.66666666666666663");
        for x in [
            0.1,
            1.0 / 3.0,
            1e-300,
            5e-324,
            f64::MAX,
            12345.678,
            -7e16,
            9.999999999999999e16,
        ] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x, "{x}");
        }
    }

    #[test]
    fn non_finite_is_null() {
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(num(f64::INFINITY), Value::Null);
    }

    #[test]
    fn graph_round_trip() {
        let q = GraphForm::builder()
            .vertex("a", 0.1)
            .vertex("b", 2.0 / 3.0)
            .vertex("c", 1.0)
            .edge("a", "b", 1.0 / 7.0)
            .edge("b", "c", 3.0)
            .killing("c", 0.3)
            .build()
            .unwrap();
        let text = render(&graph_to_value(&q));
        let back = graph_from_value(parse_value(&text, "t").unwrap(), "t").unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn graph_rejects_bad_input() {
        let bad = [
            r#"{"vertices":["a"],"m":{}}"#,
            r#"{"vertices":["a"],"m":{"a":1,"z":1}}"#,
            r#"{"vertices":["a"],"m":{"a":-1}}"#,
            r#"{"vertices":["a","b"],"m":{"a":1,"b":1},"edges":[{"u":"a","v":"q","b":1}]}"#,
            r#"{"vertices":["a"],"m":{"a":1},"extra":0}"#,
        ];
        for text in bad {
            let v = parse_value(text, "t").unwrap();
            assert!(graph_from_value(v, "t").is_err(), "{text}");
        }
        assert!(parse_value("{", "t").is_err());
    }
}
