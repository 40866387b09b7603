//! JSON instance documents.
//!
//! ```json
//! {
//!   "version": 1,
//!   "metric": {
//!     "vertices": ["0", "1"],
//!     "edges": [{ "a": "0", "b": "1", "length": "1/1" }]
//!   },
//!   "z": "0",
//!   "mediators": [{ "name": "d1", "z": "0", "agents": ["0", "0~1@1/3"] }]
//! }
//! ```
//!
//! A hierarchy document replaces `z` and `mediators` by `hierarchy`, a tree of
//! nodes that are either mediators (`name`, `z`, `children`) or agents
//! (`location`, optional `name`). The root is the center.
//!
//! Points are vertex names or `a~b@offset` with the offset measured from `a`.
//! Rationals are `"num/den"` strings; decimals are rejected.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::mechanisms::{HierarchyInstance, HierarchyNode, Instance, Mediator};
use crate::rational;
use crate::tree_metric::{Edge, PointRef, TreeMetric, VertexId};
use crate::{Error, Result};

pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Instance(Instance),
    Hierarchy(HierarchyInstance),
}

impl Document {
    pub fn metric(&self) -> &Arc<TreeMetric> {
        match self {
            Document::Instance(i) => &i.metric,
            Document::Hierarchy(h) => &h.metric,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentRepr {
    version: u32,
    metric: MetricRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    z: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mediators: Option<Vec<MediatorRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hierarchy: Option<NodeRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricRepr {
    vertices: Vec<String>,
    edges: Vec<EdgeRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRepr {
    a: String,
    b: String,
    length: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MediatorRepr {
    name: String,
    z: String,
    agents: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    z: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    children: Option<Vec<NodeRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    location: Option<String>,
}

/// Parses and validates a document. Errors name the offending field.
pub fn parse(text: &str) -> Result<Document> {
    let mut de = serde_json::Deserializer::from_str(text);
    let repr: DocumentRepr = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        Error::Document {
            path: if path == "?" { ".".into() } else { path },
            message: e.inner().to_string(),
        }
    })?;
    de.end().map_err(|e| Error::Document {
        path: ".".into(),
        message: e.to_string(),
    })?;
    if repr.version != VERSION {
        return Err(Error::InvalidParams(format!("unsupported version {}", repr.version)).at("version"));
    }
    let metric = Arc::new(build_metric(&repr.metric)?);
    let point = |text: &str, path: String| metric.parse_point(text).map_err(|e| e.at(path));
    match (repr.mediators, repr.hierarchy) {
        (Some(mediators), None) => {
            let z = repr
                .z
                .ok_or_else(|| Error::InvalidInstance("missing global tie-break".into()).at("z"))?;
            let z = point(&z, "z".into())?;
            let mediators = mediators
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    Ok(Mediator {
                        name: m.name.clone(),
                        z: point(&m.z, format!("mediators[{i}].z"))?,
                        agents: m
                            .agents
                            .iter()
                            .enumerate()
                            .map(|(j, a)| point(a, format!("mediators[{i}].agents[{j}]")))
                            .collect::<Result<_>>()?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let inst = Instance::new(metric, z, mediators).map_err(|e| e.at("mediators"))?;
            Ok(Document::Instance(inst))
        }
        (None, Some(root)) => {
            if repr.z.is_some() {
                return Err(Error::InvalidInstance("hierarchy documents carry z on the center node".into()).at("z"));
            }
            let center = build_node(&metric, &root, "hierarchy".into())?;
            let h = HierarchyInstance::new(metric, center).map_err(|e| e.at("hierarchy"))?;
            Ok(Document::Hierarchy(h))
        }
        _ => Err(Error::InvalidInstance("exactly one of `mediators` and `hierarchy` is required".into()).at(".")),
    }
}

fn build_metric(repr: &MetricRepr) -> Result<TreeMetric> {
    let mut names = repr.vertices.clone();
    names.sort();
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut edges = Vec::with_capacity(repr.edges.len());
    for (i, e) in repr.edges.iter().enumerate() {
        let lookup = |name: &str, field: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownVertex(name.to_string()).at(format!("metric.edges[{i}].{field}")))
        };
        let (a, b) = (lookup(&e.a, "a")?, lookup(&e.b, "b")?);
        let length = rational::parse(&e.length).map_err(|err| err.at(format!("metric.edges[{i}].length")))?;
        edges.push(Edge {
            a: VertexId(a.min(b)),
            b: VertexId(a.max(b)),
            length,
        });
    }
    edges.sort_by_key(|e| (e.a, e.b));
    TreeMetric::new(names, edges).map_err(|e| e.at("metric"))
}

fn build_node(metric: &TreeMetric, repr: &NodeRepr, path: String) -> Result<HierarchyNode> {
    match (&repr.children, &repr.location) {
        (Some(children), None) => {
            let name = repr
                .name
                .clone()
                .ok_or_else(|| Error::InvalidInstance("mediator nodes need a name".into()).at(format!("{path}.name")))?;
            let z = repr
                .z
                .as_deref()
                .ok_or_else(|| Error::InvalidInstance("mediator nodes need z".into()).at(format!("{path}.z")))?;
            let z = metric.parse_point(z).map_err(|e| e.at(format!("{path}.z")))?;
            let children = children
                .iter()
                .enumerate()
                .map(|(i, c)| build_node(metric, c, format!("{path}.children[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Ok(HierarchyNode::Mediator { name, z, children })
        }
        (None, Some(location)) => {
            if repr.z.is_some() {
                return Err(Error::InvalidInstance("agent nodes have no z".into()).at(format!("{path}.z")));
            }
            let location = metric.parse_point(location).map_err(|e| e.at(format!("{path}.location")))?;
            Ok(HierarchyNode::Agent {
                name: repr.name.clone(),
                location,
            })
        }
        _ => Err(Error::InvalidInstance("a node has either `children` or `location`".into()).at(path)),
    }
}

fn metric_repr(metric: &TreeMetric) -> MetricRepr {
    let mut vertices: Vec<String> = metric.vertices().map(|v| metric.name(v).to_string()).collect();
    vertices.sort();
    let mut edges: Vec<EdgeRepr> = metric
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (metric.name(e.a), metric.name(e.b));
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            EdgeRepr {
                a: a.to_string(),
                b: b.to_string(),
                length: rational::format(&e.length),
            }
        })
        .collect();
    edges.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    MetricRepr { vertices, edges }
}

fn node_repr(metric: &TreeMetric, node: &HierarchyNode) -> NodeRepr {
    match node {
        HierarchyNode::Mediator { name, z, children } => NodeRepr {
            name: Some(name.clone()),
            z: Some(metric.label(z)),
            children: Some(children.iter().map(|c| node_repr(metric, c)).collect()),
            location: None,
        },
        HierarchyNode::Agent { name, location } => NodeRepr {
            name: name.clone(),
            z: None,
            children: None,
            location: Some(metric.label(location)),
        },
    }
}

/// Canonical text: vertices sorted by name, edges by endpoint names, points
/// in label form, two-space indentation and a trailing newline.
pub fn serialize(doc: &Document) -> String {
    let repr = match doc {
        Document::Instance(inst) => DocumentRepr {
            version: VERSION,
            metric: metric_repr(&inst.metric),
            z: Some(inst.metric.label(&inst.z)),
            mediators: Some(
                inst.mediators
                    .iter()
                    .map(|m| MediatorRepr {
                        name: m.name.clone(),
                        z: inst.metric.label(&m.z),
                        agents: m.agents.iter().map(|a| inst.metric.label(a)).collect(),
                    })
                    .collect(),
            ),
            hierarchy: None,
        },
        Document::Hierarchy(h) => DocumentRepr {
            version: VERSION,
            metric: metric_repr(&h.metric),
            z: None,
            mediators: None,
            hierarchy: Some(node_repr(&h.metric, &h.center)),
        },
    };
    let mut text = serde_json::to_string_pretty(&repr).expect("documents always serialize");
    text.push('\n');
    text
}

/// SHA-256 of the canonical serialization, in hex.
pub fn digest(doc: &Document) -> String {
    Sha256::digest(serialize(doc).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Points in label form, handy for reports.
pub fn labels(metric: &TreeMetric, points: &[PointRef]) -> Vec<String> {
    points.iter().map(|p| metric.label(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::families;
    use crate::rational::int;

    const MINIMAL: &str = r#"{
  "version": 1,
  "metric": { "vertices": ["x"], "edges": [] },
  "z": "x",
  "mediators": [{ "name": "d", "z": "x", "agents": ["x"] }]
}"#;

    #[test]
    fn minimal_document() {
        let Document::Instance(inst) = parse(MINIMAL).unwrap() else {
            panic!("expected an instance");
        };
        assert_eq!(inst.agent_count(), 1);
    }

    fn error_path(text: &str) -> String {
        match parse(text) {
            Err(Error::Document { path, .. }) => path,
            other => panic!("expected a document error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_fields_with_locations() {
        let zero_length = MINIMAL
            .replace(r#"["x"], "edges": []"#, r#"["x", "y"], "edges": [{"a": "x", "b": "y", "length": "0/1"}]"#);
        assert_eq!(error_path(&zero_length), "metric");
        let decimal = zero_length.replace("0/1", "0.5");
        assert_eq!(error_path(&decimal), "metric.edges[0].length");
        let unknown = MINIMAL.replace(r#""agents": ["x"]"#, r#""agents": ["q"]"#);
        assert_eq!(error_path(&unknown), "mediators[0].agents[0]");
        let empty = MINIMAL.replace(r#""agents": ["x"]"#, r#""agents": []"#);
        assert_eq!(error_path(&empty), "mediators");
        let extra = MINIMAL.replace(r#""version": 1,"#, r#""version": 1, "bogus": 3,"#);
        assert!(matches!(parse(&extra), Err(Error::Document { .. })));
        assert_eq!(error_path("{"), ".");
        let cyclic = MINIMAL.replace(
            r#"["x"], "edges": []"#,
            r#"["x", "y", "w"], "edges": [{"a": "x", "b": "y", "length": "1"}, {"a": "y", "b": "x", "length": "1"}]"#,
        );
        assert_eq!(error_path(&cyclic), "metric");
        let offset = zero_length.replace("0/1", "1/1").replace(r#""agents": ["x"]"#, r#""agents": ["x~y@2"]"#);
        assert_eq!(error_path(&offset), "mediators[0].agents[0]");
    }

    #[test]
    fn families_round_trip() {
        let docs = [
            Document::Instance(families::fig1_tree()),
            Document::Instance(families::ex51(&int(0), &int(1), 2, 1).unwrap()),
            Document::Hierarchy(families::sec6_example()),
            Document::Hierarchy(families::ex61(2, 4, 2).unwrap()),
        ];
        for doc in docs {
            let text = serialize(&doc);
            let back = parse(&text).unwrap();
            assert_eq!(serialize(&back), text);
            assert_eq!(digest(&back), digest(&doc));
        }
    }

    #[test]
    fn interior_points_survive() {
        let text = MINIMAL
            .replace(r#"["x"], "edges": []"#, r#"["y", "x"], "edges": [{"a": "y", "b": "x", "length": "3/2"}]"#)
            .replace(r#""agents": ["x"]"#, r#""agents": ["y~x@1/2", "x~y@1/2"]"#);
        let doc = parse(&text).unwrap();
        let out = serialize(&doc);
        assert!(out.contains(r#""x~y@1/1""#), "{out}");
        assert!(out.contains(r#""x~y@1/2""#), "{out}");
        assert_eq!(serialize(&parse(&out).unwrap()), out);
    }
}
