//! Browser bindings. Each operation takes a JSON request and returns a JSON
//! response; the `#[wasm_bindgen]` exports are thin wrappers so the same
//! functions can be exercised natively.

use facloc::io::families;
use facloc::mechanisms::{Diagnostics, Instance, Mechanism, Mediator, MechanismOutcome};
use facloc::oracle::{competitive_report, optimal_location, CostReport, Ratio};
use facloc::rational::{self, int, Rational};
use facloc::{PointRef, TreeMetric};
use serde::Deserialize;
use serde_json::{json, Map, Value};
use wasm_bindgen::prelude::*;

const MAX_LINE: usize = 60;
const MAX_AGENTS: usize = 200;

fn exact(r: &Rational) -> Value {
    json!({ "exact": rational::format(r), "value": rational::to_f64(r) })
}

fn ratio_json(r: &Ratio) -> Value {
    match r {
        Ratio::Finite(x) => exact(x),
        Ratio::Infinite => json!({ "exact": "inf", "value": null }),
    }
}

fn report_json(report: &CostReport) -> Value {
    json!({
        "cost": exact(&report.cost),
        "optimal_cost": exact(&report.optimal_cost),
        "ratio": ratio_json(&report.ratio),
    })
}

fn distribution_json(metric: &TreeMetric, outcome: &MechanismOutcome) -> Value {
    let mut map = Map::new();
    for (p, q) in outcome.to_distribution().iter() {
        map.insert(metric.label(p), exact(q));
    }
    Value::Object(map)
}

fn to_string(v: Value) -> Result<String, String> {
    serde_json::to_string(&v).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
struct LineRequest {
    /// Number of unit edges; vertices are named "0" to `length`.
    length: usize,
    /// Agent positions per mediator, as vertex indices.
    mediators: Vec<Vec<usize>>,
}

fn line_instance(req: &LineRequest) -> Result<Instance, String> {
    if req.length == 0 || req.length > MAX_LINE {
        return Err(format!("length must be between 1 and {MAX_LINE}"));
    }
    let agents: usize = req.mediators.iter().map(Vec::len).sum();
    if agents > MAX_AGENTS {
        return Err(format!("at most {MAX_AGENTS} agents"));
    }
    let names: Vec<String> = (0..=req.length).map(|i| i.to_string()).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let metric = TreeMetric::path_graph(&refs, &vec![int(1); req.length]).map_err(|e| e.to_string())?;
    let zero = PointRef::Vertex(metric.vertex("0").expect("vertex 0"));
    let mut mediators = Vec::new();
    for (i, positions) in req.mediators.iter().enumerate() {
        let mut pts = Vec::new();
        for &x in positions {
            let v = metric.vertex(&x.to_string()).ok_or_else(|| format!("position {x} is off the line"))?;
            pts.push(PointRef::Vertex(v));
        }
        mediators.push(Mediator { name: format!("d{}", i + 1), z: zero.clone(), agents: pts });
    }
    Instance::new(metric, zero, mediators).map_err(|e| e.to_string())
}

/// Runs WMM, TPRM and TRM on a unit-spaced line and reports the optimum.
pub fn line_explorer(request: &str) -> Result<String, String> {
    let req: LineRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let inst = line_instance(&req)?;
    let medians = inst.mediator_medians().map_err(|e| e.to_string())?;
    let mut mechanisms = Map::new();
    for m in [Mechanism::Wmm, Mechanism::Tprm, Mechanism::Trm] {
        let out = m.run(&inst).map_err(|e| e.to_string())?;
        let report = competitive_report(&inst, &out).map_err(|e| e.to_string())?;
        mechanisms.insert(
            m.name().to_string(),
            json!({ "distribution": distribution_json(&inst.metric, &out), "report": report_json(&report) }),
        );
    }
    let (opt, cost) = optimal_location(&inst.metric, &inst.agents()).map_err(|e| e.to_string())?;
    to_string(json!({
        "medians": medians.iter().map(|(p, _)| inst.metric.label(p)).collect::<Vec<_>>(),
        "mechanisms": mechanisms,
        "optimum": { "location": inst.metric.label(&opt), "cost": exact(&cost) },
    }))
}

#[derive(Deserialize)]
struct CurveRequest {
    r_max: usize,
}

/// Ratios of WMM, TPRM and TRM on the two-mediator unit-interval family for
/// `r = 1..=r_max`.
pub fn unit_interval_curves(request: &str) -> Result<String, String> {
    let req: CurveRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    if req.r_max == 0 || req.r_max > 100 {
        return Err("r_max must be between 1 and 100".into());
    }
    let mut rows = Vec::with_capacity(req.r_max);
    for r in 1..=req.r_max {
        let inst = families::ex51(&int(0), &int(1), r, 1).map_err(|e| e.to_string())?;
        let mut row = Map::new();
        row.insert("r".into(), json!(r));
        for m in [Mechanism::Wmm, Mechanism::Tprm, Mechanism::Trm] {
            let out = m.run(&inst).map_err(|e| e.to_string())?;
            let report = competitive_report(&inst, &out).map_err(|e| e.to_string())?;
            row.insert(m.name().into(), ratio_json(&report.ratio));
        }
        rows.push(Value::Object(row));
    }
    to_string(json!({ "rows": rows }))
}

#[derive(Deserialize)]
struct TreeRequest {
    /// Agents co-located with each named mediator; zero drops the mediator.
    sizes: Map<String, Value>,
}

/// TRM on the eight-vertex example tree with adjustable mediator sizes.
pub fn tree_trm(request: &str) -> Result<String, String> {
    let req: TreeRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let base = families::fig1_tree();
    let mut mediators = Vec::new();
    for m in &base.mediators {
        let size = match req.sizes.get(&m.name) {
            Some(v) => v.as_u64().ok_or_else(|| format!("size of {} must be a whole number", m.name))? as usize,
            None => m.agents.len(),
        };
        if size > MAX_AGENTS {
            return Err(format!("at most {MAX_AGENTS} agents per mediator"));
        }
        if size > 0 {
            mediators.push(Mediator { agents: vec![m.z.clone(); size], ..m.clone() });
        }
    }
    if mediators.is_empty() {
        return Err("at least one mediator needs agents".into());
    }
    let inst = Instance::new(base.metric.clone(), base.z.clone(), mediators).map_err(|e| e.to_string())?;
    let out = Mechanism::Trm.run(&inst).map_err(|e| e.to_string())?;
    let report = competitive_report(&inst, &out).map_err(|e| e.to_string())?;
    let Diagnostics::Trm(diag) = &out.diagnostics else {
        return Err("unexpected diagnostics".into());
    };
    let vertices: Vec<Value> = diag
        .vertices
        .iter()
        .map(|v| {
            json!({
                "name": inst.metric.label(&v.point),
                "parent": v.parent.map(|p| inst.metric.label(&diag.vertices[p.0].point)),
                "size": v.size,
                "treesize": v.treesize,
                "in_x": v.in_x,
                "p": exact(&v.p),
            })
        })
        .collect();
    let edges: Vec<Value> = inst
        .metric
        .edges()
        .iter()
        .map(|e| json!([inst.metric.name(e.a), inst.metric.name(e.b)]))
        .collect();
    to_string(json!({
        "root": inst.metric.label(&diag.root),
        "vertices": vertices,
        "edges": edges,
        "report": report_json(&report),
    }))
}

fn export(result: Result<String, String>) -> Result<String, JsError> {
    result.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = lineExplorer)]
pub fn line_explorer_js(request: &str) -> Result<String, JsError> {
    export(line_explorer(request))
}

#[wasm_bindgen(js_name = unitIntervalCurves)]
pub fn unit_interval_curves_js(request: &str) -> Result<String, JsError> {
    export(unit_interval_curves(request))
}

#[wasm_bindgen(js_name = treeTrm)]
pub fn tree_trm_js(request: &str) -> Result<String, JsError> {
    export(tree_trm(request))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: Result<String, String>) -> Value {
        serde_json::from_str(&s.unwrap()).unwrap()
    }

    #[test]
    fn line_matches_the_unit_interval_family() {
        let v = parse(line_explorer(r#"{"length": 1, "mediators": [[0, 0, 0, 1, 1], [1, 1, 1, 1, 1]]}"#));
        assert_eq!(v["mechanisms"]["wmm"]["report"]["ratio"]["exact"], "7/3");
        assert_eq!(v["mechanisms"]["tprm"]["report"]["ratio"]["exact"], "5/3");
        assert_eq!(v["mechanisms"]["trm"]["distribution"], v["mechanisms"]["tprm"]["distribution"]);
        assert_eq!(v["optimum"]["location"], "1");
    }

    #[test]
    fn line_rejects_bad_requests() {
        assert!(line_explorer(r#"{"length": 2, "mediators": [[5]]}"#).is_err());
        assert!(line_explorer(r#"{"length": 0, "mediators": [[0]]}"#).is_err());
        assert!(line_explorer(r#"{"length": 2, "mediators": []}"#).is_err());
        assert!(line_explorer("nope").is_err());
    }

    #[test]
    fn curves_approach_the_bounds() {
        let v = parse(unit_interval_curves(r#"{"r_max": 49}"#));
        let last = &v["rows"][48];
        assert_eq!(last["wmm"]["exact"], "74/25");
        assert_eq!(last["tprm"]["exact"], "99/50");
        assert_eq!(last["trm"]["exact"], "99/50");
        assert!(unit_interval_curves(r#"{"r_max": 0}"#).is_err());
    }

    #[test]
    fn tree_defaults_reproduce_the_example() {
        let v = parse(tree_trm(r#"{"sizes": {}}"#));
        assert_eq!(v["root"], "R");
        let p = |name: &str| {
            v["vertices"].as_array().unwrap().iter().find(|x| x["name"] == name).unwrap()["p"]["exact"].clone()
        };
        assert_eq!(p("R"), "12/25");
        assert_eq!(p("B"), "1/50");
        assert_eq!(v["edges"].as_array().unwrap().len(), 7);
    }

    #[test]
    fn tree_sizes_can_change_or_drop_mediators() {
        let v = parse(tree_trm(r#"{"sizes": {"R": 0, "A": 0, "B": 0, "B1": 0, "D": 0, "D1": 0, "F": 3}}"#));
        assert_eq!(v["root"], "F");
        assert_eq!(v["report"]["ratio"]["exact"], "1/1");
        assert!(tree_trm(r#"{"sizes": {"R": 0, "A": 0, "B": 0, "B1": 0, "D": 0, "D1": 0, "F": 0}}"#).is_err());
        assert!(tree_trm(r#"{"sizes": {"R": -1}}"#).is_err());
    }
}
