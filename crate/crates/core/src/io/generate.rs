//! Seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mechanisms::{HierarchyInstance, HierarchyNode, Instance, Mediator};
use crate::rational::{self, Rational};
use crate::tree_metric::{Edge, EdgeId, PointRef, TreeMetric, VertexId};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorParams {
    pub seed: u64,
    /// Inclusive range of vertex counts.
    pub vertices: (usize, usize),
    /// Edge lengths are drawn from `min + (max - min) * k / length_steps`.
    pub length_min: Rational,
    pub length_max: Rational,
    pub length_steps: u32,
    pub mediators: (usize, usize),
    pub agents_per_mediator: (usize, usize),
    /// Only generate path graphs.
    pub path_only: bool,
    /// Probability (in percent) that an agent sits strictly inside an edge.
    pub interior_percent: u8,
    /// Interior offsets are multiples of `length / offset_steps`.
    pub offset_steps: u32,
    /// Draw tie-break points at random instead of using the first vertex.
    pub random_tie_breaks: bool,
    /// Hierarchy depth for [`gen_hierarchy`].
    pub depth: Option<usize>,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            seed: 0,
            vertices: (1, 8),
            length_min: rational::one(),
            length_max: rational::int(4),
            length_steps: 6,
            mediators: (1, 4),
            agents_per_mediator: (1, 5),
            path_only: false,
            interior_percent: 25,
            offset_steps: 4,
            random_tie_breaks: true,
            depth: None,
        }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<()> {
        let range = |(lo, hi): (usize, usize), what: &str| {
            if lo == 0 || lo > hi {
                Err(Error::InvalidParams(format!("{what} range {lo}..={hi} must be non-empty and start at 1")))
            } else {
                Ok(())
            }
        };
        range(self.vertices, "vertex")?;
        range(self.mediators, "mediator")?;
        range(self.agents_per_mediator, "agents-per-mediator")?;
        if self.length_min <= rational::zero() || self.length_min > self.length_max {
            return Err(Error::InvalidParams("need 0 < length-min <= length-max".into()));
        }
        if self.length_steps == 0 || self.offset_steps < 2 {
            return Err(Error::InvalidParams("need length-steps >= 1 and offset-steps >= 2".into()));
        }
        if self.interior_percent > 100 {
            return Err(Error::InvalidParams("interior-percent is at most 100".into()));
        }
        if self.depth == Some(0) {
            return Err(Error::InvalidParams("hierarchy depth must be at least 1".into()));
        }
        Ok(())
    }
}

/// Decodes a Prüfer sequence over `0..n` into an edge list.
fn prufer_edges(sequence: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in sequence {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in sequence {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf exists");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn random_metric(params: &GeneratorParams, rng: &mut ChaCha8Rng) -> TreeMetric {
    let n = rng.gen_range(params.vertices.0..=params.vertices.1);
    let width = (n.max(2) - 1).to_string().len();
    let names: Vec<String> = (0..n).map(|i| format!("v{i:0width$}")).collect();
    let pairs: Vec<(usize, usize)> = if n < 2 {
        Vec::new()
    } else if params.path_only {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        order.windows(2).map(|w| (w[0], w[1])).collect()
    } else if n == 2 {
        vec![(0, 1)]
    } else {
        let sequence: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
        prufer_edges(&sequence, n)
    };
    let span = &params.length_max - &params.length_min;
    let edges = pairs
        .into_iter()
        .map(|(a, b)| {
            let k = rng.gen_range(0..=params.length_steps);
            Edge {
                a: VertexId(a),
                b: VertexId(b),
                length: &params.length_min + &span * rational::frac(k as i64, params.length_steps as i64),
            }
        })
        .collect();
    TreeMetric::new(names, edges).expect("generated trees are valid")
}

fn random_point(metric: &TreeMetric, params: &GeneratorParams, rng: &mut ChaCha8Rng) -> PointRef {
    if metric.edge_count() > 0 && rng.gen_range(0..100) < params.interior_percent {
        let e = rng.gen_range(0..metric.edge_count());
        let k = rng.gen_range(1..params.offset_steps);
        let offset = &metric.edge(EdgeId(e)).length * rational::frac(k as i64, params.offset_steps as i64);
        metric.point_on_edge(EdgeId(e), offset).expect("interior offset")
    } else {
        PointRef::Vertex(VertexId(rng.gen_range(0..metric.vertex_count())))
    }
}

fn tie_break(metric: &TreeMetric, params: &GeneratorParams, rng: &mut ChaCha8Rng) -> PointRef {
    if params.random_tie_breaks {
        random_point(metric, params, rng)
    } else {
        PointRef::Vertex(VertexId(0))
    }
}

/// A random single-level instance; the seed fully determines the output.
pub fn gen_random(params: &GeneratorParams) -> Result<Instance> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let metric = random_metric(params, &mut rng);
    let k = rng.gen_range(params.mediators.0..=params.mediators.1);
    let mediators = (0..k)
        .map(|i| {
            let count = rng.gen_range(params.agents_per_mediator.0..=params.agents_per_mediator.1);
            let agents = (0..count).map(|_| random_point(&metric, params, &mut rng)).collect();
            Mediator {
                name: format!("d{}", i + 1),
                z: tie_break(&metric, params, &mut rng),
                agents,
            }
        })
        .collect();
    let z = tie_break(&metric, params, &mut rng);
    Instance::new(metric, z, mediators)
}

/// A random mediation tree of exactly the requested depth (default 2). Each
/// mediator has between `mediators.0` and `mediators.1` children; the first
/// child always reaches full depth, later children may stop early.
pub fn gen_hierarchy(params: &GeneratorParams) -> Result<HierarchyInstance> {
    params.validate()?;
    let depth = params.depth.unwrap_or(2);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let metric = random_metric(params, &mut rng);
    let mut counter = 0usize;

    fn node(
        level: usize,
        full: bool,
        metric: &TreeMetric,
        params: &GeneratorParams,
        rng: &mut ChaCha8Rng,
        counter: &mut usize,
    ) -> HierarchyNode {
        *counter += 1;
        let name = if full && *counter == 1 { "center".to_string() } else { format!("m{}", *counter - 1) };
        let z = tie_break(metric, params, rng);
        let children = if level == 1 {
            let count = rng.gen_range(params.agents_per_mediator.0..=params.agents_per_mediator.1);
            (0..count)
                .map(|_| HierarchyNode::Agent { name: None, location: random_point(metric, params, rng) })
                .collect()
        } else {
            let count = rng.gen_range(params.mediators.0..=params.mediators.1);
            (0..count)
                .map(|i| {
                    let child_level = if i == 0 { level - 1 } else { rng.gen_range(1..level) };
                    node(child_level, full && i == 0, metric, params, rng, counter)
                })
                .collect()
        };
        HierarchyNode::Mediator { name, z, children }
    }

    let center = node(depth, true, &metric, params, &mut rng, &mut counter);
    HierarchyInstance::new(metric, center)
}
