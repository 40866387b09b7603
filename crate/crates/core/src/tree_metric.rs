//! Exact edge-weighted trees, canonical points on them, distances and paths.
//!
//! A point is either a vertex or a location strictly inside an edge, measured
//! from the edge's first endpoint. Offsets equal to `0` or to the edge length
//! are always folded into the vertex form, so `PointRef` equality is value
//! equality.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_traits::{Signed, Zero};

use crate::median::WeightedMultiset;
use crate::rational::{self, Rational};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// A point of the metric induced by a tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointRef {
    Vertex(VertexId),
    /// Strictly interior: `0 < offset < length(edge)`, measured from the
    /// edge's `a` endpoint.
    Edge { edge: EdgeId, offset: Rational },
}

impl PointRef {
    pub fn as_vertex(&self) -> Option<VertexId> {
        match self {
            PointRef::Vertex(v) => Some(*v),
            PointRef::Edge { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub length: Rational,
}

impl Edge {
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }
}

/// Waypoints of the unique path between two points. Consecutive waypoints
/// share an edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathDecomposition {
    pub waypoints: Vec<PointRef>,
    pub length: Rational,
}

/// Result of splitting edges at a set of points.
#[derive(Clone, Debug)]
pub struct SplitResult {
    pub metric: TreeMetric,
    /// One vertex per requested point, in request order.
    pub vertices: Vec<VertexId>,
    /// For every vertex of the split metric, the point of the original metric
    /// it stands for.
    pub origin: Vec<PointRef>,
    /// Per split edge: segment start offsets with the edge now covering them.
    chains: BTreeMap<EdgeId, Vec<(Rational, EdgeId)>>,
    /// Per split edge: new vertices by offset.
    cuts: BTreeMap<EdgeId, Vec<(Rational, VertexId)>>,
}

impl SplitResult {
    /// Maps a point of the original metric onto the split metric.
    pub fn lift(&self, point: &PointRef) -> PointRef {
        let PointRef::Edge { edge, offset } = point else {
            return point.clone();
        };
        let Some(chain) = self.chains.get(edge) else {
            return point.clone();
        };
        if let Some((_, v)) = self.cuts[edge].iter().find(|(o, _)| o == offset) {
            return PointRef::Vertex(*v);
        }
        let (start, segment) = chain
            .iter()
            .rev()
            .find(|(start, _)| start < offset)
            .expect("first segment starts at zero");
        PointRef::Edge {
            edge: *segment,
            offset: offset - start,
        }
    }
}

/// A finite tree with positive rational edge lengths.
#[derive(Clone, Debug)]
pub struct TreeMetric {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    // Rooted at vertex 0 for ancestor queries.
    parent: Vec<Option<(VertexId, EdgeId)>>,
    depth: Vec<usize>,
    root_distance: Vec<Rational>,
}

impl PartialEq for TreeMetric {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.edges == other.edges
    }
}

impl Eq for TreeMetric {}

impl TreeMetric {
    /// Builds a tree from vertex names and edges given by vertex index.
    pub fn new(names: Vec<String>, edges: Vec<Edge>) -> Result<TreeMetric> {
        for name in &names {
            if name.is_empty() || name.contains(['~', '@']) || name.trim() != name {
                return Err(Error::InvalidMetric(format!(
                    "vertex name `{name}` must be non-empty, untrimmed-free and avoid `~` and `@`"
                )));
            }
        }
        Self::assemble(names, edges)
    }

    /// Convenience constructor from names and `(a, b, length)` triples.
    pub fn from_named_edges(names: &[&str], edges: &[(&str, &str, Rational)]) -> Result<TreeMetric> {
        let lookup: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let edges = edges
            .iter()
            .map(|(a, b, length)| {
                let a = *lookup.get(a).ok_or_else(|| Error::UnknownVertex(a.to_string()))?;
                let b = *lookup.get(b).ok_or_else(|| Error::UnknownVertex(b.to_string()))?;
                Ok(Edge {
                    a: VertexId(a),
                    b: VertexId(b),
                    length: length.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(names.iter().map(|s| s.to_string()).collect(), edges)
    }

    /// A path `names[0] - names[1] - ...` with the given consecutive lengths.
    pub fn path_graph(names: &[&str], lengths: &[Rational]) -> Result<TreeMetric> {
        if lengths.len() + 1 != names.len() {
            return Err(Error::InvalidMetric("a path needs one length per consecutive pair".into()));
        }
        let edges: Vec<_> = names
            .windows(2)
            .zip(lengths)
            .map(|(w, l)| (w[0], w[1], l.clone()))
            .collect();
        Self::from_named_edges(names, &edges)
    }

    fn assemble(names: Vec<String>, edges: Vec<Edge>) -> Result<TreeMetric> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidMetric("a tree needs at least one vertex".into()));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), VertexId(i)).is_some() {
                return Err(Error::InvalidMetric(format!("duplicate vertex `{name}`")));
            }
        }
        if edges.len() + 1 != n {
            return Err(Error::InvalidMetric(format!(
                "{} vertices need exactly {} edges, found {}",
                n,
                n - 1,
                edges.len()
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            if e.a.0 >= n || e.b.0 >= n {
                return Err(Error::UnknownEdge(i));
            }
            if e.a == e.b {
                return Err(Error::InvalidMetric(format!("edge {i} is a self loop")));
            }
            if !e.length.is_positive() {
                return Err(Error::InvalidMetric(format!(
                    "edge {i} has non-positive length {}",
                    rational::format(&e.length)
                )));
            }
            adjacency[e.a.0].push((e.b, EdgeId(i)));
            adjacency[e.b.0].push((e.a, EdgeId(i)));
        }

        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut root_distance = vec![Rational::zero(); n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([VertexId(0)]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &(w, e) in &adjacency[u.0] {
                if !seen[w.0] {
                    seen[w.0] = true;
                    parent[w.0] = Some((u, e));
                    depth[w.0] = depth[u.0] + 1;
                    root_distance[w.0] = &root_distance[u.0] + &edges[e.0].length;
                    queue.push_back(w);
                }
            }
        }
        if let Some(lost) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidMetric(format!(
                "graph is disconnected or cyclic (vertex `{}` unreachable)",
                names[lost]
            )));
        }
        Ok(TreeMetric {
            names,
            index,
            edges,
            adjacency,
            parent,
            depth,
            root_distance,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.names.len()).map(VertexId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.index.get(name).copied()
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v.0]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.0].len()
    }

    /// True when every vertex has degree at most two.
    pub fn is_path_graph(&self) -> bool {
        self.vertices().all(|v| self.degree(v) <= 2)
    }

    /// The vertex with the smallest id of degree at most one.
    pub fn first_leaf(&self) -> VertexId {
        self.vertices()
            .find(|&v| self.degree(v) <= 1)
            .expect("every finite tree has a leaf")
    }

    /// Smallest vertex name in lexicographic order.
    pub fn smallest_named_vertex(&self) -> VertexId {
        self.vertices()
            .min_by(|a, b| self.name(*a).cmp(self.name(*b)))
            .expect("non-empty")
    }

    pub fn check_point(&self, p: &PointRef) -> Result<()> {
        match p {
            PointRef::Vertex(v) if v.0 < self.names.len() => Ok(()),
            PointRef::Vertex(v) => Err(Error::UnknownVertex(v.to_string())),
            PointRef::Edge { edge, offset } => {
                let e = self.edges.get(edge.0).ok_or(Error::UnknownEdge(edge.0))?;
                if offset.is_positive() && offset < &e.length {
                    Ok(())
                } else {
                    Err(Error::OffsetOutOfRange {
                        offset: rational::format(offset),
                        length: rational::format(&e.length),
                    })
                }
            }
        }
    }

    /// Canonical point at `offset` from the `a` endpoint of `edge`.
    pub fn point_on_edge(&self, edge: EdgeId, offset: Rational) -> Result<PointRef> {
        let e = self.edges.get(edge.0).ok_or(Error::UnknownEdge(edge.0))?;
        if offset.is_zero() {
            Ok(PointRef::Vertex(e.a))
        } else if offset == e.length {
            Ok(PointRef::Vertex(e.b))
        } else if offset.is_positive() && offset < e.length {
            Ok(PointRef::Edge { edge, offset })
        } else {
            Err(Error::OffsetOutOfRange {
                offset: rational::format(&offset),
                length: rational::format(&e.length),
            })
        }
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.adjacency[a.0].iter().find(|(w, _)| *w == b).map(|(_, e)| *e)
    }

    /// Canonical text form: a vertex name, or `a~b@offset` with `a < b` by name
    /// and the offset measured from `a`.
    pub fn label(&self, p: &PointRef) -> String {
        match p {
            PointRef::Vertex(v) => self.names[v.0].clone(),
            PointRef::Edge { edge, offset } => {
                let e = &self.edges[edge.0];
                let (na, nb) = (&self.names[e.a.0], &self.names[e.b.0]);
                if na < nb {
                    format!("{na}~{nb}@{}", rational::format(offset))
                } else {
                    format!("{nb}~{na}@{}", rational::format(&(&e.length - offset)))
                }
            }
        }
    }

    /// Inverse of [`TreeMetric::label`]; accepts either endpoint order.
    pub fn parse_point(&self, text: &str) -> Result<PointRef> {
        let Some((ends, offset)) = text.split_once('@') else {
            return self
                .vertex(text)
                .map(PointRef::Vertex)
                .ok_or_else(|| Error::UnknownVertex(text.to_string()));
        };
        let (a, b) = ends
            .split_once('~')
            .ok_or_else(|| Error::MalformedPoint(text.to_string()))?;
        let va = self.vertex(a).ok_or_else(|| Error::UnknownVertex(a.to_string()))?;
        let vb = self.vertex(b).ok_or_else(|| Error::UnknownVertex(b.to_string()))?;
        let edge = self
            .edge_between(va, vb)
            .ok_or_else(|| Error::MalformedPoint(format!("`{a}` and `{b}` are not adjacent")))?;
        let offset = rational::parse(offset)?;
        let e = &self.edges[edge.0];
        if offset.is_negative() || offset > e.length {
            return Err(Error::OffsetOutOfRange {
                offset: rational::format(&offset),
                length: rational::format(&e.length),
            });
        }
        let from_a = if e.a == va { offset } else { &e.length - offset };
        self.point_on_edge(edge, from_a)
    }

    fn lca(&self, mut u: VertexId, mut v: VertexId) -> VertexId {
        while self.depth[u.0] > self.depth[v.0] {
            u = self.parent[u.0].expect("non-root").0;
        }
        while self.depth[v.0] > self.depth[u.0] {
            v = self.parent[v.0].expect("non-root").0;
        }
        while u != v {
            u = self.parent[u.0].expect("non-root").0;
            v = self.parent[v.0].expect("non-root").0;
        }
        u
    }

    pub fn vertex_distance(&self, u: VertexId, v: VertexId) -> Rational {
        let w = self.lca(u, v);
        &self.root_distance[u.0] + &self.root_distance[v.0] - &self.root_distance[w.0] * rational::int(2)
    }

    /// Endpoints through which a point is left, with the distance to each.
    fn exits(&self, p: &PointRef) -> Vec<(VertexId, Rational)> {
        match p {
            PointRef::Vertex(v) => vec![(*v, Rational::zero())],
            PointRef::Edge { edge, offset } => {
                let e = &self.edges[edge.0];
                vec![(e.a, offset.clone()), (e.b, &e.length - offset)]
            }
        }
    }

    /// Closest pair of exits, with the total distance through them.
    fn best_exits(&self, p: &PointRef, q: &PointRef) -> (VertexId, VertexId, Rational) {
        let mut best: Option<(VertexId, VertexId, Rational)> = None;
        for (x, dx) in self.exits(p) {
            for (y, dy) in self.exits(q) {
                let total = &dx + &self.vertex_distance(x, y) + &dy;
                if best.as_ref().is_none_or(|(_, _, b)| &total < b) {
                    best = Some((x, y, total));
                }
            }
        }
        best.expect("points have exits")
    }

    /// Tree distance between two valid points.
    pub fn distance(&self, p: &PointRef, q: &PointRef) -> Rational {
        if let (
            PointRef::Edge { edge: e1, offset: o1 },
            PointRef::Edge { edge: e2, offset: o2 },
        ) = (p, q)
        {
            if e1 == e2 {
                return (o1 - o2).abs();
            }
        }
        self.best_exits(p, q).2
    }

    pub fn checked_distance(&self, p: &PointRef, q: &PointRef) -> Result<Rational> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.distance(p, q))
    }

    /// Whether `x` lies on the path between `a` and `b` (endpoints included).
    pub fn on_path(&self, a: &PointRef, b: &PointRef, x: &PointRef) -> bool {
        self.distance(a, x) + self.distance(x, b) == self.distance(a, b)
    }

    fn vertex_path(&self, x: VertexId, y: VertexId) -> Vec<VertexId> {
        let w = self.lca(x, y);
        let mut up = vec![x];
        let mut u = x;
        while u != w {
            u = self.parent[u.0].expect("non-root").0;
            up.push(u);
        }
        let mut down = Vec::new();
        let mut v = y;
        while v != w {
            down.push(v);
            v = self.parent[v.0].expect("non-root").0;
        }
        up.extend(down.into_iter().rev());
        up
    }

    pub fn path(&self, p: &PointRef, q: &PointRef) -> PathDecomposition {
        if p == q {
            return PathDecomposition {
                waypoints: vec![p.clone()],
                length: Rational::zero(),
            };
        }
        if let (PointRef::Edge { edge: e1, .. }, PointRef::Edge { edge: e2, .. }) = (p, q) {
            if e1 == e2 {
                return PathDecomposition {
                    waypoints: vec![p.clone(), q.clone()],
                    length: self.distance(p, q),
                };
            }
        }
        let (x, y, length) = self.best_exits(p, q);
        let mut waypoints = Vec::new();
        if matches!(p, PointRef::Edge { .. }) {
            waypoints.push(p.clone());
        }
        waypoints.extend(self.vertex_path(x, y).into_iter().map(PointRef::Vertex));
        if matches!(q, PointRef::Edge { .. }) {
            waypoints.push(q.clone());
        }
        PathDecomposition { waypoints, length }
    }

    pub fn checked_path(&self, p: &PointRef, q: &PointRef) -> Result<PathDecomposition> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.path(p, q))
    }

    /// Offset of a point lying on `edge` (endpoints included), from its `a` end.
    fn offset_on(&self, edge: EdgeId, p: &PointRef) -> Rational {
        let e = &self.edges[edge.0];
        match p {
            PointRef::Vertex(v) if *v == e.a => Rational::zero(),
            PointRef::Vertex(_) => e.length.clone(),
            PointRef::Edge { offset, .. } => offset.clone(),
        }
    }

    fn shared_edge(&self, x: &PointRef, y: &PointRef) -> EdgeId {
        match (x, y) {
            (PointRef::Edge { edge, .. }, _) | (_, PointRef::Edge { edge, .. }) => *edge,
            (PointRef::Vertex(u), PointRef::Vertex(v)) => {
                self.edge_between(*u, *v).expect("consecutive waypoints are adjacent")
            }
        }
    }

    /// The point at distance `t` from `from` along the path towards `to`.
    /// `t` is clamped to `[0, distance(from, to)]`.
    pub fn point_along(&self, from: &PointRef, to: &PointRef, t: &Rational) -> PointRef {
        let path = self.path(from, to);
        if !t.is_positive() {
            return from.clone();
        }
        let mut remaining = t.clone();
        for pair in path.waypoints.windows(2) {
            let segment = self.distance(&pair[0], &pair[1]);
            if remaining <= segment {
                let edge = self.shared_edge(&pair[0], &pair[1]);
                let start = self.offset_on(edge, &pair[0]);
                let end = self.offset_on(edge, &pair[1]);
                let offset = if end > start { start + remaining } else { start - remaining };
                return self.point_on_edge(edge, offset).expect("stays on the edge");
            }
            remaining -= segment;
        }
        to.clone()
    }

    /// The edge at `v` through which `target` (distinct from `v`) is reached.
    pub fn branch(&self, v: VertexId, target: &PointRef) -> EdgeId {
        match target {
            PointRef::Edge { edge, .. } => {
                let e = &self.edges[edge.0];
                if e.a == v || e.b == v {
                    *edge
                } else {
                    self.branch(v, &PointRef::Vertex(e.a))
                }
            }
            PointRef::Vertex(w) => {
                debug_assert_ne!(*w, v);
                let mut u = *w;
                while self.depth[u.0] > self.depth[v.0] + 1 {
                    u = self.parent[u.0].expect("non-root").0;
                }
                match self.parent[u.0] {
                    Some((p, e)) if p == v && self.depth[u.0] == self.depth[v.0] + 1 => e,
                    _ => self.parent[v.0].expect("target outside subtree implies a parent").1,
                }
            }
        }
    }

    /// Total weight of each maximal group of `set` that stays connected when
    /// `p` is removed. Points located at `p` are excluded; empty groups are
    /// omitted. Groups are ordered by the edge they hang from.
    pub fn component_weights(&self, p: &PointRef, set: &WeightedMultiset) -> Vec<Rational> {
        let mut groups: BTreeMap<(EdgeId, bool), Rational> = BTreeMap::new();
        for (location, weight) in set.location_weights() {
            if location == p {
                continue;
            }
            let key = match p {
                PointRef::Vertex(v) => (self.branch(*v, location), false),
                PointRef::Edge { edge, offset } => {
                    let e = &self.edges[edge.0];
                    let on_a_side = match location {
                        PointRef::Edge { edge: other, offset: o } if other == edge => o < offset,
                        _ => {
                            self.distance(location, &PointRef::Vertex(e.a))
                                < self.distance(location, &PointRef::Vertex(e.b))
                        }
                    };
                    (*edge, on_a_side)
                }
            };
            *groups.entry(key).or_insert_with(Rational::zero) += weight;
        }
        groups.into_values().collect()
    }

    pub fn checked_component_weights(&self, p: &PointRef, set: &WeightedMultiset) -> Result<Vec<Rational>> {
        self.check_point(p)?;
        for (location, _) in set.location_weights() {
            self.check_point(location)?;
        }
        Ok(self.component_weights(p, set))
    }

    /// Splits the edge containing `p` so that `p` becomes a vertex.
    pub fn split_at(&self, p: &PointRef) -> Result<(TreeMetric, VertexId)> {
        let result = self.split_points(std::slice::from_ref(p))?;
        Ok((result.metric, result.vertices[0]))
    }

    /// Splits edges at every interior point of `points`. Existing vertex and
    /// edge ids are kept; an edge that is cut keeps its id for the segment
    /// touching its `a` endpoint, and the new pieces get fresh ids.
    pub fn split_points(&self, points: &[PointRef]) -> Result<SplitResult> {
        for p in points {
            self.check_point(p)?;
        }
        let mut offsets: BTreeMap<EdgeId, BTreeSet<Rational>> = BTreeMap::new();
        for p in points {
            if let PointRef::Edge { edge, offset } = p {
                offsets.entry(*edge).or_default().insert(offset.clone());
            }
        }
        let mut names = self.names.clone();
        let mut edges = self.edges.clone();
        let mut origin: Vec<PointRef> = self.vertices().map(PointRef::Vertex).collect();
        let mut chains = BTreeMap::new();
        let mut cuts = BTreeMap::new();
        for (edge, set) in &offsets {
            let original = self.edges[edge.0].clone();
            let mut chain = vec![(Rational::zero(), *edge)];
            let mut cut = Vec::new();
            let mut previous_vertex = original.a;
            let mut previous_offset = Rational::zero();
            for (i, offset) in set.iter().enumerate() {
                let point = PointRef::Edge {
                    edge: *edge,
                    offset: offset.clone(),
                };
                let v = VertexId(names.len());
                names.push(self.label(&point));
                origin.push(point);
                let piece = Edge {
                    a: previous_vertex,
                    b: v,
                    length: offset - &previous_offset,
                };
                if i == 0 {
                    edges[edge.0] = piece;
                } else {
                    let id = EdgeId(edges.len());
                    edges.push(piece);
                    chain.push((previous_offset.clone(), id));
                }
                cut.push((offset.clone(), v));
                previous_vertex = v;
                previous_offset = offset.clone();
            }
            let id = EdgeId(edges.len());
            edges.push(Edge {
                a: previous_vertex,
                b: original.b,
                length: &original.length - &previous_offset,
            });
            chain.push((previous_offset, id));
            chains.insert(*edge, chain);
            cuts.insert(*edge, cut);
        }
        let metric = TreeMetric::assemble(names, edges)?;
        let mut result = SplitResult {
            metric,
            vertices: Vec::new(),
            origin,
            chains,
            cuts,
        };
        result.vertices = points
            .iter()
            .map(|p| result.lift(p).as_vertex().expect("split points are vertices"))
            .collect();
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn unit_line() -> TreeMetric {
        TreeMetric::path_graph(&["0", "1"], &[int(1)]).unwrap()
    }

    fn star() -> TreeMetric {
        TreeMetric::from_named_edges(&["c", "x", "y", "w"], &[("c", "x", int(1)), ("c", "y", int(1)), ("c", "w", int(1))])
            .unwrap()
    }

    fn v(m: &TreeMetric, name: &str) -> PointRef {
        PointRef::Vertex(m.vertex(name).unwrap())
    }

    #[test]
    fn basic_distances() {
        let line = unit_line();
        assert_eq!(line.distance(&v(&line, "0"), &v(&line, "1")), int(1));
        let mid = line.point_on_edge(EdgeId(0), frac(1, 3)).unwrap();
        assert_eq!(line.distance(&mid, &mid), int(0));
        let s = star();
        assert_eq!(s.distance(&v(&s, "x"), &v(&s, "y")), int(2));
    }

    #[test]
    fn edge_points_on_different_edges() {
        let s = star();
        let px = s.point_on_edge(s.edge_between(s.vertex("c").unwrap(), s.vertex("x").unwrap()).unwrap(), frac(1, 2)).unwrap();
        let py = s.parse_point("c~y@1/4").unwrap();
        assert_eq!(s.distance(&px, &py), frac(3, 4));
        assert_eq!(s.label(&py), "c~y@1/4");
        assert_eq!(s.parse_point("y~c@3/4").unwrap(), py);
    }

    #[test]
    fn canonicalizes_boundary_offsets() {
        let line = unit_line();
        assert_eq!(line.point_on_edge(EdgeId(0), int(0)).unwrap(), v(&line, "0"));
        assert_eq!(line.point_on_edge(EdgeId(0), int(1)).unwrap(), v(&line, "1"));
        assert_eq!(line.parse_point("0~1@1").unwrap(), v(&line, "1"));
        assert!(line.point_on_edge(EdgeId(0), int(2)).is_err());
        assert!(line.parse_point("0~1@-1/2").is_err());
        assert!(line.checked_distance(&PointRef::Vertex(VertexId(9)), &v(&line, "0")).is_err());
    }

    #[test]
    fn rejects_bad_trees() {
        assert!(TreeMetric::from_named_edges(&["a", "b"], &[("a", "b", int(0))]).is_err());
        assert!(TreeMetric::from_named_edges(&["a", "b", "c"], &[("a", "b", int(1))]).is_err());
        assert!(TreeMetric::from_named_edges(
            &["a", "b", "c", "d"],
            &[("a", "b", int(1)), ("b", "a", int(1)), ("c", "d", int(1))]
        )
        .is_err());
        assert!(TreeMetric::from_named_edges(&["a~"], &[]).is_err());
        let single = TreeMetric::from_named_edges(&["solo"], &[]).unwrap();
        assert_eq!(single.distance(&v(&single, "solo"), &v(&single, "solo")), int(0));
    }

    #[test]
    fn paths() {
        let line = unit_line();
        let p0 = v(&line, "0");
        let p1 = v(&line, "1");
        assert_eq!(line.path(&p0, &p0).waypoints, vec![p0.clone()]);
        let path = line.path(&p0, &p1);
        assert_eq!(path.waypoints, vec![p0.clone(), p1.clone()]);
        assert_eq!(path.length, int(1));

        let s = star();
        let path = s.path(&v(&s, "x"), &v(&s, "y"));
        assert_eq!(path.waypoints, vec![v(&s, "x"), v(&s, "c"), v(&s, "y")]);
        assert_eq!(path.length, s.distance(&v(&s, "x"), &v(&s, "y")));
        let mut back = s.path(&v(&s, "y"), &v(&s, "x")).waypoints;
        back.reverse();
        assert_eq!(back, path.waypoints);
    }

    #[test]
    fn point_along_walks_the_path() {
        let s = star();
        let p = s.point_along(&v(&s, "x"), &v(&s, "y"), &frac(3, 2));
        assert_eq!(s.label(&p), "c~y@1/2");
        assert_eq!(s.point_along(&v(&s, "x"), &v(&s, "y"), &int(1)), v(&s, "c"));
        assert_eq!(s.point_along(&v(&s, "x"), &v(&s, "y"), &int(5)), v(&s, "y"));
    }

    #[test]
    fn split_at_vertex_is_identity() {
        let s = star();
        let (m, id) = s.split_at(&v(&s, "c")).unwrap();
        assert_eq!(m, s);
        assert_eq!(id, s.vertex("c").unwrap());
    }

    #[test]
    fn split_edge_in_half() {
        let line = TreeMetric::path_graph(&["u", "v"], &[int(2)]).unwrap();
        let mid = line.point_on_edge(EdgeId(0), int(1)).unwrap();
        let (m, id) = line.split_at(&mid).unwrap();
        assert_eq!(m.edge_count(), 2);
        assert!(m.edges().iter().all(|e| e.length == int(1)));
        assert_eq!(m.name(id), "u~v@1/1");
    }

    #[test]
    fn split_many_on_one_edge_preserves_distances() {
        let line = TreeMetric::path_graph(&["u", "v", "w"], &[int(4), int(1)]).unwrap();
        let pts: Vec<_> = [frac(1, 2), int(3), int(1)]
            .into_iter()
            .map(|o| line.point_on_edge(EdgeId(0), o).unwrap())
            .collect();
        let split = line.split_points(&pts).unwrap();
        assert_eq!(split.metric.vertex_count(), 6);
        let probes: Vec<_> = [frac(1, 4), frac(5, 2), frac(7, 2), int(1)]
            .into_iter()
            .map(|o| line.point_on_edge(EdgeId(0), o).unwrap())
            .chain([v(&line, "u"), v(&line, "w")])
            .collect();
        for a in &probes {
            for b in &probes {
                assert_eq!(
                    line.distance(a, b),
                    split.metric.distance(&split.lift(a), &split.lift(b))
                );
            }
        }
        for (p, id) in pts.iter().zip(&split.vertices) {
            assert_eq!(&split.origin[id.0], p);
        }
    }

    #[test]
    fn component_weights_examples() {
        let line = unit_line();
        let half = line.point_on_edge(EdgeId(0), frac(1, 2)).unwrap();
        let set = WeightedMultiset::from_pairs([(v(&line, "0"), int(1)), (v(&line, "1"), int(1))]).unwrap();
        assert_eq!(line.component_weights(&half, &set), vec![int(1), int(1)]);

        let s = star();
        let only_center = WeightedMultiset::from_pairs([(v(&s, "c"), int(1))]).unwrap();
        assert!(s.component_weights(&v(&s, "c"), &only_center).is_empty());

        let long = TreeMetric::path_graph(&["0", "2"], &[int(2)]).unwrap();
        let set = WeightedMultiset::from_pairs([(v(&long, "0"), int(3)), (v(&long, "2"), int(2))]).unwrap();
        assert_eq!(long.component_weights(&v(&long, "0"), &set), vec![int(2)]);
    }
}
