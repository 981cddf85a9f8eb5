//! Graph types and the binarizing preprocessing pipeline.
//!
//! Raw inputs arrive as [`WeightedDigraph`]s (possibly with loops and
//! repeated arcs). [`preprocess`] turns them into [`SimpleGraph`]s, which are
//! symmetric, binary and hollow; every inference routine consumes those.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, mismatch};
use crate::matrix::Matrix;
use crate::sgm::Matching;
use crate::{Error, Result};

/// Ordered, unique vertex names with optional categorical labels.
///
/// Names are kept in lexicographic order so two independently loaded files
/// over the same names index their vertices identically.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VertexTable {
    names: Vec<String>,
    labels: Option<Vec<String>>,
}

impl VertexTable {
    /// Sorted, deduplicated table over `names`.
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: Vec<String> = names.into_iter().map(Into::into).collect();
        names.sort_unstable();
        names.dedup();
        VertexTable {
            names,
            labels: None,
        }
    }

    /// Table for `n` anonymous vertices named `v0000`, `v0001`, ... so that
    /// lexicographic and numeric order coincide.
    pub fn numbered(n: usize) -> Self {
        let width = digits(n.saturating_sub(1)).max(4);
        let names = (0..n).map(|i| alloc::format!("v{i:0width$}")).collect();
        VertexTable {
            names,
            labels: None,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Attaches one label per vertex from `(name, label)` rows.
    ///
    /// Rows must name known vertices, never repeat a vertex, carry a
    /// non-empty label, and together cover every vertex.
    pub fn with_labels<'a, I>(mut self, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut labels: Vec<Option<String>> = vec![None; self.names.len()];
        for (name, label) in rows {
            let idx = self
                .index_of(name)
                .ok_or_else(|| invalid!("label row names unknown vertex {name:?}"))?;
            if label.is_empty() {
                return Err(invalid!("empty label for vertex {name:?}"));
            }
            if labels[idx].is_some() {
                return Err(invalid!("vertex {name:?} is labeled more than once"));
            }
            labels[idx] = Some(label.to_string());
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| invalid!("vertex {:?} has no label", self.names[i])))
            .collect::<Result<Vec<_>>>()?;
        self.labels = Some(labels);
        Ok(self)
    }

    /// Sets labels positionally.
    pub fn with_label_vec(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.names.len() {
            return Err(mismatch!(
                "{} labels for {} vertices",
                labels.len(),
                self.names.len()
            ));
        }
        if let Some(i) = labels.iter().position(String::is_empty) {
            return Err(invalid!("empty label for vertex {:?}", self.names[i]));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Distinct labels in sorted order plus each vertex's index into them.
    pub fn label_classes(&self) -> Option<(Vec<String>, Vec<usize>)> {
        let labels = self.labels.as_ref()?;
        let mut classes = labels.clone();
        classes.sort_unstable();
        classes.dedup();
        let idx = labels
            .iter()
            .map(|l| classes.binary_search(l).expect("label present"))
            .collect();
        Some((classes, idx))
    }

    /// Keeps the vertices listed in `keep` (ascending old indices).
    fn restrict(&self, keep: &[usize]) -> VertexTable {
        VertexTable {
            names: keep.iter().map(|&i| self.names[i].clone()).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| keep.iter().map(|&i| l[i].clone()).collect()),
        }
    }
}

fn digits(mut n: usize) -> usize {
    let mut d = 1;
    while n >= 10 {
        n /= 10;
        d += 1;
    }
    d
}

/// A weighted directed graph as loaded from an edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    vertices: VertexTable,
    arcs: Vec<(usize, usize, f64)>,
}

impl WeightedDigraph {
    /// Validates indices and weights and sums repeated `(source, target)` arcs.
    pub fn new(
        vertices: VertexTable,
        arcs: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let n = vertices.len();
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (s, t, w) in arcs {
            if s >= n || t >= n {
                return Err(invalid!("arc ({s}, {t}) out of range for {n} vertices"));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(invalid!("arc ({s}, {t}) has invalid weight {w}"));
            }
            *merged.entry((s, t)).or_insert(0.0) += w;
        }
        Ok(WeightedDigraph {
            vertices,
            arcs: merged.into_iter().map(|((s, t), w)| (s, t, w)).collect(),
        })
    }

    /// Builds the vertex table from the sorted union of names in `arcs`.
    pub fn from_named_arcs<'a, I>(arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str, f64)> + Clone,
    {
        let table = VertexTable::from_names(arcs.clone().into_iter().flat_map(|(s, t, _)| [s, t]));
        Self::on_table(table, arcs)
    }

    /// Resolves named arcs against an existing table.
    pub fn on_table<'a, I>(vertices: VertexTable, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str, f64)>,
    {
        let indexed = arcs
            .into_iter()
            .map(|(s, t, w)| {
                let si = vertices
                    .index_of(s)
                    .ok_or_else(|| invalid!("unknown vertex {s:?}"))?;
                let ti = vertices
                    .index_of(t)
                    .ok_or_else(|| invalid!("unknown vertex {t:?}"))?;
                Ok((si, ti, w))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(vertices, indexed)
    }

    pub fn vertices(&self) -> &VertexTable {
        &self.vertices
    }

    /// Merged arcs sorted by `(source, target)`.
    pub fn arcs(&self) -> &[(usize, usize, f64)] {
        &self.arcs
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn loop_count(&self) -> usize {
        self.arcs.iter().filter(|(s, t, _)| s == t).count()
    }

    /// Moves the graph onto `table`, which must contain every current name.
    /// Labels of `table` are kept.
    pub fn reindexed(&self, table: &VertexTable) -> Result<Self> {
        let map = self
            .vertices
            .names()
            .iter()
            .map(|name| {
                table
                    .index_of(name)
                    .ok_or_else(|| invalid!("vertex {name:?} missing from target table"))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            table.clone(),
            self.arcs.iter().map(|&(s, t, w)| (map[s], map[t], w)),
        )
    }

    pub fn with_vertices(self, vertices: VertexTable) -> Result<Self> {
        if vertices.names() != self.vertices.names() {
            return Err(Error::Unaligned("vertex names differ".into()));
        }
        Ok(WeightedDigraph { vertices, ..self })
    }
}

/// Symmetric, binary, hollow graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    adjacency: Vec<u8>,
    vertices: VertexTable,
}

impl SimpleGraph {
    pub fn empty(vertices: VertexTable) -> Self {
        let n = vertices.len();
        SimpleGraph {
            n,
            adjacency: vec![0; n * n],
            vertices,
        }
    }

    /// Builds from undirected edges, ignoring loops and repeats.
    pub fn from_edges(
        vertices: VertexTable,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut g = Self::empty(vertices);
        for (i, j) in edges {
            if i >= g.n || j >= g.n {
                return Err(invalid!(
                    "edge ({i}, {j}) out of range for {} vertices",
                    g.n
                ));
            }
            if i != j {
                g.set_edge(i, j, true);
            }
        }
        Ok(g)
    }

    /// Validates a dense 0/1 matrix against the symmetric/binary/hollow
    /// invariants.
    pub fn from_adjacency(vertices: VertexTable, a: &Matrix) -> Result<Self> {
        let n = vertices.len();
        if a.rows() != n || a.cols() != n {
            return Err(mismatch!(
                "{}x{} adjacency for {n} vertices",
                a.rows(),
                a.cols()
            ));
        }
        let mut g = Self::empty(vertices);
        for i in 0..n {
            for j in 0..n {
                let v = a[(i, j)];
                if v != 0.0 && v != 1.0 {
                    return Err(invalid!("adjacency entry ({i}, {j}) = {v} is not binary"));
                }
                if v != a[(j, i)] {
                    return Err(invalid!("adjacency is not symmetric at ({i}, {j})"));
                }
                if i == j && v != 0.0 {
                    return Err(invalid!("adjacency has a loop at {i}"));
                }
                g.adjacency[i * n + j] = v as u8;
            }
        }
        Ok(g)
    }

    #[inline]
    fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        let v = u8::from(present);
        self.adjacency[i * self.n + j] = v;
        self.adjacency[j * self.n + i] = v;
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &VertexTable {
        &self.vertices
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.n + j] != 0
    }

    /// Row `i` of the adjacency matrix as 0/1 bytes.
    #[inline]
    pub fn row(&self, i: usize) -> &[u8] {
        &self.adjacency[i * self.n..(i + 1) * self.n]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|&b| b as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|&b| b as usize).sum::<usize>() / 2
    }

    /// Undirected edges `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            (i + 1..self.n)
                .filter(move |&j| self.has_edge(i, j))
                .map(move |j| (i, j))
        })
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| {
            f64::from(self.adjacency[i * self.n + j])
        })
    }

    /// Each edge as two unit-weight arcs.
    pub fn to_digraph(&self) -> WeightedDigraph {
        let arcs: Vec<_> = self
            .edges()
            .flat_map(|(i, j)| [(i, j, 1.0), (j, i, 1.0)])
            .collect();
        WeightedDigraph::new(self.vertices.clone(), arcs).expect("edges are in range")
    }

    /// Complement on the same vertices (still hollow).
    pub fn complement(&self) -> SimpleGraph {
        let mut g = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    g.adjacency[i * self.n + j] ^= 1;
                }
            }
        }
        g
    }

    /// Graph whose vertex `i` is this graph's vertex `order[i]`.
    ///
    /// The vertex table keeps its sorted names, so the result is an
    /// index-level relabeling intended for internal computation.
    pub fn permuted(&self, order: &[usize]) -> SimpleGraph {
        debug_assert_eq!(order.len(), self.n);
        let n = self.n;
        let mut adjacency = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                adjacency[i * n + j] = self.adjacency[order[i] * n + order[j]];
            }
        }
        SimpleGraph {
            n,
            adjacency,
            vertices: self.vertices.clone(),
        }
    }

    fn induced(&self, keep: &[usize]) -> SimpleGraph {
        let m = keep.len();
        let mut adjacency = vec![0u8; m * m];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                adjacency[a * m + b] = self.adjacency[i * self.n + j];
            }
        }
        SimpleGraph {
            n: m,
            adjacency,
            vertices: self.vertices.restrict(keep),
        }
    }

    pub fn with_vertices(self, vertices: VertexTable) -> Result<Self> {
        if vertices.names() != self.vertices.names() {
            return Err(Error::Unaligned("vertex names differ".into()));
        }
        Ok(SimpleGraph { vertices, ..self })
    }
}

/// Two simple graphs over the same ordered vertex names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphPair {
    g1: SimpleGraph,
    g2: SimpleGraph,
}

impl GraphPair {
    pub fn new(g1: SimpleGraph, g2: SimpleGraph) -> Result<Self> {
        if g1.vertices.names() != g2.vertices.names() {
            return Err(Error::Unaligned(alloc::format!(
                "vertex tables differ ({} vs {} vertices)",
                g1.n,
                g2.n
            )));
        }
        Ok(GraphPair { g1, g2 })
    }

    pub fn g1(&self) -> &SimpleGraph {
        &self.g1
    }

    pub fn g2(&self) -> &SimpleGraph {
        &self.g2
    }

    pub fn n(&self) -> usize {
        self.g1.n
    }

    pub fn vertices(&self) -> &VertexTable {
        &self.g1.vertices
    }

    pub fn into_parts(self) -> (SimpleGraph, SimpleGraph) {
        (self.g1, self.g2)
    }

    /// Attaches the same labels to both graphs.
    pub fn with_labels(self, vertices: VertexTable) -> Result<Self> {
        let g1 = self.g1.with_vertices(vertices.clone())?;
        let g2 = self.g2.with_vertices(vertices)?;
        Ok(GraphPair { g1, g2 })
    }

    /// Applies the same index relabeling to both graphs.
    pub fn permuted(&self, order: &[usize]) -> GraphPair {
        GraphPair {
            g1: self.g1.permuted(order),
            g2: self.g2.permuted(order),
        }
    }
}

/// Symmetrizes (`A + A^T`), binarizes (`> 0` becomes 1) and zeroes the
/// diagonal.
pub fn preprocess(g: &WeightedDigraph) -> SimpleGraph {
    let edges = g
        .arcs
        .iter()
        .filter(|&&(s, t, w)| w > 0.0 && s != t)
        .map(|&(s, t, _)| (s, t));
    SimpleGraph::from_edges(g.vertices.clone(), edges).expect("digraph arcs are in range")
}

/// Mapping from old vertex indices to surviving new ones.
pub type IndexMap = Vec<Option<usize>>;

/// Removes every vertex with degree 0 in either graph, reindexing both
/// graphs identically.
pub fn drop_isolated(pair: &GraphPair) -> Result<(GraphPair, IndexMap)> {
    let n = pair.n();
    let keep: Vec<usize> = (0..n)
        .filter(|&i| pair.g1.degree(i) > 0 && pair.g2.degree(i) > 0)
        .collect();
    if keep.is_empty() {
        return Err(Error::Degenerate(
            "every vertex is isolated in at least one graph".into(),
        ));
    }
    let mut map = vec![None; n];
    for (new, &old) in keep.iter().enumerate() {
        map[old] = Some(new);
    }
    let out = GraphPair {
        g1: pair.g1.induced(&keep),
        g2: pair.g2.induced(&keep),
    };
    Ok((out, map))
}

/// Edge density: undirected edges over `C(n, 2)`.
pub fn sparsity(g: &SimpleGraph) -> Result<f64> {
    if g.n < 2 {
        return Err(invalid!("sparsity needs at least 2 vertices, got {}", g.n));
    }
    let pairs = (g.n * (g.n - 1) / 2) as f64;
    Ok(g.edge_count() as f64 / pairs)
}

/// Number of unordered pairs `{i, j}` whose edge status differs between
/// `a1` and `a2` under the alignment `i -> phi(i)`.
pub fn edge_disagreements(a1: &SimpleGraph, a2: &SimpleGraph, phi: &Matching) -> Result<usize> {
    let n = a1.n;
    if a2.n != n || phi.len() != n {
        return Err(mismatch!(
            "graphs of size {} and {} with a matching of length {}",
            n,
            a2.n,
            phi.len()
        ));
    }
    let p = phi.as_slice();
    let mut count = 0usize;
    for i in 0..n {
        let r1 = a1.row(i);
        let r2 = a2.row(p[i]);
        for j in i + 1..n {
            count += usize::from(r1[j] != r2[p[j]]);
        }
    }
    Ok(count)
}
