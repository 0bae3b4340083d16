//! Feature graph built from code hierarchy and temporal recurrence, and its
//! Laplacian.
//!
//! Two features are linked when their codes agree on the first `prefix_len`
//! characters (the `.` separator is ignored) or when they aggregate the same
//! event over different time windows. The resulting 0/1 adjacency `A` gives
//! the Laplacian `L = D - A`, whose quadratic form `wᵀLw = Σ_{i<j} A_ij (w_i - w_j)²`
//! pulls linked weights together.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::FeatureMeta;
use crate::error::{CoxError, Result};

pub const DEFAULT_PREFIX_LEN: usize = 3;

/// Which rule produced an edge. A pair related both ways keeps a single edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeTag {
    Code,
    Temporal,
    CodeAndTemporal,
}

impl EdgeTag {
    fn merge(self, other: EdgeTag) -> EdgeTag {
        if self == other {
            self
        } else {
            EdgeTag::CodeAndTemporal
        }
    }
}

impl fmt::Display for EdgeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeTag::Code => "code",
            EdgeTag::Temporal => "temporal",
            EdgeTag::CodeAndTemporal => "code+temporal",
        })
    }
}

/// Undirected, unweighted graph over `p` features. Edges are stored once
/// with `i < j`; there are no self loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureGraph {
    p: usize,
    edges: BTreeMap<(usize, usize), EdgeTag>,
}

impl FeatureGraph {
    pub fn empty(p: usize) -> Self {
        FeatureGraph {
            p,
            edges: BTreeMap::new(),
        }
    }

    /// Graph from an explicit edge list; duplicate and reversed pairs collapse.
    pub fn from_edges(p: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = FeatureGraph::empty(p);
        for (i, j) in edges {
            g.add_edge(i, j, EdgeTag::Code)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, i: usize, j: usize, tag: EdgeTag) -> Result<()> {
        if i >= self.p || j >= self.p {
            return Err(CoxError::contract(format!(
                "edge ({i}, {j}) out of range for {} nodes",
                self.p
            )));
        }
        if i == j {
            return Err(CoxError::contract(format!("self loop on node {i}")));
        }
        let key = (i.min(j), i.max(j));
        self.edges
            .entry(key)
            .and_modify(|t| *t = t.merge(tag))
            .or_insert(tag);
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains_key(&(i.min(j), i.max(j)))
    }

    pub fn edge_tag(&self, i: usize, j: usize) -> Option<EdgeTag> {
        self.edges.get(&(i.min(j), i.max(j))).copied()
    }

    /// Edges as `(i, j, tag)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, EdgeTag)> + '_ {
        self.edges.iter().map(|(&(i, j), &t)| (i, j, t))
    }

    pub fn adjacency(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.p, self.p));
        for (i, j, _) in self.edges() {
            a[[i, j]] = 1.0;
            a[[j, i]] = 1.0;
        }
        a
    }

    /// Connected components as a label per node (labels are the smallest
    /// node index in each component).
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.p).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, j, _) in self.edges() {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
        (0..self.p).map(|i| find(&mut parent, i)).collect()
    }

    /// Writes the audit edge list: header `i,j,tag`, one edge per line.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "i,j,tag")?;
        for (i, j, tag) in self.edges() {
            writeln!(out, "{i},{j},{tag}")?;
        }
        Ok(())
    }
}

fn code_prefix(code: &str, prefix_len: usize) -> String {
    code.chars().filter(|&c| c != '.').take(prefix_len).collect()
}

/// Builds the union of code-prefix and temporal-recurrence edges.
pub fn build_graph(meta: &[FeatureMeta], prefix_len: usize) -> Result<FeatureGraph> {
    if prefix_len == 0 {
        return Err(CoxError::contract("prefix_len must be at least 1"));
    }
    if meta.is_empty() {
        return Err(CoxError::contract("cannot build a graph over zero features"));
    }
    let mut g = FeatureGraph::empty(meta.len());

    let mut by_prefix: HashMap<String, Vec<usize>> = HashMap::new();
    let mut by_event: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, m) in meta.iter().enumerate() {
        by_prefix.entry(code_prefix(&m.code, prefix_len)).or_default().push(i);
        by_event.entry(m.event_key.as_str()).or_default().push(i);
    }
    for members in by_prefix.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                g.add_edge(i, j, EdgeTag::Code)?;
            }
        }
    }
    for members in by_event.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                if meta[i].window_id != meta[j].window_id {
                    g.add_edge(i, j, EdgeTag::Temporal)?;
                }
            }
        }
    }
    Ok(g)
}

/// Sparse graph Laplacian `L = D - A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    degree: Vec<f64>,
    neighbors: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Laplacian {
    pub fn new(g: &FeatureGraph) -> Self {
        let mut neighbors = vec![Vec::new(); g.p()];
        let mut edges = Vec::with_capacity(g.edge_count());
        for (i, j, _) in g.edges() {
            neighbors[i].push(j);
            neighbors[j].push(i);
            edges.push((i, j));
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }
        let degree = neighbors.iter().map(|nb| nb.len() as f64).collect();
        Laplacian {
            degree,
            neighbors,
            edges,
        }
    }

    /// Laplacian of the graph with no edges (the zero matrix).
    pub fn zero(p: usize) -> Self {
        Laplacian::new(&FeatureGraph::empty(p))
    }

    pub fn p(&self) -> usize {
        self.degree.len()
    }

    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let p = self.p();
        let mut l = Array2::zeros((p, p));
        for i in 0..p {
            l[[i, i]] = self.degree[i];
            for &j in &self.neighbors[i] {
                l[[i, j]] = -1.0;
            }
        }
        l
    }

    fn check_dim(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.p() {
            return Err(CoxError::contract(format!(
                "weight vector has length {}, Laplacian has dimension {}",
                w.len(),
                self.p()
            )));
        }
        Ok(())
    }

    /// `L·w`.
    pub fn mul_vec(&self, w: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(w)?;
        Ok(self.mul_vec_unchecked(w))
    }

    pub(crate) fn mul_vec_unchecked(&self, w: &[f64]) -> Vec<f64> {
        self.neighbors
            .iter()
            .enumerate()
            .map(|(i, nb)| self.degree[i] * w[i] - nb.iter().map(|&j| w[j]).sum::<f64>())
            .collect()
    }

    /// `wᵀLw`, evaluated as a sum of squared differences over edges so the
    /// result is never negative.
    pub fn quad_form(&self, w: &[f64]) -> Result<f64> {
        self.check_dim(w)?;
        Ok(self.quad_form_unchecked(w))
    }

    pub(crate) fn quad_form_unchecked(&self, w: &[f64]) -> f64 {
        self.edges.iter().map(|&(i, j)| (w[i] - w[j]).powi(2)).sum()
    }
}

pub fn laplacian(g: &FeatureGraph) -> Laplacian {
    Laplacian::new(g)
}

pub fn quad_form(l: &Laplacian, w: &[f64]) -> Result<f64> {
    l.quad_form(w)
}
