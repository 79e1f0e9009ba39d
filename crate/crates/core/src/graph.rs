//! Graph states on grid-addressed vertices, Z-measurement deletion and
//! substrate diagrams.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::{Pauli, C};
use crate::pauli::PauliFrame;
use crate::scalar::Real;
use crate::statevec::{ObservableSpec, Pick, StateError, StateVector};

/// Grid position `(row, col)` of a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId {
    pub row: usize,
    pub col: usize,
}

impl VertexId {
    pub fn new(row: usize, col: usize) -> Self {
        VertexId { row, col }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.row, self.col)
    }
}

/// What a vertex is used for in a pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Data,
    Ancilla,
    Routing,
    Deletion,
}

/// Graph-level failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(VertexId),
    #[error("self-loop at {0}")]
    SelfLoop(VertexId),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Simple undirected graph; vertex order (row-major) fixes qubit order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    vertices: BTreeMap<VertexId, Role>,
    edges: BTreeSet<(VertexId, VertexId)>,
}

impl GraphSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: VertexId, role: Role) {
        self.vertices.insert(v, role);
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for x in [u, v] {
            if !self.vertices.contains_key(&x) {
                return Err(GraphError::UnknownVertex(x));
            }
        }
        self.edges.insert((u.min(v), u.max(v)));
        Ok(())
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains_key(&v)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn role(&self, v: VertexId) -> Option<Role> {
        self.vertices.get(&v).copied()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.keys().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect();
        out.sort();
        out
    }

    /// Position of `v` in vertex order, which is its qubit index.
    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.keys().position(|&x| x == v)
    }

    pub fn remove_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        if self.vertices.remove(&v).is_none() {
            return Err(GraphError::UnknownVertex(v));
        }
        self.edges.retain(|&(a, b)| a != v && b != v);
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        let Some(start) = self.vertices.keys().next().copied() else { return true };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for u in self.neighbors(v) {
                if seen.insert(u) {
                    stack.push(u);
                }
            }
        }
        seen.len() == self.vertices.len()
    }
}

/// `rows × cols` square lattice with nearest-neighbour edges.
pub fn cluster_lattice(rows: usize, cols: usize) -> GraphSpec {
    let mut g = GraphSpec::new();
    for r in 0..rows {
        for c in 0..cols {
            g.add_vertex(VertexId::new(r, c), Role::Data);
        }
    }
    for r in 0..rows {
        for c in 0..cols {
            let v = VertexId::new(r, c);
            if c + 1 < cols {
                g.add_edge(v, VertexId::new(r, c + 1)).unwrap();
            }
            if r + 1 < rows {
                g.add_edge(v, VertexId::new(r + 1, c)).unwrap();
            }
        }
    }
    g
}

/// `∏_{edges} Λ(Z) |+⟩^{⊗V}` with qubits in vertex order.
pub fn build_graph_state<T: Real>(g: &GraphSpec) -> Result<StateVector<T>, GraphError> {
    let h = num_complex::Complex::new(T::FRAC_1_SQRT_2(), T::zero());
    let plus: Vec<[C<T>; 2]> = vec![[h, h]; g.num_vertices()];
    let mut s = StateVector::product(&plus)?;
    for (a, b) in g.edges() {
        s.apply_cz(g.index_of(a).unwrap(), g.index_of(b).unwrap())?;
    }
    Ok(s)
}

/// Result of removing a vertex by a Z measurement.
#[derive(Clone, Debug)]
pub struct Deletion<T = f64> {
    pub outcome: bool,
    pub state: StateVector<T>,
    pub graph: GraphSpec,
    /// Z corrections owed on the remaining vertices, in vertex order.
    pub frame: PauliFrame,
}

/// Measures `v` in Z and removes it. After applying `frame`'s Z corrections
/// the state is the graph state of the graph without `v`.
pub fn delete_vertex<T: Real>(
    state: &StateVector<T>,
    g: &GraphSpec,
    v: VertexId,
    pick: Pick,
) -> Result<Deletion<T>, GraphError> {
    let q = g.index_of(v).ok_or(GraphError::UnknownVertex(v))?;
    let mut s = state.clone();
    let (outcome, _) = s.measure(&ObservableSpec::single(q, Pauli::Z), pick)?;
    s.discard(q)?;
    let neighbors = g.neighbors(v);
    let mut graph = g.clone();
    graph.remove_vertex(v)?;
    let mut frame = PauliFrame::identity(graph.num_vertices());
    if outcome {
        for u in neighbors {
            frame.b[graph.index_of(u).unwrap()] = true;
        }
    }
    Ok(Deletion { outcome, state: s, graph, frame })
}

/// Line style of a diagram edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeStyle {
    Solid,
    /// Circuit-dependent CZ link.
    Optional,
}

/// Labelled vertices and styled edges of a measurement pattern.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SubstrateDiagram {
    pub labels: BTreeMap<VertexId, String>,
    pub notes: BTreeMap<VertexId, String>,
    pub edges: Vec<(VertexId, VertexId, EdgeStyle)>,
    /// `(earlier, later)` pairs: the later measurement adapts to the earlier.
    pub deps: Vec<(VertexId, VertexId)>,
}

/// Diagram output formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagramFormat {
    Dot,
    Ascii,
}

pub fn emit_diagram(d: &SubstrateDiagram, format: DiagramFormat) -> String {
    match format {
        DiagramFormat::Dot => emit_dot(d),
        DiagramFormat::Ascii => emit_ascii(d),
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn emit_dot(d: &SubstrateDiagram) -> String {
    let mut out = String::from("graph G {\n  node [shape=circle];\n");
    for (v, label) in &d.labels {
        match d.notes.get(v) {
            Some(n) => out.push_str(&format!(
                "  \"{v}\" [label=\"{}\", tooltip=\"{}\"];\n",
                escape(label),
                escape(n)
            )),
            None => out.push_str(&format!("  \"{v}\" [label=\"{}\"];\n", escape(label))),
        }
    }
    for (a, b, style) in &d.edges {
        let s = match style {
            EdgeStyle::Solid => "solid",
            EdgeStyle::Optional => "dashed",
        };
        out.push_str(&format!("  \"{a}\" -- \"{b}\" [style={s}];\n"));
    }
    out.push_str("}\n");
    out
}

fn emit_ascii(d: &SubstrateDiagram) -> String {
    if d.labels.is_empty() {
        return String::new();
    }
    let colw = d.labels.values().map(|l| l.chars().count()).max().unwrap_or(1).max(1);
    let rows = d.labels.keys().map(|v| v.row).max().unwrap() + 1;
    let cols = d.labels.keys().map(|v| v.col).max().unwrap() + 1;
    let pitch = colw + 3;
    let width = (cols - 1) * pitch + colw + 1;
    let mut canvas = vec![vec![' '; width]; 2 * rows - 1];
    let x = |c: usize| c * pitch;
    for (v, label) in &d.labels {
        for (i, ch) in label.chars().enumerate() {
            canvas[2 * v.row][x(v.col) + i] = ch;
        }
    }
    for &(a, b, style) in &d.edges {
        let (a, b) = (a.min(b), a.max(b));
        if a.row == b.row {
            let start = x(a.col) + d.labels.get(&a).map_or(0, |l| l.chars().count());
            let end = x(b.col);
            for (i, slot) in canvas[2 * a.row][start..end].iter_mut().enumerate() {
                if i > 0 && start + i + 1 < end {
                    *slot = '—';
                }
            }
        } else if a.col == b.col {
            let ch = match style {
                EdgeStyle::Solid => '|',
                EdgeStyle::Optional => ':',
            };
            for line in &mut canvas[2 * a.row + 1..2 * b.row] {
                if line[x(a.col)] == ' ' {
                    line[x(a.col)] = ch;
                }
            }
        } else if b.row == a.row + 1 {
            let (lo, ch) = if b.col > a.col { (a.col, '\\') } else { (b.col, '/') };
            let slot = &mut canvas[2 * a.row + 1][x(lo) + colw + 1];
            *slot = if *slot == ' ' || *slot == ch { ch } else { 'X' };
        }
    }
    let mut out = String::new();
    for line in canvas {
        let s: String = line.into_iter().collect();
        out.push_str(s.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(r: usize, c: usize) -> VertexId {
        VertexId::new(r, c)
    }

    #[test]
    fn lattice_edge_count() {
        let g = cluster_lattice(3, 4);
        assert_eq!(g.num_vertices(), 12);
        assert_eq!(g.num_edges(), 3 * 3 + 2 * 4);
        assert!(g.is_connected());
    }

    #[test]
    fn two_vertex_graph_state_amplitudes() {
        let mut g = GraphSpec::new();
        g.add_vertex(v(0, 0), Role::Data);
        g.add_vertex(v(0, 1), Role::Data);
        g.add_edge(v(0, 0), v(0, 1)).unwrap();
        let s = build_graph_state::<f64>(&g).unwrap();
        let a = s.amplitudes();
        assert!((a[0].re - 0.5).abs() < 1e-12 && (a[3].re + 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_edges() {
        let mut g = GraphSpec::new();
        g.add_vertex(v(0, 0), Role::Data);
        assert_eq!(g.add_edge(v(0, 0), v(0, 0)), Err(GraphError::SelfLoop(v(0, 0))));
        assert_eq!(g.add_edge(v(0, 0), v(1, 1)), Err(GraphError::UnknownVertex(v(1, 1))));
    }

    #[test]
    fn ascii_single_edge() {
        let mut d = SubstrateDiagram::default();
        d.labels.insert(v(0, 0), "M1".into());
        d.labels.insert(v(0, 1), "N1".into());
        d.edges.push((v(0, 0), v(0, 1), EdgeStyle::Solid));
        assert_eq!(emit_diagram(&d, DiagramFormat::Ascii), "M1 — N1\n");
    }

    #[test]
    fn empty_diagram_outputs() {
        let d = SubstrateDiagram::default();
        assert_eq!(emit_diagram(&d, DiagramFormat::Ascii), "");
        assert_eq!(emit_diagram(&d, DiagramFormat::Dot), "graph G {\n  node [shape=circle];\n}\n");
    }

    #[test]
    fn optional_vertical_edges_render_dotted() {
        let mut d = SubstrateDiagram::default();
        d.labels.insert(v(0, 0), "N1".into());
        d.labels.insert(v(1, 0), "N2".into());
        d.edges.push((v(0, 0), v(1, 0), EdgeStyle::Optional));
        assert_eq!(emit_diagram(&d, DiagramFormat::Ascii), "N1\n:\nN2\n");
        assert!(emit_diagram(&d, DiagramFormat::Dot).contains("\"0,0\" -- \"1,0\" [style=dashed];"));
    }
}
