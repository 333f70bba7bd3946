//! Hamiltonian-cycle compilation. Every directed edge carries a binary
//! position register; squared-position terms, continuation couplings, and a
//! fixed reward on edges entering the start vertex make any tour vector score
//! exactly -|V|(|V|+1), while conflict entries of 2|V|^2 price out every pair
//! of edges that could not appear in one tour. Registers incident to the
//! start vertex need a single bit because their positions are pinned to 1 or
//! |V|. A one-hot vertex-by-slot compilation is included for size comparison.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::qubo::{ceil_log2, AffineExpr, Label, QuboAccumulator, VarId, VariableRegistry};

/// Directed graph with a distinguished start vertex 0. Stores the edge list
/// as given plus the directed expansion actually compiled (identical for
/// directed input, both orientations per listed edge for undirected input).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    vertex_count: u32,
    directed: bool,
    listed: Vec<(u32, u32)>,
    edges: Vec<(u32, u32)>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GraphError {
    TooFewVertices { got: u32 },
    VertexOutOfRange { vertex: u32, vertex_count: u32 },
    SelfLoop { vertex: u32 },
    DuplicateEdge { a: u32, b: u32 },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::TooFewVertices { got } => {
                write!(f, "graphs need at least 3 vertices, got {got}")
            }
            GraphError::VertexOutOfRange { vertex, vertex_count } => {
                write!(f, "edge endpoint {vertex} exceeds the vertex count {vertex_count}")
            }
            GraphError::SelfLoop { vertex } => write!(f, "self-loop at vertex {vertex}"),
            GraphError::DuplicateEdge { a, b } => write!(f, "duplicate edge ({a}, {b})"),
        }
    }
}

impl core::error::Error for GraphError {}

impl Graph {
    pub fn directed(vertex_count: u32, edges: Vec<(u32, u32)>) -> Result<Self, GraphError> {
        Self::validate(vertex_count, &edges, true)?;
        Ok(Graph { vertex_count, directed: true, listed: edges.clone(), edges })
    }

    /// Undirected input; each listed pair expands to both directions.
    pub fn undirected(vertex_count: u32, pairs: Vec<(u32, u32)>) -> Result<Self, GraphError> {
        Self::validate(vertex_count, &pairs, false)?;
        let mut edges = Vec::with_capacity(pairs.len() * 2);
        for &(a, b) in &pairs {
            edges.push((a, b));
            edges.push((b, a));
        }
        Ok(Graph { vertex_count, directed: false, listed: pairs, edges })
    }

    fn validate(vertex_count: u32, edges: &[(u32, u32)], directed: bool) -> Result<(), GraphError> {
        if vertex_count < 3 {
            return Err(GraphError::TooFewVertices { got: vertex_count });
        }
        let mut seen = BTreeSet::new();
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= vertex_count {
                    return Err(GraphError::VertexOutOfRange { vertex: v, vertex_count });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop { vertex: a });
            }
            let key = if directed { (a, b) } else { (a.min(b), a.max(b)) };
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge { a, b });
            }
        }
        Ok(())
    }

    /// All ordered vertex pairs.
    ///
    /// # Panics
    /// Panics when `vertex_count < 3`.
    pub fn complete(vertex_count: u32) -> Self {
        let mut edges = Vec::new();
        for a in 0..vertex_count {
            for b in 0..vertex_count {
                if a != b {
                    edges.push((a, b));
                }
            }
        }
        Graph::directed(vertex_count, edges).expect("complete graphs are always valid")
    }

    /// Directed circulant: an edge from every vertex `i` to `(i + o) mod n`
    /// for each offset `o`.
    ///
    /// # Panics
    /// Panics when `vertex_count < 3` or the offsets collide modulo `n`.
    pub fn circulant(vertex_count: u32, offsets: &[u32]) -> Self {
        let mut edges = Vec::new();
        for i in 0..vertex_count {
            for &o in offsets {
                edges.push((i, (i + o) % vertex_count));
            }
        }
        Graph::directed(vertex_count, edges).expect("circulant offsets collide")
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Edges as given to the constructor (one row per undirected pair).
    pub fn listed_edges(&self) -> &[(u32, u32)] {
        &self.listed
    }

    /// The directed edge list the compilation works on.
    pub fn directed_edges(&self) -> &[(u32, u32)] {
        &self.edges
    }
}

/// Position registers, one per directed edge: `P_e = sum of weight * bit`.
#[derive(Clone, Debug)]
pub struct EdgeEncoding {
    registers: Vec<Vec<(VarId, i64)>>,
}

impl EdgeEncoding {
    pub fn edge_count(&self) -> usize {
        self.registers.len()
    }

    pub fn register(&self, edge: usize) -> &[(VarId, i64)] {
        &self.registers[edge]
    }

    pub fn dimension(&self) -> u32 {
        self.registers.iter().map(|r| r.len() as u32).sum()
    }

    pub fn position_expr(&self, edge: usize) -> AffineExpr {
        let mut e = AffineExpr::zero();
        for &(v, w) in &self.registers[edge] {
            e = e + AffineExpr::term(v, w);
        }
        e
    }

    /// Register value under an assignment.
    pub fn position_value(&self, edge: usize, sol: &[bool]) -> u32 {
        self.registers[edge]
            .iter()
            .map(|&(v, w)| if sol[v.index()] { w } else { 0 })
            .sum::<i64>() as u32
    }
}

/// Assigns position registers in edge-list order, bits low to high.
/// Edges leaving vertex 0 get one bit of weight 1 (position 1 or unused),
/// edges entering vertex 0 one bit of weight |V| (position |V| or unused),
/// all others ceil(log2(|V|+1)) bits with power-of-two weights.
pub fn encode_positions(g: &Graph) -> EdgeEncoding {
    let z = ceil_log2(g.vertex_count() as u64 + 1);
    let mut registers = Vec::with_capacity(g.directed_edges().len());
    let mut next = 0u32;
    for &(a, b) in g.directed_edges() {
        let reg: Vec<(VarId, i64)> = if a == 0 {
            vec![(VarId(next), 1)]
        } else if b == 0 {
            vec![(VarId(next), g.vertex_count() as i64)]
        } else {
            (0..z).map(|bit| (VarId(next + bit), 1i64 << bit)).collect()
        };
        next += reg.len() as u32;
        registers.push(reg);
    }
    let enc = EdgeEncoding { registers };
    assert!(
        enc.dimension() as u64 <= g.directed_edges().len() as u64 * z as u64,
        "register widths exceeded the per-edge bound"
    );
    enc
}

/// Lowest reachable energy: every tour vector scores -|V|(|V|+1).
pub fn optimal_energy(vertex_count: u32) -> i64 {
    assert!(vertex_count >= 3, "graphs need at least 3 vertices");
    let n = vertex_count as i64;
    -n * (n + 1)
}

/// A compiled graph: matrix, labels, and the per-edge registers.
#[derive(Clone, Debug)]
pub struct HcCompilation {
    pub accumulator: QuboAccumulator,
    pub registry: VariableRegistry,
    pub encoding: EdgeEncoding,
    pub graph: Graph,
}

/// Compiles a graph. Per edge (a, b): 2 P_ab^2, minus 2 P_ab (|V|+1) when
/// b = 0. Per ordered edge pair sharing exactly one of tail or head: 2|V|^2
/// on every cross pair of register bits (each unordered pair is visited
/// twice, so 4|V|^2 lands on each key). Per ordered pair where the first
/// edge's head equals the second's tail and is not vertex 0: one coupling
/// -2 P_second P_first. The offset stays 0.
pub fn compile(g: &Graph) -> HcCompilation {
    let encoding = encode_positions(g);
    let mut registry = VariableRegistry::new();
    for (e, &(a, b)) in g.directed_edges().iter().enumerate() {
        for bit in 0..encoding.register(e).len() as u32 {
            registry.push(Label::EdgeBit { tail: a, head: b, bit });
        }
    }
    assert_eq!(registry.len(), encoding.dimension());

    let nv = g.vertex_count() as i64;
    let mut acc = QuboAccumulator::new(encoding.dimension());
    for (e, &(_, b)) in g.directed_edges().iter().enumerate() {
        let p = encoding.position_expr(e);
        acc.add_bilinear(&p, &p, 2);
        if b == 0 {
            acc.add_affine(&p, -2 * (nv + 1));
        }
    }
    let m = g.directed_edges().len();
    for i in 0..m {
        let (a, b) = g.directed_edges()[i];
        for j in 0..m {
            if i == j {
                continue;
            }
            let (c, d) = g.directed_edges()[j];
            if (a == c) != (b == d) {
                for &(u, _) in encoding.register(i) {
                    for &(v, _) in encoding.register(j) {
                        acc.add_entry(u, v, 2 * nv * nv);
                    }
                }
            }
            if b == c && b != 0 {
                acc.add_bilinear(&encoding.position_expr(j), &encoding.position_expr(i), -2);
            }
        }
    }
    assert_eq!(acc.offset(), 0, "position penalties must not leave a constant");
    HcCompilation { accumulator: acc, registry, encoding, graph: g.clone() }
}

/// First check that fails when reading a vector back as a tour. Edge indices
/// refer to the compiled directed edge list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum HcDecodeError {
    PositionTooLarge { edge: usize, position: u32 },
    DuplicatePosition { position: u32, first: usize, second: usize },
    DuplicateSource { vertex: u32, first: usize, second: usize },
    DuplicateTarget { vertex: u32, first: usize, second: usize },
    NoStartEdge,
    StartNotAtOrigin { tail: u32 },
    MissingPosition { position: u32 },
    BrokenChain { position: u32, expected: u32, got: u32 },
    EndNotOrigin { head: u32 },
}

impl fmt::Display for HcDecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HcDecodeError::PositionTooLarge { edge, position } => {
                write!(f, "edge {edge} holds position {position}, which exceeds the vertex count")
            }
            HcDecodeError::DuplicatePosition { position, first, second } => {
                write!(f, "edges {first} and {second} both hold position {position}")
            }
            HcDecodeError::DuplicateSource { vertex, first, second } => {
                write!(f, "duplicate source: edges {first} and {second} both leave vertex {vertex}")
            }
            HcDecodeError::DuplicateTarget { vertex, first, second } => {
                write!(f, "duplicate target: edges {first} and {second} both enter vertex {vertex}")
            }
            HcDecodeError::NoStartEdge => write!(f, "no edge at position 1"),
            HcDecodeError::StartNotAtOrigin { tail } => {
                write!(f, "the edge at position 1 leaves vertex {tail}, not the start vertex")
            }
            HcDecodeError::MissingPosition { position } => {
                write!(f, "no edge at position {position}")
            }
            HcDecodeError::BrokenChain { position, expected, got } => {
                write!(
                    f,
                    "the edge at position {position} leaves vertex {got}, but position {} ended at vertex {expected}",
                    position - 1
                )
            }
            HcDecodeError::EndNotOrigin { head } => {
                write!(f, "the last edge enters vertex {head}, not the start vertex")
            }
        }
    }
}

impl core::error::Error for HcDecodeError {}

impl HcCompilation {
    pub fn dimension(&self) -> u32 {
        self.accumulator.n()
    }

    /// Reads the tour out of a solution vector. Accepts iff the edges with
    /// nonzero position hold exactly the positions 1..=|V|, chain head to
    /// tail, leave vertex 0 at position 1 and re-enter it at position |V|.
    /// Returns the visited vertices in order, starting at 0.
    pub fn decode(&self, sol: &[bool]) -> Result<Vec<u32>, HcDecodeError> {
        assert_eq!(sol.len(), self.dimension() as usize, "solution length must equal the dimension");
        let nv = self.graph.vertex_count();
        let edges = self.graph.directed_edges();
        let positions: Vec<u32> =
            (0..edges.len()).map(|e| self.encoding.position_value(e, sol)).collect();

        for (e, &p) in positions.iter().enumerate() {
            if p > nv {
                return Err(HcDecodeError::PositionTooLarge { edge: e, position: p });
            }
        }
        let mut at: Vec<Option<usize>> = vec![None; nv as usize + 1];
        for (e, &p) in positions.iter().enumerate() {
            if p == 0 {
                continue;
            }
            if let Some(first) = at[p as usize] {
                return Err(HcDecodeError::DuplicatePosition { position: p, first, second: e });
            }
            at[p as usize] = Some(e);
        }
        let mut leaves: Vec<Option<usize>> = vec![None; nv as usize];
        let mut enters: Vec<Option<usize>> = vec![None; nv as usize];
        for (e, &p) in positions.iter().enumerate() {
            if p == 0 {
                continue;
            }
            let (a, b) = edges[e];
            if let Some(first) = leaves[a as usize] {
                return Err(HcDecodeError::DuplicateSource { vertex: a, first, second: e });
            }
            leaves[a as usize] = Some(e);
            if let Some(first) = enters[b as usize] {
                return Err(HcDecodeError::DuplicateTarget { vertex: b, first, second: e });
            }
            enters[b as usize] = Some(e);
        }
        let start = at[1].ok_or(HcDecodeError::NoStartEdge)?;
        if edges[start].0 != 0 {
            return Err(HcDecodeError::StartNotAtOrigin { tail: edges[start].0 });
        }
        for p in 2..=nv {
            if at[p as usize].is_none() {
                return Err(HcDecodeError::MissingPosition { position: p });
            }
        }
        for p in 1..nv {
            let head = edges[at[p as usize].unwrap()].1;
            let tail = edges[at[p as usize + 1].unwrap()].0;
            if head != tail {
                return Err(HcDecodeError::BrokenChain { position: p + 1, expected: head, got: tail });
            }
        }
        // distinct sources plus an unbroken chain from vertex 0 already force
        // the last head back to 0; kept as the final gate anyway
        let last_head = edges[at[nv as usize].unwrap()].1;
        if last_head != 0 {
            return Err(HcDecodeError::EndNotOrigin { head: last_head });
        }
        Ok((1..=nv).map(|p| edges[at[p as usize].unwrap()].0).collect())
    }

    /// The canonical vector for a tour: the edge leaving `tour[i]` holds
    /// position `i + 1`, every other register is zero.
    ///
    /// # Panics
    /// Panics unless `tour` starts at vertex 0, visits every vertex once, and
    /// walks along edges of the graph.
    pub fn encode_cycle(&self, tour: &[u32]) -> Vec<bool> {
        let nv = self.graph.vertex_count();
        assert_eq!(tour.len(), nv as usize, "tours visit every vertex exactly once");
        assert_eq!(tour[0], 0, "tours start at vertex 0");
        let mut seen = vec![false; nv as usize];
        for &v in tour {
            assert!(v < nv, "tour vertex {v} out of range");
            assert!(!seen[v as usize], "tour repeats vertex {v}");
            seen[v as usize] = true;
        }
        let index: BTreeMap<(u32, u32), usize> = self
            .graph
            .directed_edges()
            .iter()
            .enumerate()
            .map(|(e, &ab)| (ab, e))
            .collect();
        let mut sol = vec![false; self.dimension() as usize];
        for i in 0..nv as usize {
            let a = tour[i];
            let b = tour[(i + 1) % nv as usize];
            let pos = i as i64 + 1;
            let e = *index.get(&(a, b)).expect("tour walks along a missing edge");
            let reg = self.encoding.register(e);
            if reg.len() == 1 {
                // width-1 registers sit on edges touching vertex 0, whose
                // tour positions equal the single weight by construction
                assert_eq!(reg[0].1, pos);
                sol[reg[0].0.index()] = true;
            } else {
                for (bit, &(v, _)) in reg.iter().enumerate() {
                    sol[v.index()] = pos >> bit & 1 == 1;
                }
            }
        }
        sol
    }
}

/// One-hot baseline: vertex-by-slot grid, compiled without the register
/// trick for size comparison.
#[derive(Clone, Debug)]
pub struct OneHotCompilation {
    pub accumulator: QuboAccumulator,
    pub registry: VariableRegistry,
    pub graph: Graph,
}

/// Compiles the one-hot formulation: |V|^2 variables x_{v,j} ("vertex v sits
/// at tour slot j"), a squared one-hot penalty per vertex and per slot, and a
/// unit entry for every non-edge (u, w) between x_{u,j} and x_{w,j+1} with
/// the slot index wrapping. Ground energy is 0 exactly when the graph has a
/// tour.
pub fn compile_one_hot(g: &Graph) -> OneHotCompilation {
    let nv = g.vertex_count();
    let id = |v: u32, j: u32| VarId(v * nv + j);
    let mut registry = VariableRegistry::new();
    for v in 0..nv {
        for j in 0..nv {
            registry.push(Label::Position { vertex: v, slot: j });
        }
    }
    let mut acc = QuboAccumulator::new(nv * nv);
    for v in 0..nv {
        let mut e = AffineExpr::constant(1);
        for j in 0..nv {
            e = e - AffineExpr::var(id(v, j));
        }
        acc.add_squared(&e);
    }
    for j in 0..nv {
        let mut e = AffineExpr::constant(1);
        for v in 0..nv {
            e = e - AffineExpr::var(id(v, j));
        }
        acc.add_squared(&e);
    }
    let edge_set: BTreeSet<(u32, u32)> = g.directed_edges().iter().copied().collect();
    for u in 0..nv {
        for w in 0..nv {
            if u == w || edge_set.contains(&(u, w)) {
                continue;
            }
            for j in 0..nv {
                acc.add_entry(id(u, j), id(w, (j + 1) % nv), 1);
            }
        }
    }
    assert_eq!(acc.offset(), 2 * nv as i64, "one-hot constants must sum to 2|V|");
    OneHotCompilation { accumulator: acc, registry, graph: g.clone() }
}

impl OneHotCompilation {
    pub fn dimension(&self) -> u32 {
        self.accumulator.n()
    }

    /// Tour in slot order rotated to start at vertex 0, or None unless the
    /// vector is a permutation matrix whose consecutive vertices are all
    /// joined by edges. The rotation is free: slot indices only matter
    /// cyclically.
    pub fn decode(&self, sol: &[bool]) -> Option<Vec<u32>> {
        assert_eq!(sol.len(), self.dimension() as usize, "solution length must equal the dimension");
        let nv = self.graph.vertex_count();
        let mut tour = Vec::with_capacity(nv as usize);
        for j in 0..nv {
            let mut hit = None;
            for v in 0..nv {
                if sol[(v * nv + j) as usize] {
                    if hit.is_some() {
                        return None;
                    }
                    hit = Some(v);
                }
            }
            tour.push(hit?);
        }
        let mut seen = vec![false; nv as usize];
        for &v in &tour {
            if seen[v as usize] {
                return None;
            }
            seen[v as usize] = true;
        }
        let edge_set: BTreeSet<(u32, u32)> = self.graph.directed_edges().iter().copied().collect();
        for j in 0..nv as usize {
            if !edge_set.contains(&(tour[j], tour[(j + 1) % nv as usize])) {
                return None;
            }
        }
        let origin = tour.iter().position(|&v| v == 0).expect("permutation covers vertex 0");
        tour.rotate_left(origin);
        Some(tour)
    }
}

/// Matrix dimensions of both formulations, computed without building them.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SizeReport {
    pub edge_position: u64,
    pub one_hot: u64,
}

pub fn size_report(g: &Graph) -> SizeReport {
    let z = ceil_log2(g.vertex_count() as u64 + 1) as u64;
    let edge_position = g
        .directed_edges()
        .iter()
        .map(|&(a, b)| if a == 0 || b == 0 { 1 } else { z })
        .sum();
    SizeReport { edge_position, one_hot: g.vertex_count() as u64 * g.vertex_count() as u64 }
}
