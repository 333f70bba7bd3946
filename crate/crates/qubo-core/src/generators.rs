//! Seeded instance generation. Everything is a pure function of its
//! parameters and a 64-bit seed; drawing twice with the same seed gives
//! byte-identical instances.

use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hc::{Graph, GraphError};
use crate::oracles;
use crate::qubo::VarId;
use crate::sat::{Clause, Formula, Literal};

/// How many formulas are drawn before giving up on a satisfiable one.
pub const SAT_RETRY_LIMIT: u32 = 200;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GenError {
    BadArity { k: u32, vars: u32 },
    NoSatisfiableFormula { tries: u32, clauses: u32, vars: u32 },
    InfeasibleEdgeCount { edges: u64, min: u64, max: u64 },
    Graph(GraphError),
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::BadArity { k, vars } => {
                write!(f, "clause width {k} must lie between 1 and the variable count {vars}")
            }
            GenError::NoSatisfiableFormula { tries, clauses, vars } => write!(
                f,
                "no satisfiable formula found in {tries} draws at clause/variable ratio {clauses}/{vars}"
            ),
            GenError::InfeasibleEdgeCount { edges, min, max } => {
                write!(f, "edge count {edges} outside the feasible range {min}..={max}")
            }
            GenError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for GenError {}

/// Random formula: every clause samples `k` distinct variables and
/// independent polarities. With `require_satisfiable`, formulas are redrawn
/// (continuing the same rng stream) until the DPLL oracle accepts one.
pub fn gen_sat(
    vars: u32,
    clauses: u32,
    k: u32,
    seed: u64,
    require_satisfiable: bool,
) -> Result<Formula, GenError> {
    if k == 0 || k > vars {
        return Err(GenError::BadArity { k, vars });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAT_RETRY_LIMIT {
        let f = draw_formula(vars, clauses, k, &mut rng);
        if !require_satisfiable || oracles::is_satisfiable(&f).is_some() {
            return Ok(f);
        }
    }
    Err(GenError::NoSatisfiableFormula { tries: SAT_RETRY_LIMIT, clauses, vars })
}

fn draw_formula(vars: u32, clauses: u32, k: u32, rng: &mut ChaCha8Rng) -> Formula {
    let cs: Vec<Clause> = (0..clauses)
        .map(|_| {
            let picked = rand::seq::index::sample(rng, vars as usize, k as usize);
            let lits: Vec<Literal> = picked
                .iter()
                .map(|v| {
                    let var = VarId(v as u32);
                    if rng.gen() {
                        Literal::pos(var)
                    } else {
                        Literal::neg(var)
                    }
                })
                .collect();
            Clause::new(lits).expect("k >= 1 was checked")
        })
        .collect();
    Formula::new(vars, cs).expect("sampled variables stay in range")
}

/// Random graph with `edges` listed edges (pairs, for undirected graphs).
/// With `plant_cycle`, the edges of a uniformly shuffled tour through all
/// vertices come first and random distinct extras fill up the count, so a
/// Hamiltonian cycle is guaranteed.
pub fn gen_graph(
    vertices: u32,
    edges: u64,
    directed: bool,
    seed: u64,
    plant_cycle: bool,
) -> Result<Graph, GenError> {
    if vertices < 3 {
        return Err(GenError::Graph(GraphError::TooFewVertices { got: vertices }));
    }
    let n = vertices as u64;
    let max = if directed { n * (n - 1) } else { n * (n - 1) / 2 };
    let min = if plant_cycle { n } else { 0 };
    if edges < min || edges > max {
        return Err(GenError::InfeasibleEdgeCount { edges, min, max });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut listed: Vec<(u32, u32)> = Vec::with_capacity(edges as usize);
    if plant_cycle {
        let mut rest: Vec<u32> = (1..vertices).collect();
        rest.shuffle(&mut rng);
        let mut tour = Vec::with_capacity(vertices as usize);
        tour.push(0);
        tour.extend(rest);
        for i in 0..vertices as usize {
            listed.push((tour[i], tour[(i + 1) % vertices as usize]));
        }
    }
    let taken: alloc::collections::BTreeSet<(u32, u32)> = listed
        .iter()
        .map(|&(a, b)| if directed { (a, b) } else { (a.min(b), a.max(b)) })
        .collect();
    let mut candidates = Vec::new();
    for a in 0..vertices {
        // undirected candidates are enumerated in normalized (a < b) form
        for b in 0..vertices {
            if a == b || (!directed && b <= a) {
                continue;
            }
            if !taken.contains(&(a, b)) {
                candidates.push((a, b));
            }
        }
    }
    let extra = edges as usize - listed.len();
    listed.extend(candidates.choose_multiple(&mut rng, extra).copied());
    let g = if directed {
        Graph::directed(vertices, listed)
    } else {
        Graph::undirected(vertices, listed)
    };
    g.map_err(GenError::Graph)
}
