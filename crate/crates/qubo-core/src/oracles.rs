//! Ground truth the compilers and solvers are judged against: brute-force
//! and branch-and-bound Max-SAT, DPLL satisfiability, and backtracking
//! Hamiltonian-cycle search. Every answer is re-verified against the plain
//! problem definition before it is returned.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::hc::Graph;
use crate::sat::Formula;

/// Enumeration handles this many formula variables.
pub const MAXSAT_ENUM_LIMIT: u32 = 20;
/// Branch and bound extends the reach to here.
pub const MAXSAT_LIMIT: u32 = 26;
/// Backtracking cycle search bound.
pub const HC_ORACLE_LIMIT: u32 = 20;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OracleError {
    TooManyVariables { vars: u32, limit: u32 },
    TooManyVertices { vertices: u32, limit: u32 },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooManyVariables { vars, limit } => {
                write!(f, "the Max-SAT oracle handles at most {limit} variables, got {vars}")
            }
            OracleError::TooManyVertices { vertices, limit } => {
                write!(f, "the cycle oracle handles at most {limit} vertices, got {vertices}")
            }
        }
    }
}

impl core::error::Error for OracleError {}

/// Minimum number of unsatisfied clauses plus an assignment attaining it.
/// Dispatches to full enumeration up to MAXSAT_ENUM_LIMIT variables and to
/// branch and bound up to MAXSAT_LIMIT.
pub fn maxsat_min_unsat(f: &Formula) -> Result<(usize, Vec<bool>), OracleError> {
    if f.var_count() <= MAXSAT_ENUM_LIMIT {
        enumerate_min_unsat(f)
    } else if f.var_count() <= MAXSAT_LIMIT {
        Ok(branch_bound_min_unsat(f))
    } else {
        Err(OracleError::TooManyVariables { vars: f.var_count(), limit: MAXSAT_LIMIT })
    }
}

/// Scans every assignment; the witness is the first one attaining the
/// minimum in ascending bit order (variable 0 least significant).
pub fn enumerate_min_unsat(f: &Formula) -> Result<(usize, Vec<bool>), OracleError> {
    let v = f.var_count();
    if v > MAXSAT_LIMIT {
        return Err(OracleError::TooManyVariables { vars: v, limit: MAXSAT_LIMIT });
    }
    let masks: Vec<(u32, u32)> = f
        .clauses()
        .iter()
        .map(|c| {
            let mut pos = 0u32;
            let mut neg = 0u32;
            for l in c.literals() {
                if l.negated {
                    neg |= 1 << l.var.0;
                } else {
                    pos |= 1 << l.var.0;
                }
            }
            (pos, neg)
        })
        .collect();
    let mut best = usize::MAX;
    let mut witness = 0u32;
    for mask in 0..1u64 << v {
        let mask = mask as u32;
        // a clause stays unsatisfied iff no positive literal is set and
        // every negated literal is set
        let unsat =
            masks.iter().filter(|&&(pos, neg)| pos & mask == 0 && neg & mask == neg).count();
        if unsat < best {
            best = unsat;
            witness = mask;
            if best == 0 {
                break;
            }
        }
    }
    let x: Vec<bool> = (0..v).map(|i| witness >> i & 1 == 1).collect();
    assert_eq!(f.count_unsatisfied(&x), best, "oracle witness must attain its count");
    Ok((best, x))
}

/// Depth-first search over prefix assignments, pruning once the clauses
/// falsified by the prefix reach the best complete assignment seen.
pub fn branch_bound_min_unsat(f: &Formula) -> (usize, Vec<bool>) {
    let v = f.var_count() as usize;
    let mut x = vec![false; v];
    let mut best = (f.count_unsatisfied(&x), x.clone());
    descend(f, 0, &mut x, &mut best);
    assert_eq!(f.count_unsatisfied(&best.1), best.0, "oracle witness must attain its count");
    best
}

fn descend(f: &Formula, depth: usize, x: &mut Vec<bool>, best: &mut (usize, Vec<bool>)) {
    let falsified = f
        .clauses()
        .iter()
        .filter(|c| {
            c.literals().iter().all(|l| l.var.index() < depth && !l.satisfied_by(x))
        })
        .count();
    if falsified >= best.0 {
        return;
    }
    if depth == x.len() {
        *best = (falsified, x.clone());
        return;
    }
    x[depth] = false;
    descend(f, depth + 1, x, best);
    x[depth] = true;
    descend(f, depth + 1, x, best);
    x[depth] = false;
}

/// DPLL with unit propagation. Returns a model (unassigned variables fall to
/// false) or None; any returned model has been checked against every clause.
pub fn is_satisfiable(f: &Formula) -> Option<Vec<bool>> {
    let assign = vec![None; f.var_count() as usize];
    let partial = dpll(f, assign)?;
    let model: Vec<bool> = partial.into_iter().map(|a| a.unwrap_or(false)).collect();
    assert!(f.satisfied_by(&model), "oracle model must satisfy the formula");
    Some(model)
}

fn dpll(f: &Formula, mut assign: Vec<Option<bool>>) -> Option<Vec<Option<bool>>> {
    if !propagate(f, &mut assign) {
        return None;
    }
    let Some(var) = assign.iter().position(|a| a.is_none()) else {
        return Some(assign);
    };
    for value in [true, false] {
        let mut branch = assign.clone();
        branch[var] = Some(value);
        if let Some(model) = dpll(f, branch) {
            return Some(model);
        }
    }
    None
}

/// Forces unit clauses to a fixpoint; false on conflict.
fn propagate(f: &Formula, assign: &mut [Option<bool>]) -> bool {
    loop {
        let mut changed = false;
        for c in f.clauses() {
            let mut satisfied = false;
            let mut unassigned = None;
            let mut open = 0;
            for l in c.literals() {
                match assign[l.var.index()] {
                    Some(v) if v != l.negated => {
                        satisfied = true;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        open += 1;
                        unassigned = Some(l);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match (open, unassigned) {
                (0, _) => return false,
                (1, Some(l)) => {
                    assign[l.var.index()] = Some(!l.negated);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

/// True when `tour` starts at vertex 0, visits every vertex exactly once,
/// and walks along directed edges back to 0.
pub fn is_valid_cycle(g: &Graph, tour: &[u32]) -> bool {
    let nv = g.vertex_count();
    if tour.len() != nv as usize || tour[0] != 0 {
        return false;
    }
    let mut seen = vec![false; nv as usize];
    for &v in tour {
        if v >= nv || seen[v as usize] {
            return false;
        }
        seen[v as usize] = true;
    }
    (0..nv as usize)
        .all(|i| g.directed_edges().contains(&(tour[i], tour[(i + 1) % nv as usize])))
}

/// Backtracking search from vertex 0 with neighbors visited in ascending
/// order, so the answer is deterministic. A found tour is re-validated.
pub fn find_hamiltonian_cycle(g: &Graph) -> Result<Option<Vec<u32>>, OracleError> {
    let nv = g.vertex_count();
    if nv > HC_ORACLE_LIMIT {
        return Err(OracleError::TooManyVertices { vertices: nv, limit: HC_ORACLE_LIMIT });
    }
    let mut adj = vec![Vec::new(); nv as usize];
    for &(a, b) in g.directed_edges() {
        adj[a as usize].push(b);
    }
    for row in &mut adj {
        row.sort_unstable();
    }
    let mut visited = vec![false; nv as usize];
    visited[0] = true;
    let mut path = vec![0u32];
    if extend(&adj, &mut visited, &mut path, nv) {
        assert!(is_valid_cycle(g, &path), "oracle tour must pass the validity check");
        Ok(Some(path))
    } else {
        Ok(None)
    }
}

fn extend(adj: &[Vec<u32>], visited: &mut [bool], path: &mut Vec<u32>, nv: u32) -> bool {
    let last = *path.last().unwrap() as usize;
    if path.len() == nv as usize {
        return adj[last].binary_search(&0).is_ok();
    }
    for &w in &adj[last] {
        if !visited[w as usize] {
            visited[w as usize] = true;
            path.push(w);
            if extend(adj, visited, path, nv) {
                return true;
            }
            path.pop();
            visited[w as usize] = false;
        }
    }
    false
}
