//! Desk-scale minimization: exact enumeration for small matrices, seeded
//! simulated annealing beyond. Both solvers step by single-bit flips with
//! incrementally maintained fields, and both re-evaluate their answer from
//! scratch before returning it.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::qubo::QuboAccumulator;

/// Largest dimension the exhaustive solver accepts unless told otherwise.
pub const DEFAULT_EXHAUSTIVE_LIMIT: u32 = 24;

/// 2^64 / golden ratio; spreads restart indices into independent rng streams.
const RESTART_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Every how many proposals the incremental delta is replayed against a full
/// energy evaluation (debug builds only).
pub const AUDIT_STRIDE: u64 = 97;

#[derive(Clone, PartialEq, Debug)]
pub enum SolverError {
    Capacity { n: u32, limit: u32 },
    TemperatureOrdering { t0: f64, t1: f64 },
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::Capacity { n, limit } => {
                write!(f, "dimension {n} exceeds the exhaustive limit {limit}; use simulated annealing")
            }
            SolverError::TemperatureOrdering { t0, t1 } => {
                write!(f, "temperatures must satisfy {t0} >= {t1} > 0")
            }
        }
    }
}

impl core::error::Error for SolverError {}

/// Outcome of a solver run. The energy always equals a fresh evaluation of
/// the best vector; `restarts`, `seed` and `audits` echo annealing runs and
/// stay zero for the exhaustive solver.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SolveResult {
    pub best: Vec<bool>,
    pub energy: i64,
    pub evaluations: u64,
    pub restarts: u32,
    pub seed: u64,
    pub audits: u64,
}

/// Annealing schedule. The temperature falls geometrically from `t0` (when
/// None, max |coefficient| of the instance) to `t1` over the sweeps; each
/// sweep proposes n random single-bit flips. Identical params and seed give
/// identical results.
#[derive(Clone, PartialEq, Debug)]
pub struct SaParams {
    pub sweeps: u32,
    pub restarts: u32,
    pub t0: Option<f64>,
    pub t1: f64,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams { sweeps: 2000, restarts: 20, t0: None, t1: 0.1, seed: 1 }
    }
}

/// Diagonal plus symmetric adjacency, the form both solvers flip against.
struct Fields {
    diag: Vec<i64>,
    adj: Vec<Vec<(usize, i64)>>,
}

impl Fields {
    fn build(acc: &QuboAccumulator) -> Self {
        let n = acc.n() as usize;
        let mut diag = vec![0i64; n];
        let mut adj = vec![Vec::new(); n];
        for (i, j, w) in acc.entries() {
            if i == j {
                diag[i as usize] = w;
            } else {
                adj[i as usize].push((j as usize, w));
                adj[j as usize].push((i as usize, w));
            }
        }
        Fields { diag, adj }
    }

    /// Cost of setting bit i given the current assignment of its neighbors.
    fn local(&self, x: &[bool], i: usize) -> i64 {
        self.diag[i]
            + self.adj[i].iter().map(|&(j, w)| if x[j] { w } else { 0 }).sum::<i64>()
    }

    fn init(&self, x: &[bool]) -> Vec<i64> {
        (0..x.len()).map(|i| self.local(x, i)).collect()
    }

    /// Flips bit i, keeping every field current.
    fn flip(&self, x: &mut [bool], fields: &mut [i64], i: usize) {
        x[i] = !x[i];
        let sign = if x[i] { 1 } else { -1 };
        for &(j, w) in &self.adj[i] {
            fields[j] += sign * w;
        }
    }
}

fn flip_delta(x: &[bool], fields: &[i64], i: usize) -> i64 {
    if x[i] {
        -fields[i]
    } else {
        fields[i]
    }
}

fn lex_less(a: &[bool], b: &[bool]) -> bool {
    for k in 0..a.len() {
        if a[k] != b[k] {
            return !a[k];
        }
    }
    false
}

/// Exact global minimum by Gray-code enumeration of all 2^n vectors; one bit
/// flips per step, so each energy update costs one field lookup. Ties go to
/// the lexicographically smallest vector (false before true, leftmost first).
pub fn solve_exhaustive(acc: &QuboAccumulator, limit: u32) -> Result<SolveResult, SolverError> {
    let cap = limit.min(63);
    if acc.n() > cap {
        return Err(SolverError::Capacity { n: acc.n(), limit: cap });
    }
    let n = acc.n() as usize;
    let f = Fields::build(acc);
    let mut x = vec![false; n];
    let mut fields = f.init(&x);
    let mut cur = acc.energy(&x);
    let mut best = x.clone();
    let mut best_e = cur;
    for step in 1..1u64 << n {
        let i = step.trailing_zeros() as usize;
        cur += flip_delta(&x, &fields, i);
        f.flip(&mut x, &mut fields, i);
        if cur < best_e || (cur == best_e && lex_less(&x, &best)) {
            best_e = cur;
            best = x.clone();
        }
    }
    assert_eq!(best_e, acc.energy(&best), "incremental energy drifted");
    Ok(SolveResult {
        best,
        energy: best_e,
        evaluations: 1u64 << n,
        restarts: 0,
        seed: 0,
        audits: 0,
    })
}

#[cfg(debug_assertions)]
fn audit(acc: &QuboAccumulator, x: &[bool], i: usize, delta: i64, cur: i64) {
    let mut y = x.to_vec();
    y[i] = !y[i];
    assert_eq!(acc.energy(&y) - cur, delta, "flip delta disagrees with a full re-evaluation");
}

/// Simulated annealing over independent restarts, each seeded from
/// (seed, restart index). Metropolis acceptance on single-bit flips, then a
/// greedy descent to the nearest local minimum; the best restart wins, ties
/// to the lowest restart index. Debug builds replay every AUDIT_STRIDE-th
/// proposal against a full evaluation and report the count in `audits`.
pub fn solve_sa(acc: &QuboAccumulator, params: &SaParams) -> Result<SolveResult, SolverError> {
    let n = acc.n() as usize;
    assert!(n >= 1, "annealing needs at least one variable");
    assert!(params.restarts >= 1, "annealing needs at least one restart");
    assert!(params.sweeps >= 1, "annealing needs at least one sweep");
    let t0 = params.t0.unwrap_or(acc.max_abs_coefficient().max(1) as f64);
    let t1 = params.t1;
    if !(t1 > 0.0 && t0 >= t1) {
        return Err(SolverError::TemperatureOrdering { t0, t1 });
    }
    let ratio =
        if params.sweeps > 1 { libm::pow(t1 / t0, 1.0 / (params.sweeps - 1) as f64) } else { 1.0 };

    let f = Fields::build(acc);
    let mut evaluations = 0u64;
    let mut proposals = 0u64;
    let mut audits = 0u64;
    let mut best: Option<(i64, Vec<bool>)> = None;
    for restart in 0..params.restarts {
        let stream = params.seed ^ RESTART_STRIDE.wrapping_mul(restart as u64 + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(stream);
        let mut x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let mut fields = f.init(&x);
        let mut cur = acc.energy(&x);
        evaluations += 1;
        let mut t = t0;
        for _ in 0..params.sweeps {
            for _ in 0..n {
                let i = rng.gen_range(0..n);
                let delta = flip_delta(&x, &fields, i);
                evaluations += 1;
                proposals += 1;
                if cfg!(debug_assertions) && proposals % AUDIT_STRIDE == 0 {
                    #[cfg(debug_assertions)]
                    audit(acc, &x, i, delta, cur);
                    audits += 1;
                }
                if delta <= 0 || rng.gen::<f64>() < libm::exp(-(delta as f64) / t) {
                    cur += delta;
                    f.flip(&mut x, &mut fields, i);
                }
            }
            t *= ratio;
        }
        // the schedule rarely ends exactly at a local minimum; walk there
        loop {
            let mut improved = false;
            for i in 0..n {
                let delta = flip_delta(&x, &fields, i);
                evaluations += 1;
                if delta < 0 {
                    cur += delta;
                    f.flip(&mut x, &mut fields, i);
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        assert_eq!(cur, acc.energy(&x), "incremental energy drifted");
        evaluations += 1;
        if best.as_ref().is_none_or(|(e, _)| cur < *e) {
            best = Some((cur, x));
        }
    }
    let (energy, vector) = best.expect("at least one restart ran");
    assert_eq!(energy, acc.energy(&vector), "reported energy must re-evaluate");
    Ok(SolveResult {
        best: vector,
        energy,
        evaluations,
        restarts: params.restarts,
        seed: params.seed,
        audits,
    })
}
