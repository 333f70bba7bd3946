//! The batch commands behind the `qubo` binary. Each returns the text it
//! prints on success; failures carry the process exit code.

use crate::format::{self, QuboFile};
use qubo_core::generators;
use qubo_core::hc::{self, Graph};
use qubo_core::oracles;
use qubo_core::qubo::{Label, VarId};
use qubo_core::sat::{self, SatCompilation};
use qubo_core::solvers::{self, SaParams, SolverError};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

/// Command failure, sorted by process exit code: a solution that fails
/// verification exits 1, unusable input exits 2, an instance beyond a
/// solver's capacity exits 3.
#[derive(Debug, Error)]
pub enum CmdError {
    #[error("{0}")]
    Verify(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Capacity(String),
}

impl CmdError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CmdError::Verify(_) => 1,
            CmdError::Input(_) => 2,
            CmdError::Capacity(_) => 3,
        }
    }
}

/// Hamiltonian-cycle encoding choice.
#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum Baseline {
    /// Binary position register per edge.
    Ours,
    /// One-hot vertex-by-slot grid.
    Lucas,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum Method {
    /// Exhaustive below the dimension limit, annealing above it.
    Auto,
    Exhaustive,
    Sa,
}

fn input(path: &Path, e: impl std::fmt::Display) -> CmdError {
    CmdError::Input(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, CmdError> {
    std::fs::read_to_string(path).map_err(|e| input(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), CmdError> {
    std::fs::write(path, text).map_err(|e| input(path, e))
}

fn load_qubo(path: &Path) -> Result<QuboFile, CmdError> {
    format::parse_qubo(&read(path)?).map_err(|e| input(path, e))
}

/// Clause-to-ancilla map in the file format's shape.
fn clause_maps(c: &SatCompilation) -> Vec<(u32, u32, Vec<VarId>)> {
    let mut maps = Vec::new();
    for (clause, levels) in c.clause_ancillas.iter().enumerate() {
        for (level, ids) in levels.iter().enumerate() {
            maps.push((clause as u32, level as u32, ids.clone()));
        }
    }
    maps
}

/// Compiles a DIMACS CNF file into a matrix file and reports the dimension
/// next to the recurrence prediction.
pub fn sat_build(cnf: &Path, out: &Path) -> Result<String, CmdError> {
    let f = format::parse_cnf(&read(cnf)?).map_err(|e| input(cnf, e))?;
    let predicted: u32 = f.var_count()
        + f.clauses().iter().map(|c| sat::ancilla_count(c.len() as u32)).sum::<u32>();
    let comp = sat::compile(&f).map_err(|e| input(cnf, e))?;
    assert_eq!(comp.dimension(), predicted, "dimension diverged from the recurrence");
    let file = QuboFile {
        maps: clause_maps(&comp),
        accumulator: comp.accumulator,
        registry: comp.registry,
    };
    write(out, &format::render_qubo(&file))?;
    Ok(format!("n={} predicted={predicted}\n", file.accumulator.n()))
}

/// Compiles a graph file into a matrix file under the chosen encoding.
pub fn hc_build(graph: &Path, out: &Path, baseline: Baseline) -> Result<String, CmdError> {
    let g = format::parse_graph(&read(graph)?).map_err(|e| input(graph, e))?;
    let file = match baseline {
        Baseline::Ours => {
            let c = hc::compile(&g);
            QuboFile { accumulator: c.accumulator, registry: c.registry, maps: vec![] }
        }
        Baseline::Lucas => {
            let c = hc::compile_one_hot(&g);
            QuboFile { accumulator: c.accumulator, registry: c.registry, maps: vec![] }
        }
    };
    write(out, &format::render_qubo(&file))?;
    Ok(format!("n={}\n", file.accumulator.n()))
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn solver_err(e: SolverError) -> CmdError {
    match e {
        SolverError::Capacity { .. } => CmdError::Capacity(e.to_string()),
        other => CmdError::Input(other.to_string()),
    }
}

/// Minimizes a matrix file and reports the best vector found; `out` takes
/// the solution file for a later `verify`.
pub fn solve(
    qubo: &Path,
    method: Method,
    seed: u64,
    sweeps: u32,
    restarts: u32,
    limit: u32,
    out: Option<&Path>,
) -> Result<String, CmdError> {
    let file = load_qubo(qubo)?;
    let acc = &file.accumulator;
    let use_sa = match method {
        Method::Exhaustive => false,
        Method::Sa => true,
        Method::Auto => acc.n() > limit.min(63),
    };
    let (name, result) = if use_sa {
        let params = SaParams { sweeps, restarts, seed, ..SaParams::default() };
        ("sa", solvers::solve_sa(acc, &params).map_err(solver_err)?)
    } else {
        ("exhaustive", solvers::solve_exhaustive(acc, limit).map_err(solver_err)?)
    };
    let mut report = String::new();
    let _ = writeln!(report, "method {name}");
    let _ = writeln!(report, "n {}", acc.n());
    let _ = writeln!(report, "energy {}", result.energy);
    let _ = writeln!(report, "evaluations {}", result.evaluations);
    if use_sa {
        let _ = writeln!(report, "restarts {}", result.restarts);
        let _ = writeln!(report, "seed {}", result.seed);
    }
    let _ = writeln!(report, "solution {}", bits(&result.best));
    if let Some(p) = out {
        write(p, &format::render_solution(&result.best))?;
    }
    Ok(report)
}

/// Checks a solution file against the instance its matrix was built from:
/// the matrix must match a fresh compilation, and the vector must decode to
/// a model (SAT) or to a tour at the tour energy (HC).
pub fn verify(qubo: &Path, solution: &Path, instance: &Path) -> Result<String, CmdError> {
    let file = load_qubo(qubo)?;
    let sol = format::parse_solution(&read(solution)?).map_err(|e| input(solution, e))?;
    if sol.len() != file.accumulator.n() as usize {
        return Err(CmdError::Input(format!(
            "solution has {} bits but the matrix has {} variables",
            sol.len(),
            file.accumulator.n()
        )));
    }
    let energy = file.accumulator.energy(&sol);
    let n = file.accumulator.n();
    let text = read(instance)?;
    let head = text
        .lines()
        .map(str::trim_start)
        .find(|l| !l.is_empty() && !l.starts_with('c'))
        .unwrap_or("");

    if head.starts_with("p cnf") {
        let f = format::parse_cnf(&text).map_err(|e| input(instance, e))?;
        let comp = sat::compile(&f).map_err(|e| input(instance, e))?;
        if comp.accumulator != file.accumulator
            || comp.registry != file.registry
            || clause_maps(&comp) != file.maps
        {
            return Err(CmdError::Verify("matrix file does not match the instance".into()));
        }
        let assignment = comp.decode(&sol);
        let open = f.count_unsatisfied(&assignment);
        if open > 0 {
            return Err(CmdError::Verify(format!(
                "{open} of {} clauses unsatisfied",
                f.clauses().len()
            )));
        }
        return Ok(format!("n {n}\nenergy {energy}\nmodel valid\n"));
    }

    if head.starts_with("p hc") {
        let g = format::parse_graph(&text).map_err(|e| input(instance, e))?;
        let labels = file.registry.labels();
        let edge_based = labels.iter().any(|l| matches!(l, Label::EdgeBit { .. }));
        let one_hot = labels.iter().any(|l| matches!(l, Label::Position { .. }));
        let mismatch = || CmdError::Verify("matrix file does not match the instance".into());
        let tour = if edge_based {
            let comp = hc::compile(&g);
            if comp.accumulator != file.accumulator
                || comp.registry != file.registry
                || !file.maps.is_empty()
            {
                return Err(mismatch());
            }
            comp.decode(&sol).map_err(|e| CmdError::Verify(e.to_string()))?
        } else if one_hot {
            let comp = hc::compile_one_hot(&g);
            if comp.accumulator != file.accumulator
                || comp.registry != file.registry
                || !file.maps.is_empty()
            {
                return Err(mismatch());
            }
            comp.decode(&sol)
                .ok_or_else(|| CmdError::Verify("solution is not a one-hot tour".into()))?
        } else {
            return Err(CmdError::Input(
                "matrix labels do not describe a graph encoding".into(),
            ));
        };
        if !oracles::is_valid_cycle(&g, &tour) {
            return Err(CmdError::Verify("decoded tour is not a cycle of the graph".into()));
        }
        let want = if edge_based { hc::optimal_energy(g.vertex_count()) } else { 0 };
        if energy != want {
            return Err(CmdError::Verify(format!("energy {energy}, a tour scores {want}")));
        }
        return Ok(format!("n {n}\nenergy {energy}\ncycle valid\n"));
    }

    Err(input(instance, "unrecognized instance header"))
}

/// Writes a random satisfiable k-SAT formula in DIMACS form.
pub fn gen_sat(vars: u32, clauses: u32, k: u32, seed: u64, out: &Path) -> Result<String, CmdError> {
    let f = generators::gen_sat(vars, clauses, k, seed, true)
        .map_err(|e| CmdError::Input(e.to_string()))?;
    write(out, &format::render_cnf(&f))?;
    Ok(String::new())
}

/// Writes a random graph file, planting a tour unless disabled.
pub fn gen_graph(
    vertices: u32,
    edges: u64,
    directed: bool,
    plant: bool,
    seed: u64,
    out: &Path,
) -> Result<String, CmdError> {
    let g = generators::gen_graph(vertices, edges, directed, seed, plant)
        .map_err(|e| CmdError::Input(e.to_string()))?;
    write(out, &format::render_graph(&g))?;
    Ok(String::new())
}

fn check_range(lo: u32, hi: u32, floor: u32) -> Result<(), CmdError> {
    if lo < floor {
        return Err(CmdError::Input(format!("range must start at {floor} or above, got {lo}")));
    }
    if lo > hi {
        return Err(CmdError::Input(format!("empty range {lo}..={hi}")));
    }
    Ok(())
}

/// Writes the CSV dataset behind one scaling figure: 1 compares ancillas
/// per k-literal clause, 2 compares encodings on fully connected graphs,
/// 3 on sparse graphs with |E| = 4|V|.
pub fn scaling(figure: u8, min: Option<u32>, max: Option<u32>, out: &Path) -> Result<String, CmdError> {
    let mut csv = String::new();
    match figure {
        1 => {
            let (lo, hi) = (min.unwrap_or(2), max.unwrap_or(64));
            check_range(lo, hi, 1)?;
            csv.push_str("k,chancellor,ours\n");
            for k in lo..=hi {
                let _ = writeln!(csv, "{k},{k},{}", sat::ancilla_count(k));
            }
        }
        2 => {
            let (lo, hi) = (min.unwrap_or(5), max.unwrap_or(40));
            check_range(lo, hi, 3)?;
            csv.push_str("N,lucas,ours\n");
            for n in lo..=hi {
                let r = hc::size_report(&Graph::complete(n));
                let _ = writeln!(csv, "{n},{},{}", r.one_hot, r.edge_position);
            }
        }
        3 => {
            let (lo, hi) = (min.unwrap_or(5), max.unwrap_or(40));
            check_range(lo, hi, 5)?;
            csv.push_str("N,lucas,ours\n");
            for n in lo..=hi {
                let r = hc::size_report(&Graph::circulant(n, &[1, 2, 3, 4]));
                let _ = writeln!(csv, "{n},{},{}", r.one_hot, r.edge_position);
            }
        }
        other => return Err(CmdError::Input(format!("no figure {other}, expected 1, 2, or 3"))),
    }
    write(out, &csv)?;
    Ok(String::new())
}
