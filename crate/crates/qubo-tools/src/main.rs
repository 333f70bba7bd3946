use clap::{Parser, Subcommand};
use qubo_tools::commands::{self, Baseline, Method};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qubo",
    about = "Build, solve, and verify QUBO encodings of SAT formulas and Hamiltonian-cycle instances"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a DIMACS CNF formula into a matrix file.
    SatBuild {
        /// Formula to compile.
        cnf: PathBuf,
        /// Matrix file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compile a graph into a Hamiltonian-cycle matrix file.
    HcBuild {
        /// Graph to compile (`p hc` edge list).
        graph: PathBuf,
        /// Matrix file to write.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Baseline::Ours)]
        baseline: Baseline,
    },
    /// Minimize a matrix file.
    Solve {
        /// Matrix file to minimize.
        qubo: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Annealing sweeps per restart.
        #[arg(long, default_value_t = 2000)]
        sweeps: u32,
        /// Independent annealing restarts.
        #[arg(long, default_value_t = 20)]
        restarts: u32,
        /// Largest dimension exhaustive search accepts.
        #[arg(long, default_value_t = qubo_core::solvers::DEFAULT_EXHAUSTIVE_LIMIT)]
        limit: u32,
        /// Solution file to write for a later `verify`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution file against the instance its matrix was built from.
    Verify {
        /// Matrix file.
        qubo: PathBuf,
        /// Solution file from `solve --out`.
        solution: PathBuf,
        /// Original CNF or graph file.
        instance: PathBuf,
    },
    /// Write a random satisfiable k-SAT formula in DIMACS form.
    GenSat {
        #[arg(long)]
        vars: u32,
        #[arg(long)]
        clauses: u32,
        /// Literals per clause.
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Formula file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a random graph, planting a tour unless told otherwise.
    GenGraph {
        #[arg(long)]
        vertices: u32,
        /// Listed edges (pairs when undirected).
        #[arg(long)]
        edges: u64,
        #[arg(long)]
        directed: bool,
        /// Skip planting a tour.
        #[arg(long)]
        no_plant: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Graph file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the CSV dataset behind one scaling figure.
    Scaling {
        /// 1: ancillas per clause, 2: fully connected graphs, 3: |E| = 4|V|.
        #[arg(long)]
        figure: u8,
        /// First k or vertex count (figure-specific default).
        #[arg(long)]
        min: Option<u32>,
        /// Last k or vertex count (figure-specific default).
        #[arg(long)]
        max: Option<u32>,
        /// CSV file to write.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::SatBuild { cnf, out } => commands::sat_build(&cnf, &out),
        Cmd::HcBuild { graph, out, baseline } => commands::hc_build(&graph, &out, baseline),
        Cmd::Solve { qubo, method, seed, sweeps, restarts, limit, out } => {
            commands::solve(&qubo, method, seed, sweeps, restarts, limit, out.as_deref())
        }
        Cmd::Verify { qubo, solution, instance } => commands::verify(&qubo, &solution, &instance),
        Cmd::GenSat { vars, clauses, k, seed, out } => {
            commands::gen_sat(vars, clauses, k, seed, &out)
        }
        Cmd::GenGraph { vertices, edges, directed, no_plant, seed, out } => {
            commands::gen_graph(vertices, edges, directed, !no_plant, seed, &out)
        }
        Cmd::Scaling { figure, min, max, out } => commands::scaling(figure, min, max, &out),
    };
    match result {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
