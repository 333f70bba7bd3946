//! Clause-to-penalty compilation. Long clauses get a binary register that is
//! forced, by a squared residual, to hold the number of satisfied literals;
//! the register bits then form a shorter all-positive clause, and the
//! recursion bottoms out in direct two- and three-literal gadgets. Minimizing
//! the result over the ancillas costs exactly 1 per violated clause.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::qubo::{ceil_log2, AffineExpr, Label, QuboAccumulator, VarId, VariableRegistry};

/// Possibly negated variable.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Literal {
    pub var: VarId,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: VarId) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: VarId) -> Self {
        Literal { var, negated: true }
    }

    /// Truth value under an assignment.
    pub fn satisfied_by(self, x: &[bool]) -> bool {
        x[self.var.index()] != self.negated
    }
}

/// Disjunction of at least one literal. Duplicate and complementary literals
/// are allowed and keep their multiplicities.
#[derive(Clone, PartialEq, Eq, Debug)]
#[allow(clippy::len_without_is_empty)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Result<Self, SatError> {
        if literals.is_empty() {
            return Err(SatError::EmptyClause);
        }
        Ok(Clause { literals })
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn satisfied_by(&self, x: &[bool]) -> bool {
        self.literals.iter().any(|l| l.satisfied_by(x))
    }

    /// Number of satisfied literals, counting multiplicity.
    pub fn satisfied_count(&self, x: &[bool]) -> usize {
        self.literals.iter().filter(|l| l.satisfied_by(x)).count()
    }
}

/// CNF formula over variables `0..var_count`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Formula {
    var_count: u32,
    clauses: Vec<Clause>,
}

impl Formula {
    pub fn new(var_count: u32, clauses: Vec<Clause>) -> Result<Self, SatError> {
        for c in &clauses {
            for l in c.literals() {
                if l.var.0 >= var_count {
                    return Err(SatError::LiteralOutOfRange { var: l.var.0, var_count });
                }
            }
        }
        Ok(Formula { var_count, clauses })
    }

    pub fn var_count(&self) -> u32 {
        self.var_count
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Clauses left unsatisfied by a full assignment.
    pub fn count_unsatisfied(&self, x: &[bool]) -> usize {
        assert_eq!(x.len(), self.var_count as usize, "assignment length must equal the variable count");
        self.clauses.iter().filter(|c| !c.satisfied_by(x)).count()
    }

    pub fn satisfied_by(&self, x: &[bool]) -> bool {
        self.count_unsatisfied(x) == 0
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SatError {
    EmptyClause,
    LiteralOutOfRange { var: u32, var_count: u32 },
    EmptyFormula,
}

impl fmt::Display for SatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SatError::EmptyClause => write!(f, "clauses must contain at least one literal"),
            SatError::LiteralOutOfRange { var, var_count } => {
                write!(f, "literal references variable {var} but the formula declares {var_count}")
            }
            SatError::EmptyFormula => write!(f, "formula has no clauses"),
        }
    }
}

impl core::error::Error for SatError {}

/// Truth value of a literal as an affine 0/1 expression.
pub fn literal_expr(l: Literal) -> AffineExpr {
    if l.negated {
        AffineExpr::constant(1) - AffineExpr::var(l.var)
    } else {
        AffineExpr::var(l.var)
    }
}

/// Product penalty for a two-literal clause: 1 exactly when both literals are
/// false, 0 otherwise. No ancilla needed.
///
/// # Panics
/// Panics unless the clause has exactly two literals.
pub fn or_gadget(acc: &mut QuboAccumulator, c: &Clause) {
    assert_eq!(c.len(), 2, "or_gadget needs a two-literal clause");
    let f1 = AffineExpr::constant(1) - literal_expr(c.literals()[0]);
    let f2 = AffineExpr::constant(1) - literal_expr(c.literals()[1]);
    acc.add_bilinear(&f1, &f2, 1);
}

/// One-ancilla penalty for a three-literal clause:
/// `1 - (v1+v2+v3) + v1 v2 + v1 v3 + v2 v3 + w (2 - v1 - v2 - v3)`.
/// Minimized over the ancilla `w` it contributes 0 when the clause holds and
/// 1 when it does not.
///
/// # Panics
/// Panics unless the clause has exactly three literals, or when the ancilla
/// occurs inside the clause.
pub fn threesat_gadget(acc: &mut QuboAccumulator, c: &Clause, ancilla: VarId) {
    assert_eq!(c.len(), 3, "threesat_gadget needs a three-literal clause");
    assert!(
        c.literals().iter().all(|l| l.var != ancilla),
        "ancilla {ancilla} reused inside its own clause"
    );
    let vs: Vec<AffineExpr> = c.literals().iter().map(|&l| literal_expr(l)).collect();
    let sum = vs[0].clone() + vs[1].clone() + vs[2].clone();
    acc.add_affine(&(AffineExpr::constant(1) - sum.clone()), 1);
    for i in 0..3 {
        for j in i + 1..3 {
            acc.add_bilinear(&vs[i], &vs[j], 1);
        }
    }
    acc.add_bilinear(&AffineExpr::var(ancilla), &(AffineExpr::constant(2) - sum), 1);
}

/// Squared residual forcing `ancillas` to binary-encode the number of
/// satisfied literals: `(sum of literal values - sum of 2^j ancilla_j)^2`.
/// The contribution is 0 exactly when the register matches the count.
///
/// # Panics
/// Panics unless `ancillas` holds `ceil(log2(len + 1))` distinct variables
/// that do not occur in the clause.
pub fn count_penalty(acc: &mut QuboAccumulator, c: &Clause, ancillas: &[VarId]) {
    let h = ceil_log2(c.len() as u64 + 1) as usize;
    assert_eq!(
        ancillas.len(),
        h,
        "clause of length {} needs {} counter bits, got {}",
        c.len(),
        h,
        ancillas.len()
    );
    for (i, a) in ancillas.iter().enumerate() {
        assert!(c.literals().iter().all(|l| l.var != *a), "counter bit {a} reused inside its own clause");
        assert!(!ancillas[i + 1..].contains(a), "duplicate counter bit {a}");
    }
    let mut e = AffineExpr::zero();
    for &l in c.literals() {
        e = e + literal_expr(l);
    }
    for (j, &a) in ancillas.iter().enumerate() {
        e = e - AffineExpr::term(a, 1i64 << j);
    }
    acc.add_squared(&e);
}

/// Sizes of the ancilla groups a clause of length `k` needs, outermost first.
/// Empty for `k <= 2`, `[1]` for `k = 3`, and `[h] ++ levels(h)` with
/// `h = ceil(log2(k + 1))` beyond that.
///
/// # Panics
/// Panics when `k = 0`.
pub fn ancilla_levels(k: u32) -> Vec<u32> {
    assert!(k >= 1, "clauses have at least one literal");
    match k {
        1 | 2 => vec![],
        3 => vec![1],
        _ => {
            let h = ceil_log2(k as u64 + 1);
            let mut levels = vec![h];
            levels.extend(ancilla_levels(h));
            levels
        }
    }
}

/// Total ancillas for a clause of length `k`.
pub fn ancilla_count(k: u32) -> u32 {
    ancilla_levels(k).iter().sum()
}

/// Adds all penalties for one clause, allocating fresh labeled ancillas.
/// Returns the ancilla ids grouped by recursion level, outermost first.
pub fn implement_clause(
    acc: &mut QuboAccumulator,
    registry: &mut VariableRegistry,
    clause_id: u32,
    c: &Clause,
) -> Vec<Vec<VarId>> {
    assert_eq!(registry.len(), acc.n(), "registry and matrix disagree on the variable count");
    let mut levels = Vec::new();
    add_level(acc, registry, clause_id, 0, c.clone(), &mut levels);
    levels
}

fn add_level(
    acc: &mut QuboAccumulator,
    registry: &mut VariableRegistry,
    clause_id: u32,
    level: u32,
    c: Clause,
    out: &mut Vec<Vec<VarId>>,
) {
    match c.len() {
        // a lone literal costs 1 exactly when false; no square needed
        1 => acc.add_affine(&(AffineExpr::constant(1) - literal_expr(c.literals()[0])), 1),
        2 => or_gadget(acc, &c),
        3 => {
            let ws = alloc_ancillas(acc, registry, clause_id, level, 1);
            threesat_gadget(acc, &c, ws[0]);
            out.push(ws);
        }
        k => {
            let h = ceil_log2(k as u64 + 1);
            let ws = alloc_ancillas(acc, registry, clause_id, level, h);
            count_penalty(acc, &c, &ws);
            // a nonzero count is exactly "some register bit set", so the
            // register bits carry the clause down the recursion
            let next = Clause::new(ws.iter().map(|&w| Literal::pos(w)).collect())
                .expect("counter register is never empty");
            out.push(ws);
            add_level(acc, registry, clause_id, level + 1, next, out);
        }
    }
}

fn alloc_ancillas(
    acc: &mut QuboAccumulator,
    registry: &mut VariableRegistry,
    clause: u32,
    level: u32,
    count: u32,
) -> Vec<VarId> {
    let ids: Vec<VarId> =
        (0..count).map(|bit| registry.push(Label::ClauseAncilla { clause, level, bit })).collect();
    acc.grow_to(registry.len());
    ids
}

/// A compiled formula: matrix, labels, and the ancilla blocks per clause.
#[derive(Clone, Debug)]
pub struct SatCompilation {
    pub accumulator: QuboAccumulator,
    pub registry: VariableRegistry,
    /// Ancilla ids per clause, grouped by recursion level, outermost first.
    pub clause_ancillas: Vec<Vec<Vec<VarId>>>,
}

impl SatCompilation {
    /// Matrix dimension: problem variables plus all clause ancillas.
    pub fn dimension(&self) -> u32 {
        self.accumulator.n()
    }

    pub fn problem_vars(&self) -> u32 {
        self.registry.problem_count()
    }

    /// Problem assignment stored in the leading bits; ancilla bits are ignored.
    pub fn decode(&self, sol: &[bool]) -> Vec<bool> {
        assert_eq!(sol.len(), self.accumulator.n() as usize, "solution length must equal the dimension");
        sol[..self.registry.problem_count() as usize].to_vec()
    }
}

/// Compiles a formula: problem variables first, then per-clause ancilla
/// blocks in clause order. For any fixed problem assignment, minimizing the
/// matrix over the ancillas yields exactly the number of unsatisfied clauses.
pub fn compile(f: &Formula) -> Result<SatCompilation, SatError> {
    if f.clauses().is_empty() {
        return Err(SatError::EmptyFormula);
    }
    let mut registry = VariableRegistry::new();
    for i in 0..f.var_count() {
        registry.push(Label::Problem(format!("x{}", i + 1)));
    }
    let mut acc = QuboAccumulator::new(f.var_count());
    let mut clause_ancillas = Vec::with_capacity(f.clauses().len());
    for (ci, c) in f.clauses().iter().enumerate() {
        clause_ancillas.push(implement_clause(&mut acc, &mut registry, ci as u32, c));
    }
    let predicted: u32 =
        f.var_count() + f.clauses().iter().map(|c| ancilla_count(c.len() as u32)).sum::<u32>();
    assert_eq!(acc.n(), predicted, "compiled dimension diverged from the ancilla recurrence");
    Ok(SatCompilation { accumulator: acc, registry, clause_ancillas })
}
