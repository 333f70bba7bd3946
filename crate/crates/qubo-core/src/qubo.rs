//! Growable integer QUBO matrices and the affine expressions that feed them.
//!
//! A matrix stores upper-triangular entries `(i, j) -> coefficient` with
//! `i <= j` together with an explicit constant offset, so squared penalties
//! keep their true values and ground energies are exact integers. Diagonal
//! entries are linear terms, since `x * x = x` on binaries.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

/// Index of one binary variable.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VarId(pub u32);

impl VarId {
    /// The id as a usize, for slice access.
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Smallest `h` with `2^h >= m`.
pub(crate) fn ceil_log2(m: u64) -> u32 {
    assert!(m >= 1);
    u64::BITS - (m - 1).leading_zeros()
}

/// Origin of a variable. Ancilla labels record which reduction step
/// introduced them, so solutions stay interpretable after compilation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Label {
    /// Named variable of the original problem.
    Problem(String),
    /// Counter bit tied to one clause at one recursion level.
    ClauseAncilla { clause: u32, level: u32, bit: u32 },
    /// Bit of the position register of one directed edge.
    EdgeBit { tail: u32, head: u32, bit: u32 },
    /// Vertex-at-slot indicator of the one-hot encoding.
    Position { vertex: u32, slot: u32 },
}

impl Label {
    /// Whitespace-free token used by the matrix file format.
    pub fn to_token(&self) -> String {
        match self {
            Label::Problem(name) => format!("p:{name}"),
            Label::ClauseAncilla { clause, level, bit } => format!("a:{clause}:{level}:{bit}"),
            Label::EdgeBit { tail, head, bit } => format!("e:{tail}:{head}:{bit}"),
            Label::Position { vertex, slot } => format!("s:{vertex}:{slot}"),
        }
    }

    /// Parses a token produced by [`Label::to_token`].
    pub fn parse_token(token: &str) -> Result<Label, LabelParseError> {
        let bad = || LabelParseError { token: token.to_string() };
        let (kind, rest) = token.split_once(':').ok_or_else(bad)?;
        let fields: Vec<&str> = rest.split(':').collect();
        let num = |s: &str| s.parse::<u32>().map_err(|_| bad());
        match (kind, fields.as_slice()) {
            ("p", _) if !rest.is_empty() && !rest.chars().any(char::is_whitespace) => {
                Ok(Label::Problem(rest.to_string()))
            }
            ("a", [c, l, b]) => Ok(Label::ClauseAncilla { clause: num(c)?, level: num(l)?, bit: num(b)? }),
            ("e", [t, h, b]) => Ok(Label::EdgeBit { tail: num(t)?, head: num(h)?, bit: num(b)? }),
            ("s", [v, s]) => Ok(Label::Position { vertex: num(v)?, slot: num(s)? }),
            _ => Err(bad()),
        }
    }
}

/// Token that does not name a variable label.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabelParseError {
    pub token: String,
}

impl fmt::Display for LabelParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unrecognized variable label `{}`", self.token)
    }
}

impl core::error::Error for LabelParseError {}

/// Ordered variable labels. Problem variables form a strict prefix, so the
/// leading bits of any solution vector are the original problem assignment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VariableRegistry {
    entries: Vec<Label>,
    problem_prefix: u32,
}

impl VariableRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a label and returns its id.
    ///
    /// # Panics
    /// Panics when a problem variable follows an ancilla, or when a problem
    /// name is empty or contains whitespace or control characters.
    pub fn push(&mut self, label: Label) -> VarId {
        if let Label::Problem(name) = &label {
            assert!(
                !name.is_empty() && !name.chars().any(|c| c.is_whitespace() || c.is_control()),
                "invalid problem variable name {name:?}"
            );
            assert_eq!(
                self.problem_prefix as usize,
                self.entries.len(),
                "problem variables must precede all ancillas"
            );
            self.problem_prefix += 1;
        }
        self.entries.push(label);
        VarId(self.entries.len() as u32 - 1)
    }

    pub fn len(&self) -> u32 {
        self.entries.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of leading problem variables.
    pub fn problem_count(&self) -> u32 {
        self.problem_prefix
    }

    pub fn label(&self, id: VarId) -> &Label {
        &self.entries[id.index()]
    }

    pub fn labels(&self) -> &[Label] {
        &self.entries
    }
}

/// Integer affine expression `constant + sum(coeff * x_var)` over binaries.
/// Terms stay sorted by variable, merged, with zero coefficients dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AffineExpr {
    constant: i64,
    terms: Vec<(VarId, i64)>,
}

impl AffineExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i64) -> Self {
        AffineExpr { constant: c, terms: Vec::new() }
    }

    /// The expression `x_v`.
    pub fn var(v: VarId) -> Self {
        Self::term(v, 1)
    }

    /// The expression `coeff * x_v`.
    pub fn term(v: VarId, coeff: i64) -> Self {
        let terms = if coeff == 0 { Vec::new() } else { vec![(v, coeff)] };
        AffineExpr { constant: 0, terms }
    }

    pub fn constant_part(&self) -> i64 {
        self.constant
    }

    /// Sorted `(variable, coefficient)` pairs, all nonzero.
    pub fn terms(&self) -> &[(VarId, i64)] {
        &self.terms
    }

    /// Value under an assignment, indexing `x` by variable id.
    pub fn eval(&self, x: &[bool]) -> i64 {
        let mut v = self.constant;
        for &(var, coeff) in &self.terms {
            if x[var.index()] {
                v += coeff;
            }
        }
        v
    }

    fn merged(constant: i64, parts: impl IntoIterator<Item = (VarId, i64)>) -> Self {
        let mut by_var: BTreeMap<VarId, i64> = BTreeMap::new();
        for (v, c) in parts {
            *by_var.entry(v).or_insert(0) += c;
        }
        let terms = by_var.into_iter().filter(|&(_, c)| c != 0).collect();
        AffineExpr { constant, terms }
    }
}

impl Add for AffineExpr {
    type Output = AffineExpr;
    fn add(self, rhs: AffineExpr) -> AffineExpr {
        AffineExpr::merged(self.constant + rhs.constant, self.terms.into_iter().chain(rhs.terms))
    }
}

impl Sub for AffineExpr {
    type Output = AffineExpr;
    fn sub(self, rhs: AffineExpr) -> AffineExpr {
        self + (-rhs)
    }
}

impl Neg for AffineExpr {
    type Output = AffineExpr;
    fn neg(mut self) -> AffineExpr {
        self.constant = -self.constant;
        for t in &mut self.terms {
            t.1 = -t.1;
        }
        self
    }
}

impl Mul<i64> for AffineExpr {
    type Output = AffineExpr;
    fn mul(mut self, rhs: i64) -> AffineExpr {
        if rhs == 0 {
            return AffineExpr::zero();
        }
        self.constant *= rhs;
        for t in &mut self.terms {
            t.1 *= rhs;
        }
        self
    }
}

impl Add<i64> for AffineExpr {
    type Output = AffineExpr;
    fn add(mut self, rhs: i64) -> AffineExpr {
        self.constant += rhs;
        self
    }
}

impl Sub<i64> for AffineExpr {
    type Output = AffineExpr;
    fn sub(mut self, rhs: i64) -> AffineExpr {
        self.constant -= rhs;
        self
    }
}

/// Upper-triangular integer QUBO matrix with a constant offset.
///
/// The energy of an assignment `x` is
/// `offset + sum of coefficients at (i, j) with x_i = x_j = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuboAccumulator {
    n: u32,
    offset: i64,
    entries: BTreeMap<(u32, u32), i64>,
}

impl QuboAccumulator {
    pub fn new(n: u32) -> Self {
        QuboAccumulator { n, offset: 0, entries: BTreeMap::new() }
    }

    /// Variable count.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn add_offset(&mut self, c: i64) {
        self.offset += c;
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    /// Entries sorted by key. Every key has `i <= j` and a nonzero coefficient.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, i64)> + '_ {
        self.entries.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    /// Stored coefficient at the normalized key, 0 when absent.
    pub fn coefficient(&self, i: VarId, j: VarId) -> i64 {
        self.entries.get(&Self::key(i, j)).copied().unwrap_or(0)
    }

    /// Raises the variable count; existing entries keep their indices.
    ///
    /// # Panics
    /// Panics when `n` is smaller than the current count.
    pub fn grow_to(&mut self, n: u32) {
        assert!(n >= self.n, "grow_to cannot shrink the matrix");
        self.n = n;
    }

    fn key(i: VarId, j: VarId) -> (u32, u32) {
        if i.0 <= j.0 {
            (i.0, j.0)
        } else {
            (j.0, i.0)
        }
    }

    fn check(&self, v: VarId) {
        assert!(v.0 < self.n, "variable {v} out of range for a {}-variable matrix", self.n);
    }

    /// Adds `coeff` at the normalized key `(min(i, j), max(i, j))`.
    /// Entries that reach zero are removed.
    pub fn add_entry(&mut self, i: VarId, j: VarId, coeff: i64) {
        self.check(i);
        self.check(j);
        if coeff == 0 {
            return;
        }
        let key = Self::key(i, j);
        let slot = self.entries.entry(key).or_insert(0);
        *slot += coeff;
        if *slot == 0 {
            self.entries.remove(&key);
        }
    }

    /// Adds `scale * e` as diagonal terms plus offset.
    pub fn add_affine(&mut self, e: &AffineExpr, scale: i64) {
        self.add_offset(scale * e.constant);
        for &(v, a) in e.terms() {
            self.add_entry(v, v, scale * a);
        }
    }

    /// Adds `e * e`, expanded with `x * x = x`.
    pub fn add_squared(&mut self, e: &AffineExpr) {
        self.add_offset(e.constant * e.constant);
        let terms = e.terms();
        for (idx, &(v, a)) in terms.iter().enumerate() {
            self.add_entry(v, v, a * a + 2 * e.constant * a);
            for &(w, b) in &terms[idx + 1..] {
                self.add_entry(v, w, 2 * a * b);
            }
        }
    }

    /// Adds `coeff * e1 * e2`, folding same-variable products onto the diagonal.
    pub fn add_bilinear(&mut self, e1: &AffineExpr, e2: &AffineExpr, coeff: i64) {
        if coeff == 0 {
            return;
        }
        self.add_offset(coeff * e1.constant * e2.constant);
        for &(v, a) in e1.terms() {
            self.add_entry(v, v, coeff * a * e2.constant);
        }
        for &(w, b) in e2.terms() {
            self.add_entry(w, w, coeff * b * e1.constant);
        }
        for &(v, a) in e1.terms() {
            for &(w, b) in e2.terms() {
                self.add_entry(v, w, coeff * a * b);
            }
        }
    }

    /// Energy of an assignment.
    ///
    /// # Panics
    /// Panics when `x.len() != n`.
    pub fn energy(&self, x: &[bool]) -> i64 {
        assert_eq!(x.len(), self.n as usize, "assignment length must equal the variable count");
        let mut e = self.offset;
        for (&(i, j), &c) in &self.entries {
            if x[i as usize] && x[j as usize] {
                e += c;
            }
        }
        e
    }

    /// Largest absolute entry coefficient; 0 for an empty matrix.
    pub fn max_abs_coefficient(&self) -> i64 {
        self.entries.values().map(|c| c.abs()).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn x0() -> AffineExpr {
        AffineExpr::var(VarId(0))
    }

    fn x1() -> AffineExpr {
        AffineExpr::var(VarId(1))
    }

    #[test]
    fn squared_single_variable() {
        let mut acc = QuboAccumulator::new(1);
        acc.add_squared(&(x0() - 1));
        assert_eq!(acc.coefficient(VarId(0), VarId(0)), -1);
        assert_eq!(acc.offset(), 1);
        assert_eq!(acc.energy(&[false]), 1);
        assert_eq!(acc.energy(&[true]), 0);
    }

    #[test]
    fn squared_two_terms() {
        let mut acc = QuboAccumulator::new(2);
        acc.add_squared(&(x0() + x1() * 2 - 3));
        assert_eq!(acc.coefficient(VarId(0), VarId(0)), -5);
        assert_eq!(acc.coefficient(VarId(1), VarId(1)), -8);
        assert_eq!(acc.coefficient(VarId(0), VarId(1)), 4);
        assert_eq!(acc.offset(), 9);
        assert_eq!(acc.energy(&[true, true]), 0);
    }

    #[test]
    fn squared_zero_expression_is_noop() {
        let mut acc = QuboAccumulator::new(2);
        acc.add_squared(&AffineExpr::zero());
        assert_eq!(acc, QuboAccumulator::new(2));
    }

    #[test]
    fn squared_matches_eval_square_exhaustively() {
        // every expression over 2 variables with small coefficients
        for c in -2i64..=2 {
            for a in -2i64..=2 {
                for b in -2i64..=2 {
                    let e = AffineExpr::constant(c) + AffineExpr::term(VarId(0), a) + AffineExpr::term(VarId(1), b);
                    let mut acc = QuboAccumulator::new(2);
                    acc.add_squared(&e);
                    for bits in 0..4u32 {
                        let x = [bits & 1 == 1, bits & 2 == 2];
                        let v = e.eval(&x);
                        assert_eq!(acc.energy(&x), v * v);
                    }
                }
            }
        }
    }

    #[test]
    fn bilinear_single_product() {
        let mut acc = QuboAccumulator::new(2);
        acc.add_bilinear(&x0(), &x1(), -2);
        assert_eq!(acc.coefficient(VarId(0), VarId(1)), -2);
        assert_eq!(acc.num_entries(), 1);
        assert_eq!(acc.offset(), 0);
    }

    #[test]
    fn bilinear_expands_products() {
        let mut acc = QuboAccumulator::new(3);
        let e2 = x1() * 2 + AffineExpr::var(VarId(2));
        acc.add_bilinear(&(x0() * 2), &e2, -2);
        assert_eq!(acc.coefficient(VarId(0), VarId(1)), -8);
        assert_eq!(acc.coefficient(VarId(0), VarId(2)), -4);
        assert_eq!(acc.num_entries(), 2);
    }

    #[test]
    fn bilinear_folds_squares_onto_diagonal() {
        let mut acc = QuboAccumulator::new(1);
        acc.add_bilinear(&x0(), &x0(), 3);
        assert_eq!(acc.coefficient(VarId(0), VarId(0)), 3);
        assert_eq!(acc.num_entries(), 1);
    }

    #[test]
    fn bilinear_is_order_independent() {
        let e1 = AffineExpr::constant(1) + x0() - x1() * 2;
        let e2 = AffineExpr::constant(-2) + x1() + AffineExpr::term(VarId(2), 3);
        let mut fwd = QuboAccumulator::new(3);
        fwd.add_bilinear(&e1, &e2, 5);
        let mut rev = QuboAccumulator::new(3);
        rev.add_bilinear(&e2, &e1, 5);
        assert_eq!(fwd, rev);
        for bits in 0..8u32 {
            let x = [bits & 1 == 1, bits & 2 == 2, bits & 4 == 4];
            assert_eq!(fwd.energy(&x), 5 * e1.eval(&x) * e2.eval(&x));
        }
    }

    #[test]
    fn entry_key_is_normalized() {
        let mut acc = QuboAccumulator::new(4);
        acc.add_entry(VarId(3), VarId(1), 50);
        assert_eq!(acc.coefficient(VarId(1), VarId(3)), 50);
        assert_eq!(acc.entries().collect::<Vec<_>>(), vec![(1, 3, 50)]);
    }

    #[test]
    fn entry_diagonal_and_accumulation() {
        let mut acc = QuboAccumulator::new(3);
        acc.add_entry(VarId(2), VarId(2), -4);
        assert_eq!(acc.coefficient(VarId(2), VarId(2)), -4);
        acc.add_entry(VarId(0), VarId(1), 2);
        acc.add_entry(VarId(1), VarId(0), 3);
        assert_eq!(acc.coefficient(VarId(0), VarId(1)), 5);
    }

    #[test]
    fn entry_cancellation_removes_key() {
        let mut acc = QuboAccumulator::new(2);
        acc.add_entry(VarId(0), VarId(1), 7);
        acc.add_entry(VarId(1), VarId(0), -7);
        assert_eq!(acc.num_entries(), 0);
        assert_eq!(acc, QuboAccumulator::new(2));
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn entry_rejects_out_of_range_variable() {
        let mut acc = QuboAccumulator::new(2);
        acc.add_entry(VarId(0), VarId(2), 1);
    }

    #[test]
    fn energy_of_empty_matrix_is_zero() {
        let acc = QuboAccumulator::new(3);
        assert_eq!(acc.energy(&[true, false, true]), 0);
    }

    #[test]
    fn energy_square_difference_pattern() {
        // (x0 - x1)^2 as raw entries: both diagonal 1, cross -2
        let mut acc = QuboAccumulator::new(2);
        acc.add_entry(VarId(0), VarId(0), 1);
        acc.add_entry(VarId(0), VarId(1), -2);
        acc.add_entry(VarId(1), VarId(1), 1);
        assert_eq!(acc.energy(&[true, true]), 0);
        assert_eq!(acc.energy(&[true, false]), 1);
        assert_eq!(acc.energy(&[false, true]), 1);
    }

    #[test]
    fn energy_matches_dense_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut acc = QuboAccumulator::new(10);
        for _ in 0..60 {
            let i = VarId(rng.gen_range(0..10));
            let j = VarId(rng.gen_range(0..10));
            acc.add_entry(i, j, rng.gen_range(-9..=9));
        }
        acc.add_offset(rng.gen_range(-20..=20));
        let mut dense = [[0i64; 10]; 10];
        for (i, j, c) in acc.entries() {
            dense[i as usize][j as usize] = c;
        }
        for _ in 0..100 {
            let x: Vec<bool> = (0..10).map(|_| rng.gen()).collect();
            let mut direct = acc.offset();
            for i in 0..10 {
                for j in i..10 {
                    if x[i] && x[j] {
                        direct += dense[i][j];
                    }
                }
            }
            assert_eq!(acc.energy(&x), direct);
        }
    }

    #[test]
    #[should_panic(expected = "assignment length")]
    fn energy_rejects_wrong_length() {
        QuboAccumulator::new(3).energy(&[true, false]);
    }

    #[test]
    fn grow_preserves_entries() {
        let mut acc = QuboAccumulator::new(1);
        acc.add_entry(VarId(0), VarId(0), 5);
        acc.grow_to(3);
        assert_eq!(acc.n(), 3);
        assert_eq!(acc.coefficient(VarId(0), VarId(0)), 5);
        assert_eq!(acc.energy(&[true, false, false]), 5);
    }

    #[test]
    fn affine_arithmetic_merges_terms() {
        let e = x0() + x0() - x1() * 2 + 3;
        assert_eq!(e.terms(), &[(VarId(0), 2), (VarId(1), -2)]);
        assert_eq!(e.constant_part(), 3);
        assert_eq!(e.eval(&[true, true]), 3);
        let cancelled = e.clone() - x0() * 2;
        assert_eq!(cancelled.terms(), &[(VarId(1), -2)]);
        assert_eq!((e * 0), AffineExpr::zero());
    }

    #[test]
    fn max_abs_coefficient_scans_entries() {
        let mut acc = QuboAccumulator::new(2);
        assert_eq!(acc.max_abs_coefficient(), 0);
        acc.add_entry(VarId(0), VarId(1), -11);
        acc.add_entry(VarId(0), VarId(0), 4);
        assert_eq!(acc.max_abs_coefficient(), 11);
    }

    #[test]
    fn registry_tracks_problem_prefix() {
        let mut reg = VariableRegistry::new();
        let a = reg.push(Label::Problem("x1".into()));
        let b = reg.push(Label::Problem("x2".into()));
        let c = reg.push(Label::ClauseAncilla { clause: 0, level: 0, bit: 0 });
        assert_eq!((a, b, c), (VarId(0), VarId(1), VarId(2)));
        assert_eq!(reg.problem_count(), 2);
        assert_eq!(reg.len(), 3);
        assert_eq!(reg.label(VarId(1)), &Label::Problem("x2".into()));
    }

    #[test]
    #[should_panic(expected = "must precede")]
    fn registry_rejects_problem_after_ancilla() {
        let mut reg = VariableRegistry::new();
        reg.push(Label::EdgeBit { tail: 0, head: 1, bit: 0 });
        reg.push(Label::Problem("late".into()));
    }

    #[test]
    fn label_tokens_round_trip() {
        let labels = [
            Label::Problem("x17".into()),
            Label::ClauseAncilla { clause: 3, level: 1, bit: 2 },
            Label::EdgeBit { tail: 4, head: 0, bit: 3 },
            Label::Position { vertex: 9, slot: 0 },
        ];
        for label in labels {
            assert_eq!(Label::parse_token(&label.to_token()).unwrap(), label);
        }
        for bad in ["", "q:1", "a:1:2", "e:1:2:3:4", "s:x:1", "p:"] {
            assert!(Label::parse_token(bad).is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn ceil_log2_values() {
        let expected = [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4), (11, 4)];
        for (m, h) in expected {
            assert_eq!(ceil_log2(m), h, "ceil_log2({m})");
        }
    }
}
