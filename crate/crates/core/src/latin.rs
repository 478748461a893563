//! Symmetric Latin squares of order q+2 with constant diagonal, built from a
//! 1-factorization of the complete graph, and the symmetric permutation
//! matrices extracted from them.
//!
//! The symbol set is the q field elements plus two distinguished symbols x
//! and y. The diagonal carries x everywhere; the off-diagonal cell (a, a')
//! carries the label of the round of the 1-factorization whose matching
//! contains the edge {a, a'}. Rounds 0..q-1 are labeled by field elements in
//! enumeration order and the last round is labeled y. A relabeling hook
//! permutes the q+1 round labels for robustness testing; every downstream
//! identity is label-invariant.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::matrix::IntMatrix;

/// Symbol of the Latin square: a field element, or one of the two
/// distinguished symbols.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Symbol {
    Field(u32),
    X,
    Y,
}

impl Symbol {
    /// Stable index: field elements first in enumeration order, then x, then y.
    pub fn index(self, q: usize) -> usize {
        match self {
            Symbol::Field(a) => a as usize,
            Symbol::X => q,
            Symbol::Y => q + 1,
        }
    }

    pub fn from_index(i: usize, q: usize) -> Symbol {
        if i < q {
            Symbol::Field(i as u32)
        } else if i == q {
            Symbol::X
        } else {
            Symbol::Y
        }
    }

    pub fn token(self) -> String {
        match self {
            Symbol::Field(a) => a.to_string(),
            Symbol::X => "x".to_string(),
            Symbol::Y => "y".to_string(),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.token())
    }
}

/// One-factorization of K_n by the circle method: vertex n-1 is fixed as
/// the hub; in round r it pairs with r, and (r+i) pairs with (r-i) modulo
/// n-1 for i = 1..(n-2)/2. Returns n-1 perfect matchings covering every
/// edge exactly once.
pub fn one_factorization(n: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "one-factorization requires even n >= 2, got {n}"
        )));
    }
    let hub = n - 1;
    let modulus = n - 1;
    let mut rounds = Vec::with_capacity(n - 1);
    for r in 0..n - 1 {
        let mut matching = Vec::with_capacity(n / 2);
        matching.push((hub, r));
        for i in 1..=(n - 2) / 2 {
            let u = (r + i) % modulus;
            let v = (r + modulus - i % modulus) % modulus;
            matching.push((u, v));
        }
        rounds.push(matching);
    }
    Ok(rounds)
}

/// Symmetric Latin square of order q+2 over the symbol set with constant
/// diagonal x.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LatinSquare {
    q: usize,
    entries: Vec<Symbol>,
}

impl LatinSquare {
    pub fn order(&self) -> usize {
        self.q + 2
    }

    pub fn field_order(&self) -> usize {
        self.q
    }

    pub fn at(&self, r: usize, c: usize) -> Symbol {
        self.entries[r * self.order() + c]
    }

    /// Checks the three defining invariants: each row and column is a
    /// permutation of the symbol set, the square is symmetric, and the
    /// diagonal is constantly x.
    pub fn validate(&self) -> Result<()> {
        let n = self.order();
        for r in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for c in 0..n {
                let ri = self.at(r, c).index(self.q);
                let ci = self.at(c, r).index(self.q);
                if row_seen[ri] {
                    return Err(Error::invariant(
                        "latin_rows",
                        format!("row {r} repeats symbol {}", self.at(r, c)),
                    ));
                }
                if col_seen[ci] {
                    return Err(Error::invariant(
                        "latin_columns",
                        format!("column {r} repeats symbol {}", self.at(c, r)),
                    ));
                }
                row_seen[ri] = true;
                col_seen[ci] = true;
                if self.at(r, c) != self.at(c, r) {
                    return Err(Error::invariant(
                        "latin_symmetry",
                        format!("L({r},{c}) != L({c},{r})"),
                    ));
                }
            }
            if self.at(r, r) != Symbol::X {
                return Err(Error::invariant(
                    "latin_diagonal",
                    format!("L({r},{r}) = {} != x", self.at(r, r)),
                ));
            }
        }
        Ok(())
    }

    /// Text export: one line per row, symbols separated by single spaces,
    /// field elements as decimal indices and the distinguished symbols as
    /// the letters x and y.
    pub fn to_text(&self) -> String {
        let n = self.order();
        let mut s = String::new();
        for r in 0..n {
            let row: Vec<String> = (0..n).map(|c| self.at(r, c).token()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

/// Builds the Latin square with the default round labeling.
pub fn build_latin(spec: &FieldSpec) -> Result<LatinSquare> {
    let q = spec.q();
    let default: Vec<Symbol> = (0..q as u32)
        .map(Symbol::Field)
        .chain(std::iter::once(Symbol::Y))
        .collect();
    build_latin_relabeled(spec, &default)
}

/// Builds the Latin square with an explicit assignment of the q+1 round
/// labels; `labels[r]` is the symbol written on every edge of round r and
/// must be a permutation of the field elements together with y.
pub fn build_latin_relabeled(spec: &FieldSpec, labels: &[Symbol]) -> Result<LatinSquare> {
    let q = spec.q();
    let n = q + 2;
    if labels.len() != q + 1 {
        return Err(Error::InvalidInput(format!(
            "expected {} round labels, got {}",
            q + 1,
            labels.len()
        )));
    }
    let mut seen = vec![false; q + 2];
    for &l in labels {
        let i = l.index(q);
        if l == Symbol::X || seen[i] {
            return Err(Error::InvalidInput(
                "round labels must be a permutation of the field elements and y".into(),
            ));
        }
        seen[i] = true;
    }

    let rounds = one_factorization(n)?;
    let mut entries = vec![Symbol::X; n * n];
    for (r, matching) in rounds.iter().enumerate() {
        for &(u, v) in matching {
            entries[u * n + v] = labels[r];
            entries[v * n + u] = labels[r];
        }
    }
    let square = LatinSquare { q, entries };
    square.validate()?;
    Ok(square)
}

/// The symmetric permutation matrices P_a with L = sum over a of a * P_a.
/// P_x is the identity; for a != x, P_a is a perfect matching.
#[derive(Clone, Debug)]
pub struct FactorSet {
    q: usize,
    mats: Vec<IntMatrix>,
}

impl FactorSet {
    pub fn field_order(&self) -> usize {
        self.q
    }

    pub fn order(&self) -> usize {
        self.q + 2
    }

    pub fn p(&self, s: Symbol) -> &IntMatrix {
        &self.mats[s.index(self.q)]
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.q + 2).map(move |i| Symbol::from_index(i, self.q))
    }
}

/// Extracts the factor matrices from a Latin square and verifies their
/// invariants: each P_a is a symmetric permutation matrix, P_x = I, the
/// others have zero diagonal, and they sum to the all-ones matrix.
pub fn factor_set(l: &LatinSquare) -> Result<FactorSet> {
    let q = l.field_order();
    let n = l.order();
    let mut mats = vec![IntMatrix::zeros(n, n); n];
    for r in 0..n {
        for c in 0..n {
            let s = l.at(r, c);
            mats[s.index(q)].set(r, c, 1);
        }
    }
    let mut total = IntMatrix::zeros(n, n);
    for (i, p) in mats.iter().enumerate() {
        let sym = Symbol::from_index(i, q);
        if !p.is_symmetric() {
            return Err(Error::invariant(
                "factor_symmetric",
                format!("P_{sym} is not symmetric"),
            ));
        }
        if p.row_sums()?.iter().any(|&s| s != 1) {
            return Err(Error::invariant(
                "factor_permutation",
                format!("P_{sym} is not a permutation matrix"),
            ));
        }
        match sym {
            Symbol::X => {
                if *p != IntMatrix::identity(n) {
                    return Err(Error::invariant("factor_px", "P_x != I"));
                }
            }
            _ => {
                if (0..n).any(|i| p.at(i, i) != 0) {
                    return Err(Error::invariant(
                        "factor_diagonal",
                        format!("P_{sym} has a diagonal entry"),
                    ));
                }
            }
        }
        total = total.checked_add(p)?;
    }
    if total != IntMatrix::ones(n, n) {
        return Err(Error::invariant("factor_sum", "sum of P_a != J"));
    }
    Ok(FactorSet { q, mats })
}
