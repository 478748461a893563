//! Certification of decomposition and scheme axioms, strongly regular graph
//! parameters, and the intersection-number tensor, with reconciliation
//! against the closed-form products.
//!
//! Check failures are data, not errors: they land in a
//! [`VerificationReport`] with a witness naming the first failing entry.
//! Errors are reserved for malformed input and for closure failures that
//! would contradict the construction itself.

use rayon::prelude::*;
use serde::Serialize;

use crate::construct::{class_valency, ClassLabel, Scheme};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::matrix::{IntMatrix, PackedMatrix};

/// Outcome of one named check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Ordered list of check outcomes; any failing entry carries a witness.
#[derive(Clone, Debug, Default, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new() -> VerificationReport {
        VerificationReport::default()
    }

    pub fn pass(&mut self, check: impl Into<String>) {
        self.checks.push(CheckResult {
            check: check.into(),
            status: Status::Pass,
            witness: None,
        });
    }

    pub fn fail(&mut self, check: impl Into<String>, witness: impl Into<String>) {
        self.checks.push(CheckResult {
            check: check.into(),
            status: Status::Fail,
            witness: Some(witness.into()),
        });
    }

    pub fn record(&mut self, check: impl Into<String>, ok: bool, witness: impl Into<String>) {
        if ok {
            self.pass(check);
        } else {
            self.fail(check, witness);
        }
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }
}

/// Checks the four commutative-decomposition conditions: the first matrix is
/// the identity, the matrices sum to the all-ones matrix, each is symmetric,
/// and every pair commutes.
pub fn verify_commutative_decomposition(mats: &[IntMatrix]) -> Result<VerificationReport> {
    if mats.is_empty() {
        return Err(Error::InvalidInput("empty matrix list".into()));
    }
    let v = mats[0].rows();
    if mats.iter().any(|m| m.rows() != v || m.cols() != v) {
        return Err(Error::DimensionMismatch(
            "decomposition matrices must be square of equal order".into(),
        ));
    }
    let mut report = VerificationReport::new();

    report.record(
        "decomposition_identity_first",
        mats[0] == IntMatrix::identity(v),
        "matrix 0 is not the identity",
    );

    let mut sum = IntMatrix::zeros(v, v);
    for m in mats {
        sum = sum.checked_add(m)?;
    }
    match sum.first_diff(&IntMatrix::ones(v, v)) {
        None => report.pass("decomposition_sum_is_j"),
        Some((r, c)) => report.fail(
            "decomposition_sum_is_j",
            format!("sum at ({r},{c}) = {} != 1", sum.at(r, c)),
        ),
    }

    let mut sym_witness = None;
    for (i, m) in mats.iter().enumerate() {
        if !m.is_symmetric() {
            sym_witness = Some(format!("matrix {i} is not symmetric"));
            break;
        }
    }
    report.record(
        "decomposition_symmetry",
        sym_witness.is_none(),
        sym_witness.unwrap_or_default(),
    );

    let pairs: Vec<(usize, usize)> = (0..mats.len())
        .flat_map(|i| (i + 1..mats.len()).map(move |j| (i, j)))
        .collect();
    let violations: Vec<String> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            let ab = mats[i].matmul(&mats[j]).ok()?;
            let ba = mats[j].matmul(&mats[i]).ok()?;
            ab.first_diff(&ba)
                .map(|(r, c)| format!("matrices {i},{j} disagree at ({r},{c})"))
        })
        .collect();
    report.record(
        "decomposition_commutation",
        violations.is_empty(),
        violations.first().cloned().unwrap_or_default(),
    );

    Ok(report)
}

/// Checks that A is the adjacency matrix of a strongly regular graph with
/// the given parameters: A^2 = k I + lambda A + mu (J - I - A) exactly, with
/// constant row sums k. Malformed input (not square, not 0/1, nonzero
/// diagonal, asymmetric) is an error rather than a failing check.
pub fn verify_srg(a: &IntMatrix, v: usize, k: i64, lambda: i64, mu: i64) -> Result<bool> {
    if !a.is_square() || a.rows() != v {
        return Err(Error::InvalidInput(format!(
            "adjacency matrix must be {v}x{v}, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_zero_one() {
        return Err(Error::InvalidInput("adjacency matrix must be 0/1".into()));
    }
    if !a.is_symmetric() {
        return Err(Error::InvalidInput(
            "adjacency matrix must be symmetric".into(),
        ));
    }
    if (0..v).any(|i| a.at(i, i) != 0) {
        return Err(Error::InvalidInput(
            "adjacency matrix must have zero diagonal".into(),
        ));
    }
    if a.row_sums()?.iter().any(|&s| s != k) {
        return Ok(false);
    }
    let sq = a.matmul(a)?;
    for r in 0..v {
        for c in 0..v {
            let diag = i64::from(r == c);
            let adj = a.at(r, c);
            let expected = k * diag + lambda * adj + mu * (1 - diag - adj);
            if sq.at(r, c) != expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The intersection numbers p[i][j][k] of the scheme, indexed by class
/// position (identity first).
#[derive(Clone, Debug, Serialize)]
pub struct IntersectionTensor {
    pub labels: Vec<ClassLabel>,
    pub valencies: Vec<i64>,
    pub p: Vec<Vec<Vec<i64>>>,
}

impl IntersectionTensor {
    pub fn classes(&self) -> usize {
        self.labels.len()
    }
}

/// Reads the class-basis coefficients of a product matrix off one
/// representative position per class, then re-verifies the expansion
/// entrywise against the class-membership map. Returns the coefficient
/// vector, or the first position where the product leaves the class span.
/// The disjoint class supports make the readout well-defined and the
/// re-verification doubles as the closure proof.
pub fn read_off_class_span(
    prod: &IntMatrix,
    class_of: &[u16],
    representatives: &[(usize, usize)],
) -> std::result::Result<Vec<i64>, (usize, usize)> {
    let v = prod.rows();
    let coeffs: Vec<i64> = representatives
        .iter()
        .map(|&(r, c)| prod.at(r, c))
        .collect();
    for r in 0..v {
        for c in 0..v {
            let k = class_of[r * v + c] as usize;
            if prod.at(r, c) != coeffs[k] {
                return Err((r, c));
            }
        }
    }
    Ok(coeffs)
}

/// Computes the full intersection tensor. For each pair the product
/// A_i A_j is formed exactly and expanded via [`read_off_class_span`].
/// A closure failure is fatal: it would contradict the scheme property.
pub fn intersection_numbers(s: &Scheme) -> Result<IntersectionTensor> {
    let nc = s.labels().len();
    let packed: Vec<PackedMatrix> = s
        .classes()
        .iter()
        .map(PackedMatrix::from_zero_one)
        .collect::<Result<_>>()?;

    let pairs: Vec<(usize, usize)> = (0..nc).flat_map(|i| (i..nc).map(move |j| (i, j))).collect();
    let results: Vec<(usize, usize, Vec<i64>)> = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<(usize, usize, Vec<i64>)> {
            let prod = packed[i].count_product(&packed[j])?;
            read_off_class_span(&prod, s.class_map(), s.representatives())
                .map(|coeffs| (i, j, coeffs))
                .map_err(|(r, c)| {
                    Error::invariant(
                        "intersection_closure",
                        format!(
                            "product {} * {} leaves the class span at ({r},{c})",
                            s.labels()[i],
                            s.labels()[j],
                        ),
                    )
                })
        })
        .collect::<Result<_>>()?;

    let mut p = vec![vec![vec![0i64; nc]; nc]; nc];
    for (i, j, coeffs) in results {
        p[i][j] = coeffs.clone();
        p[j][i] = coeffs;
    }
    Ok(IntersectionTensor {
        labels: s.labels().to_vec(),
        valencies: s.valencies().to_vec(),
        p,
    })
}

/// The closed-form intersection tensor, expanded into the class basis.
///
/// The product table in label form, with delta = alpha + beta:
///   (alpha,0)(beta,0) = A_{delta,0}
///   (alpha,0)(beta,1) = A_{beta,1}        (alpha,0)(beta,2) = A_{beta,2}
///   (alpha,0)(beta,3) = A_{delta,3}
///   (alpha,1)(beta,1) = (alpha,2)(beta,2) = q A_{delta,1}
///   (alpha,1)(beta,2) = q A_{delta,2}
///   (alpha,1)(beta,3) = (alpha,2)(beta,3) = sum_gamma A_{gamma,3}
///   (alpha,3)(beta,3) = q^2 A_{delta,0}
///                       + sum_gamma ( q(-A_{gamma,0} + A_{gamma,1} + A_{gamma,2})
///                                     + (q-2) A_{gamma,3} )
/// The symbol A_{0,1} appearing for delta = 0 is not a class; it aliases
/// sum_gamma A_{gamma,0}, and expanding it cancels the negative kind-0
/// coefficients in the last line, leaving a nonnegative tensor.
pub fn expected_intersection_numbers(spec: &FieldSpec) -> IntersectionTensor {
    let labels = crate::construct::scheme_labels(spec);
    let valencies: Vec<i64> = labels.iter().map(|&l| class_valency(spec, l)).collect();
    let q = spec.q() as i64;
    let nc = labels.len();
    let idx = |alpha: u32, kind: u8| -> usize {
        labels
            .iter()
            .position(|l| l.alpha == alpha && l.kind == kind)
            .expect("label exists")
    };

    // Adds coeff * A_{alpha,kind}, expanding the alias A_{0,1}.
    let add = |row: &mut [i64], alpha: u32, kind: u8, coeff: i64| {
        if kind == 1 && alpha == 0 {
            for l in &labels {
                if l.kind == 0 {
                    row[idx(l.alpha, 0)] += coeff;
                }
            }
        } else {
            row[idx(alpha, kind)] += coeff;
        }
    };

    let mut p = vec![vec![vec![0i64; nc]; nc]; nc];
    for (i, li) in labels.iter().enumerate() {
        for (j, lj) in labels.iter().enumerate() {
            let mut row = vec![0i64; nc];
            let delta = li.alpha ^ lj.alpha;
            match (li.kind.min(lj.kind), li.kind.max(lj.kind)) {
                (0, 0) => add(&mut row, delta, 0, 1),
                (0, 1) => {
                    let b = if li.kind == 1 { li.alpha } else { lj.alpha };
                    add(&mut row, b, 1, 1);
                }
                (0, 2) => {
                    let b = if li.kind == 2 { li.alpha } else { lj.alpha };
                    add(&mut row, b, 2, 1);
                }
                (0, 3) => add(&mut row, delta, 3, 1),
                (1, 1) | (2, 2) => add(&mut row, delta, 1, q),
                (1, 2) => add(&mut row, delta, 2, q),
                (1, 3) | (2, 3) => {
                    for g in 0..spec.q() as u32 {
                        add(&mut row, g, 3, 1);
                    }
                }
                (3, 3) => {
                    add(&mut row, delta, 0, q * q);
                    for g in 0..spec.q() as u32 {
                        add(&mut row, g, 0, -q);
                        add(&mut row, g, 1, q);
                        add(&mut row, g, 2, q);
                        add(&mut row, g, 3, q - 2);
                    }
                }
                _ => unreachable!(),
            }
            p[i][j] = row;
        }
    }
    IntersectionTensor {
        labels,
        valencies,
        p,
    }
}

/// Compares a computed tensor against the closed forms and the structural
/// tensor identities: nonnegativity, symmetry in (i, j), the valency
/// consistency sum_k p_{ij}^k k_k = k_i k_j, and p_{ij}^0 = delta_ij k_i.
pub fn check_intersection_closed_forms(s: &Scheme, t: &IntersectionTensor) -> VerificationReport {
    let mut report = VerificationReport::new();
    let nc = t.classes();
    let expected = expected_intersection_numbers(s.spec());

    let mut closed_form_witness = None;
    'outer: for i in 0..nc {
        for j in 0..nc {
            for k in 0..nc {
                if t.p[i][j][k] != expected.p[i][j][k] {
                    closed_form_witness = Some(format!(
                        "p[{}][{}]^{} = {} but closed form gives {}",
                        t.labels[i], t.labels[j], t.labels[k], t.p[i][j][k], expected.p[i][j][k]
                    ));
                    break 'outer;
                }
            }
        }
    }
    report.record(
        "intersection_matches_closed_forms",
        closed_form_witness.is_none(),
        closed_form_witness.unwrap_or_default(),
    );

    let mut nonneg = None;
    'nn: for i in 0..nc {
        for j in 0..nc {
            for k in 0..nc {
                if t.p[i][j][k] < 0 {
                    nonneg = Some(format!(
                        "p[{}][{}]^{} = {} < 0",
                        t.labels[i], t.labels[j], t.labels[k], t.p[i][j][k]
                    ));
                    break 'nn;
                }
            }
        }
    }
    report.record(
        "intersection_nonnegative",
        nonneg.is_none(),
        nonneg.unwrap_or_default(),
    );

    let mut sym = None;
    'sym: for i in 0..nc {
        for j in i + 1..nc {
            if t.p[i][j] != t.p[j][i] {
                sym = Some(format!(
                    "p[{}][{}] != transposed pair",
                    t.labels[i], t.labels[j]
                ));
                break 'sym;
            }
        }
    }
    report.record(
        "intersection_symmetric",
        sym.is_none(),
        sym.unwrap_or_default(),
    );

    let mut consistency = None;
    'cons: for i in 0..nc {
        for j in 0..nc {
            let total: i64 = (0..nc).map(|k| t.p[i][j][k] * t.valencies[k]).sum();
            if total != t.valencies[i] * t.valencies[j] {
                consistency = Some(format!(
                    "sum_k p[{}][{}]^k k_k = {total} != {}",
                    t.labels[i],
                    t.labels[j],
                    t.valencies[i] * t.valencies[j]
                ));
                break 'cons;
            }
        }
    }
    report.record(
        "intersection_valency_consistency",
        consistency.is_none(),
        consistency.unwrap_or_default(),
    );

    let mut identity_col = None;
    'id: for i in 0..nc {
        for j in 0..nc {
            let expected0 = if i == j { t.valencies[i] } else { 0 };
            if t.p[i][j][0] != expected0 {
                identity_col = Some(format!(
                    "p[{}][{}]^identity = {} != {expected0}",
                    t.labels[i], t.labels[j], t.p[i][j][0]
                ));
                break 'id;
            }
        }
    }
    report.record(
        "intersection_identity_column",
        identity_col.is_none(),
        identity_col.unwrap_or_default(),
    );

    report
}
