//! The exact spectral layer: character-weighted class sums, the primitive
//! idempotents, both eigenmatrices, multiplicities, duality, and the Krein
//! tensor, all in rational arithmetic with zero tolerance.
//!
//! No numerical eigensolver appears anywhere; the idempotents have explicit
//! closed forms as rational combinations of the F matrices, so idempotency,
//! orthogonality, completeness and every table entry are checked as exact
//! identities.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::construct::{ClassLabel, Scheme};
use crate::error::{Error, Result};
use crate::field::{character, FieldSpec};
use crate::matrix::{product_trace, IntMatrix, Ratio, ScaledAccumulator, ScaledMatrix};
use crate::verify::VerificationReport;

/// Label of a primitive idempotent. Serializes as its display string,
/// e.g. "E_0" or "E_3_1".
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum IdemLabel {
    E0,
    E1,
    E { alpha: u32, kind: u8 },
}

impl fmt::Display for IdemLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdemLabel::E0 => write!(f, "E_0"),
            IdemLabel::E1 => write!(f, "E_1"),
            IdemLabel::E { alpha, kind } => write!(f, "E_{}_{}", alpha, kind),
        }
    }
}

impl Serialize for IdemLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The 4q - 1 primitive idempotent labels in export order: E_0, E_1, the
/// kind-1 family over nonzero alpha, the kind-2 family over all alpha, and
/// the kind-3 and kind-4 families over nonzero alpha.
pub fn idempotent_labels(spec: &FieldSpec) -> Vec<IdemLabel> {
    let q = spec.q() as u32;
    let mut labels = vec![IdemLabel::E0, IdemLabel::E1];
    labels.extend((1..q).map(|alpha| IdemLabel::E { alpha, kind: 1 }));
    labels.extend((0..q).map(|alpha| IdemLabel::E { alpha, kind: 2 }));
    labels.extend((1..q).map(|alpha| IdemLabel::E { alpha, kind: 3 }));
    labels.extend((1..q).map(|alpha| IdemLabel::E { alpha, kind: 4 }));
    labels
}

/// The character-weighted class sum F_{alpha,i} = sum over gamma of
/// chi_alpha(gamma) A_{gamma,i}. For i = 1 the gamma = 0 term is the alias
/// matrix (the sum of the kind-0 classes), which is not itself a class.
pub fn f_matrix(s: &Scheme, alpha: u32, kind: u8) -> Result<IntMatrix> {
    let spec = s.spec();
    if kind > 3 {
        return Err(Error::InvalidInput(format!("F kind {kind} out of range")));
    }
    let alpha_el = spec.element(alpha)?;
    let mut out = IntMatrix::zeros(s.v(), s.v());
    for gamma in spec.elements() {
        let chi = character(alpha_el, gamma);
        let term = if kind == 1 && gamma.is_zero() {
            s.alias_a01()?.checked_scale(chi)?
        } else {
            s.class_by_label(ClassLabel::new(gamma.value(), kind))
                .ok_or_else(|| Error::InvalidInput("missing class".into()))?
                .checked_scale(chi)?
        };
        out = out.checked_add(&term)?;
    }
    Ok(out)
}

/// The matrix E_{alpha,j} as defined by its F-combination, for any alpha
/// including the non-primitive alpha = 0 cases of kinds 1, 3, 4.
pub fn defined_idempotent(s: &Scheme, alpha: u32, kind: u8) -> Result<ScaledMatrix> {
    let q = s.spec().q() as i64;
    let two_q2 = 2 * q * q;
    match kind {
        1 => ScaledMatrix::new(
            f_matrix(s, alpha, 1)?.checked_add(&f_matrix(s, alpha, 2)?)?,
            two_q2,
        ),
        2 => ScaledMatrix::new(
            f_matrix(s, alpha, 1)?.checked_sub(&f_matrix(s, alpha, 2)?)?,
            two_q2,
        ),
        3 => ScaledMatrix::new(
            f_matrix(s, alpha, 0)?
                .checked_scale(q)?
                .checked_add(&f_matrix(s, alpha, 3)?)?,
            two_q2,
        ),
        4 => ScaledMatrix::new(
            f_matrix(s, alpha, 0)?
                .checked_scale(q)?
                .checked_sub(&f_matrix(s, alpha, 3)?)?,
            two_q2,
        ),
        _ => Err(Error::InvalidInput(format!(
            "idempotent kind {kind} out of range"
        ))),
    }
}

/// Idempotents, multiplicities and (once computed) both eigenmatrices.
pub struct SpectralData {
    pub labels: Vec<IdemLabel>,
    pub idempotents: Vec<ScaledMatrix>,
    pub multiplicities: Vec<i64>,
    pub p_matrix: Option<IntMatrix>,
    pub q_matrix: Option<IntMatrix>,
}

impl SpectralData {
    pub fn index_of(&self, label: IdemLabel) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }
}

/// Coefficients of E_{0,j} over the primitive idempotents. E_{0,2} is
/// itself primitive; the others decompose as
///   E_{0,1} = E_0 + E_1,
///   E_{0,3} = (q+1)/2 E_0 - 1/2 E_1 + 1/2 (sum E_{beta,1} + sum E_{alpha,2}),
///   E_{0,4} = (1-q)/2 E_0 + 3/2 E_1 + 1/2 (sum E_{beta,1} + sum E_{alpha,2}).
/// These follow from F_{0,0} = q (E_0 + E_1 + sum E_{beta,1} + sum E_{alpha,2})
/// and F_{0,3} = q^3 E_0 - 2 q^2 E_1, and are verified as exact matrix
/// identities by [`idempotents`].
fn zero_label_expansion(spec: &FieldSpec, alpha: u32, kind: u8) -> Vec<(IdemLabel, Ratio)> {
    let q = spec.q() as i64;
    if alpha != 0 || kind == 2 {
        return vec![(IdemLabel::E { alpha, kind }, Ratio::integer(1))];
    }
    let half = |n: i64| Ratio::new(n, 2).expect("static denominator");
    match kind {
        1 => vec![
            (IdemLabel::E0, Ratio::integer(1)),
            (IdemLabel::E1, Ratio::integer(1)),
        ],
        3 | 4 => {
            let (c0, c1) = if kind == 3 {
                (half(q + 1), half(-1))
            } else {
                (half(1 - q), half(3))
            };
            let mut terms = vec![(IdemLabel::E0, c0), (IdemLabel::E1, c1)];
            for b in 1..spec.q() as u32 {
                terms.push((IdemLabel::E { alpha: b, kind: 1 }, half(1)));
            }
            for a in 0..spec.q() as u32 {
                terms.push((IdemLabel::E { alpha: a, kind: 2 }, half(1)));
            }
            terms
        }
        _ => unreachable!("kind 0 has no zero-label expansion"),
    }
}

/// Builds the 4q - 1 primitive idempotents and verifies, exactly: E_0 is
/// (1/v) J, every matrix is idempotent, distinct pairs multiply to zero,
/// the sum is the identity, the multiplicities (traces) are positive
/// integers summing to v, every shared denominator divides 2 q^2 (q+2),
/// and the E_{0,1}, E_{0,3}, E_{0,4} expansion identities hold.
pub fn idempotents(s: &Scheme) -> Result<SpectralData> {
    let spec = s.spec();
    let q = spec.q() as i64;
    let v = s.v() as i64;
    let labels = idempotent_labels(spec);

    let f01 = f_matrix(s, 0, 1)?;
    let f02 = f_matrix(s, 0, 2)?;
    let f03 = f_matrix(s, 0, 3)?;
    let e0 = ScaledMatrix::new(f01.checked_add(&f02)?.checked_add(&f03)?, v)?;
    let e1 = ScaledMatrix::new(
        f01.checked_add(&f02)?
            .checked_scale(q / 2)?
            .checked_sub(&f03)?,
        v,
    )?;

    let mut idems = Vec::with_capacity(labels.len());
    for &label in &labels {
        let e = match label {
            IdemLabel::E0 => e0.clone(),
            IdemLabel::E1 => e1.clone(),
            IdemLabel::E { alpha, kind } => defined_idempotent(s, alpha, kind)?,
        };
        idems.push(e);
    }

    let expected_e0 = ScaledMatrix::new(IntMatrix::ones(s.v(), s.v()), v)?;
    if idems[0] != expected_e0 {
        return Err(Error::invariant("idempotent_e0", "E_0 != (1/v) J"));
    }

    let max_den = 2 * q * q * (q + 2);
    for (label, e) in labels.iter().zip(&idems) {
        if max_den % e.den() != 0 {
            return Err(Error::invariant(
                "idempotent_denominator",
                format!("{label} has denominator {} not dividing {max_den}", e.den()),
            ));
        }
        if !e.is_symmetric() {
            return Err(Error::invariant(
                "idempotent_symmetric",
                format!("{label} is not symmetric"),
            ));
        }
    }

    // Idempotency and pairwise orthogonality.
    let pairs: Vec<(usize, usize)> = (0..idems.len())
        .flat_map(|i| (i..idems.len()).map(move |j| (i, j)))
        .collect();
    pairs
        .par_iter()
        .map(|&(i, j)| -> Result<()> {
            let prod = idems[i].matmul(&idems[j])?;
            if i == j {
                if prod != idems[i] {
                    return Err(Error::invariant(
                        "idempotency",
                        format!("{} squared differs from itself", labels[i]),
                    ));
                }
            } else if !prod.is_zero() {
                return Err(Error::invariant(
                    "idempotent_orthogonality",
                    format!("{} * {} != 0", labels[i], labels[j]),
                ));
            }
            Ok(())
        })
        .collect::<Result<()>>()?;

    // Completeness: the idempotents sum to the identity.
    let mut sum = ScaledAccumulator::new(s.v(), s.v());
    for e in &idems {
        sum.add_scaled(e, Ratio::integer(1))?;
    }
    let identity = ScaledMatrix::from_int(IntMatrix::identity(s.v()));
    if !sum.equals(&identity) {
        let (r, c) = sum.first_diff(&identity).unwrap_or((0, 0));
        return Err(Error::invariant(
            "idempotent_completeness",
            format!("sum of idempotents differs from I at ({r},{c})"),
        ));
    }

    // Expansion identities for the non-primitive zero labels.
    for kind in [1u8, 3, 4] {
        let defined = defined_idempotent(s, 0, kind)?;
        let mut acc = ScaledAccumulator::new(s.v(), s.v());
        for (label, coeff) in zero_label_expansion(spec, 0, kind) {
            let idx = labels.iter().position(|&l| l == label).expect("primitive");
            acc.add_scaled(&idems[idx], coeff)?;
        }
        if !acc.equals(&defined) {
            let (r, c) = acc.first_diff(&defined).unwrap_or((0, 0));
            return Err(Error::invariant(
                "idempotent_zero_expansion",
                format!("E_0_{kind} expansion differs at ({r},{c})"),
            ));
        }
    }

    // Multiplicities: positive integer traces summing to v.
    let mut multiplicities = Vec::with_capacity(idems.len());
    for (label, e) in labels.iter().zip(&idems) {
        let t = e.trace()?;
        let m = t.as_integer().ok_or_else(|| {
            Error::invariant(
                "multiplicity_integral",
                format!("trace of {label} is {t}, not an integer"),
            )
        })?;
        if m <= 0 {
            return Err(Error::invariant(
                "multiplicity_positive",
                format!("trace of {label} is {m}"),
            ));
        }
        multiplicities.push(m);
    }
    let total: i64 = multiplicities.iter().sum();
    if total != v {
        return Err(Error::invariant(
            "multiplicity_sum",
            format!("multiplicities sum to {total}, not {v}"),
        ));
    }

    Ok(SpectralData {
        labels,
        idempotents: idems,
        multiplicities,
        p_matrix: None,
        q_matrix: None,
    })
}

/// The first eigenmatrix from the closed-form tables: rows indexed by
/// idempotents, columns by classes.
pub fn expected_p(spec: &FieldSpec) -> IntMatrix {
    let q = spec.q() as i64;
    let ilabels = idempotent_labels(spec);
    let clabels = crate::construct::scheme_labels(spec);
    let chi = |b: u32, a: u32| {
        character(
            spec.element(b).expect("label in range"),
            spec.element(a).expect("label in range"),
        )
    };
    IntMatrix::from_fn(ilabels.len(), clabels.len(), |i, j| {
        let cl = clabels[j];
        match ilabels[i] {
            IdemLabel::E0 => match cl.kind {
                0 => 1,
                1 | 2 => q,
                _ => q * q,
            },
            IdemLabel::E1 => match cl.kind {
                0 => 1,
                1 | 2 => q,
                _ => -2 * q,
            },
            IdemLabel::E { alpha: b, kind: 1 } => match cl.kind {
                0 => 1,
                1 | 2 => q * chi(b, cl.alpha),
                _ => 0,
            },
            IdemLabel::E { alpha: a, kind: 2 } => match cl.kind {
                0 => 1,
                1 => q * chi(a, cl.alpha),
                2 => -q * chi(a, cl.alpha),
                _ => 0,
            },
            IdemLabel::E { alpha: b, kind: 3 } => match cl.kind {
                0 => chi(b, cl.alpha),
                3 => q * chi(b, cl.alpha),
                _ => 0,
            },
            IdemLabel::E { alpha: b, kind: 4 } => match cl.kind {
                0 => chi(b, cl.alpha),
                3 => -q * chi(b, cl.alpha),
                _ => 0,
            },
            IdemLabel::E { .. } => unreachable!(),
        }
    })
}

/// The second eigenmatrix from the closed-form tables: rows indexed by
/// classes, columns by idempotents. The column at E_j holds v times the
/// coefficient of each class in E_j; q even makes every entry an integer.
pub fn expected_q(spec: &FieldSpec) -> IntMatrix {
    let q = spec.q() as i64;
    let half_q = q / 2;
    let ilabels = idempotent_labels(spec);
    let clabels = crate::construct::scheme_labels(spec);
    let chi = |b: u32, a: u32| {
        character(
            spec.element(b).expect("label in range"),
            spec.element(a).expect("label in range"),
        )
    };
    IntMatrix::from_fn(clabels.len(), ilabels.len(), |i, j| {
        let cl = clabels[i];
        match ilabels[j] {
            IdemLabel::E0 => 1,
            IdemLabel::E1 => match cl.kind {
                0..=2 => half_q,
                _ => -1,
            },
            IdemLabel::E { alpha: b, kind: 1 } => match cl.kind {
                0 => half_q + 1,
                1 | 2 => (half_q + 1) * chi(b, cl.alpha),
                _ => 0,
            },
            IdemLabel::E { alpha: a, kind: 2 } => match cl.kind {
                0 => half_q + 1,
                1 => (half_q + 1) * chi(a, cl.alpha),
                2 => -(half_q + 1) * chi(a, cl.alpha),
                _ => 0,
            },
            IdemLabel::E { alpha: b, kind: 3 } => match cl.kind {
                0 => (half_q + 1) * q * chi(b, cl.alpha),
                3 => (half_q + 1) * chi(b, cl.alpha),
                _ => 0,
            },
            IdemLabel::E { alpha: b, kind: 4 } => match cl.kind {
                0 => (half_q + 1) * q * chi(b, cl.alpha),
                3 => -(half_q + 1) * chi(b, cl.alpha),
                _ => 0,
            },
            IdemLabel::E { .. } => unreachable!(),
        }
    })
}

/// Computes both eigenmatrices from the verified idempotents and compares
/// them entry-for-entry with the closed-form tables.
///
/// P entries come from traces: p_ij = trace(E_i A_j) / m_i, asserted
/// integral. Q entries come from reading v * E_j at one position of each
/// class support, asserted constant across the support. Any non-integrality,
/// non-constancy, or table mismatch is fatal.
pub fn eigenmatrices(s: &Scheme, sd: &mut SpectralData) -> Result<()> {
    let v = s.v();
    let ni = sd.labels.len();
    let nc = s.labels().len();
    if ni != nc {
        return Err(Error::invariant(
            "eigenmatrix_square",
            format!("{ni} idempotents vs {nc} classes"),
        ));
    }

    let mut p = IntMatrix::zeros(ni, nc);
    for (i, e) in sd.idempotents.iter().enumerate() {
        for j in 0..nc {
            let raw = product_trace(e.num(), s.class(j))?;
            let val = Ratio::from_i128(raw, e.den() as i128 * sd.multiplicities[i] as i128)?;
            let entry = val.as_integer().ok_or_else(|| {
                Error::invariant(
                    "eigenmatrix_p_integral",
                    format!(
                        "p[{}][{}] = {val} is not an integer",
                        sd.labels[i],
                        s.labels()[j]
                    ),
                )
            })?;
            p.set(i, j, entry);
        }
    }

    let mut qm = IntMatrix::zeros(nc, ni);
    for (j, e) in sd.idempotents.iter().enumerate() {
        // Constancy of E_j across each class support.
        let reps: Vec<i64> = (0..nc)
            .map(|k| {
                let (r, c) = s.representative(k);
                e.num().at(r, c)
            })
            .collect();
        for r in 0..v {
            for c in 0..v {
                let k = s.class_at(r, c);
                if e.num().at(r, c) != reps[k] {
                    return Err(Error::invariant(
                        "eigenmatrix_q_constant",
                        format!(
                            "{} is not constant on class {} at ({r},{c})",
                            sd.labels[j],
                            s.labels()[k]
                        ),
                    ));
                }
            }
        }
        for (k, &rep) in reps.iter().enumerate() {
            let val = Ratio::from_i128(v as i128 * rep as i128, e.den() as i128)?;
            let entry = val.as_integer().ok_or_else(|| {
                Error::invariant(
                    "eigenmatrix_q_integral",
                    format!(
                        "q[{}][{}] = {val} is not an integer",
                        s.labels()[k],
                        sd.labels[j]
                    ),
                )
            })?;
            qm.set(k, j, entry);
        }
    }

    let expected_p_m = expected_p(s.spec());
    if let Some((r, c)) = p.first_diff(&expected_p_m) {
        return Err(Error::invariant(
            "eigenmatrix_p_closed_form",
            format!(
                "P[{}][{}] = {} but the table gives {}",
                sd.labels[r],
                s.labels()[c],
                p.at(r, c),
                expected_p_m.at(r, c)
            ),
        ));
    }
    let expected_q_m = expected_q(s.spec());
    if let Some((r, c)) = qm.first_diff(&expected_q_m) {
        return Err(Error::invariant(
            "eigenmatrix_q_closed_form",
            format!(
                "Q[{}][{}] = {} but the table gives {}",
                s.labels()[r],
                sd.labels[c],
                qm.at(r, c),
                expected_q_m.at(r, c)
            ),
        ));
    }

    sd.p_matrix = Some(p);
    sd.q_matrix = Some(qm);
    Ok(())
}

/// Duality and inversion identities tying P, Q, the valencies and the
/// multiplicities together: Delta_m P = Q^T Delta_k, P Q = v I, valencies
/// equal the E_0 row of P, multiplicities equal the identity row of Q.
pub fn verify_duality(sd: &SpectralData, valencies: &[i64], v: i64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    let p = sd
        .p_matrix
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("eigenmatrices not computed".into()))?;
    let q = sd
        .q_matrix
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("eigenmatrices not computed".into()))?;
    let n = sd.labels.len();

    let delta_m = IntMatrix::from_fn(n, n, |r, c| if r == c { sd.multiplicities[r] } else { 0 });
    let delta_k = IntMatrix::from_fn(n, n, |r, c| if r == c { valencies[r] } else { 0 });
    let lhs = delta_m.matmul(p)?;
    let rhs = q.transpose().matmul(&delta_k)?;
    match lhs.first_diff(&rhs) {
        None => report.pass("duality_delta_m_p"),
        Some((r, c)) => report.fail(
            "duality_delta_m_p",
            format!("Delta_m P != Q^T Delta_k at ({r},{c})"),
        ),
    }

    let pq = p.matmul(q)?;
    let vi = IntMatrix::identity(n).checked_scale(v)?;
    match pq.first_diff(&vi) {
        None => report.pass("duality_p_q_equals_v_i"),
        Some((r, c)) => report.fail("duality_p_q_equals_v_i", format!("P Q != v I at ({r},{c})")),
    }

    let first_row_ok = (0..n).all(|j| p.at(0, j) == valencies[j]);
    report.record(
        "valencies_from_p",
        first_row_ok,
        "E_0 row of P differs from the valencies",
    );
    let first_col_ok = (0..n).all(|j| q.at(0, j) == sd.multiplicities[j]);
    report.record(
        "multiplicities_from_q",
        first_col_ok,
        "identity row of Q differs from the multiplicities",
    );
    Ok(report)
}

/// The Krein tensor q_{i,j}^k under the convention
/// E_i o E_j = (1/v) sum_k q_{i,j}^k E_k.
#[derive(Clone, Debug, Serialize)]
pub struct KreinTensor {
    pub labels: Vec<IdemLabel>,
    pub multiplicities: Vec<i64>,
    pub q: Vec<Vec<Vec<Ratio>>>,
}

/// Computes the full Krein tensor: q_{i,j}^k = (v / m_k) trace((E_i o E_j) E_k),
/// exactly. For every pair the defining expansion is re-verified as a matrix
/// identity, and every entry is checked nonnegative; either failure is fatal
/// since both hold for every symmetric association scheme.
pub fn krein(s: &Scheme, sd: &SpectralData) -> Result<KreinTensor> {
    let v = s.v() as i64;
    let n = sd.labels.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();

    let computed: Vec<(usize, usize, Vec<Ratio>)> = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<(usize, usize, Vec<Ratio>)> {
            let h = sd.idempotents[i].hadamard(&sd.idempotents[j])?;
            let mut row = Vec::with_capacity(n);
            for k in 0..n {
                let e_k = &sd.idempotents[k];
                let raw = product_trace(h.num(), e_k.num())?;
                // q^k = v * trace(H E_k) / m_k.
                let val = Ratio::from_i128(
                    raw * v as i128,
                    h.den() as i128 * e_k.den() as i128 * sd.multiplicities[k] as i128,
                )?;
                if val.is_negative() {
                    return Err(Error::invariant(
                        "krein_nonnegative",
                        format!(
                            "q[{}][{}]^{} = {val} < 0",
                            sd.labels[i], sd.labels[j], sd.labels[k]
                        ),
                    ));
                }
                row.push(val);
            }
            // Re-verify E_i o E_j = (1/v) sum_k q^k E_k exactly.
            let mut acc = ScaledAccumulator::new(h.rows(), h.cols());
            for (k, &coeff) in row.iter().enumerate() {
                acc.add_scaled(&sd.idempotents[k], coeff.mul(Ratio::new(1, v)?)?)?;
            }
            if !acc.equals(&h) {
                let (r, c) = acc.first_diff(&h).unwrap_or((0, 0));
                return Err(Error::invariant(
                    "krein_expansion",
                    format!("E_{i} o E_{j} differs from its idempotent expansion at ({r},{c})"),
                ));
            }
            Ok((i, j, row))
        })
        .collect::<Result<_>>()?;

    let mut q = vec![vec![vec![Ratio::zero(); n]; n]; n];
    for (i, j, row) in computed {
        q[i][j] = row.clone();
        q[j][i] = row;
    }
    Ok(KreinTensor {
        labels: sd.labels.clone(),
        multiplicities: sd.multiplicities.clone(),
        q,
    })
}

/// The closed-form Krein tensor. Each entrywise product of idempotents has
/// an explicit expansion; where the right-hand side mentions a zero-labeled
/// matrix E_{0,1}, E_{0,3} or E_{0,4}, it is expanded into primitive
/// idempotents by [`zero_label_expansion`].
pub fn expected_krein(spec: &FieldSpec) -> KreinTensor {
    let q = spec.q() as i64;
    let labels = idempotent_labels(spec);
    let n = labels.len();
    let idx = |label: IdemLabel| labels.iter().position(|&l| l == label).expect("primitive");
    let r = |num: i64, den: i64| Ratio::new(num, den).expect("static denominator");

    // Multiplicities from the closed forms.
    let multiplicities: Vec<i64> = labels
        .iter()
        .map(|l| match l {
            IdemLabel::E0 => 1,
            IdemLabel::E1 => q / 2,
            IdemLabel::E { kind: 1 | 2, .. } => q / 2 + 1,
            IdemLabel::E { .. } => (q / 2 + 1) * q,
        })
        .collect();

    // Terms scaled by `scale` over a zero-expanded target label.
    let expanded = |alpha: u32, kind: u8, scale: Ratio| -> Vec<(usize, Ratio)> {
        zero_label_expansion(spec, alpha, kind)
            .into_iter()
            .map(|(l, c)| (idx(l), c.mul(scale).expect("small rationals")))
            .collect()
    };

    let mut tensor = vec![vec![vec![Ratio::zero(); n]; n]; n];
    for i in 0..n {
        for j in i..n {
            let mut terms: Vec<(usize, Ratio)> = Vec::new();
            match (labels[i], labels[j]) {
                (IdemLabel::E0, _) => terms.push((j, Ratio::integer(1))),
                (IdemLabel::E1, IdemLabel::E1) => {
                    terms.push((idx(IdemLabel::E0), r(q, 2)));
                    terms.push((idx(IdemLabel::E1), r(q - 2, 2)));
                }
                (IdemLabel::E1, IdemLabel::E { kind: 1 | 2, .. }) => {
                    terms.push((j, r(q, 2)));
                }
                (IdemLabel::E1, IdemLabel::E { alpha: b, kind: 3 }) => {
                    terms.push((idx(IdemLabel::E { alpha: b, kind: 3 }), r(q - 2, 4)));
                    terms.push((idx(IdemLabel::E { alpha: b, kind: 4 }), r(q + 2, 4)));
                }
                (IdemLabel::E1, IdemLabel::E { alpha: b, kind: 4 }) => {
                    terms.push((idx(IdemLabel::E { alpha: b, kind: 3 }), r(q + 2, 4)));
                    terms.push((idx(IdemLabel::E { alpha: b, kind: 4 }), r(q - 2, 4)));
                }
                (IdemLabel::E { alpha: a1, kind: 1 }, IdemLabel::E { alpha: a2, kind: 1 }) => {
                    terms.extend(expanded(a1 ^ a2, 1, r(q + 2, 2)));
                }
                (IdemLabel::E { alpha: a1, kind: 1 }, IdemLabel::E { alpha: a2, kind: 2 })
                | (IdemLabel::E { alpha: a1, kind: 2 }, IdemLabel::E { alpha: a2, kind: 1 }) => {
                    terms.push((
                        idx(IdemLabel::E {
                            alpha: a1 ^ a2,
                            kind: 2,
                        }),
                        r(q + 2, 2),
                    ));
                }
                (IdemLabel::E { alpha: a1, kind: 2 }, IdemLabel::E { alpha: a2, kind: 2 }) => {
                    terms.extend(expanded(a1 ^ a2, 1, r(q + 2, 2)));
                }
                (
                    IdemLabel::E { kind: 1 | 2, .. },
                    IdemLabel::E {
                        alpha: b,
                        kind: 3 | 4,
                    },
                ) => {
                    terms.push((idx(IdemLabel::E { alpha: b, kind: 3 }), r(q + 2, 4)));
                    terms.push((idx(IdemLabel::E { alpha: b, kind: 4 }), r(q + 2, 4)));
                }
                (
                    IdemLabel::E {
                        alpha: b1,
                        kind: k1 @ (3 | 4),
                    },
                    IdemLabel::E {
                        alpha: b2,
                        kind: k2 @ (3 | 4),
                    },
                ) => {
                    let scale = r(q / 2 + 1, 1);
                    let (c3, c4) = if k1 == k2 {
                        (r(q + 1, 2), r(q - 1, 2))
                    } else {
                        (r(q - 1, 2), r(q + 1, 2))
                    };
                    terms.extend(expanded(b1 ^ b2, 3, c3.mul(scale).expect("small")));
                    terms.extend(expanded(b1 ^ b2, 4, c4.mul(scale).expect("small")));
                }
                _ => unreachable!("pair ordering covers all label combinations"),
            }
            let mut row = vec![Ratio::zero(); n];
            for (k, c) in terms {
                row[k] = row[k].add(c).expect("small rationals");
            }
            tensor[i][j] = row.clone();
            tensor[j][i] = row;
        }
    }
    KreinTensor {
        labels,
        multiplicities,
        q: tensor,
    }
}

/// Entry-for-entry comparison of a computed Krein tensor against the closed
/// forms, plus the structural identities q_{i,j}^0 = delta_ij m_i and
/// symmetry in (i, j).
pub fn check_krein_formulas(computed: &KreinTensor, expected: &KreinTensor) -> VerificationReport {
    let mut report = VerificationReport::new();
    let n = computed.labels.len();

    let mut mismatch = None;
    'outer: for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if computed.q[i][j][k] != expected.q[i][j][k] {
                    mismatch = Some(format!(
                        "q[{}][{}]^{} = {} but the closed form gives {}",
                        computed.labels[i],
                        computed.labels[j],
                        computed.labels[k],
                        computed.q[i][j][k],
                        expected.q[i][j][k]
                    ));
                    break 'outer;
                }
            }
        }
    }
    report.record(
        "krein_matches_closed_forms",
        mismatch.is_none(),
        mismatch.unwrap_or_default(),
    );

    let mut neg = None;
    'neg: for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if computed.q[i][j][k].is_negative() {
                    neg = Some(format!(
                        "q[{}][{}]^{} = {}",
                        computed.labels[i],
                        computed.labels[j],
                        computed.labels[k],
                        computed.q[i][j][k]
                    ));
                    break 'neg;
                }
            }
        }
    }
    report.record("krein_nonnegative", neg.is_none(), neg.unwrap_or_default());

    let mut sym = None;
    'sym: for i in 0..n {
        for j in i + 1..n {
            if computed.q[i][j] != computed.q[j][i] {
                sym = Some(format!(
                    "q[{}][{}] != q[{}][{}]",
                    computed.labels[i], computed.labels[j], computed.labels[j], computed.labels[i]
                ));
                break 'sym;
            }
        }
    }
    report.record("krein_symmetric", sym.is_none(), sym.unwrap_or_default());

    let mut idcol = None;
    'id: for i in 0..n {
        for j in 0..n {
            let want = if i == j {
                Ratio::integer(computed.multiplicities[i])
            } else {
                Ratio::zero()
            };
            if computed.q[i][j][0] != want {
                idcol = Some(format!(
                    "q[{}][{}]^E_0 = {} != {want}",
                    computed.labels[i], computed.labels[j], computed.q[i][j][0]
                ));
                break 'id;
            }
        }
    }
    report.record(
        "krein_identity_column",
        idcol.is_none(),
        idcol.unwrap_or_default(),
    );

    report
}
