//! Assembly of the permutation representation, the auxiliary block matrices,
//! the design matrices, and the adjacency classes of the association scheme.
//!
//! On v = (q+2) q^2 points the classes are, in fixed export order: the
//! identity, A_{alpha,0} for nonzero alpha, A_{beta,1} for nonzero beta,
//! A_{alpha,2} and A_{alpha,3} for all alpha. Their valencies are 1, 1, q,
//! q, q^2 respectively, and there are 4q - 1 matrices in total (the
//! identity plus 4q - 2 = 2^{m+2} - 2 classes).

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::latin::{
    build_latin, build_latin_relabeled, factor_set, FactorSet, LatinSquare, Symbol,
};
use crate::matrix::IntMatrix;

/// Label (alpha, i) of a class matrix A_{alpha,i}, i in 0..=3.
/// Serializes as its display string, e.g. "A_2_3".
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ClassLabel {
    pub alpha: u32,
    pub kind: u8,
}

impl ClassLabel {
    pub fn new(alpha: u32, kind: u8) -> ClassLabel {
        ClassLabel { alpha, kind }
    }

    pub fn identity() -> ClassLabel {
        ClassLabel { alpha: 0, kind: 0 }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A_{}_{}", self.alpha, self.kind)
    }
}

impl serde::Serialize for ClassLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The permutation representation of the additive group: the tensor product
/// over the bits of alpha of R^bit with R = J_2 - I_2, taken most
/// significant bit first so that the row index of the result reads as an
/// element value. Equivalently, the permutation matrix of translation by
/// alpha: entry (r, c) is 1 exactly when c = r XOR alpha.
pub fn phi(spec: &FieldSpec, alpha: FieldElement) -> IntMatrix {
    let r = IntMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]).expect("static");
    let i2 = IntMatrix::identity(2);
    let mut out = IntMatrix::identity(1);
    for bit in (0..spec.m()).rev() {
        let factor = if alpha.bit(bit) { &r } else { &i2 };
        out = out.kron(factor).expect("phi dimensions are tiny");
    }
    out
}

/// The q^2 x q^2 auxiliary matrix C_{a,alpha}. For a field-element index a
/// the (beta, beta') block is phi(a(beta + beta') + alpha); for a = x it is
/// the zero matrix; for a = y it is phi(alpha) tensor J_q.
pub fn c_matrix(spec: &FieldSpec, a: Symbol, alpha: FieldElement) -> Result<IntMatrix> {
    let q = spec.q();
    match a {
        Symbol::X => Ok(IntMatrix::zeros(q * q, q * q)),
        Symbol::Y => phi(spec, alpha).kron(&IntMatrix::ones(q, q)),
        Symbol::Field(av) => {
            let a_el = spec.element(av)?;
            // The block at (beta, beta') depends only on delta = beta + beta',
            // and the 0/1 template selecting the pairs with a given delta is
            // phi(delta) itself, so C_{a,alpha} = sum over delta of
            // phi(delta) tensor phi(a*delta + alpha).
            let mut out = IntMatrix::zeros(q * q, q * q);
            for delta in spec.elements() {
                let inner = phi(spec, spec.add(spec.mul(a_el, delta), alpha));
                let term = phi(spec, delta).kron(&inner)?;
                out = out.checked_add(&term)?;
            }
            Ok(out)
        }
    }
}

/// The design matrix N_alpha = sum over a in F_q + {y} of P_a tensor
/// C_{a,alpha}, a symmetric v x v 0/1 matrix.
pub fn n_matrix(spec: &FieldSpec, factors: &FactorSet, alpha: FieldElement) -> Result<IntMatrix> {
    let q = spec.q();
    let v = (q + 2) * q * q;
    let mut out = IntMatrix::zeros(v, v);
    for a in factors.symbols().filter(|s| *s != Symbol::X) {
        let c = c_matrix(spec, a, alpha)?;
        out = out.checked_add(&factors.p(a).kron(&c)?)?;
    }
    Ok(out)
}

/// Entry-level construction of N_alpha straight from the Latin square:
/// block (a, a') is C_{L(a,a'), alpha}. Kept as a cross-check oracle for
/// the Kronecker-sum assembly.
pub fn n_matrix_per_entry(
    spec: &FieldSpec,
    latin: &LatinSquare,
    alpha: FieldElement,
) -> Result<IntMatrix> {
    let q = spec.q();
    let n = latin.order();
    let qq = q * q;
    let mut out = IntMatrix::zeros(n * qq, n * qq);
    for a in 0..n {
        for b in 0..n {
            let block = c_matrix(spec, latin.at(a, b), alpha)?;
            for r in 0..qq {
                for c in 0..qq {
                    out.set(a * qq + r, b * qq + c, block.at(r, c));
                }
            }
        }
    }
    Ok(out)
}

/// One adjacency matrix A_{alpha,kind}.
pub fn adjacency(
    spec: &FieldSpec,
    factors: &FactorSet,
    alpha: FieldElement,
    kind: u8,
) -> Result<IntMatrix> {
    let q = spec.q();
    match kind {
        0 => IntMatrix::identity(q * (q + 2)).kron(&phi(spec, alpha)),
        1 => IntMatrix::identity(q + 2).kron(&c_matrix(spec, Symbol::Y, alpha)?),
        2 => factors
            .p(Symbol::Y)
            .kron(&c_matrix(spec, Symbol::Y, alpha)?),
        3 => {
            let n = n_matrix(spec, factors, alpha)?;
            let a2 = adjacency(spec, factors, alpha, 2)?;
            n.checked_sub(&a2)
        }
        _ => Err(Error::InvalidInput(format!(
            "class kind {kind} out of range"
        ))),
    }
}

/// Class labels in export order.
pub fn scheme_labels(spec: &FieldSpec) -> Vec<ClassLabel> {
    let q = spec.q() as u32;
    let mut labels = vec![ClassLabel::identity()];
    labels.extend((1..q).map(|a| ClassLabel::new(a, 0)));
    labels.extend((1..q).map(|b| ClassLabel::new(b, 1)));
    labels.extend((0..q).map(|a| ClassLabel::new(a, 2)));
    labels.extend((0..q).map(|a| ClassLabel::new(a, 3)));
    labels
}

/// Valency of a class from its kind.
pub fn class_valency(spec: &FieldSpec, label: ClassLabel) -> i64 {
    let q = spec.q() as i64;
    match label.kind {
        0 => 1,
        1 | 2 => q,
        _ => q * q,
    }
}

/// Streams every class matrix in label order to the callback, constructing
/// at most one large matrix at a time. This is the path the large-order
/// spot certification and the exporter share.
pub fn for_each_class(
    spec: &FieldSpec,
    factors: &FactorSet,
    mut f: impl FnMut(ClassLabel, IntMatrix) -> Result<()>,
) -> Result<()> {
    for label in scheme_labels(spec) {
        let alpha = spec.element(label.alpha)?;
        let mat = adjacency(spec, factors, alpha, label.kind)?;
        f(label, mat)?;
    }
    Ok(())
}

/// Options for the scheme builder; the relabel hook permutes the round
/// labels of the underlying Latin square.
#[derive(Clone, Default)]
pub struct BuildOptions {
    pub latin_relabel: Option<Vec<Symbol>>,
}

/// The symmetric association scheme: the ordered class matrices together
/// with the class-membership map of the point set.
pub struct Scheme {
    spec: FieldSpec,
    v: usize,
    labels: Vec<ClassLabel>,
    classes: Vec<IntMatrix>,
    valencies: Vec<i64>,
    class_of: Vec<u16>,
    representatives: Vec<(usize, usize)>,
    latin: LatinSquare,
}

impl Scheme {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn v(&self) -> usize {
        self.v
    }

    /// Number of classes excluding the identity: 2^{m+2} - 2.
    pub fn class_count(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn classes(&self) -> &[IntMatrix] {
        &self.classes
    }

    pub fn valencies(&self) -> &[i64] {
        &self.valencies
    }

    pub fn latin(&self) -> &LatinSquare {
        &self.latin
    }

    pub fn class(&self, idx: usize) -> &IntMatrix {
        &self.classes[idx]
    }

    pub fn index_of(&self, label: ClassLabel) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn class_by_label(&self, label: ClassLabel) -> Option<&IntMatrix> {
        self.index_of(label).map(|i| &self.classes[i])
    }

    /// Index of the class whose support contains position (r, c).
    pub fn class_at(&self, r: usize, c: usize) -> usize {
        self.class_of[r * self.v + c] as usize
    }

    /// Flat row-major class-membership map of the point-pair set.
    pub fn class_map(&self) -> &[u16] {
        &self.class_of
    }

    /// One support position per class.
    pub fn representative(&self, class_idx: usize) -> (usize, usize) {
        self.representatives[class_idx]
    }

    /// Support representatives for all classes, in class order.
    pub fn representatives(&self) -> &[(usize, usize)] {
        &self.representatives
    }

    /// The design matrix N_alpha, recovered as A_{alpha,2} + A_{alpha,3}.
    pub fn n_matrix_of(&self, alpha: FieldElement) -> Result<IntMatrix> {
        let a2 = self
            .class_by_label(ClassLabel::new(alpha.value(), 2))
            .ok_or_else(|| Error::InvalidInput("missing class".into()))?;
        let a3 = self
            .class_by_label(ClassLabel::new(alpha.value(), 3))
            .ok_or_else(|| Error::InvalidInput("missing class".into()))?;
        a2.checked_add(a3)
    }

    /// The disjoint-cliques block: the sum of A_{alpha,0} and A_{alpha,1}
    /// over nonzero alpha.
    pub fn clique_block(&self) -> Result<IntMatrix> {
        let mut out = IntMatrix::zeros(self.v, self.v);
        for label in &self.labels {
            if label.alpha != 0 && (label.kind == 0 || label.kind == 1) {
                out = out.checked_add(self.class_by_label(*label).expect("listed"))?;
            }
        }
        Ok(out)
    }

    /// The alias matrix: the sum of all A_{alpha,0}, which plays the role
    /// of A_{0,1} in product formulas but is not itself a class.
    pub fn alias_a01(&self) -> Result<IntMatrix> {
        let mut out = IntMatrix::zeros(self.v, self.v);
        for label in &self.labels {
            if label.kind == 0 {
                out = out.checked_add(self.class_by_label(*label).expect("listed"))?;
            }
        }
        Ok(out)
    }
}

pub fn build_scheme(spec: &FieldSpec) -> Result<Scheme> {
    build_scheme_with(spec, &BuildOptions::default())
}

pub fn build_scheme_with(spec: &FieldSpec, opts: &BuildOptions) -> Result<Scheme> {
    let q = spec.q();
    let v = (q + 2) * q * q;
    let latin = match &opts.latin_relabel {
        Some(labels) => build_latin_relabeled(spec, labels)?,
        None => build_latin(spec)?,
    };
    let factors = factor_set(&latin)?;

    let labels = scheme_labels(spec);
    let mut classes = Vec::with_capacity(labels.len());
    for_each_class(spec, &factors, |_, mat| {
        classes.push(mat);
        Ok(())
    })?;

    let mut valencies = Vec::with_capacity(labels.len());
    let mut class_of = vec![u16::MAX; v * v];
    let mut representatives = Vec::with_capacity(labels.len());
    for (k, (label, mat)) in labels.iter().zip(&classes).enumerate() {
        if mat.rows() != v || mat.cols() != v {
            return Err(Error::invariant(
                "scheme_dimensions",
                format!("{label} is {}x{}", mat.rows(), mat.cols()),
            ));
        }
        if !mat.is_zero_one() {
            return Err(Error::invariant(
                "scheme_zero_one",
                format!("{label} has an entry outside 0/1"),
            ));
        }
        if !mat.is_symmetric() {
            return Err(Error::invariant(
                "scheme_symmetry",
                format!("{label} is not symmetric"),
            ));
        }
        let expected = class_valency(spec, *label);
        let sums = mat.row_sums()?;
        if let Some(r) = sums.iter().position(|&s| s != expected) {
            return Err(Error::invariant(
                "scheme_valency",
                format!("{label} row {r} sums to {} instead of {expected}", sums[r]),
            ));
        }
        let mut rep = None;
        for r in 0..v {
            for c in 0..v {
                if mat.at(r, c) == 1 {
                    let cell = &mut class_of[r * v + c];
                    if *cell != u16::MAX {
                        return Err(Error::invariant(
                            "scheme_disjoint",
                            format!(
                                "position ({r},{c}) lies in both {} and {label}",
                                labels[*cell as usize]
                            ),
                        ));
                    }
                    *cell = k as u16;
                    if rep.is_none() {
                        rep = Some((r, c));
                    }
                }
            }
        }
        representatives.push(rep.ok_or_else(|| {
            Error::invariant("scheme_nonempty", format!("{label} is the zero matrix"))
        })?);
        valencies.push(expected);
    }
    if let Some(pos) = class_of.iter().position(|&c| c == u16::MAX) {
        return Err(Error::invariant(
            "scheme_complete",
            format!("position ({},{}) lies in no class", pos / v, pos % v),
        ));
    }
    // The identity class must actually be the identity matrix.
    if classes[0] != IntMatrix::identity(v) {
        return Err(Error::invariant("scheme_identity", "A_0_0 != I"));
    }

    Ok(Scheme {
        spec: spec.clone(),
        v,
        labels,
        classes,
        valencies,
        class_of,
        representatives,
        latin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(m: u32) -> FieldSpec {
        FieldSpec::new(m).unwrap()
    }

    #[test]
    fn phi_is_translation_representation() {
        for m in 1..=3 {
            let s = spec(m);
            let q = s.q();
            assert_eq!(phi(&s, s.zero()), IntMatrix::identity(q));
            for a in s.elements() {
                let p = phi(&s, a);
                assert!(p.is_symmetric());
                // XOR-translation oracle.
                let oracle = IntMatrix::from_fn(q, q, |r, c| i64::from(c == r ^ a.index()));
                assert_eq!(p, oracle);
                for b in s.elements() {
                    assert_eq!(
                        p.matmul(&phi(&s, b)).unwrap(),
                        phi(&s, s.add(a, b)),
                        "phi homomorphism at m={m}"
                    );
                }
            }
        }
        let s1 = spec(1);
        assert_eq!(
            phi(&s1, s1.one()),
            IntMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap()
        );
    }

    #[test]
    fn c_matrix_block_structure() {
        for m in 1..=2 {
            let s = spec(m);
            let q = s.q();
            for alpha in s.elements() {
                assert!(c_matrix(&s, Symbol::X, alpha).unwrap().is_zero());
                let cy = c_matrix(&s, Symbol::Y, alpha).unwrap();
                assert_eq!(cy, phi(&s, alpha).kron(&IntMatrix::ones(q, q)).unwrap());
                for a in s.elements() {
                    let c = c_matrix(&s, Symbol::Field(a.value()), alpha).unwrap();
                    assert!(c.is_symmetric());
                    // Per-entry definition as the oracle.
                    for beta in s.elements() {
                        for beta2 in s.elements() {
                            let inner = phi(&s, s.add(s.mul(a, s.add(beta, beta2)), alpha));
                            for r in 0..q {
                                for cc in 0..q {
                                    assert_eq!(
                                        c.at(beta.index() * q + r, beta2.index() * q + cc),
                                        inner.at(r, cc)
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn c_matrix_product_identities() {
        for m in 1..=2 {
            let s = spec(m);
            let q = s.q();
            let qq = q * q;
            let j = IntMatrix::ones(qq, qq);
            let symbols: Vec<Symbol> = (0..q as u32)
                .map(Symbol::Field)
                .chain(std::iter::once(Symbol::Y))
                .collect();
            for &a in &symbols {
                for alpha in s.elements() {
                    for alpha2 in s.elements() {
                        let lhs = c_matrix(&s, a, alpha)
                            .unwrap()
                            .matmul(&c_matrix(&s, a, alpha2).unwrap())
                            .unwrap();
                        let rhs = c_matrix(&s, a, s.add(alpha, alpha2))
                            .unwrap()
                            .checked_scale(q as i64)
                            .unwrap();
                        assert_eq!(lhs, rhs, "same-symbol product at m={m}");
                    }
                }
            }
            for &a in &symbols {
                for &b in &symbols {
                    if a == b {
                        continue;
                    }
                    for alpha in s.elements() {
                        for alpha2 in s.elements() {
                            let lhs = c_matrix(&s, a, alpha)
                                .unwrap()
                                .matmul(&c_matrix(&s, b, alpha2).unwrap())
                                .unwrap();
                            assert_eq!(lhs, j, "distinct-symbol product at m={m}");
                        }
                    }
                }
            }
            // Sum over symbols: q I_q tensor phi(alpha) + (J_q + phi(alpha) - I_q) tensor J_q.
            for alpha in s.elements() {
                let mut sum = IntMatrix::zeros(qq, qq);
                for &a in &symbols {
                    sum = sum.checked_add(&c_matrix(&s, a, alpha).unwrap()).unwrap();
                }
                let p = phi(&s, alpha);
                let iq = IntMatrix::identity(q);
                let jq = IntMatrix::ones(q, q);
                let term1 = iq.kron(&p).unwrap().checked_scale(q as i64).unwrap();
                let term2 = jq
                    .checked_add(&p)
                    .unwrap()
                    .checked_sub(&iq)
                    .unwrap()
                    .kron(&jq)
                    .unwrap();
                assert_eq!(sum, term1.checked_add(&term2).unwrap());
            }
        }
    }

    #[test]
    fn c_matrix_translation_identities() {
        for m in 1..=2 {
            let s = spec(m);
            let q = s.q();
            let iq = IntMatrix::identity(q);
            for alpha in s.elements() {
                for alpha2 in s.elements() {
                    for alpha3 in s.elements() {
                        let lhs = iq
                            .kron(&phi(&s, alpha3))
                            .unwrap()
                            .matmul(&c_matrix(&s, Symbol::Field(alpha.value()), alpha2).unwrap())
                            .unwrap();
                        let rhs = c_matrix(&s, Symbol::Field(alpha.value()), s.add(alpha2, alpha3))
                            .unwrap();
                        assert_eq!(lhs, rhs);
                    }
                    let lhs = iq
                        .kron(&phi(&s, alpha))
                        .unwrap()
                        .matmul(&c_matrix(&s, Symbol::Y, alpha2).unwrap())
                        .unwrap();
                    assert_eq!(lhs, c_matrix(&s, Symbol::Y, alpha2).unwrap());
                }
            }
        }
    }

    #[test]
    fn c_matrix_translation_identities_sampled_m3() {
        let s = spec(3);
        let q = s.q();
        let iq = IntMatrix::identity(q);
        let mut state = 0x1D0C_5EEDu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % q as u64) as u32
        };
        for _ in 0..40 {
            let (a, a2, a3) = (
                s.element(next()).unwrap(),
                s.element(next()).unwrap(),
                s.element(next()).unwrap(),
            );
            let lhs = iq
                .kron(&phi(&s, a3))
                .unwrap()
                .matmul(&c_matrix(&s, Symbol::Field(a.value()), a2).unwrap())
                .unwrap();
            assert_eq!(
                lhs,
                c_matrix(&s, Symbol::Field(a.value()), s.add(a2, a3)).unwrap()
            );
            let lhs = iq
                .kron(&phi(&s, a))
                .unwrap()
                .matmul(&c_matrix(&s, Symbol::Y, a2).unwrap())
                .unwrap();
            assert_eq!(lhs, c_matrix(&s, Symbol::Y, a2).unwrap());
        }
    }

    #[test]
    fn n_matrix_design_identities() {
        for m in 1..=2 {
            let s = spec(m);
            let q = s.q();
            let v = (q + 2) * q * q;
            let latin = build_latin(&s).unwrap();
            let factors = factor_set(&latin).unwrap();
            let jv = IntMatrix::ones(v, v);
            for alpha in s.elements() {
                let n = n_matrix(&s, &factors, alpha).unwrap();
                assert!(n.is_symmetric());
                assert!(n.is_zero_one());
                assert_eq!(n, n_matrix_per_entry(&s, &latin, alpha).unwrap());
                let sq = n.matmul(&n).unwrap();
                let expected = IntMatrix::identity(v)
                    .checked_scale((q * q) as i64)
                    .unwrap()
                    .checked_add(&jv.checked_scale(q as i64).unwrap())
                    .unwrap();
                assert_eq!(sq, expected, "design identity at m={m}");
            }
        }
    }

    #[test]
    fn n_matrix_cross_products() {
        for m in 1..=2 {
            let s = spec(m);
            let q = s.q();
            let latin = build_latin(&s).unwrap();
            let factors = factor_set(&latin).unwrap();
            let iq2 = IntMatrix::identity(q + 2);
            let iqq2 = IntMatrix::identity(q * (q + 2));
            let jq = IntMatrix::ones(q, q);
            for alpha in s.elements() {
                for beta in s.elements() {
                    let lhs = n_matrix(&s, &factors, alpha)
                        .unwrap()
                        .matmul(&n_matrix(&s, &factors, beta).unwrap())
                        .unwrap();
                    let p = phi(&s, s.add(alpha, beta));
                    let term1 = iqq2
                        .kron(&p)
                        .unwrap()
                        .checked_scale((q * q) as i64)
                        .unwrap();
                    let term2 = iq2
                        .kron(&p.kron(&jq).unwrap())
                        .unwrap()
                        .checked_scale(q as i64)
                        .unwrap();
                    let term3 = IntMatrix::ones(q * (q + 2), q * (q + 2))
                        .checked_sub(&iqq2)
                        .unwrap()
                        .kron(&jq)
                        .unwrap()
                        .checked_scale(q as i64)
                        .unwrap();
                    let rhs = term1
                        .checked_add(&term2)
                        .unwrap()
                        .checked_add(&term3)
                        .unwrap();
                    assert_eq!(lhs, rhs, "product formula at m={m}");
                }
            }
        }
    }

    #[test]
    fn adjacency_basics() {
        for m in 1..=2 {
            let s = spec(m);
            let q = s.q();
            let v = (q + 2) * q * q;
            let latin = build_latin(&s).unwrap();
            let factors = factor_set(&latin).unwrap();
            assert_eq!(
                adjacency(&s, &factors, s.zero(), 0).unwrap(),
                IntMatrix::identity(v)
            );
            // Sum of the kind-0 matrices equals the kind-1 matrix at alpha = 0.
            let mut sum = IntMatrix::zeros(v, v);
            for alpha in s.elements() {
                sum = sum
                    .checked_add(&adjacency(&s, &factors, alpha, 0).unwrap())
                    .unwrap();
            }
            assert_eq!(sum, adjacency(&s, &factors, s.zero(), 1).unwrap());
            for alpha in s.elements() {
                let a3 = adjacency(&s, &factors, alpha, 3).unwrap();
                assert!(a3.is_zero_one());
                assert!(a3.row_sums().unwrap().iter().all(|&r| r == (q * q) as i64));
            }
        }
    }

    #[test]
    fn scheme_small_scale() {
        let s1 = spec(1);
        let sch1 = build_scheme(&s1).unwrap();
        assert_eq!(sch1.v(), 16);
        assert_eq!(sch1.class_count(), 6);
        assert_eq!(sch1.labels().len(), 7);

        let s2 = spec(2);
        let sch2 = build_scheme(&s2).unwrap();
        assert_eq!(sch2.v(), 96);
        assert_eq!(sch2.class_count(), 14);

        // Class membership map agrees with the matrices.
        for (k, mat) in sch2.classes().iter().enumerate() {
            let (r, c) = sch2.representative(k);
            assert_eq!(mat.at(r, c), 1);
            assert_eq!(sch2.class_at(r, c), k);
        }
    }

    #[test]
    fn scheme_with_relabel_hook() {
        let s = spec(1);
        let opts = BuildOptions {
            latin_relabel: Some(vec![Symbol::Y, Symbol::Field(1), Symbol::Field(0)]),
        };
        let sch = build_scheme_with(&s, &opts).unwrap();
        assert_eq!(sch.v(), 16);
        assert_eq!(sch.class_count(), 6);
    }
}
