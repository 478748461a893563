//! Certification pipelines tying the modules together: the full tier
//! certifies every identity on an in-memory scheme, the spot tier streams
//! classes at large orders and checks the design identities plus a fixed
//! sample of class products. Sampling is seeded, so identical
//! configurations produce byte-identical reports at any thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::construct::{
    build_scheme_with, class_valency, for_each_class, n_matrix, scheme_labels, BuildOptions,
};
use crate::error::{Error, Result};
use crate::field::{character_table, gh_table, verify_gh, FieldSpec};
use crate::fusion::{run_fusion, FusionOutcome};
use crate::latin::factor_set;
use crate::matrix::{IntMatrix, PackedMatrix};
use crate::spectra::{
    check_krein_formulas, eigenmatrices, expected_krein, idempotents, krein, verify_duality,
    KreinTensor, SpectralData,
};
use crate::verify::{
    check_intersection_closed_forms, intersection_numbers, read_off_class_span,
    verify_commutative_decomposition, verify_srg, IntersectionTensor, VerificationReport,
};

/// Verification depth. Full checks every pair of classes and the whole
/// spectral layer; spot checks the design identities, partition and
/// symmetry, and a fixed sample of class products, and is the only tier
/// that scales to m = 4.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Full,
    Spot,
}

/// Basic facts about the constructed scheme, serialization-ready.
#[derive(Clone, Debug, Serialize)]
pub struct SchemeSummary {
    pub m: u32,
    pub q: usize,
    pub irreducible: String,
    pub basis: String,
    pub v: usize,
    pub class_count: usize,
    pub labels: Vec<String>,
    pub valencies: Vec<i64>,
}

/// The basis convention recorded alongside every basis-dependent export.
pub const BASIS_CONVENTION: &str =
    "polynomial basis, little-endian coefficient bits, element index = bit-vector value";

pub fn scheme_summary(spec: &FieldSpec) -> SchemeSummary {
    let labels = scheme_labels(spec);
    SchemeSummary {
        m: spec.m(),
        q: spec.q(),
        irreducible: spec.irr_binary(),
        basis: BASIS_CONVENTION.to_string(),
        v: (spec.q() + 2) * spec.q() * spec.q(),
        class_count: labels.len() - 1,
        labels: labels.iter().map(|l| l.to_string()).collect(),
        valencies: labels.iter().map(|&l| class_valency(spec, l)).collect(),
    }
}

/// Everything the full certification produces.
pub struct CertifyArtifacts {
    pub summary: SchemeSummary,
    pub report: VerificationReport,
    pub tensor: Option<IntersectionTensor>,
    pub spectral: Option<SpectralData>,
    pub krein: Option<KreinTensor>,
}

fn field_checks(spec: &FieldSpec, report: &mut VerificationReport) -> Result<()> {
    let table = gh_table(spec);
    let ok = verify_gh(spec, &table, spec.q(), 1)?;
    report.record(
        "gh_table_is_generalized_hadamard",
        ok,
        "multiplication table fails the (q,1) difference condition",
    );
    // The constructor itself enforces K K^T = q I.
    match character_table(spec) {
        Ok(_) => report.pass("character_table_orthogonality"),
        Err(e) => report.fail("character_table_orthogonality", e.to_string()),
    }
    Ok(())
}

/// Full-tier certification: construction invariants, the strongly regular
/// decomposition into the design matrices and the clique block, the class
/// decomposition, the intersection tensor against its closed forms, the
/// idempotents, both eigenmatrices with duality, and the Krein tensor
/// against its closed forms.
pub fn certify_full(spec: &FieldSpec, opts: &BuildOptions) -> Result<CertifyArtifacts> {
    let mut report = VerificationReport::new();
    field_checks(spec, &mut report)?;

    let scheme = build_scheme_with(spec, opts)?;
    report.pass("scheme_construction_invariants");

    // The coarse decomposition: identity, the q design matrices, cliques.
    let mut coarse = vec![IntMatrix::identity(scheme.v())];
    for alpha in spec.elements() {
        coarse.push(scheme.n_matrix_of(alpha)?);
    }
    coarse.push(scheme.clique_block()?);
    let mut srd = verify_commutative_decomposition(&coarse)?;
    for check in &mut srd.checks {
        check.check = format!("srd_{}", check.check);
    }
    report.merge(srd);

    let q = spec.q() as i64;
    let v = scheme.v();
    for (idx, alpha) in spec.elements().enumerate() {
        let ok = verify_srg(&coarse[idx + 1], v, q * q + q, q, q)?;
        report.record(
            format!("srg_design_{}", alpha.value()),
            ok,
            "design matrix fails ((q+2)q^2, q^2+q, q, q)",
        );
    }
    let clique = coarse.last().expect("pushed above");
    let ok = verify_srg(clique, v, q * q - 1, q * q - 2, 0)?;
    report.record(
        "srg_cliques",
        ok,
        "clique block fails ((q+2)q^2, q^2-1, q^2-2, 0)",
    );
    drop(coarse);

    let mut fine = verify_commutative_decomposition(scheme.classes())?;
    for check in &mut fine.checks {
        check.check = format!("scheme_{}", check.check);
    }
    report.merge(fine);

    let tensor = intersection_numbers(&scheme)?;
    report.pass("intersection_closure");
    report.merge(check_intersection_closed_forms(&scheme, &tensor));

    let mut spectral = idempotents(&scheme)?;
    report.pass("idempotents_verified");
    eigenmatrices(&scheme, &mut spectral)?;
    report.pass("eigenmatrices_match_tables");
    report.merge(verify_duality(&spectral, scheme.valencies(), v as i64)?);

    let krein_tensor = krein(&scheme, &spectral)?;
    report.pass("krein_computed_nonnegative");
    report.merge(check_krein_formulas(&krein_tensor, &expected_krein(spec)));

    Ok(CertifyArtifacts {
        summary: scheme_summary(spec),
        report,
        tensor: Some(tensor),
        spectral: Some(spectral),
        krein: Some(krein_tensor),
    })
}

/// Number of design matrices sampled by the spot tier.
pub const SPOT_ALPHA_SAMPLES: usize = 4;
/// Number of class products sampled by the spot tier.
pub const SPOT_PRODUCT_SAMPLES: usize = 32;

const SPOT_ALPHA_SEED: u64 = 0x5EED_A19A_5EED_0001;
const SPOT_PAIR_SEED: u64 = 0x5EED_A19A_5EED_0002;
const SIGMA_SAMPLE_SEED: u64 = 0x5EED_A19A_5EED_0003;

pub(crate) fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The first `count` entries of a seeded shuffle of 0..n.
fn sample_indices(n: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut items: Vec<usize> = (0..n).collect();
    let mut state = seed;
    for i in (1..n).rev() {
        let j = (splitmix64(&mut state) % (i as u64 + 1)) as usize;
        items.swap(i, j);
    }
    items.truncate(count.min(n));
    items
}

/// A seeded random permutation of 0..n.
pub fn sample_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut items: Vec<usize> = (0..n).collect();
    let mut state = seed;
    for i in (1..n).rev() {
        let j = (splitmix64(&mut state) % (i as u64 + 1)) as usize;
        items.swap(i, j);
    }
    items
}

/// Deterministic sample of `count` permutations of the field for fusion runs.
pub fn sample_sigmas(q: usize, count: usize) -> Vec<Vec<usize>> {
    (0..count)
        .map(|i| sample_permutation(q, SIGMA_SAMPLE_SEED.wrapping_add(i as u64)))
        .collect()
}

/// The alpha values the spot tier squares, in deterministic order.
pub fn spot_sample_alphas(q: usize) -> Vec<u32> {
    sample_indices(q, SPOT_ALPHA_SAMPLES, SPOT_ALPHA_SEED)
        .into_iter()
        .map(|a| a as u32)
        .collect()
}

/// Spot-tier certification, streaming one class at a time: Latin and factor
/// invariants, the design identity N^2 = q^2 I + q J with constant row sums
/// for a fixed sample of alphas, per-class symmetry and valency with the
/// partition check, and span closure for a fixed sample of class products.
pub fn certify_spot(spec: &FieldSpec, opts: &BuildOptions) -> Result<CertifyArtifacts> {
    let mut report = VerificationReport::new();
    field_checks(spec, &mut report)?;

    let q = spec.q();
    let qi = q as i64;
    let v = (q + 2) * q * q;
    let latin = match &opts.latin_relabel {
        Some(labels) => crate::latin::build_latin_relabeled(spec, labels)?,
        None => crate::latin::build_latin(spec)?,
    };
    let factors = factor_set(&latin)?;
    report.pass("latin_and_factor_invariants");

    for alpha_val in spot_sample_alphas(q) {
        let alpha = spec.element(alpha_val)?;
        let n = n_matrix(spec, &factors, alpha)?;
        let mut ok = n.is_symmetric() && n.is_zero_one();
        ok = ok && n.row_sums()?.iter().all(|&s| s == qi * qi + qi);
        if ok {
            let sq = n.matmul(&n)?;
            'scan: for r in 0..v {
                for c in 0..v {
                    let expected = if r == c { qi * qi + qi } else { qi };
                    if sq.at(r, c) != expected {
                        ok = false;
                        break 'scan;
                    }
                }
            }
        }
        report.record(
            format!("design_identity_N_{alpha_val}"),
            ok,
            "N^2 != q^2 I + q J",
        );
        // Together with the row sums this is exactly the strongly regular
        // condition with parameters ((q+2)q^2, q^2+q, q, q).
        report.record(
            format!("srg_design_{alpha_val}"),
            ok,
            "design matrix fails ((q+2)q^2, q^2+q, q, q)",
        );
    }

    // Stream every class: per-class invariants, the partition map, and a
    // packed copy retained for the sampled products.
    let labels = scheme_labels(spec);
    let nc = labels.len();
    let mut class_of = vec![u16::MAX; v * v];
    let mut representatives = Vec::with_capacity(nc);
    let mut packed: Vec<PackedMatrix> = Vec::with_capacity(nc);
    let mut k = 0usize;
    for_each_class(spec, &factors, |label, mat| {
        if !mat.is_zero_one() {
            return Err(Error::invariant("scheme_zero_one", format!("{label}")));
        }
        if !mat.is_symmetric() {
            return Err(Error::invariant("scheme_symmetry", format!("{label}")));
        }
        let expected = class_valency(spec, label);
        if mat.row_sums()?.iter().any(|&s| s != expected) {
            return Err(Error::invariant("scheme_valency", format!("{label}")));
        }
        let mut rep = None;
        for r in 0..v {
            for c in 0..v {
                if mat.at(r, c) == 1 {
                    let cell = &mut class_of[r * v + c];
                    if *cell != u16::MAX {
                        return Err(Error::invariant(
                            "scheme_disjoint",
                            format!("({r},{c}) covered twice, second time by {label}"),
                        ));
                    }
                    *cell = k as u16;
                    if rep.is_none() {
                        rep = Some((r, c));
                    }
                }
            }
        }
        representatives
            .push(rep.ok_or_else(|| Error::invariant("scheme_nonempty", format!("{label}")))?);
        packed.push(PackedMatrix::from_zero_one(&mat)?);
        k += 1;
        Ok(())
    })?;
    let complete = class_of.iter().all(|&c| c != u16::MAX);
    report.record(
        "scheme_partition",
        complete,
        "some position lies in no class",
    );
    report.pass("scheme_symmetry_and_valencies");

    // Fixed sample of class products, checked for span closure.
    let all_pairs: Vec<(usize, usize)> =
        (0..nc).flat_map(|i| (i..nc).map(move |j| (i, j))).collect();
    let chosen = sample_indices(all_pairs.len(), SPOT_PRODUCT_SAMPLES, SPOT_PAIR_SEED);
    let failures: Vec<String> = chosen
        .par_iter()
        .filter_map(|&pi| {
            let (i, j) = all_pairs[pi];
            let prod = match packed[i].count_product(&packed[j]) {
                Ok(p) => p,
                Err(e) => return Some(format!("product {i},{j}: {e}")),
            };
            match read_off_class_span(&prod, &class_of, &representatives) {
                Ok(coeffs) if coeffs.iter().all(|&c| c >= 0) => None,
                Ok(_) => Some(format!(
                    "{} * {} has a negative coefficient",
                    labels[i], labels[j]
                )),
                Err((r, c)) => Some(format!(
                    "{} * {} leaves the class span at ({r},{c})",
                    labels[i], labels[j]
                )),
            }
        })
        .collect();
    report.record(
        "sampled_products_in_class_span",
        failures.is_empty(),
        failures.first().cloned().unwrap_or_default(),
    );

    Ok(CertifyArtifacts {
        summary: scheme_summary(spec),
        report,
        tensor: None,
        spectral: None,
        krein: None,
    })
}

pub fn certify(spec: &FieldSpec, tier: Tier, opts: &BuildOptions) -> Result<CertifyArtifacts> {
    match tier {
        Tier::Full => certify_full(spec, opts),
        Tier::Spot => certify_spot(spec, opts),
    }
}

/// Builds the scheme and spectral data once and runs the fusion pipeline
/// for every given sigma.
pub fn run_fusions(
    spec: &FieldSpec,
    opts: &BuildOptions,
    sigmas: &[Vec<usize>],
) -> Result<Vec<FusionOutcome>> {
    let scheme = build_scheme_with(spec, opts)?;
    let mut spectral = idempotents(&scheme)?;
    eigenmatrices(&scheme, &mut spectral)?;
    sigmas
        .iter()
        .map(|sigma| run_fusion(&scheme, &spectral, sigma))
        .collect()
}

/// Streams the class matrices to a consumer as coordinate-format text,
/// together with the Latin square text; the exporter the command-line build
/// uses. Classes arrive in label order.
pub fn export_artifacts(
    spec: &FieldSpec,
    opts: &BuildOptions,
    mut sink: impl FnMut(&str, String) -> Result<()>,
) -> Result<SchemeSummary> {
    let latin = match &opts.latin_relabel {
        Some(labels) => crate::latin::build_latin_relabeled(spec, labels)?,
        None => crate::latin::build_latin(spec)?,
    };
    sink("latin.txt", latin.to_text())?;
    let factors = factor_set(&latin)?;
    for_each_class(spec, &factors, |label, mat| {
        sink(&format!("{label}.coo"), mat.to_coo_text()?)
    })?;
    Ok(scheme_summary(spec))
}
