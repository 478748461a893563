//! GF(2^m) arithmetic over bit-vector elements, the multiplication-table
//! generalized Hadamard matrix, additive characters, the character table,
//! and the permutation-automorphism partner search.
//!
//! Elements are indexed by the integer value of their coefficient vector in
//! the polynomial basis, little-endian with the constant term in bit 0.
//! Index 0 is the zero element and index 1 is the one element. The inner
//! product behind the characters is the standard dot product on these
//! coefficient vectors; the basis convention is reported alongside every
//! export that depends on it.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Largest supported extension degree. Constructions are quadratic or worse
/// in q = 2^m, so this is a sanity bound rather than a promise.
pub const MAX_M: u32 = 16;

/// Default irreducible polynomials, bit-encoded: m = 1 is x (GF(2) itself),
/// then x^2+x+1, x^3+x+1, x^4+x+1. Fixed defaults keep all exported tables
/// byte-reproducible; callers may override via [`FieldSpec::with_irreducible`].
pub fn default_irreducible(m: u32) -> Option<u32> {
    match m {
        1 => Some(0b10),
        2 => Some(0b111),
        3 => Some(0b1011),
        4 => Some(0b10011),
        _ => None,
    }
}

/// Element of GF(2^m), identified by the value of its coefficient bit-vector.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u32,
}

impl FieldElement {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn index(self) -> usize {
        self.value as usize
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn bit(self, i: u32) -> bool {
        self.value >> i & 1 == 1
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn poly_degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

/// Remainder of polynomial division over GF(2).
fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while poly_degree(a) >= db && a != 0 {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// Irreducibility by trial division by every polynomial of degree 1..=m/2.
fn poly_is_irreducible(irr: u32, m: u32) -> bool {
    if poly_degree(irr) != m as i32 {
        return false;
    }
    for d in 1..=(m / 2) {
        for divisor in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_rem(irr, divisor) == 0 {
                return false;
            }
        }
    }
    true
}

/// Presentation of GF(2^m): the degree and the irreducible modulus.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldSpec {
    m: u32,
    q: usize,
    irr: u32,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {}", self.m, self.irr_binary())
    }
}

impl FieldSpec {
    pub fn new(m: u32) -> Result<FieldSpec> {
        let irr = default_irreducible(m).ok_or_else(|| {
            Error::InvalidInput(format!(
                "no default irreducible polynomial for m={m}; supply one explicitly"
            ))
        })?;
        FieldSpec::with_irreducible(m, irr)
    }

    pub fn with_irreducible(m: u32, irr: u32) -> Result<FieldSpec> {
        if m == 0 || m > MAX_M {
            return Err(Error::InvalidInput(format!(
                "m must be in 1..={MAX_M}, got {m}"
            )));
        }
        if !poly_is_irreducible(irr, m) {
            return Err(Error::InvalidInput(format!(
                "polynomial {:b} is not an irreducible of degree {m} over GF(2)",
                irr
            )));
        }
        Ok(FieldSpec {
            m,
            q: 1usize << m,
            irr,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn irr(&self) -> u32 {
        self.irr
    }

    /// The modulus as a bit string, highest degree first, e.g. "111" for
    /// x^2 + x + 1.
    pub fn irr_binary(&self) -> String {
        format!("{:b}", self.irr)
    }

    pub fn element(&self, value: u32) -> Result<FieldElement> {
        if (value as usize) < self.q {
            Ok(FieldElement { value })
        } else {
            Err(Error::InvalidInput(format!(
                "element {value} out of range for q={}",
                self.q
            )))
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { value: 0 }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { value: 1 }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q as u32).map(|value| FieldElement { value })
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (1..self.q as u32).map(|value| FieldElement { value })
    }

    /// Characteristic-2 addition: XOR of coefficient vectors.
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(a.index() < self.q && b.index() < self.q);
        FieldElement {
            value: a.value ^ b.value,
        }
    }

    /// Polynomial product reduced modulo the irreducible.
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(a.index() < self.q && b.index() < self.q);
        let mut a = a.value;
        let b = b.value;
        let mut c = 0u32;
        for i in 0..self.m {
            if b >> i & 1 == 1 {
                c ^= a;
            }
            a <<= 1;
            if a >> self.m & 1 == 1 {
                a ^= self.irr;
            }
        }
        FieldElement { value: c }
    }
}

/// The q x q multiplication table of GF(2^m); a generalized Hadamard matrix
/// with parameters (q, 1) over the additive group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GhTable {
    order: usize,
    entries: Vec<FieldElement>,
}

impl GhTable {
    pub fn from_entries(order: usize, entries: Vec<FieldElement>) -> Result<GhTable> {
        if entries.len() != order * order {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for order {order}, got {}",
                order * order,
                entries.len()
            )));
        }
        Ok(GhTable { order, entries })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn at(&self, r: usize, c: usize) -> FieldElement {
        self.entries[r * self.order + c]
    }
}

pub fn gh_table(spec: &FieldSpec) -> GhTable {
    let q = spec.q();
    let mut entries = Vec::with_capacity(q * q);
    for a in spec.elements() {
        for b in spec.elements() {
            entries.push(spec.mul(a, b));
        }
    }
    GhTable { order: q, entries }
}

/// Generalized Hadamard check: for every pair of distinct rows, the multiset
/// of entrywise differences must contain each of the g group elements exactly
/// lambda times. The group is the additive group of the field, so the
/// difference is XOR. A table whose order differs from g * lambda is invalid
/// input rather than a failing check.
pub fn verify_gh(spec: &FieldSpec, table: &GhTable, g: usize, lambda: usize) -> Result<bool> {
    if g != spec.q() {
        return Err(Error::InvalidInput(format!(
            "group order {g} does not match field order {}",
            spec.q()
        )));
    }
    let n = table.order();
    if n != g * lambda {
        return Err(Error::InvalidInput(format!(
            "table order {n} does not equal g*lambda = {}",
            g * lambda
        )));
    }
    let mut counts = vec![0usize; g];
    for i in 0..n {
        for k in 0..n {
            if i == k {
                continue;
            }
            counts.iter_mut().for_each(|c| *c = 0);
            for j in 0..n {
                let d = spec.add(table.at(i, j), table.at(k, j));
                counts[d.index()] += 1;
            }
            if counts.iter().any(|&c| c != lambda) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Additive character value: (-1) to the GF(2) inner product of the
/// coefficient vectors of beta and alpha.
pub fn character(beta: FieldElement, alpha: FieldElement) -> i64 {
    if (beta.value() & alpha.value())
        .count_ones()
        .is_multiple_of(2)
    {
        1
    } else {
        -1
    }
}

/// Character table of the additive group: entry (alpha, beta) is
/// chi_beta(alpha). Symmetric, and K * K^T = q * I.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CharacterTable {
    order: usize,
    entries: Vec<i64>,
}

impl CharacterTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn at(&self, alpha: usize, beta: usize) -> i64 {
        self.entries[alpha * self.order + beta]
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix::from_fn(self.order, self.order, |r, c| self.at(r, c))
    }
}

pub fn character_table(spec: &FieldSpec) -> Result<CharacterTable> {
    let q = spec.q();
    let mut entries = Vec::with_capacity(q * q);
    for alpha in spec.elements() {
        for beta in spec.elements() {
            entries.push(character(beta, alpha));
        }
    }
    let table = CharacterTable { order: q, entries };
    let k = table.to_int_matrix();
    let gram = k.matmul(&k.transpose())?;
    let expected = IntMatrix::identity(q).checked_scale(q as i64)?;
    if gram != expected {
        return Err(Error::invariant(
            "character_table_orthogonality",
            "K * K^T != q * I",
        ));
    }
    Ok(table)
}

/// Parses a permutation given as a comma-separated image list over element
/// indices, e.g. "0,2,1,3" maps 0->0, 1->2, 2->1, 3->3.
pub fn parse_permutation(s: &str, n: usize) -> Result<Vec<usize>> {
    let images: Vec<usize> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad permutation entry: {t}")))
        })
        .collect::<Result<_>>()?;
    if images.len() != n || !is_permutation(&images) {
        return Err(Error::InvalidInput(format!(
            "'{s}' is not a permutation of 0..{n}"
        )));
    }
    Ok(images)
}

pub fn is_permutation(p: &[usize]) -> bool {
    let n = p.len();
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// Searches for the unique tau such that (sigma, tau) lies in the
/// permutation automorphism group of the character table, i.e.
/// chi_{tau(beta)}(sigma(alpha)) = chi_beta(alpha) for all alpha, beta.
///
/// For each beta the vector alpha' -> chi_beta(sigma^{-1}(alpha')) is looked
/// up among the rows of K via a hash map; if every beta resolves, tau is
/// assembled (uniqueness follows from distinctness of characters). Absence
/// of a partner is a valid result, not an error.
pub fn paut_partner(spec: &FieldSpec, sigma: &[usize]) -> Result<Option<Vec<usize>>> {
    let q = spec.q();
    if sigma.len() != q || !is_permutation(sigma) {
        return Err(Error::InvalidInput(format!(
            "sigma must be a permutation of 0..{q}"
        )));
    }
    let mut sigma_inv = vec![0usize; q];
    for (a, &img) in sigma.iter().enumerate() {
        sigma_inv[img] = a;
    }

    let mut row_index: HashMap<Vec<i64>, usize> = HashMap::with_capacity(q);
    for c in 0..q as u32 {
        let chi_c = FieldElement { value: c };
        let row: Vec<i64> = (0..q as u32)
            .map(|a| character(chi_c, FieldElement { value: a }))
            .collect();
        row_index.insert(row, c as usize);
    }

    let mut tau = vec![0usize; q];
    for b in 0..q as u32 {
        let beta = FieldElement { value: b };
        let wanted: Vec<i64> = (0..q)
            .map(|a_img| {
                character(
                    beta,
                    FieldElement {
                        value: sigma_inv[a_img] as u32,
                    },
                )
            })
            .collect();
        match row_index.get(&wanted) {
            Some(&c) => tau[b as usize] = c,
            None => return Ok(None),
        }
    }
    if !is_permutation(&tau) {
        return Ok(None);
    }
    for a in 0..q as u32 {
        for b in 0..q as u32 {
            let lhs = character(
                FieldElement {
                    value: tau[b as usize] as u32,
                },
                FieldElement {
                    value: sigma[a as usize] as u32,
                },
            );
            let rhs = character(FieldElement { value: b }, FieldElement { value: a });
            if lhs != rhs {
                return Err(Error::invariant(
                    "paut_partner",
                    format!("assembled tau fails at (alpha={a}, beta={b})"),
                ));
            }
        }
    }
    Ok(Some(tau))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_specs_construct() {
        for m in 1..=4 {
            let spec = FieldSpec::new(m).unwrap();
            assert_eq!(spec.q(), 1 << m);
        }
        assert!(FieldSpec::new(0).is_err());
        assert!(FieldSpec::new(5).is_err());
    }

    #[test]
    fn rejects_reducible_polynomials() {
        // x^2 + 1 = (x + 1)^2 over GF(2).
        assert!(FieldSpec::with_irreducible(2, 0b101).is_err());
        // x^2 factors as x * x.
        assert!(FieldSpec::with_irreducible(2, 0b100).is_err());
        // Wrong degree.
        assert!(FieldSpec::with_irreducible(3, 0b111).is_err());
        // x^4 + x^3 + 1 is irreducible.
        assert!(FieldSpec::with_irreducible(4, 0b11001).is_ok());
    }

    #[test]
    fn add_identities() {
        let spec = FieldSpec::new(3).unwrap();
        for a in spec.elements() {
            assert_eq!(spec.add(spec.zero(), a), a);
            assert_eq!(spec.add(a, a), spec.zero());
        }
        // m=2: x + (x+1) = 1.
        let spec2 = FieldSpec::new(2).unwrap();
        let x = spec2.element(2).unwrap();
        let x1 = spec2.element(3).unwrap();
        assert_eq!(spec2.add(x, x1), spec2.one());
    }

    #[test]
    fn mul_identities_and_frozen_values() {
        let spec = FieldSpec::new(2).unwrap();
        for a in spec.elements() {
            assert_eq!(spec.mul(a, spec.zero()), spec.zero());
            assert_eq!(spec.mul(a, spec.one()), a);
        }
        // Long division of x^2 by x^2+x+1 leaves x+1.
        let x = spec.element(2).unwrap();
        assert_eq!(spec.mul(x, x).value(), 3);
        // m=3, irr = x^3+x+1: x * x^2 = x^3 = x + 1.
        let spec3 = FieldSpec::new(3).unwrap();
        let a = spec3.element(2).unwrap();
        let b = spec3.element(4).unwrap();
        assert_eq!(spec3.mul(a, b).value(), 3);
    }

    #[test]
    fn field_axioms_exhaustive_small_m() {
        for m in 1..=3 {
            let spec = FieldSpec::new(m).unwrap();
            for a in spec.elements() {
                for b in spec.elements() {
                    assert_eq!(spec.mul(a, b), spec.mul(b, a));
                    for c in spec.elements() {
                        assert_eq!(
                            spec.mul(spec.mul(a, b), c),
                            spec.mul(a, spec.mul(b, c)),
                            "associativity at m={m}"
                        );
                        assert_eq!(
                            spec.mul(a, spec.add(b, c)),
                            spec.add(spec.mul(a, b), spec.mul(a, c)),
                            "distributivity at m={m}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn nonzero_elements_invertible() {
        for m in 1..=4 {
            let spec = FieldSpec::new(m).unwrap();
            for a in spec.nonzero_elements() {
                let row: Vec<u32> = spec.elements().map(|b| spec.mul(a, b).value()).collect();
                let mut sorted = row.clone();
                sorted.sort_unstable();
                let all: Vec<u32> = (0..spec.q() as u32).collect();
                assert_eq!(sorted, all, "row of {:?} is a permutation", a);
                assert!(row.contains(&1), "{:?} has an inverse", a);
            }
        }
    }

    #[test]
    fn gh_table_small_cases() {
        let spec1 = FieldSpec::new(1).unwrap();
        let t1 = gh_table(&spec1);
        assert_eq!(
            (0..2)
                .flat_map(|r| (0..2).map(move |c| (r, c)))
                .map(|(r, c)| t1.at(r, c).value())
                .collect::<Vec<_>>(),
            vec![0, 0, 0, 1]
        );

        let spec2 = FieldSpec::new(2).unwrap();
        let t2 = gh_table(&spec2);
        let row_x: Vec<u32> = (0..4).map(|c| t2.at(2, c).value()).collect();
        assert_eq!(row_x, vec![0, 2, 3, 1]);
    }

    #[test]
    fn gh_verification() {
        for m in 1..=3 {
            let spec = FieldSpec::new(m).unwrap();
            let t = gh_table(&spec);
            assert!(verify_gh(&spec, &t, spec.q(), 1).unwrap());
        }
        let spec = FieldSpec::new(1).unwrap();
        let zero_table = GhTable::from_entries(2, vec![spec.zero(); 4]).unwrap();
        assert!(!verify_gh(&spec, &zero_table, 2, 1).unwrap());
        // Order mismatch with g * lambda is invalid input, not a failure.
        let t = gh_table(&spec);
        assert!(verify_gh(&spec, &t, 2, 3).is_err());
    }

    #[test]
    fn character_values() {
        let spec = FieldSpec::new(2).unwrap();
        for a in spec.elements() {
            assert_eq!(character(spec.zero(), a), 1);
            assert_eq!(character(a, spec.zero()), 1);
        }
        // beta with one set bit against alpha = 11 has inner product 1.
        let beta = spec.element(1).unwrap();
        let alpha = spec.element(3).unwrap();
        assert_eq!(character(beta, alpha), -1);
    }

    #[test]
    fn character_is_homomorphism() {
        for m in 1..=3 {
            let spec = FieldSpec::new(m).unwrap();
            for b in spec.elements() {
                for a1 in spec.elements() {
                    for a2 in spec.elements() {
                        assert_eq!(
                            character(b, spec.add(a1, a2)),
                            character(b, a1) * character(b, a2)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn character_table_structure() {
        let spec1 = FieldSpec::new(1).unwrap();
        let k1 = character_table(&spec1).unwrap();
        assert_eq!(
            k1.to_int_matrix(),
            IntMatrix::from_rows(vec![vec![1, 1], vec![1, -1]]).unwrap()
        );

        for m in 1..=3 {
            let spec = FieldSpec::new(m).unwrap();
            let k = character_table(&spec).unwrap();
            assert!(k.to_int_matrix().is_symmetric());
        }

        // Under the value enumeration the table IS the Sylvester tensor
        // power (a particular row/column permutation of it).
        let spec2 = FieldSpec::new(2).unwrap();
        let k2 = character_table(&spec2).unwrap().to_int_matrix();
        let s2 = IntMatrix::from_rows(vec![vec![1, 1], vec![1, -1]]).unwrap();
        let sylvester = s2.kron(&s2).unwrap();
        assert_eq!(k2, sylvester);
    }

    #[test]
    fn paut_identity_and_frozen_linear_example() {
        let spec = FieldSpec::new(2).unwrap();
        let id = vec![0, 1, 2, 3];
        assert_eq!(paut_partner(&spec, &id).unwrap(), Some(id.clone()));

        // sigma given by the GF(2)-linear matrix [[1,1],[0,1]] on coefficient
        // bits; its partner is the inverse-transpose [[1,0],[1,1]].
        let sigma = vec![0, 1, 3, 2];
        let tau = paut_partner(&spec, &sigma).unwrap();
        assert_eq!(tau, Some(vec![0, 3, 2, 1]));

        // A transposition moving 0 cannot have a partner.
        let swap01 = vec![1, 0, 2, 3];
        assert_eq!(paut_partner(&spec, &swap01).unwrap(), None);

        assert!(paut_partner(&spec, &[0, 0, 1, 2]).is_err());
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        let mut result = vec![vec![]];
        for _ in 0..n {
            let mut next = Vec::new();
            for p in result {
                for x in 0..n {
                    if !p.contains(&x) {
                        let mut p2 = p.clone();
                        p2.push(x);
                        next.push(p2);
                    }
                }
            }
            result = next;
        }
        result
    }

    #[test]
    fn paut_search_exhaustive_against_brute_force() {
        for m in 1..=2u32 {
            let spec = FieldSpec::new(m).unwrap();
            let q = spec.q();
            let perms = permutations(q);
            let mut partner_count = 0;
            for sigma in &perms {
                let found = paut_partner(&spec, sigma).unwrap();
                // Brute force over all tau.
                let brute = perms.iter().find(|tau| {
                    (0..q as u32).all(|a| {
                        (0..q as u32).all(|b| {
                            character(
                                FieldElement {
                                    value: tau[b as usize] as u32,
                                },
                                FieldElement {
                                    value: sigma[a as usize] as u32,
                                },
                            ) == character(FieldElement { value: b }, FieldElement { value: a })
                        })
                    })
                });
                assert_eq!(found.as_ref(), brute, "sigma={sigma:?}");
                if let Some(tau) = found {
                    partner_count += 1;
                    assert_eq!((sigma[0], tau[0]), (0, 0), "PAut pairs fix zero");
                }
            }
            // The admissible sigma are exactly the GF(2)-linear bijections.
            let expected = match m {
                1 => 1,
                2 => 6,
                _ => unreachable!(),
            };
            assert_eq!(partner_count, expected);
        }
    }
}
