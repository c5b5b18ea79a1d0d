//! Graded Betti bookkeeping: Euler characteristics, Kervaire
//! semi-characteristics, Künneth products, and connected sums.
//!
//! Betti entries carry an explicit [`Betti::Unknown`] marker. Operations whose
//! effect on homology is not determined by the data at hand (surgery, for
//! instance) mark the affected degrees `Unknown` instead of guessing, and the
//! invariant calculators degrade to `Unknown` results accordingly. Homology is
//! stored as ranks only; every formula consumed downstream needs nothing more.

use std::fmt;

use thiserror::Error;

/// A single Betti entry: a known non-negative rank, or not determined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Betti {
    Known(i64),
    Unknown,
}

impl Betti {
    /// The value if known.
    pub fn known(self) -> Option<i64> {
        match self {
            Betti::Known(v) => Some(v),
            Betti::Unknown => None,
        }
    }

    pub fn is_known(self) -> bool {
        matches!(self, Betti::Known(_))
    }

    /// Entrywise sum; `Unknown` absorbs, overflow is an error.
    pub fn add(self, other: Betti) -> Result<Betti, HomologyError> {
        match (self, other) {
            (Betti::Known(a), Betti::Known(b)) => a
                .checked_add(b)
                .map(Betti::Known)
                .ok_or(HomologyError::Overflow),
            _ => Ok(Betti::Unknown),
        }
    }
}

impl fmt::Display for Betti {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Betti::Known(v) => write!(f, "{v}"),
            Betti::Unknown => write!(f, "?"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error("semi-characteristic requires odd dimension, got {0}")]
    EvenDimension(usize),
    #[error("operation requires fully known Betti entries")]
    UnknownEntries,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("integer overflow in exact computation")]
    Overflow,
    #[error("invalid Betti table: {0}")]
    InvalidTable(String),
}

/// Graded Betti data of a manifold over `Z` (ranks, torsion-free regime) and
/// over `Z/2` (mod-2 dimensions). Both sequences have length `dim + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    dim: usize,
    z: Vec<Betti>,
    z2: Vec<Betti>,
    closed: bool,
    orientable: bool,
}

impl BettiTable {
    pub fn new(
        dim: usize,
        z: Vec<Betti>,
        z2: Vec<Betti>,
        closed: bool,
        orientable: bool,
    ) -> Result<Self, HomologyError> {
        if z.len() != dim + 1 || z2.len() != dim + 1 {
            return Err(HomologyError::InvalidTable(format!(
                "need {} entries per coefficient system, got {} over Z and {} over Z/2",
                dim + 1,
                z.len(),
                z2.len()
            )));
        }
        for entry in z.iter().chain(z2.iter()) {
            if let Betti::Known(v) = entry {
                if *v < 0 {
                    return Err(HomologyError::InvalidTable(format!(
                        "negative Betti entry {v}"
                    )));
                }
            }
        }
        Ok(BettiTable {
            dim,
            z,
            z2,
            closed,
            orientable,
        })
    }

    /// The table of the sphere `S^p`, `p >= 1`: closed, orientable,
    /// torsion-free.
    pub fn sphere(p: usize) -> Self {
        assert!(p >= 1, "sphere dimension must be positive");
        let mut z = vec![Betti::Known(0); p + 1];
        z[0] = Betti::Known(1);
        z[p] = Betti::Known(1);
        // S^0 excluded above, so top and bottom never collide... except p = 0.
        let z2 = z.clone();
        BettiTable {
            dim: p,
            z,
            z2,
            closed: true,
            orientable: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn orientable(&self) -> bool {
        self.orientable
    }

    pub fn z(&self) -> &[Betti] {
        &self.z
    }

    pub fn z2(&self) -> &[Betti] {
        &self.z2
    }

    pub fn fully_known(&self) -> bool {
        self.z.iter().chain(self.z2.iter()).all(|e| e.is_known())
    }

    /// Copy of the table with the degree-`i` entry over `Z` replaced.
    pub fn with_entry_z(&self, i: usize, e: Betti) -> Self {
        let mut t = self.clone();
        t.z[i] = e;
        t
    }

    /// Copy of the table with the degree-`i` entry over `Z/2` replaced.
    pub fn with_entry_z2(&self, i: usize, e: Betti) -> Self {
        let mut t = self.clone();
        t.z2[i] = e;
        t
    }
}

/// Alternating sum of the integral Betti numbers.
///
/// Returns `Unknown` when entries are missing, except that a closed
/// odd-dimensional orientable table forces the value 0.
pub fn euler_characteristic(t: &BettiTable) -> Result<Betti, HomologyError> {
    if t.z.iter().all(|e| e.is_known()) {
        let mut chi: i64 = 0;
        for (i, e) in t.z.iter().enumerate() {
            let v = e.known().expect("checked above");
            let signed = if i % 2 == 0 { v } else { v.checked_neg().ok_or(HomologyError::Overflow)? };
            chi = chi.checked_add(signed).ok_or(HomologyError::Overflow)?;
        }
        return Ok(Betti::Known(chi));
    }
    if t.closed && t.dim % 2 == 1 && t.orientable {
        return Ok(Betti::Known(0));
    }
    Ok(Betti::Unknown)
}

/// Kervaire semi-characteristic of a closed `(2k+1)`-manifold: the sum of the
/// mod-2 Betti numbers in degrees `0..=k`, taken mod 2.
///
/// The result is `Known(0)` or `Known(1)`, or `Unknown` when an entry in the
/// relevant range is missing.
pub fn semi_characteristic(t: &BettiTable) -> Result<Betti, HomologyError> {
    if t.dim % 2 == 0 {
        return Err(HomologyError::EvenDimension(t.dim));
    }
    if !t.closed {
        return Err(HomologyError::InvalidTable(
            "semi-characteristic requires a closed manifold".into(),
        ));
    }
    let k = t.dim / 2;
    let mut sum: i64 = 0;
    for e in &t.z2[..=k] {
        match e {
            Betti::Known(v) => sum = (sum + v.rem_euclid(2)) % 2,
            Betti::Unknown => return Ok(Betti::Unknown),
        }
    }
    Ok(Betti::Known(sum))
}

/// Betti table of a product: the convolution of the input sequences over each
/// coefficient system. Valid over `Z` in the torsion-free regime and always
/// over `Z/2`; requires fully known inputs.
pub fn kunneth_product(a: &BettiTable, b: &BettiTable) -> Result<BettiTable, HomologyError> {
    if !a.closed || !b.closed {
        return Err(HomologyError::InvalidTable(
            "Kunneth product requires closed factors".into(),
        ));
    }
    if !a.fully_known() || !b.fully_known() {
        return Err(HomologyError::UnknownEntries);
    }
    let dim = a.dim + b.dim;
    let convolve = |x: &[Betti], y: &[Betti]| -> Result<Vec<Betti>, HomologyError> {
        let mut out = vec![0i64; dim + 1];
        for (i, xi) in x.iter().enumerate() {
            let xv = xi.known().expect("inputs fully known");
            for (j, yj) in y.iter().enumerate() {
                let yv = yj.known().expect("inputs fully known");
                let prod = xv.checked_mul(yv).ok_or(HomologyError::Overflow)?;
                out[i + j] = out[i + j].checked_add(prod).ok_or(HomologyError::Overflow)?;
            }
        }
        Ok(out.into_iter().map(Betti::Known).collect())
    };
    BettiTable::new(
        dim,
        convolve(&a.z, &b.z)?,
        convolve(&a.z2, &b.z2)?,
        true,
        a.orientable && b.orientable,
    )
}

/// Betti table of a connected sum of closed connected orientable manifolds of
/// equal dimension `d >= 2`: interior entries add, the ends are 1, and
/// `Unknown` propagates per entry.
pub fn connected_sum(a: &BettiTable, b: &BettiTable) -> Result<BettiTable, HomologyError> {
    if a.dim != b.dim {
        return Err(HomologyError::DimensionMismatch(a.dim, b.dim));
    }
    if a.dim < 2 {
        return Err(HomologyError::InvalidTable(
            "connected sum requires dimension at least 2".into(),
        ));
    }
    if !(a.closed && b.closed && a.orientable && b.orientable) {
        return Err(HomologyError::InvalidTable(
            "connected sum requires closed orientable summands".into(),
        ));
    }
    let d = a.dim;
    let sum_interior = |x: &[Betti], y: &[Betti]| -> Result<Vec<Betti>, HomologyError> {
        let mut out = Vec::with_capacity(d + 1);
        out.push(Betti::Known(1));
        for i in 1..d {
            out.push(x[i].add(y[i])?);
        }
        out.push(Betti::Known(1));
        Ok(out)
    };
    BettiTable::new(d, sum_interior(&a.z, &b.z)?, sum_interior(&a.z2, &b.z2)?, true, true)
}

/// Euler characteristic of a gluing along a common boundary:
/// `chi(A ∪ B) = chi(A) + chi(B) − chi(A ∩ B)`.
pub fn euler_of_gluing(chi_a: i64, chi_b: i64, chi_boundary: i64) -> Result<i64, HomologyError> {
    chi_a
        .checked_add(chi_b)
        .and_then(|s| s.checked_sub(chi_boundary))
        .ok_or(HomologyError::Overflow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn known(v: &[i64]) -> Vec<Betti> {
        v.iter().copied().map(Betti::Known).collect()
    }

    fn table(z: &[i64]) -> BettiTable {
        BettiTable::new(z.len() - 1, known(z), known(z), true, true).unwrap()
    }

    // Independent route for chi: plain alternating sum, no library calls.
    fn chi_oracle(z: &[i64]) -> i64 {
        z.iter()
            .enumerate()
            .map(|(i, v)| if i % 2 == 0 { *v } else { -*v })
            .sum()
    }

    #[test]
    fn euler_of_sphere_tables() {
        assert_eq!(
            euler_characteristic(&table(&[1, 0, 1])).unwrap(),
            Betti::Known(2)
        );
        assert_eq!(
            euler_characteristic(&table(&[1, 0, 0, 0, 0, 1])).unwrap(),
            Betti::Known(0)
        );
    }

    #[test]
    fn euler_forced_zero_for_odd_closed_orientable() {
        let t = table(&[1, 0, 0, 0, 0, 1]).with_entry_z(2, Betti::Unknown);
        assert_eq!(euler_characteristic(&t).unwrap(), Betti::Known(0));
        // Even dimension: not forced.
        let t = table(&[1, 0, 1, 0, 1]).with_entry_z(2, Betti::Unknown);
        assert_eq!(euler_characteristic(&t).unwrap(), Betti::Unknown);
    }

    // chi of the surgered stage with s = 2 generators and t = 3 relators in
    // even dimension, by inclusion-exclusion over the construction pieces:
    // chi(X) = -2(s-1), each relator surgery removes S^1 x D^{d-1} (chi 0)
    // and glues D^2 x S^{d-2} (chi 2).
    #[test]
    fn euler_by_inclusion_exclusion_matches_formula() {
        let (s, t) = (2i64, 3i64);
        let chi_x_s = -2 * (s - 1);
        let chi_sphere_piece = 2; // chi(D^2 x S^{d-2}), d even
        let oracle = chi_x_s + t * chi_sphere_piece;
        assert_eq!(oracle, 2 * (t - s + 1));
        assert_eq!(oracle, 4);
    }

    #[test]
    fn semi_characteristic_examples() {
        // S^5: only b_0 contributes.
        assert_eq!(
            semi_characteristic(&table(&[1, 0, 0, 0, 0, 1])).unwrap(),
            Betti::Known(1)
        );
        // S^2 x S^3 (Kunneth): [1,0,1,1,0,1], k = 2.
        assert_eq!(
            semi_characteristic(&table(&[1, 0, 1, 1, 0, 1])).unwrap(),
            Betti::Known(0)
        );
        // (S^2 x S^5) # (S^2 x S^5), dim 7: [1,0,2,0,0,2,0,1], k = 3.
        assert_eq!(
            semi_characteristic(&table(&[1, 0, 2, 0, 0, 2, 0, 1])).unwrap(),
            Betti::Known(1)
        );
    }

    #[test]
    fn semi_characteristic_rejects_even_dimension() {
        assert_eq!(
            semi_characteristic(&table(&[1, 0, 1])),
            Err(HomologyError::EvenDimension(2))
        );
    }

    #[test]
    fn semi_characteristic_unknown_entry_in_range() {
        let t = table(&[1, 0, 1, 1, 0, 1]).with_entry_z2(2, Betti::Unknown);
        assert_eq!(semi_characteristic(&t).unwrap(), Betti::Unknown);
        // Unknown above the middle does not matter.
        let t = table(&[1, 0, 1, 1, 0, 1]).with_entry_z2(4, Betti::Unknown);
        assert_eq!(semi_characteristic(&t).unwrap(), Betti::Known(0));
    }

    #[test]
    fn kunneth_examples() {
        let s1s4 = kunneth_product(&BettiTable::sphere(1), &BettiTable::sphere(4)).unwrap();
        assert_eq!(s1s4.z(), known(&[1, 1, 0, 0, 1, 1]).as_slice());
        let s2s2 = kunneth_product(&BettiTable::sphere(2), &BettiTable::sphere(2)).unwrap();
        assert_eq!(s2s2.z(), known(&[1, 0, 2, 0, 1]).as_slice());
        let s3s3 = kunneth_product(&BettiTable::sphere(3), &BettiTable::sphere(3)).unwrap();
        assert_eq!(s3s3.z(), known(&[1, 0, 0, 2, 0, 0, 1]).as_slice());
    }

    #[test]
    fn kunneth_rejects_unknown_entries() {
        let t = table(&[1, 0, 1]).with_entry_z(1, Betti::Unknown);
        assert_eq!(
            kunneth_product(&t, &BettiTable::sphere(2)),
            Err(HomologyError::UnknownEntries)
        );
    }

    #[test]
    fn connected_sum_examples() {
        let s1s4 = kunneth_product(&BettiTable::sphere(1), &BettiTable::sphere(4)).unwrap();
        let sum = connected_sum(&s1s4, &s1s4).unwrap();
        assert_eq!(sum.z(), known(&[1, 2, 0, 0, 2, 1]).as_slice());
        // The sphere is the identity for connected sum.
        let a = table(&[1, 3, 5, 3, 1]);
        let again = connected_sum(&a, &BettiTable::sphere(4)).unwrap();
        assert_eq!(again, a);
    }

    #[test]
    fn connected_sum_dimension_mismatch() {
        assert_eq!(
            connected_sum(&BettiTable::sphere(2), &BettiTable::sphere(3)),
            Err(HomologyError::DimensionMismatch(2, 3))
        );
    }

    #[test]
    fn connected_sum_propagates_unknown_entries() {
        let a = table(&[1, 2, 2, 1]).with_entry_z(1, Betti::Unknown);
        let b = table(&[1, 1, 1, 1]);
        let sum = connected_sum(&a, &b).unwrap();
        assert_eq!(sum.z()[1], Betti::Unknown);
        assert_eq!(sum.z()[2], Betti::Known(3));
    }

    #[test]
    fn gluing_examples() {
        assert_eq!(euler_of_gluing(0, 2, 0).unwrap(), 2);
        assert_eq!(euler_of_gluing(7, 0, 0).unwrap(), 7);
        // Relator surgery in odd ambient dimension n: chi(D^2 x S^{n-3}) = 2.
        let n = 7usize;
        let chi_new_piece = 1 + if (n - 3) % 2 == 0 { 1 } else { -1 };
        assert_eq!(chi_new_piece, 2);
    }

    #[test]
    fn overflow_is_detected() {
        let t = table(&[i64::MAX, 0, i64::MAX]);
        assert_eq!(euler_characteristic(&t), Err(HomologyError::Overflow));
        assert_eq!(
            euler_of_gluing(i64::MAX, 1, 0),
            Err(HomologyError::Overflow)
        );
    }

    /// Strategy: a random product of spheres (as a Betti table), dimension
    /// bounded so convolutions stay small.
    fn sphere_product() -> impl Strategy<Value = BettiTable> {
        proptest::collection::vec(1usize..=5, 1..=3).prop_map(|dims| {
            dims.into_iter()
                .map(BettiTable::sphere)
                .reduce(|a, b| kunneth_product(&a, &b).unwrap())
                .unwrap()
        })
    }

    /// A connected sum of a few sphere products of one common dimension.
    fn sphere_sum(dim_range: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = BettiTable> {
        (dim_range, 1usize..=3).prop_flat_map(|(d, k)| {
            proptest::collection::vec(factor_of_dim(d), k..=k).prop_map(|parts| {
                parts
                    .into_iter()
                    .reduce(|a, b| connected_sum(&a, &b).unwrap())
                    .unwrap()
            })
        })
    }

    /// One sphere product of total dimension exactly `d`.
    fn factor_of_dim(d: usize) -> impl Strategy<Value = BettiTable> {
        (1usize..=d).prop_map(move |first| {
            let mut dims = vec![first];
            let mut left = d - first;
            while left > 0 {
                let next = left.min(3).max(1);
                dims.push(next);
                left -= next;
            }
            dims.into_iter()
                .map(BettiTable::sphere)
                .reduce(|a, b| kunneth_product(&a, &b).unwrap())
                .unwrap()
        })
    }

    proptest! {
        #[test]
        fn closed_odd_tables_have_zero_euler(t in sphere_sum(3..=9)) {
            prop_assume!(t.dim() % 2 == 1);
            prop_assert_eq!(euler_characteristic(&t).unwrap(), Betti::Known(0));
        }

        #[test]
        fn kunneth_is_commutative(a in sphere_product(), b in sphere_product()) {
            let ab = kunneth_product(&a, &b).unwrap();
            let ba = kunneth_product(&b, &a).unwrap();
            prop_assert_eq!(ab, ba);
        }

        #[test]
        fn kunneth_is_associative(a in sphere_product(), b in sphere_product(), c in sphere_product()) {
            let left = kunneth_product(&kunneth_product(&a, &b).unwrap(), &c).unwrap();
            let right = kunneth_product(&a, &kunneth_product(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn kunneth_multiplies_euler(a in sphere_product(), b in sphere_product()) {
            let chi_a = euler_characteristic(&a).unwrap().known().unwrap();
            let chi_b = euler_characteristic(&b).unwrap().known().unwrap();
            let prod = kunneth_product(&a, &b).unwrap();
            prop_assert_eq!(
                euler_characteristic(&prod).unwrap(),
                Betti::Known(chi_a * chi_b)
            );
        }

        #[test]
        fn duality_preserved_by_kunneth(a in sphere_product(), b in sphere_product()) {
            let t = kunneth_product(&a, &b).unwrap();
            let d = t.dim();
            for i in 0..=d {
                prop_assert_eq!(t.z2()[i], t.z2()[d - i]);
            }
        }

        #[test]
        fn duality_preserved_by_connected_sum(t in sphere_sum(2..=8)) {
            let d = t.dim();
            for i in 0..=d {
                prop_assert_eq!(t.z2()[i], t.z2()[d - i]);
            }
        }

        #[test]
        fn connected_sum_euler_law(a in sphere_sum(4..=4), b in sphere_sum(4..=4)) {
            let sum = connected_sum(&a, &b).unwrap();
            let chi = |t: &BettiTable| euler_characteristic(t).unwrap().known().unwrap();
            let chi_sphere = 1 + if a.dim() % 2 == 0 { 1 } else { -1 };
            prop_assert_eq!(chi(&sum), chi(&a) + chi(&b) - chi_sphere);
            // Same law against the independent alternating-sum route.
            let raw: Vec<i64> = sum.z().iter().map(|e| e.known().unwrap()).collect();
            prop_assert_eq!(chi(&sum), chi_oracle(&raw));
        }

        #[test]
        fn connected_sum_semi_characteristic_law(a in sphere_sum(5..=5), b in sphere_sum(5..=5)) {
            let sum = connected_sum(&a, &b).unwrap();
            let sc = |t: &BettiTable| semi_characteristic(t).unwrap().known().unwrap();
            prop_assert_eq!(sc(&sum), (sc(&a) + sc(&b) + 1) % 2);
        }
    }
}
