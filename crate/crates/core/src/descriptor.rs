//! The formal record of a closed manifold: Betti data, certified flags,
//! characteristic-class pairings, and embedding evidence. This is the object
//! every decision consumes.
//!
//! Flags are certificates, not guesses: a `false` flag means "not certified",
//! and decisions degrade to `Indeterminate` rather than assuming. `validate`
//! reports every internal inconsistency it can detect; decisions refuse
//! descriptors with a non-empty report.

use std::fmt;

use crate::charclass::{CharClassData, LaiPairingData};
use crate::groups::{abelianization, GroupPresentation};
use crate::homology::{euler_characteristic, semi_characteristic, Betti, BettiTable};

/// How a codimension-`k` embedding claim is justified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbeddingEvidence {
    Asserted,
    ByConstruction,
    ByWall,
}

impl fmt::Display for EmbeddingEvidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmbeddingEvidence::Asserted => write!(f, "asserted"),
            EmbeddingEvidence::ByConstruction => write!(f, "by_construction"),
            EmbeddingEvidence::ByWall => write!(f, "by_wall"),
        }
    }
}

impl std::str::FromStr for EmbeddingEvidence {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "asserted" => Ok(EmbeddingEvidence::Asserted),
            "by_construction" => Ok(EmbeddingEvidence::ByConstruction),
            "by_wall" => Ok(EmbeddingEvidence::ByWall),
            other => Err(format!(
                "unknown evidence `{other}` (expected asserted, by_construction or by_wall)"
            )),
        }
    }
}

/// A smooth embedding into Euclidean space of the stated codimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmbeddingData {
    pub codim: u32,
    pub evidence: EmbeddingEvidence,
}

/// Where a decision read the Euler characteristic from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChiSource {
    BettiTable,
    CTopPairing,
}

impl fmt::Display for ChiSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChiSource::BettiTable => write!(f, "betti_z"),
            ChiSource::CTopPairing => write!(f, "c_top pairing"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldDescriptor {
    pub betti: BettiTable,
    pub pi1: Option<GroupPresentation>,
    pub simply_connected: bool,
    pub torsion_free_homology: bool,
    pub stably_parallelizable: bool,
    pub w2_zero: bool,
    pub bockstein_w2_zero: bool,
    pub embeds: Option<EmbeddingData>,
    pub char_data: CharClassData,
    pub lai: Option<LaiPairingData>,
}

impl ManifoldDescriptor {
    /// A descriptor with the given Betti table and nothing certified.
    pub fn new(betti: BettiTable) -> Self {
        ManifoldDescriptor {
            betti,
            pi1: None,
            simply_connected: false,
            torsion_free_homology: false,
            stably_parallelizable: false,
            w2_zero: false,
            bockstein_w2_zero: false,
            embeds: None,
            char_data: CharClassData::default(),
            lai: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.betti.dim()
    }

    /// Euler characteristic with its source: the Betti table when it
    /// determines the value, otherwise the top Chern pairing of a declared
    /// almost-complex structure (which equals the Euler characteristic).
    pub fn chi_with_source(&self) -> Option<(i64, ChiSource)> {
        if let Ok(Betti::Known(v)) = euler_characteristic(&self.betti) {
            return Some((v, ChiSource::BettiTable));
        }
        if self.dim() % 2 == 0 {
            if let Some(c) = self.char_data.c_top_pairing {
                return Some((c, ChiSource::CTopPairing));
            }
        }
        None
    }

    pub fn chi(&self) -> Option<i64> {
        self.chi_with_source().map(|(v, _)| v)
    }

    /// Kervaire semi-characteristic, for odd-dimensional closed input.
    pub fn semi_chi(&self) -> Option<i64> {
        match semi_characteristic(&self.betti) {
            Ok(Betti::Known(v)) => Some(v),
            _ => None,
        }
    }
}

/// Every violated invariant of the descriptor, one entry per violation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[String] {
        &self.violations
    }

    fn push(&mut self, v: String) {
        self.violations.push(v);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Check every invariant the descriptor data can witness. An empty report
/// means consistent; decisions require one.
pub fn validate(m: &ManifoldDescriptor) -> ValidationReport {
    let mut report = ValidationReport::default();
    let t = &m.betti;
    let d = t.dim();

    if t.closed() {
        if let Betti::Known(b0) = t.z()[0] {
            if b0 != 1 {
                report.push(format!(
                    "closed connected manifold must have b_0 = 1 over Z, got {b0}"
                ));
            }
        }
        if let Betti::Known(b0) = t.z2()[0] {
            if b0 != 1 {
                report.push(format!(
                    "closed connected manifold must have b_0 = 1 over Z/2, got {b0}"
                ));
            }
        }
        for i in 0..=d / 2 {
            if let (Betti::Known(a), Betti::Known(b)) = (t.z2()[i], t.z2()[d - i]) {
                if a != b {
                    report.push(format!(
                        "mod-2 Poincare duality fails: b_{i} = {a} but b_{} = {b}",
                        d - i
                    ));
                }
            }
        }
    }

    for i in 0..=d {
        if let (Betti::Known(a), Betti::Known(b)) = (t.z()[i], t.z2()[i]) {
            if a > b {
                report.push(format!(
                    "integral rank {a} exceeds mod-2 dimension {b} at degree {i}"
                ));
            }
        }
    }

    // The Euler characteristic is independent of the coefficient field.
    if t.fully_known() {
        let alt = |entries: &[Betti]| -> Option<i64> {
            let mut acc: i64 = 0;
            for (i, e) in entries.iter().enumerate() {
                let v = e.known()?;
                acc = if i % 2 == 0 {
                    acc.checked_add(v)?
                } else {
                    acc.checked_sub(v)?
                };
            }
            Some(acc)
        };
        match (alt(t.z()), alt(t.z2())) {
            (Some(a), Some(b)) if a != b => report.push(format!(
                "Euler characteristic differs between coefficients: {a} over Z, {b} over Z/2"
            )),
            (None, _) | (_, None) => {
                report.push("Betti entries overflow the exact Euler computation".into())
            }
            _ => {}
        }
    }

    if m.simply_connected {
        if let Some(p) = &m.pi1 {
            match abelianization(p) {
                Ok(inv) if !inv.is_trivial() => report.push(format!(
                    "simply_connected contradicts pi1 abelianization {inv}"
                )),
                Err(e) => report.push(format!("pi1 abelianization failed: {e}")),
                _ => {}
            }
        }
    }

    if m.w2_zero && !m.bockstein_w2_zero {
        report.push("w2_zero requires bockstein_w2_zero".into());
    }

    if d % 2 == 0 && t.closed() && t.orientable() {
        if let Ok(Betti::Known(chi)) = euler_characteristic(t) {
            if chi % 2 != 0 {
                report.push(format!(
                    "closed orientable even-dimensional manifold must have even Euler \
                     characteristic, got {chi}"
                ));
            }
        }
    }

    if m.char_data.p1_zero {
        if let Some(pairings) = &m.char_data.p1_pairings {
            for (i, p) in pairings.iter().enumerate() {
                if *p != 0 {
                    report.push(format!(
                        "p1_zero contradicts nonzero p1 pairing {p} at index {i}"
                    ));
                }
            }
        }
    }

    if let Some(c) = m.char_data.c_top_pairing {
        if d % 2 == 1 {
            report.push("c_top pairing requires even dimension".into());
        } else if let Ok(Betti::Known(chi)) = euler_characteristic(t) {
            if c != chi {
                report.push(format!(
                    "c_top pairing {c} disagrees with Euler characteristic {chi}"
                ));
            }
        }
    }

    report
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::homology::kunneth_product;

    /// Sphere descriptor with everything a sphere certifies.
    pub(crate) fn sphere_descriptor(p: usize) -> ManifoldDescriptor {
        let mut m = ManifoldDescriptor::new(BettiTable::sphere(p));
        m.simply_connected = p >= 2;
        m.torsion_free_homology = true;
        m.stably_parallelizable = true;
        m.w2_zero = true;
        m.bockstein_w2_zero = true;
        m.char_data.p1_zero = true;
        m
    }

    /// A 6-manifold descriptor satisfying every hypothesis of the dimension-6
    /// criteria, with the given integral (= mod-2) Betti vector.
    pub(crate) fn six_manifold(z: &[i64]) -> ManifoldDescriptor {
        assert_eq!(z.len(), 7);
        let entries: Vec<Betti> = z.iter().copied().map(Betti::Known).collect();
        let betti = BettiTable::new(6, entries.clone(), entries, true, true).unwrap();
        let mut m = ManifoldDescriptor::new(betti);
        m.simply_connected = true;
        m.torsion_free_homology = true;
        m.stably_parallelizable = true;
        m.w2_zero = true;
        m.bockstein_w2_zero = true;
        m.char_data.c1_zero = true;
        m.char_data.p1_zero = true;
        m
    }

    #[test]
    fn chi_prefers_table_then_pairing() {
        let mut m = six_manifold(&[1, 0, 0, 2, 0, 0, 1]);
        assert_eq!(m.chi_with_source(), Some((0, ChiSource::BettiTable)));
        m.betti = m.betti.with_entry_z(3, Betti::Unknown);
        assert_eq!(m.chi(), None);
        m.char_data.c_top_pairing = Some(0);
        assert_eq!(m.chi_with_source(), Some((0, ChiSource::CTopPairing)));
    }

    #[test]
    fn valid_torus_descriptor_passes() {
        let circle = BettiTable::sphere(1);
        let torus6 = (0..5).fold(circle.clone(), |acc, _| {
            kunneth_product(&acc, &circle).unwrap()
        });
        assert_eq!(
            torus6.z().iter().map(|e| e.known().unwrap()).collect::<Vec<_>>(),
            vec![1, 6, 15, 20, 15, 6, 1]
        );
        let mut m = ManifoldDescriptor::new(torus6);
        m.torsion_free_homology = true;
        m.stably_parallelizable = true;
        m.w2_zero = true;
        m.bockstein_w2_zero = true;
        m.char_data.p1_zero = true;
        assert!(validate(&m).is_empty());
    }

    #[test]
    fn sphere_with_inflated_mod2_row_is_flagged() {
        // b_1 over Z/2 exceeds the integral rank in a way no torsion could
        // explain: the two Euler characteristics disagree.
        let z = vec![Betti::Known(1), Betti::Known(0), Betti::Known(1)];
        let z2 = vec![Betti::Known(1), Betti::Known(1), Betti::Known(1)];
        let betti = BettiTable::new(2, z, z2, true, true).unwrap();
        let report = validate(&ManifoldDescriptor::new(betti));
        assert!(!report.is_empty());
        assert!(report.violations()[0].contains("Euler characteristic differs"));
    }

    #[test]
    fn odd_euler_in_even_dimension_is_flagged() {
        let entries: Vec<Betti> = [1i64, 0, 1, 1, 1, 0, 1]
            .iter()
            .copied()
            .map(Betti::Known)
            .collect();
        let betti = BettiTable::new(6, entries.clone(), entries, true, true).unwrap();
        let report = validate(&ManifoldDescriptor::new(betti));
        assert!(report
            .violations()
            .iter()
            .any(|v| v.contains("even Euler characteristic")));
    }

    #[test]
    fn duality_violation_is_flagged() {
        let z: Vec<Betti> = [1i64, 0, 0, 0, 0, 1].iter().copied().map(Betti::Known).collect();
        let z2: Vec<Betti> = [1i64, 2, 0, 0, 0, 1].iter().copied().map(Betti::Known).collect();
        let betti = BettiTable::new(5, z, z2, true, true).unwrap();
        let report = validate(&ManifoldDescriptor::new(betti));
        assert!(report
            .violations()
            .iter()
            .any(|v| v.contains("Poincare duality")));
    }

    #[test]
    fn w2_implication_is_checked() {
        let mut m = sphere_descriptor(6);
        m.bockstein_w2_zero = false;
        let report = validate(&m);
        assert!(report
            .violations()
            .iter()
            .any(|v| v.contains("bockstein_w2_zero")));
    }

    #[test]
    fn simply_connected_contradicts_nontrivial_pi1() {
        let mut m = sphere_descriptor(6);
        m.pi1 = Some("<a | a^5>".parse().unwrap());
        let report = validate(&m);
        assert!(report
            .violations()
            .iter()
            .any(|v| v.contains("simply_connected contradicts")));
    }

    #[test]
    fn c_top_consistency() {
        let mut m = six_manifold(&[1, 0, 0, 2, 0, 0, 1]);
        m.char_data.c_top_pairing = Some(2);
        let report = validate(&m);
        assert!(report.violations().iter().any(|v| v.contains("c_top")));
        m.char_data.c_top_pairing = Some(0);
        assert!(validate(&m).is_empty());
    }
}
