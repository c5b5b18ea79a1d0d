//! Certified verdicts: every decision is `Yes`, `No`, or `Indeterminate`,
//! together with the ordered chain of criteria that justified it and, when
//! indeterminate, the list of data whose absence blocked the answer.
//!
//! `Indeterminate` is a first-class outcome: the criteria are biconditionals
//! only under hypotheses the descriptor may not certify, and the engine never
//! guesses. Certificates cite the classical criteria by name so a reader can
//! audit a verdict line by line.

use std::fmt;

use thiserror::Error;

use crate::charclass::{wall_embeds_in_r8, CharClassError};
use crate::descriptor::{
    validate, EmbeddingData, EmbeddingEvidence, ManifoldDescriptor, ValidationReport,
};
use crate::homology::{semi_characteristic, Betti};
use crate::obstruction::{obstruction_ladder_6d, ObstructionError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Yes => write!(f, "YES"),
            Verdict::No => write!(f, "NO"),
            Verdict::Indeterminate => write!(f, "INDETERMINATE"),
        }
    }
}

/// One certificate entry: which criterion ran, on what inputs, with what
/// outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionStep {
    pub id: &'static str,
    pub citation: &'static str,
    pub inputs: String,
    pub outcome: String,
}

impl CriterionStep {
    pub fn new(
        id: &'static str,
        citation: &'static str,
        inputs: impl Into<String>,
        outcome: impl Into<String>,
    ) -> Self {
        CriterionStep {
            id,
            citation,
            inputs: inputs.into(),
            outcome: outcome.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    pub certificate: Vec<CriterionStep>,
    pub missing: Vec<String>,
}

impl Decision {
    pub fn yes(certificate: Vec<CriterionStep>) -> Self {
        assert!(!certificate.is_empty(), "a Yes needs a decisive certificate");
        Decision {
            verdict: Verdict::Yes,
            certificate,
            missing: Vec::new(),
        }
    }

    pub fn no(certificate: Vec<CriterionStep>) -> Self {
        assert!(!certificate.is_empty(), "a No needs a decisive certificate");
        Decision {
            verdict: Verdict::No,
            certificate,
            missing: Vec::new(),
        }
    }

    pub fn indeterminate(certificate: Vec<CriterionStep>, missing: Vec<String>) -> Self {
        assert!(
            !missing.is_empty(),
            "an Indeterminate must name the missing data"
        );
        Decision {
            verdict: Verdict::Indeterminate,
            certificate,
            missing,
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "VERDICT: {}", self.verdict)?;
        for (i, step) in self.certificate.iter().enumerate() {
            writeln!(
                f,
                "  {}. [{}] {}; {} => {}",
                i + 1,
                step.id,
                step.citation,
                step.inputs,
                step.outcome
            )?;
        }
        for item in &self.missing {
            writeln!(f, "  missing: {item}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum DecisionError {
    #[error("descriptor failed validation:\n{0}")]
    ValidationFailure(ValidationReport),
    #[error("decision requires a closed manifold")]
    NotClosed,
    #[error("decision requires even dimension, got {0}")]
    OddDimension(usize),
    #[error(transparent)]
    CharClass(#[from] CharClassError),
    #[error(transparent)]
    Obstruction(#[from] ObstructionError),
}

fn checked(m: &ManifoldDescriptor) -> Result<(), DecisionError> {
    let report = validate(m);
    if !report.is_empty() {
        return Err(DecisionError::ValidationFailure(report));
    }
    if !m.betti.closed() {
        return Err(DecisionError::NotClosed);
    }
    Ok(())
}

/// Is the tangent bundle trivial?
///
/// Stable parallelizability must be certified; then dimensions 1, 3, 7 are
/// unconditional, other odd dimensions are decided by the vanishing of the
/// semi-characteristic, and even dimensions by the vanishing of the Euler
/// characteristic.
pub fn decide_parallelizable(m: &ManifoldDescriptor) -> Result<Decision, DecisionError> {
    checked(m)?;
    let mut cert = Vec::new();
    if !m.stably_parallelizable {
        cert.push(CriterionStep::new(
            "stable-parallelizability",
            "certified-flag check",
            "stably_parallelizable=false",
            "not certified stably parallelizable",
        ));
        return Ok(Decision::no(cert));
    }
    cert.push(CriterionStep::new(
        "stable-parallelizability",
        "certified-flag check",
        "stably_parallelizable=true",
        "holds",
    ));
    let d = m.dim();
    if matches!(d, 1 | 3 | 7) {
        cert.push(CriterionStep::new(
            "kervaire-exceptional-dims",
            "Kervaire obstruction group K_n",
            format!("dim={d}"),
            "obstruction group vanishes; parallelizable",
        ));
        return Ok(Decision::yes(cert));
    }
    if d % 2 == 1 {
        match semi_characteristic(&m.betti) {
            Ok(Betti::Known(0)) => {
                cert.push(CriterionStep::new(
                    "kervaire-semi-characteristic",
                    "Kervaire criterion, odd dimension",
                    "semi_chi=0",
                    "parallelizable",
                ));
                Ok(Decision::yes(cert))
            }
            Ok(Betti::Known(_)) => {
                cert.push(CriterionStep::new(
                    "kervaire-semi-characteristic",
                    "Kervaire criterion, odd dimension",
                    "semi_chi=1",
                    "not parallelizable",
                ));
                Ok(Decision::no(cert))
            }
            _ => {
                let k = d / 2;
                let missing: Vec<String> = (0..=k)
                    .filter(|&i| !m.betti.z2()[i].is_known())
                    .map(|i| format!("betti_z2[{i}]"))
                    .collect();
                cert.push(CriterionStep::new(
                    "kervaire-semi-characteristic",
                    "Kervaire criterion, odd dimension",
                    "semi_chi=?",
                    "undetermined",
                ));
                Ok(Decision::indeterminate(cert, missing))
            }
        }
    } else {
        match m.chi_with_source() {
            Some((0, src)) => {
                cert.push(CriterionStep::new(
                    "kervaire-euler",
                    "Kervaire criterion, even dimension",
                    format!("chi=0 (from {src})"),
                    "parallelizable",
                ));
                Ok(Decision::yes(cert))
            }
            Some((chi, src)) => {
                cert.push(CriterionStep::new(
                    "kervaire-euler",
                    "Kervaire criterion, even dimension",
                    format!("chi={chi} (from {src})"),
                    "not parallelizable",
                ));
                Ok(Decision::no(cert))
            }
            None => {
                let missing: Vec<String> = m
                    .betti
                    .z()
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| !e.is_known())
                    .map(|(i, _)| format!("betti_z[{i}]"))
                    .chain(std::iter::once("c_top_pairing".to_string()))
                    .collect();
                cert.push(CriterionStep::new(
                    "kervaire-euler",
                    "Kervaire criterion, even dimension",
                    "chi=?",
                    "undetermined",
                ));
                Ok(Decision::indeterminate(cert, missing))
            }
        }
    }
}

/// Evidence that the manifold embeds in codimension at most two. For
/// dimension 6, Wall's criterion derives the evidence when its hypotheses
/// hold and none was supplied.
fn codim2_evidence(
    m: &ManifoldDescriptor,
) -> Result<(Option<EmbeddingData>, Vec<CriterionStep>), DecisionError> {
    if let Some(e) = m.embeds {
        if e.codim <= 2 {
            let step = CriterionStep::new(
                "codim2-embedding-evidence",
                "descriptor embedding record",
                format!("embeds_codim={} ({})", e.codim, e.evidence),
                "codimension-2 embedding available",
            );
            return Ok((Some(e), vec![step]));
        }
    }
    if m.dim() == 6 {
        let wall = wall_embeds_in_r8(m)?;
        if wall.verdict == Verdict::Yes {
            let mut steps = wall.certificate;
            steps.push(CriterionStep::new(
                "codim2-embedding-evidence",
                "derived from Wall embedding criterion",
                "embeds_codim=2 (by_wall)",
                "codimension-2 embedding available",
            ));
            return Ok((
                Some(EmbeddingData {
                    codim: 2,
                    evidence: EmbeddingEvidence::ByWall,
                }),
                steps,
            ));
        }
    }
    Ok((None, Vec::new()))
}

/// Does a pseudo-holomorphic embedding into almost-complex Euclidean space of
/// codimension two exist?
pub fn decide_ph_embedding(m: &ManifoldDescriptor) -> Result<Decision, DecisionError> {
    decide_codim2_embedding(m, EmbeddingFlavor::PseudoHolomorphic)
}

/// Does a CR regular embedding into complex `(n+1)`-space exist?
pub fn decide_cr_embedding(m: &ManifoldDescriptor) -> Result<Decision, DecisionError> {
    decide_codim2_embedding(m, EmbeddingFlavor::CrRegular)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum EmbeddingFlavor {
    PseudoHolomorphic,
    CrRegular,
}

fn decide_codim2_embedding(
    m: &ManifoldDescriptor,
    flavor: EmbeddingFlavor,
) -> Result<Decision, DecisionError> {
    if m.dim() % 2 == 1 {
        return Err(DecisionError::OddDimension(m.dim()));
    }
    let par = decide_parallelizable(m)?;
    let forward = match flavor {
        EmbeddingFlavor::PseudoHolomorphic => CriterionStep::new(
            "ph-forces-parallelizable",
            "pseudo-holomorphic codimension-2 embedding trivializes the tangent bundle",
            "normal bundle is a trivial complex line bundle; top Chern class vanishes",
            "not parallelizable, so no pseudo-holomorphic embedding",
        ),
        EmbeddingFlavor::CrRegular => CriterionStep::new(
            "cr-forces-parallelizable",
            "CR regular embedding forces vanishing Lai indices, hence chi = 0",
            "Lai indices of a CR regular embedding vanish",
            "not parallelizable, so no CR regular embedding",
        ),
    };
    match par.verdict {
        Verdict::No => {
            let mut cert = par.certificate;
            cert.push(forward);
            Ok(Decision::no(cert))
        }
        Verdict::Indeterminate => {
            Ok(Decision::indeterminate(par.certificate, par.missing))
        }
        Verdict::Yes => {
            let (evidence, evidence_steps) = codim2_evidence(m)?;
            match evidence {
                Some(_) => {
                    let mut cert = par.certificate;
                    cert.extend(evidence_steps);
                    match flavor {
                        EmbeddingFlavor::PseudoHolomorphic => {
                            cert.push(CriterionStep::new(
                                "ph-embedding",
                                "parallelizable + codimension-2 embedding => pseudo-holomorphic \
                                 embedding for suitable structures",
                                "trivial tangent frame extends over Euclidean space",
                                "pseudo-holomorphic embedding exists",
                            ));
                        }
                        EmbeddingFlavor::CrRegular => {
                            cert.push(CriterionStep::new(
                                "lai-vanishing",
                                "Lai index formula on trivial tangent and normal data",
                                "all pairings vanish, chi = 0",
                                "I+ = I- = 0",
                            ));
                            cert.push(CriterionStep::new(
                                "slapar-isotopy",
                                "Slapar cancellation: vanishing indices allow removing all \
                                 complex points by a regular isotopy",
                                "I+ = I- = 0",
                                "CR regular embedding exists",
                            ));
                        }
                    }
                    Ok(Decision::yes(cert))
                }
                None => {
                    let mut missing = vec!["codimension-2 embedding evidence".to_string()];
                    if m.dim() == 6 {
                        missing.push("Wall hypotheses or p1_zero".to_string());
                    }
                    Ok(Decision::indeterminate(par.certificate, missing))
                }
            }
        }
    }
}

/// The sharpened dimension-6 criterion: under the hypotheses
/// (simply connected, torsion-free, spin, `c_1 = 0`), a pseudo-holomorphic
/// embedding into `R^8` exists exactly when the top Chern pairing (= the
/// Euler characteristic) and `p_1` vanish.
pub fn decide_ph_6d(m: &ManifoldDescriptor) -> Result<Decision, DecisionError> {
    checked(m)?;
    if m.dim() != 6 {
        return Err(DecisionError::CharClass(CharClassError::WrongDimension {
            expected: 6,
            got: m.dim(),
        }));
    }
    let mut failing = Vec::new();
    for (flag, name) in [
        (m.simply_connected, "simply_connected"),
        (m.torsion_free_homology, "torsion_free"),
        (m.w2_zero, "w2_zero"),
        (m.char_data.c1_zero, "c1_zero"),
    ] {
        if !flag {
            failing.push(name.to_string());
        }
    }
    if !failing.is_empty() {
        let step = CriterionStep::new(
            "6d-hypotheses",
            "dimension-6 criterion hypotheses",
            format!("missing flags: {}", failing.join(", ")),
            "criterion inapplicable",
        );
        return Ok(Decision::indeterminate(vec![step], failing));
    }
    let mut cert = vec![CriterionStep::new(
        "6d-hypotheses",
        "dimension-6 criterion hypotheses",
        "simply_connected, torsion_free, w2_zero, c1_zero all certified",
        "criterion applies",
    )];
    let wall = wall_embeds_in_r8(m)?;
    cert.push(CriterionStep::new(
        "wall-embedding",
        "Wall embedding criterion sub-result",
        format!("p1_zero={}", m.char_data.p1_zero),
        format!("{}", wall.verdict),
    ));
    let ladder = obstruction_ladder_6d(m)?;
    cert.push(CriterionStep::new(
        "obstruction-ladder",
        "degree-2 and degree-6 obstruction sub-result",
        format!(
            "omega2: {}; omega6: {}",
            ladder.omega2.reason, ladder.omega6.reason
        ),
        if ladder.both_vanish() {
            "both obstructions vanish".to_string()
        } else {
            "an obstruction is nonzero or unknown".to_string()
        },
    ));
    let chi = match m.char_data.c_top_pairing {
        Some(c) => Some(c),
        None => m.chi(),
    };
    match chi {
        None => {
            cert.push(CriterionStep::new(
                "chern-euler-pairing",
                "top Chern class pairing equals the Euler characteristic",
                "c_top=? and chi=?",
                "undetermined",
            ));
            Ok(Decision::indeterminate(
                cert,
                vec!["c_top_pairing or a fully known betti_z".to_string()],
            ))
        }
        Some(c) => {
            let p1 = m.char_data.p1_zero;
            cert.push(CriterionStep::new(
                "chern-euler-pairing",
                "top Chern class pairing equals the Euler characteristic",
                format!("c_3 pairing = {c}, p1_zero={p1}"),
                if c == 0 && p1 {
                    "c_3 = 0 = p_1: embedding exists".to_string()
                } else {
                    "nonzero c_3 or p_1: no embedding".to_string()
                },
            ));
            if c == 0 && p1 {
                Ok(Decision::yes(cert))
            } else {
                Ok(Decision::no(cert))
            }
        }
    }
}

/// Both codimension-two embedding decisions side by side; they must agree.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub ph: Decision,
    pub cr: Decision,
}

impl EquivalenceReport {
    pub fn agrees(&self) -> bool {
        self.ph.verdict == self.cr.verdict
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pseudo-holomorphic: {}", self.ph)?;
        writeln!(f, "cr-regular: {}", self.cr)?;
        writeln!(
            f,
            "equivalence: {}",
            if self.agrees() { "verdicts agree" } else { "MISMATCH" }
        )
    }
}

/// Run both embedding decisions and report them together.
pub fn check_equivalence(m: &ManifoldDescriptor) -> Result<EquivalenceReport, DecisionError> {
    Ok(EquivalenceReport {
        ph: decide_ph_embedding(m)?,
        cr: decide_cr_embedding(m)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::tests::{six_manifold, sphere_descriptor};
    use crate::descriptor::EmbeddingEvidence;
    use crate::homology::{kunneth_product, BettiTable};

    fn torus(dim: usize) -> ManifoldDescriptor {
        let circle = BettiTable::sphere(1);
        let t = (1..dim).fold(circle.clone(), |acc, _| {
            kunneth_product(&acc, &circle).unwrap()
        });
        let mut m = ManifoldDescriptor::new(t);
        m.torsion_free_homology = true;
        m.stably_parallelizable = true;
        m.w2_zero = true;
        m.bockstein_w2_zero = true;
        m.char_data.p1_zero = true;
        m
    }

    #[test]
    fn sphere_six_is_not_parallelizable() {
        let d = decide_parallelizable(&sphere_descriptor(6)).unwrap();
        assert_eq!(d.verdict, Verdict::No);
        assert!(d.certificate.last().unwrap().inputs.contains("chi=2"));
    }

    #[test]
    fn torus_six_is_parallelizable() {
        let d = decide_parallelizable(&torus(6)).unwrap();
        assert_eq!(d.verdict, Verdict::Yes);
    }

    #[test]
    fn sphere_seven_is_parallelizable() {
        let d = decide_parallelizable(&sphere_descriptor(7)).unwrap();
        assert_eq!(d.verdict, Verdict::Yes);
        assert_eq!(d.certificate.last().unwrap().id, "kervaire-exceptional-dims");
    }

    #[test]
    fn sphere_five_fails_semi_characteristic() {
        // semi_chi(S^5) = 1.
        let d = decide_parallelizable(&sphere_descriptor(5)).unwrap();
        assert_eq!(d.verdict, Verdict::No);
    }

    #[test]
    fn unknown_middle_entries_give_indeterminate() {
        let mut m = sphere_descriptor(5);
        m.betti = m.betti.with_entry_z2(2, crate::homology::Betti::Unknown);
        let d = decide_parallelizable(&m).unwrap();
        assert_eq!(d.verdict, Verdict::Indeterminate);
        assert_eq!(d.missing, vec!["betti_z2[2]".to_string()]);
    }

    #[test]
    fn not_stably_parallelizable_is_no() {
        let mut m = torus(6);
        m.stably_parallelizable = false;
        let d = decide_parallelizable(&m).unwrap();
        assert_eq!(d.verdict, Verdict::No);
        assert_eq!(d.certificate.len(), 1);
    }

    #[test]
    fn validation_failure_is_an_error() {
        let mut m = sphere_descriptor(6);
        m.bockstein_w2_zero = false;
        assert!(matches!(
            decide_parallelizable(&m),
            Err(DecisionError::ValidationFailure(_))
        ));
    }

    #[test]
    fn ph_embedding_needs_evidence() {
        let mut m = torus(6);
        m.simply_connected = false;
        // Parallelizable but no embedding evidence and Wall inapplicable.
        let d = decide_ph_embedding(&m).unwrap();
        assert_eq!(d.verdict, Verdict::Indeterminate);

        m.embeds = Some(EmbeddingData {
            codim: 1,
            evidence: EmbeddingEvidence::Asserted,
        });
        let d = decide_ph_embedding(&m).unwrap();
        assert_eq!(d.verdict, Verdict::Yes);
    }

    #[test]
    fn ph_embedding_no_for_spheres() {
        let d = decide_ph_embedding(&sphere_descriptor(6)).unwrap();
        assert_eq!(d.verdict, Verdict::No);
    }

    #[test]
    fn odd_dimension_is_rejected() {
        assert!(matches!(
            decide_ph_embedding(&sphere_descriptor(5)),
            Err(DecisionError::OddDimension(5))
        ));
    }

    #[test]
    fn six_dim_evidence_is_auto_derived_via_wall() {
        // S^3 x S^3: all hypotheses hold, chi = 0, p1 = 0; Wall supplies the
        // embedding, so both decisions answer Yes without explicit evidence.
        let m = six_manifold(&[1, 0, 0, 2, 0, 0, 1]);
        let d = decide_ph_embedding(&m).unwrap();
        assert_eq!(d.verdict, Verdict::Yes);
        let d = decide_cr_embedding(&m).unwrap();
        assert_eq!(d.verdict, Verdict::Yes);
        assert!(d.certificate.iter().any(|s| s.id == "slapar-isotopy"));
    }

    #[test]
    fn ph_6d_suite() {
        let yes = six_manifold(&[1, 0, 0, 2, 0, 0, 1]);
        assert_eq!(decide_ph_6d(&yes).unwrap().verdict, Verdict::Yes);

        // S^2 x S^4 has chi = 4.
        let no = six_manifold(&[1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(decide_ph_6d(&no).unwrap().verdict, Verdict::No);

        let mut p1_flip = six_manifold(&[1, 0, 0, 2, 0, 0, 1]);
        p1_flip.char_data.p1_zero = false;
        assert_eq!(decide_ph_6d(&p1_flip).unwrap().verdict, Verdict::No);

        let mut inapplicable = six_manifold(&[1, 0, 0, 2, 0, 0, 1]);
        inapplicable.char_data.c1_zero = false;
        let d = decide_ph_6d(&inapplicable).unwrap();
        assert_eq!(d.verdict, Verdict::Indeterminate);
        assert_eq!(d.missing, vec!["c1_zero".to_string()]);
    }

    #[test]
    fn ph_6d_yes_implies_wall_and_ladder() {
        let yes = six_manifold(&[1, 0, 0, 2, 0, 0, 1]);
        assert_eq!(decide_ph_6d(&yes).unwrap().verdict, Verdict::Yes);
        assert_eq!(wall_embeds_in_r8(&yes).unwrap().verdict, Verdict::Yes);
        assert!(obstruction_ladder_6d(&yes).unwrap().both_vanish());
    }

    #[test]
    fn equivalence_on_basic_inputs() {
        for m in [
            sphere_descriptor(6),
            torus(6),
            six_manifold(&[1, 0, 0, 2, 0, 0, 1]),
            six_manifold(&[1, 0, 1, 0, 1, 0, 1]),
        ] {
            let report = check_equivalence(&m).unwrap();
            assert!(report.agrees(), "mismatch on {m:?}");
        }
    }

    #[test]
    fn decisions_are_deterministic() {
        let m = six_manifold(&[1, 0, 0, 2, 0, 0, 1]);
        let a = decide_ph_6d(&m).unwrap();
        let b = decide_ph_6d(&m).unwrap();
        assert_eq!(a, b);
        assert_eq!(format!("{a}"), format!("{b}"));
    }

    #[test]
    fn yes_implies_stably_parallelizable_flag() {
        for m in [torus(6), torus(8), sphere_descriptor(7)] {
            let d = decide_parallelizable(&m).unwrap();
            if d.verdict == Verdict::Yes {
                assert!(m.stably_parallelizable);
            }
        }
    }
}
