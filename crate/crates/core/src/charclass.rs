//! Characteristic-class data and the criteria that consume it: the Lai index
//! formula, Wall's embedding criterion for 6-manifolds, and the
//! almost-complex-existence criterion.
//!
//! Classes are represented by vanishing flags plus optional pairing integers
//! against the fundamental class, never as cochains; every formula consumed
//! here needs only the pairings.

use thiserror::Error;

use crate::decide::{CriterionStep, Decision};
use crate::descriptor::ManifoldDescriptor;

/// Characteristic-class record of a descriptor.
///
/// `c_top_pairing` is the evaluation of the top Chern class of a declared
/// almost-complex structure against the fundamental class; for genuine data
/// it equals the Euler characteristic. `p1_pairings` are the evaluations of
/// `p_1` cup a declared basis of degree-2 cohomology.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CharClassData {
    pub c1_zero: bool,
    pub p1_zero: bool,
    pub c_top_pairing: Option<i64>,
    pub p1_pairings: Option<Vec<i64>>,
}

/// The pairing vector consumed by the Lai index formula: entry `k` is the
/// evaluation of the k-th power of the normal Euler class cup the
/// `(n-k)`-th Chern class of the ambient restriction, `k = 0..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaiPairingData {
    n: usize,
    pairings: Vec<i64>,
}

impl LaiPairingData {
    pub fn new(n: usize, pairings: Vec<i64>) -> Result<Self, CharClassError> {
        if pairings.len() != n + 1 {
            return Err(CharClassError::PairingLength {
                expected: n + 1,
                got: pairings.len(),
            });
        }
        Ok(LaiPairingData { n, pairings })
    }

    pub fn trivial(n: usize) -> Self {
        LaiPairingData {
            n,
            pairings: vec![0; n + 1],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairings(&self) -> &[i64] {
        &self.pairings
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CharClassError {
    #[error("Lai numerator has odd parity; the pairing data is inconsistent")]
    ParityError,
    #[error("pairing vector needs {expected} entries, got {got}")]
    PairingLength { expected: usize, got: usize },
    #[error("integer overflow in exact computation")]
    Overflow,
    #[error("criterion requires dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("criterion hypothesis fails: {0}")]
    HypothesisFailure(String),
}

/// The signed counts of complex points of a generic codimension-two
/// embedding, from the index formula
/// `2 I_pm = chi + sum_k (+-1)^(k+1) pairings[k]`.
///
/// Both divisions must be exact; an odd numerator means the input data is
/// not geometric.
pub fn lai_indices(chi: i64, d: &LaiPairingData) -> Result<(i64, i64), CharClassError> {
    let mut plus = i128::from(chi);
    let mut minus = i128::from(chi);
    for (k, &p) in d.pairings.iter().enumerate() {
        let p = i128::from(p);
        // (+1)^(k+1) is always +1; (-1)^(k+1) alternates starting at -1.
        plus += p;
        if k % 2 == 0 {
            minus -= p;
        } else {
            minus += p;
        }
    }
    if plus.rem_euclid(2) != 0 {
        return Err(CharClassError::ParityError);
    }
    debug_assert_eq!(minus.rem_euclid(2), 0);
    let i_plus = i64::try_from(plus / 2).map_err(|_| CharClassError::Overflow)?;
    let i_minus = i64::try_from(minus / 2).map_err(|_| CharClassError::Overflow)?;
    Ok((i_plus, i_minus))
}

/// Whether both Lai indices vanish: the hypothesis under which a generic
/// embedding is regularly isotopic to a CR regular one.
pub fn cr_precondition(chi: i64, d: &LaiPairingData) -> Result<bool, CharClassError> {
    lai_indices(chi, d).map(|(p, m)| p == 0 && m == 0)
}

/// Wall's criterion: a closed simply connected spin 6-manifold with
/// torsion-free homology embeds in `R^8` exactly when `p_1 = 0`.
///
/// `Indeterminate` when the side hypotheses are not certified.
pub fn wall_embeds_in_r8(m: &ManifoldDescriptor) -> Result<Decision, CharClassError> {
    if m.dim() != 6 {
        return Err(CharClassError::WrongDimension {
            expected: 6,
            got: m.dim(),
        });
    }
    let mut failing = Vec::new();
    if !m.simply_connected {
        failing.push("simply_connected");
    }
    if !m.torsion_free_homology {
        failing.push("torsion_free");
    }
    if !m.w2_zero {
        failing.push("w2_zero");
    }
    if !failing.is_empty() {
        let step = CriterionStep::new(
            "wall-hypotheses",
            "Wall embedding criterion, side hypotheses",
            format!("missing flags: {}", failing.join(", ")),
            "criterion inapplicable",
        );
        return Ok(Decision::indeterminate(
            vec![step],
            failing.iter().map(|s| s.to_string()).collect(),
        ));
    }
    let hypotheses = CriterionStep::new(
        "wall-hypotheses",
        "Wall embedding criterion, side hypotheses",
        "simply_connected, torsion_free, w2_zero all certified".to_string(),
        "criterion applies",
    );
    if m.char_data.p1_zero {
        let step = CriterionStep::new(
            "wall-p1",
            "Wall embedding criterion",
            "p1_zero=true".to_string(),
            "embeds in R^8",
        );
        Ok(Decision::yes(vec![hypotheses, step]))
    } else {
        let step = CriterionStep::new(
            "wall-p1",
            "Wall embedding criterion",
            "p1_zero=false".to_string(),
            "does not embed in R^8",
        );
        Ok(Decision::no(vec![hypotheses, step]))
    }
}

/// Existence of an almost-complex structure on a closed orientable
/// 6-manifold with torsion-free homology: the mod-2 class `w_2` must admit
/// an integral lift, i.e. its Bockstein image vanishes.
pub fn admits_ac_structure_6d(m: &ManifoldDescriptor) -> Result<Decision, CharClassError> {
    if m.dim() != 6 {
        return Err(CharClassError::WrongDimension {
            expected: 6,
            got: m.dim(),
        });
    }
    if !m.betti.orientable() {
        return Err(CharClassError::HypothesisFailure(
            "criterion requires an orientable manifold".into(),
        ));
    }
    if !m.torsion_free_homology {
        return Err(CharClassError::HypothesisFailure(
            "criterion requires torsion-free homology".into(),
        ));
    }
    if m.bockstein_w2_zero {
        let step = CriterionStep::new(
            "bockstein-w2",
            "integral lift of w_2 (Bockstein vanishing)",
            format!(
                "bockstein_w2_zero=true (w2_zero={})",
                m.w2_zero
            ),
            "admits an almost-complex structure",
        );
        Ok(Decision::yes(vec![step]))
    } else {
        let step = CriterionStep::new(
            "bockstein-w2",
            "integral lift of w_2 (Bockstein vanishing)",
            "bockstein_w2_zero=false".to_string(),
            "no almost-complex structure",
        );
        Ok(Decision::no(vec![step]))
    }
}
