//! Obstruction-group tables: the Kervaire groups `K_n`, the stable homotopy
//! of the space of linear complex structures via Bott periodicity, and the
//! two-obstruction ladder for 6-manifolds.
//!
//! The tables are closed-form functions, not data files; the mod-8 rule is
//! total and exact.

use thiserror::Error;

use crate::descriptor::ManifoldDescriptor;

/// A coefficient group as it appears in the tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupValue {
    Zero,
    Z,
    Z2,
    OutOfStableRange,
}

impl std::fmt::Display for GroupValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupValue::Zero => write!(f, "0"),
            GroupValue::Z => write!(f, "Z"),
            GroupValue::Z2 => write!(f, "Z/2"),
            GroupValue::OutOfStableRange => write!(f, "out-of-stable-range"),
        }
    }
}

/// The obstruction group `K_n` for trivializing the tangent bundle of a
/// stably parallelizable `n`-manifold: zero in dimensions 1, 3, 7, `Z/2` in
/// the remaining odd dimensions, `Z` in even dimensions.
pub fn kervaire_group(n: usize) -> GroupValue {
    assert!(n >= 1, "kervaire_group requires n >= 1");
    match n {
        1 | 3 | 7 => GroupValue::Zero,
        _ if n % 2 == 1 => GroupValue::Z2,
        _ => GroupValue::Z,
    }
}

/// `pi_k` of the space of positive linear complex structures on `R^(2n)`,
/// in the stable range `k <= 2n - 2`, by Bott periodicity:
/// `{1,3,4,5} -> 0`, `{2,6} -> Z`, `{0,7} -> Z/2` (mod 8).
pub fn gamma_homotopy(k: usize, n: usize) -> GroupValue {
    assert!(n >= 1, "gamma_homotopy requires n >= 1");
    if k > 2 * n - 2 {
        return GroupValue::OutOfStableRange;
    }
    match k % 8 {
        1 | 3 | 4 | 5 => GroupValue::Zero,
        2 | 6 => GroupValue::Z,
        0 | 7 => GroupValue::Z2,
        _ => unreachable!(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObstructionStatus {
    Vanishes,
    NonzeroOrUnknown,
}

/// One obstruction with the hypothesis flags that settled it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionCheck {
    pub status: ObstructionStatus,
    pub reason: String,
}

/// The degree-2 and degree-6 obstructions to contracting the structure map
/// of a 6-manifold, plus the automatic extension over the skeleta between.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionReport6D {
    pub omega2: ObstructionCheck,
    pub omega6: ObstructionCheck,
    pub intermediate: String,
}

impl ObstructionReport6D {
    pub fn both_vanish(&self) -> bool {
        self.omega2.status == ObstructionStatus::Vanishes
            && self.omega6.status == ObstructionStatus::Vanishes
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ObstructionError {
    #[error("obstruction ladder requires dimension 6, got {0}")]
    WrongDimension(usize),
}

/// Evaluate the two obstructions for a 6-manifold descriptor. The degree-2
/// obstruction is half of `c_1`, so it vanishes exactly when `c_1 = 0` and
/// the homology is torsion-free; the degree-6 obstruction is identified with
/// the Euler characteristic.
pub fn obstruction_ladder_6d(
    m: &ManifoldDescriptor,
) -> Result<ObstructionReport6D, ObstructionError> {
    if m.dim() != 6 {
        return Err(ObstructionError::WrongDimension(m.dim()));
    }
    let omega2 = if m.char_data.c1_zero && m.torsion_free_homology {
        ObstructionCheck {
            status: ObstructionStatus::Vanishes,
            reason: "c1_zero and torsion_free: twice the obstruction is c_1 = 0 \
                     in torsion-free H^2"
                .to_string(),
        }
    } else {
        let mut failing = Vec::new();
        if !m.char_data.c1_zero {
            failing.push("c1_zero");
        }
        if !m.torsion_free_homology {
            failing.push("torsion_free");
        }
        ObstructionCheck {
            status: ObstructionStatus::NonzeroOrUnknown,
            reason: format!("hypothesis flags not set: {}", failing.join(", ")),
        }
    };
    let omega6 = match m.chi() {
        Some(0) => ObstructionCheck {
            status: ObstructionStatus::Vanishes,
            reason: "Euler characteristic is zero".to_string(),
        },
        Some(chi) => ObstructionCheck {
            status: ObstructionStatus::NonzeroOrUnknown,
            reason: format!("Euler characteristic is {chi}"),
        },
        None => ObstructionCheck {
            status: ObstructionStatus::NonzeroOrUnknown,
            reason: "Euler characteristic undetermined".to_string(),
        },
    };
    let pis: Vec<String> = (3..=5)
        .map(|k| format!("pi_{k} = {}", gamma_homotopy(k, 4)))
        .collect();
    Ok(ObstructionReport6D {
        omega2,
        omega6,
        intermediate: format!("skeleta 3..5 extend automatically: {}", pis.join(", ")),
    })
}
