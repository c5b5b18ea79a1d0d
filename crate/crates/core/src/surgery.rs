//! The construction pipeline: realize a free group as a connected sum of
//! `S^1 x S^(n-2)` blocks, kill the relators by surgery on embedded loops,
//! raise the dimension by a circle-spin, and kill the Euler characteristic
//! with an `S^3 x S^(n-3)` summand. Each step logs its Euler bookkeeping.
//!
//! Homology through surgery is tracked conservatively: only the Euler
//! characteristic (by gluing arithmetic), first homology (by Smith normal
//! form of the relator matrix), and the untouched middle degrees are exact.
//! Degrees a surgery can change are marked `Unknown` — the construction never
//! reports a rank it does not determine.

use std::fmt;

use thiserror::Error;

use crate::descriptor::{EmbeddingData, EmbeddingEvidence, ManifoldDescriptor};
use crate::groups::{abelianization, GroupPresentation, PresentationError};
use crate::homology::{
    connected_sum, euler_characteristic, euler_of_gluing, kunneth_product, semi_characteristic,
    Betti, BettiTable, HomologyError,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurgeryError {
    #[error("dimension {dim} too small; need at least {min}")]
    DimensionTooSmall { dim: usize, min: usize },
    #[error("construction dimension must be even, got {0}")]
    OddDimension(usize),
    #[error("presentation has {got} generators but the stage was built for {expected}")]
    GeneratorCountMismatch { expected: usize, got: usize },
    #[error("expression is not a generator stage (connected sum of S^1 x S^(n-2) blocks)")]
    NotGeneratorStage,
    #[error("inconsistent expression: {0}")]
    InvalidExpression(String),
    #[error("descriptor is missing its fundamental-group record")]
    MissingPresentation,
    #[error("semi-characteristic undetermined; missing: {}", .0.join(", "))]
    IndeterminateSemiCharacteristic(Vec<String>),
    #[error("Euler characteristic undetermined; missing: {}", .0.join(", "))]
    IndeterminateEuler(Vec<String>),
    #[error("input violates construction preconditions: {0}")]
    InvalidInput(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

/// Expression tree over sphere products: the exact source of the invariants
/// the pipeline tracks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SphereProductExpression {
    Sphere(usize),
    Product(Box<SphereProductExpression>, Box<SphereProductExpression>),
    ConnectedSum(Vec<SphereProductExpression>),
    SurgerRelators {
        base: Box<SphereProductExpression>,
        presentation: GroupPresentation,
        ambient_dim: usize,
    },
    Spin(Box<SphereProductExpression>),
}

use SphereProductExpression as Expr;

impl SphereProductExpression {
    /// Dimension of the manifold the expression denotes, checking the
    /// consistency conditions at every node.
    pub fn dim(&self) -> Result<usize, SurgeryError> {
        match self {
            Expr::Sphere(p) => {
                if *p == 0 {
                    Err(SurgeryError::InvalidExpression(
                        "sphere dimension must be positive".into(),
                    ))
                } else {
                    Ok(*p)
                }
            }
            Expr::Product(a, b) => Ok(a.dim()? + b.dim()?),
            Expr::ConnectedSum(parts) => {
                let mut dims = parts.iter().map(|p| p.dim());
                let first = dims
                    .next()
                    .ok_or_else(|| {
                        SurgeryError::InvalidExpression("empty connected sum".into())
                    })??;
                for d in dims {
                    let d = d?;
                    if d != first {
                        return Err(SurgeryError::InvalidExpression(format!(
                            "connected sum mixes dimensions {first} and {d}"
                        )));
                    }
                }
                if first < 2 {
                    return Err(SurgeryError::InvalidExpression(
                        "connected sum requires dimension at least 2".into(),
                    ));
                }
                Ok(first)
            }
            Expr::SurgerRelators {
                base, ambient_dim, ..
            } => {
                let d = base.dim()?;
                if d + 1 != *ambient_dim {
                    return Err(SurgeryError::InvalidExpression(format!(
                        "surgery stage of dimension {d} does not match ambient dimension {ambient_dim}"
                    )));
                }
                if d < 5 {
                    return Err(SurgeryError::InvalidExpression(
                        "relator surgery requires dimension at least 5 \
                         (embedded loops of codimension at least three)"
                            .into(),
                    ));
                }
                Ok(d)
            }
            Expr::Spin(base) => {
                if !matches!(base.as_ref(), Expr::SurgerRelators { .. }) {
                    return Err(SurgeryError::InvalidExpression(
                        "spin applies to a surgered stage".into(),
                    ));
                }
                Ok(base.dim()? + 1)
            }
        }
    }

    /// Euler characteristic by the gluing bookkeeping route; exact for every
    /// node, independent of the Betti evaluation.
    pub fn chi(&self) -> Result<i64, SurgeryError> {
        match self {
            Expr::Sphere(p) => {
                self.dim()?;
                Ok(sphere_chi(*p))
            }
            Expr::Product(a, b) => a
                .chi()?
                .checked_mul(b.chi()?)
                .ok_or(SurgeryError::Homology(HomologyError::Overflow)),
            Expr::ConnectedSum(parts) => {
                let d = self.dim()?;
                let mut total = 0i64;
                for part in parts {
                    total = euler_of_gluing(total, part.chi()?, 0)?;
                }
                let corrections = i64::try_from(parts.len() - 1)
                    .map_err(|_| SurgeryError::Homology(HomologyError::Overflow))?;
                let correction = corrections
                    .checked_mul(sphere_chi(d))
                    .ok_or(SurgeryError::Homology(HomologyError::Overflow))?;
                euler_of_gluing(total, 0, correction).map_err(SurgeryError::Homology)
            }
            Expr::SurgerRelators {
                base,
                presentation,
                ambient_dim,
            } => {
                self.dim()?;
                let mut chi = base.chi()?;
                // Each relator surgery removes S^1 x D^(n-2) (chi 0) and
                // glues D^2 x S^(n-3) along S^1 x S^(n-3) (chi 0).
                let piece = 1 + if (*ambient_dim - 3) % 2 == 0 { 1 } else { -1 };
                for _ in 0..presentation.relator_count() {
                    chi = euler_of_gluing(chi, piece, 0)?;
                }
                Ok(chi)
            }
            Expr::Spin(_) => {
                let d = self.dim()?;
                Ok(sphere_chi(d))
            }
        }
    }

    /// Betti table of the expression. Surgery nodes apply the conservative
    /// unknown-marking policy described at module level.
    pub fn betti_table(&self) -> Result<BettiTable, SurgeryError> {
        self.dim()?;
        match self {
            Expr::Sphere(p) => Ok(BettiTable::sphere(*p)),
            Expr::Product(a, b) => {
                Ok(kunneth_product(&a.betti_table()?, &b.betti_table()?)?)
            }
            Expr::ConnectedSum(parts) => {
                let mut tables = parts.iter().map(|p| p.betti_table());
                let first = tables.next().expect("nonempty checked by dim")?;
                tables.try_fold(first, |acc, t| Ok(connected_sum(&acc, &t?)?))
            }
            Expr::SurgerRelators {
                base, presentation, ..
            } => {
                let base_table = base.betti_table()?;
                let inv = abelianization(presentation)?;
                let free_rank = i64::try_from(inv.free_rank)
                    .map_err(|_| SurgeryError::Homology(HomologyError::Overflow))?;
                Ok(surgered_table(
                    &base_table,
                    free_rank,
                    presentation.relator_count(),
                ))
            }
            Expr::Spin(base) => {
                let base_table = base.betti_table()?;
                let p = base
                    .presentation()
                    .expect("spin base is a surgered stage");
                let inv = abelianization(p)?;
                let free_rank = i64::try_from(inv.free_rank)
                    .map_err(|_| SurgeryError::Homology(HomologyError::Overflow))?;
                let exact = p.generator_count() == 0 && base_table.fully_known();
                spun_table(&base_table, free_rank, exact)
            }
        }
    }

    /// The fundamental-group record carried by surgery nodes.
    pub fn presentation(&self) -> Option<&GroupPresentation> {
        match self {
            Expr::SurgerRelators { presentation, .. } => Some(presentation),
            Expr::Spin(base) => base.presentation(),
            _ => None,
        }
    }

    /// Descriptor of a pure sphere-product expression (no surgery nodes):
    /// such manifolds are stably parallelizable, spin, torsion-free, with
    /// `p_1 = 0`.
    pub fn descriptor(&self) -> Result<ManifoldDescriptor, SurgeryError> {
        if self.has_surgery_node() {
            return Err(SurgeryError::InvalidExpression(
                "descriptor() handles pure sphere-product expressions; use the \
                 pipeline operations for surgery nodes"
                    .into(),
            ));
        }
        let betti = self.betti_table()?;
        let mut m = ManifoldDescriptor::new(betti);
        m.simply_connected = !self.has_circle_leaf();
        m.torsion_free_homology = true;
        m.stably_parallelizable = true;
        m.w2_zero = true;
        m.bockstein_w2_zero = true;
        m.char_data.p1_zero = true;
        Ok(m)
    }

    fn has_surgery_node(&self) -> bool {
        match self {
            Expr::Sphere(_) => false,
            Expr::Product(a, b) => a.has_surgery_node() || b.has_surgery_node(),
            Expr::ConnectedSum(parts) => parts.iter().any(|p| p.has_surgery_node()),
            Expr::SurgerRelators { .. } | Expr::Spin(_) => true,
        }
    }

    fn has_circle_leaf(&self) -> bool {
        match self {
            Expr::Sphere(p) => *p == 1,
            Expr::Product(a, b) => a.has_circle_leaf() || b.has_circle_leaf(),
            Expr::ConnectedSum(parts) => parts.iter().any(|p| p.has_circle_leaf()),
            Expr::SurgerRelators { base, .. } | Expr::Spin(base) => base.has_circle_leaf(),
        }
    }
}

fn sphere_chi(p: usize) -> i64 {
    1 + if p % 2 == 0 { 1 } else { -1 }
}

/// Betti policy after surgery on `t` relator loops in a `d`-manifold:
/// degrees 1, 2, d-2, d-1 are no longer determined (first homology is, via
/// the abelianization).
fn surgered_table(base: &BettiTable, free_rank: i64, t: usize) -> BettiTable {
    if t == 0 {
        return base.clone();
    }
    let d = base.dim();
    base.with_entry_z(1, Betti::Known(free_rank))
        .with_entry_z(2, Betti::Unknown)
        .with_entry_z(d - 2, Betti::Unknown)
        .with_entry_z(d - 1, Betti::Unknown)
        .with_entry_z2(1, Betti::Unknown)
        .with_entry_z2(2, Betti::Unknown)
        .with_entry_z2(d - 2, Betti::Unknown)
        .with_entry_z2(d - 1, Betti::Unknown)
}

/// Betti policy for the circle-spin step: cross with a circle, then surger
/// the new loop away. With no generators the result is the sphere exactly
/// (the round-handle decomposition); otherwise the convolution with the
/// circle row is kept where the surgery cannot reach.
fn spun_table(
    base: &BettiTable,
    free_rank: i64,
    exact_sphere: bool,
) -> Result<BettiTable, SurgeryError> {
    let d = base.dim() + 1;
    if exact_sphere {
        return Ok(BettiTable::sphere(d));
    }
    let shift_sum = |entries: &[Betti]| -> Result<Vec<Betti>, SurgeryError> {
        let get = |i: i64| -> Betti {
            if i < 0 || i as usize >= entries.len() {
                Betti::Known(0)
            } else {
                entries[i as usize]
            }
        };
        (0..=d as i64)
            .map(|i| get(i).add(get(i - 1)).map_err(SurgeryError::Homology))
            .collect()
    };
    let mut z = shift_sum(base.z())?;
    let mut z2 = shift_sum(base.z2())?;
    z[0] = Betti::Known(1);
    z[d] = Betti::Known(1);
    z2[0] = Betti::Known(1);
    z2[d] = Betti::Known(1);
    z[1] = Betti::Known(free_rank);
    for degree in [2, d - 2, d - 1] {
        z[degree] = Betti::Unknown;
    }
    for degree in [1, 2, d - 2, d - 1] {
        z2[degree] = Betti::Unknown;
    }
    Ok(BettiTable::new(d, z, z2, true, base.orientable())?)
}

/// One pipeline step: the operation, its construction tag, the Euler
/// bookkeeping, and what changed in the table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProvenanceStep {
    pub index: usize,
    pub operation: &'static str,
    pub tag: &'static str,
    pub chi_before: Option<i64>,
    pub chi_after: Option<i64>,
    pub betti_delta: String,
    pub notes: String,
}

/// Ordered log of construction steps. Rendered one step per line as
/// `STEP <k> <op> <tag> chi:<before>-><after>`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProvenanceLog {
    steps: Vec<ProvenanceStep>,
}

impl ProvenanceLog {
    pub fn new() -> Self {
        ProvenanceLog::default()
    }

    pub fn steps(&self) -> &[ProvenanceStep] {
        &self.steps
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        operation: &'static str,
        tag: &'static str,
        chi_before: Option<i64>,
        chi_after: Option<i64>,
        betti_delta: impl Into<String>,
        notes: impl Into<String>,
    ) {
        self.steps.push(ProvenanceStep {
            index: self.steps.len() + 1,
            operation,
            tag,
            chi_before,
            chi_after,
            betti_delta: betti_delta.into(),
            notes: notes.into(),
        });
    }
}

impl fmt::Display for ProvenanceLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<i64>| match v {
            Some(x) => x.to_string(),
            None => "?".to_string(),
        };
        for s in &self.steps {
            writeln!(
                f,
                "STEP {} {} {} chi:{}->{}",
                s.index,
                s.operation,
                s.tag,
                opt(s.chi_before),
                opt(s.chi_after)
            )?;
        }
        Ok(())
    }
}

/// The connected sum of `s` copies of `S^1 x S^(n-2)`, the closed
/// `(n-1)`-manifold with free fundamental group on `s` generators. With no
/// generators the convention is the sphere `S^(n-1)`.
pub fn realize_free_group(s: usize, n: usize) -> Result<SphereProductExpression, SurgeryError> {
    if n < 6 {
        return Err(SurgeryError::DimensionTooSmall {
            dim: n.saturating_sub(1),
            min: 5,
        });
    }
    if s == 0 {
        return Ok(Expr::Sphere(n - 1));
    }
    let parts = (0..s)
        .map(|_| {
            Expr::Product(
                Box::new(Expr::Sphere(1)),
                Box::new(Expr::Sphere(n - 2)),
            )
        })
        .collect();
    Ok(Expr::ConnectedSum(parts))
}

/// Recognize a generator stage and read off `(s, n)`.
fn generator_stage_shape(x: &SphereProductExpression) -> Result<(usize, usize), SurgeryError> {
    match x {
        Expr::Sphere(d) if *d >= 5 => Ok((0, d + 1)),
        Expr::ConnectedSum(parts) if !parts.is_empty() => {
            let q = match &parts[0] {
                Expr::Product(a, b) => match (a.as_ref(), b.as_ref()) {
                    (Expr::Sphere(1), Expr::Sphere(q)) if *q >= 4 => *q,
                    _ => return Err(SurgeryError::NotGeneratorStage),
                },
                _ => return Err(SurgeryError::NotGeneratorStage),
            };
            for part in parts {
                match part {
                    Expr::Product(a, b)
                        if matches!(a.as_ref(), Expr::Sphere(1))
                            && matches!(b.as_ref(), Expr::Sphere(p) if *p == q) => {}
                    _ => return Err(SurgeryError::NotGeneratorStage),
                }
            }
            Ok((parts.len(), q + 2))
        }
        _ => Err(SurgeryError::NotGeneratorStage),
    }
}

/// Kill the relators of `p` by surgery on embedded loops in the generator
/// stage `x`. The result records `p` as its fundamental group (certified at
/// the abelianization level only) and stays stably parallelizable.
pub fn surger_relators(
    x: &SphereProductExpression,
    p: &GroupPresentation,
) -> Result<ManifoldDescriptor, SurgeryError> {
    let (s, n) = generator_stage_shape(x)?;
    if p.generator_count() != s {
        return Err(SurgeryError::GeneratorCountMismatch {
            expected: s,
            got: p.generator_count(),
        });
    }
    let expr = Expr::SurgerRelators {
        base: Box::new(x.clone()),
        presentation: p.clone(),
        ambient_dim: n,
    };
    let betti = expr.betti_table()?;
    let mut m = ManifoldDescriptor::new(betti);
    m.pi1 = Some(p.clone());
    m.simply_connected = s == 0;
    m.torsion_free_homology = p.relator_count() == 0;
    m.stably_parallelizable = true;
    m.w2_zero = true;
    m.bockstein_w2_zero = true;
    m.char_data.p1_zero = true;
    Ok(m)
}

/// Cross with a circle and surger the new loop away: dimension goes up by
/// one, the fundamental group is unchanged, and the Euler characteristic
/// becomes `1 + (-1)^n`.
pub fn spin_construction(x: &ManifoldDescriptor) -> Result<ManifoldDescriptor, SurgeryError> {
    let p = x.pi1.as_ref().ok_or(SurgeryError::MissingPresentation)?;
    if x.dim() < 5 {
        return Err(SurgeryError::DimensionTooSmall {
            dim: x.dim(),
            min: 5,
        });
    }
    if !x.betti.closed() {
        return Err(SurgeryError::InvalidInput(
            "spin construction requires a closed input".into(),
        ));
    }
    let inv = abelianization(p)?;
    let free_rank = i64::try_from(inv.free_rank)
        .map_err(|_| SurgeryError::Homology(HomologyError::Overflow))?;
    let exact = p.generator_count() == 0 && x.betti.fully_known();
    let betti = spun_table(&x.betti, free_rank, exact)?;
    let mut m = ManifoldDescriptor::new(betti);
    m.pi1 = Some(p.clone());
    m.simply_connected = x.simply_connected;
    m.torsion_free_homology = exact;
    m.stably_parallelizable = true;
    m.w2_zero = true;
    m.bockstein_w2_zero = true;
    m.char_data.p1_zero = true;
    Ok(m)
}

/// Connected sum with `S^3 x S^(d-3)`; for even dimension this cancels the
/// Euler characteristic 2 of the spin stage.
pub fn kill_euler(x: &ManifoldDescriptor) -> Result<ManifoldDescriptor, SurgeryError> {
    let d = x.dim();
    if d < 5 {
        return Err(SurgeryError::DimensionTooSmall { dim: d, min: 5 });
    }
    let summand = kunneth_product(&BettiTable::sphere(3), &BettiTable::sphere(d - 3))?;
    let betti = connected_sum(&x.betti, &summand)?;
    let mut m = x.clone();
    m.betti = betti;
    // The summand is simply connected and torsion-free, so pi1 and the
    // certified flags carry over; any Euler-dependent pairing data does not.
    m.char_data.c_top_pairing = None;
    m.lai = None;
    Ok(m)
}

fn unknown_z_entries(t: &BettiTable) -> Vec<String> {
    t.z()
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_known())
        .map(|(i, _)| format!("betti_z[{i}]"))
        .chain(std::iter::once("c_top_pairing".to_string()))
        .collect()
}

/// Make a stably parallelizable closed manifold parallelizable by connected
/// sums of sphere products, per Kervaire's criteria.
///
/// Even dimension: solve `chi + 2(r1-1) - 2(r2-1) = 0` with the minimal
/// `(r1, r2)`, summing `r1-1` copies of `S^2 x S^(d-2)` and `r2-1` copies of
/// `S^3 x S^(d-3)`. Odd dimension: the semi-characteristic decides; if it is
/// 1, a single `S^3 x S^(d-3)` summand flips it to 0 (a two-summand sum
/// leaves it unchanged — both candidates are evaluated and logged).
pub fn fixup_parallelizable(
    x: &ManifoldDescriptor,
) -> Result<(ManifoldDescriptor, ProvenanceLog), SurgeryError> {
    let d = x.dim();
    if d < 5 {
        return Err(SurgeryError::DimensionTooSmall { dim: d, min: 5 });
    }
    if !x.stably_parallelizable {
        return Err(SurgeryError::InvalidInput(
            "fixup requires a stably parallelizable input".into(),
        ));
    }
    if !x.betti.closed() {
        return Err(SurgeryError::InvalidInput(
            "fixup requires a closed input".into(),
        ));
    }
    let mut log = ProvenanceLog::new();
    let mut out = x.clone();
    out.char_data.c_top_pairing = None;
    out.lai = None;
    if d % 2 == 0 {
        let chi = x
            .chi()
            .ok_or_else(|| SurgeryError::IndeterminateEuler(unknown_z_entries(&x.betti)))?;
        if chi % 2 != 0 {
            return Err(SurgeryError::InvalidInput(format!(
                "odd Euler characteristic {chi} on a closed orientable even-dimensional input"
            )));
        }
        let half = chi / 2;
        let (r1, r2) = if half >= 0 { (1, half + 1) } else { (1 - half, 1) };
        let s2 = kunneth_product(&BettiTable::sphere(2), &BettiTable::sphere(d - 2))?;
        let s3 = kunneth_product(&BettiTable::sphere(3), &BettiTable::sphere(d - 3))?;
        for _ in 1..r1 {
            out.betti = connected_sum(&out.betti, &s2)?;
        }
        for _ in 1..r2 {
            out.betti = connected_sum(&out.betti, &s3)?;
        }
        log.push(
            "fixup_parallelizable",
            "even-euler-balance",
            Some(chi),
            Some(0),
            format!(
                "{} summands S^2xS^{} (+2 each), {} summands S^3xS^{} (-2 each)",
                r1 - 1,
                d - 2,
                r2 - 1,
                d - 3
            ),
            format!("minimal solution r1={r1}, r2={r2}"),
        );
        Ok((out, log))
    } else {
        let k = d / 2;
        let sc = match semi_characteristic(&x.betti)? {
            Betti::Known(v) => v,
            Betti::Unknown => {
                let missing: Vec<String> = (0..=k)
                    .filter(|&i| !x.betti.z2()[i].is_known())
                    .map(|i| format!("betti_z2[{i}]"))
                    .collect();
                return Err(SurgeryError::IndeterminateSemiCharacteristic(missing));
            }
        };
        if sc == 0 {
            log.push(
                "fixup_parallelizable",
                "odd-semi-characteristic",
                Some(0),
                Some(0),
                "unchanged",
                "semi_chi = 0 already; no summands needed",
            );
            return Ok((out, log));
        }
        let s3 = kunneth_product(&BettiTable::sphere(3), &BettiTable::sphere(d - 3))?;
        let single = connected_sum(&x.betti, &s3)?;
        let double = connected_sum(&single, &s3)?;
        let sc_of = |t: &BettiTable| -> Result<i64, SurgeryError> {
            match semi_characteristic(t)? {
                Betti::Known(v) => Ok(v),
                Betti::Unknown => Err(SurgeryError::Internal(
                    "summand entries are known; semi-characteristic must be too".into(),
                )),
            }
        };
        let sc_single = sc_of(&single)?;
        let sc_double = sc_of(&double)?;
        let chosen = if sc_single == 0 {
            out.betti = single;
            "one summand"
        } else if sc_double == 0 {
            out.betti = double;
            "two summands"
        } else {
            return Err(SurgeryError::Internal(
                "neither fixup candidate reaches semi-characteristic zero".into(),
            ));
        };
        log.push(
            "fixup_parallelizable",
            "odd-semi-characteristic",
            Some(0),
            Some(0),
            format!("connected sum with S^3xS^{} ({chosen})", d - 3),
            format!(
                "semi_chi(x)={sc}, one-summand candidate={sc_single}, \
                 two-summand candidate={sc_double}; chose {chosen}"
            ),
        );
        Ok((out, log))
    }
}

/// Run the whole pipeline for a presentation `p` at even dimension
/// `dim >= 6`: generator stage, relator surgery, circle-spin, Euler kill.
/// The result has Euler characteristic zero, trivial tangent bundle, a
/// codimension-2 embedding by construction, and fundamental group `p`
/// (certified at the abelianization level).
pub fn construct_manifold(
    p: &GroupPresentation,
    dim: usize,
) -> Result<(ManifoldDescriptor, ProvenanceLog), SurgeryError> {
    if dim % 2 != 0 {
        return Err(SurgeryError::OddDimension(dim));
    }
    if dim < 6 {
        return Err(SurgeryError::DimensionTooSmall { dim, min: 6 });
    }
    let n = dim;
    let s = p.generator_count();
    let t = p.relator_count();
    let mut log = ProvenanceLog::new();

    let stage = realize_free_group(s, n)?;
    let chi0 = stage.chi()?;
    if let Betti::Known(v) = euler_characteristic(&stage.betti_table()?)? {
        if v != chi0 {
            return Err(SurgeryError::Internal(format!(
                "gluing chi {chi0} disagrees with table chi {v} at the generator stage"
            )));
        }
    }
    log.push(
        "realize_free_group",
        "generator-stage",
        None,
        Some(chi0),
        format!("b_1 = {s}, b_{} = {s}", n - 2),
        if s == 0 {
            format!("no generators: the stage is S^{} by convention", n - 1)
        } else {
            format!("connected sum of {s} copies of S^1xS^{}", n - 2)
        },
    );

    let surgered = surger_relators(&stage, p)?;
    let piece = 1 + if (n - 3) % 2 == 0 { 1 } else { -1 };
    let mut chi1 = chi0;
    for _ in 0..t {
        chi1 = euler_of_gluing(chi1, piece, 0)?;
    }
    log.push(
        "surger_relators",
        "relator-surgery",
        Some(chi0),
        Some(chi1),
        if t == 0 {
            "no relators; table unchanged".to_string()
        } else {
            format!(
                "degrees 1,2,{},{} -> unknown; b_1 = abelianization free rank",
                n - 3,
                n - 2
            )
        },
        format!("{t} relator loops surgered, chi += {piece} each"),
    );

    let spun = spin_construction(&surgered)?;
    let chi2 = euler_of_gluing(0, 1 + if n % 2 == 0 { 1 } else { -1 }, 0)?;
    log.push(
        "spin_construction",
        "circle-spin",
        Some(chi1),
        Some(chi2),
        format!("dim {} -> {}", n - 1, n),
        "cross with S^1, surger the new loop; pi1 unchanged",
    );

    let killed = kill_euler(&spun)?;
    let chi3 = euler_of_gluing(chi2, 0, 1 + if n % 2 == 0 { 1 } else { -1 })?;
    log.push(
        "kill_euler",
        "euler-kill",
        Some(chi2),
        Some(chi3),
        format!("b_3 += 1, b_{} += 1", n - 3),
        format!(
            "connected sum with S^3xS^{}; embeds in codimension 2 by construction",
            n - 3
        ),
    );

    if chi3 != 0 {
        return Err(SurgeryError::Internal(format!(
            "pipeline ended with chi = {chi3}, expected 0"
        )));
    }
    let mut m = killed;
    if let Betti::Known(v) = euler_characteristic(&m.betti)? {
        if v != chi3 {
            return Err(SurgeryError::Internal(format!(
                "gluing chi {chi3} disagrees with table chi {v} at the final stage"
            )));
        }
    }
    m.embeds = Some(EmbeddingData {
        codim: 2,
        evidence: EmbeddingEvidence::ByConstruction,
    });
    m.char_data.c1_zero = true;
    m.char_data.c_top_pairing = Some(chi3);
    Ok((m, log))
}
