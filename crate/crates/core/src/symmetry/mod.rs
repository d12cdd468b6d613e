//! Symmetries of the exponential map induced by linear maps `σ: g → g`.
//!
//! A candidate `σ` preserving `H` (`H ∘ σ* = H`) gives a symmetry when either
//!
//! * (a) `σ` is an automorphism and `σ* ∘ Hv = Hv ∘ σ*`, with
//!   `s(p, t) = (σ*p, t)`, or
//! * (b) `σ` is an anti-automorphism and `σ* ∘ Hv = −Hv ∘ σ*`, with
//!   `s(p, t) = (σ* e^{tHv} p, t)` for `p` in the generic set.
//!
//! In both cases `Exp ∘ s = S⁻¹ ∘ Exp` where `S` is the group
//! (anti-)automorphism with `d_id S = σ`.

mod group_map;
mod ops;

pub use group_map::{Direction, GroupMap};
pub use ops::{
    apply_s, corollary1_residual, corollary2_check, group_s, proposition1_residual,
    require_generic, theorem_residual, MEET_TOL,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::{vertical_field, HamiltonianSpec};
use crate::lie::{classify_map, Classification, LieAlgebra, LinearMapOnAlgebra, MapKind};
use crate::sampling;

/// Tolerance on `residual_H`, `residual_vertical` and the classification.
pub const VERIFY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Case::A => "a",
            Case::B => "b",
        })
    }
}

/// How the group map `S` of a candidate is realized.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupMapHint {
    /// A closed-form map registered by the catalog.
    Catalog { id: String, map: GroupMap },
    ExpConjugation,
    /// No preference; the exp-conjugation fallback is used.
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryCandidate {
    pub name: String,
    pub sigma: LinearMapOnAlgebra,
    pub hint: GroupMapHint,
}

impl SymmetryCandidate {
    pub fn new(name: impl Into<String>, sigma: LinearMapOnAlgebra, hint: GroupMapHint) -> Self {
        Self {
            name: name.into(),
            sigma,
            hint,
        }
    }

    fn group_map(&self) -> GroupMap {
        match &self.hint {
            GroupMapHint::Catalog { map, .. } => map.clone(),
            GroupMapHint::ExpConjugation | GroupMapHint::None => GroupMap::ExpConjugation,
        }
    }
}

/// A candidate that passed verification, with its induced group map.
#[derive(Clone, Debug)]
pub struct VerifiedSymmetry {
    pub name: String,
    pub sigma: LinearMapOnAlgebra,
    pub case: Case,
    pub hamiltonian: String,
    pub residual_h: f64,
    pub residual_vertical: f64,
    pub classification: Classification,
    pub map: GroupMap,
}

/// Outcome of [`verify_candidate`] in serializable form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub candidate: String,
    pub hamiltonian: String,
    pub classification: Classification,
    #[serde(rename = "residual_H")]
    pub residual_h: f64,
    /// Residual of the branch matching the verdict, or the smaller one.
    pub residual_vertical: f64,
    /// `max |σ*Hv(p) − Hv(σ*p)|`
    pub residual_vertical_commuting: f64,
    /// `max |σ*Hv(p) + Hv(σ*p)|`
    pub residual_vertical_anticommuting: f64,
    pub case: Option<Case>,
    pub samples: usize,
    pub seed: u64,
    pub verified: bool,
    pub reason: Option<String>,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Verified(VerifiedSymmetry),
    Rejected,
}

/// Checks the hypotheses of the symmetry theorem for `candidate` and `h` on
/// `samples` seeded covectors in the unit ball plus `samples` on the sphere
/// of radius 5.
pub fn verify_candidate(
    algebra: &LieAlgebra,
    candidate: &SymmetryCandidate,
    h: &HamiltonianSpec,
    samples: usize,
    seed: u64,
) -> Result<(Verdict, VerificationReport)> {
    if samples < 100 {
        return Err(Error::Argument(format!("need at least 100 samples, got {samples}")));
    }
    let n = algebra.dim();
    if candidate.sigma.dim() != n || h.dim() != n {
        return Err(Error::Argument("candidate, Hamiltonian and algebra dimensions differ".into()));
    }
    let classification = classify_map(algebra, &candidate.sigma, VERIFY_TOL)?;
    let mut residual_h = 0.0_f64;
    let mut commuting = 0.0_f64;
    let mut anticommuting = 0.0_f64;
    for p in sampling::verification_covectors(n, samples, seed) {
        let sp = candidate.sigma.apply_dual(&p);
        residual_h = residual_h.max((h.value(&sp)? - h.value(&p)?).abs());
        let lhs = candidate.sigma.apply_dual(&vertical_field(algebra, h, &p)?);
        let rhs = vertical_field(algebra, h, &sp)?;
        commuting = commuting.max(lhs.distance(&rhs));
        anticommuting = anticommuting.max(lhs.distance(&(-&rhs)));
    }
    let auto = classification.kind == MapKind::Automorphism;
    let anti = classification.kind == MapKind::AntiAutomorphism;
    let (case, reason) = if residual_h > VERIFY_TOL {
        (None, Some(format!("σ does not preserve H: residual {residual_h:.3e}")))
    } else if auto && commuting <= VERIFY_TOL {
        (Some(Case::A), None)
    } else if anti && anticommuting <= VERIFY_TOL {
        (Some(Case::B), None)
    } else if commuting <= VERIFY_TOL {
        (None, Some(format!(
            "σ* commutes with Hv but σ is classified as {:?}, not an automorphism",
            classification.kind
        )))
    } else if anticommuting <= VERIFY_TOL {
        (None, Some(format!(
            "σ* anticommutes with Hv but σ is classified as {:?}, not an anti-automorphism",
            classification.kind
        )))
    } else {
        (None, Some(format!(
            "neither vertical condition holds: commuting residual {commuting:.3e}, \
             anticommuting residual {anticommuting:.3e}"
        )))
    };
    let residual_vertical = match case {
        Some(Case::A) => commuting,
        Some(Case::B) => anticommuting,
        None => commuting.min(anticommuting),
    };
    let report = VerificationReport {
        candidate: candidate.name.clone(),
        hamiltonian: h.label().to_string(),
        classification: classification.clone(),
        residual_h,
        residual_vertical,
        residual_vertical_commuting: commuting,
        residual_vertical_anticommuting: anticommuting,
        case,
        samples,
        seed,
        verified: case.is_some(),
        reason,
    };
    let verdict = match case {
        Some(case) => Verdict::Verified(VerifiedSymmetry {
            name: candidate.name.clone(),
            sigma: candidate.sigma.clone(),
            case,
            hamiltonian: h.label().to_string(),
            residual_h,
            residual_vertical,
            classification,
            map: candidate.group_map(),
        }),
        None => Verdict::Rejected,
    };
    Ok((verdict, report))
}
