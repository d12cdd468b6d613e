//! Pointwise stratum membership for the planar motion groups.
//!
//! An element of SE(2) or SH(2) is `[[B, v], [0, 1]]`. Away from `B = I` it
//! has a unique fixed point `c = (I − B)⁻¹ v`, and the strata are read off
//! from where `c` lies. The axis tests use the numerators of `c_x`, `c_y`
//! (the denominators vanish as `B → I`), so they stay bounded near the
//! translation stratum.

use serde::{Deserialize, Serialize};

use crate::catalog::{Manifold, StratumKind};
use crate::error::{Error, Result};
use crate::lie::GroupPoint;

/// Angle (or hyperbolic angle) below which an element counts as a translation.
pub const ANGLE_TOL: f64 = 1e-9;
/// Tolerance of the axis tests.
pub const LINE_TOL: f64 = 1e-7;
const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stratum {
    Translation,
    CentralSymmetry,
    RotationAboutLine(Axis),
    HyperbolicRotationAboutLine(Axis),
    None,
}

impl Stratum {
    pub fn label(self) -> &'static str {
        match self {
            Stratum::Translation => "translation",
            Stratum::CentralSymmetry => "central_symmetry",
            Stratum::RotationAboutLine(Axis::X) => "rotation_about_line(x)",
            Stratum::RotationAboutLine(Axis::Y) => "rotation_about_line(y)",
            Stratum::HyperbolicRotationAboutLine(Axis::X) => "hyperbolic_rotation_about_line(x)",
            Stratum::HyperbolicRotationAboutLine(Axis::Y) => "hyperbolic_rotation_about_line(y)",
            Stratum::None => "none",
        }
    }
}

impl std::fmt::Display for Stratum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

fn require(g: &GroupPoint, manifold: Manifold, name: &str) -> Result<()> {
    let r = manifold.residual(g);
    if !(r <= MEMBERSHIP_TOL) {
        return Err(Error::Argument(format!(
            "matrix is not an element of {name} (defect {r:.3e})"
        )));
    }
    Ok(())
}

/// Rotation angle in `(−π, π]` and translation of an SE(2) element.
pub fn se2_coordinates(g: &GroupPoint) -> (f64, f64, f64) {
    let m = g.matrix();
    (m[(1, 0)].atan2(m[(0, 0)]), m[(0, 2)], m[(1, 2)])
}

/// Stratum of an SE(2) element; ties resolve in the order translation,
/// central symmetry, x-line, y-line.
pub fn se2_stratum_classify(g: &GroupPoint) -> Result<Stratum> {
    require(g, Manifold::Se2, "SE(2)")?;
    let (phi, vx, vy) = se2_coordinates(g);
    if phi.abs() <= ANGLE_TOL {
        return Ok(Stratum::Translation);
    }
    if (std::f64::consts::PI - phi.abs()).abs() <= ANGLE_TOL {
        return Ok(Stratum::CentralSymmetry);
    }
    let (s, c) = (0.5 * phi).sin_cos();
    // 2 sin(φ/2) · c_y and 2 sin(φ/2) · c_x
    if (c * vx + s * vy).abs() <= LINE_TOL {
        return Ok(Stratum::RotationAboutLine(Axis::X));
    }
    if (s * vx - c * vy).abs() <= LINE_TOL {
        return Ok(Stratum::RotationAboutLine(Axis::Y));
    }
    Ok(Stratum::None)
}

/// Hyperbolic angle and translation of an SH(2) element.
pub fn sh2_coordinates(g: &GroupPoint) -> (f64, f64, f64) {
    let m = g.matrix();
    (m[(1, 0)].asinh(), m[(0, 2)], m[(1, 2)])
}

/// Stratum of an SH(2) element: translations, or hyperbolic rotations whose
/// fixed point lies on a coordinate axis. The axis tests are scaled by
/// `cosh(s/2)`.
pub fn sh2_stratum_classify(g: &GroupPoint) -> Result<Stratum> {
    require(g, Manifold::Sh2, "SH(2)")?;
    let (s, vx, vy) = sh2_coordinates(g);
    if s.abs() <= ANGLE_TOL {
        return Ok(Stratum::Translation);
    }
    let (sh, ch) = ((0.5 * s).sinh(), (0.5 * s).cosh());
    // −2 sinh(s/2) · c_y and 2 sinh(s/2) · c_x
    if (ch * vx - sh * vy).abs() <= LINE_TOL * ch {
        return Ok(Stratum::HyperbolicRotationAboutLine(Axis::X));
    }
    if (sh * vx - ch * vy).abs() <= LINE_TOL * ch {
        return Ok(Stratum::HyperbolicRotationAboutLine(Axis::Y));
    }
    Ok(Stratum::None)
}

pub fn classify(kind: StratumKind, g: &GroupPoint) -> Result<Stratum> {
    match kind {
        StratumKind::Se2 => se2_stratum_classify(g),
        StratumKind::Sh2 => sh2_stratum_classify(g),
    }
}
