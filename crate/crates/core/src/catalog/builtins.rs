use nalgebra::DMatrix;

use super::{GroupBundle, Manifold, StratumKind};
use super::semidirect::SemidirectStructure;
use crate::error::Result;
use crate::flows::{killing_hamiltonian, sr_hamiltonian};
use crate::lie::{AlgebraVector, LieAlgebra, LinearMapOnAlgebra, MatrixRepresentation};
use crate::symmetry::{GroupMap, GroupMapHint, SymmetryCandidate};

pub const NAMES: [&str; 5] = ["heisenberg3", "se2", "sh2", "so3", "engel4"];

/// `m × m` matrix with the listed `(row, col, value)` entries.
fn sparse(m: usize, entries: &[(usize, usize, f64)]) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(m, m);
    for &(r, c, v) in entries {
        a[(r, c)] = v;
    }
    a
}

fn diag(d: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d))
}

fn map(n: usize, rows: &[f64]) -> LinearMapOnAlgebra {
    LinearMapOnAlgebra::from_rows(n, rows).expect("catalog maps are invertible")
}

fn diag_map(d: &[f64]) -> LinearMapOnAlgebra {
    LinearMapOnAlgebra::new(diag(d)).expect("catalog maps are invertible")
}

fn conj(name: &str, sigma: LinearMapOnAlgebra, m: DMatrix<f64>, anti: bool) -> SymmetryCandidate {
    let map = GroupMap::conjugation(m, anti).expect("catalog conjugators are invertible");
    SymmetryCandidate::new(
        name,
        sigma,
        GroupMapHint::Catalog {
            id: map.spec().trim_start_matches("builtin:").to_string(),
            map,
        },
    )
}

fn exp_conj(name: &str, sigma: LinearMapOnAlgebra) -> SymmetryCandidate {
    SymmetryCandidate::new(name, sigma, GroupMapHint::ExpConjugation)
}

fn frame(n: usize, idx: &[usize]) -> Vec<AlgebraVector> {
    idx.iter().map(|&i| AlgebraVector::basis(n, i)).collect()
}

pub fn build(name: &str) -> Option<Result<GroupBundle>> {
    Some(match name {
        "heisenberg3" => heisenberg3(),
        "se2" => se2(),
        "sh2" => sh2(),
        "so3" => so3(),
        "engel4" => engel4(),
        _ => return None,
    })
}

fn heisenberg3() -> Result<GroupBundle> {
    let rep = MatrixRepresentation::new(
        3,
        vec![
            sparse(3, &[(0, 1, 1.0)]),
            sparse(3, &[(1, 2, 1.0)]),
            sparse(3, &[(0, 2, 1.0)]),
        ],
    )?;
    let alg = LieAlgebra::new("heisenberg3", 3, &[(0, 1, 2, 1.0)], vec![], rep)?;
    let sr = sr_hamiltonian(&alg, &frame(3, &[0, 1]))?;
    let symmetries = vec![
        conj("identity", LinearMapOnAlgebra::identity(3), DMatrix::identity(3, 3), false),
        // quarter turn of the horizontal plane
        exp_conj("rot90", map(3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0])),
        conj("reflect_b", diag_map(&[1.0, -1.0, 1.0]), diag(&[-1.0, 1.0, 1.0]), true),
        exp_conj("swap", map(3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0])),
        conj("neg", diag_map(&[-1.0, -1.0, -1.0]), DMatrix::identity(3, 3), true),
        // an automorphism that rescales H
        exp_conj("dilation", diag_map(&[2.0, 2.0, 4.0])),
    ];
    GroupBundle::new(alg, vec![("sr".into(), sr)], symmetries, None, Some(Manifold::Unitriangular), None, true)
}

/// Diagonal symmetries shared by the planar motion groups, with the
/// diagonal conjugators realizing `σ` (case a) or `−σ` (case b).
fn planar_symmetries() -> Vec<SymmetryCandidate> {
    vec![
        conj("identity", LinearMapOnAlgebra::identity(3), DMatrix::identity(3, 3), false),
        conj("sigma1", diag_map(&[1.0, -1.0, -1.0]), diag(&[1.0, -1.0, 1.0]), false),
        conj("sigma2", diag_map(&[-1.0, -1.0, 1.0]), diag(&[-1.0, -1.0, 1.0]), false),
        conj("sigma3", diag_map(&[-1.0, 1.0, -1.0]), diag(&[-1.0, 1.0, 1.0]), false),
        conj("eps_translation", diag_map(&[1.0, 1.0, -1.0]), diag(&[-1.0, -1.0, 1.0]), true),
        conj("eps_central", diag_map(&[-1.0, -1.0, -1.0]), DMatrix::identity(3, 3), true),
        conj("eps_line_y", diag_map(&[1.0, -1.0, 1.0]), diag(&[-1.0, 1.0, 1.0]), true),
        conj("eps_line_x", diag_map(&[-1.0, 1.0, 1.0]), diag(&[1.0, -1.0, 1.0]), true),
    ]
}

fn se2() -> Result<GroupBundle> {
    let rep = MatrixRepresentation::new(
        3,
        vec![
            sparse(3, &[(0, 2, 1.0)]),
            sparse(3, &[(1, 2, 1.0)]),
            sparse(3, &[(1, 0, 1.0), (0, 1, -1.0)]),
        ],
    )?;
    let alg = LieAlgebra::new(
        "se2",
        3,
        &[(2, 0, 1, 1.0), (2, 1, 0, -1.0)],
        vec!["x".into(), "y".into(), "theta".into()],
        rep,
    )?;
    let sr = sr_hamiltonian(&alg, &frame(3, &[0, 2]))?;
    let mut symmetries = planar_symmetries();
    // preserves H but is neither an automorphism nor an anti-automorphism
    symmetries.push(SymmetryCandidate::new(
        "swap_frame",
        map(3, &[0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0]),
        GroupMapHint::None,
    ));
    GroupBundle::new(
        alg,
        vec![("sr".into(), sr)],
        symmetries,
        Some(SemidirectStructure::affine(2)),
        Some(Manifold::Se2),
        Some(StratumKind::Se2),
        true,
    )
}

fn sh2() -> Result<GroupBundle> {
    let rep = MatrixRepresentation::new(
        3,
        vec![
            sparse(3, &[(0, 2, 1.0)]),
            sparse(3, &[(1, 2, 1.0)]),
            sparse(3, &[(1, 0, 1.0), (0, 1, 1.0)]),
        ],
    )?;
    let alg = LieAlgebra::new(
        "sh2",
        3,
        &[(2, 0, 1, 1.0), (2, 1, 0, 1.0)],
        vec!["x".into(), "y".into(), "s".into()],
        rep,
    )?;
    let sr = sr_hamiltonian(&alg, &frame(3, &[0, 2]))?;
    GroupBundle::new(
        alg,
        vec![("sr".into(), sr)],
        planar_symmetries(),
        Some(SemidirectStructure::affine(2)),
        Some(Manifold::Sh2),
        Some(StratumKind::Sh2),
        true,
    )
}

fn so3() -> Result<GroupBundle> {
    let rep = MatrixRepresentation::new(
        3,
        vec![
            sparse(3, &[(2, 1, 1.0), (1, 2, -1.0)]),
            sparse(3, &[(0, 2, 1.0), (2, 0, -1.0)]),
            sparse(3, &[(1, 0, 1.0), (0, 1, -1.0)]),
        ],
    )?;
    let alg = LieAlgebra::new(
        "so3",
        3,
        &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)],
        vec![],
        rep,
    )?;
    let sr = sr_hamiltonian(&alg, &frame(3, &[0, 1]))?;
    let killing = killing_hamiltonian(&alg)?;
    // Rotations act on so(3) by conjugation, so S(g) = σ g σᵀ; for the
    // anti-automorphisms −σ is a rotation and S(g) = (−σ) g⁻¹ (−σ)ᵀ.
    let rot = [0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
    let symmetries = vec![
        conj("identity", LinearMapOnAlgebra::identity(3), DMatrix::identity(3, 3), false),
        conj("rot_e3", map(3, &rot), DMatrix::from_row_slice(3, 3, &rot), false),
        conj("flip_e1", diag_map(&[1.0, -1.0, -1.0]), diag(&[1.0, -1.0, -1.0]), false),
        conj("reflect_e3", diag_map(&[1.0, 1.0, -1.0]), diag(&[-1.0, -1.0, 1.0]), true),
        conj("reflect_e1", diag_map(&[-1.0, 1.0, 1.0]), diag(&[1.0, -1.0, -1.0]), true),
        conj("neg", diag_map(&[-1.0, -1.0, -1.0]), DMatrix::identity(3, 3), true),
    ];
    GroupBundle::new(
        alg,
        vec![("sr".into(), sr), ("killing".into(), killing)],
        symmetries,
        None,
        Some(Manifold::So3),
        None,
        true,
    )
}

fn engel4() -> Result<GroupBundle> {
    let rep = MatrixRepresentation::new(
        4,
        vec![
            sparse(4, &[(0, 1, 1.0), (1, 2, 1.0)]),
            sparse(4, &[(2, 3, 1.0)]),
            sparse(4, &[(1, 3, 1.0)]),
            sparse(4, &[(0, 3, 1.0)]),
        ],
    )?;
    let alg = LieAlgebra::new("engel4", 4, &[(0, 1, 2, 1.0), (0, 2, 3, 1.0)], vec![], rep)?;
    let sr = sr_hamiltonian(&alg, &frame(4, &[0, 1]))?;
    let symmetries = vec![
        conj("identity", LinearMapOnAlgebra::identity(4), DMatrix::identity(4, 4), false),
        conj("flip_e1", diag_map(&[-1.0, 1.0, -1.0, 1.0]), diag(&[1.0, -1.0, 1.0, 1.0]), false),
        conj("reflect_b", diag_map(&[1.0, 1.0, -1.0, 1.0]), diag(&[1.0, -1.0, 1.0, -1.0]), true),
    ];
    GroupBundle::new(alg, vec![("sr".into(), sr)], symmetries, None, Some(Manifold::Unitriangular), None, true)
}
