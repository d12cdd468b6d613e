//! Group bundles: an algebra with its representation, named Hamiltonians,
//! symmetry candidates with closed-form group maps, and optional semidirect
//! and stratum data.
//!
//! Builtins: `heisenberg3`, `se2`, `sh2`, `so3`, `engel4`. Further groups are
//! read from JSON files, either by path or from the directories listed in
//! `LIEMAX_CATALOG_DIR`.

mod builtins;
mod semidirect;

pub use semidirect::{semidirect_s_inverse, SemidirectStructure};

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::flows::{killing_hamiltonian, sr_hamiltonian_weighted, HamiltonianKind, HamiltonianSpec};
use crate::lie::io::{GroupFile, HamiltonianJson, MatrixJson, SemidirectJson, SymmetryJson};
use crate::lie::{AlgebraVector, GroupPoint, LieAlgebra, LinearMapOnAlgebra};
use crate::sampling;
use crate::symmetry::{Direction, GroupMap, GroupMapHint, SymmetryCandidate};

/// Environment variable with extra group directories (`:`-separated).
pub const CATALOG_DIR_ENV: &str = "LIEMAX_CATALOG_DIR";
/// Agreement required between a group map and `exp(σ log g)` near the identity.
pub const S_MAP_GATE_TOL: f64 = 1e-9;

/// Which stratum classifier applies to a group's fixed-point sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StratumKind {
    Se2,
    Sh2,
}

/// Defining variety of the matrix model, used for drift reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Manifold {
    Unitriangular,
    Se2,
    Sh2,
    So3,
}

impl Manifold {
    fn id(self) -> &'static str {
        match self {
            Manifold::Unitriangular => "unitriangular",
            Manifold::Se2 => "se2",
            Manifold::Sh2 => "sh2",
            Manifold::So3 => "so3",
        }
    }

    fn from_id(s: &str) -> Result<Self> {
        Ok(match s {
            "unitriangular" => Manifold::Unitriangular,
            "se2" => Manifold::Se2,
            "sh2" => Manifold::Sh2,
            "so3" => Manifold::So3,
            other => return Err(Error::Validation(format!("unknown manifold `{other}`"))),
        })
    }

    /// Max entrywise violation of the variety's defining equations.
    pub fn residual(self, g: &GroupPoint) -> f64 {
        let m = g.matrix();
        let n = m.nrows();
        let mut r = 0.0_f64;
        match self {
            Manifold::Unitriangular => {
                for i in 0..n {
                    r = r.max((m[(i, i)] - 1.0).abs());
                    for j in 0..i {
                        r = r.max(m[(i, j)].abs());
                    }
                }
            }
            Manifold::Se2 | Manifold::Sh2 => {
                if n != 3 {
                    return f64::INFINITY;
                }
                r = r.max(m[(2, 0)].abs()).max(m[(2, 1)].abs()).max((m[(2, 2)] - 1.0).abs());
                let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
                if self == Manifold::Se2 {
                    r = r.max((a - d).abs()).max((b + c).abs()).max((a * a + c * c - 1.0).abs());
                } else {
                    r = r.max((a - d).abs()).max((b - c).abs()).max((a * a - c * c - 1.0).abs());
                    if a <= 0.0 {
                        r = r.max(1.0);
                    }
                }
            }
            Manifold::So3 => {
                let e = m.transpose() * m - DMatrix::identity(n, n);
                r = crate::linalg::max_abs(&e).max((m.determinant() - 1.0).abs());
            }
        }
        r
    }
}

/// An immutable, validated group bundle.
#[derive(Clone, Debug)]
pub struct GroupBundle {
    algebra: LieAlgebra,
    hamiltonians: Vec<(String, HamiltonianSpec)>,
    symmetries: Vec<SymmetryCandidate>,
    semidirect: Option<SemidirectStructure>,
    manifold: Option<Manifold>,
    strata: Option<StratumKind>,
    generic_stabilizer_connected: bool,
}

impl GroupBundle {
    /// Assembles a bundle and runs the group-map and semidirect gates.
    pub fn new(
        algebra: LieAlgebra,
        hamiltonians: Vec<(String, HamiltonianSpec)>,
        symmetries: Vec<SymmetryCandidate>,
        semidirect: Option<SemidirectStructure>,
        manifold: Option<Manifold>,
        strata: Option<StratumKind>,
        generic_stabilizer_connected: bool,
    ) -> Result<Self> {
        let bundle = Self {
            algebra,
            hamiltonians,
            symmetries,
            semidirect,
            manifold,
            strata,
            generic_stabilizer_connected,
        };
        bundle.validate()?;
        Ok(bundle)
    }

    fn validate(&self) -> Result<()> {
        let n = self.algebra.dim();
        for (name, h) in &self.hamiltonians {
            if h.dim() != n {
                return Err(Error::Validation(format!("Hamiltonian `{name}` has the wrong dimension")));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.symmetries {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::Validation(format!("duplicate symmetry `{}`", c.name)));
            }
            if c.sigma.dim() != n {
                return Err(Error::Validation(format!("symmetry `{}` has the wrong dimension", c.name)));
            }
            let (worst, xi) = self.s_map_residual(c)?;
            if worst > S_MAP_GATE_TOL {
                return Err(Error::Validation(format!(
                    "group map of `{}` disagrees with exp(σ log g) by {worst:.3e} at ξ = {:?}",
                    c.name,
                    xi.to_vec()
                )));
            }
        }
        if let Some(sd) = &self.semidirect {
            if self.algebra.rep_size() != sd.split()[0] + 1 {
                return Err(Error::Validation("semidirect split does not match the representation".into()));
            }
            let mut rng = sampling::rng(0xb0b);
            for _ in 0..20 {
                let x = self.algebra.group_exp(&sampling::algebra_vector_in_ball(&mut rng, n, 1.0))?;
                let y = self.algebra.group_exp(&sampling::algebra_vector_in_ball(&mut rng, n, 1.0))?;
                let (_, x2) = sd.decompose(&x)?;
                let (_, y2) = sd.decompose(&y)?;
                let lhs = sd.b(&x2.compose(&y2))?;
                let rhs = sd.b(&x2)? * sd.b(&y2)?;
                if crate::linalg::max_abs_diff(&lhs, &rhs) > 1e-10 {
                    return Err(Error::Validation("semidirect action is not a homomorphism".into()));
                }
            }
        }
        Ok(())
    }

    /// Worst `|S(exp ξ) − exp(σξ)|` over seeded `|ξ| ≤ 0.1`.
    fn s_map_residual(&self, c: &SymmetryCandidate) -> Result<(f64, AlgebraVector)> {
        let n = self.algebra.dim();
        let map = match &c.hint {
            GroupMapHint::Catalog { map, .. } => map,
            _ => return Ok((0.0, AlgebraVector::zeros(n))),
        };
        let mut rng = sampling::rng(0x5_1a9);
        let mut worst = (0.0, AlgebraVector::zeros(n));
        for _ in 0..20 {
            let xi = sampling::algebra_vector_in_ball(&mut rng, n, 0.1);
            let g = self.algebra.group_exp(&xi)?;
            let s = map.apply(&self.algebra, &c.sigma, &g, Direction::Forward)?;
            let e = self.algebra.group_exp(&c.sigma.apply(&xi))?;
            let d = s.distance(&e);
            if d > worst.0 {
                worst = (d, xi);
            }
        }
        Ok(worst)
    }

    pub fn name(&self) -> &str {
        self.algebra.name()
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn hamiltonians(&self) -> &[(String, HamiltonianSpec)] {
        &self.hamiltonians
    }

    pub fn hamiltonian(&self, name: &str) -> Result<&HamiltonianSpec> {
        self.hamiltonians
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, h)| h)
            .ok_or_else(|| Error::Catalog {
                kind: "hamiltonian".into(),
                name: name.into(),
                available: join(self.hamiltonians.iter().map(|(n, _)| n.as_str())),
            })
    }

    pub fn symmetries(&self) -> &[SymmetryCandidate] {
        &self.symmetries
    }

    pub fn symmetry(&self, name: &str) -> Result<&SymmetryCandidate> {
        self.symmetries
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::Catalog {
                kind: "symmetry".into(),
                name: name.into(),
                available: join(self.symmetries.iter().map(|c| c.name.as_str())),
            })
    }

    pub fn semidirect(&self) -> Option<&SemidirectStructure> {
        self.semidirect.as_ref()
    }

    pub fn strata(&self) -> Option<StratumKind> {
        self.strata
    }

    pub fn manifold(&self) -> Option<Manifold> {
        self.manifold
    }

    /// Asserted, not computed: the stabilizer of a generic covector is connected.
    pub fn generic_stabilizer_connected(&self) -> bool {
        self.generic_stabilizer_connected
    }

    /// Distance of `g` from the group's defining variety, if one is declared.
    pub fn manifold_residual(&self, g: &GroupPoint) -> Option<f64> {
        self.manifold.map(|m| m.residual(g))
    }

    /// Serializable form of the bundle.
    pub fn to_file(&self) -> Result<GroupFile> {
        let mut file = GroupFile::from_algebra(&self.algebra);
        for (name, h) in &self.hamiltonians {
            let entry = match h.kind() {
                HamiltonianKind::SubRiemannian { frame, weights } => HamiltonianJson {
                    name: name.clone(),
                    kind: "sr".into(),
                    frame: frame.iter().map(|v| v.to_vec()).collect(),
                    weights: weights.iter().any(|w| *w != 1.0).then(|| weights.clone()),
                },
                HamiltonianKind::Killing => HamiltonianJson {
                    name: name.clone(),
                    kind: "killing".into(),
                    frame: vec![],
                    weights: None,
                },
                _ => {
                    return Err(Error::Argument(format!(
                        "Hamiltonian `{name}` has no file representation"
                    )))
                }
            };
            file.hamiltonians.push(entry);
        }
        for c in &self.symmetries {
            let (s_map, conjugator) = match &c.hint {
                GroupMapHint::Catalog { map, .. } => {
                    (map.spec().to_string(), map.conjugator().map(MatrixJson::from_matrix))
                }
                GroupMapHint::ExpConjugation => ("exp_conjugation".to_string(), None),
                GroupMapHint::None => ("none".to_string(), None),
            };
            file.symmetries.push(SymmetryJson {
                name: c.name.clone(),
                matrix: MatrixJson::from_matrix(c.sigma.matrix()),
                s_map,
                conjugator,
            });
        }
        file.semidirect = self.semidirect.as_ref().map(|sd| SemidirectJson {
            split: sd.split(),
            b: sd.spec().into(),
        });
        file.generic_stabilizer_connected = Some(self.generic_stabilizer_connected);
        file.strata = self.strata.map(|s| match s {
            StratumKind::Se2 => "se2".to_string(),
            StratumKind::Sh2 => "sh2".to_string(),
        });
        file.manifold = self.manifold.map(|m| m.id().to_string());
        Ok(file)
    }

    /// Builds and validates a bundle from a parsed file.
    pub fn from_file(file: &GroupFile) -> Result<Self> {
        let algebra = file.algebra()?;
        let n = algebra.dim();
        let mut hamiltonians = Vec::new();
        for h in &file.hamiltonians {
            let spec = match h.kind.as_str() {
                "sr" => {
                    let frame: Vec<AlgebraVector> = h
                        .frame
                        .iter()
                        .map(|v| AlgebraVector::new(v))
                        .collect();
                    let weights = h.weights.clone().unwrap_or_else(|| vec![1.0; frame.len()]);
                    sr_hamiltonian_weighted(&algebra, &frame, &weights)
                        .map_err(|e| Error::Validation(format!("Hamiltonian `{}`: {e}", h.name)))?
                }
                "killing" => killing_hamiltonian(&algebra)
                    .map_err(|e| Error::Validation(format!("Hamiltonian `{}`: {e}", h.name)))?,
                other => {
                    return Err(Error::Validation(format!(
                        "Hamiltonian `{}` has unknown type `{other}`",
                        h.name
                    )))
                }
            };
            hamiltonians.push((h.name.clone(), spec.with_label(h.name.clone())));
        }
        let size = algebra.rep_size();
        let mut symmetries = Vec::new();
        for s in &file.symmetries {
            let sigma = LinearMapOnAlgebra::new(s.matrix.to_matrix(n, &format!("symmetry `{}`", s.name))?)
                .map_err(|e| Error::Validation(format!("symmetry `{}`: {e}", s.name)))?;
            let conjugator = || -> Result<DMatrix<f64>> {
                s.conjugator
                    .as_ref()
                    .ok_or_else(|| {
                        Error::Validation(format!("symmetry `{}` needs a conjugator", s.name))
                    })?
                    .to_matrix(size, &format!("conjugator of `{}`", s.name))
            };
            let hint = match s.s_map.as_str() {
                "exp_conjugation" => GroupMapHint::ExpConjugation,
                "none" => GroupMapHint::None,
                "builtin:conjugation" => GroupMapHint::Catalog {
                    id: "conjugation".into(),
                    map: GroupMap::conjugation(conjugator()?, false)?,
                },
                "builtin:anti_conjugation" => GroupMapHint::Catalog {
                    id: "anti_conjugation".into(),
                    map: GroupMap::conjugation(conjugator()?, true)?,
                },
                "builtin:inversion" => GroupMapHint::Catalog {
                    id: "inversion".into(),
                    map: GroupMap::inversion(size),
                },
                other => {
                    return Err(Error::Validation(format!(
                        "symmetry `{}` has unknown s_map `{other}`",
                        s.name
                    )))
                }
            };
            symmetries.push(SymmetryCandidate::new(s.name.clone(), sigma, hint));
        }
        let semidirect = match &file.semidirect {
            None => None,
            Some(sd) if sd.b == "builtin:affine" && sd.split.len() == 2 && sd.split[0] + 1 == size => {
                Some(SemidirectStructure::affine(sd.split[0]))
            }
            Some(sd) => {
                return Err(Error::Validation(format!(
                    "unsupported semidirect structure {:?} / `{}`",
                    sd.split, sd.b
                )))
            }
        };
        let strata = match file.strata.as_deref() {
            None => None,
            Some("se2") => Some(StratumKind::Se2),
            Some("sh2") => Some(StratumKind::Sh2),
            Some(other) => return Err(Error::Validation(format!("unknown strata `{other}`"))),
        };
        let manifold = file.manifold.as_deref().map(Manifold::from_id).transpose()?;
        Self::new(
            algebra,
            hamiltonians,
            symmetries,
            semidirect,
            manifold,
            strata,
            file.generic_stabilizer_connected.unwrap_or(false),
        )
    }
}

fn join<'a>(names: impl Iterator<Item = &'a str>) -> String {
    names.collect::<Vec<_>>().join(", ")
}

fn builtin_table() -> &'static Vec<GroupBundle> {
    static TABLE: OnceLock<Vec<GroupBundle>> = OnceLock::new();
    TABLE.get_or_init(|| {
        builtins::NAMES
            .iter()
            .map(|n| {
                builtins::build(n)
                    .expect("listed builtin")
                    .unwrap_or_else(|e| panic!("builtin `{n}` failed validation: {e}"))
            })
            .collect()
    })
}

pub fn builtin_names() -> &'static [&'static str] {
    &builtins::NAMES
}

/// A builtin bundle by name.
pub fn builtin(name: &str) -> Result<GroupBundle> {
    builtin_table()
        .iter()
        .find(|b| b.name() == name)
        .cloned()
        .ok_or_else(|| Error::Catalog {
            kind: "group".into(),
            name: name.into(),
            available: builtin_names().join(", "),
        })
}

/// Reads and validates a group file.
pub fn load_group(path: impl AsRef<Path>) -> Result<GroupBundle> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let file = GroupFile::parse(&text)?;
    GroupBundle::from_file(&file).map_err(|e| match e {
        Error::Validation(msg) => Error::Validation(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn save_group(bundle: &GroupBundle, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(&bundle.to_file()?)?;
    std::fs::write(path.as_ref(), text + "\n")
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))
}

/// Group files found in the `LIEMAX_CATALOG_DIR` directories, sorted by path.
pub fn user_group_files() -> Vec<PathBuf> {
    let Some(dirs) = std::env::var_os(CATALOG_DIR_ENV) else {
        return vec![];
    };
    let mut files: Vec<PathBuf> = std::env::split_paths(&dirs)
        .filter_map(|d| std::fs::read_dir(d).ok())
        .flat_map(|rd| rd.filter_map(|e| e.ok()).map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
}

/// Resolves a builtin name, a user group name, or a path to a group file.
pub fn resolve(name_or_path: &str) -> Result<GroupBundle> {
    if let Ok(b) = builtin(name_or_path) {
        return Ok(b);
    }
    let as_path = Path::new(name_or_path);
    if name_or_path.ends_with(".json") || as_path.is_file() {
        return load_group(as_path);
    }
    let mut available: Vec<String> = builtin_names().iter().map(|s| s.to_string()).collect();
    for file in user_group_files() {
        let Ok(text) = std::fs::read_to_string(&file) else { continue };
        let Ok(parsed) = GroupFile::parse(&text) else { continue };
        if parsed.name == name_or_path {
            return GroupBundle::from_file(&parsed);
        }
        available.push(parsed.name);
    }
    Err(Error::Catalog {
        kind: "group".into(),
        name: name_or_path.into(),
        available: available.join(", "),
    })
}

/// Every group known to the process: builtins, then user groups.
pub fn all_groups() -> Result<Vec<GroupBundle>> {
    let mut out: Vec<GroupBundle> = builtin_table().clone();
    for file in user_group_files() {
        out.push(load_group(&file)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::orbit_report;

    #[test]
    fn every_builtin_builds() {
        for n in builtin_names() {
            let b = builtin(n).unwrap();
            assert_eq!(b.name(), *n);
            assert!(b.generic_stabilizer_connected());
        }
    }

    #[test]
    fn unknown_group_lists_names() {
        match builtin("sl2") {
            Err(Error::Catalog { available, .. }) => assert!(available.contains("heisenberg3")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn engel_generic_covector_is_outside_generic_set() {
        let b = builtin("engel4").unwrap();
        let rep = orbit_report(b.algebra(), &crate::lie::Covector::new(&[0.3, -0.7, 0.2, 0.9]), 1e-9);
        assert_eq!(rep.codim, 2);
        assert!(!rep.in_generic_set);
    }

    #[test]
    fn se2_semidirect_is_rotation_action() {
        let b = builtin("se2").unwrap();
        let sd = b.semidirect().unwrap();
        let g = b.algebra().group_exp(&AlgebraVector::new(&[0.0, 0.0, 0.5])).unwrap();
        let r = sd.b(&g).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.5f64.cos(), -0.5f64.sin(), 0.5f64.sin(), 0.5f64.cos()]);
        assert!(crate::linalg::max_abs_diff(&r, &expected) < 1e-14);
    }

    #[test]
    fn killing_constructs_only_on_so3() {
        for n in builtin_names() {
            let alg = builtin(n).unwrap().algebra().clone();
            assert_eq!(killing_hamiltonian(&alg).is_ok(), *n == "so3", "{n}");
        }
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for n in builtin_names() {
            let b = builtin(n).unwrap();
            let path = dir.path().join(format!("{n}.json"));
            save_group(&b, &path).unwrap();
            let back = load_group(&path).unwrap();
            assert_eq!(back.algebra().sparse_constants(), b.algebra().sparse_constants());
            assert_eq!(back.symmetries(), b.symmetries());
            assert_eq!(back.to_file().unwrap(), b.to_file().unwrap());
        }
    }

    #[test]
    fn inconsistent_s_map_rejected() {
        let mut file = builtin("se2").unwrap().to_file().unwrap();
        // sigma1 with the conjugator of sigma2
        file.symmetries[1].conjugator = file.symmetries[2].conjugator.clone();
        match GroupBundle::from_file(&file) {
            Err(Error::Validation(msg)) => assert!(msg.contains("sigma1"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn manifold_residual_of_flowed_points_is_small() {
        for n in builtin_names() {
            let b = builtin(n).unwrap();
            let xi = AlgebraVector::from(vec![0.4; b.algebra().dim()]);
            let g = b.algebra().group_exp(&xi).unwrap();
            assert!(b.manifold_residual(&g).unwrap() < 1e-12, "{n}");
        }
    }
}
