use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::algebra::LieAlgebra;
use super::types::{AlgebraVector, Covector};

/// Singular values below `DEFAULT_RANK_TOL × σ_max` count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Coadjoint orbit data at a covector `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    /// Codimension of the orbit through `p`.
    pub codim: usize,
    /// Basis of the stabilizer algebra `g_p = {ξ : ad*_ξ p = 0}`.
    pub stabilizer_basis: Vec<AlgebraVector>,
    /// `p(ξ)` for the unit stabilizer generator when `dim g_p = 1`.
    pub pairing: Option<f64>,
    /// Membership in the generic set: `codim = 1` and `p(g_p) ≠ 0`.
    pub in_generic_set: bool,
}

/// Orbit codimension, stabilizer and generic-set membership of `p`.
///
/// The `n × n` matrix whose `i`-th row is `ad*_{e_i} p` is factored by SVD;
/// its rank is the orbit dimension and the left null space is `g_p`.
pub fn orbit_report(alg: &LieAlgebra, p: &Covector, tol: f64) -> OrbitReport {
    let n = alg.dim();
    let mut m = DMatrix::zeros(n, n);
    let mut row = vec![0.0; n];
    for i in 0..n {
        alg.ad_star_slices(AlgebraVector::basis(n, i).as_slice(), p.as_slice(), &mut row);
        for k in 0..n {
            m[(i, k)] = row[k];
        }
    }
    // ξ ↦ Σ ξ_i row_i is mᵀ; its kernel is spanned by right singular vectors
    // of mᵀ with vanishing singular values.
    let svd = m.transpose().svd(false, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let threshold = tol * smax;
    let rank = if smax > 0.0 {
        sv.iter().filter(|&&s| s > threshold).count()
    } else {
        0
    };
    let v_t = svd.v_t.expect("requested V^T");
    let stabilizer_basis: Vec<AlgebraVector> = (0..n)
        .filter(|&i| smax == 0.0 || sv[i] <= threshold)
        .map(|i| {
            let mut v: Vec<f64> = v_t.row(i).iter().copied().collect();
            let lead = v
                .iter()
                .copied()
                .fold(0.0_f64, |a, x| if x.abs() > a.abs() { x } else { a });
            if lead < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            AlgebraVector::from(v)
        })
        .collect();
    let codim = n - rank;
    let pairing = (stabilizer_basis.len() == 1).then(|| p.pair(&stabilizer_basis[0]));
    let in_generic_set =
        codim == 1 && pairing.map(|x| x.abs() > threshold.max(tol)).unwrap_or(false);
    OrbitReport {
        codim,
        stabilizer_basis,
        pairing,
        in_generic_set,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn heisenberg_center_covector_is_generic() {
        let alg = catalog::builtin("heisenberg3").unwrap().algebra().clone();
        let r = orbit_report(&alg, &Covector::basis(3, 2), DEFAULT_RANK_TOL);
        assert_eq!(r.codim, 1);
        assert_eq!(r.stabilizer_basis.len(), 1);
        assert!(r.stabilizer_basis[0].distance(&AlgebraVector::basis(3, 2)) < 1e-12);
        assert!((r.pairing.unwrap() - 1.0).abs() < 1e-12);
        assert!(r.in_generic_set);
    }

    #[test]
    fn zero_covector_has_full_codimension() {
        for name in catalog::builtin_names() {
            let alg = catalog::builtin(name).unwrap().algebra().clone();
            let r = orbit_report(&alg, &Covector::zeros(alg.dim()), DEFAULT_RANK_TOL);
            assert_eq!(r.codim, alg.dim());
            assert!(!r.in_generic_set);
        }
    }

    #[test]
    fn engel_generic_orbits_have_codim_two() {
        let alg = catalog::builtin("engel4").unwrap().algebra().clone();
        let p = Covector::new(&[0.3, -0.7, 0.45, 0.9]);
        let r = orbit_report(&alg, &p, DEFAULT_RANK_TOL);
        assert_eq!(r.codim, 2);
        assert!(!r.in_generic_set);
    }

    #[test]
    fn sh2_light_cone_is_not_generic() {
        let alg = catalog::builtin("sh2").unwrap().algebra().clone();
        let r = orbit_report(&alg, &Covector::new(&[0.5, 0.5, 0.2]), DEFAULT_RANK_TOL);
        assert_eq!(r.codim, 1);
        assert!(!r.in_generic_set);
        let r = orbit_report(&alg, &Covector::new(&[0.5, 0.1, 0.2]), DEFAULT_RANK_TOL);
        assert!(r.in_generic_set);
    }
}
