//! Mass operators: element matrices and their global assemblies.
//!
//! The mesh is uniform, so every element matrix is the same; it is built once
//! by quadrature on the reference cell and scaled by the element area.

use nalgebra::DMatrix;
use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};
use crate::quadrature::CellRule;
use crate::space::{eval_basis_unchecked, FieldSpace, SpaceKind};

/// `∫_e φ_i ψ_k dx` for a test space and a trial space on one element.
pub fn element_mixed_mass(test: SpaceKind, trial: SpaceKind, area: f64) -> DMatrix<f64> {
    let rule = CellRule::gauss3();
    let mut m = DMatrix::zeros(test.local_dofs(), trial.local_dofs());
    for (&(xi, eta), w) in rule.points.iter().zip(&rule.weights) {
        let phi = eval_basis_unchecked(test, xi, eta);
        let psi = eval_basis_unchecked(trial, xi, eta);
        for (i, p) in phi.values().iter().enumerate() {
            for (k, q) in psi.values().iter().enumerate() {
                m[(i, k)] += w * area * p * q;
            }
        }
    }
    m
}

/// `∫_e φ_i φ_j dx` on one element.
pub fn element_mass(kind: SpaceKind, area: f64) -> DMatrix<f64> {
    element_mixed_mass(kind, kind, area)
}

/// `∫_e φ_i dx` on one element.
pub fn element_lumped_mass(kind: SpaceKind, area: f64) -> Vec<f64> {
    let rule = CellRule::gauss3();
    let mut m = vec![0.0; kind.local_dofs()];
    for (&(xi, eta), w) in rule.points.iter().zip(&rule.weights) {
        let phi = eval_basis_unchecked(kind, xi, eta);
        for (mi, p) in m.iter_mut().zip(phi.values()) {
            *mi += w * area * p;
        }
    }
    m
}

/// Lumped mass vector `M_i = ∫_Ω φ_i dx`.
pub fn lumped_mass(space: &FieldSpace) -> Vec<f64> {
    let mesh = space.mesh();
    let local = element_lumped_mass(space.kind(), mesh.element_area());
    let mut m = vec![0.0; space.num_dofs()];
    for e in 0..mesh.num_elements() {
        for (&g, v) in space.element_dofs(e).iter().zip(&local) {
            m[g] += v;
        }
    }
    m
}

/// Consistent mass matrix `M_ij = ∫_Ω φ_i φ_j dx`.
pub fn consistent_mass(space: &FieldSpace) -> CsMat<f64> {
    let local = element_mass(space.kind(), space.mesh().element_area());
    assemble(space, space, &local)
}

/// Projection matrix `Q_ik = ∫_Ω φ_i ψ_k dx` between two spaces on one mesh.
pub fn mixed_mass(test: &FieldSpace, trial: &FieldSpace) -> Result<CsMat<f64>> {
    if !test.shares_mesh(trial) {
        return Err(Error::MeshMismatch);
    }
    let local = element_mixed_mass(test.kind(), trial.kind(), test.mesh().element_area());
    Ok(assemble(test, trial, &local))
}

fn assemble(rows: &FieldSpace, cols: &FieldSpace, local: &DMatrix<f64>) -> CsMat<f64> {
    let ne = rows.mesh().num_elements();
    let mut tri = TriMat::with_capacity(
        (rows.num_dofs(), cols.num_dofs()),
        ne * local.nrows() * local.ncols(),
    );
    for e in 0..ne {
        for (i, &gi) in rows.element_dofs(e).iter().enumerate() {
            for (k, &gk) in cols.element_dofs(e).iter().enumerate() {
                tri.add_triplet(gi, gk, local[(i, k)]);
            }
        }
    }
    // duplicate triplets are summed on conversion
    tri.to_csr()
}

/// Row sums of a sparse matrix.
pub fn row_sums(m: &CsMat<f64>) -> Vec<f64> {
    m.outer_iterator()
        .map(|row| row.data().iter().sum())
        .collect()
}

/// `y = A x` for a CSR matrix.
pub fn mat_vec(a: &CsMat<f64>, x: &[f64]) -> Vec<f64> {
    a.outer_iterator()
        .map(|row| row.iter().map(|(k, v)| v * x[k]).sum())
        .collect()
}
