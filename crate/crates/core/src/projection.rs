//! Injection of `DG1xCG2` into `DG1xDG2` and the L² projection back.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::banded::BandCholesky;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::operators::element_mass;
use crate::space::{FieldSpace, SpaceKind};

/// Identify a `DG1xCG2` field as a member of `DG1xDG2` on the same mesh.
pub fn inject(theta: &Field) -> Result<Field> {
    let target = FieldSpace::new(SpaceKind::Dg1Dg2, theta.space().mesh().clone());
    inject_into(theta, &target)
}

/// [`inject`] into an existing `DG1xDG2` space.
pub fn inject_into(theta: &Field, target: &Arc<FieldSpace>) -> Result<Field> {
    let source = theta.space();
    source.expect_kind(SpaceKind::Dg1Cg2)?;
    target.expect_kind(SpaceKind::Dg1Dg2)?;
    if !source.shares_mesh(target) {
        return Err(Error::MeshMismatch);
    }
    let mut out = vec![0.0; target.num_dofs()];
    for e in 0..source.mesh().num_elements() {
        for (&g_dg, &g_cg) in target.element_dofs(e).iter().zip(source.element_dofs(e)) {
            out[g_dg] = theta.coeffs()[g_cg];
        }
    }
    Ok(Field::from_parts(target.clone(), out))
}

/// Consistent-mass projection `DG1xDG2 → DG1xCG2`.
///
/// The `DG1xCG2` mass matrix couples dofs only inside a column, and on the
/// uniform mesh every column block is the same banded matrix, so a single
/// band Cholesky factor serves all columns.
#[derive(Debug)]
pub struct Projector {
    target: Arc<FieldSpace>,
    element_mass: DMatrix<f64>,
    column: BandCholesky,
}

/// Half bandwidth of a `DG1xCG2` column block in its interleaved numbering.
const COLUMN_BANDWIDTH: usize = 5;

impl Projector {
    pub fn new(target: Arc<FieldSpace>) -> Result<Self> {
        target.expect_kind(SpaceKind::Dg1Cg2)?;
        let mesh = target.mesh().clone();
        let local = element_mass(SpaceKind::Dg1Cg2, mesh.element_area());

        let n = target.column_block_size();
        let mut block = DMatrix::<f64>::zeros(n, n);
        for e in mesh.column(0) {
            let dofs = target.element_dofs(e);
            for (i, &gi) in dofs.iter().enumerate() {
                for (j, &gj) in dofs.iter().enumerate() {
                    block[(gi, gj)] += local[(i, j)];
                }
            }
        }
        debug_assert!((0..n).all(|i| (0..n)
            .filter(|j| i.abs_diff(*j) > COLUMN_BANDWIDTH)
            .all(|j| block[(i, j)] == 0.0)));
        let column = BandCholesky::factor(n, COLUMN_BANDWIDTH, |i, j| block[(i, j)])?;

        Ok(Projector {
            target,
            element_mass: local,
            column,
        })
    }

    pub fn target(&self) -> &Arc<FieldSpace> {
        &self.target
    }

    /// Load vector `b_i = ∫ φ_i θ̂ dx` of a `DG1xDG2` field.
    pub fn load_vector(&self, theta_hat: &Field) -> Result<Vec<f64>> {
        let source = theta_hat.space();
        source.expect_kind(SpaceKind::Dg1Dg2)?;
        if !source.shares_mesh(&self.target) {
            return Err(Error::MeshMismatch);
        }
        let mut b = vec![0.0; self.target.num_dofs()];
        for e in 0..self.target.mesh().num_elements() {
            let local = theta_hat.local(e);
            for (i, &gi) in self.target.element_dofs(e).iter().enumerate() {
                let mut s = 0.0;
                for (k, c) in local.iter().enumerate().take(6) {
                    s += self.element_mass[(i, k)] * c;
                }
                b[gi] += s;
            }
        }
        Ok(b)
    }

    /// Solve `M x = b` column by column, in place.
    pub fn solve_mass_in_place(&self, b: &mut [f64]) {
        let n = self.column.dim();
        for block in b.chunks_exact_mut(n) {
            self.column.solve_in_place(block);
        }
    }

    /// `P θ̂`: the `DG1xCG2` field with `⟨v, Pθ̂⟩ = ⟨v, θ̂⟩` for all `v`.
    pub fn project(&self, theta_hat: &Field) -> Result<Field> {
        let mut b = self.load_vector(theta_hat)?;
        self.solve_mass_in_place(&mut b);
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "projection",
                element: None,
            });
        }
        Ok(Field::from_parts(self.target.clone(), b))
    }
}

/// One-shot projection; builds a [`Projector`] for the target space.
pub fn project(theta_hat: &Field) -> Result<Field> {
    let target = FieldSpace::new(SpaceKind::Dg1Cg2, theta_hat.space().mesh().clone());
    Projector::new(target)?.project(theta_hat)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::mesh::Mesh;
    use crate::operators::{consistent_mass, mat_vec};

    fn setup(nx: usize, ny: usize, periodic: bool) -> (Arc<FieldSpace>, Arc<FieldSpace>) {
        let mesh = Arc::new(Mesh::new(nx, ny, 1.0, 0.8, periodic).unwrap());
        (
            FieldSpace::new(SpaceKind::Dg1Cg2, mesh.clone()),
            FieldSpace::new(SpaceKind::Dg1Dg2, mesh),
        )
    }

    fn random_field(space: &Arc<FieldSpace>, rng: &mut ChaCha8Rng) -> Field {
        let v = (0..space.num_dofs())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        Field::new(space.clone(), v).unwrap()
    }

    #[test]
    fn injection_keeps_constants_and_duplicates_shared_nodes() {
        let (cg, dg) = setup(1, 2, false);
        let c = Field::constant(cg.clone(), 3.5);
        let ic = inject_into(&c, &dg).unwrap();
        assert!(ic.coeffs().iter().all(|&v| v == 3.5));

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let theta = random_field(&cg, &mut rng);
        let it = inject_into(&theta, &dg).unwrap();
        // top of element 0 and bottom of element 1 carry the same shared value
        assert_eq!(it.local(0)[2], it.local(1)[0]);
        assert_eq!(it.local(0)[5], it.local(1)[3]);
        assert_eq!(it.local(0)[2], theta.coeffs()[cg.element_dofs(0)[2]]);
        assert!((it.l2_norm() - theta.l2_norm()).abs() < 1e-13);
    }

    #[test]
    fn injection_rejects_wrong_space() {
        let (cg, dg) = setup(2, 2, false);
        let d = Field::zeros(dg.clone());
        assert!(matches!(inject(&d), Err(Error::SpaceMismatch { .. })));
        let p = Projector::new(cg).unwrap();
        let c = Field::zeros(p.target().clone());
        assert!(p.project(&c).is_err());
    }

    #[test]
    fn projection_inverts_injection() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for periodic in [false, true] {
            let (cg, dg) = setup(3, 5, periodic);
            let p = Projector::new(cg.clone()).unwrap();
            for _ in 0..5 {
                let theta = random_field(&cg, &mut rng);
                let back = p.project(&inject_into(&theta, &dg).unwrap()).unwrap();
                let scale = theta.coeffs().iter().fold(0.0f64, |m, v| m.max(v.abs()));
                assert!(back.max_abs_diff(&theta).unwrap() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn galerkin_orthogonality_and_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (cg, dg) = setup(3, 4, false);
        let p = Projector::new(cg.clone()).unwrap();
        let m = consistent_mass(&cg);
        for _ in 0..5 {
            let th = random_field(&dg, &mut rng);
            let ph = p.project(&th).unwrap();
            let b = p.load_vector(&th).unwrap();
            let mx = mat_vec(&m, ph.coeffs());
            for (a, c) in mx.iter().zip(&b) {
                assert!((a - c).abs() < 1e-13);
            }
            assert!((ph.integral() - th.integral()).abs() < 1e-13);
            assert!(ph.l2_norm() <= th.l2_norm() + 1e-12);
        }
    }

    #[test]
    fn elementwise_constants_project_exactly_when_global() {
        let (cg, dg) = setup(4, 3, true);
        let th = Field::constant(dg, -0.25);
        let ph = Projector::new(cg).unwrap().project(&th).unwrap();
        assert!(ph.coeffs().iter().all(|v| (v + 0.25).abs() < 1e-13));
    }
}
