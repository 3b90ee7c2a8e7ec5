//! Dense reference assembly by 5-point Gauss quadrature.
//!
//! Basis functions are defined here from scratch in physical coordinates,
//! and matched to the library's dof numbering only through node positions.

use embedded_dg::operators::{consistent_mass, element_mass, lumped_mass, mixed_mass};
use embedded_dg::transport::{ExteriorFlux, Transport};
use embedded_dg::{Field, FieldSpace, Mesh, SpaceKind, VelocityField};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

const GAUSS5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GAUSS5_W: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// Gauss points and weights on `[0, 1]`.
fn gauss01() -> impl Iterator<Item = (f64, f64)> {
    GAUSS5_X
        .iter()
        .zip(&GAUSS5_W)
        .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
}

fn lagrange(nodes: &[f64], k: usize, t: f64) -> (f64, f64) {
    let mut value = 1.0;
    let mut deriv = 0.0;
    for (m, &tm) in nodes.iter().enumerate() {
        if m == k {
            continue;
        }
        let denom = nodes[k] - tm;
        deriv = deriv * (t - tm) / denom + value / denom;
        value *= (t - tm) / denom;
    }
    (value, deriv)
}

/// A global basis function of the oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Dof {
    /// Continuous in y: column `i`, x node `a`, y level `k` in half cells.
    Cg { i: usize, a: usize, k: usize },
    /// Element `(i, j)`, x node `a`, y node `b`.
    Dg {
        i: usize,
        j: usize,
        a: usize,
        b: usize,
    },
}

struct OracleSpace {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    y_nodes: Vec<f64>,
    continuous: bool,
    dofs: Vec<Dof>,
}

impl OracleSpace {
    fn new(mesh: &Mesh, kind: SpaceKind) -> Self {
        let (nx, ny) = (mesh.nx(), mesh.ny());
        let y_nodes = match kind {
            SpaceKind::Dg1Dg1 => vec![0.0, 1.0],
            SpaceKind::Dg1Dg2 | SpaceKind::Dg1Cg2 => vec![0.0, 0.5, 1.0],
            SpaceKind::Dg0 => panic!("oracle covers the linear-in-x spaces only"),
        };
        let continuous = kind == SpaceKind::Dg1Cg2;
        let mut dofs = Vec::new();
        for i in 0..nx {
            for a in 0..2 {
                if continuous {
                    for k in 0..=2 * ny {
                        dofs.push(Dof::Cg { i, a, k });
                    }
                } else {
                    for j in 0..ny {
                        for b in 0..y_nodes.len() {
                            dofs.push(Dof::Dg { i, j, a, b });
                        }
                    }
                }
            }
        }
        OracleSpace {
            nx,
            ny,
            dx: mesh.dx(),
            dy: mesh.dy(),
            y_nodes,
            continuous,
            dofs,
        }
    }

    /// Value and physical gradient of `dof` in element `(i, j)` at local `(ξ, η)`.
    fn eval(&self, dof: Dof, i: usize, j: usize, xi: f64, eta: f64) -> (f64, [f64; 2]) {
        let x_nodes = [0.0, 1.0];
        let (col, a, yv) = match dof {
            Dof::Cg { i: di, a, k } => {
                // y level k sits at local node k − 2j of element j when inside it
                let local = k as isize - 2 * j as isize;
                if !(0..=2).contains(&local) {
                    return (0.0, [0.0; 2]);
                }
                (di, a, lagrange(&self.y_nodes, local as usize, eta))
            }
            Dof::Dg { i: di, j: dj, a, b } => {
                if dj != j {
                    return (0.0, [0.0; 2]);
                }
                (di, a, lagrange(&self.y_nodes, b, eta))
            }
        };
        if col != i {
            return (0.0, [0.0; 2]);
        }
        let xv = lagrange(&x_nodes, a, xi);
        (xv.0 * yv.0, [xv.1 * yv.0 / self.dx, xv.0 * yv.1 / self.dy])
    }

    fn position(&self, dof: Dof) -> [f64; 2] {
        match dof {
            Dof::Cg { i, a, k } => [(i + a) as f64 * self.dx, k as f64 * 0.5 * self.dy],
            Dof::Dg { i, j, a, b } => [
                (i + a) as f64 * self.dx,
                (j as f64 + self.y_nodes[b]) * self.dy,
            ],
        }
    }

    fn touches(&self, dof: Dof, i: usize, j: usize) -> bool {
        match dof {
            Dof::Cg { i: di, k, .. } => di == i && (2 * j..=2 * j + 2).contains(&k),
            Dof::Dg { i: di, j: dj, .. } => di == i && dj == j,
        }
    }

    /// Library global index of every oracle dof, found by node position.
    fn library_indices(&self, space: &FieldSpace) -> Vec<usize> {
        let mesh = space.mesh();
        let kind = space.kind();
        let mut map = vec![usize::MAX; self.dofs.len()];
        for e in 0..mesh.num_elements() {
            let (i, j) = mesh.element_ij(e);
            for (l, &g) in space.element_dofs(e).iter().enumerate() {
                let (xi, eta) = kind.local_node(l);
                let p = [(i as f64 + xi) * self.dx, (j as f64 + eta) * self.dy];
                let d = self
                    .dofs
                    .iter()
                    .position(|&d| {
                        self.touches(d, i, j) && {
                            let q = self.position(d);
                            (q[0] - p[0]).abs() < 1e-12 && (q[1] - p[1]).abs() < 1e-12
                        }
                    })
                    .expect("every library node has an oracle dof");
                assert!(
                    map[d] == usize::MAX || map[d] == g,
                    "dof map disagrees between elements"
                );
                map[d] = g;
            }
        }
        assert!(map.iter().all(|&g| g != usize::MAX));
        map
    }

    fn elements(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.nx).flat_map(move |i| (0..self.ny).map(move |j| (i, j)))
    }
}

/// `∫ φ_r ψ_c` over the domain, in oracle dof order.
fn dense_mixed(test: &OracleSpace, trial: &OracleSpace) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(test.dofs.len(), trial.dofs.len());
    let area = test.dx * test.dy;
    for (i, j) in test.elements() {
        for (xi, wx) in gauss01() {
            for (eta, wy) in gauss01() {
                for (r, &dr) in test.dofs.iter().enumerate() {
                    let pr = test.eval(dr, i, j, xi, eta).0;
                    if pr == 0.0 {
                        continue;
                    }
                    for (c, &dc) in trial.dofs.iter().enumerate() {
                        m[(r, c)] += wx * wy * area * pr * trial.eval(dc, i, j, xi, eta).0;
                    }
                }
            }
        }
    }
    m
}

/// Permutes an oracle-ordered dense matrix into library order.
fn to_library(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for (r, &gr) in rows.iter().enumerate() {
        for (c, &gc) in cols.iter().enumerate() {
            out[(gr, gc)] = m[(r, c)];
        }
    }
    out
}

fn sparse_to_dense(m: &sprs::CsMat<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m.rows(), m.cols());
    for (v, (r, c)) in m.iter() {
        out[(r, c)] += *v;
    }
    out
}

/// Largest entry difference relative to the largest oracle entry.
pub fn relative_gap(oracle: &[f64], library: &[f64]) -> f64 {
    assert_eq!(oracle.len(), library.len());
    let scale = oracle
        .iter()
        .fold(0.0f64, |s, v| s.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    oracle
        .iter()
        .zip(library)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale
}

/// Oracle `Lθ` for piecewise-constant `θ = values[e]` on `DG1xDG2`.
fn oracle_apply_l(
    mesh: &Mesh,
    velocity: VelocityField,
    exterior: ExteriorFlux,
    values: &[f64],
    t: f64,
    dt: f64,
) -> Vec<f64> {
    let space = OracleSpace::new(mesh, SpaceKind::Dg1Dg2);
    let (dx, dy) = (space.dx, space.dy);
    let mut out = vec![0.0; mesh.num_elements() * 6];
    let local_mass = dense_mixed(&space, &space);
    for (i, j) in space.elements() {
        let e = mesh.element_index(i, j);
        let local: Vec<Dof> = space
            .dofs
            .iter()
            .copied()
            .filter(|&d| space.touches(d, i, j))
            .collect();
        let mut rhs = DVector::zeros(local.len());
        let c = values[e];
        // volume term
        for (xi, wx) in gauss01() {
            for (eta, wy) in gauss01() {
                let [u, v] = velocity.eval((i as f64 + xi) * dx, (j as f64 + eta) * dy, t);
                for (r, &d) in local.iter().enumerate() {
                    let g = space.eval(d, i, j, xi, eta).1;
                    rhs[r] += dt * wx * wy * dx * dy * c * (g[0] * u + g[1] * v);
                }
            }
        }
        // facet terms, side by side with the outward normal
        let sides: [(f64, f64, [f64; 2], Option<(usize, usize)>); 4] = {
            let left = if i > 0 {
                Some((i - 1, j))
            } else if mesh.periodic_x() {
                Some((space.nx - 1, j))
            } else {
                None
            };
            let right = if i + 1 < space.nx {
                Some((i + 1, j))
            } else if mesh.periodic_x() {
                Some((0, j))
            } else {
                None
            };
            let bottom = (j > 0).then(|| (i, j - 1));
            let top = (j + 1 < space.ny).then_some((i, j + 1));
            [
                (0.0, f64::NAN, [-1.0, 0.0], left),
                (1.0, f64::NAN, [1.0, 0.0], right),
                (f64::NAN, 0.0, [0.0, -1.0], bottom),
                (f64::NAN, 1.0, [0.0, 1.0], top),
            ]
        };
        for (fx, fy, n, neighbour) in sides {
            let len = if fx.is_nan() { dx } else { dy };
            let point = |s: f64| if fx.is_nan() { (s, fy) } else { (fx, s) };
            let normal_speed = |s: f64| {
                let (xi, eta) = point(s);
                let [u, v] = velocity.eval((i as f64 + xi) * dx, (j as f64 + eta) * dy, t);
                u * n[0] + v * n[1]
            };
            // affine velocity: u·n changes sign at most once, at a linear root
            let (u0, u1) = (normal_speed(0.0), normal_speed(1.0));
            let pieces = if u0 * u1 < 0.0 {
                let r = u0 / (u0 - u1);
                vec![(0.0, r), (r, 1.0)]
            } else {
                vec![(0.0, 1.0)]
            };
            let points = pieces
                .into_iter()
                .flat_map(|(a, b)| gauss01().map(move |(s, w)| (a + (b - a) * s, w * (b - a))));
            for (s, w) in points {
                let (xi, eta) = point(s);
                let [u, v] = velocity.eval((i as f64 + xi) * dx, (j as f64 + eta) * dy, t);
                let un = u * n[0] + v * n[1];
                let upstream = match neighbour {
                    // closed boundary: interior facets only
                    None if exterior == ExteriorFlux::Closed => continue,
                    _ if un > 0.0 => c,
                    None => 0.0,
                    Some((ni, nj)) => values[mesh.element_index(ni, nj)],
                };
                for (r, &d) in local.iter().enumerate() {
                    let phi = space.eval(d, i, j, xi, eta).0;
                    rhs[r] -= dt * w * len * phi * un * upstream;
                }
            }
        }
        let rows: Vec<usize> = local
            .iter()
            .map(|d| space.dofs.iter().position(|x| x == d).unwrap())
            .collect();
        let block = DMatrix::from_fn(rows.len(), rows.len(), |r, c| {
            local_mass[(rows[r], rows[c])]
        });
        let sol = block.lu().solve(&rhs).expect("element mass is invertible");
        // local oracle dofs of one element map to e·6 + library local index
        for (r, &d) in local.iter().enumerate() {
            if let Dof::Dg { a, b, .. } = d {
                out[e * 6 + a * 3 + b] = sol[r];
            }
        }
    }
    out
}

/// One comparison of an assembled operator against the oracle.
#[derive(Debug)]
pub struct OracleCheck {
    pub what: String,
    pub gap: f64,
}

/// Every operator comparison on one mesh.
pub fn check_mesh(mesh: Arc<Mesh>) -> Vec<OracleCheck> {
    let label = format!(
        "{}x{}{}",
        mesh.nx(),
        mesh.ny(),
        if mesh.periodic_x() { " periodic" } else { "" }
    );
    let mut checks = Vec::new();
    let mut push = |what: &str, gap: f64| {
        checks.push(OracleCheck {
            what: format!("{label} {what}"),
            gap,
        })
    };

    let cg = FieldSpace::new(SpaceKind::Dg1Cg2, mesh.clone());
    let dg1 = FieldSpace::new(SpaceKind::Dg1Dg1, mesh.clone());
    let dg2 = FieldSpace::new(SpaceKind::Dg1Dg2, mesh.clone());
    let ocg = OracleSpace::new(&mesh, SpaceKind::Dg1Cg2);
    let odg1 = OracleSpace::new(&mesh, SpaceKind::Dg1Dg1);
    let odg2 = OracleSpace::new(&mesh, SpaceKind::Dg1Dg2);
    let (icg, idg1, idg2) = (
        ocg.library_indices(&cg),
        odg1.library_indices(&dg1),
        odg2.library_indices(&dg2),
    );
    assert!(ocg.continuous && !odg2.continuous);

    let m = to_library(&dense_mixed(&ocg, &ocg), &icg, &icg);
    push(
        "consistent mass",
        relative_gap(
            m.as_slice(),
            sparse_to_dense(&consistent_mass(&cg)).as_slice(),
        ),
    );

    let lumped: Vec<f64> = m.row_iter().map(|r| r.sum()).collect();
    push("lumped mass", relative_gap(&lumped, &lumped_mass(&cg)));

    let q = to_library(&dense_mixed(&ocg, &odg1), &icg, &idg1);
    let lib_q = sparse_to_dense(&mixed_mass(&cg, &dg1).expect("same mesh"));
    push(
        "projection matrix Q",
        relative_gap(q.as_slice(), lib_q.as_slice()),
    );

    let dg_mass = to_library(&dense_mixed(&odg2, &odg2), &idg2, &idg2);
    let block = DMatrix::from_fn(6, 6, |r, c| dg_mass[(r, c)]);
    push(
        "DG element mass",
        relative_gap(
            block.as_slice(),
            element_mass(SpaceKind::Dg1Dg2, mesh.element_area()).as_slice(),
        ),
    );

    let values: Vec<f64> = (0..mesh.num_elements())
        .map(|e| 1.0 + 0.7 * e as f64 - 0.3 * (e % 3) as f64)
        .collect();
    let mut coeffs = vec![0.0; dg2.num_dofs()];
    for e in 0..mesh.num_elements() {
        for &g in dg2.element_dofs(e) {
            coeffs[g] = values[e];
        }
    }
    let theta = Field::new(dg2.clone(), coeffs).expect("sized to the space");
    for velocity in [VelocityField::SolidBody, VelocityField::Translation] {
        for exterior in [ExteriorFlux::Closed, ExteriorFlux::Upwind] {
            let transport = Transport::new(dg2.clone(), velocity)
                .expect("discontinuous space")
                .with_exterior_flux(exterior);
            let lib = transport.apply_l(&theta, 0.0, 0.01).expect("same space");
            let oracle = oracle_apply_l(&mesh, velocity, exterior, &values, 0.0, 0.01);
            push(
                &format!("apply_L ({velocity}, {exterior} boundary)"),
                relative_gap(&oracle, lib.coeffs()),
            );
        }
    }
    checks
}

/// The small meshes covered by the oracle.
pub fn oracle_meshes() -> Vec<Arc<Mesh>> {
    vec![
        Arc::new(Mesh::new(1, 2, 1.0, 1.0, false).unwrap()),
        Arc::new(Mesh::new(2, 2, 1.0, 1.0, false).unwrap()),
        Arc::new(Mesh::new(2, 2, 1.0, 1.0, true).unwrap()),
        Arc::new(Mesh::new(2, 2, 1.3, 0.7, true).unwrap()),
    ]
}
