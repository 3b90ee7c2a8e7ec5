//! Tensor-product Lagrange spaces on the structured mesh.
//!
//! Every space is a product of a horizontal factor (constant or linear in x,
//! always discontinuous between columns) and a vertical factor (constant,
//! linear or quadratic in y). Local dofs are numbered `l = a * ny_nodes + b`
//! with `a` the x node and `b` the y node, nodes ordered bottom-left first.
//!
//! `DG1xCG2` is the only partially continuous space: its y-vertex nodes are
//! shared by the two elements of a column that meet there. Its global dofs
//! are numbered column by column, and inside a column by y level then x node,
//! so that one column is a contiguous, narrowly banded block.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Largest local dof count of any supported space.
pub const MAX_LOCAL_DOFS: usize = 6;

const NODES_CONSTANT: [f64; 1] = [0.5];
const NODES_LINEAR: [f64; 2] = [0.0, 1.0];
const NODES_QUADRATIC: [f64; 3] = [0.0, 0.5, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// Piecewise constants.
    Dg0,
    /// Discontinuous bilinear.
    Dg1Dg1,
    /// Discontinuous, linear in x and quadratic in y.
    Dg1Dg2,
    /// Linear in x (discontinuous), quadratic and continuous in y.
    Dg1Cg2,
}

impl SpaceKind {
    pub fn x_nodes(self) -> &'static [f64] {
        match self {
            SpaceKind::Dg0 => &NODES_CONSTANT,
            _ => &NODES_LINEAR,
        }
    }

    pub fn y_nodes(self) -> &'static [f64] {
        match self {
            SpaceKind::Dg0 => &NODES_CONSTANT,
            SpaceKind::Dg1Dg1 => &NODES_LINEAR,
            SpaceKind::Dg1Dg2 | SpaceKind::Dg1Cg2 => &NODES_QUADRATIC,
        }
    }

    pub fn local_dofs(self) -> usize {
        self.x_nodes().len() * self.y_nodes().len()
    }

    pub fn is_discontinuous(self) -> bool {
        !matches!(self, SpaceKind::Dg1Cg2)
    }

    /// Reference coordinates of local node `l`.
    pub fn local_node(self, l: usize) -> (f64, f64) {
        let ny = self.y_nodes().len();
        (self.x_nodes()[l / ny], self.y_nodes()[l % ny])
    }

    /// Smallest fully discontinuous space containing this one.
    pub fn discontinuous_envelope(self) -> SpaceKind {
        match self {
            SpaceKind::Dg1Cg2 => SpaceKind::Dg1Dg2,
            other => other,
        }
    }
}

/// Lagrange basis on `nodes` at `t`: returns (value, derivative) of basis `k`.
fn lagrange_1d(nodes: &[f64], k: usize, t: f64) -> (f64, f64) {
    let mut value = 1.0;
    let mut deriv = 0.0;
    for (m, &xm) in nodes.iter().enumerate() {
        if m == k {
            continue;
        }
        let scale = 1.0 / (nodes[k] - xm);
        deriv = deriv * (t - xm) * scale + value * scale;
        value *= (t - xm) * scale;
    }
    (value, deriv)
}

/// Basis values and reference gradients at one point.
#[derive(Clone, Copy, Debug)]
pub struct BasisEval {
    len: usize,
    values: [f64; MAX_LOCAL_DOFS],
    grads: [[f64; 2]; MAX_LOCAL_DOFS],
}

impl BasisEval {
    pub fn values(&self) -> &[f64] {
        &self.values[..self.len]
    }

    /// Gradients with respect to the reference coordinates `(xi, eta)`.
    pub fn grads(&self) -> &[[f64; 2]] {
        &self.grads[..self.len]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

const REF_TOL: f64 = 1e-14;

/// Evaluate the local basis of `kind` at `(xi, eta)` in the unit square.
pub fn eval_basis(kind: SpaceKind, xi: f64, eta: f64) -> Result<BasisEval> {
    let inside = |t: f64| (-REF_TOL..=1.0 + REF_TOL).contains(&t);
    if !(inside(xi) && inside(eta)) {
        return Err(Error::OutsideReferenceCell { xi, eta });
    }
    Ok(eval_basis_unchecked(kind, xi, eta))
}

pub(crate) fn eval_basis_unchecked(kind: SpaceKind, xi: f64, eta: f64) -> BasisEval {
    let xn = kind.x_nodes();
    let yn = kind.y_nodes();
    let mut out = BasisEval {
        len: xn.len() * yn.len(),
        values: [0.0; MAX_LOCAL_DOFS],
        grads: [[0.0; 2]; MAX_LOCAL_DOFS],
    };
    for a in 0..xn.len() {
        let (px, dpx) = lagrange_1d(xn, a, xi);
        for b in 0..yn.len() {
            let (py, dpy) = lagrange_1d(yn, b, eta);
            let l = a * yn.len() + b;
            out.values[l] = px * py;
            out.grads[l] = [dpx * py, px * dpy];
        }
    }
    out
}

/// A finite element space on a mesh: kind plus global dof numbering.
#[derive(Debug)]
pub struct FieldSpace {
    kind: SpaceKind,
    mesh: Arc<Mesh>,
    dof_map: Vec<usize>,
    num_dofs: usize,
}

impl FieldSpace {
    pub fn new(kind: SpaceKind, mesh: Arc<Mesh>) -> Arc<Self> {
        let nloc = kind.local_dofs();
        let ne = mesh.num_elements();
        let (dof_map, num_dofs) = match kind {
            SpaceKind::Dg1Cg2 => {
                let ny = mesh.ny();
                let per_column = 2 * (2 * ny + 1);
                let mut map = Vec::with_capacity(ne * nloc);
                for e in 0..ne {
                    let (i, j) = mesh.element_ij(e);
                    for a in 0..2 {
                        for b in 0..3 {
                            map.push(i * per_column + 2 * (2 * j + b) + a);
                        }
                    }
                }
                (map, mesh.nx() * per_column)
            }
            _ => ((0..ne * nloc).collect(), ne * nloc),
        };
        Arc::new(FieldSpace {
            kind,
            mesh,
            dof_map,
            num_dofs,
        })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn num_dofs(&self) -> usize {
        self.num_dofs
    }

    pub fn local_dofs(&self) -> usize {
        self.kind.local_dofs()
    }

    /// Global dof indices of element `e`, in local order.
    #[inline]
    pub fn element_dofs(&self, e: usize) -> &[usize] {
        let n = self.kind.local_dofs();
        &self.dof_map[e * n..(e + 1) * n]
    }

    /// Number of dofs in one column block of a `DG1xCG2` space.
    pub fn column_block_size(&self) -> usize {
        match self.kind {
            SpaceKind::Dg1Cg2 => 2 * (2 * self.mesh.ny() + 1),
            _ => self.local_dofs() * self.mesh.ny(),
        }
    }

    /// Physical position of every global dof's node.
    pub fn dof_positions(&self) -> Vec<[f64; 2]> {
        let mut pos = vec![[0.0; 2]; self.num_dofs];
        for e in 0..self.mesh.num_elements() {
            for (l, &g) in self.element_dofs(e).iter().enumerate() {
                let (xi, eta) = self.kind.local_node(l);
                pos[g] = self.mesh.map_point(e, xi, eta);
            }
        }
        pos
    }

    /// True when both spaces are of the same kind on the same mesh.
    pub fn same_as(&self, other: &FieldSpace) -> bool {
        self.kind == other.kind && self.shares_mesh(other)
    }

    pub fn shares_mesh(&self, other: &FieldSpace) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh)
            || (self.mesh.nx() == other.mesh.nx()
                && self.mesh.ny() == other.mesh.ny()
                && self.mesh.lx() == other.mesh.lx()
                && self.mesh.ly() == other.mesh.ly()
                && self.mesh.periodic_x() == other.mesh.periodic_x())
    }

    pub(crate) fn expect_kind(&self, kind: SpaceKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                expected: kind,
                found: self.kind,
            })
        }
    }
}
