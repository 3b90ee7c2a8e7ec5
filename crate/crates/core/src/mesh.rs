//! Structured quadrilateral mesh of a rectangular vertical slice.
//!
//! Elements are indexed column-major, `e = i * ny + j`, so each column
//! `{(i, j) : 0 <= j < ny}` is a contiguous index range and index order is
//! the lexicographic order of `(i, j)`. Vertices are indexed the same way,
//! `v = i * (ny + 1) + j`, with `nx` vertex columns instead of `nx + 1` when
//! the mesh is periodic in x.
//!
//! Interior facets are split into vertical edges (normal along x, between
//! horizontal neighbours) and horizontal edges (normal along y, between
//! vertical neighbours). Each facet labels its two sides `+` and `-`; the
//! `+` side is always the element with the smaller `(i, j)`, and the stored
//! normal is the outward unit normal of the `+` element.

use crate::error::{Error, Result};

/// One of the four sides of a reference element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// xi = 0
    Left,
    /// xi = 1
    Right,
    /// eta = 0
    Bottom,
    /// eta = 1
    Top,
}

impl Side {
    /// Outward unit normal of this side.
    pub fn outward_normal(self) -> [f64; 2] {
        match self {
            Side::Left => [-1.0, 0.0],
            Side::Right => [1.0, 0.0],
            Side::Bottom => [0.0, -1.0],
            Side::Top => [0.0, 1.0],
        }
    }

    /// Reference coordinates of the point at facet parameter `s` in [0, 1].
    pub fn reference_point(self, s: f64) -> (f64, f64) {
        match self {
            Side::Left => (0.0, s),
            Side::Right => (1.0, s),
            Side::Bottom => (s, 0.0),
            Side::Top => (s, 1.0),
        }
    }

    /// True for sides with a normal along x.
    pub fn is_vertical(self) -> bool {
        matches!(self, Side::Left | Side::Right)
    }
}

/// An element together with one of its sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ElementSide {
    pub element: usize,
    pub side: Side,
}

/// Interior facet shared by two elements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Facet {
    pub plus: ElementSide,
    pub minus: ElementSide,
    /// Outward unit normal of the `+` element; the `-` normal is its negation.
    pub normal: [f64; 2],
}

impl Facet {
    pub fn normal_plus(&self) -> [f64; 2] {
        self.normal
    }

    pub fn normal_minus(&self) -> [f64; 2] {
        [-self.normal[0], -self.normal[1]]
    }
}

/// Facet on the exterior boundary of a non-periodic direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryFacet {
    pub inner: ElementSide,
    pub normal: [f64; 2],
}

/// Structured `nx x ny` grid on `[0, lx] x [0, ly]`; y is the vertical.
#[derive(Clone, Debug)]
pub struct Mesh {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    dx: f64,
    dy: f64,
    periodic_x: bool,
    vertical_facets: Vec<Facet>,
    horizontal_facets: Vec<Facet>,
    boundary_facets: Vec<BoundaryFacet>,
}

impl Mesh {
    /// Build the grid and its facet connectivity.
    ///
    /// A periodic mesh needs at least two columns so that the wrap facet
    /// joins two distinct elements.
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64, periodic_x: bool) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidMesh(format!(
                "element counts must be positive (nx = {nx}, ny = {ny})"
            )));
        }
        if !(lx > 0.0 && lx.is_finite() && ly > 0.0 && ly.is_finite()) {
            return Err(Error::InvalidMesh(format!(
                "extents must be positive and finite (lx = {lx}, ly = {ly})"
            )));
        }
        if periodic_x && nx < 2 {
            return Err(Error::InvalidMesh(
                "a periodic mesh needs at least two columns".into(),
            ));
        }

        let mut mesh = Mesh {
            nx,
            ny,
            lx,
            ly,
            dx: lx / nx as f64,
            dy: ly / ny as f64,
            periodic_x,
            vertical_facets: Vec::new(),
            horizontal_facets: Vec::new(),
            boundary_facets: Vec::new(),
        };
        mesh.build_facets();
        Ok(mesh)
    }

    /// The unit square `(0, 1)^2` split into `nx x ny` elements.
    pub fn unit_square(nx: usize, ny: usize, periodic_x: bool) -> Result<Self> {
        Self::new(nx, ny, 1.0, 1.0, periodic_x)
    }

    fn build_facets(&mut self) {
        let (nx, ny) = (self.nx, self.ny);

        for i in 0..nx {
            for j in 0..ny {
                let e = self.element_index(i, j);
                if i + 1 < nx {
                    self.vertical_facets.push(Facet {
                        plus: ElementSide {
                            element: e,
                            side: Side::Right,
                        },
                        minus: ElementSide {
                            element: self.element_index(i + 1, j),
                            side: Side::Left,
                        },
                        normal: Side::Right.outward_normal(),
                    });
                }
                if j + 1 < ny {
                    self.horizontal_facets.push(Facet {
                        plus: ElementSide {
                            element: e,
                            side: Side::Top,
                        },
                        minus: ElementSide {
                            element: self.element_index(i, j + 1),
                            side: Side::Bottom,
                        },
                        normal: Side::Top.outward_normal(),
                    });
                }
            }
        }

        for j in 0..ny {
            let first = self.element_index(0, j);
            let last = self.element_index(nx - 1, j);
            if self.periodic_x {
                // (0, j) precedes (nx - 1, j), so it owns the `+` side of the seam.
                self.vertical_facets.push(Facet {
                    plus: ElementSide {
                        element: first,
                        side: Side::Left,
                    },
                    minus: ElementSide {
                        element: last,
                        side: Side::Right,
                    },
                    normal: Side::Left.outward_normal(),
                });
            } else {
                for inner in [
                    ElementSide {
                        element: first,
                        side: Side::Left,
                    },
                    ElementSide {
                        element: last,
                        side: Side::Right,
                    },
                ] {
                    self.boundary_facets.push(BoundaryFacet {
                        inner,
                        normal: inner.side.outward_normal(),
                    });
                }
            }
        }
        for i in 0..nx {
            for (j, side) in [(0, Side::Bottom), (ny - 1, Side::Top)] {
                let inner = ElementSide {
                    element: self.element_index(i, j),
                    side,
                };
                self.boundary_facets.push(BoundaryFacet {
                    inner,
                    normal: side.outward_normal(),
                });
            }
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn periodic_x(&self) -> bool {
        self.periodic_x
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn element_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn num_elements(&self) -> usize {
        self.nx * self.ny
    }

    /// Number of distinct vertex columns (`nx` when periodic, else `nx + 1`).
    pub fn vertex_columns(&self) -> usize {
        if self.periodic_x {
            self.nx
        } else {
            self.nx + 1
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_columns() * (self.ny + 1)
    }

    #[inline]
    pub fn element_index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// `(i, j)` grid position of element `e`.
    #[inline]
    pub fn element_ij(&self, e: usize) -> (usize, usize) {
        (e / self.ny, e % self.ny)
    }

    /// Index of grid vertex `(i, j)`; `i == nx` wraps to column 0 when periodic.
    #[inline]
    pub fn vertex_index(&self, i: usize, j: usize) -> usize {
        let i = if self.periodic_x { i % self.nx } else { i };
        i * (self.ny + 1) + j
    }

    pub fn vertex_ij(&self, v: usize) -> (usize, usize) {
        (v / (self.ny + 1), v % (self.ny + 1))
    }

    pub fn vertex_position(&self, v: usize) -> [f64; 2] {
        let (i, j) = self.vertex_ij(v);
        [i as f64 * self.dx, j as f64 * self.dy]
    }

    /// Lower-left corner of element `e`.
    #[inline]
    pub fn element_origin(&self, e: usize) -> [f64; 2] {
        let (i, j) = self.element_ij(e);
        [i as f64 * self.dx, j as f64 * self.dy]
    }

    /// Physical position of reference point `(xi, eta)` in element `e`.
    #[inline]
    pub fn map_point(&self, e: usize, xi: f64, eta: f64) -> [f64; 2] {
        let [x0, y0] = self.element_origin(e);
        [x0 + xi * self.dx, y0 + eta * self.dy]
    }

    /// Corner vertices of element `e`, ordered `(a, b)` with `a` the x offset
    /// and `b` the y offset: `[(0,0), (0,1), (1,0), (1,1)]`.
    pub fn element_vertices(&self, e: usize) -> [usize; 4] {
        let (i, j) = self.element_ij(e);
        [
            self.vertex_index(i, j),
            self.vertex_index(i, j + 1),
            self.vertex_index(i + 1, j),
            self.vertex_index(i + 1, j + 1),
        ]
    }

    /// Elements incident to vertex `v`, in ascending index order.
    pub fn vertex_element_adjacency(&self, v: usize) -> Result<Vec<usize>> {
        if v >= self.num_vertices() {
            return Err(Error::InvalidVertex {
                id: v,
                count: self.num_vertices(),
            });
        }
        let (vi, vj) = self.vertex_ij(v);

        let mut columns = Vec::with_capacity(2);
        if self.periodic_x {
            columns.push((vi + self.nx - 1) % self.nx);
            columns.push(vi);
        } else {
            if vi > 0 {
                columns.push(vi - 1);
            }
            if vi < self.nx {
                columns.push(vi);
            }
        }
        let mut rows = Vec::with_capacity(2);
        if vj > 0 {
            rows.push(vj - 1);
        }
        if vj < self.ny {
            rows.push(vj);
        }

        let mut elements: Vec<usize> = columns
            .iter()
            .flat_map(|&i| rows.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.element_index(i, j))
            .collect();
        elements.sort_unstable();
        elements.dedup();
        Ok(elements)
    }

    /// Interior facets with a normal along x, including the periodic seam.
    pub fn vertical_facets(&self) -> &[Facet] {
        &self.vertical_facets
    }

    /// Interior facets with a normal along y.
    pub fn horizontal_facets(&self) -> &[Facet] {
        &self.horizontal_facets
    }

    pub fn interior_facets(&self) -> impl Iterator<Item = &Facet> {
        self.vertical_facets
            .iter()
            .chain(self.horizontal_facets.iter())
    }

    pub fn boundary_facets(&self) -> &[BoundaryFacet] {
        &self.boundary_facets
    }

    /// Element ids of column `i`, bottom to top.
    pub fn column(&self, i: usize) -> std::ops::Range<usize> {
        i * self.ny..(i + 1) * self.ny
    }
}
