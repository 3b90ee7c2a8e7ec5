//! Structured mesh connectivity: element and vertex numbering, facets and
//! the periodic seam.
//!
//! ```text
//! cargo run --example mesh_connectivity
//! ```

use embedded_dg::Mesh;

fn main() -> embedded_dg::Result<()> {
    let mesh = Mesh::unit_square(4, 3, true)?;
    println!(
        "{}x{} periodic mesh: {} elements, {} vertices, dx = {}, dy = {}",
        mesh.nx(),
        mesh.ny(),
        mesh.num_elements(),
        mesh.num_vertices(),
        mesh.dx(),
        mesh.dy()
    );

    for e in [0, 5, 11] {
        let (i, j) = mesh.element_ij(e);
        println!(
            "element {e} = column {i}, layer {j}, vertices {:?}",
            mesh.element_vertices(e)
        );
    }

    println!(
        "columns: {:?}",
        (0..mesh.nx()).map(|i| mesh.column(i)).collect::<Vec<_>>()
    );

    println!(
        "{} interior facets ({} vertical, {} horizontal), {} boundary facets",
        mesh.interior_facets().count(),
        mesh.vertical_facets().len(),
        mesh.horizontal_facets().len(),
        mesh.boundary_facets().len()
    );

    // the seam facet joins the left side of column 0 to the right side of the last column
    let seam = mesh
        .vertical_facets()
        .iter()
        .find(|f| mesh.element_ij(f.plus.element).0 == 0 && mesh.element_ij(f.minus.element).0 == 3)
        .expect("periodic mesh has seam facets");
    println!(
        "seam facet: + element {} ({:?}), - element {} ({:?}), normal {:?}",
        seam.plus.element, seam.plus.side, seam.minus.element, seam.minus.side, seam.normal
    );

    let v = mesh.vertex_index(0, 1);
    println!(
        "vertex {v} at {:?} touches elements {:?}",
        mesh.vertex_position(v),
        mesh.vertex_element_adjacency(v)?
    );
    Ok(())
}
