use super::{BoundaryTag, CrackSide, SlitMesh};
use std::io::{self, Write};

/// Plain-text dump with 0-based indices:
///
/// ```text
/// nodes <N>
/// <x> <y> <geometric node> <dirichlet 0|1>
/// triangles <T>
/// <a> <b> <c> <component>
/// boundary_edges <B>
/// <a> <b> <triangle> <dirichlet|neumann|crack+|crack-|crack?>
/// ```
pub fn write_mesh(mesh: &SlitMesh, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "# slit mesh, indices are 0-based")?;
    writeln!(w, "nodes {}", mesh.nodes.len())?;
    for (i, p) in mesh.nodes.iter().enumerate() {
        writeln!(
            w,
            "{:.17e} {:.17e} {} {}",
            p.x, p.y, mesh.geo_of[i], mesh.dirichlet[i] as u8
        )?;
    }
    writeln!(w, "triangles {}", mesh.triangles.len())?;
    for (t, [a, b, c]) in mesh.triangles.iter().enumerate() {
        writeln!(w, "{a} {b} {c} {}", mesh.triangle_component[t])?;
    }
    writeln!(w, "boundary_edges {}", mesh.boundary_edges.len())?;
    for e in &mesh.boundary_edges {
        let tag = match e.tag {
            BoundaryTag::Dirichlet => "dirichlet",
            BoundaryTag::Neumann => "neumann",
            BoundaryTag::CrackFace(CrackSide::Plus) => "crack+",
            BoundaryTag::CrackFace(CrackSide::Minus) => "crack-",
            BoundaryTag::CrackFace(CrackSide::Undetermined) => "crack?",
        };
        writeln!(w, "{} {} {} {tag}", e.nodes[0], e.nodes[1], e.triangle)?;
    }
    Ok(())
}
