//! Legacy-VTK and CSV writers for solution fields.

use std::io::Write as _;
use std::path::Path;

use super::element::ElementContext;
use super::fields::{OrderField, PotentialField};
use super::space::Discretization;
use crate::mesh::Mesh2D;

/// Writes a state as legacy-VTK ASCII: point data |u|^2, Re u, Im u at the
/// vertices and cell data (A1, A2) and curl A per triangle.
pub fn write_field_vtk(
    mesh: &Mesh2D,
    u: &OrderField,
    a: &PotentialField,
    path: &Path,
) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "glenn fields")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", mesh.num_vertices())?;
    for v in &mesh.vertices {
        writeln!(out, "{:.17e} {:.17e} 0.0", v[0], v[1])?;
    }
    writeln!(out, "CELLS {} {}", mesh.num_triangles(), 4 * mesh.num_triangles())?;
    for t in &mesh.triangles {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(out, "CELL_TYPES {}", mesh.num_triangles())?;
    for _ in 0..mesh.num_triangles() {
        writeln!(out, "5")?;
    }

    writeln!(out, "POINT_DATA {}", mesh.num_vertices())?;
    writeln!(out, "SCALARS density double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for v in 0..mesh.num_vertices() {
        writeln!(out, "{:.17e}", u.coeffs[v].norm_sqr())?;
    }
    writeln!(out, "SCALARS re_u double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for v in 0..mesh.num_vertices() {
        writeln!(out, "{:.17e}", u.coeffs[v].re)?;
    }
    writeln!(out, "SCALARS im_u double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for v in 0..mesh.num_vertices() {
        writeln!(out, "{:.17e}", u.coeffs[v].im)?;
    }

    writeln!(out, "CELL_DATA {}", mesh.num_triangles())?;
    writeln!(out, "VECTORS potential double")?;
    // Centroid has barycentric coordinates (1/3, 1/3, 1/3); the Whitney
    // value there comes from the element tables at no extra machinery.
    for t in 0..mesh.num_triangles() {
        let val = potential_at_centroid(mesh, a, t);
        writeln!(out, "{:.17e} {:.17e} 0.0", val[0], val[1])?;
    }
    writeln!(out, "SCALARS curl_a double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for t in 0..mesh.num_triangles() {
        let ctx = ElementContext::new(mesh, t);
        writeln!(out, "{:.17e}", ctx.eval_potential_curl(&a.coeffs))?;
    }
    Ok(())
}

fn potential_at_centroid(mesh: &Mesh2D, a: &PotentialField, t: usize) -> [f64; 2] {
    let ctx = ElementContext::new(mesh, t);
    let third = 1.0 / 3.0;
    let mut acc = [0.0; 2];
    for (k, (va, vb)) in super::element::LOCAL_EDGE_VERTICES.into_iter().enumerate() {
        let sign = mesh.triangle_edges[t][k].sign as f64;
        let c = a.coeffs[ctx.edge_dofs[k]];
        let (ga, gb) = (ctx.grad_lambda[va], ctx.grad_lambda[vb]);
        acc[0] += c * sign * third * (gb[0] - ga[0]);
        acc[1] += c * sign * third * (gb[1] - ga[1]);
    }
    acc
}

/// Writes all P2 nodal densities |u|^2 with their coordinates.
pub fn write_density_csv(
    disc: &Discretization,
    u: &OrderField,
    path: &Path,
) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "node,x,y,density")?;
    for d in 0..u.len() {
        let p = disc.p2_node(d);
        writeln!(
            out,
            "{},{:.17e},{:.17e},{:.17e}",
            d,
            p[0],
            p[1],
            u.coeffs[d].norm_sqr()
        )?;
    }
    Ok(())
}

/// Raw coefficient dump: one line per dof.
pub fn write_coefficients_csv(
    u: &OrderField,
    a: &PotentialField,
    path: &Path,
) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "space,index,value_re,value_im")?;
    for (k, c) in u.coeffs.iter().enumerate() {
        writeln!(out, "order,{},{:.17e},{:.17e}", k, c.re, c.im)?;
    }
    for (k, c) in a.coeffs.iter().enumerate() {
        writeln!(out, "potential,{},{:.17e},0.0", k, c)?;
    }
    Ok(())
}

/// Reads a density CSV back; returns (node, x, y, density) rows.
pub fn read_density_csv(path: &Path) -> std::io::Result<Vec<(usize, f64, f64, f64)>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for line in text.lines().skip(1) {
        let mut parts = line.split(',');
        let node = parts.next().unwrap().parse::<usize>().unwrap();
        let x = parts.next().unwrap().parse::<f64>().unwrap();
        let y = parts.next().unwrap().parse::<f64>().unwrap();
        let d = parts.next().unwrap().parse::<f64>().unwrap();
        rows.push((node, x, y, d));
    }
    Ok(rows)
}
