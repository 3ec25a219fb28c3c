//! Conforming triangular meshes of the unit square and the L-shaped domain.
//!
//! Edge convention: every edge is stored as an ordered pair `(lo, hi)` of
//! vertex indices with `lo < hi`, and the global tangential orientation
//! always points from `lo` to `hi`. Within a triangle, the local traversal
//! sign is `+1` exactly when the triangle walks the edge from `lo` to `hi`.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("subdivision count must be at least 1 (got {0})")]
    InvalidSubdivisions(usize),
    #[error("L-shape requires an even subdivision count so the re-entrant corner is a mesh vertex (got {0})")]
    OddSubdivisions(usize),
}

/// One edge of a triangle, referred to by global edge index and the sign of
/// the local traversal relative to the global `lo -> hi` orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrientedEdge {
    pub edge: usize,
    pub sign: i8,
}

/// Conforming triangulation with globally oriented edges.
#[derive(Clone, Debug)]
pub struct Mesh2D {
    /// Vertex coordinates.
    pub vertices: Vec<[f64; 2]>,
    /// Vertex index triples, counterclockwise.
    pub triangles: Vec<[usize; 3]>,
    /// Edges as `(lo, hi)` vertex pairs, `lo < hi`.
    pub edges: Vec<(usize, usize)>,
    /// Per-triangle edges in local order `(v0,v1), (v1,v2), (v2,v0)`.
    pub triangle_edges: Vec<[OrientedEdge; 3]>,
    /// Edge indices lying on the domain boundary.
    pub boundary_edges: Vec<usize>,
    /// Vertex indices lying on the domain boundary.
    pub boundary_vertices: Vec<usize>,
}

impl Mesh2D {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Signed area of triangle `t` (positive for counterclockwise vertices).
    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let p = self.vertices[a];
        let q = self.vertices[b];
        let r = self.vertices[c];
        0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))
    }

    /// Total mesh area.
    pub fn area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.signed_area(t)).sum()
    }

    /// Midpoint of edge `e`.
    pub fn edge_midpoint(&self, e: usize) -> [f64; 2] {
        let (a, b) = self.edges[e];
        let p = self.vertices[a];
        let q = self.vertices[b];
        [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
    }

    /// Vector from the low to the high vertex of edge `e` (global tangent
    /// direction, length = edge length).
    pub fn edge_vector(&self, e: usize) -> [f64; 2] {
        let (a, b) = self.edges[e];
        let p = self.vertices[a];
        let q = self.vertices[b];
        [q[0] - p[0], q[1] - p[1]]
    }

    /// Builds the edge tables from vertex coordinates and triangle triples.
    ///
    /// Edges are numbered in first-encounter order while walking triangles,
    /// so the numbering is deterministic for a fixed triangle list.
    fn from_cells(vertices: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>) -> Self {
        let mut edge_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        let mut adjacency_count: Vec<u8> = Vec::new();

        for tri in &triangles {
            let mut local = [OrientedEdge { edge: 0, sign: 1 }; 3];
            for (k, (a, b)) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])]
                .into_iter()
                .enumerate()
            {
                let key = (a.min(b), a.max(b));
                let idx = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    adjacency_count.push(0);
                    edges.len() - 1
                });
                adjacency_count[idx] += 1;
                local[k] = OrientedEdge {
                    edge: idx,
                    sign: if a < b { 1 } else { -1 },
                };
            }
            triangle_edges.push(local);
        }

        let boundary_edges: Vec<usize> = (0..edges.len())
            .filter(|&e| adjacency_count[e] == 1)
            .collect();
        let mut on_boundary = vec![false; vertices.len()];
        for &e in &boundary_edges {
            on_boundary[edges[e].0] = true;
            on_boundary[edges[e].1] = true;
        }
        let boundary_vertices = (0..vertices.len()).filter(|&v| on_boundary[v]).collect();

        Self {
            vertices,
            triangles,
            edges,
            triangle_edges,
            boundary_edges,
            boundary_vertices,
        }
    }
}

/// Uniform right-triangle mesh of the unit square with `n` subdivisions per
/// side. All diagonals run from `(i/n, j/n)` to `((i+1)/n, (j+1)/n)`.
pub fn generate_unit_square(n: usize) -> Result<Mesh2D, MeshError> {
    if n == 0 {
        return Err(MeshError::InvalidSubdivisions(n));
    }
    let (vertices, triangles) = square_cells(n, |_, _| true);
    Ok(Mesh2D::from_cells(vertices, triangles))
}

/// L-shaped domain `(0,1)^2` minus the closed quadrant `[1/2,1] x [1/2,1]`.
/// `n` must be even so the re-entrant corner `(1/2, 1/2)` is a vertex.
pub fn generate_l_shape(n: usize) -> Result<Mesh2D, MeshError> {
    if n == 0 {
        return Err(MeshError::InvalidSubdivisions(n));
    }
    if n % 2 != 0 {
        return Err(MeshError::OddSubdivisions(n));
    }
    let half = n / 2;
    let (vertices, triangles) = square_cells(n, |i, j| !(i >= half && j >= half));
    Ok(Mesh2D::from_cells(vertices, triangles))
}

/// Grid cells of the structured square mesh, filtered by a cell predicate.
/// Unused vertices are dropped and the remaining ones renumbered row-major.
fn square_cells(
    n: usize,
    keep: impl Fn(usize, usize) -> bool,
) -> (Vec<[f64; 2]>, Vec<[usize; 3]>) {
    let grid = |i: usize, j: usize| j * (n + 1) + i;
    let mut used = vec![false; (n + 1) * (n + 1)];
    let mut cells = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if keep(i, j) {
                cells.push((i, j));
                for (a, b) in [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)] {
                    used[grid(a, b)] = true;
                }
            }
        }
    }

    let mut renumber = vec![usize::MAX; (n + 1) * (n + 1)];
    let mut vertices = Vec::new();
    let h = 1.0 / n as f64;
    for j in 0..=n {
        for i in 0..=n {
            if used[grid(i, j)] {
                renumber[grid(i, j)] = vertices.len();
                vertices.push([i as f64 * h, j as f64 * h]);
            }
        }
    }

    let mut triangles = Vec::with_capacity(2 * cells.len());
    for (i, j) in cells {
        let v00 = renumber[grid(i, j)];
        let v10 = renumber[grid(i + 1, j)];
        let v01 = renumber[grid(i, j + 1)];
        let v11 = renumber[grid(i + 1, j + 1)];
        // Diagonal from (i,j) to (i+1,j+1); both children counterclockwise.
        triangles.push([v00, v10, v11]);
        triangles.push([v00, v11, v01]);
    }
    (vertices, triangles)
}

/// Red refinement: every triangle is split into 4 congruent children through
/// its edge midpoints. New midpoint vertices are numbered after the parent
/// vertices, in parent edge order.
pub fn refine_uniform(mesh: &Mesh2D) -> Mesh2D {
    let nv = mesh.num_vertices();
    let mut vertices = mesh.vertices.clone();
    vertices.extend((0..mesh.num_edges()).map(|e| mesh.edge_midpoint(e)));

    let mut triangles = Vec::with_capacity(4 * mesh.num_triangles());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let [a, b, c] = *tri;
        let mab = nv + mesh.triangle_edges[t][0].edge;
        let mbc = nv + mesh.triangle_edges[t][1].edge;
        let mca = nv + mesh.triangle_edges[t][2].edge;
        triangles.push([a, mab, mca]);
        triangles.push([mab, b, mbc]);
        triangles.push([mca, mbc, c]);
        triangles.push([mab, mbc, mca]);
    }
    Mesh2D::from_cells(vertices, triangles)
}

/// Writes the mesh as legacy-VTK ASCII (POINTS + CELLS of type 5).
pub fn write_vtk(mesh: &Mesh2D, path: &Path) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "glenn mesh")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", mesh.num_vertices())?;
    for v in &mesh.vertices {
        writeln!(out, "{:.17e} {:.17e} 0.0", v[0], v[1])?;
    }
    writeln!(
        out,
        "CELLS {} {}",
        mesh.num_triangles(),
        4 * mesh.num_triangles()
    )?;
    for t in &mesh.triangles {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(out, "CELL_TYPES {}", mesh.num_triangles())?;
    for _ in 0..mesh.num_triangles() {
        writeln!(out, "5")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_invariants(mesh: &Mesh2D, expected_area: f64) {
        for t in 0..mesh.num_triangles() {
            assert!(mesh.signed_area(t) > 0.0, "triangle {t} not counterclockwise");
        }
        assert!((mesh.area() - expected_area).abs() < 1e-13);

        // Conformity: interior edges have exactly 2 adjacent triangles,
        // boundary edges exactly 1, and the two interior traversals oppose.
        let mut count = vec![0usize; mesh.num_edges()];
        let mut sign_sum = vec![0i32; mesh.num_edges()];
        for te in &mesh.triangle_edges {
            for oe in te {
                count[oe.edge] += 1;
                sign_sum[oe.edge] += oe.sign as i32;
            }
        }
        let boundary: std::collections::HashSet<_> = mesh.boundary_edges.iter().copied().collect();
        for e in 0..mesh.num_edges() {
            if boundary.contains(&e) {
                assert_eq!(count[e], 1);
            } else {
                assert_eq!(count[e], 2, "edge {e} adjacency");
                assert_eq!(sign_sum[e], 0, "edge {e} must be traversed once each way");
            }
        }

        // Euler relation for simply connected meshes.
        assert_eq!(
            mesh.num_vertices() as i64 - mesh.num_edges() as i64 + mesh.num_triangles() as i64,
            1
        );
    }

    #[test]
    fn unit_square_smallest() {
        let mesh = generate_unit_square(1).unwrap();
        assert_eq!(mesh.num_vertices(), 4);
        assert_eq!(mesh.num_triangles(), 2);
        assert_eq!(mesh.num_edges(), 5);
        check_invariants(&mesh, 1.0);
    }

    #[test]
    fn unit_square_counts_follow_closed_forms() {
        for n in [2usize, 3, 5, 8, 64] {
            let mesh = generate_unit_square(n).unwrap();
            assert_eq!(mesh.num_vertices(), (n + 1) * (n + 1));
            assert_eq!(mesh.num_triangles(), 2 * n * n);
            assert_eq!(mesh.num_edges(), 3 * n * n + 2 * n);
            if n <= 8 {
                check_invariants(&mesh, 1.0);
            }
        }
    }

    #[test]
    fn unit_square_rejects_zero() {
        assert!(matches!(
            generate_unit_square(0),
            Err(MeshError::InvalidSubdivisions(0))
        ));
    }

    #[test]
    fn l_shape_counts() {
        let mesh = generate_l_shape(2).unwrap();
        assert_eq!(mesh.num_vertices(), 8);
        assert_eq!(mesh.num_triangles(), 6);
        assert_eq!(mesh.num_edges(), 13);
        check_invariants(&mesh, 0.75);

        let mesh = generate_l_shape(4).unwrap();
        assert_eq!(mesh.num_vertices(), 21);
        assert_eq!(mesh.num_triangles(), 24);
        assert_eq!(mesh.num_edges(), 44);
        check_invariants(&mesh, 0.75);
    }

    #[test]
    fn l_shape_rejects_odd() {
        assert!(matches!(generate_l_shape(3), Err(MeshError::OddSubdivisions(3))));
        assert!(matches!(generate_l_shape(0), Err(MeshError::InvalidSubdivisions(0))));
    }

    #[test]
    fn l_shape_avoids_removed_quadrant() {
        let mesh = generate_l_shape(6).unwrap();
        for t in 0..mesh.num_triangles() {
            let [a, b, c] = mesh.triangles[t];
            let cx = (mesh.vertices[a][0] + mesh.vertices[b][0] + mesh.vertices[c][0]) / 3.0;
            let cy = (mesh.vertices[a][1] + mesh.vertices[b][1] + mesh.vertices[c][1]) / 3.0;
            assert!(!(cx > 0.5 && cy > 0.5), "centroid ({cx}, {cy}) in removed quadrant");
        }
        check_invariants(&mesh, 0.75);
    }

    #[test]
    fn refinement_matches_structured_mesh() {
        let coarse = generate_unit_square(1).unwrap();
        let fine = refine_uniform(&coarse);
        let reference = generate_unit_square(2).unwrap();
        assert_eq!(fine.num_vertices(), reference.num_vertices());
        assert_eq!(fine.num_triangles(), reference.num_triangles());
        assert_eq!(fine.num_edges(), reference.num_edges());
        check_invariants(&fine, 1.0);

        let mut got: Vec<_> = fine
            .vertices
            .iter()
            .map(|v| (v[0].to_bits(), v[1].to_bits()))
            .collect();
        let mut want: Vec<_> = reference
            .vertices
            .iter()
            .map(|v| (v[0].to_bits(), v[1].to_bits()))
            .collect();
        got.sort_unstable();
        want.sort_unstable();
        assert_eq!(got, want, "vertex sets agree up to numbering");
    }

    #[test]
    fn refinement_preserves_area_and_quadruples_cells() {
        let mesh = generate_l_shape(4).unwrap();
        let fine = refine_uniform(&mesh);
        assert_eq!(fine.num_triangles(), 4 * mesh.num_triangles());
        assert!((fine.area() - mesh.area()).abs() < 1e-14);
        check_invariants(&fine, 0.75);
    }

    #[test]
    fn refining_twice_matches_quadruple_subdivision() {
        let twice = refine_uniform(&refine_uniform(&generate_unit_square(1).unwrap()));
        let reference = generate_unit_square(4).unwrap();
        assert_eq!(twice.num_vertices(), reference.num_vertices());
        assert_eq!(twice.num_triangles(), reference.num_triangles());
        assert_eq!(twice.num_edges(), reference.num_edges());
    }

    #[test]
    fn vtk_dump_is_readable() {
        let mesh = generate_unit_square(2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mesh.vtk");
        write_vtk(&mesh, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("POINTS 9 double"));
        assert!(text.contains("CELL_TYPES 8"));
    }
}
