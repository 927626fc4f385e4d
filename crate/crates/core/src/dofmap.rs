//! Global numbering of continuous Lagrange degrees of freedom.
//!
//! Vertices come first (in mesh order), then `k − 1` nodes per edge (in
//! edge-table order, listed from the lower global vertex index upwards), then
//! one interior node per triangle for k = 3.

use crate::elements::{edge_vertices, node_count, ReferenceBasis, Vec2};
use crate::error::{Error, Result};
use crate::mesh::Mesh;

#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    degree: usize,
    local_to_global: Vec<usize>,
    total: usize,
    boundary: Vec<bool>,
    coordinates: Vec<Vec2>,
}

impl DofMap {
    pub fn new(mesh: &Mesh, degree: usize) -> Result<Self> {
        if !(1..=3).contains(&degree) {
            return Err(Error::UnsupportedDegree(degree));
        }
        let edges = mesh.edges();
        let nv = mesh.num_vertices();
        let ne = edges.endpoints.len();
        let per_edge = degree - 1;
        let interior = usize::from(degree == 3);
        let total = nv + per_edge * ne + interior * mesh.num_triangles();
        let nloc = node_count(degree);

        let mut coordinates = vec![[0.0; 2]; total];
        let mut boundary = vec![false; total];
        coordinates[..nv].copy_from_slice(&mesh.vertices);
        for (e, &[a, b]) in edges.endpoints.iter().enumerate() {
            let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
            for j in 0..per_edge {
                let t = (j + 1) as f64 / degree as f64;
                coordinates[nv + per_edge * e + j] = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
            }
        }

        let mut local_to_global = Vec::with_capacity(nloc * mesh.num_triangles());
        for (k, t) in mesh.triangles.iter().enumerate() {
            local_to_global.extend_from_slice(&t.v);
            for le in 0..3 {
                let (la, lb) = edge_vertices(le);
                let ge = edges.of_triangle[k][le];
                let base = nv + per_edge * ge;
                // global edge nodes run from the lower global vertex index
                let forward = t.v[la] < t.v[lb];
                for j in 0..per_edge {
                    let jj = if forward { j } else { per_edge - 1 - j };
                    local_to_global.push(base + jj);
                }
                if t.boundary[le] {
                    boundary[t.v[la]] = true;
                    boundary[t.v[lb]] = true;
                    for j in 0..per_edge {
                        boundary[base + j] = true;
                    }
                }
            }
            if interior == 1 {
                let g = nv + per_edge * ne + k;
                let [p0, p1, p2] = mesh.corners(k);
                coordinates[g] = [(p0[0] + p1[0] + p2[0]) / 3.0, (p0[1] + p1[1] + p2[1]) / 3.0];
                local_to_global.push(g);
            }
        }
        Ok(Self {
            degree,
            local_to_global,
            total,
            boundary,
            coordinates,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn local_count(&self) -> usize {
        node_count(self.degree)
    }

    pub fn total_dofs(&self) -> usize {
        self.total
    }

    pub fn cell_dofs(&self, k: usize) -> &[usize] {
        let n = self.local_count();
        &self.local_to_global[k * n..(k + 1) * n]
    }

    pub fn is_boundary(&self, dof: usize) -> bool {
        self.boundary[dof]
    }

    pub fn boundary_dofs(&self) -> Vec<usize> {
        (0..self.total).filter(|&i| self.boundary[i]).collect()
    }

    pub fn coordinates(&self) -> &[Vec2] {
        &self.coordinates
    }

    /// Nodal interpolant: the field evaluated at every Lagrange node.
    pub fn interpolate(&self, field: impl Fn(Vec2) -> Result<f64>) -> Result<Vec<f64>> {
        self.coordinates.iter().map(|&p| field(p)).collect()
    }

    pub fn reference_basis(&self) -> ReferenceBasis {
        ReferenceBasis::new(self.degree).expect("degree validated at construction")
    }
}

/// Position of the three solution blocks `(u, σ₁, σ₂)` in one global vector
/// and the split into free and Dirichlet-constrained entries.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockLayout {
    pub u_dofs: usize,
    pub sigma_dofs: usize,
    /// global index → position among the free unknowns
    free_index: Vec<Option<usize>>,
    free: Vec<usize>,
    constrained: Vec<usize>,
}

impl BlockLayout {
    pub fn new(u_map: &DofMap, sigma_map: &DofMap) -> Self {
        let u_dofs = u_map.total_dofs();
        let sigma_dofs = sigma_map.total_dofs();
        let n = u_dofs + 2 * sigma_dofs;
        let mut free_index = vec![None; n];
        let mut free = Vec::new();
        let mut constrained = Vec::new();
        for (g, slot) in free_index.iter_mut().enumerate() {
            if g < u_dofs && u_map.is_boundary(g) {
                constrained.push(g);
            } else {
                *slot = Some(free.len());
                free.push(g);
            }
        }
        Self {
            u_dofs,
            sigma_dofs,
            free_index,
            free,
            constrained,
        }
    }

    pub fn total(&self) -> usize {
        self.u_dofs + 2 * self.sigma_dofs
    }

    pub fn u_offset(&self) -> usize {
        0
    }

    /// Offset of σ component `c` (0 or 1).
    pub fn sigma_offset(&self, c: usize) -> usize {
        self.u_dofs + c * self.sigma_dofs
    }

    pub fn free_index(&self, global: usize) -> Option<usize> {
        self.free_index[global]
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn constrained(&self) -> &[usize] {
        &self.constrained
    }

    pub fn num_free(&self) -> usize {
        self.free.len()
    }

    /// Block id (0 = u, 1 = σ₁, 2 = σ₂) of a global index.
    pub fn block_of(&self, global: usize) -> usize {
        if global < self.u_dofs {
            0
        } else {
            1 + (global - self.u_dofs) / self.sigma_dofs
        }
    }
}
