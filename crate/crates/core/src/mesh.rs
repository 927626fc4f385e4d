//! Conforming triangle meshes.
//!
//! Triangles are stored counterclockwise. Local edge `e` is opposite local
//! vertex `e`, and `refinement_edge` names the edge a bisection splits: the
//! vertex opposite it is the "newest vertex". Uniform refinement is the red
//! 4-split; adaptive refinement is newest-vertex bisection with an
//! edge-marking closure, so every output is conforming.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::elements::Vec2;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainId {
    /// (−1/2, 1/2)², four triangles around the center
    UnitSquareCentered,
    /// (0, 1)², four triangles around the center
    UnitSquare,
    /// (0, 1/2)², four triangles around the center
    HalfSquare,
    /// (−1, 1)², four triangles around the center
    BiunitSquare,
    /// (−1, 1)² \ [0, 1) × (−1, 0], six triangles fanned from the origin
    LShape,
    /// (0, 1)² split along the diagonal
    TwoTriangle,
}

impl DomainId {
    pub const ALL: [DomainId; 6] = [
        DomainId::UnitSquareCentered,
        DomainId::UnitSquare,
        DomainId::HalfSquare,
        DomainId::BiunitSquare,
        DomainId::LShape,
        DomainId::TwoTriangle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DomainId::UnitSquareCentered => "unit-square-centered",
            DomainId::UnitSquare => "unit-square",
            DomainId::HalfSquare => "half-square",
            DomainId::BiunitSquare => "biunit-square",
            DomainId::LShape => "L-shape",
            DomainId::TwoTriangle => "two-triangle",
        }
    }

    pub fn area(self) -> f64 {
        match self {
            DomainId::UnitSquareCentered | DomainId::UnitSquare | DomainId::TwoTriangle => 1.0,
            DomainId::HalfSquare => 0.25,
            DomainId::BiunitSquare => 4.0,
            DomainId::LShape => 3.0,
        }
    }
}

impl FromStr for DomainId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DomainId::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName {
                kind: "domain",
                name: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    pub v: [usize; 3],
    pub refinement_edge: u8,
    pub boundary: [bool; 3],
}

/// Unique edges of a mesh, numbered in first-encounter order.
#[derive(Debug, Clone)]
pub struct EdgeTable {
    /// endpoints, lower vertex index first
    pub endpoints: Vec<[usize; 2]>,
    /// global edge index of each local edge
    pub of_triangle: Vec<[usize; 3]>,
    /// number of incident triangles
    pub incidence: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vec2>,
    pub triangles: Vec<Triangle>,
    pub generation: usize,
    /// index of each triangle's parent in the previous generation (empty for an initial mesh)
    pub parents: Vec<usize>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn dist(a: Vec2, b: Vec2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn midpoint(a: Vec2, b: Vec2) -> Vec2 {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

fn longest_edge(p: [Vec2; 3]) -> u8 {
    let len = |e: usize| dist(p[(e + 1) % 3], p[(e + 2) % 3]);
    let mut best = 0;
    for e in 1..3 {
        if len(e) > len(best) * (1.0 + 1e-12) {
            best = e;
        }
    }
    best as u8
}

impl Mesh {
    /// Builds a mesh from raw connectivity; boundary flags are the edges with a
    /// single incident triangle and refinement edges are the longest edges.
    pub fn from_connectivity(vertices: Vec<Vec2>, tris: Vec<[usize; 3]>) -> Self {
        let mut count: HashMap<(usize, usize), u8> = HashMap::new();
        for t in &tris {
            for e in 0..3 {
                *count.entry(edge_key(t[(e + 1) % 3], t[(e + 2) % 3])).or_default() += 1;
            }
        }
        let triangles = tris
            .iter()
            .map(|&v| {
                let boundary = std::array::from_fn(|e| count[&edge_key(v[(e + 1) % 3], v[(e + 2) % 3])] == 1);
                Triangle {
                    v,
                    refinement_edge: longest_edge(v.map(|i| vertices[i])),
                    boundary,
                }
            })
            .collect();
        Mesh {
            vertices,
            triangles,
            generation: 0,
            parents: Vec::new(),
        }
    }

    pub fn initial(domain: DomainId) -> Self {
        let square = |x0: f64, x1: f64, y0: f64, y1: f64| {
            let vertices = vec![
                [0.5 * (x0 + x1), 0.5 * (y0 + y1)],
                [x0, y0],
                [x1, y0],
                [x1, y1],
                [x0, y1],
            ];
            let tris = vec![[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 1]];
            Mesh::from_connectivity(vertices, tris)
        };
        match domain {
            DomainId::UnitSquareCentered => square(-0.5, 0.5, -0.5, 0.5),
            DomainId::UnitSquare => square(0.0, 1.0, 0.0, 1.0),
            DomainId::HalfSquare => square(0.0, 0.5, 0.0, 0.5),
            DomainId::BiunitSquare => square(-1.0, 1.0, -1.0, 1.0),
            DomainId::TwoTriangle => Mesh::from_connectivity(
                vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
                vec![[0, 1, 2], [0, 2, 3]],
            ),
            DomainId::LShape => {
                let vertices = vec![
                    [0.0, 0.0],
                    [1.0, 0.0],
                    [1.0, 1.0],
                    [0.0, 1.0],
                    [-1.0, 1.0],
                    [-1.0, 0.0],
                    [-1.0, -1.0],
                    [0.0, -1.0],
                ];
                let tris = (1..7).map(|i| [0, i, i + 1]).collect();
                Mesh::from_connectivity(vertices, tris)
            }
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn corners(&self, k: usize) -> [Vec2; 3] {
        self.triangles[k].v.map(|i| self.vertices[i])
    }

    pub fn signed_area(&self, k: usize) -> f64 {
        let [a, b, c] = self.corners(k);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|k| self.signed_area(k)).sum()
    }

    /// Longest edge length of triangle `k`.
    pub fn element_diameter(&self, k: usize) -> Result<f64> {
        if k >= self.num_triangles() {
            return Err(Error::TriangleIndex {
                index: k,
                count: self.num_triangles(),
            });
        }
        let p = self.corners(k);
        Ok((0..3).map(|e| dist(p[(e + 1) % 3], p[(e + 2) % 3])).fold(0.0, f64::max))
    }

    pub fn diameters(&self) -> Vec<f64> {
        (0..self.num_triangles())
            .map(|k| self.element_diameter(k).expect("index in range"))
            .collect()
    }

    pub fn h_max(&self) -> f64 {
        self.diameters().into_iter().fold(0.0, f64::max)
    }

    /// Interior angles of triangle `k`, in radians, local vertex order.
    pub fn angles(&self, k: usize) -> [f64; 3] {
        let p = self.corners(k);
        std::array::from_fn(|i| {
            let (a, b, c) = (p[i], p[(i + 1) % 3], p[(i + 2) % 3]);
            let u = [b[0] - a[0], b[1] - a[1]];
            let v = [c[0] - a[0], c[1] - a[1]];
            (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1]).abs()
        })
    }

    pub fn min_angle(&self) -> f64 {
        (0..self.num_triangles())
            .flat_map(|k| self.angles(k))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn edges(&self) -> EdgeTable {
        let mut index: HashMap<(usize, usize), usize> = HashMap::with_capacity(2 * self.num_triangles());
        let mut endpoints = Vec::new();
        let mut incidence = Vec::new();
        let of_triangle = self
            .triangles
            .iter()
            .map(|t| {
                std::array::from_fn(|e| {
                    let key = edge_key(t.v[(e + 1) % 3], t.v[(e + 2) % 3]);
                    let id = *index.entry(key).or_insert_with(|| {
                        endpoints.push([key.0, key.1]);
                        incidence.push(0);
                        endpoints.len() - 1
                    });
                    incidence[id] += 1;
                    id
                })
            })
            .collect();
        EdgeTable {
            endpoints,
            of_triangle,
            incidence,
        }
    }

    /// Edge-incidence scan: every edge is shared by two triangles, or by one
    /// triangle that flags it as boundary. A hanging node leaves an unflagged
    /// edge with a single neighbour, so it fails the scan.
    pub fn is_conforming(&self) -> bool {
        let edges = self.edges();
        let areas_ok = (0..self.num_triangles()).all(|k| self.signed_area(k) > 0.0);
        let edges_ok = self.triangles.iter().zip(&edges.of_triangle).all(|(t, ids)| {
            (0..3).all(|e| match edges.incidence[ids[e]] {
                2 => !t.boundary[e],
                1 => t.boundary[e],
                _ => false,
            })
        });
        areas_ok && edges_ok
    }

    /// Red refinement: every triangle is split into four similar children
    /// through its edge midpoints.
    pub fn uniform_refine(&self) -> Mesh {
        let mut vertices = self.vertices.clone();
        let mut mids: HashMap<(usize, usize), usize> = HashMap::with_capacity(2 * self.num_triangles());
        let mut triangles = Vec::with_capacity(4 * self.num_triangles());
        let mut parents = Vec::with_capacity(4 * self.num_triangles());
        for (k, t) in self.triangles.iter().enumerate() {
            let m: [usize; 3] = std::array::from_fn(|e| {
                let (a, b) = (t.v[(e + 1) % 3], t.v[(e + 2) % 3]);
                *mids.entry(edge_key(a, b)).or_insert_with(|| {
                    vertices.push(midpoint(self.vertices[a], self.vertices[b]));
                    vertices.len() - 1
                })
            });
            let [v0, v1, v2] = t.v;
            let b = t.boundary;
            // Each child's local edge e is parallel to (or part of) the parent's
            // edge e, so the refinement edge index carries over unchanged.
            let children = [
                ([v0, m[2], m[1]], [false, b[1], b[2]]),
                ([m[2], v1, m[0]], [b[0], false, b[2]]),
                ([m[1], m[0], v2], [b[0], b[1], false]),
                ([m[0], m[1], m[2]], [false; 3]),
            ];
            for (v, boundary) in children {
                triangles.push(Triangle {
                    v,
                    refinement_edge: t.refinement_edge,
                    boundary,
                });
                parents.push(k);
            }
        }
        Mesh {
            vertices,
            triangles,
            generation: self.generation + 1,
            parents,
        }
    }

    /// Newest-vertex bisection of the marked triangles plus conforming closure.
    pub fn bisect(&self, marked: &[usize]) -> Result<Mesh> {
        for &k in marked {
            if k >= self.num_triangles() {
                return Err(Error::TriangleIndex {
                    index: k,
                    count: self.num_triangles(),
                });
            }
        }
        let edges = self.edges();
        let ref_edge = |k: usize| edges.of_triangle[k][self.triangles[k].refinement_edge as usize];
        let mut split = vec![false; edges.endpoints.len()];
        for &k in marked {
            split[ref_edge(k)] = true;
        }
        // Closure: a triangle with any split edge must also split its refinement edge.
        let max_sweeps = self.num_triangles() + 1;
        let mut sweeps = 0;
        loop {
            let mut changed = false;
            for k in 0..self.num_triangles() {
                let r = ref_edge(k);
                if !split[r] && edges.of_triangle[k].iter().any(|&e| split[e]) {
                    split[r] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            sweeps += 1;
            if sweeps > max_sweeps {
                return Err(Error::ClosureDiverged(sweeps));
            }
        }

        let mut vertices = self.vertices.clone();
        let mut mid = vec![usize::MAX; edges.endpoints.len()];
        for (e, [a, b]) in edges.endpoints.iter().enumerate() {
            if split[e] {
                vertices.push(midpoint(self.vertices[*a], self.vertices[*b]));
                mid[e] = vertices.len() - 1;
            }
        }
        let mid_of = |a: usize, b: usize, k: usize| -> Option<usize> {
            let t = &self.triangles[k];
            (0..3)
                .find(|&e| edge_key(t.v[(e + 1) % 3], t.v[(e + 2) % 3]) == edge_key(a, b))
                .map(|e| edges.of_triangle[k][e])
                .filter(|&id| split[id])
                .map(|id| mid[id])
        };

        let mut triangles = Vec::with_capacity(2 * self.num_triangles());
        let mut parents = Vec::with_capacity(2 * self.num_triangles());
        for (k, t) in self.triangles.iter().enumerate() {
            let r = ref_edge(k);
            if !split[r] {
                triangles.push(*t);
                parents.push(k);
                continue;
            }
            let (c1, c2) = split_triangle(t, mid[r]);
            for child in [c1, c2] {
                let e = child.refinement_edge as usize;
                let (a, b) = (child.v[(e + 1) % 3], child.v[(e + 2) % 3]);
                match mid_of(a, b, k) {
                    Some(m) => {
                        let (g1, g2) = split_triangle(&child, m);
                        triangles.extend([g1, g2]);
                        parents.extend([k, k]);
                    }
                    None => {
                        triangles.push(child);
                        parents.push(k);
                    }
                }
            }
        }
        Ok(Mesh {
            vertices,
            triangles,
            generation: self.generation + 1,
            parents,
        })
    }

    /// Plain-text dump: a `nv nt` header, `x y` per vertex, `i j k b0 b1 b2`
    /// per triangle.
    pub fn write_text(&self, mut w: impl Write) -> Result<()> {
        let mut s = String::new();
        writeln!(s, "{} {}", self.num_vertices(), self.num_triangles()).unwrap();
        for [x, y] in &self.vertices {
            writeln!(s, "{x:?} {y:?}").unwrap();
        }
        for t in &self.triangles {
            let b = t.boundary.map(u8::from);
            writeln!(s, "{} {} {} {} {} {}", t.v[0], t.v[1], t.v[2], b[0], b[1], b[2]).unwrap();
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    }

    /// Reads the format of [`Mesh::write_text`]. Refinement edges are reset to
    /// the longest edge of each triangle.
    pub fn read_text(r: impl BufRead) -> Result<Mesh> {
        let mut lines = r.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, Vec<String>)> {
            loop {
                let (i, line) = lines.next().ok_or_else(|| Error::MeshFormat {
                    line: 0,
                    msg: format!("unexpected end of file, expected {what}"),
                })?;
                let line = line?;
                let fields: Vec<String> = line.split_whitespace().map(str::to_string).collect();
                if !fields.is_empty() {
                    return Ok((i + 1, fields));
                }
            }
        };
        fn parse<T: FromStr>(line: usize, s: &str) -> Result<T> {
            s.parse().map_err(|_| Error::MeshFormat {
                line,
                msg: format!("cannot parse '{s}'"),
            })
        }
        let (l, head) = next("header")?;
        if head.len() != 2 {
            return Err(Error::MeshFormat {
                line: l,
                msg: "header must be 'nv nt'".into(),
            });
        }
        let nv: usize = parse(l, &head[0])?;
        let nt: usize = parse(l, &head[1])?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (l, f) = next("vertex")?;
            if f.len() != 2 {
                return Err(Error::MeshFormat {
                    line: l,
                    msg: "vertex line must be 'x y'".into(),
                });
            }
            let p: Vec2 = [parse(l, &f[0])?, parse(l, &f[1])?];
            if !p.iter().all(|c| c.is_finite()) {
                return Err(Error::MeshFormat {
                    line: l,
                    msg: "non-finite coordinate".into(),
                });
            }
            vertices.push(p);
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (l, f) = next("triangle")?;
            if f.len() != 6 {
                return Err(Error::MeshFormat {
                    line: l,
                    msg: "triangle line must be 'i j k b0 b1 b2'".into(),
                });
            }
            let v: [usize; 3] = [parse(l, &f[0])?, parse(l, &f[1])?, parse(l, &f[2])?];
            if v.iter().any(|&i| i >= nv) {
                return Err(Error::MeshFormat {
                    line: l,
                    msg: "vertex index out of range".into(),
                });
            }
            let b: [u8; 3] = [parse(l, &f[3])?, parse(l, &f[4])?, parse(l, &f[5])?];
            triangles.push(Triangle {
                v,
                refinement_edge: longest_edge(v.map(|i| vertices[i])),
                boundary: b.map(|x| x != 0),
            });
        }
        Ok(Mesh {
            vertices,
            triangles,
            generation: 0,
            parents: Vec::new(),
        })
    }
}

/// Bisects `t` across its refinement edge at vertex `m`. Both children take
/// `m` as their newest vertex.
fn split_triangle(t: &Triangle, m: usize) -> (Triangle, Triangle) {
    let e = t.refinement_edge as usize;
    let (top, a, b) = (t.v[e], t.v[(e + 1) % 3], t.v[(e + 2) % 3]);
    let bd = t.boundary;
    (
        Triangle {
            v: [top, a, m],
            refinement_edge: 2,
            boundary: [bd[e], false, bd[(e + 2) % 3]],
        },
        Triangle {
            v: [top, m, b],
            refinement_edge: 1,
            boundary: [bd[e], bd[(e + 1) % 3], false],
        },
    )
}
