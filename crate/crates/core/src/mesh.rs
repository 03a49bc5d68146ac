//! Structured conforming triangulations of the unit square.
//!
//! Every cell `[i/nx, (i+1)/nx] × [j/ny, (j+1)/ny]` is split along the
//! diagonal from its lower-left to its upper-right corner. Facets carry a
//! fixed unit normal (the outward normal of their first adjacent triangle),
//! boundary facets may be tagged Γ0/Γ1, and triangles may be tagged with the
//! data region ω and the interior error region G.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Point = [f64; 2];

/// One side of the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SquareSide {
    Left,
    Right,
    Bottom,
    Top,
}

impl SquareSide {
    pub const ALL: [SquareSide; 4] = [
        SquareSide::Left,
        SquareSide::Right,
        SquareSide::Bottom,
        SquareSide::Top,
    ];

    pub fn outward_normal(self) -> Point {
        match self {
            SquareSide::Left => [-1.0, 0.0],
            SquareSide::Right => [1.0, 0.0],
            SquareSide::Bottom => [0.0, -1.0],
            SquareSide::Top => [0.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Gamma0,
    Gamma1,
}

/// Element regions used by the data and error terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// ω, where interior data is measured.
    OmegaData,
    /// G, where interior errors are reported.
    InteriorG,
}

impl Region {
    fn index(self) -> usize {
        match self {
            Region::OmegaData => 0,
            Region::InteriorG => 1,
        }
    }
}

/// Closed axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };

    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x0 >= self.x0 && other.x1 <= self.x1 && other.y0 >= self.y0 && other.y1 <= self.y1
    }
}

/// An edge of the triangulation.
#[derive(Debug, Clone)]
pub struct Facet {
    /// Endpoints, sorted by global index.
    pub vertices: [usize; 2],
    /// Fixed unit normal; the outward normal of `cells[0]`.
    pub normal: Point,
    /// Adjacent triangles; the second is absent on the boundary.
    pub cells: [Option<usize>; 2],
    /// Local edge index of this facet within each adjacent triangle.
    pub local_index: [usize; 2],
    pub length: f64,
}

impl Facet {
    pub fn is_interior(&self) -> bool {
        self.cells[1].is_some()
    }

    pub fn midpoint(&self, mesh: &TriangleMesh) -> Point {
        let a = mesh.vertices[self.vertices[0]];
        let b = mesh.vertices[self.vertices[1]];
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    /// Point at parameter `s ∈ [0, 1]` from `vertices[0]` to `vertices[1]`.
    pub fn point_at(&self, mesh: &TriangleMesh, s: f64) -> Point {
        let a = mesh.vertices[self.vertices[0]];
        let b = mesh.vertices[self.vertices[1]];
        [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
    }
}

/// Affine data of one triangle.
#[derive(Debug, Clone, Copy)]
pub struct CellGeometry {
    pub area: f64,
    /// Gradients of the barycentric coordinates.
    pub grad_lambda: [Point; 3],
    pub centroid: Point,
    /// Longest edge.
    pub diameter: f64,
}

impl CellGeometry {
    fn new(p: [Point; 3]) -> Self {
        let twice_area =
            (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]);
        let mut grad_lambda = [[0.0; 2]; 3];
        for (i, g) in grad_lambda.iter_mut().enumerate() {
            let a = p[(i + 1) % 3];
            let b = p[(i + 2) % 3];
            *g = [(a[1] - b[1]) / twice_area, (b[0] - a[0]) / twice_area];
        }
        let centroid = [
            (p[0][0] + p[1][0] + p[2][0]) / 3.0,
            (p[0][1] + p[1][1] + p[2][1]) / 3.0,
        ];
        let diameter = (0..3)
            .map(|i| distance(p[i], p[(i + 1) % 3]))
            .fold(0.0, f64::max);
        CellGeometry {
            area: 0.5 * twice_area,
            grad_lambda,
            centroid,
            diameter,
        }
    }

    /// Barycentric coordinates of a physical point.
    pub fn barycentric(&self, x: Point) -> [f64; 3] {
        let d = [x[0] - self.centroid[0], x[1] - self.centroid[1]];
        let mut lam = [0.0; 3];
        for (l, g) in lam.iter_mut().zip(&self.grad_lambda) {
            *l = 1.0 / 3.0 + g[0] * d[0] + g[1] * d[1];
        }
        lam
    }

    /// Outward unit normal of the local edge opposite vertex `i`.
    pub fn outward_normal(&self, i: usize) -> Point {
        let g = self.grad_lambda[i];
        let n = (g[0] * g[0] + g[1] * g[1]).sqrt();
        [-g[0] / n, -g[1] / n]
    }
}

fn distance(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Conforming triangulation of `[0,1]²` with boundary and region tags.
///
/// Local edge `i` of a triangle is the edge opposite its local vertex `i`,
/// traversed counterclockwise from vertex `i+1` to vertex `i+2`.
#[derive(Debug, Clone)]
pub struct TriangleMesh {
    nx: usize,
    ny: usize,
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    triangle_facets: Vec<[usize; 3]>,
    facets: Vec<Facet>,
    facet_sides: Vec<Option<SquareSide>>,
    boundary_tags: Vec<Option<BoundaryTag>>,
    geometry: Vec<CellGeometry>,
    regions: [Vec<bool>; 2],
    h: f64,
}

impl TriangleMesh {
    /// Builds the `nx × ny` structured mesh. All boundary facets start out
    /// tagged Γ1 (the unique continuation configuration, Γ0 = ∅).
    pub fn structured(nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidMesh(format!(
                "structured mesh needs nx, ny >= 1 (got {nx} x {ny})"
            )));
        }
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push([i as f64 / nx as f64, j as f64 / ny as f64]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let v00 = j * (nx + 1) + i;
                let v10 = v00 + 1;
                let v01 = v00 + nx + 1;
                let v11 = v01 + 1;
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }
        let geometry: Vec<CellGeometry> = triangles
            .iter()
            .map(|t| CellGeometry::new([vertices[t[0]], vertices[t[1]], vertices[t[2]]]))
            .collect();

        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut facets: Vec<Facet> = Vec::new();
        let mut triangle_facets = vec![[0usize; 3]; triangles.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for i in 0..3 {
                let a = tri[(i + 1) % 3];
                let b = tri[(i + 2) % 3];
                let key = (a.min(b), a.max(b));
                let f = match lookup.get(&key) {
                    Some(&f) => {
                        let facet = &mut facets[f];
                        facet.cells[1] = Some(t);
                        facet.local_index[1] = i;
                        f
                    }
                    None => {
                        let f = facets.len();
                        lookup.insert(key, f);
                        facets.push(Facet {
                            vertices: [key.0, key.1],
                            normal: geometry[t].outward_normal(i),
                            cells: [Some(t), None],
                            local_index: [i, 0],
                            length: distance(vertices[a], vertices[b]),
                        });
                        f
                    }
                };
                triangle_facets[t][i] = f;
            }
        }

        let facet_sides: Vec<Option<SquareSide>> = facets
            .iter()
            .map(|f| {
                if f.is_interior() {
                    return None;
                }
                let a = vertices[f.vertices[0]];
                let b = vertices[f.vertices[1]];
                if a[0] == 0.0 && b[0] == 0.0 {
                    Some(SquareSide::Left)
                } else if a[0] == 1.0 && b[0] == 1.0 {
                    Some(SquareSide::Right)
                } else if a[1] == 0.0 && b[1] == 0.0 {
                    Some(SquareSide::Bottom)
                } else if a[1] == 1.0 && b[1] == 1.0 {
                    Some(SquareSide::Top)
                } else {
                    None
                }
            })
            .collect();
        if facets
            .iter()
            .zip(&facet_sides)
            .any(|(f, s)| !f.is_interior() && s.is_none())
        {
            return Err(Error::InvalidMesh(
                "boundary facet not on a side of the unit square".into(),
            ));
        }
        let boundary_tags = facet_sides
            .iter()
            .map(|s| s.map(|_| BoundaryTag::Gamma1))
            .collect();
        let h = geometry.iter().map(|g| g.diameter).fold(0.0, f64::max);
        let ncells = triangles.len();
        Ok(TriangleMesh {
            nx,
            ny,
            vertices,
            triangles,
            triangle_facets,
            facets,
            facet_sides,
            boundary_tags,
            geometry,
            regions: [vec![false; ncells], vec![false; ncells]],
            h,
        })
    }

    /// Tags boundary facets on the listed sides Γ0 and every other boundary
    /// facet Γ1. Interior facets stay untagged.
    pub fn tag_boundary(mut self, gamma0: &[SquareSide]) -> Self {
        for (tag, side) in self.boundary_tags.iter_mut().zip(&self.facet_sides) {
            *tag = side.map(|s| {
                if gamma0.contains(&s) {
                    BoundaryTag::Gamma0
                } else {
                    BoundaryTag::Gamma1
                }
            });
        }
        self
    }

    /// Tags every triangle whose barycenter lies in the closed box.
    pub fn tag_region(mut self, rect: Rect, region: Region) -> Self {
        let flags = &mut self.regions[region.index()];
        for (flag, g) in flags.iter_mut().zip(&self.geometry) {
            *flag = rect.contains(g.centroid);
        }
        self
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    /// Facets of triangle `t`, indexed by the opposite local vertex.
    pub fn triangle_facets(&self, t: usize) -> [usize; 3] {
        self.triangle_facets[t]
    }

    pub fn geometry(&self, t: usize) -> &CellGeometry {
        &self.geometry[t]
    }

    pub fn cell_points(&self, t: usize) -> [Point; 3] {
        let tri = self.triangles[t];
        [
            self.vertices[tri[0]],
            self.vertices[tri[1]],
            self.vertices[tri[2]],
        ]
    }

    /// Global mesh size: the largest triangle diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn cell_diameter(&self, t: usize) -> f64 {
        self.geometry[t].diameter
    }

    pub fn boundary_tag(&self, f: usize) -> Option<BoundaryTag> {
        self.boundary_tags[f]
    }

    pub fn facet_side(&self, f: usize) -> Option<SquareSide> {
        self.facet_sides[f]
    }

    pub fn in_region(&self, t: usize, region: Region) -> bool {
        self.regions[region.index()][t]
    }

    pub fn region_cells(&self, region: Region) -> impl Iterator<Item = usize> + '_ {
        self.regions[region.index()]
            .iter()
            .enumerate()
            .filter_map(|(t, &on)| on.then_some(t))
    }

    pub fn region_count(&self, region: Region) -> usize {
        self.region_cells(region).count()
    }

    pub fn tagged_facets(&self, tag: BoundaryTag) -> impl Iterator<Item = usize> + '_ {
        self.boundary_tags
            .iter()
            .enumerate()
            .filter_map(move |(f, t)| (*t == Some(tag)).then_some(f))
    }

    pub fn has_tag(&self, tag: BoundaryTag) -> bool {
        self.tagged_facets(tag).next().is_some()
    }

    /// Triangle containing `x` and the barycentric coordinates of `x` in it.
    pub fn locate(&self, x: Point) -> (usize, [f64; 3]) {
        let fx = x[0].clamp(0.0, 1.0) * self.nx as f64;
        let fy = x[1].clamp(0.0, 1.0) * self.ny as f64;
        let i = (fx.floor() as usize).min(self.nx - 1);
        let j = (fy.floor() as usize).min(self.ny - 1);
        let (sx, sy) = (fx - i as f64, fy - j as f64);
        let cell = j * self.nx + i;
        let t = if sx >= sy { 2 * cell } else { 2 * cell + 1 };
        (t, self.geometry[t].barycentric(x))
    }

    /// Writes a plain-text dump: `v x y`, `t a b c`, `f a b tag` for boundary
    /// facets and `r triangle region` lines.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# vertices {} triangles {} facets {}",
            self.num_vertices(),
            self.num_triangles(),
            self.num_facets()
        )?;
        for v in &self.vertices {
            writeln!(out, "v {} {}", v[0], v[1])?;
        }
        for t in &self.triangles {
            writeln!(out, "t {} {} {}", t[0], t[1], t[2])?;
        }
        for (f, facet) in self.facets.iter().enumerate() {
            if let Some(tag) = self.boundary_tags[f] {
                let name = match tag {
                    BoundaryTag::Gamma0 => "gamma0",
                    BoundaryTag::Gamma1 => "gamma1",
                };
                writeln!(out, "f {} {} {}", facet.vertices[0], facet.vertices[1], name)?;
            }
        }
        for (region, name) in [(Region::OmegaData, "omega"), (Region::InteriorG, "g")] {
            for t in self.region_cells(region) {
                writeln!(out, "r {t} {name}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_mesh() {
        let m = TriangleMesh::structured(1, 1).unwrap();
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.num_triangles(), 2);
        assert_eq!(m.num_facets(), 5);
        assert_eq!(m.facets().iter().filter(|f| f.is_interior()).count(), 1);
        assert!((m.h() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_empty_dimensions() {
        assert!(TriangleMesh::structured(0, 3).is_err());
        assert!(TriangleMesh::structured(3, 0).is_err());
    }

    #[test]
    fn finest_mesh_triangle_count() {
        let m = TriangleMesh::structured(128, 128).unwrap();
        assert_eq!(m.num_triangles(), 32768);
    }

    #[test]
    fn gamma0_left_bottom() {
        let m = TriangleMesh::structured(2, 2)
            .unwrap()
            .tag_boundary(&[SquareSide::Left, SquareSide::Bottom]);
        assert_eq!(m.tagged_facets(BoundaryTag::Gamma0).count(), 4);
        assert_eq!(m.tagged_facets(BoundaryTag::Gamma1).count(), 4);
    }

    #[test]
    fn gamma0_empty_and_full() {
        let m = TriangleMesh::structured(3, 2).unwrap().tag_boundary(&[]);
        assert_eq!(m.tagged_facets(BoundaryTag::Gamma0).count(), 0);
        assert_eq!(m.tagged_facets(BoundaryTag::Gamma1).count(), 10);
        let m = m.tag_boundary(&SquareSide::ALL);
        assert_eq!(m.tagged_facets(BoundaryTag::Gamma1).count(), 0);
        assert_eq!(m.tagged_facets(BoundaryTag::Gamma0).count(), 10);
    }

    #[test]
    fn region_full_cover_and_aligned_box() {
        let m = TriangleMesh::structured(10, 10)
            .unwrap()
            .tag_region(Rect::UNIT, Region::OmegaData)
            .tag_region(Rect::new(0.0, 0.8, 0.0, 0.5), Region::InteriorG);
        assert_eq!(m.region_count(Region::OmegaData), 200);
        assert_eq!(m.region_count(Region::InteriorG), 80);
    }

    #[test]
    fn locate_recovers_point() {
        let m = TriangleMesh::structured(5, 3).unwrap();
        for &x in &[[0.0, 0.0], [1.0, 1.0], [0.31, 0.77], [0.5, 0.1], [0.999, 0.0]] {
            let (t, lam) = m.locate(x);
            assert!(lam.iter().all(|&l| l > -1e-12), "{x:?} {lam:?}");
            let p = m.cell_points(t);
            let y = [
                lam[0] * p[0][0] + lam[1] * p[1][0] + lam[2] * p[2][0],
                lam[0] * p[0][1] + lam[1] * p[1][1] + lam[2] * p[2][1],
            ];
            assert!((y[0] - x[0]).abs() < 1e-14 && (y[1] - x[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn text_dump_lists_entities() {
        let m = TriangleMesh::structured(1, 1)
            .unwrap()
            .tag_boundary(&[SquareSide::Left]);
        let mut buf = Vec::new();
        m.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 4);
        assert_eq!(text.lines().filter(|l| l.starts_with("t ")).count(), 2);
        assert_eq!(text.lines().filter(|l| l.ends_with("gamma0")).count(), 1);
    }
}
