//! Triangulations of multiply connected planar domains.
//!
//! A mesh covers the full outer domain: hole interiors are meshed too and
//! carry region tags `r >= 1`, while the surrounding bulk is region 0. Tagged
//! boundary edges distinguish the exterior boundary (tag 0, one triangle per
//! edge) from the hole interfaces (tag `r`, separating region 0 from region
//! `r`). Meshing the holes keeps constant extensions and loads supported on
//! the holes exact at the discrete level.

mod generators;
mod io;
mod metrics;
#[cfg(test)]
mod tests;

pub use generators::{generate_disk_mesh, generate_eccentric_annulus_mesh};
pub use io::{export_mesh, import_mesh, mesh_to_text, parse_mesh_text};
pub use metrics::{region_metrics, RegionMetrics};

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};

/// Which built-in generator (or external file) a scenario uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Disk,
    ConcentricAnnulus,
    EccentricAnnulus,
    ExternalMesh,
}

/// Declarative description of a domain, resolved to a [`Mesh`] by
/// [`DomainSpec::build`].
#[derive(Debug, Clone)]
pub struct DomainSpec {
    pub kind: DomainKind,
    /// Outer radius R0 (ignored for external meshes).
    pub outer_radius: f64,
    /// Hole radius R1; zero for disks.
    pub hole_radius: f64,
    /// Offset of the hole center from the origin; zero unless eccentric.
    pub hole_offset: f64,
    pub mesh_path: Option<PathBuf>,
    pub n_radial: usize,
    pub n_angular: usize,
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        if self.kind == DomainKind::ExternalMesh {
            if self.mesh_path.is_none() {
                return Err(Error::parameter("external_mesh requires mesh_path"));
            }
            return Ok(());
        }
        if self.outer_radius <= 0.0 {
            return Err(Error::parameter("outer radius R0 must be positive"));
        }
        if self.n_radial < 2 {
            return Err(Error::parameter("n_radial must be at least 2"));
        }
        if self.n_angular < 8 {
            return Err(Error::parameter("n_angular must be at least 8"));
        }
        match self.kind {
            DomainKind::Disk => {
                if self.hole_radius != 0.0 || self.hole_offset != 0.0 {
                    return Err(Error::parameter("disk domains take no hole parameters"));
                }
            }
            DomainKind::ConcentricAnnulus | DomainKind::EccentricAnnulus => {
                if self.hole_radius <= 0.0 {
                    return Err(Error::parameter("hole radius R1 must be positive"));
                }
                if self.hole_offset < 0.0 {
                    return Err(Error::parameter("hole offset d must be nonnegative"));
                }
                if self.hole_offset + self.hole_radius >= self.outer_radius {
                    return Err(Error::parameter(format!(
                        "hole must lie strictly inside the outer circle: d + R1 = {} >= R0 = {}",
                        self.hole_offset + self.hole_radius,
                        self.outer_radius
                    )));
                }
                if self.kind == DomainKind::ConcentricAnnulus && self.hole_offset != 0.0 {
                    return Err(Error::parameter("concentric annulus requires d = 0"));
                }
            }
            DomainKind::ExternalMesh => unreachable!(),
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Mesh> {
        self.validate()?;
        match self.kind {
            DomainKind::Disk => {
                generate_disk_mesh(self.outer_radius, self.n_radial, self.n_angular)
            }
            DomainKind::ConcentricAnnulus | DomainKind::EccentricAnnulus => {
                generate_eccentric_annulus_mesh(
                    self.outer_radius,
                    self.hole_radius,
                    self.hole_offset,
                    self.n_radial,
                    self.n_angular,
                )
            }
            DomainKind::ExternalMesh => import_mesh(self.mesh_path.as_ref().unwrap()),
        }
    }
}

/// Triangle as a vertex-index triple plus a region tag (0 = bulk, r >= 1 = hole r).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub region: usize,
}

/// Tagged boundary edge: tag 0 lies on the exterior boundary, tag r >= 1 on
/// the interface of hole r.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub tag: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<Triangle>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub hole_count: usize,
}

impl Mesh {
    /// Constructs and validates in one step; all generated or imported meshes
    /// go through here.
    pub fn new(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<Triangle>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Mesh> {
        let hole_count = triangles.iter().map(|t| t.region).max().unwrap_or(0);
        let mesh = Mesh {
            vertices,
            triangles,
            boundary_edges,
            hole_count,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn signed_area(&self, t: &Triangle) -> f64 {
        let [a, b, c] = t.vertices;
        let pa = self.vertices[a];
        let pb = self.vertices[b];
        let pc = self.vertices[c];
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]))
    }

    pub fn edge_length(&self, e: &BoundaryEdge) -> f64 {
        let pa = self.vertices[e.vertices[0]];
        let pb = self.vertices[e.vertices[1]];
        ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt()
    }

    pub fn total_area(&self) -> f64 {
        self.triangles.iter().map(|t| self.signed_area(t)).sum()
    }

    /// Checks every structural invariant; see the module docs for the tag
    /// conventions. Errors name the offending entity.
    pub fn validate(&self) -> Result<()> {
        let nv = self.vertices.len();
        if nv < 3 {
            return Err(Error::validation("mesh needs at least 3 vertices"));
        }
        if self.triangles.is_empty() {
            return Err(Error::validation("mesh has no triangles"));
        }
        for (i, t) in self.triangles.iter().enumerate() {
            for &v in &t.vertices {
                if v >= nv {
                    return Err(Error::validation(format!(
                        "triangle {i} references vertex {v} but only {nv} vertices exist"
                    )));
                }
            }
            let a = self.signed_area(t);
            if !(a > 0.0) {
                return Err(Error::validation(format!(
                    "triangle {i} has non-positive signed area {a:.3e}"
                )));
            }
        }
        for (i, e) in self.boundary_edges.iter().enumerate() {
            for &v in &e.vertices {
                if v >= nv {
                    return Err(Error::validation(format!(
                        "boundary edge {i} references vertex {v} but only {nv} vertices exist"
                    )));
                }
            }
            if e.vertices[0] == e.vertices[1] {
                return Err(Error::validation(format!(
                    "boundary edge {i} is degenerate"
                )));
            }
        }

        // region classes 0..=m must all be nonempty
        let m = self.hole_count;
        let mut class_counts = vec![0usize; m + 1];
        for t in &self.triangles {
            if t.region > m {
                return Err(Error::validation(format!(
                    "triangle region {} exceeds hole count {m}",
                    t.region
                )));
            }
            class_counts[t.region] += 1;
        }
        for (r, &count) in class_counts.iter().enumerate() {
            if count == 0 {
                return Err(Error::validation(format!("region {r} has no triangles")));
            }
        }

        // edge incidence map: undirected edge -> (count, regions)
        let mut incidence: BTreeMap<(usize, usize), (usize, [usize; 2])> = BTreeMap::new();
        for t in &self.triangles {
            let [a, b, c] = t.vertices;
            for &(u, v) in &[(a, b), (b, c), (c, a)] {
                let key = (u.min(v), u.max(v));
                let entry = incidence.entry(key).or_insert((0, [usize::MAX; 2]));
                if entry.0 >= 2 {
                    return Err(Error::validation(format!(
                        "edge ({u}, {v}) is non-manifold: shared by more than 2 triangles"
                    )));
                }
                entry.1[entry.0] = t.region;
                entry.0 += 1;
            }
        }

        let mut declared: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for e in &self.boundary_edges {
            let key = (
                e.vertices[0].min(e.vertices[1]),
                e.vertices[0].max(e.vertices[1]),
            );
            if declared.insert(key, e.tag).is_some() {
                return Err(Error::validation(format!(
                    "boundary edge ({}, {}) declared twice",
                    key.0, key.1
                )));
            }
        }

        for (key, (count, regions)) in &incidence {
            match declared.get(key) {
                Some(&0) => {
                    if *count != 1 {
                        return Err(Error::validation(format!(
                            "exterior edge ({}, {}) must bound exactly one triangle, found {count}",
                            key.0, key.1
                        )));
                    }
                    if regions[0] != 0 {
                        return Err(Error::validation(format!(
                            "exterior edge ({}, {}) bounds a hole triangle",
                            key.0, key.1
                        )));
                    }
                }
                Some(&tag) => {
                    if *count != 2 {
                        return Err(Error::validation(format!(
                            "interface edge ({}, {}) with tag {tag} must separate two triangles",
                            key.0, key.1
                        )));
                    }
                    let mut rs = *regions;
                    rs.sort_unstable();
                    if rs != [0, tag] {
                        return Err(Error::validation(format!(
                            "interface edge ({}, {}) tagged {tag} separates regions {} and {}",
                            key.0, key.1, rs[0], rs[1]
                        )));
                    }
                }
                None => {
                    if *count == 1 {
                        return Err(Error::validation(format!(
                            "edge ({}, {}) lies on the boundary but is not declared",
                            key.0, key.1
                        )));
                    }
                    if regions[0] != regions[1] {
                        return Err(Error::validation(format!(
                            "edge ({}, {}) separates regions {} and {} but carries no tag",
                            key.0, key.1, regions[0], regions[1]
                        )));
                    }
                }
            }
        }
        for key in declared.keys() {
            if !incidence.contains_key(key) {
                return Err(Error::validation(format!(
                    "declared boundary edge ({}, {}) does not belong to any triangle",
                    key.0, key.1
                )));
            }
        }

        // each tag class forms one closed loop
        for tag in 0..=m {
            let edges: Vec<&BoundaryEdge> = self
                .boundary_edges
                .iter()
                .filter(|e| e.tag == tag)
                .collect();
            if edges.is_empty() {
                return Err(Error::validation(format!(
                    "no boundary edges with tag {tag}"
                )));
            }
            let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
            for e in &edges {
                *degree.entry(e.vertices[0]).or_insert(0) += 1;
                *degree.entry(e.vertices[1]).or_insert(0) += 1;
            }
            for (&v, &d) in &degree {
                if d != 2 {
                    return Err(Error::validation(format!(
                        "boundary loop with tag {tag} is open at vertex {v} (degree {d})"
                    )));
                }
            }
            // connectivity: walk from the first edge and count reached edges
            let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (i, e) in edges.iter().enumerate() {
                adj.entry(e.vertices[0]).or_default().push(i);
                adj.entry(e.vertices[1]).or_default().push(i);
            }
            let mut seen = vec![false; edges.len()];
            let mut stack = vec![0usize];
            seen[0] = true;
            let mut reached = 1;
            while let Some(i) = stack.pop() {
                for &v in &edges[i].vertices {
                    for &j in &adj[&v] {
                        if !seen[j] {
                            seen[j] = true;
                            reached += 1;
                            stack.push(j);
                        }
                    }
                }
            }
            if reached != edges.len() {
                return Err(Error::validation(format!(
                    "boundary edges with tag {tag} form more than one loop"
                )));
            }
        }
        Ok(())
    }

    /// Vertices incident to any triangle of the given hole region (interface
    /// ring included), sorted ascending.
    pub fn hole_vertices(&self, region: usize) -> Vec<usize> {
        let mut vs: Vec<usize> = self
            .triangles
            .iter()
            .filter(|t| t.region == region)
            .flat_map(|t| t.vertices)
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}
