use std::f64::consts::PI;

use super::Mesh;
use crate::error::{Error, Result};

/// Areas, exterior perimeter, and the radii of the measure-preserving
/// symmetrized domains (outer disk and pooled-hole disk).
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMetrics {
    /// |Omega_0|: area of the full meshed domain, holes included.
    pub area_total: f64,
    /// |Omega_i| per hole, indexed by hole number - 1.
    pub hole_areas: Vec<f64>,
    /// |Omega| = |Omega_0| - sum of hole areas.
    pub area_bulk: f64,
    /// Length of the tag-0 boundary.
    pub perimeter_exterior: f64,
    /// sqrt(|Omega_0| / pi).
    pub outer_radius_symmetrized: f64,
    /// sqrt(sum |Omega_i| / pi); zero when there are no holes.
    pub hole_radius_symmetrized: f64,
}

pub fn region_metrics(mesh: &Mesh) -> Result<RegionMetrics> {
    let m = mesh.hole_count;
    let mut per_region = vec![0.0f64; m + 1];
    for t in &mesh.triangles {
        per_region[t.region] += mesh.signed_area(t);
    }
    let area_total: f64 = per_region.iter().sum();
    let hole_areas: Vec<f64> = per_region[1..].to_vec();
    let area_bulk = per_region[0];
    if !(area_bulk > 0.0) {
        return Err(Error::validation("bulk region has non-positive area"));
    }
    let perimeter_exterior = mesh
        .boundary_edges
        .iter()
        .filter(|e| e.tag == 0)
        .map(|e| mesh.edge_length(e))
        .sum();
    let holes_total: f64 = hole_areas.iter().sum();
    Ok(RegionMetrics {
        area_total,
        hole_areas,
        area_bulk,
        perimeter_exterior,
        outer_radius_symmetrized: (area_total / PI).sqrt(),
        hole_radius_symmetrized: (holes_total / PI).sqrt(),
    })
}
