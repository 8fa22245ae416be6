//! Structured generators for disks and (eccentric) annuli.
//!
//! The annulus generator blends the offset inner circle into the centered
//! outer circle ring by ring. Each intermediate ring is again a circle
//! (an affine blend of two circles is a circle), and the rings are strictly
//! nested whenever d + R1 < R0, so the strips between them triangulate
//! without inversions.

use std::f64::consts::PI;

use super::{BoundaryEdge, Mesh, Triangle};
use crate::error::{Error, Result};

fn check_resolution(n_radial: usize, n_angular: usize) -> Result<()> {
    if n_radial < 2 {
        return Err(Error::parameter("n_radial must be at least 2"));
    }
    if n_angular < 8 {
        return Err(Error::parameter("n_angular must be at least 8"));
    }
    Ok(())
}

/// Disk of radius `r0`: a central fan surrounded by structured polar rings.
pub fn generate_disk_mesh(r0: f64, n_radial: usize, n_angular: usize) -> Result<Mesh> {
    if r0 <= 0.0 {
        return Err(Error::parameter("disk radius must be positive"));
    }
    check_resolution(n_radial, n_angular)?;

    let mut vertices = vec![[0.0, 0.0]];
    for i in 1..=n_radial {
        let r = r0 * i as f64 / n_radial as f64;
        for j in 0..n_angular {
            let th = 2.0 * PI * j as f64 / n_angular as f64;
            vertices.push([r * th.cos(), r * th.sin()]);
        }
    }
    let ring = |i: usize, j: usize| 1 + (i - 1) * n_angular + (j % n_angular);

    let mut triangles = Vec::new();
    for j in 0..n_angular {
        triangles.push(Triangle {
            vertices: [0, ring(1, j), ring(1, j + 1)],
            region: 0,
        });
    }
    for i in 1..n_radial {
        for j in 0..n_angular {
            let (a, b) = (ring(i, j), ring(i, j + 1));
            let (c, d) = (ring(i + 1, j), ring(i + 1, j + 1));
            triangles.push(Triangle {
                vertices: [a, c, d],
                region: 0,
            });
            triangles.push(Triangle {
                vertices: [a, d, b],
                region: 0,
            });
        }
    }
    let boundary_edges = (0..n_angular)
        .map(|j| BoundaryEdge {
            vertices: [ring(n_radial, j), ring(n_radial, j + 1)],
            tag: 0,
        })
        .collect();

    Mesh::new(vertices, triangles, boundary_edges)
}

/// Annulus-with-meshed-hole: inner circle of radius `r1` centered at (d, 0),
/// outer circle of radius `r0` centered at the origin. The hole interior is a
/// fan from (d, 0) carrying region tag 1.
pub fn generate_eccentric_annulus_mesh(
    r0: f64,
    r1: f64,
    d: f64,
    n_radial: usize,
    n_angular: usize,
) -> Result<Mesh> {
    if r0 <= 0.0 || r1 <= 0.0 {
        return Err(Error::parameter("annulus radii must be positive"));
    }
    if d < 0.0 {
        return Err(Error::parameter("hole offset must be nonnegative"));
    }
    if d + r1 >= r0 {
        return Err(Error::parameter(format!(
            "hole must lie strictly inside the outer circle: d + R1 = {} >= R0 = {r0}",
            d + r1
        )));
    }
    check_resolution(n_radial, n_angular)?;

    // rings 0..=n_radial blend the inner circle (s = 0) into the outer (s = 1)
    let mut vertices = Vec::with_capacity((n_radial + 1) * n_angular + 1);
    for i in 0..=n_radial {
        let s = i as f64 / n_radial as f64;
        for j in 0..n_angular {
            let th = 2.0 * PI * j as f64 / n_angular as f64;
            let inner = [d + r1 * th.cos(), r1 * th.sin()];
            let outer = [r0 * th.cos(), r0 * th.sin()];
            vertices.push([
                (1.0 - s) * inner[0] + s * outer[0],
                (1.0 - s) * inner[1] + s * outer[1],
            ]);
        }
    }
    let hole_center = vertices.len();
    vertices.push([d, 0.0]);

    let ring = |i: usize, j: usize| i * n_angular + (j % n_angular);

    let mut triangles = Vec::new();
    for i in 0..n_radial {
        for j in 0..n_angular {
            let (a, b) = (ring(i, j), ring(i, j + 1));
            let (c, e) = (ring(i + 1, j), ring(i + 1, j + 1));
            triangles.push(Triangle {
                vertices: [a, c, e],
                region: 0,
            });
            triangles.push(Triangle {
                vertices: [a, e, b],
                region: 0,
            });
        }
    }
    for j in 0..n_angular {
        triangles.push(Triangle {
            vertices: [hole_center, ring(0, j), ring(0, j + 1)],
            region: 1,
        });
    }

    let mut boundary_edges = Vec::with_capacity(2 * n_angular);
    for j in 0..n_angular {
        boundary_edges.push(BoundaryEdge {
            vertices: [ring(n_radial, j), ring(n_radial, j + 1)],
            tag: 0,
        });
        boundary_edges.push(BoundaryEdge {
            vertices: [ring(0, j), ring(0, j + 1)],
            tag: 1,
        });
    }

    Mesh::new(vertices, triangles, boundary_edges)
}
