//! Shared constructors for unit tests: tiny hand-built meshes and a grid
//! builder for multi-hole rectangles.

use std::sync::Arc;

use crate::fem::{build_dof_map, DofMap, Field};
use crate::geometry::{BoundaryEdge, Mesh, Triangle};

/// Single CCW unit right triangle (0,0), (1,0), (0,1).
pub fn unit_right_triangle() -> Mesh {
    Mesh::new(
        vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        vec![Triangle {
            vertices: [0, 1, 2],
            region: 0,
        }],
        vec![
            BoundaryEdge {
                vertices: [0, 1],
                tag: 0,
            },
            BoundaryEdge {
                vertices: [1, 2],
                tag: 0,
            },
            BoundaryEdge {
                vertices: [2, 0],
                tag: 0,
            },
        ],
    )
    .unwrap()
}

/// Axis-aligned rectangle [0, w] x [0, h] split into two triangles.
pub fn rectangle_mesh(w: f64, h: f64) -> Mesh {
    Mesh::new(
        vec![[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]],
        vec![
            Triangle {
                vertices: [0, 1, 2],
                region: 0,
            },
            Triangle {
                vertices: [0, 2, 3],
                region: 0,
            },
        ],
        vec![
            BoundaryEdge {
                vertices: [0, 1],
                tag: 0,
            },
            BoundaryEdge {
                vertices: [1, 2],
                tag: 0,
            },
            BoundaryEdge {
                vertices: [2, 3],
                tag: 0,
            },
            BoundaryEdge {
                vertices: [3, 0],
                tag: 0,
            },
        ],
    )
    .unwrap()
}

pub fn unit_square_mesh() -> Mesh {
    rectangle_mesh(1.0, 1.0)
}

/// Structured grid on [0, nx*step] x [0, ny*step] with rectangular hole
/// blocks given as (ix0, ix1, iy0, iy1) cell ranges tagged region 1, 2, ...
pub fn rect_grid_mesh_with_holes(
    nx: usize,
    ny: usize,
    step: f64,
    holes: &[(usize, usize, usize, usize)],
) -> Mesh {
    let vid = |ix: usize, iy: usize| iy * (nx + 1) + ix;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for iy in 0..=ny {
        for ix in 0..=nx {
            vertices.push([ix as f64 * step, iy as f64 * step]);
        }
    }
    let cell_region = |ix: usize, iy: usize| -> usize {
        for (h, &(x0, x1, y0, y1)) in holes.iter().enumerate() {
            if ix >= x0 && ix < x1 && iy >= y0 && iy < y1 {
                return h + 1;
            }
        }
        0
    };
    let mut triangles = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let region = cell_region(ix, iy);
            let (a, b, c, d) = (
                vid(ix, iy),
                vid(ix + 1, iy),
                vid(ix + 1, iy + 1),
                vid(ix, iy + 1),
            );
            triangles.push(Triangle {
                vertices: [a, b, c],
                region,
            });
            triangles.push(Triangle {
                vertices: [a, c, d],
                region,
            });
        }
    }
    let mut boundary_edges = Vec::new();
    for ix in 0..nx {
        boundary_edges.push(BoundaryEdge {
            vertices: [vid(ix, 0), vid(ix + 1, 0)],
            tag: 0,
        });
        boundary_edges.push(BoundaryEdge {
            vertices: [vid(ix, ny), vid(ix + 1, ny)],
            tag: 0,
        });
    }
    for iy in 0..ny {
        boundary_edges.push(BoundaryEdge {
            vertices: [vid(0, iy), vid(0, iy + 1)],
            tag: 0,
        });
        boundary_edges.push(BoundaryEdge {
            vertices: [vid(nx, iy), vid(nx, iy + 1)],
            tag: 0,
        });
    }
    // hole interface edges: cell boundaries where the region changes
    for (h, &(x0, x1, y0, y1)) in holes.iter().enumerate() {
        let tag = h + 1;
        for ix in x0..x1 {
            boundary_edges.push(BoundaryEdge {
                vertices: [vid(ix, y0), vid(ix + 1, y0)],
                tag,
            });
            boundary_edges.push(BoundaryEdge {
                vertices: [vid(ix, y1), vid(ix + 1, y1)],
                tag,
            });
        }
        for iy in y0..y1 {
            boundary_edges.push(BoundaryEdge {
                vertices: [vid(x0, iy), vid(x0, iy + 1)],
                tag,
            });
            boundary_edges.push(BoundaryEdge {
                vertices: [vid(x1, iy), vid(x1, iy + 1)],
                tag,
            });
        }
    }
    Mesh::new(vertices, triangles, boundary_edges).unwrap()
}

/// Two square holes in a 12 x 4 grid of step 0.25 on [0, 3] x [0, 1].
pub fn two_hole_rect_mesh() -> Mesh {
    rect_grid_mesh_with_holes(12, 4, 0.25, &[(2, 4, 1, 3), (8, 10, 1, 3)])
}

/// Field with prescribed nodal values on a hole-free mesh.
pub fn nodal_field(mesh: &Arc<Mesh>, nodal: &[f64]) -> Field {
    let dofs = Arc::new(build_dof_map(mesh).unwrap());
    assert_eq!(dofs.free_count(), nodal.len(), "mesh must be hole-free");
    Field::from_dof_values(&dofs, nodal.to_vec()).unwrap()
}

/// Dof map wrapped for field construction.
pub fn dof_map(mesh: &Arc<Mesh>) -> Arc<DofMap> {
    Arc::new(build_dof_map(mesh).unwrap())
}
