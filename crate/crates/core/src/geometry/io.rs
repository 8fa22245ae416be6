//! MESH v1 text format.
//!
//! ```text
//! MESH v1
//! vertices <nv>
//! <x> <y>            (nv lines, 0-based implicit indices)
//! triangles <nt>
//! <i> <j> <k> <region>
//! boundary_edges <ne>
//! <i> <j> <tag>
//! ```
//!
//! `#` starts a comment; blank lines are ignored. Export writes floats with
//! 17 significant digits so import/export round-trips bit-exactly.

use std::fs;
use std::path::Path;

use super::{BoundaryEdge, Mesh, Triangle};
use crate::error::{Error, Result};

pub fn import_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    let text = fs::read_to_string(path.as_ref()).map_err(|e| Error::Format {
        line: 0,
        message: format!("cannot read {}: {e}", path.as_ref().display()),
    })?;
    parse_mesh_text(&text)
}

pub fn export_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path.as_ref(), mesh_to_text(mesh)).map_err(|e| Error::Format {
        line: 0,
        message: format!("cannot write {}: {e}", path.as_ref().display()),
    })
}

pub fn mesh_to_text(mesh: &Mesh) -> String {
    let mut out = String::new();
    out.push_str("MESH v1\n");
    out.push_str(&format!("vertices {}\n", mesh.vertices.len()));
    for v in &mesh.vertices {
        out.push_str(&format!("{:.16e} {:.16e}\n", v[0], v[1]));
    }
    out.push_str(&format!("triangles {}\n", mesh.triangles.len()));
    for t in &mesh.triangles {
        out.push_str(&format!(
            "{} {} {} {}\n",
            t.vertices[0], t.vertices[1], t.vertices[2], t.region
        ));
    }
    out.push_str(&format!("boundary_edges {}\n", mesh.boundary_edges.len()));
    for e in &mesh.boundary_edges {
        out.push_str(&format!("{} {} {}\n", e.vertices[0], e.vertices[1], e.tag));
    }
    out
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (idx, raw) in self.iter.by_ref() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Some((idx + 1, line));
            }
        }
        None
    }
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

fn expect_count(lines: &mut Lines, keyword: &str) -> Result<(usize, usize)> {
    let (ln, content) = lines.next_content().ok_or_else(|| {
        format_err(
            0,
            format!("unexpected end of file, expected `{keyword} <n>`"),
        )
    })?;
    let mut parts = content.split_whitespace();
    let head = parts.next().unwrap_or("");
    if head != keyword {
        return Err(format_err(
            ln,
            format!("expected `{keyword} <n>`, found `{content}`"),
        ));
    }
    let n: usize = parts
        .next()
        .ok_or_else(|| format_err(ln, format!("missing count after `{keyword}`")))?
        .parse()
        .map_err(|_| format_err(ln, format!("invalid count after `{keyword}`")))?;
    if parts.next().is_some() {
        return Err(format_err(
            ln,
            format!("trailing tokens after `{keyword} <n>`"),
        ));
    }
    Ok((ln, n))
}

pub fn parse_mesh_text(text: &str) -> Result<Mesh> {
    let mut lines = Lines {
        iter: text.lines().enumerate(),
    };
    let (ln, header) = lines
        .next_content()
        .ok_or_else(|| format_err(0, "empty file"))?;
    if header != "MESH v1" {
        return Err(format_err(
            ln,
            format!("expected header `MESH v1`, found `{header}`"),
        ));
    }

    let (_, nv) = expect_count(&mut lines, "vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, content) = lines
            .next_content()
            .ok_or_else(|| format_err(0, "unexpected end of file in vertex block"))?;
        let parts: Vec<&str> = content.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(format_err(ln, "vertex line must be `<x> <y>`"));
        }
        let x: f64 = parts[0]
            .parse()
            .map_err(|_| format_err(ln, format!("invalid coordinate `{}`", parts[0])))?;
        let y: f64 = parts[1]
            .parse()
            .map_err(|_| format_err(ln, format!("invalid coordinate `{}`", parts[1])))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(format_err(ln, "vertex coordinates must be finite"));
        }
        vertices.push([x, y]);
    }

    let (_, nt) = expect_count(&mut lines, "triangles")?;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, content) = lines
            .next_content()
            .ok_or_else(|| format_err(0, "unexpected end of file in triangle block"))?;
        let parts: Vec<&str> = content.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(format_err(
                ln,
                "triangle line must be `<i> <j> <k> <region>`",
            ));
        }
        let mut idx = [0usize; 3];
        for (slot, token) in idx.iter_mut().zip(&parts[..3]) {
            *slot = token
                .parse()
                .map_err(|_| format_err(ln, format!("invalid vertex index `{token}`")))?;
            if *slot >= nv {
                return Err(format_err(
                    ln,
                    format!("vertex index {slot} out of range (nv = {nv})"),
                ));
            }
        }
        let region: usize = parts[3]
            .parse()
            .map_err(|_| format_err(ln, format!("invalid region tag `{}`", parts[3])))?;
        triangles.push(Triangle {
            vertices: idx,
            region,
        });
    }

    let (_, ne) = expect_count(&mut lines, "boundary_edges")?;
    let mut boundary_edges = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (ln, content) = lines
            .next_content()
            .ok_or_else(|| format_err(0, "unexpected end of file in boundary edge block"))?;
        let parts: Vec<&str> = content.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(format_err(ln, "boundary edge line must be `<i> <j> <tag>`"));
        }
        let mut idx = [0usize; 2];
        for (slot, token) in idx.iter_mut().zip(&parts[..2]) {
            *slot = token
                .parse()
                .map_err(|_| format_err(ln, format!("invalid vertex index `{token}`")))?;
            if *slot >= nv {
                return Err(format_err(
                    ln,
                    format!("vertex index {slot} out of range (nv = {nv})"),
                ));
            }
        }
        let tag: usize = parts[2]
            .parse()
            .map_err(|_| format_err(ln, format!("invalid edge tag `{}`", parts[2])))?;
        boundary_edges.push(BoundaryEdge { vertices: idx, tag });
    }

    if let Some((ln, content)) = lines.next_content() {
        return Err(format_err(ln, format!("trailing content `{content}`")));
    }

    Mesh::new(vertices, triangles, boundary_edges)
}
