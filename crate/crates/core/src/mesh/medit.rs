//! ASCII MEDIT (`.mesh`) reader and writer.
//!
//! Only `Vertices` and `Tetrahedra` are required. The vertex reference field
//! becomes the vertex label; references of `Triangles` are copied onto their
//! vertices when those carry label 0. Other standard sections are validated
//! for shape and skipped.

use std::fmt::Write as _;
use std::path::Path;

use super::{TetMesh, Vec3};
use crate::error::{Error, Result};

struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut items = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            items.extend(line.split_whitespace().map(|t| (lineno + 1, t)));
        }
        Self { items, pos: 0 }
    }

    fn line(&self) -> usize {
        self.items.get(self.pos).or(self.items.last()).map_or(0, |(l, _)| *l)
    }

    fn next(&mut self) -> Option<&'a str> {
        let t = self.items.get(self.pos).map(|(_, t)| *t);
        self.pos += 1;
        t
    }

    fn expect_next(&mut self, what: &str) -> Result<&'a str> {
        let line = self.line();
        self.next()
            .ok_or_else(|| Error::parse(line, format!("unexpected end of file, expected {what}")))
    }

    fn int(&mut self, what: &str) -> Result<i64> {
        let line = self.line();
        let t = self.expect_next(what)?;
        t.parse()
            .map_err(|_| Error::parse(line, format!("expected integer {what}, found {t:?}")))
    }

    fn count(&mut self, section: &str) -> Result<usize> {
        let line = self.line();
        let n = self.int(&format!("{section} count"))?;
        usize::try_from(n).map_err(|_| Error::parse(line, format!("negative {section} count")))
    }

    fn real(&mut self) -> Result<f64> {
        let line = self.line();
        let t = self.expect_next("coordinate")?;
        let v: f64 = t
            .parse()
            .map_err(|_| Error::parse(line, format!("expected real number, found {t:?}")))?;
        if !v.is_finite() {
            return Err(Error::parse(line, "non-finite coordinate"));
        }
        Ok(v)
    }
}

/// Number of tokens per entry of sections that are read and discarded.
fn skipped_section_width(keyword: &str) -> Option<usize> {
    Some(match keyword {
        "edges" => 3,
        "quadrilaterals" => 5,
        "hexahedra" => 9,
        "prisms" => 7,
        "corners" | "ridges" | "requiredvertices" | "requirededges" | "requiredtriangles" => 1,
        "normals" | "tangents" => 3,
        "normalatvertices" | "tangentatvertices" => 2,
        _ => return None,
    })
}

/// Parses MEDIT text into a mesh, reorienting negatively oriented tetrahedra.
pub fn load_medit(text: &str) -> Result<TetMesh> {
    let mut tok = Tokens::new(text);
    let mut vertices: Option<Vec<Vec3>> = None;
    let mut labels: Vec<i32> = Vec::new();
    let mut tets: Vec<[usize; 4]> = Vec::new();
    let mut triangles: Vec<([usize; 3], i32)> = Vec::new();
    let mut pending_tets: Option<Vec<[i64; 4]>> = None;
    let mut pending_tris: Option<Vec<([i64; 3], i32)>> = None;

    while let Some(word) = tok.next() {
        let line = tok.items[tok.pos - 1].0;
        let key = word.to_ascii_lowercase();
        match key.as_str() {
            "meshversionformatted" => {
                tok.int("format version")?;
            }
            "dimension" => {
                let d = tok.int("dimension")?;
                if d != 3 {
                    return Err(Error::parse(line, format!("only dimension 3 is supported, found {d}")));
                }
            }
            "vertices" => {
                let n = tok.count("Vertices")?;
                let mut v = Vec::with_capacity(n);
                labels = Vec::with_capacity(n);
                for _ in 0..n {
                    let p = Vec3::new(tok.real()?, tok.real()?, tok.real()?);
                    v.push(p);
                    labels.push(tok.int("vertex reference")? as i32);
                }
                vertices = Some(v);
            }
            "tetrahedra" => {
                let n = tok.count("Tetrahedra")?;
                let mut raw = Vec::with_capacity(n);
                for _ in 0..n {
                    let mut t = [0i64; 4];
                    for slot in &mut t {
                        *slot = tok.int("vertex index")?;
                    }
                    tok.int("tetrahedron reference")?;
                    raw.push(t);
                }
                pending_tets = Some(raw);
            }
            "triangles" => {
                let n = tok.count("Triangles")?;
                let mut raw = Vec::with_capacity(n);
                for _ in 0..n {
                    let t = [
                        tok.int("vertex index")?,
                        tok.int("vertex index")?,
                        tok.int("vertex index")?,
                    ];
                    raw.push((t, tok.int("triangle reference")? as i32));
                }
                pending_tris = Some(raw);
            }
            "end" => break,
            other => {
                let Some(width) = skipped_section_width(other) else {
                    return Err(Error::parse(line, format!("unknown keyword {word:?}")));
                };
                let n = tok.count(word)?;
                for _ in 0..n * width {
                    tok.expect_next("section entry")?;
                }
            }
        }
    }

    let vertices = vertices.ok_or_else(|| Error::parse(tok.line(), "missing Vertices section"))?;
    let n = vertices.len();
    let to_index = |i: i64, context: &str| -> Result<usize> {
        if i < 1 || i as usize > n {
            Err(Error::Index {
                index: if i < 1 { 0 } else { i as usize - 1 },
                bound: n,
                context: context.to_string(),
            })
        } else {
            Ok(i as usize - 1)
        }
    };
    let Some(raw_tets) = pending_tets else {
        return Err(Error::parse(tok.line(), "missing Tetrahedra section"));
    };
    for (t, raw) in raw_tets.iter().enumerate() {
        let ctx = format!("tetrahedron {t}");
        tets.push([
            to_index(raw[0], &ctx)?,
            to_index(raw[1], &ctx)?,
            to_index(raw[2], &ctx)?,
            to_index(raw[3], &ctx)?,
        ]);
    }
    if let Some(raw) = pending_tris {
        for (k, (t, r)) in raw.iter().enumerate() {
            let ctx = format!("triangle {k}");
            triangles.push((
                [to_index(t[0], &ctx)?, to_index(t[1], &ctx)?, to_index(t[2], &ctx)?],
                *r,
            ));
        }
    }
    for (tri, r) in &triangles {
        for &v in tri {
            if labels[v] == 0 {
                labels[v] = *r;
            }
        }
    }
    TetMesh::new_reoriented(vertices, tets, Some(labels))
}

/// Serializes a mesh as MEDIT text with 17 significant digits per coordinate.
pub fn save_medit(mesh: &TetMesh) -> String {
    let mut s = String::with_capacity(64 * (mesh.num_vertices() + mesh.num_tets()) + 128);
    s.push_str("MeshVersionFormatted 2\nDimension 3\n");
    let _ = write!(s, "Vertices\n{}\n", mesh.num_vertices());
    for (v, l) in mesh.vertices().iter().zip(mesh.labels()) {
        let _ = writeln!(s, "{:.16e} {:.16e} {:.16e} {}", v.x, v.y, v.z, l);
    }
    let _ = write!(s, "Tetrahedra\n{}\n", mesh.num_tets());
    for t in mesh.tets() {
        let _ = writeln!(s, "{} {} {} {} 0", t[0] + 1, t[1] + 1, t[2] + 1, t[3] + 1);
    }
    s.push_str("End\n");
    s
}

pub fn read_medit(path: impl AsRef<Path>) -> Result<TetMesh> {
    load_medit(&std::fs::read_to_string(path)?)
}

pub fn write_medit(mesh: &TetMesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, save_medit(mesh))?;
    Ok(())
}
