//! Finite quivers, paths, and slot-anchored module paths.
//!
//! A path stores its arrows in traversal order: the first-applied arrow comes
//! first. Algebraic products written elsewhere multiply right-to-left, so the
//! product notation `pq` ("first q, then p") corresponds to concatenating q's
//! traversal list before p's.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuiverError {
    #[error("duplicate vertex identifier `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate arrow identifier `{0}`")]
    DuplicateArrow(String),
    #[error("arrow `{arrow}` references undeclared vertex `{vertex}`")]
    UndeclaredVertex { arrow: String, vertex: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("endpoint mismatch: left factor starts at `{left_source}` but right factor ends at `{right_target}`")]
    EndpointMismatch {
        left_source: String,
        right_target: String,
    },
    #[error("arrow `{arrow}` does not continue a path ending at `{vertex}`")]
    ArrowSourceMismatch { arrow: String, vertex: String },
}

/// Index of a vertex, in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

/// Index of an arrow, in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrowId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
struct Arrow {
    name: String,
    source: VertexId,
    target: VertexId,
}

/// A finite quiver. Vertex and arrow identifiers are opaque strings; the
/// canonical order of both is declaration order, which fixes every canonical
/// order downstream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertex_names: Vec<String>,
    arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(
        vertices: Vec<String>,
        arrows: Vec<(String, String, String)>,
    ) -> Result<Self, QuiverError> {
        let mut vertex_names = Vec::new();
        for v in vertices {
            if vertex_names.contains(&v) {
                return Err(QuiverError::DuplicateVertex(v));
            }
            vertex_names.push(v);
        }
        let mut built = Vec::new();
        for (name, from, to) in arrows {
            if built.iter().any(|a: &Arrow| a.name == name) {
                return Err(QuiverError::DuplicateArrow(name));
            }
            let lookup = |label: &str| {
                vertex_names
                    .iter()
                    .position(|v| v == label)
                    .map(VertexId)
                    .ok_or_else(|| QuiverError::UndeclaredVertex {
                        arrow: name.clone(),
                        vertex: label.to_string(),
                    })
            };
            let source = lookup(&from)?;
            let target = lookup(&to)?;
            built.push(Arrow {
                name,
                source,
                target,
            });
        }
        Ok(Quiver {
            vertex_names,
            arrows: built,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_names.len()).map(VertexId)
    }

    pub fn arrows(&self) -> impl Iterator<Item = ArrowId> {
        (0..self.arrows.len()).map(ArrowId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0]
    }

    pub fn arrow_name(&self, a: ArrowId) -> &str {
        &self.arrows[a.0].name
    }

    pub fn arrow_source(&self, a: ArrowId) -> VertexId {
        self.arrows[a.0].source
    }

    pub fn arrow_target(&self, a: ArrowId) -> VertexId {
        self.arrows[a.0].target
    }

    pub fn vertex_by_name(&self, name: &str) -> Result<VertexId, QuiverError> {
        self.vertex_names
            .iter()
            .position(|v| v == name)
            .map(VertexId)
            .ok_or_else(|| QuiverError::UnknownVertex(name.to_string()))
    }

    pub fn arrow_by_name(&self, name: &str) -> Result<ArrowId, QuiverError> {
        self.arrows
            .iter()
            .position(|a| a.name == name)
            .map(ArrowId)
            .ok_or_else(|| QuiverError::UnknownArrow(name.to_string()))
    }

    pub fn target_of(&self, path: &Path) -> VertexId {
        match path.arrows.last() {
            Some(&a) => self.arrow_target(a),
            None => path.source,
        }
    }

    /// Build a path from a traversal-order arrow list, checking composability.
    pub fn path(&self, source: VertexId, arrows: &[ArrowId]) -> Result<Path, QuiverError> {
        let mut at = source;
        for &a in arrows {
            if self.arrow_source(a) != at {
                return Err(QuiverError::ArrowSourceMismatch {
                    arrow: self.arrow_name(a).to_string(),
                    vertex: self.vertex_name(at).to_string(),
                });
            }
            at = self.arrow_target(a);
        }
        Ok(Path {
            source,
            arrows: arrows.to_vec(),
        })
    }

    /// The product "first `q`, then `p`". Requires `p` to start where `q` ends.
    pub fn compose(&self, p: &Path, q: &Path) -> Result<Path, QuiverError> {
        if p.source != self.target_of(q) {
            return Err(QuiverError::EndpointMismatch {
                left_source: self.vertex_name(p.source).to_string(),
                right_target: self.vertex_name(self.target_of(q)).to_string(),
            });
        }
        let mut arrows = q.arrows.clone();
        arrows.extend_from_slice(&p.arrows);
        Ok(Path {
            source: q.source,
            arrows,
        })
    }

    /// Extend a path by one arrow applied after it.
    pub fn extend(&self, path: &Path, arrow: ArrowId) -> Result<Path, QuiverError> {
        let end = self.target_of(path);
        if self.arrow_source(arrow) != end {
            return Err(QuiverError::ArrowSourceMismatch {
                arrow: self.arrow_name(arrow).to_string(),
                vertex: self.vertex_name(end).to_string(),
            });
        }
        let mut arrows = path.arrows.clone();
        arrows.push(arrow);
        Ok(Path {
            source: path.source,
            arrows,
        })
    }

    /// All initial subpaths of `p`, by increasing length; includes the trivial
    /// path and `p` itself.
    pub fn initial_subpaths(&self, p: &Path) -> Vec<Path> {
        (0..=p.len())
            .map(|k| Path {
                source: p.source,
                arrows: p.arrows[..k].to_vec(),
            })
            .collect()
    }

    /// All paths from `source` of length at most `max_len`, in canonical order
    /// (length first, then lexicographic in arrow declaration order).
    pub fn paths_up_to_length(&self, source: VertexId, max_len: usize) -> Vec<Path> {
        let mut all = Vec::new();
        let mut frontier = vec![Path::trivial(source)];
        all.extend(frontier.iter().cloned());
        for _ in 0..max_len {
            let mut next = Vec::new();
            for p in &frontier {
                let end = self.target_of(p);
                for a in self.arrows() {
                    if self.arrow_source(a) == end {
                        next.push(self.extend(p, a).expect("endpoints checked"));
                    }
                }
            }
            all.extend(next.iter().cloned());
            frontier = next;
        }
        all
    }

    pub fn format_path(&self, p: &Path) -> String {
        if p.arrows.is_empty() {
            format!("e_{}", self.vertex_name(p.source))
        } else {
            p.arrows
                .iter()
                .map(|&a| self.arrow_name(a))
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    pub fn format_mod_path(&self, p: &ModPath) -> String {
        if p.path.arrows.is_empty() {
            format!("{}:", p.slot + 1)
        } else {
            format!(
                "{}: {}",
                p.slot + 1,
                p.path
                    .arrows
                    .iter()
                    .map(|&a| self.arrow_name(a))
                    .collect::<Vec<_>>()
                    .join(".")
            )
        }
    }
}

/// A path of a quiver: a source vertex plus arrows in traversal order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub source: VertexId,
    pub arrows: Vec<ArrowId>,
}

impl Path {
    pub fn trivial(source: VertexId) -> Self {
        Path {
            source,
            arrows: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }
}

/// Canonical path order: by length, then source, then arrow indices.
impl Ord for Path {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then(self.source.cmp(&other.source))
            .then_with(|| self.arrows.cmp(&other.arrows))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A path anchored at a slot of a projective module: the path must start at
/// the slot's norming vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModPath {
    /// 0-based slot index into the ambient context's slot list.
    pub slot: usize,
    pub path: Path,
}

impl ModPath {
    pub fn new(slot: usize, path: Path) -> Self {
        ModPath { slot, path }
    }

    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }
}

/// Canonical order: slot first, then the canonical path order.
impl Ord for ModPath {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.slot
            .cmp(&other.slot)
            .then_with(|| self.path.cmp(&other.path))
    }
}

impl PartialOrd for ModPath {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}
