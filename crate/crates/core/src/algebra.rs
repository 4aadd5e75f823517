//! Path algebras modulo relations as computable objects.
//!
//! The algebra is modelled on the truncated path space: all paths of length
//! at most the Loewy bound `L`, modulo the span of every left multiple of an
//! effective relation. Effective relations are the user relations, their
//! right composites with paths (so that they generate the relation ideal as a
//! left ideal), and every path of length `L + 1`.

use crate::linalg::Matrix;
use crate::quiver::{ModPath, Path, Quiver, VertexId};
use crate::scalar::Rational;
use num::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("relation {index} is empty")]
    EmptyRelation { index: usize },
    #[error("relation {index} has a zero coefficient")]
    ZeroCoefficient { index: usize },
    #[error("relation {index} lists the same path twice")]
    DuplicatePath { index: usize },
    #[error("relation {index} mixes paths with different source vertices")]
    NonNormedRelation { index: usize },
    #[error("relation {index} contains a path of length {length} < 2")]
    ShortRelation { index: usize, length: usize },
    #[error("relation {index} contains a path of length {length} > Loewy bound {bound}")]
    LengthExceedsBound {
        index: usize,
        length: usize,
        bound: usize,
    },
}

/// A relation: a nonzero linear combination of paths sharing one source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<(Rational, Path)>,
}

impl Relation {
    pub fn new(terms: Vec<(Rational, Path)>) -> Self {
        Relation { terms }
    }

    /// The common source vertex of all terms.
    pub fn source(&self) -> Option<VertexId> {
        self.terms.first().map(|(_, p)| p.source)
    }
}

/// A basic algebra given by quiver, relations, and the Loewy bound `L`
/// (the radical satisfies `J^(L+1) = 0`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraPresentation {
    pub quiver: Quiver,
    pub relations: Vec<Relation>,
    pub loewy_bound: usize,
}

/// Outcome of validating a presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub user_relations: usize,
    /// Right composites `rho . v` appended so the effective set generates the
    /// relation ideal as a left ideal.
    pub composite_relations: usize,
    /// Paths of length `L + 1`, appended unconditionally.
    pub boundary_relations: usize,
    pub effective_total: usize,
}

impl AlgebraPresentation {
    pub fn new(quiver: Quiver, relations: Vec<Relation>, loewy_bound: usize) -> Self {
        AlgebraPresentation {
            quiver,
            relations,
            loewy_bound,
        }
    }

    pub fn validate(&self) -> Result<ValidationReport, AlgebraError> {
        for (index, rel) in self.relations.iter().enumerate() {
            if rel.terms.is_empty() {
                return Err(AlgebraError::EmptyRelation { index });
            }
            if rel.terms.iter().any(|(c, _)| c.is_zero()) {
                return Err(AlgebraError::ZeroCoefficient { index });
            }
            let mut seen = Vec::new();
            for (_, p) in &rel.terms {
                if seen.contains(&p) {
                    return Err(AlgebraError::DuplicatePath { index });
                }
                seen.push(p);
            }
            let source = rel.terms[0].1.source;
            if rel.terms.iter().any(|(_, p)| p.source != source) {
                return Err(AlgebraError::NonNormedRelation { index });
            }
            for (_, p) in &rel.terms {
                if p.len() < 2 {
                    return Err(AlgebraError::ShortRelation {
                        index,
                        length: p.len(),
                    });
                }
                if p.len() > self.loewy_bound {
                    return Err(AlgebraError::LengthExceedsBound {
                        index,
                        length: p.len(),
                        bound: self.loewy_bound,
                    });
                }
            }
        }
        let eff = self.effective_relations();
        let user = self.relations.len();
        let boundary = self
            .quiver
            .vertices()
            .map(|v| {
                self.quiver
                    .paths_up_to_length(v, self.loewy_bound + 1)
                    .iter()
                    .filter(|p| p.len() == self.loewy_bound + 1)
                    .count()
            })
            .sum::<usize>();
        Ok(ValidationReport {
            user_relations: user,
            composite_relations: eff.len() - user - boundary,
            boundary_relations: boundary,
            effective_total: eff.len(),
        })
    }

    /// User relations, their right composites `rho . v` of total length at
    /// most `L`, and all paths of length `L + 1`. This set generates the
    /// relation ideal as a left ideal, which is what every consumer needs.
    pub fn effective_relations(&self) -> Vec<Relation> {
        let mut out = Vec::new();
        let l = self.loewy_bound;
        for rel in &self.relations {
            out.push(rel.clone());
        }
        for rel in &self.relations {
            let Some(norm) = rel.source() else { continue };
            let min_len = rel.terms.iter().map(|(_, p)| p.len()).min().unwrap_or(0);
            if min_len >= l {
                continue;
            }
            for start in self.quiver.vertices() {
                for v in self.quiver.paths_up_to_length(start, l.saturating_sub(min_len)) {
                    if v.is_empty() || self.quiver.target_of(&v) != norm {
                        continue;
                    }
                    let mut terms = Vec::new();
                    for (c, p) in &rel.terms {
                        if p.len() + v.len() <= l {
                            terms.push((c.clone(), self.quiver.compose(p, &v).expect("normed")));
                        }
                    }
                    if !terms.is_empty() {
                        out.push(Relation::new(terms));
                    }
                }
            }
        }
        for start in self.quiver.vertices() {
            for p in self.quiver.paths_up_to_length(start, l + 1) {
                if p.len() == l + 1 {
                    out.push(Relation::new(vec![(
                        Rational::from_integer(1.into()),
                        p,
                    )]));
                }
            }
        }
        out
    }
}

/// The truncated linear model of a direct sum `Q` of slot projectives:
/// the span of all slot paths of length at most `L`, modulo left multiples of
/// effective relations. Pivoting is on the leftmost (canonically smallest)
/// path, so reductions rewrite towards longer paths and the surviving basis
/// is graded by path length.
#[derive(Debug, Clone)]
pub struct TruncatedModule {
    pub slots: Vec<VertexId>,
    paths: Vec<ModPath>,
    index: BTreeMap<ModPath, usize>,
    basis: Vec<usize>,
    expr: Vec<Vec<(usize, Rational)>>,
}

impl TruncatedModule {
    pub fn build(algebra: &AlgebraPresentation, slots: &[VertexId]) -> Self {
        let quiver = &algebra.quiver;
        let l = algebra.loewy_bound;
        let mut paths = Vec::new();
        for (slot, &v) in slots.iter().enumerate() {
            for p in quiver.paths_up_to_length(v, l) {
                paths.push(ModPath::new(slot, p));
            }
        }
        // Columns sorted by (length, slot, arrows) so elimination rewrites
        // shorter paths into longer ones; the basis stays length-graded.
        paths.sort_by(|a, b| {
            a.len()
                .cmp(&b.len())
                .then(a.slot.cmp(&b.slot))
                .then_with(|| a.path.arrows.cmp(&b.path.arrows))
        });
        let index: BTreeMap<ModPath, usize> =
            paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();

        let eff = algebra.effective_relations();
        let mut rows: Vec<BTreeMap<usize, Rational>> = Vec::new();
        for (slot, &slot_vertex) in slots.iter().enumerate() {
            for rel in &eff {
                let Some(norm) = rel.source() else { continue };
                if norm != slot_vertex {
                    continue;
                }
                // u ranges over left factors; u . rho . z_slot with terms
                // beyond length L dropped (they vanish in the truncation).
                let min_rel = rel.terms.iter().map(|(_, p)| p.len()).min().unwrap_or(0);
                let head_room = l.saturating_sub(min_rel);
                for start in quiver.vertices() {
                    for u in quiver.paths_up_to_length(start, head_room) {
                        let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
                        for (c, p) in &rel.terms {
                            if u.source != quiver.target_of(p) {
                                continue;
                            }
                            let whole = quiver.compose(&u, p).expect("endpoints align");
                            if whole.len() > l {
                                continue;
                            }
                            let key = index[&ModPath::new(slot, whole)];
                            let entry = row.entry(key).or_insert_with(Rational::zero);
                            *entry += c;
                            if entry.is_zero() {
                                row.remove(&key);
                            }
                        }
                        if !row.is_empty() {
                            rows.push(row);
                        }
                    }
                }
            }
        }

        // Sparse echelon reduction with leftmost pivots.
        let mut pivot_rows: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
        for mut row in rows {
            while let Some((&lead, _)) = row.iter().next() {
                match pivot_rows.get(&lead) {
                    Some(pivot) => {
                        let factor = row[&lead].clone();
                        for (col, val) in pivot {
                            let delta = val * &factor;
                            let entry = row.entry(*col).or_insert_with(Rational::zero);
                            *entry -= delta;
                            if entry.is_zero() {
                                row.remove(col);
                            }
                        }
                    }
                    None => {
                        let lead_val = row[&lead].clone();
                        let normalized: BTreeMap<usize, Rational> =
                            row.iter().map(|(c, v)| (*c, v / &lead_val)).collect();
                        pivot_rows.insert(lead, normalized);
                        break;
                    }
                }
            }
        }
        // Back-substitute so pivot rows only involve non-pivot columns.
        let pivot_cols: Vec<usize> = pivot_rows.keys().copied().collect();
        for &col in pivot_cols.iter().rev() {
            let row = pivot_rows[&col].clone();
            let mut reduced = row.clone();
            for (c, v) in row.iter() {
                if *c == col {
                    continue;
                }
                if let Some(other) = pivot_rows.get(c) {
                    reduced.remove(c);
                    for (oc, ov) in other {
                        if *oc == *c {
                            continue;
                        }
                        let delta = ov * v;
                        let entry = reduced.entry(*oc).or_insert_with(Rational::zero);
                        *entry += delta;
                        if entry.is_zero() {
                            reduced.remove(oc);
                        }
                    }
                }
            }
            pivot_rows.insert(col, reduced);
        }

        let basis: Vec<usize> = (0..paths.len())
            .filter(|i| !pivot_rows.contains_key(i))
            .collect();
        let mut basis_pos = vec![None; paths.len()];
        for (pos, &i) in basis.iter().enumerate() {
            basis_pos[i] = Some(pos);
        }
        let mut expr: Vec<Vec<(usize, Rational)>> = Vec::with_capacity(paths.len());
        for i in 0..paths.len() {
            match basis_pos[i] {
                Some(pos) => expr.push(vec![(pos, Rational::from_integer(1.into()))]),
                None => {
                    let row = &pivot_rows[&i];
                    let mut e: Vec<(usize, Rational)> = row
                        .iter()
                        .filter(|(c, _)| **c != i)
                        .map(|(c, v)| (basis_pos[*c].expect("reduced to basis columns"), -v))
                        .collect();
                    e.sort_by_key(|(p, _)| *p);
                    expr.push(e);
                }
            }
        }

        TruncatedModule {
            slots: slots.to_vec(),
            paths,
            index,
            basis,
            expr,
        }
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_paths(&self) -> Vec<&ModPath> {
        self.basis.iter().map(|&i| &self.paths[i]).collect()
    }

    /// Expansion of a slot path in the surviving basis. Paths longer than the
    /// Loewy bound are zero. Returns pairs (basis position, coefficient).
    pub fn express(&self, p: &ModPath) -> Vec<(usize, Rational)> {
        match self.index.get(p) {
            Some(&i) => self.expr[i].clone(),
            None => Vec::new(),
        }
    }

    pub fn is_zero_path(&self, p: &ModPath) -> bool {
        match self.index.get(p) {
            Some(&i) => self.expr[i].is_empty(),
            None => true,
        }
    }

    /// Dimension of each radical layer, per vertex: entry `[l][i]` counts
    /// basis paths of length `l` ending at vertex `i`.
    pub fn layer_dims(&self, quiver: &Quiver, loewy_bound: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![0; quiver.vertex_count()]; loewy_bound + 1];
        for &i in &self.basis {
            let p = &self.paths[i];
            out[p.len()][quiver.target_of(&p.path).0] += 1;
        }
        out
    }

    /// Basis paths ending at each vertex, in canonical order; the module's
    /// vertex components are indexed this way everywhere.
    pub fn vertex_layout(&self, quiver: &Quiver) -> Vec<Vec<ModPath>> {
        let mut per_vertex: Vec<Vec<ModPath>> = vec![Vec::new(); quiver.vertex_count()];
        for &i in &self.basis {
            let p = self.paths[i].clone();
            per_vertex[quiver.target_of(&p.path).0].push(p);
        }
        for list in &mut per_vertex {
            list.sort();
        }
        per_vertex
    }
}

/// A concrete module: one exact matrix per arrow, acting between vertex
/// components, plus optional marked generators (stacked coordinates).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleRealization {
    pub vertex_dims: Vec<usize>,
    pub arrow_maps: Vec<Matrix>,
    /// Distinguished generators in stacked coordinates, if any.
    pub tops: Vec<Vec<Rational>>,
}

impl ModuleRealization {
    pub fn total_dim(&self) -> usize {
        self.vertex_dims.iter().sum()
    }

    /// Offset of each vertex component inside stacked coordinates.
    pub fn offsets(&self) -> Vec<usize> {
        let mut offs = Vec::with_capacity(self.vertex_dims.len());
        let mut acc = 0;
        for &d in &self.vertex_dims {
            offs.push(acc);
            acc += d;
        }
        offs
    }

    pub fn check_shapes(&self, quiver: &Quiver) -> bool {
        self.vertex_dims.len() == quiver.vertex_count()
            && self.arrow_maps.len() == quiver.arrow_count()
            && quiver.arrows().all(|a| {
                let m = &self.arrow_maps[a.0];
                m.row_count() == self.vertex_dims[quiver.arrow_target(a).0]
                    && m.col_count() == self.vertex_dims[quiver.arrow_source(a).0]
            })
    }

    /// Apply an arrow to a stacked vector.
    pub fn apply_arrow(&self, quiver: &Quiver, arrow: crate::quiver::ArrowId, v: &[Rational]) -> Vec<Rational> {
        let offs = self.offsets();
        let s = quiver.arrow_source(arrow).0;
        let t = quiver.arrow_target(arrow).0;
        let src = &v[offs[s]..offs[s] + self.vertex_dims[s]];
        let image = self.arrow_maps[arrow.0].mul_vec(src);
        let mut out = vec![Rational::zero(); self.total_dim()];
        out[offs[t]..offs[t] + self.vertex_dims[t]].clone_from_slice(&image);
        out
    }

    /// Apply a path (traversal order) to a stacked vector.
    pub fn apply_path(&self, quiver: &Quiver, path: &Path, v: &[Rational]) -> Vec<Rational> {
        let mut cur = v.to_vec();
        for &a in &path.arrows {
            cur = self.apply_arrow(quiver, a, &cur);
        }
        cur
    }

    pub fn direct_sum(&self, other: &ModuleRealization, quiver: &Quiver) -> ModuleRealization {
        let vertex_dims: Vec<usize> = self
            .vertex_dims
            .iter()
            .zip(&other.vertex_dims)
            .map(|(a, b)| a + b)
            .collect();
        let arrow_maps = quiver
            .arrows()
            .map(|a| {
                let m1 = &self.arrow_maps[a.0];
                let m2 = &other.arrow_maps[a.0];
                let mut m = Matrix::zero(m1.row_count() + m2.row_count(), m1.col_count() + m2.col_count());
                for r in 0..m1.row_count() {
                    for c in 0..m1.col_count() {
                        m[(r, c)] = m1[(r, c)].clone();
                    }
                }
                for r in 0..m2.row_count() {
                    for c in 0..m2.col_count() {
                        m[(r + m1.row_count(), c + m1.col_count())] = m2[(r, c)].clone();
                    }
                }
                m
            })
            .collect();
        // Tops re-embedded into the summed coordinates.
        let offs_sum = {
            let mut offs = Vec::new();
            let mut acc = 0;
            for &d in &vertex_dims {
                offs.push(acc);
                acc += d;
            }
            offs
        };
        let mut tops = Vec::new();
        let total: usize = vertex_dims.iter().sum();
        let embed = |m: &ModuleRealization, shift: &dyn Fn(usize) -> usize, v: &[Rational]| {
            let offs = m.offsets();
            let mut out = vec![Rational::zero(); total];
            for (i, &d) in m.vertex_dims.iter().enumerate() {
                for k in 0..d {
                    out[offs_sum[i] + shift(i) + k] = v[offs[i] + k].clone();
                }
            }
            out
        };
        for t in &self.tops {
            tops.push(embed(self, &|_| 0, t));
        }
        for t in &other.tops {
            tops.push(embed(other, &|i| self.vertex_dims[i], t));
        }
        ModuleRealization {
            vertex_dims,
            arrow_maps,
            tops,
        }
    }
}

/// Truncated basis description of `Q = (+) Lambda z_r` for the given slots.
pub fn truncated_module_basis(
    algebra: &AlgebraPresentation,
    top_slots: &[VertexId],
) -> Result<TruncatedModule, AlgebraError> {
    algebra.validate()?;
    Ok(TruncatedModule::build(algebra, top_slots))
}

/// Arrow matrices of `Q` acting on the truncated basis; marked tops are the
/// slot generators.
pub fn projective_realization(
    algebra: &AlgebraPresentation,
    top_slots: &[VertexId],
) -> Result<ModuleRealization, AlgebraError> {
    let model = truncated_module_basis(algebra, top_slots)?;
    Ok(realization_from_model(algebra, &model))
}

pub fn realization_from_model(
    algebra: &AlgebraPresentation,
    model: &TruncatedModule,
) -> ModuleRealization {
    let quiver = &algebra.quiver;
    let layout = model.vertex_layout(quiver);
    let vertex_dims: Vec<usize> = layout.iter().map(Vec::len).collect();
    let pos_of = |p: &ModPath| -> (usize, usize) {
        let v = quiver.target_of(&p.path).0;
        let k = layout[v].iter().position(|q| q == p).expect("basis path");
        (v, k)
    };
    let arrow_maps = quiver
        .arrows()
        .map(|a| {
            let s = quiver.arrow_source(a).0;
            let t = quiver.arrow_target(a).0;
            let mut m = Matrix::zero(vertex_dims[t], vertex_dims[s]);
            for (col, p) in layout[s].iter().enumerate() {
                if p.len() + 1 > algebra.loewy_bound {
                    continue;
                }
                let extended = ModPath::new(p.slot, quiver.extend(&p.path, a).expect("source matches"));
                for (bpos, coeff) in model.express(&extended) {
                    let q = model.basis_paths()[bpos].clone();
                    let (qv, qk) = pos_of(&q);
                    debug_assert_eq!(qv, t);
                    m[(qk, col)] = coeff;
                }
            }
            m
        })
        .collect();
    let offsets = {
        let mut offs = Vec::new();
        let mut acc = 0;
        for &d in &vertex_dims {
            offs.push(acc);
            acc += d;
        }
        offs
    };
    let total: usize = vertex_dims.iter().sum();
    let tops = (0..model.slots.len())
        .map(|slot| {
            let zero_path = ModPath::new(slot, Path::trivial(model.slots[slot]));
            let mut v = vec![Rational::zero(); total];
            for (bpos, coeff) in model.express(&zero_path) {
                let q = model.basis_paths()[bpos].clone();
                let (qv, qk) = pos_of(&q);
                v[offsets[qv] + qk] = coeff;
            }
            v
        })
        .collect();
    ModuleRealization {
        vertex_dims,
        arrow_maps,
        tops,
    }
}

/// Per-layer, per-vertex dimensions of the radical filtration of `Q`.
pub fn projective_radical_layers(
    algebra: &AlgebraPresentation,
    top_slots: &[VertexId],
) -> Result<Vec<Vec<usize>>, AlgebraError> {
    let model = truncated_module_basis(algebra, top_slots)?;
    Ok(model.layer_dims(&algebra.quiver, algebra.loewy_bound))
}
