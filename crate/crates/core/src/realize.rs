//! From chart points to concrete modules and back: explicit realizations,
//! relation checking, skeleton detection, Hom-space computations, unipotent
//! orbit dimensions, and a randomized isomorphism probe.

use crate::algebra::{AlgebraPresentation, ModuleRealization};
use crate::layering::layering_of_unchecked;
use crate::linalg::{rank_of_rows, row_space, Matrix};
use crate::quiver::{ModPath, Path};
use crate::scalar::{random_rational, Rational, SampleRange};
use crate::skeleta::{CriticalData, ProjectiveContext, Skeleton};
use num::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RealizeError {
    #[error("point does not assign variable {0}")]
    MissingCoordinate(usize),
    #[error("marked tops are dependent modulo the radical")]
    InvalidTops,
    #[error("modules live over different algebras (vertex counts differ)")]
    AlgebraMismatch,
    #[error("the module's top is not dominated by the cover's top")]
    TopNotDominated,
    #[error("module fails a relation: {0}")]
    InvalidModule(String),
}

/// Coordinates for the variable index of a [`CriticalData`]. Missing entries
/// default to zero but are materialized explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointData {
    pub values: Vec<Rational>,
}

impl PointData {
    pub fn zero(critical: &CriticalData) -> Self {
        PointData {
            values: vec![Rational::zero(); critical.pair_count()],
        }
    }

    pub fn from_assignments(
        critical: &CriticalData,
        assignments: &[((ModPath, ModPath), Rational)],
    ) -> Option<Self> {
        let mut values = vec![Rational::zero(); critical.pair_count()];
        for ((c, q), v) in assignments {
            let idx = critical.pair_index(c, q)?;
            values[idx] = v.clone();
        }
        Some(PointData { values })
    }

    pub fn get(&self, idx: usize) -> Result<&Rational, RealizeError> {
        self.values.get(idx).ok_or(RealizeError::MissingCoordinate(idx))
    }
}

/// A submodule of the ambient projective, spanned by the given stacked
/// coordinate vectors (in the truncated basis of `Q`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmodulePresentation {
    pub generators: Vec<Vec<Rational>>,
    pub ambient_dim: usize,
}

impl SubmodulePresentation {
    pub fn new(generators: Vec<Vec<Rational>>, ambient_dim: usize) -> Self {
        SubmodulePresentation {
            generators,
            ambient_dim,
        }
    }
}

/// Basis layout of a skeleton realization: skeleton paths grouped per vertex
/// in canonical order; this is the coordinate system of the matrices.
pub fn skeleton_layout(
    skeleton: &Skeleton,
    ctx: &ProjectiveContext<'_>,
) -> Vec<Vec<ModPath>> {
    let quiver = &ctx.algebra.quiver;
    let mut layout: Vec<Vec<ModPath>> = vec![Vec::new(); quiver.vertex_count()];
    for p in &skeleton.paths {
        layout[quiver.target_of(&p.path).0].push(p.clone());
    }
    for list in &mut layout {
        list.sort();
    }
    layout
}

/// The module attached to a chart point: basis is the skeleton, arrows act by
/// extension, critical extensions act through the point's coordinates, and
/// extensions beyond the Loewy bound or vanishing in the algebra act as zero.
/// No membership check is performed.
pub fn realize_point(
    skeleton: &Skeleton,
    critical: &CriticalData,
    ctx: &ProjectiveContext<'_>,
    point: &PointData,
) -> Result<ModuleRealization, RealizeError> {
    if point.values.len() < critical.pair_count() {
        return Err(RealizeError::MissingCoordinate(point.values.len()));
    }
    let quiver = &ctx.algebra.quiver;
    let bound = ctx.algebra.loewy_bound;
    let layout = skeleton_layout(skeleton, ctx);
    let vertex_dims: Vec<usize> = layout.iter().map(Vec::len).collect();
    let pos = |p: &ModPath| -> (usize, usize) {
        let v = quiver.target_of(&p.path).0;
        (v, layout[v].iter().position(|q| q == p).expect("skeleton path"))
    };
    let mut arrow_maps = Vec::new();
    for a in quiver.arrows() {
        let s = quiver.arrow_source(a).0;
        let t = quiver.arrow_target(a).0;
        let mut m = Matrix::zero(vertex_dims[t], vertex_dims[s]);
        for (col, p) in layout[s].iter().enumerate() {
            if p.len() + 1 > bound {
                continue;
            }
            let ext = ModPath::new(p.slot, quiver.extend(&p.path, a).expect("source matches"));
            if skeleton.contains(&ext) {
                let (_, row) = pos(&ext);
                m[(row, col)] = Rational::one();
            } else if !ctx.is_zero_path(&ext.path) {
                let set = critical
                    .sigma_set_of(&ext)
                    .expect("one-arrow extension is critical");
                for q in set {
                    let idx = critical.pair_index(&ext, q).expect("indexed pair");
                    let c = point.get(idx)?.clone();
                    if !c.is_zero() {
                        let (_, row) = pos(q);
                        m[(row, col)] = c;
                    }
                }
            }
        }
        arrow_maps.push(m);
    }
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
    let tops = skeleton
        .paths
        .iter()
        .filter(|p| p.is_empty())
        .map(|p| {
            let (v, k) = pos(p);
            let mut vec = vec![Rational::zero(); total];
            vec[offsets[v] + k] = Rational::one();
            vec
        })
        .collect();
    Ok(ModuleRealization {
        vertex_dims,
        arrow_maps,
        tops,
    })
}

/// Outcome of checking every effective relation on a realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationsCheck {
    /// `None` when all relations annihilate the module; otherwise a
    /// human-readable witness (relation index and basis column).
    pub failure: Option<String>,
}

impl RelationsCheck {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Verify that every effective relation acts as zero.
pub fn relations_check(m: &ModuleRealization, algebra: &AlgebraPresentation) -> RelationsCheck {
    let quiver = &algebra.quiver;
    if !m.check_shapes(quiver) {
        return RelationsCheck {
            failure: Some("matrix shapes do not match the quiver".into()),
        };
    }
    let offs = m.offsets();
    for (rel_idx, rel) in algebra.effective_relations().iter().enumerate() {
        let Some(source) = rel.source() else { continue };
        let dim = m.vertex_dims[source.0];
        for col in 0..dim {
            let mut v = vec![Rational::zero(); m.total_dim()];
            v[offs[source.0] + col] = Rational::one();
            let mut image = vec![Rational::zero(); m.total_dim()];
            for (c, p) in &rel.terms {
                let term = m.apply_path(quiver, p, &v);
                for (acc, t) in image.iter_mut().zip(term) {
                    *acc += c * &t;
                }
            }
            if image.iter().any(|x| !x.is_zero()) {
                return RelationsCheck {
                    failure: Some(format!(
                        "relation {rel_idx} does not vanish on basis column {col} of vertex {}",
                        quiver.vertex_name(source)
                    )),
                };
            }
        }
    }
    RelationsCheck { failure: None }
}

/// The submodule `U(c)` spanned by the substitution differences of a point,
/// closed under the arrow action.
pub fn submodule_from_point(
    _skeleton: &Skeleton,
    critical: &CriticalData,
    ctx: &ProjectiveContext<'_>,
    point: &PointData,
) -> Result<SubmodulePresentation, RealizeError> {
    let (model, offsets, layout) = ambient_coordinates(ctx);
    let quiver = &ctx.algebra.quiver;
    let total: usize = layout.iter().map(Vec::len).sum();
    let express = |p: &ModPath| -> Vec<Rational> {
        let mut v = vec![Rational::zero(); total];
        for (bpos, c) in model.express(p) {
            let q = model.basis_paths()[bpos].clone();
            let vtx = quiver.target_of(&q.path).0;
            let k = layout[vtx].iter().position(|x| x == &q).expect("basis path");
            v[offsets[vtx] + k] = c;
        }
        v
    };
    let mut generators = Vec::new();
    let mut add_difference = |u: &ModPath, set: &[ModPath]| -> Result<(), RealizeError> {
        let mut v = express(u);
        for q in set {
            let idx = critical.pair_index(u, q).expect("indexed pair");
            let c = point.get(idx)?.clone();
            if !c.is_zero() {
                let qv = express(q);
                for (a, b) in v.iter_mut().zip(qv) {
                    *a -= &c * &b;
                }
            }
        }
        if v.iter().any(|x| !x.is_zero()) {
            generators.push(v);
        }
        Ok(())
    };
    for (u, set) in critical.critical_paths.iter().zip(&critical.sigma_sets) {
        add_difference(u, set)?;
    }
    for u in &critical.zero_critical_paths {
        // Vanishing critical paths contribute the zero difference.
        let _ = u;
    }
    Ok(SubmodulePresentation::new(generators, total))
}

/// Ambient truncated model of the context's projective with a per-vertex
/// coordinate layout.
pub fn ambient_coordinates(
    ctx: &ProjectiveContext<'_>,
) -> (
    crate::algebra::TruncatedModule,
    Vec<usize>,
    Vec<Vec<ModPath>>,
) {
    let model = crate::algebra::TruncatedModule::build(ctx.algebra, &ctx.slots);
    let layout = model.vertex_layout(&ctx.algebra.quiver);
    let mut offsets = Vec::new();
    let mut acc = 0;
    for list in &layout {
        offsets.push(acc);
        acc += list.len();
    }
    (model, offsets, layout)
}

/// Close a set of vectors under the arrow action of an ambient realization.
pub fn arrow_closure(
    ambient: &ModuleRealization,
    algebra: &AlgebraPresentation,
    vectors: &[Vec<Rational>],
) -> Vec<Vec<Rational>> {
    let quiver = &algebra.quiver;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut frontier: Vec<Vec<Rational>> = vectors.to_vec();
    for _ in 0..=algebra.loewy_bound {
        let mut next = Vec::new();
        for v in &frontier {
            if v.iter().all(Zero::is_zero) {
                continue;
            }
            rows.push(v.clone());
            for a in quiver.arrows() {
                next.push(ambient.apply_arrow(quiver, a, v));
            }
        }
        frontier = next;
    }
    rows
}

/// Rank of the submodule generated by the presentation inside the ambient
/// projective of `ctx`.
pub fn submodule_dimension(
    ctx: &ProjectiveContext<'_>,
    sub: &SubmodulePresentation,
) -> usize {
    let ambient = crate::algebra::realization_from_model(
        ctx.algebra,
        &crate::algebra::TruncatedModule::build(ctx.algebra, &ctx.slots),
    );
    let rows = arrow_closure(&ambient, ctx.algebra, &sub.generators);
    rank_of_rows(&rows, sub.ambient_dim)
}

/// The quotient of the context's projective by an arrow-stable row space.
/// Rows are closed under the arrow action first, so any generating set works.
pub fn quotient_by_submodule(
    ctx: &ProjectiveContext<'_>,
    sub: &SubmodulePresentation,
) -> ModuleRealization {
    let model = crate::algebra::TruncatedModule::build(ctx.algebra, &ctx.slots);
    let ambient = crate::algebra::realization_from_model(ctx.algebra, &model);
    quotient_of(&ambient, ctx.algebra, &sub.generators)
}

/// Quotient of an arbitrary realization by the submodule its rows generate.
pub fn quotient_of(
    ambient: &ModuleRealization,
    algebra: &AlgebraPresentation,
    rows: &[Vec<Rational>],
) -> ModuleRealization {
    let quiver = &algebra.quiver;
    let offs = ambient.offsets();
    let closed = arrow_closure(ambient, algebra, rows);
    // Per-vertex reduced spans of the submodule.
    let mut reduced: Vec<Matrix> = Vec::new();
    for (i, &d) in ambient.vertex_dims.iter().enumerate() {
        let block: Vec<Vec<Rational>> = closed
            .iter()
            .map(|v| v[offs[i]..offs[i] + d].to_vec())
            .filter(|v| v.iter().any(|x| !x.is_zero()))
            .collect();
        reduced.push(row_space(&block, d));
    }
    // Complement coordinates: non-pivot columns survive in the quotient.
    let mut keep: Vec<Vec<usize>> = Vec::new();
    for (i, r) in reduced.iter().enumerate() {
        let (_, pivots) = r.rref();
        let kept: Vec<usize> = (0..ambient.vertex_dims[i])
            .filter(|c| !pivots.contains(c))
            .collect();
        keep.push(kept);
    }
    // Projection of a vertex-component vector onto the kept coordinates.
    let project = |i: usize, v: &[Rational]| -> Vec<Rational> {
        let r = &reduced[i];
        let mut w = v.to_vec();
        let (rr, pivots) = r.rref();
        for (row, &pc) in pivots.iter().enumerate() {
            if !w[pc].is_zero() {
                let factor = w[pc].clone();
                for c in 0..w.len() {
                    let delta = &rr[(row, c)] * &factor;
                    w[c] -= delta;
                }
            }
        }
        keep[i].iter().map(|&c| w[c].clone()).collect()
    };
    let vertex_dims: Vec<usize> = keep.iter().map(Vec::len).collect();
    let arrow_maps = quiver
        .arrows()
        .map(|a| {
            let s = quiver.arrow_source(a).0;
            let t = quiver.arrow_target(a).0;
            let mut m = Matrix::zero(vertex_dims[t], vertex_dims[s]);
            for (col, &orig) in keep[s].iter().enumerate() {
                let mut v = vec![Rational::zero(); ambient.vertex_dims[s]];
                v[orig] = Rational::one();
                let image = ambient.arrow_maps[a.0].mul_vec(&v);
                for (row, val) in project(t, &image).into_iter().enumerate() {
                    m[(row, col)] = val;
                }
            }
            m
        })
        .collect();
    let offsets_new = {
        let mut o = Vec::new();
        let mut acc = 0;
        for &d in &vertex_dims {
            o.push(acc);
            acc += d;
        }
        o
    };
    let total: usize = vertex_dims.iter().sum();
    let tops = ambient
        .tops
        .iter()
        .map(|t| {
            let mut out = vec![Rational::zero(); total];
            for i in 0..quiver.vertex_count() {
                let comp = &t[offs[i]..offs[i] + ambient.vertex_dims[i]];
                for (k, val) in project(i, comp).into_iter().enumerate() {
                    out[offsets_new[i] + k] = val;
                }
            }
            out
        })
        .collect();
    ModuleRealization {
        vertex_dims,
        arrow_maps,
        tops,
    }
}

/// All skeleta of `m` relative to its marked tops: compatible with the
/// layering and evaluating to a layer-wise basis. One representative per
/// vertex-fixing slot permutation when `dedupe` is set.
pub fn skeleta_of_module(
    m: &ModuleRealization,
    ctx: &ProjectiveContext<'_>,
    dedupe: bool,
) -> Result<Vec<Skeleton>, RealizeError> {
    let algebra = ctx.algebra;
    let quiver = &algebra.quiver;
    if let Some(w) = relations_check(m, algebra).failure {
        return Err(RealizeError::InvalidModule(w));
    }
    if m.tops.len() != ctx.slot_count() {
        return Err(RealizeError::InvalidTops);
    }
    let layering = layering_of_unchecked(m, algebra);
    // Radical powers as row spaces, for modular independence tests.
    let total = m.total_dim();
    let mut powers: Vec<Vec<Vec<Rational>>> = Vec::new();
    let mut current: Vec<Vec<Rational>> = (0..total)
        .map(|i| {
            let mut v = vec![Rational::zero(); total];
            v[i] = Rational::one();
            v
        })
        .collect();
    for _ in 0..=algebra.loewy_bound + 1 {
        powers.push(current.clone());
        current = current
            .iter()
            .flat_map(|v| {
                quiver
                    .arrows()
                    .map(|a| m.apply_arrow(quiver, a, v))
                    .collect::<Vec<_>>()
            })
            .filter(|v| v.iter().any(|x| !x.is_zero()))
            .collect();
    }
    // Tops must be independent modulo the radical.
    {
        let j1 = &powers[1];
        let mut rows = j1.clone();
        let base = rank_of_rows(&rows, total);
        rows.extend(m.tops.iter().cloned());
        if rank_of_rows(&rows, total) != base + m.tops.len() {
            return Err(RealizeError::InvalidTops);
        }
        for (slot, t) in m.tops.iter().enumerate() {
            // Each marked top must be normed by its slot vertex.
            let offs = m.offsets();
            let v = ctx.slots[slot].0;
            let inside = t[offs[v]..offs[v] + m.vertex_dims[v]]
                .iter()
                .any(|x| !x.is_zero());
            let outside = (0..quiver.vertex_count()).filter(|&i| i != v).any(|i| {
                t[offs[i]..offs[i] + m.vertex_dims[i]]
                    .iter()
                    .any(|x| !x.is_zero())
            });
            if !inside || outside {
                return Err(RealizeError::InvalidTops);
            }
        }
    }

    let targets: Vec<Vec<usize>> = layering.layers.iter().map(|l| l.0.clone()).collect();
    let mut found = Vec::new();
    // Level zero: in the small setting all slot generators; otherwise the
    // slots with a nonzero projection. Candidates carry their vectors.
    let level0: Vec<(ModPath, Vec<Rational>)> = (0..ctx.slot_count())
        .map(|s| {
            (
                ModPath::new(s, Path::trivial(ctx.slots[s])),
                m.tops[s].clone(),
            )
        })
        .collect();
    search_levels(
        ctx,
        m,
        &powers,
        &targets,
        1,
        level0.clone(),
        level0.iter().map(|(p, _)| p.clone()).collect(),
        &mut found,
    );
    let mut skeleta: Vec<Skeleton> = if dedupe {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for s in found {
            let canon = s.canonical_under_slot_permutations(ctx);
            if seen.insert(canon.clone()) {
                out.push(canon);
            }
        }
        out
    } else {
        found
    };
    skeleta.sort();
    skeleta.dedup();
    Ok(skeleta)
}

#[allow(clippy::too_many_arguments)]
fn search_levels(
    ctx: &ProjectiveContext<'_>,
    m: &ModuleRealization,
    powers: &[Vec<Vec<Rational>>],
    targets: &[Vec<usize>],
    level: usize,
    frontier: Vec<(ModPath, Vec<Rational>)>,
    acc: Vec<ModPath>,
    found: &mut Vec<Skeleton>,
) {
    if level == targets.len() {
        found.push(Skeleton::from_paths(acc));
        return;
    }
    let quiver = &ctx.algebra.quiver;
    let total = m.total_dim();
    let want = &targets[level];
    if want.iter().all(|&w| w == 0) {
        if targets[level..].iter().all(|t| t.iter().all(|&w| w == 0)) {
            found.push(Skeleton::from_paths(acc));
        }
        return;
    }
    let mut candidates: Vec<(ModPath, Vec<Rational>)> = Vec::new();
    for (p, v) in &frontier {
        let end = quiver.target_of(&p.path);
        for a in quiver.arrows() {
            if quiver.arrow_source(a) == end {
                let ext = ModPath::new(p.slot, quiver.extend(&p.path, a).expect("source matches"));
                let image = m.apply_arrow(quiver, a, v);
                candidates.push((ext, image));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.cmp(&b.0));
    candidates.dedup_by(|a, b| a.0 == b.0);

    let deeper = &powers[(level + 1).min(powers.len() - 1)];
    let base_rows: Vec<Vec<Rational>> = deeper.clone();
    let base_rank = rank_of_rows(&base_rows, total);
    let ends: Vec<usize> = candidates
        .iter()
        .map(|(p, _)| quiver.target_of(&p.path).0)
        .collect();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        idx: usize,
        candidates: &[(ModPath, Vec<Rational>)],
        ends: &[usize],
        want: &[usize],
        counts: &mut Vec<usize>,
        chosen: &mut Vec<usize>,
        rows: &mut Vec<Vec<Rational>>,
        base_rank: usize,
        total: usize,
        ctx: &ProjectiveContext<'_>,
        m: &ModuleRealization,
        powers: &[Vec<Vec<Rational>>],
        targets: &[Vec<usize>],
        level: usize,
        acc: &[ModPath],
        found: &mut Vec<Skeleton>,
    ) {
        if counts == want {
            let picked: Vec<(ModPath, Vec<Rational>)> = chosen
                .iter()
                .map(|&i| candidates[i].clone())
                .collect();
            let mut next_acc = acc.to_vec();
            next_acc.extend(picked.iter().map(|(p, _)| p.clone()));
            search_levels(ctx, m, powers, targets, level + 1, picked, next_acc, found);
            return;
        }
        if idx == candidates.len() {
            return;
        }
        for v in 0..want.len() {
            let deficit = want[v].saturating_sub(counts[v]);
            let remaining = ends[idx..].iter().filter(|&&e| e == v).count();
            if deficit > remaining {
                return;
            }
        }
        let v = ends[idx];
        if counts[v] < want[v] {
            // Accept candidate idx if it stays independent mod the next power.
            rows.push(candidates[idx].1.clone());
            let expect = base_rank + chosen.len() + 1;
            if rank_of_rows(rows, total) == expect {
                counts[v] += 1;
                chosen.push(idx);
                rec(
                    idx + 1,
                    candidates,
                    ends,
                    want,
                    counts,
                    chosen,
                    rows,
                    base_rank,
                    total,
                    ctx,
                    m,
                    powers,
                    targets,
                    level,
                    acc,
                    found,
                );
                chosen.pop();
                counts[v] -= 1;
            }
            rows.pop();
        }
        rec(
            idx + 1,
            candidates,
            ends,
            want,
            counts,
            chosen,
            rows,
            base_rank,
            total,
            ctx,
            m,
            powers,
            targets,
            level,
            acc,
            found,
        );
    }
    let mut counts = vec![0usize; want.len()];
    let mut chosen = Vec::new();
    let mut rows = base_rows;
    rec(
        0,
        &candidates,
        &ends,
        want,
        &mut counts,
        &mut chosen,
        &mut rows,
        base_rank,
        total,
        ctx,
        m,
        powers,
        targets,
        level,
        &acc,
        found,
    );
}

/// Dimension and basis of the homomorphism space between two realizations.
pub fn hom_dim(
    m: &ModuleRealization,
    n: &ModuleRealization,
    algebra: &AlgebraPresentation,
) -> Result<(usize, Vec<Vec<Matrix>>), RealizeError> {
    let quiver = &algebra.quiver;
    if m.vertex_dims.len() != n.vertex_dims.len() {
        return Err(RealizeError::AlgebraMismatch);
    }
    // Unknowns: per vertex i, an n_i x m_i matrix, flattened row-major.
    let n_vars: usize = m
        .vertex_dims
        .iter()
        .zip(&n.vertex_dims)
        .map(|(a, b)| a * b)
        .sum();
    let var_offsets: Vec<usize> = {
        let mut offs = Vec::new();
        let mut acc = 0;
        for (a, b) in m.vertex_dims.iter().zip(&n.vertex_dims) {
            offs.push(acc);
            acc += a * b;
        }
        offs
    };
    let var_of = |i: usize, row: usize, col: usize| var_offsets[i] + row * m.vertex_dims[i] + col;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for a in quiver.arrows() {
        let s = quiver.arrow_source(a).0;
        let t = quiver.arrow_target(a).0;
        let xm = &m.arrow_maps[a.0];
        let xn = &n.arrow_maps[a.0];
        // f_t * X^m_a - X^n_a * f_s = 0, entry (r, c): r < n_t dims, c < m_s.
        for r in 0..n.vertex_dims[t] {
            for c in 0..m.vertex_dims[s] {
                let mut row = vec![Rational::zero(); n_vars];
                for k in 0..m.vertex_dims[t] {
                    if !xm[(k, c)].is_zero() {
                        row[var_of(t, r, k)] += &xm[(k, c)];
                    }
                }
                for k in 0..n.vertex_dims[s] {
                    if !xn[(r, k)].is_zero() {
                        row[var_of(s, k, c)] -= &xn[(r, k)];
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let kernel = if rows.is_empty() {
        // No constraints: every tuple of matrices is a homomorphism.
        let mut basis = Vec::new();
        for i in 0..n_vars {
            let mut v = vec![Rational::zero(); n_vars];
            v[i] = Rational::one();
            basis.push(v);
        }
        basis
    } else {
        Matrix::from_rows(rows).kernel_basis()
    };
    let unpack = |v: &[Rational]| -> Vec<Matrix> {
        (0..m.vertex_dims.len())
            .map(|i| {
                let mut mat = Matrix::zero(n.vertex_dims[i], m.vertex_dims[i]);
                for r in 0..n.vertex_dims[i] {
                    for c in 0..m.vertex_dims[i] {
                        mat[(r, c)] = v[var_of(i, r, c)].clone();
                    }
                }
                mat
            })
            .collect()
    };
    let basis: Vec<Vec<Matrix>> = kernel.iter().map(|v| unpack(v)).collect();
    Ok((basis.len(), basis))
}

/// Realization of the radical submodule `JM`,
/// on the pivot-column basis of the arrow images.
pub fn radical_realization(
    m: &ModuleRealization,
    algebra: &AlgebraPresentation,
) -> ModuleRealization {
    let quiver = &algebra.quiver;
    let offs = m.offsets();
    let total = m.total_dim();
    // Spanning rows of JM per vertex.
    let mut per_vertex: Vec<Vec<Vec<Rational>>> = vec![Vec::new(); quiver.vertex_count()];
    for a in quiver.arrows() {
        let t = quiver.arrow_target(a).0;
        let s = quiver.arrow_source(a).0;
        for c in 0..m.vertex_dims[s] {
            let mut v = vec![Rational::zero(); total];
            v[offs[s] + c] = Rational::one();
            let image = m.apply_arrow(quiver, a, &v);
            let comp = image[offs[t]..offs[t] + m.vertex_dims[t]].to_vec();
            if comp.iter().any(|x| !x.is_zero()) {
                per_vertex[t].push(comp);
            }
        }
    }
    let bases: Vec<Matrix> = per_vertex
        .iter()
        .enumerate()
        .map(|(i, rows)| row_space(rows, m.vertex_dims[i]))
        .collect();
    let vertex_dims: Vec<usize> = bases.iter().map(Matrix::row_count).collect();
    // Express a vertex-component vector over the radical basis (it must lie
    // inside the span).
    let express = |i: usize, v: &[Rational]| -> Vec<Rational> {
        let b = &bases[i];
        let mut coords = vec![Rational::zero(); b.row_count()];
        let mut w = v.to_vec();
        let (_, pivots) = b.rref();
        for (row, &pc) in pivots.iter().enumerate() {
            if !w[pc].is_zero() {
                let factor = w[pc].clone();
                coords[row] = factor.clone();
                for c in 0..w.len() {
                    let delta = &b[(row, c)] * &factor;
                    w[c] -= delta;
                }
            }
        }
        debug_assert!(w.iter().all(Zero::is_zero), "vector outside the radical");
        coords
    };
    let arrow_maps = quiver
        .arrows()
        .map(|a| {
            let s = quiver.arrow_source(a).0;
            let t = quiver.arrow_target(a).0;
            let mut mat = Matrix::zero(vertex_dims[t], vertex_dims[s]);
            for col in 0..vertex_dims[s] {
                let src = bases[s].row(col).to_vec();
                let mut stacked = vec![Rational::zero(); total];
                stacked[offs[s]..offs[s] + m.vertex_dims[s]].clone_from_slice(&src);
                let image = m.apply_arrow(quiver, a, &stacked);
                let comp = image[offs[t]..offs[t] + m.vertex_dims[t]].to_vec();
                for (row, val) in express(t, &comp).into_iter().enumerate() {
                    mat[(row, col)] = val;
                }
            }
            mat
        })
        .collect();
    ModuleRealization {
        vertex_dims,
        arrow_maps,
        tops: Vec::new(),
    }
}

/// Dimension of the unipotent orbit of a quotient of the context's
/// projective: `dim Hom(Q, JM) - dim Hom(M, JM)`.
pub fn unipotent_orbit_dim(
    ctx: &ProjectiveContext<'_>,
    m: &ModuleRealization,
) -> Result<usize, RealizeError> {
    let algebra = ctx.algebra;
    // Top of m must be dominated by the cover's top.
    let top_m = layering_of_unchecked(m, algebra).layers[0].clone();
    let mut cover_top = vec![0usize; algebra.quiver.vertex_count()];
    for &v in &ctx.slots {
        cover_top[v.0] += 1;
    }
    if !top_m.leq(&crate::layering::DimensionVector(cover_top)) {
        return Err(RealizeError::TopNotDominated);
    }
    let q = crate::algebra::projective_realization(algebra, &ctx.slots)
        .map_err(|e| RealizeError::InvalidModule(e.to_string()))?;
    let jm = radical_realization(m, algebra);
    let (dim_qjm, _) = hom_dim(&q, &jm, algebra)?;
    let (dim_mjm, _) = hom_dim(m, &jm, algebra)?;
    Ok(dim_qjm - dim_mjm)
}

/// Verdict of the randomized isomorphism probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoVerdict {
    /// An explicit invertible homomorphism was found.
    Isomorphic(Vec<Matrix>),
    NotIsomorphic(String),
    Inconclusive,
}

/// Randomized isomorphism test: cheap invariants first, then random
/// combinations of a Hom-basis searched for an invertible one.
pub fn iso_probe(
    m: &ModuleRealization,
    n: &ModuleRealization,
    algebra: &AlgebraPresentation,
    trials: usize,
    seed: u64,
) -> Result<IsoVerdict, RealizeError> {
    if m.vertex_dims != n.vertex_dims {
        return Ok(IsoVerdict::NotIsomorphic("dimension vectors differ".into()));
    }
    let lay_m = layering_of_unchecked(m, algebra);
    let lay_n = layering_of_unchecked(n, algebra);
    if lay_m != lay_n {
        return Ok(IsoVerdict::NotIsomorphic("radical layerings differ".into()));
    }
    let (dim_mn, basis) = hom_dim(m, n, algebra)?;
    let (dim_nm, _) = hom_dim(n, m, algebra)?;
    let (dim_mm, _) = hom_dim(m, m, algebra)?;
    let (dim_nn, _) = hom_dim(n, n, algebra)?;
    if dim_mn != dim_nm || dim_mm != dim_nn {
        return Ok(IsoVerdict::NotIsomorphic("Hom dimensions differ".into()));
    }
    if dim_mn == 0 {
        return if m.total_dim() == 0 {
            Ok(IsoVerdict::Isomorphic(Vec::new()))
        } else {
            Ok(IsoVerdict::NotIsomorphic("no homomorphisms at all".into()))
        };
    }
    let invertible = |f: &Vec<Matrix>| {
        f.iter()
            .enumerate()
            .all(|(i, mat)| mat.rank() == m.vertex_dims[i])
    };
    // The identity tuple, when it happens to be a homomorphism, is tried first.
    if m.arrow_maps == n.arrow_maps {
        let id: Vec<Matrix> = m.vertex_dims.iter().map(|&d| Matrix::identity(d)).collect();
        return Ok(IsoVerdict::Isomorphic(id));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let range = SampleRange::default();
    for _ in 0..trials {
        let coeffs: Vec<Rational> = (0..dim_mn)
            .map(|_| random_rational(&mut rng, range))
            .collect();
        let f: Vec<Matrix> = (0..m.vertex_dims.len())
            .map(|i| {
                let mut acc = Matrix::zero(n.vertex_dims[i], m.vertex_dims[i]);
                for (c, b) in coeffs.iter().zip(&basis) {
                    acc = acc.add(&b[i].scale(c));
                }
                acc
            })
            .collect();
        if invertible(&f) {
            return Ok(IsoVerdict::Isomorphic(f));
        }
    }
    Ok(IsoVerdict::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::{swing, two_loops};
    use crate::algebra::projective_realization;
    use crate::layering::{layering_of, DimensionVector, SemisimpleSequence};
    use crate::quiver::{ArrowId, VertexId};
    use crate::scalar::rat;
    use crate::skeleta::{critical_data, ProjectiveContext, Setting, Skeleton};

    fn mp(ctx: &ProjectiveContext<'_>, slot: usize, arrows: &[usize]) -> ModPath {
        let arrows: Vec<ArrowId> = arrows.iter().map(|&a| ArrowId(a)).collect();
        ModPath::new(
            slot,
            ctx.algebra
                .quiver
                .path(ctx.slots[slot], &arrows)
                .expect("valid arrows"),
        )
    }

    #[test]
    fn zero_point_realizes_tree_module() {
        let alg = two_loops();
        let ctx = ProjectiveContext::small_cover(&alg, &DimensionVector(vec![1]));
        let sk = Skeleton::from_paths(vec![mp(&ctx, 0, &[]), mp(&ctx, 0, &[0]), mp(&ctx, 0, &[0, 1])]);
        let data = critical_data(&sk, &ctx);
        let m = realize_point(&sk, &data, &ctx, &PointData::zero(&data)).unwrap();
        assert_eq!(m.total_dim(), 3);
        assert!(relations_check(&m, &alg).passed());
        let lay = layering_of(&m, &alg).unwrap();
        assert_eq!(
            lay,
            SemisimpleSequence::from_counts(vec![vec![1], vec![1], vec![1]])
        );
    }

    #[test]
    fn swing_projective_from_point() {
        let alg = swing();
        let ctx = ProjectiveContext::small_cover(&alg, &DimensionVector(vec![1, 0]));
        let sk = Skeleton::from_paths(vec![mp(&ctx, 0, &[]), mp(&ctx, 0, &[0])]);
        let data = critical_data(&sk, &ctx);
        let m = realize_point(&sk, &data, &ctx, &PointData::zero(&data)).unwrap();
        assert_eq!(m.vertex_dims, vec![1, 1]);
        let lay = layering_of(&m, &alg).unwrap();
        assert_eq!(
            lay,
            SemisimpleSequence::from_counts(vec![vec![1, 0], vec![0, 1]])
        );
    }

    #[test]
    fn projective_passes_relations() {
        let alg = two_loops();
        let q = projective_realization(&alg, &[VertexId(0); 2]).unwrap();
        assert!(relations_check(&q, &alg).passed());
    }

    #[test]
    fn bad_point_fails_relations_with_witness() {
        // 1 -> 2 -> 3 with relation b.a and the full-chain skeleton: any
        // realization of the unit ideal's chart must fail the relation check.
        let q = crate::quiver::Quiver::new(
            vec!["1".into(), "2".into(), "3".into()],
            vec![
                ("a".into(), "1".into(), "2".into()),
                ("b".into(), "2".into(), "3".into()),
            ],
        )
        .unwrap();
        let ba = q.path(VertexId(0), &[ArrowId(0), ArrowId(1)]).unwrap();
        let alg = crate::algebra::AlgebraPresentation::new(
            q,
            vec![crate::algebra::Relation::new(vec![(rat(1), ba)])],
            2,
        );
        let ctx = ProjectiveContext::new(&alg, vec![VertexId(0)], Setting::Small);
        let sk = Skeleton::from_paths(vec![mp(&ctx, 0, &[]), mp(&ctx, 0, &[0]), mp(&ctx, 0, &[0, 1])]);
        let data = critical_data(&sk, &ctx);
        let m = realize_point(&sk, &data, &ctx, &PointData::zero(&data)).unwrap();
        let check = relations_check(&m, &alg);
        assert!(!check.passed());
        assert!(check.failure.unwrap().contains("relation"));
    }

    #[test]
    fn hom_dimensions_on_small_examples() {
        let alg = swing();
        let p1 = projective_realization(&alg, &[VertexId(0)]).unwrap();
        let p2 = projective_realization(&alg, &[VertexId(1)]).unwrap();
        let s2 = ModuleRealization {
            vertex_dims: vec![0, 1],
            arrow_maps: vec![
                Matrix::zero(1, 0),
                Matrix::zero(0, 1),
            ],
            tops: vec![],
        };
        let both = p1.direct_sum(&p2, &alg.quiver);
        assert_eq!(hom_dim(&both, &s2, &alg).unwrap().0, 1);
        assert_eq!(hom_dim(&p1, &s2, &alg).unwrap().0, 0);

        let two = two_loops();
        let m = projective_realization(&two, &[VertexId(0)]).unwrap();
        assert_eq!(hom_dim(&m, &m, &two).unwrap().0, 5);
    }

    #[test]
    fn orbit_dimension_of_projective_quotients() {
        let alg = swing();
        // Q = P(1) + P(2); M = P(1) realized as Q / (z2 component).
        let ctx = ProjectiveContext::new(&alg, vec![VertexId(0), VertexId(1)], Setting::Big);
        let (model, offsets, layout) = ambient_coordinates(&ctx);
        let total: usize = layout.iter().map(Vec::len).sum();
        let mut z2 = vec![Rational::zero(); total];
        for (bpos, c) in model.express(&ModPath::new(1, Path::trivial(VertexId(1)))) {
            let q = model.basis_paths()[bpos].clone();
            let v = ctx.algebra.quiver.target_of(&q.path).0;
            let k = layout[v].iter().position(|x| x == &q).unwrap();
            z2[offsets[v] + k] = c;
        }
        let m = quotient_by_submodule(&ctx, &SubmodulePresentation::new(vec![z2], total));
        assert_eq!(m.total_dim(), 2);
        assert_eq!(unipotent_orbit_dim(&ctx, &m).unwrap(), 1);
        // Semisimple quotient: orbit is a point.
        let top = quotient_of(
            &projective_realization(&alg, &[VertexId(0), VertexId(1)]).unwrap(),
            &alg,
            &{
                let amb = projective_realization(&alg, &[VertexId(0), VertexId(1)]).unwrap();
                let quiver = &alg.quiver;
                let offs = amb.offsets();
                let mut rows = Vec::new();
                for a in quiver.arrows() {
                    let s = quiver.arrow_source(a).0;
                    for c in 0..amb.vertex_dims[s] {
                        let mut v = vec![Rational::zero(); amb.total_dim()];
                        v[offs[s] + c] = Rational::one();
                        rows.push(amb.apply_arrow(quiver, a, &v));
                    }
                }
                rows
            },
        );
        assert_eq!(unipotent_orbit_dim(&ctx, &top).unwrap(), 0);
    }

    #[test]
    fn iso_probe_detects_identity_and_distinguishes() {
        let alg = swing();
        let p1 = projective_realization(&alg, &[VertexId(0)]).unwrap();
        match iso_probe(&p1, &p1, &alg, 4, 1).unwrap() {
            IsoVerdict::Isomorphic(_) => {}
            other => panic!("expected isomorphism, got {other:?}"),
        }
        let semisimple = ModuleRealization {
            vertex_dims: vec![1, 1],
            arrow_maps: vec![Matrix::zero(1, 1), Matrix::zero(0, 1).transpose()],
            tops: vec![],
        };
        // Fix shapes: beta maps vertex2 -> vertex1.
        let semisimple = ModuleRealization {
            arrow_maps: vec![Matrix::zero(1, 1), Matrix::zero(1, 1)],
            ..semisimple
        };
        match iso_probe(&p1, &semisimple, &alg, 4, 1).unwrap() {
            IsoVerdict::NotIsomorphic(_) => {}
            other => panic!("expected non-isomorphism, got {other:?}"),
        }
    }

    #[test]
    fn iso_probe_spots_relabelled_basis() {
        let alg = two_loops();
        let ctx = ProjectiveContext::small_cover(&alg, &DimensionVector(vec![1]));
        let sk = Skeleton::from_paths(vec![mp(&ctx, 0, &[]), mp(&ctx, 0, &[0]), mp(&ctx, 0, &[0, 1])]);
        let data = critical_data(&sk, &ctx);
        let m = realize_point(&sk, &data, &ctx, &PointData::zero(&data)).unwrap();
        // Conjugate by a permutation-ish invertible change of basis at the
        // single vertex.
        let g = Matrix::from_rows(vec![
            vec![rat(0), rat(1), rat(0)],
            vec![rat(1), rat(0), rat(0)],
            vec![rat(0), rat(2), rat(1)],
        ]);
        let g_inv = {
            // Invert by solving g * x = e_i.
            let mut aug_rows = Vec::new();
            for r in 0..3 {
                let mut row = g.row(r).to_vec();
                for c in 0..3 {
                    row.push(if r == c { rat(1) } else { rat(0) });
                }
                aug_rows.push(row);
            }
            let (rr, _) = Matrix::from_rows(aug_rows).rref();
            Matrix::from_rows(
                (0..3)
                    .map(|r| rr.row(r)[3..].to_vec())
                    .collect(),
            )
        };
        let n = ModuleRealization {
            vertex_dims: m.vertex_dims.clone(),
            arrow_maps: m
                .arrow_maps
                .iter()
                .map(|x| g.mul(x).mul(&g_inv))
                .collect(),
            tops: vec![],
        };
        match iso_probe(&m, &n, &alg, 30, 5).unwrap() {
            IsoVerdict::Isomorphic(_) => {}
            other => panic!("expected isomorphism, got {other:?}"),
        }
    }

    #[test]
    fn submodule_dimension_matches_chart_codimension() {
        let alg = two_loops();
        let ctx = ProjectiveContext::small_cover(&alg, &DimensionVector(vec![1]));
        let sk = Skeleton::from_paths(vec![mp(&ctx, 0, &[]), mp(&ctx, 0, &[0]), mp(&ctx, 0, &[0, 1])]);
        let data = critical_data(&sk, &ctx);
        let point = PointData::zero(&data);
        let sub = submodule_from_point(&sk, &data, &ctx, &point).unwrap();
        assert_eq!(submodule_dimension(&ctx, &sub), ctx.dim_q() - sk.len());
        // The quotient by the point submodule is the realized module.
        let m1 = quotient_by_submodule(&ctx, &sub);
        let m2 = realize_point(&sk, &data, &ctx, &point).unwrap();
        assert_eq!(m1.vertex_dims, m2.vertex_dims);
        let lay1 = layering_of(&m1, &alg).unwrap();
        let lay2 = layering_of(&m2, &alg).unwrap();
        assert_eq!(lay1, lay2);
    }

    #[test]
    fn regular_module_has_one_skeleton() {
        // The two-loop regular module: its five basis paths form the unique
        // skeleton relative to the distinguished generator.
        let alg = two_loops();
        let ctx = ProjectiveContext::small_cover(&alg, &DimensionVector(vec![1]));
        let m = projective_realization(&alg, &[VertexId(0)]).unwrap();
        let skeleta = skeleta_of_module(&m, &ctx, false).unwrap();
        assert_eq!(skeleta.len(), 1);
        assert_eq!(skeleta[0].len(), 5);
        let expected = Skeleton::from_paths(vec![
            mp(&ctx, 0, &[]),
            mp(&ctx, 0, &[0]),
            mp(&ctx, 0, &[1]),
            mp(&ctx, 0, &[0, 1]),
            mp(&ctx, 0, &[1, 0]),
        ]);
        assert_eq!(skeleta[0], expected);
    }

    #[test]
    fn big_setting_point_realization_and_quotient_agree() {
        let q = crate::quiver::Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("a".into(), "1".into(), "2".into())],
        )
        .unwrap();
        let alg = crate::algebra::AlgebraPresentation::new(q, vec![], 1);
        let ctx = ProjectiveContext::big_cover(&alg, &crate::layering::DimensionVector(vec![2, 1]));
        let sk = Skeleton::from_paths(vec![mp(&ctx, 0, &[]), mp(&ctx, 1, &[]), mp(&ctx, 0, &[0])]);
        let data = critical_data(&sk, &ctx);
        assert_eq!(data.pair_count(), 2);
        let point = PointData::from_assignments(
            &data,
            &[
                ((mp(&ctx, 1, &[0]), mp(&ctx, 0, &[0])), rat(2)),
                ((mp(&ctx, 2, &[]), mp(&ctx, 0, &[0])), rat(3)),
            ],
        )
        .unwrap();
        let m = realize_point(&sk, &data, &ctx, &point).unwrap();
        assert_eq!(m.vertex_dims, vec![2, 1]);
        assert!(relations_check(&m, &alg).passed());
        let sub = submodule_from_point(&sk, &data, &ctx, &point).unwrap();
        assert_eq!(submodule_dimension(&ctx, &sub), ctx.dim_q() - sk.len());
        let quotient = quotient_by_submodule(&ctx, &sub);
        assert_eq!(quotient.vertex_dims, m.vertex_dims);
        assert_eq!(
            layering_of(&quotient, &alg).unwrap(),
            layering_of(&m, &alg).unwrap()
        );
    }

    #[test]
    fn single_skeleton_of_simple_module() {
        let alg = swing();
        let ctx = ProjectiveContext::small_cover(&alg, &DimensionVector(vec![1, 0]));
        // S1: one-dimensional at vertex 1, arrows act by zero.
        let s1 = ModuleRealization {
            vertex_dims: vec![1, 0],
            arrow_maps: vec![Matrix::zero(0, 1), Matrix::zero(1, 0)],
            tops: vec![vec![rat(1)]],
        };
        let skeleta = skeleta_of_module(&s1, &ctx, false).unwrap();
        assert_eq!(skeleta.len(), 1);
        assert_eq!(skeleta[0].len(), 1);
    }
}
