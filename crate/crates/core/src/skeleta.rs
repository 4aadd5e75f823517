//! Abstract skeleta, their enumeration against a semisimple sequence, and
//! critical-path data with the coordinate index `N`.
//!
//! A skeleton is a set of slot paths closed under initial subpaths. Its
//! critical paths are the one-arrow extensions that fall outside it (plus, in
//! the big setting, the unused slot generators). Critical paths that are zero
//! in the algebra carry identically-zero coordinates on every chart, so they
//! are excluded from the variable index; the raw extension count is kept
//! separately because it is the quantity that only depends on the layering.

use crate::algebra::{AlgebraPresentation, TruncatedModule};
use crate::layering::{cover_slots, DimensionVector, SemisimpleSequence};
use crate::quiver::{ModPath, Path, VertexId};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Setting {
    /// Slots form the distinguished projective cover of the fixed top; every
    /// slot generator belongs to each skeleton.
    Small,
    /// Slots cover a full dimension vector; skeleta may leave slots unused.
    Big,
}

/// A projective module `Q = (+) Lambda z_r` fixed as the ambient of all
/// skeleton and chart computations, together with zero-divisor information
/// about the algebra's paths.
pub struct ProjectiveContext<'a> {
    pub algebra: &'a AlgebraPresentation,
    pub slots: Vec<VertexId>,
    pub setting: Setting,
    vertex_models: Vec<TruncatedModule>,
}

impl<'a> ProjectiveContext<'a> {
    pub fn new(algebra: &'a AlgebraPresentation, slots: Vec<VertexId>, setting: Setting) -> Self {
        let vertex_models = algebra
            .quiver
            .vertices()
            .map(|v| TruncatedModule::build(algebra, &[v]))
            .collect();
        ProjectiveContext {
            algebra,
            slots,
            setting,
            vertex_models,
        }
    }

    /// Cover of the top of a semisimple sequence (small setting).
    pub fn small_cover(algebra: &'a AlgebraPresentation, top: &DimensionVector) -> Self {
        Self::new(algebra, cover_slots(top), Setting::Small)
    }

    /// Cover of a full dimension vector (big setting).
    pub fn big_cover(algebra: &'a AlgebraPresentation, total: &DimensionVector) -> Self {
        Self::new(algebra, cover_slots(total), Setting::Big)
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    /// True iff the path is zero in the algebra.
    pub fn is_zero_path(&self, path: &Path) -> bool {
        self.vertex_models[path.source.0].is_zero_path(&ModPath::new(0, path.clone()))
    }

    pub fn dim_q(&self) -> usize {
        self.slots
            .iter()
            .map(|&v| self.vertex_models[v.0].dimension())
            .sum()
    }
}

/// A set of slot paths closed under initial subpaths.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Skeleton {
    pub paths: BTreeSet<ModPath>,
}

impl Skeleton {
    pub fn new(paths: BTreeSet<ModPath>) -> Self {
        Skeleton { paths }
    }

    pub fn from_paths<I: IntoIterator<Item = ModPath>>(iter: I) -> Self {
        Skeleton {
            paths: iter.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn level(&self, l: usize) -> impl Iterator<Item = &ModPath> {
        self.paths.iter().filter(move |p| p.len() == l)
    }

    pub fn max_len(&self) -> usize {
        self.paths.iter().map(ModPath::len).max().unwrap_or(0)
    }

    /// Slots whose length-zero path is present.
    pub fn top_slots(&self) -> Vec<usize> {
        self.paths
            .iter()
            .filter(|p| p.is_empty())
            .map(|p| p.slot)
            .collect()
    }

    pub fn contains(&self, p: &ModPath) -> bool {
        self.paths.contains(p)
    }

    /// Canonical representative under slot permutations that fix norming
    /// vertices: within each vertex group, slots are reassigned so the
    /// per-slot path trees appear in sorted order.
    pub fn canonical_under_slot_permutations(&self, ctx: &ProjectiveContext<'_>) -> Skeleton {
        let mut trees: BTreeMap<usize, BTreeSet<Vec<crate::quiver::ArrowId>>> = BTreeMap::new();
        for slot in 0..ctx.slot_count() {
            trees.entry(slot).or_default();
        }
        for p in &self.paths {
            trees
                .entry(p.slot)
                .or_default()
                .insert(p.path.arrows.clone());
        }
        // Group slots by vertex, preserving canonical group order.
        let mut groups: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
        for (slot, &v) in ctx.slots.iter().enumerate() {
            groups.entry(v).or_default().push(slot);
        }
        let mut assignment: Vec<usize> = vec![0; ctx.slot_count()];
        for (_, slots) in groups {
            let mut owned: Vec<(BTreeSet<Vec<crate::quiver::ArrowId>>, usize)> = slots
                .iter()
                .map(|&s| (trees[&s].clone(), s))
                .collect();
            // Sort trees descending by size then content so the fullest tree
            // lands on the first slot of the group: a deterministic minimum.
            owned.sort_by(|a, b| {
                b.0.len()
                    .cmp(&a.0.len())
                    .then_with(|| a.0.cmp(&b.0))
            });
            for (target_pos, (_, original)) in owned.into_iter().enumerate() {
                assignment[original] = slots[target_pos];
            }
        }
        Skeleton::from_paths(self.paths.iter().map(|p| ModPath {
            slot: assignment[p.slot],
            path: p.path.clone(),
        }))
    }
}

/// Closure, length-bound, and top conditions for the given context.
pub fn is_skeleton(paths: &BTreeSet<ModPath>, ctx: &ProjectiveContext<'_>) -> bool {
    let quiver = &ctx.algebra.quiver;
    let l = ctx.algebra.loewy_bound;
    for p in paths {
        if p.slot >= ctx.slot_count() || p.path.source != ctx.slots[p.slot] || p.len() > l {
            return false;
        }
        let mut prefix = p.path.arrows.clone();
        while !prefix.is_empty() {
            prefix.pop();
            let sub = ModPath::new(
                p.slot,
                quiver
                    .path(p.path.source, &prefix)
                    .expect("prefix of a valid path"),
            );
            if !paths.contains(&sub) {
                return false;
            }
        }
    }
    if ctx.setting == Setting::Small {
        for slot in 0..ctx.slot_count() {
            if !paths.contains(&ModPath::new(slot, Path::trivial(ctx.slots[slot]))) {
                return false;
            }
        }
    }
    true
}

/// The unique semisimple sequence a skeleton is compatible with: layer `l`
/// counts the paths of length `l` ending at each vertex.
pub fn compatible_sequence(
    skeleton: &Skeleton,
    ctx: &ProjectiveContext<'_>,
) -> SemisimpleSequence {
    let quiver = &ctx.algebra.quiver;
    let mut counts = vec![vec![0usize; quiver.vertex_count()]; ctx.algebra.loewy_bound + 1];
    for p in &skeleton.paths {
        counts[p.len()][quiver.target_of(&p.path).0] += 1;
    }
    SemisimpleSequence::from_counts(counts)
}

/// All skeleta compatible with `sequence`, built level by level. Output is
/// canonically sorted; with `dedupe_top_permutations` only one representative
/// per orbit of vertex-fixing slot permutations is kept.
pub fn enumerate_skeleta(
    ctx: &ProjectiveContext<'_>,
    sequence: &SemisimpleSequence,
    dedupe_top_permutations: bool,
) -> Vec<Skeleton> {
    let quiver = &ctx.algebra.quiver;
    let n = quiver.vertex_count();
    if sequence.layers.len() != ctx.algebra.loewy_bound + 1 {
        return Vec::new();
    }

    // Level-zero choices.
    let mut zero_choices: Vec<Vec<ModPath>> = Vec::new();
    let want_top = &sequence.layers[0].0;
    match ctx.setting {
        Setting::Small => {
            let mut counts = vec![0usize; n];
            for &v in &ctx.slots {
                counts[v.0] += 1;
            }
            if &counts == want_top {
                zero_choices.push(
                    (0..ctx.slot_count())
                        .map(|s| ModPath::new(s, Path::trivial(ctx.slots[s])))
                        .collect(),
                );
            }
        }
        Setting::Big => {
            // Choose, per vertex, which slots carry a top generator.
            let mut per_vertex: Vec<Vec<usize>> = vec![Vec::new(); n];
            for (s, &v) in ctx.slots.iter().enumerate() {
                per_vertex[v.0].push(s);
            }
            let mut partial: Vec<Vec<usize>> = vec![vec![]];
            for i in 0..n {
                let choose = want_top[i];
                let pool = &per_vertex[i];
                if choose > pool.len() {
                    partial.clear();
                    break;
                }
                let subsets = subsets_of(pool, choose);
                partial = partial
                    .into_iter()
                    .flat_map(|base| {
                        subsets.iter().map(move |s| {
                            let mut b = base.clone();
                            b.extend_from_slice(s);
                            b
                        })
                    })
                    .collect();
            }
            for slots in partial {
                zero_choices.push(
                    slots
                        .into_iter()
                        .map(|s| ModPath::new(s, Path::trivial(ctx.slots[s])))
                        .collect(),
                );
            }
        }
    }

    let targets: Vec<Vec<usize>> = sequence.layers.iter().map(|l| l.0.clone()).collect();
    let results: Vec<Skeleton> = zero_choices
        .into_par_iter()
        .flat_map(|level0| {
            let mut found = Vec::new();
            extend_levels(ctx, &targets, 1, level0.clone(), level0, &mut found);
            found
        })
        .collect();

    let mut skeleta: Vec<Skeleton> = if dedupe_top_permutations {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for s in results {
            let canon = s.canonical_under_slot_permutations(ctx);
            if seen.insert(canon.clone()) {
                out.push(canon);
            }
        }
        out
    } else {
        results
    };
    skeleta.sort();
    skeleta.dedup();
    skeleta
}

fn subsets_of(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack = vec![(0usize, Vec::new())];
    while let Some((start, acc)) = stack.pop() {
        if acc.len() == k {
            out.push(acc);
            continue;
        }
        for (i, &slot) in pool.iter().enumerate().skip(start) {
            let mut next = acc.clone();
            next.push(slot);
            stack.push((i + 1, next));
        }
    }
    out.sort();
    out
}

fn extend_levels(
    ctx: &ProjectiveContext<'_>,
    targets: &[Vec<usize>],
    level: usize,
    acc: Vec<ModPath>,
    frontier: Vec<ModPath>,
    found: &mut Vec<Skeleton>,
) {
    if level == targets.len() {
        found.push(Skeleton::from_paths(acc));
        return;
    }
    let quiver = &ctx.algebra.quiver;
    let n = quiver.vertex_count();
    let want = &targets[level];
    if want.iter().all(|&w| w == 0) {
        if targets[level..].iter().all(|t| t.iter().all(|&w| w == 0)) {
            found.push(Skeleton::from_paths(acc));
        }
        return;
    }
    // Candidate extensions of the previous level, canonical order.
    let mut candidates: Vec<ModPath> = Vec::new();
    for p in &frontier {
        let end = quiver.target_of(&p.path);
        for a in quiver.arrows() {
            if quiver.arrow_source(a) == end {
                candidates.push(ModPath::new(
                    p.slot,
                    quiver.extend(&p.path, a).expect("source matches"),
                ));
            }
        }
    }
    candidates.sort();
    candidates.dedup();

    // Backtracking subset choice with per-vertex count pruning.
    let ends: Vec<usize> = candidates
        .iter()
        .map(|p| quiver.target_of(&p.path).0)
        .collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut counts = vec![0usize; n];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        idx: usize,
        candidates: &[ModPath],
        ends: &[usize],
        want: &[usize],
        counts: &mut Vec<usize>,
        chosen: &mut Vec<usize>,
        ctx: &ProjectiveContext<'_>,
        targets: &[Vec<usize>],
        level: usize,
        acc: &[ModPath],
        found: &mut Vec<Skeleton>,
    ) {
        if counts == want {
            let picked: Vec<ModPath> = chosen.iter().map(|&i| candidates[i].clone()).collect();
            let mut next_acc = acc.to_vec();
            next_acc.extend(picked.iter().cloned());
            extend_levels(ctx, targets, level + 1, next_acc, picked, found);
            return;
        }
        if idx == candidates.len() {
            return;
        }
        // Remaining candidates per vertex must still be able to meet the target.
        for v in 0..want.len() {
            let deficit = want[v].saturating_sub(counts[v]);
            let remaining = ends[idx..].iter().filter(|&&e| e == v).count();
            if deficit > remaining {
                return;
            }
        }
        // Take candidates[idx] if its vertex still has room.
        let v = ends[idx];
        if counts[v] < want[v] {
            counts[v] += 1;
            chosen.push(idx);
            rec(
                idx + 1,
                candidates,
                ends,
                want,
                counts,
                chosen,
                ctx,
                targets,
                level,
                acc,
                found,
            );
            chosen.pop();
            counts[v] -= 1;
        }
        rec(
            idx + 1,
            candidates,
            ends,
            want,
            counts,
            chosen,
            ctx,
            targets,
            level,
            acc,
            found,
        );
    }
    rec(
        0,
        &candidates,
        &ends,
        want,
        &mut counts,
        &mut chosen,
        ctx,
        targets,
        level,
        &acc,
        found,
    );
}

/// Critical-path data of a skeleton: the coordinate index `N` of the ambient
/// affine space, listed as (critical path, member of its sigma-set) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalData {
    /// Critical paths that are nonzero in the algebra, canonical order.
    pub critical_paths: Vec<ModPath>,
    /// Critical paths that vanish in the algebra. Their chart coordinates are
    /// identically zero, so they carry no variables.
    pub zero_critical_paths: Vec<ModPath>,
    /// For each entry of `critical_paths`, its sigma-set in canonical order.
    pub sigma_sets: Vec<Vec<ModPath>>,
    /// Variable index: (critical path, sigma-set member), in critical-path
    /// order then sigma-set order. Positions are the variable indices of the
    /// polynomial ring.
    pub pairs: Vec<(ModPath, ModPath)>,
    /// Positions in `pairs` coming from positive-length critical paths.
    pub n1: Vec<usize>,
    /// Positions coming from length-zero critical paths (big setting).
    pub n0: Vec<usize>,
    /// Extension-pair count over all critical paths including the vanishing
    /// ones. This count depends only on the compatible layering.
    pub full_pair_count: usize,
}

impl CriticalData {
    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn pair_index(&self, critical: &ModPath, member: &ModPath) -> Option<usize> {
        self.pairs
            .iter()
            .position(|(c, m)| c == critical && m == member)
    }

    pub fn sigma_set_of(&self, critical: &ModPath) -> Option<&[ModPath]> {
        self.critical_paths
            .iter()
            .position(|c| c == critical)
            .map(|i| self.sigma_sets[i].as_slice())
    }
}

/// Compute the critical paths, sigma-sets, and the coordinate index `N`.
pub fn critical_data(skeleton: &Skeleton, ctx: &ProjectiveContext<'_>) -> CriticalData {
    let quiver = &ctx.algebra.quiver;
    let l = ctx.algebra.loewy_bound;

    let mut raw: Vec<ModPath> = Vec::new();
    // One-arrow extensions of skeleton paths that fall outside the skeleton.
    for p in &skeleton.paths {
        if p.len() + 1 > l {
            continue;
        }
        let end = quiver.target_of(&p.path);
        for a in quiver.arrows() {
            if quiver.arrow_source(a) == end {
                let ext = ModPath::new(p.slot, quiver.extend(&p.path, a).expect("source matches"));
                if !skeleton.contains(&ext) {
                    raw.push(ext);
                }
            }
        }
    }
    // Unused slot generators in the big setting.
    if ctx.setting == Setting::Big {
        for slot in 0..ctx.slot_count() {
            let zero = ModPath::new(slot, Path::trivial(ctx.slots[slot]));
            if !skeleton.contains(&zero) {
                raw.push(zero);
            }
        }
    }
    raw.sort();
    raw.dedup();

    let sigma_set = |u: &ModPath| -> Vec<ModPath> {
        let end = quiver.target_of(&u.path);
        skeleton
            .paths
            .iter()
            .filter(|q| q.len() >= u.len() && quiver.target_of(&q.path) == end)
            .cloned()
            .collect()
    };

    let full_pair_count = raw.iter().map(|u| sigma_set(u).len()).sum();

    let mut critical_paths = Vec::new();
    let mut zero_critical_paths = Vec::new();
    for u in raw {
        if ctx.is_zero_path(&u.path) {
            zero_critical_paths.push(u);
        } else {
            critical_paths.push(u);
        }
    }
    let sigma_sets: Vec<Vec<ModPath>> = critical_paths.iter().map(&sigma_set).collect();
    let mut pairs = Vec::new();
    let mut n1 = Vec::new();
    let mut n0 = Vec::new();
    for (u, set) in critical_paths.iter().zip(&sigma_sets) {
        for q in set {
            let idx = pairs.len();
            pairs.push((u.clone(), q.clone()));
            if u.is_empty() {
                n0.push(idx);
            } else {
                n1.push(idx);
            }
        }
    }
    CriticalData {
        critical_paths,
        zero_critical_paths,
        sigma_sets,
        pairs,
        n1,
        n0,
        full_pair_count,
    }
}

/// True iff the extension-pair count is the same for all skeleta compatible
/// with `sequence`.
pub fn n_invariance_check(ctx: &ProjectiveContext<'_>, sequence: &SemisimpleSequence) -> bool {
    let skeleta = enumerate_skeleta(ctx, sequence, false);
    let mut counts = skeleta
        .iter()
        .map(|s| critical_data(s, ctx).full_pair_count);
    match counts.next() {
        None => true,
        Some(first) => counts.all(|c| c == first),
    }
}
