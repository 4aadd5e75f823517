//! Shared fixtures and random generators for the integration suites.
#![allow(dead_code)]

use num::Zero;
use quivergrass_core::algebra::{AlgebraPresentation, ModuleRealization, Relation};
use quivergrass_core::quiver::{ArrowId, ModPath, Path, Quiver, VertexId};
use quivergrass_core::realize::ambient_coordinates;
use quivergrass_core::scalar::{ratio, Rational};
use quivergrass_core::skeleta::ProjectiveContext;
use rand::Rng;

pub fn two_loops() -> AlgebraPresentation {
    let q = Quiver::new(
        vec!["1".into()],
        vec![
            ("alpha".into(), "1".into(), "1".into()),
            ("beta".into(), "1".into(), "1".into()),
        ],
    )
    .unwrap();
    let square = |a: usize| {
        Relation::new(vec![(
            ratio(1, 1),
            q.path(VertexId(0), &[ArrowId(a), ArrowId(a)]).unwrap(),
        )])
    };
    AlgebraPresentation::new(q.clone(), vec![square(0), square(1)], 2)
}

pub fn three_loops() -> AlgebraPresentation {
    let q = Quiver::new(
        vec!["1".into()],
        vec![
            ("alpha".into(), "1".into(), "1".into()),
            ("beta".into(), "1".into(), "1".into()),
            ("gamma".into(), "1".into(), "1".into()),
        ],
    )
    .unwrap();
    let square = |a: usize| {
        Relation::new(vec![(
            ratio(1, 1),
            q.path(VertexId(0), &[ArrowId(a), ArrowId(a)]).unwrap(),
        )])
    };
    AlgebraPresentation::new(q.clone(), vec![square(0), square(1), square(2)], 3)
}

pub fn kronecker3() -> AlgebraPresentation {
    let q = Quiver::new(
        vec!["1".into(), "2".into()],
        vec![
            ("a1".into(), "1".into(), "2".into()),
            ("a2".into(), "1".into(), "2".into()),
            ("a3".into(), "1".into(), "2".into()),
        ],
    )
    .unwrap();
    AlgebraPresentation::new(q, vec![], 1)
}

/// Two vertices with arrows both ways, radical square zero.
pub fn swing() -> AlgebraPresentation {
    let q = Quiver::new(
        vec!["1".into(), "2".into()],
        vec![
            ("alpha".into(), "1".into(), "2".into()),
            ("beta".into(), "2".into(), "1".into()),
        ],
    )
    .unwrap();
    AlgebraPresentation::new(q, vec![], 1)
}

pub fn mod_path(ctx: &ProjectiveContext<'_>, slot: usize, arrows: &[usize]) -> ModPath {
    let arrows: Vec<ArrowId> = arrows.iter().map(|&a| ArrowId(a)).collect();
    ModPath::new(
        slot,
        ctx.algebra
            .quiver
            .path(ctx.slots[slot], &arrows)
            .expect("valid arrows"),
    )
}

/// Stacked ambient vector for a rational combination of slot paths.
pub fn ambient_vector(
    ctx: &ProjectiveContext<'_>,
    terms: &[(Rational, usize, Vec<usize>)],
) -> Vec<Rational> {
    let (model, offsets, layout) = ambient_coordinates(ctx);
    let total: usize = layout.iter().map(Vec::len).sum();
    let mut out = vec![Rational::zero(); total];
    for (coeff, slot, arrows) in terms {
        let arrows: Vec<ArrowId> = arrows.iter().map(|&a| ArrowId(a)).collect();
        let path = ctx
            .algebra
            .quiver
            .path(ctx.slots[*slot], &arrows)
            .expect("valid arrows");
        for (bpos, c) in model.express(&ModPath::new(*slot, path)) {
            let q = model.basis_paths()[bpos].clone();
            let v = ctx.algebra.quiver.target_of(&q.path).0;
            let k = layout[v].iter().position(|x| x == &q).expect("basis path");
            out[offsets[v] + k] += coeff * &c;
        }
    }
    out
}

/// A random connected-ish quiver with at most `max_vertices` vertices and
/// `max_arrows` arrows.
pub fn random_quiver<R: Rng>(rng: &mut R, max_vertices: usize, max_arrows: usize) -> Quiver {
    let n = rng.gen_range(1..=max_vertices);
    let vertices: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let m = rng.gen_range(1..=max_arrows);
    let arrows: Vec<(String, String, String)> = (0..m)
        .map(|i| {
            let s = rng.gen_range(0..n);
            let t = rng.gen_range(0..n);
            (format!("a{}", i + 1), (s + 1).to_string(), (t + 1).to_string())
        })
        .collect();
    Quiver::new(vertices, arrows).unwrap()
}

/// A random path from `source` with length in `[min_len, max_len]`, if the
/// quiver admits one.
pub fn random_path<R: Rng>(
    rng: &mut R,
    quiver: &Quiver,
    source: VertexId,
    min_len: usize,
    max_len: usize,
) -> Option<Path> {
    let len = rng.gen_range(min_len..=max_len);
    let mut path = Path::trivial(source);
    for _ in 0..len {
        let end = quiver.target_of(&path);
        let options: Vec<ArrowId> = quiver
            .arrows()
            .filter(|&a| quiver.arrow_source(a) == end)
            .collect();
        if options.is_empty() {
            return None;
        }
        let a = options[rng.gen_range(0..options.len())];
        path = quiver.extend(&path, a).unwrap();
    }
    Some(path)
}

/// A random validated presentation within the stated size bounds.
pub fn random_algebra<R: Rng>(rng: &mut R, max_vertices: usize, max_arrows: usize) -> AlgebraPresentation {
    loop {
        let quiver = random_quiver(rng, max_vertices, max_arrows);
        let loewy = rng.gen_range(1..=3usize);
        let mut relations = Vec::new();
        if loewy >= 2 {
            let attempts = rng.gen_range(0..=2);
            for _ in 0..attempts {
                let source = VertexId(rng.gen_range(0..quiver.vertex_count()));
                let Some(p1) = random_path(rng, &quiver, source, 2, loewy.min(3)) else {
                    continue;
                };
                let coeffs = [ratio(1, 1), ratio(-1, 1), ratio(2, 1), ratio(1, 2)];
                let mut terms = vec![(coeffs[rng.gen_range(0..coeffs.len())].clone(), p1.clone())];
                if rng.gen_bool(0.5) {
                    if let Some(p2) = random_path(rng, &quiver, source, 2, loewy.min(3)) {
                        if p2 != p1 {
                            terms.push((coeffs[rng.gen_range(0..coeffs.len())].clone(), p2));
                        }
                    }
                }
                relations.push(Relation::new(terms));
            }
        }
        let algebra = AlgebraPresentation::new(quiver, relations, loewy);
        if algebra.validate().is_ok() {
            return algebra;
        }
    }
}

/// Random stacked vectors inside the radical of the ambient projective.
pub fn random_radical_vectors<R: Rng>(
    rng: &mut R,
    ctx: &ProjectiveContext<'_>,
    count: usize,
) -> Vec<Vec<Rational>> {
    random_submodule_vectors(rng, ctx, count, false)
}

/// Random stacked vectors in the ambient projective; with `allow_tops` the
/// sampled vectors may involve slot generators, so the generated submodule
/// can stick out of the radical.
pub fn random_submodule_vectors<R: Rng>(
    rng: &mut R,
    ctx: &ProjectiveContext<'_>,
    count: usize,
    allow_tops: bool,
) -> Vec<Vec<Rational>> {
    let (_, offsets, layout) = ambient_coordinates(ctx);
    let total: usize = layout.iter().map(Vec::len).sum();
    let mut positions = Vec::new();
    for (v, list) in layout.iter().enumerate() {
        for (k, p) in list.iter().enumerate() {
            if allow_tops || !p.is_empty() {
                positions.push(offsets[v] + k);
            }
        }
    }
    (0..count)
        .map(|_| {
            let mut v = vec![Rational::zero(); total];
            if positions.is_empty() {
                return v;
            }
            let picks = rng.gen_range(1..=positions.len().min(3));
            for _ in 0..picks {
                let pos = positions[rng.gen_range(0..positions.len())];
                v[pos] = ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3));
            }
            v
        })
        .collect()
}

/// Solve `sum x_i columns_i = target` when possible.
pub fn solve_in_span(columns: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    use quivergrass_core::linalg::Matrix;
    if columns.is_empty() {
        return if target.iter().all(Zero::is_zero) {
            Some(Vec::new())
        } else {
            None
        };
    }
    let rows = target.len();
    let mut aug = Vec::with_capacity(rows);
    for r in 0..rows {
        let mut row: Vec<Rational> = columns.iter().map(|c| c[r].clone()).collect();
        row.push(target[r].clone());
        aug.push(row);
    }
    let m = Matrix::from_rows(aug);
    let (rr, pivots) = m.rref();
    if pivots.contains(&columns.len()) {
        return None; // inconsistent
    }
    let mut x = vec![Rational::zero(); columns.len()];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = rr[(row, columns.len())].clone();
    }
    Some(x)
}

/// Direct-sum-with-simple helper: a one-dimensional module at `vertex` with
/// all arrows acting by zero.
pub fn simple_module(algebra: &AlgebraPresentation, vertex: VertexId) -> ModuleRealization {
    let quiver = &algebra.quiver;
    let vertex_dims: Vec<usize> = (0..quiver.vertex_count())
        .map(|i| usize::from(i == vertex.0))
        .collect();
    let arrow_maps = quiver
        .arrows()
        .map(|a| {
            quivergrass_core::linalg::Matrix::zero(
                vertex_dims[quiver.arrow_target(a).0],
                vertex_dims[quiver.arrow_source(a).0],
            )
        })
        .collect();
    let mut top = vec![Rational::zero(); 1];
    top[0] = ratio(1, 1);
    ModuleRealization {
        vertex_dims,
        arrow_maps,
        tops: vec![top],
    }
}
