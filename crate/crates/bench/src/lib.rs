//! Shared fixtures for the benchmark targets.

use quivergrass_core::algebra::{AlgebraPresentation, Relation};
use quivergrass_core::quiver::{ArrowId, Quiver, VertexId};
use quivergrass_core::scalar::rat;

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
            rat(1),
            q.path(VertexId(0), &[ArrowId(a), ArrowId(a)]).unwrap(),
        )])
    };
    AlgebraPresentation::new(q.clone(), vec![square(0), square(1), square(2)], 3)
}

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
            rat(1),
            q.path(VertexId(0), &[ArrowId(a), ArrowId(a)]).unwrap(),
        )])
    };
    AlgebraPresentation::new(q.clone(), vec![square(0), square(1)], 2)
}
