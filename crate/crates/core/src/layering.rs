//! Dimension vectors, semisimple sequences, and the dominance order.

use crate::algebra::{AlgebraPresentation, ModuleRealization};
use crate::linalg::rank_of_rows;
use crate::quiver::VertexId;
use crate::realize;
use crate::scalar::Rational;
use num::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayeringError {
    #[error("dimension mismatch: totals {left:?} vs {right:?}")]
    DimensionMismatch {
        left: Vec<usize>,
        right: Vec<usize>,
    },
    #[error("module fails a relation: {0}")]
    InvalidModule(String),
}

/// Per-vertex multiplicities `(d_1, ..., d_n)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DimensionVector(pub Vec<usize>);

impl DimensionVector {
    pub fn zero(n: usize) -> Self {
        DimensionVector(vec![0; n])
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn leq(&self, other: &DimensionVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &DimensionVector) -> DimensionVector {
        DimensionVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

/// A candidate radical layering: exactly `L + 1` dimension vectors, trailing
/// zeros allowed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SemisimpleSequence {
    pub layers: Vec<DimensionVector>,
}

impl SemisimpleSequence {
    pub fn new(layers: Vec<DimensionVector>) -> Self {
        SemisimpleSequence { layers }
    }

    pub fn from_counts(counts: Vec<Vec<usize>>) -> Self {
        SemisimpleSequence {
            layers: counts.into_iter().map(DimensionVector).collect(),
        }
    }

    pub fn top(&self) -> &DimensionVector {
        &self.layers[0]
    }

    pub fn total(&self) -> DimensionVector {
        let n = self.layers[0].0.len();
        self.layers
            .iter()
            .fold(DimensionVector::zero(n), |acc, l| acc.add(l))
    }

    fn prefix_sums(&self) -> Vec<DimensionVector> {
        let n = self.layers[0].0.len();
        let mut acc = DimensionVector::zero(n);
        self.layers
            .iter()
            .map(|l| {
                acc = acc.add(l);
                acc.clone()
            })
            .collect()
    }
}

/// True iff `upper` dominates `lower`: every prefix sum of `lower`'s layers
/// is componentwise at most the corresponding prefix sum of `upper`'s.
pub fn dominates(
    upper: &SemisimpleSequence,
    lower: &SemisimpleSequence,
) -> Result<bool, LayeringError> {
    if upper.total() != lower.total() {
        return Err(LayeringError::DimensionMismatch {
            left: upper.total().0,
            right: lower.total().0,
        });
    }
    let up = upper.prefix_sums();
    let lo = lower.prefix_sums();
    let rounds = up.len().max(lo.len());
    let last_up = up.last().cloned().expect("nonempty");
    let last_lo = lo.last().cloned().expect("nonempty");
    Ok((0..rounds).all(|r| {
        let u = up.get(r).unwrap_or(&last_up);
        let l = lo.get(r).unwrap_or(&last_lo);
        l.leq(u)
    }))
}

/// Why a sequence fails validation, when it does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceCheck {
    pub ok: bool,
    pub reason: Option<String>,
}

/// Checks each layer against the radical layer of the distinguished
/// projective cover of the sequence's top. Returns false-with-reason rather
/// than erroring, since callers enumerate candidates.
pub fn validate_sequence(
    sequence: &SemisimpleSequence,
    algebra: &AlgebraPresentation,
) -> SequenceCheck {
    let n = algebra.quiver.vertex_count();
    if sequence.layers.len() != algebra.loewy_bound + 1 {
        return SequenceCheck {
            ok: false,
            reason: Some(format!(
                "expected {} layers, found {}",
                algebra.loewy_bound + 1,
                sequence.layers.len()
            )),
        };
    }
    if sequence.layers.iter().any(|l| l.0.len() != n) {
        return SequenceCheck {
            ok: false,
            reason: Some("layer width differs from vertex count".into()),
        };
    }
    let slots = cover_slots(sequence.top());
    let cover_layers = match crate::algebra::projective_radical_layers(algebra, &slots) {
        Ok(layers) => layers,
        Err(e) => {
            return SequenceCheck {
                ok: false,
                reason: Some(e.to_string()),
            }
        }
    };
    for (l, layer) in sequence.layers.iter().enumerate() {
        for (i, (&have, &bound)) in layer.0.iter().zip(&cover_layers[l]).enumerate() {
            if have > bound {
                return SequenceCheck {
                    ok: false,
                    reason: Some(format!(
                        "layer {l} exceeds the projective cover at vertex {i}: {have} > {bound}"
                    )),
                };
            }
        }
    }
    SequenceCheck {
        ok: true,
        reason: None,
    }
}

/// Slot list of the distinguished projective cover of a semisimple module:
/// multiplicity many copies of each vertex, grouped in vertex order.
pub fn cover_slots(top: &DimensionVector) -> Vec<VertexId> {
    let mut slots = Vec::new();
    for (i, &mult) in top.0.iter().enumerate() {
        for _ in 0..mult {
            slots.push(VertexId(i));
        }
    }
    slots
}

/// The radical layering of a realized module, padded to `L + 1` layers.
pub fn layering_of(
    m: &ModuleRealization,
    algebra: &AlgebraPresentation,
) -> Result<SemisimpleSequence, LayeringError> {
    if let Some(witness) = realize::relations_check(m, algebra).failure {
        return Err(LayeringError::InvalidModule(witness));
    }
    Ok(layering_of_unchecked(m, algebra))
}

/// Same as [`layering_of`] without the relation check; used internally where
/// the module is a quotient of a projective by construction.
pub fn layering_of_unchecked(
    m: &ModuleRealization,
    algebra: &AlgebraPresentation,
) -> SemisimpleSequence {
    let quiver = &algebra.quiver;
    let n = quiver.vertex_count();
    let offs = m.offsets();
    let total = m.total_dim();
    // Radical powers as span rows in stacked coordinates.
    let mut current: Vec<Vec<Rational>> = (0..total)
        .map(|i| {
            let mut v = vec![Rational::zero(); total];
            v[i] = Rational::from_integer(1.into());
            v
        })
        .collect();
    let mut layers = Vec::new();
    let mut prev_dims: Vec<usize> = m.vertex_dims.clone();
    for _ in 0..=algebra.loewy_bound {
        let next: Vec<Vec<Rational>> = current
            .iter()
            .flat_map(|v| {
                quiver
                    .arrows()
                    .map(|a| m.apply_arrow(quiver, a, v))
                    .collect::<Vec<_>>()
            })
            .filter(|v| v.iter().any(|x| !x.is_zero()))
            .collect();
        let next_dims: Vec<usize> = (0..n)
            .map(|i| {
                let block: Vec<Vec<Rational>> = next
                    .iter()
                    .map(|v| v[offs[i]..offs[i] + m.vertex_dims[i]].to_vec())
                    .filter(|v| v.iter().any(|x| !x.is_zero()))
                    .collect();
                rank_of_rows(&block, m.vertex_dims[i])
            })
            .collect();
        layers.push(DimensionVector(
            prev_dims
                .iter()
                .zip(&next_dims)
                .map(|(a, b)| a - b)
                .collect(),
        ));
        prev_dims = next_dims;
        current = next;
    }
    SemisimpleSequence::new(layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::projective_realization;
    use crate::quiver::Quiver;

    fn seq(layers: &[&[usize]]) -> SemisimpleSequence {
        SemisimpleSequence::from_counts(layers.iter().map(|l| l.to_vec()).collect())
    }

    fn two_loops() -> AlgebraPresentation {
        crate::algebra::tests::two_loops()
    }

    fn kronecker3() -> AlgebraPresentation {
        crate::algebra::tests::kronecker3()
    }

    #[test]
    fn dominance_prefix_sums() {
        let m1 = seq(&[&[2], &[2], &[1]]);
        let m = seq(&[&[1], &[2], &[2]]);
        assert!(dominates(&m1, &m).unwrap());
        assert!(!dominates(&m, &m1).unwrap());
        assert!(dominates(&m, &m).unwrap());
    }

    #[test]
    fn incomparable_pair() {
        let a = seq(&[&[1, 1], &[1, 0]]);
        let b = seq(&[&[2, 0], &[0, 1]]);
        assert!(!dominates(&a, &b).unwrap());
        assert!(!dominates(&b, &a).unwrap());
    }

    #[test]
    fn dominance_requires_equal_totals() {
        let a = seq(&[&[1], &[1]]);
        let b = seq(&[&[1], &[2]]);
        assert!(matches!(
            dominates(&a, &b),
            Err(LayeringError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn validates_kronecker_sequences() {
        let alg = kronecker3();
        assert!(validate_sequence(&seq(&[&[2, 0], &[0, 3]]), &alg).ok);
        let check = validate_sequence(&seq(&[&[2, 0], &[0, 7]]), &alg);
        assert!(!check.ok);
        assert!(check.reason.is_some());
        // Zero top cannot carry later layers.
        assert!(!validate_sequence(&seq(&[&[0, 0], &[0, 1]]), &alg).ok);
    }

    #[test]
    fn layering_of_regular_module() {
        let alg = two_loops();
        let m = projective_realization(&alg, &[VertexId(0)]).unwrap();
        let layering = layering_of(&m, &alg).unwrap();
        assert_eq!(layering, seq(&[&[1], &[2], &[2]]));
    }

    #[test]
    fn layering_of_semisimple_sum() {
        let q = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("a".into(), "1".into(), "2".into())],
        )
        .unwrap();
        let alg = AlgebraPresentation::new(q, vec![], 1);
        let s1 = projective_realization(&alg, &[VertexId(1)]).unwrap();
        // S2 is projective; S1 + S2 realized directly as zero maps.
        let m = ModuleRealization {
            vertex_dims: vec![1, 1],
            arrow_maps: vec![crate::linalg::Matrix::zero(1, 1)],
            tops: vec![],
        };
        let layering = layering_of(&m, &alg).unwrap();
        assert_eq!(layering, seq(&[&[1, 1], &[0, 0]]));
        let _ = s1;
    }

    #[test]
    fn projective_layers_agree_with_graded_basis() {
        let alg = two_loops();
        let slots = vec![VertexId(0); 2];
        let m = projective_realization(&alg, &slots).unwrap();
        let layering = layering_of(&m, &alg).unwrap();
        let graded = crate::algebra::projective_radical_layers(&alg, &slots).unwrap();
        assert_eq!(
            layering,
            SemisimpleSequence::from_counts(graded)
        );
    }

    #[test]
    fn dominance_is_partial_order_on_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        // Random sequences over 2 vertices with equal totals.
        let mut pool = Vec::new();
        for _ in 0..40 {
            let mut layers = vec![];
            let mut remaining = (4usize, 3usize);
            for _ in 0..3 {
                let a = rng.gen_range(0..=remaining.0);
                let b = rng.gen_range(0..=remaining.1);
                layers.push(vec![a, b]);
                remaining = (remaining.0 - a, remaining.1 - b);
            }
            layers.push(vec![remaining.0, remaining.1]);
            pool.push(SemisimpleSequence::from_counts(layers));
        }
        for x in &pool {
            assert!(dominates(x, x).unwrap());
            for y in &pool {
                if dominates(x, y).unwrap() && dominates(y, x).unwrap() {
                    assert_eq!(x, y);
                }
                for z in &pool {
                    if dominates(x, y).unwrap() && dominates(y, z).unwrap() {
                        assert!(dominates(x, z).unwrap());
                    }
                }
            }
        }
    }
}
