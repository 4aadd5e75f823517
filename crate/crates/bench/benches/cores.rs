use criterion::{black_box, criterion_group, criterion_main, Criterion};
use quivergrass_bench::{kronecker3, three_loops, two_loops};
use quivergrass_core::cancel::CancelToken;
use quivergrass_core::degeneration::{
    apply_curve, limit_at_infinity, Poly1, RationalFunction, UnipotentCurve,
};
use quivergrass_core::layering::{DimensionVector, SemisimpleSequence};
use quivergrass_core::quiver::{ArrowId, ModPath, VertexId};
use quivergrass_core::realize::{ambient_coordinates, SubmodulePresentation};
use quivergrass_core::scalar::{rat, Rational};
use quivergrass_core::skeleta::{critical_data, enumerate_skeleta, ProjectiveContext, Setting, Skeleton};
use num::Zero;

fn bench_enumeration(c: &mut Criterion) {
    let alg = kronecker3();
    let sequence = SemisimpleSequence::from_counts(vec![vec![2, 0], vec![0, 3]]);
    c.bench_function("enumerate_skeleta_kronecker_big", |b| {
        let ctx = ProjectiveContext::big_cover(&alg, &DimensionVector(vec![2, 3]));
        b.iter(|| black_box(enumerate_skeleta(&ctx, &sequence, false)).len())
    });
}

fn first_skeleton(ctx: &ProjectiveContext<'_>) -> Skeleton {
    let mp = |slot: usize, arrows: &[usize]| {
        let arrows: Vec<ArrowId> = arrows.iter().map(|&a| ArrowId(a)).collect();
        ModPath::new(
            slot,
            ctx.algebra.quiver.path(ctx.slots[slot], &arrows).unwrap(),
        )
    };
    Skeleton::from_paths(vec![
        mp(0, &[]),
        mp(0, &[0]),
        mp(0, &[1]),
        mp(0, &[0, 1]),
        mp(0, &[1, 2]),
        mp(0, &[0, 1, 2]),
        mp(0, &[1, 2, 0]),
        mp(1, &[]),
        mp(1, &[0]),
        mp(2, &[]),
    ])
}

fn bench_chart_ideal(c: &mut Criterion) {
    let alg = three_loops();
    c.bench_function("sigma_ideal_three_loops", |b| {
        let ctx = ProjectiveContext::new(&alg, vec![VertexId(0); 3], Setting::Small);
        let sk = first_skeleton(&ctx);
        let data = critical_data(&sk, &ctx);
        b.iter(|| {
            black_box(quivergrass_core::equations::sigma_ideal(&sk, &ctx, &data))
                .generators
                .len()
        })
    });
}

fn bench_limit(c: &mut Criterion) {
    let alg = two_loops();
    c.bench_function("limit_two_loops_step1", |b| {
        let ctx = ProjectiveContext::new(&alg, vec![VertexId(0); 3], Setting::Big);
        let (model, offsets, layout) = ambient_coordinates(&ctx);
        let total: usize = layout.iter().map(Vec::len).sum();
        let basis_vec = |slot: usize, arrows: &[usize]| -> Vec<Rational> {
            let arrows: Vec<ArrowId> = arrows.iter().map(|&a| ArrowId(a)).collect();
            let path = alg.quiver.path(ctx.slots[slot], &arrows).unwrap();
            let mut v = vec![Rational::zero(); total];
            for (bpos, coeff) in model.express(&ModPath::new(slot, path)) {
                let q = model.basis_paths()[bpos].clone();
                let vtx = alg.quiver.target_of(&q.path).0;
                let k = layout[vtx].iter().position(|x| x == &q).unwrap();
                v[offsets[vtx] + k] = coeff;
            }
            v
        };
        let sub = SubmodulePresentation::new(vec![basis_vec(0, &[]), basis_vec(2, &[])], total);
        let tau = RationalFunction::from_poly(Poly1::variable());
        let mut curve = UnipotentCurve::identity();
        curve.add_term(0, tau.clone(), alg.quiver.path(VertexId(0), &[ArrowId(1)]).unwrap(), 0);
        curve.add_term(0, tau.neg(), alg.quiver.path(VertexId(0), &[ArrowId(0)]).unwrap(), 1);
        let cancel = CancelToken::never();
        b.iter(|| {
            let family = apply_curve(&curve, &sub, &ctx).unwrap();
            black_box(limit_at_infinity(&family, &cancel).unwrap())
                .generators
                .len()
        })
    });
    let _ = rat(0);
}

criterion_group!(benches, bench_enumeration, bench_chart_ideal, bench_limit);
criterion_main!(benches);
