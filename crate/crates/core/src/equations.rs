//! Sparse multivariate polynomials over the rationals, the rewriting engine
//! that expresses free-module elements over a skeleton basis, and the chart
//! ideal built from relation incarnations.
//!
//! Variables are indexed by the coordinate pairs of a skeleton's
//! [`CriticalData`]; the monomial order is graded lexicographic over that
//! index.

use crate::quiver::ModPath;
use crate::scalar::Rational;
use crate::skeleta::{CriticalData, ProjectiveContext, Skeleton};
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EquationError {
    #[error("point does not cover variable {0}")]
    MissingCoordinate(usize),
}

/// Exponent map, sparse and sorted by variable index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: Vec<(usize, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn variable(index: usize) -> Self {
        Monomial {
            exps: vec![(index, 1)],
        }
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|(_, e)| *e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[(usize, u32)] {
        &self.exps
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = BTreeMap::new();
        for &(v, e) in self.exps.iter().chain(&other.exps) {
            *exps.entry(v).or_insert(0) += e;
        }
        Monomial {
            exps: exps.into_iter().collect(),
        }
    }

    pub fn mentions(&self, var: usize) -> bool {
        self.exps.iter().any(|&(v, _)| v == var)
    }
}

/// Graded lexicographic: total degree first, then exponent vectors compared
/// variable by variable (earlier variables weigh more).
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let mut i = 0;
            let mut j = 0;
            loop {
                match (self.exps.get(i), other.exps.get(j)) {
                    (None, None) => return std::cmp::Ordering::Equal,
                    (None, Some(_)) => return std::cmp::Ordering::Less,
                    (Some(_), None) => return std::cmp::Ordering::Greater,
                    (Some(&(va, ea)), Some(&(vb, eb))) => {
                        if va != vb {
                            // Smaller variable index with positive exponent is
                            // lexicographically larger.
                            return if va < vb {
                                std::cmp::Ordering::Greater
                            } else {
                                std::cmp::Ordering::Less
                            };
                        }
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial: monomial -> nonzero rational coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(value: Rational) -> Self {
        let mut p = Polynomial::default();
        if !value.is_zero() {
            p.terms.insert(Monomial::one(), value);
        }
        p
    }

    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    pub fn variable(index: usize) -> Self {
        let mut p = Polynomial::default();
        p.terms.insert(Monomial::variable(index), Rational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, monomial: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(monomial.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&monomial);
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, factor: &Rational) -> Polynomial {
        if factor.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * factor))
                .collect(),
        }
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, EquationError> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for &(v, e) in m.exponents() {
                let value = point.get(v).ok_or(EquationError::MissingCoordinate(v))?;
                for _ in 0..e {
                    term *= value;
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    pub fn mentions(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.mentions(var))
    }
}

/// Finitely supported map from slot paths to polynomial coefficients; the
/// ambient free module of the rewriting engine.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreeElement {
    pub terms: BTreeMap<ModPath, Polynomial>,
}

impl FreeElement {
    pub fn from_path(path: ModPath) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(path, Polynomial::one());
        FreeElement { terms }
    }

    pub fn add_term(&mut self, path: ModPath, poly: Polynomial) {
        if poly.is_zero() {
            return;
        }
        let entry = self.terms.entry(path.clone()).or_insert_with(Polynomial::zero);
        *entry = entry.add(&poly);
        if entry.is_zero() {
            self.terms.remove(&path);
        }
    }

    pub fn add(&self, other: &FreeElement) -> FreeElement {
        let mut out = self.clone();
        for (p, poly) in &other.terms {
            out.add_term(p.clone(), poly.clone());
        }
        out
    }

    pub fn scale_poly(&self, factor: &Polynomial) -> FreeElement {
        let mut out = FreeElement::default();
        for (p, poly) in &self.terms {
            out.add_term(p.clone(), poly.mul(factor));
        }
        out
    }
}

/// Term-selection order for the rewriting loop. All strategies produce the
/// same normal form; the default is used everywhere determinism matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionStrategy {
    CanonicalAscending,
    CanonicalDescending,
    Seeded(u64),
}

/// Unique coefficients expressing `y` over the skeleton basis modulo the
/// substitution relations attached to the critical paths. Supported paths
/// longer than the Loewy bound reduce to zero; critical paths that vanish in
/// the algebra substitute zero.
pub fn normal_form(
    y: &FreeElement,
    skeleton: &Skeleton,
    critical: &CriticalData,
    ctx: &ProjectiveContext<'_>,
) -> BTreeMap<ModPath, Polynomial> {
    normal_form_with_strategy(y, skeleton, critical, ctx, ReductionStrategy::CanonicalAscending)
}

pub fn normal_form_with_strategy(
    y: &FreeElement,
    skeleton: &Skeleton,
    critical: &CriticalData,
    ctx: &ProjectiveContext<'_>,
    strategy: ReductionStrategy,
) -> BTreeMap<ModPath, Polynomial> {
    let quiver = &ctx.algebra.quiver;
    let bound = ctx.algebra.loewy_bound;
    let transient_cap = 2 * bound + 1;
    let mut rng = match strategy {
        ReductionStrategy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };

    let mut result: BTreeMap<ModPath, Polynomial> = BTreeMap::new();
    let mut work: BTreeMap<ModPath, Polynomial> = BTreeMap::new();
    for (p, poly) in &y.terms {
        if p.len() > bound {
            continue;
        }
        merge(&mut work, p.clone(), poly.clone());
    }

    while !work.is_empty() {
        let key = match strategy {
            ReductionStrategy::CanonicalAscending => work.keys().next().unwrap().clone(),
            ReductionStrategy::CanonicalDescending => work.keys().next_back().unwrap().clone(),
            ReductionStrategy::Seeded(_) => {
                let idx = rng.as_mut().unwrap().gen_range(0..work.len());
                work.keys().nth(idx).unwrap().clone()
            }
        };
        let poly = work.remove(&key).unwrap();
        if skeleton.contains(&key) {
            let sum = match result.remove(&key) {
                Some(existing) => existing.add(&poly),
                None => poly,
            };
            if !sum.is_zero() {
                result.insert(key, sum);
            }
            continue;
        }
        assert!(key.len() <= transient_cap, "transient path length exceeded the termination bound");
        // Longest initial subpath inside the skeleton, then the critical
        // one-arrow extension along the remaining arrows.
        let arrows = &key.path.arrows;
        let mut prefix_len = None;
        for k in (0..arrows.len()).rev() {
            let sub = ModPath::new(
                key.slot,
                quiver.path(key.path.source, &arrows[..k]).expect("prefix"),
            );
            if skeleton.contains(&sub) {
                prefix_len = Some(k);
                break;
            }
        }
        let Some(k) = prefix_len else {
            // No initial subpath in the skeleton at all (the slot generator is
            // absent): the path reduces into the unused-slot substitution in
            // the big setting, or vanishes.
            let zero = ModPath::new(key.slot, crate::quiver::Path::trivial(key.path.source));
            if let Some(set) = critical.sigma_set_of(&zero) {
                substitute(
                    &mut work,
                    quiver,
                    bound,
                    &key,
                    0,
                    &zero,
                    set,
                    critical,
                    &poly,
                );
            }
            continue;
        };
        let crit = ModPath::new(
            key.slot,
            quiver
                .path(key.path.source, &arrows[..k + 1])
                .expect("prefix"),
        );
        if crit.len() > bound || ctx.is_zero_path(&crit.path) {
            continue; // empty sigma-set or vanishing critical path: term dies
        }
        let set = critical
            .sigma_set_of(&crit)
            .expect("critical path of the skeleton");
        substitute(
            &mut work,
            quiver,
            bound,
            &key,
            k + 1,
            &crit,
            set,
            critical,
            &poly,
        );
    }
    result
}

#[allow(clippy::too_many_arguments)]
fn substitute(
    work: &mut BTreeMap<ModPath, Polynomial>,
    quiver: &crate::quiver::Quiver,
    bound: usize,
    key: &ModPath,
    consumed: usize,
    crit: &ModPath,
    set: &[ModPath],
    critical: &CriticalData,
    poly: &Polynomial,
) {
    let tail = &key.path.arrows[consumed..];
    for q in set {
        let var = critical
            .pair_index(crit, q)
            .expect("sigma-set member is indexed");
        let mut arrows = q.path.arrows.clone();
        arrows.extend_from_slice(tail);
        let new_path = ModPath::new(
            q.slot,
            quiver.path(q.path.source, &arrows).expect("aligned endpoints"),
        );
        if new_path.len() > bound {
            continue;
        }
        merge(
            work,
            new_path,
            poly.mul(&Polynomial::variable(var)),
        );
    }
}

fn merge(work: &mut BTreeMap<ModPath, Polynomial>, path: ModPath, poly: Polynomial) {
    if poly.is_zero() {
        return;
    }
    let entry = work.entry(path.clone()).or_insert_with(Polynomial::zero);
    *entry = entry.add(&poly);
    if entry.is_zero() {
        work.remove(&path);
    }
}

/// The chart ideal of a skeleton: generators are the nonzero normal-form
/// coefficients of every relation incarnation over the skeleton's top slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrassIdeal {
    pub skeleton: Skeleton,
    /// Variable index, aligned with polynomial variable positions.
    pub variables: Vec<(ModPath, ModPath)>,
    pub generators: Vec<Polynomial>,
    /// For each generator: (effective-relation index, slot, skeleton path).
    pub provenance: Vec<(usize, usize, ModPath)>,
    /// Free coordinates (length-zero critical pairs); empty in the small
    /// setting.
    pub free_variables: Vec<(ModPath, ModPath)>,
}

impl GrassIdeal {
    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.generators.is_empty()
    }
}

/// Build the chart ideal of `skeleton` in its context.
pub fn sigma_ideal(
    skeleton: &Skeleton,
    ctx: &ProjectiveContext<'_>,
    critical: &CriticalData,
) -> GrassIdeal {
    let eff = ctx.algebra.effective_relations();
    let tops = skeleton.top_slots();
    // Incarnations in deterministic (relation, slot) order.
    let jobs: Vec<(usize, usize)> = eff
        .iter()
        .enumerate()
        .flat_map(|(rel_idx, rel)| {
            let norm = rel.source();
            tops.iter()
                .filter(move |&&slot| Some(ctx.slots[slot]) == norm)
                .map(move |&slot| (rel_idx, slot))
        })
        .collect();
    let reduced: Vec<(usize, usize, BTreeMap<ModPath, Polynomial>)> = jobs
        .into_par_iter()
        .map(|(rel_idx, slot)| {
            let mut y = FreeElement::default();
            for (c, p) in &eff[rel_idx].terms {
                y.add_term(ModPath::new(slot, p.clone()), Polynomial::constant(c.clone()));
            }
            let nf = normal_form(&y, skeleton, critical, ctx);
            (rel_idx, slot, nf)
        })
        .collect();
    let mut generators = Vec::new();
    let mut provenance = Vec::new();
    for (rel_idx, slot, nf) in reduced {
        for (path, poly) in nf {
            if !poly.is_zero() {
                generators.push(poly);
                provenance.push((rel_idx, slot, path));
            }
        }
    }
    let free_variables = critical
        .n0
        .iter()
        .map(|&i| critical.pairs[i].clone())
        .collect();
    GrassIdeal {
        skeleton: skeleton.clone(),
        variables: critical.pairs.clone(),
        generators,
        provenance,
        free_variables,
    }
}

/// Big-setting presentation: the ideal lives in the variables of the big
/// coordinate index, generators never mention a free (length-zero) pair.
pub fn big_presentation(
    skeleton: &Skeleton,
    ctx: &ProjectiveContext<'_>,
    critical: &CriticalData,
) -> GrassIdeal {
    let ideal = sigma_ideal(skeleton, ctx, critical);
    for g in &ideal.generators {
        for &i in &critical.n0 {
            debug_assert!(!g.mentions(i), "free variable inside a generator");
        }
    }
    ideal
}

/// True iff every generator vanishes at the point.
pub fn evaluate_membership(
    ideal: &GrassIdeal,
    point: &[Rational],
) -> Result<bool, EquationError> {
    if point.len() < ideal.variable_count() {
        return Err(EquationError::MissingCoordinate(point.len()));
    }
    for g in &ideal.generators {
        if !g.evaluate(point)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}
