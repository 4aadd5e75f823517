//! Unipotent one-parameter curves, their subspace families, and limits as
//! the parameter goes to infinity.
//!
//! Limits are computed by substituting `s = 1/tau`, clearing denominators,
//! and saturating at `s = 0`: whenever the evaluated rows become dependent, a
//! vanishing combination is divided by `s` and re-inserted. The valuation of
//! the row-matrix minors drops at every step, so the loop terminates.

use crate::algebra::{AlgebraPresentation, ModuleRealization};
use crate::cancel::CancelToken;
use crate::layering::{layering_of_unchecked, SemisimpleSequence};
use crate::linalg::{rank_of_rows, row_space, Matrix};
use crate::quiver::Path;
use crate::realize::{iso_probe, quotient_by_submodule, IsoVerdict, SubmodulePresentation};
use crate::scalar::Rational;
use crate::skeleta::ProjectiveContext;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DegenerationError {
    #[error("curve term path must have positive length")]
    ZeroLengthTerm,
    #[error("curve term for slot {slot} does not end at the slot's vertex")]
    EndpointMismatch { slot: usize },
    #[error("curve term for slot {slot} does not start at its target slot's vertex")]
    SourceMismatch { slot: usize },
    #[error("generic rank could not be certified")]
    RankDrop,
    #[error("modules have different total dimension vectors")]
    DimensionMismatch,
    #[error("computation cancelled")]
    Cancelled,
}

/// Univariate polynomial over the rationals, coefficients by ascending degree
/// with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly1 {
    coeffs: Vec<Rational>,
}

impl Poly1 {
    pub fn zero() -> Self {
        Poly1 { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Poly1::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        Poly1::constant(Rational::one())
    }

    pub fn variable() -> Self {
        Poly1::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = Poly1 { coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    /// Order of vanishing at zero; `None` for the zero polynomial.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Poly1) -> Poly1 {
        let mut coeffs = vec![Rational::zero(); self.coeffs.len().max(other.coeffs.len())];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        Poly1::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Poly1 {
        Poly1 {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Poly1) -> Poly1 {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly1) -> Poly1 {
        if self.is_zero() || other.is_zero() {
            return Poly1::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly1::from_coeffs(coeffs)
    }

    pub fn scale(&self, factor: &Rational) -> Poly1 {
        Poly1::from_coeffs(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn mul_power(&self, k: usize) -> Poly1 {
        if self.is_zero() {
            return Poly1::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly1::from_coeffs(coeffs)
    }

    /// Exact division by `s^k`; requires valuation at least `k`.
    pub fn div_power(&self, k: usize) -> Poly1 {
        if self.is_zero() {
            return Poly1::zero();
        }
        assert!(self.valuation().unwrap_or(0) >= k, "inexact power division");
        Poly1::from_coeffs(self.coeffs[k..].to_vec())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Coefficients reversed against a target degree: `s^d * p(1/s)`.
    pub fn reversed(&self, degree: usize) -> Poly1 {
        assert!(self.degree() <= degree || self.is_zero());
        let mut coeffs = vec![Rational::zero(); degree + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[degree - i] = c.clone();
        }
        Poly1::from_coeffs(coeffs)
    }

    /// Substitute `x -> x + shift`.
    pub fn shift_arg(&self, shift: &Rational) -> Poly1 {
        let mut acc = Poly1::zero();
        let base = Poly1::from_coeffs(vec![shift.clone(), Rational::one()]);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&base).add(&Poly1::constant(c.clone()));
        }
        acc
    }

    /// Substitute `x -> factor * x`.
    pub fn scale_arg(&self, factor: &Rational) -> Poly1 {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        let mut power = Rational::one();
        for c in &self.coeffs {
            coeffs.push(c * &power);
            power *= factor;
        }
        Poly1::from_coeffs(coeffs)
    }

    pub fn gcd(&self, other: &Poly1) -> Poly1 {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let lead = a.leading();
            a.scale(&lead.recip())
        }
    }

    fn rem(&self, divisor: &Poly1) -> Poly1 {
        assert!(!divisor.is_zero());
        let mut r = self.clone();
        while !r.is_zero() && r.degree() >= divisor.degree() {
            let shift = r.degree() - divisor.degree();
            let factor = r.leading() / divisor.leading();
            let sub = divisor.mul_power(shift).scale(&factor);
            r = r.sub(&sub);
        }
        r
    }

    fn div_exact(&self, divisor: &Poly1) -> Poly1 {
        assert!(!divisor.is_zero());
        let mut r = self.clone();
        let mut q = vec![Rational::zero(); self.coeffs.len()];
        while !r.is_zero() && r.degree() >= divisor.degree() {
            let shift = r.degree() - divisor.degree();
            let factor = r.leading() / divisor.leading();
            q[shift] = factor.clone();
            let sub = divisor.mul_power(shift).scale(&factor);
            r = r.sub(&sub);
        }
        assert!(r.is_zero(), "inexact polynomial division");
        Poly1::from_coeffs(q)
    }
}

/// Quotient of univariate polynomials: denominator monic and coprime to the
/// numerator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    pub num: Poly1,
    pub den: Poly1,
}

impl RationalFunction {
    pub fn new(num: Poly1, den: Poly1) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let mut f = RationalFunction { num, den };
        f.reduce();
        Some(f)
    }

    pub fn zero() -> Self {
        RationalFunction {
            num: Poly1::zero(),
            den: Poly1::one(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        RationalFunction {
            num: Poly1::constant(c),
            den: Poly1::one(),
        }
    }

    pub fn from_poly(p: Poly1) -> Self {
        RationalFunction {
            num: p,
            den: Poly1::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Poly1::one();
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.degree() > 0 || !g.is_zero() {
            self.num = self.num.div_exact(&g);
            self.den = self.den.div_exact(&g);
        }
        let lead = self.den.leading();
        self.den = self.den.scale(&lead.recip());
        self.num = self.num.scale(&lead.recip());
    }

    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RationalFunction::new(num, den).expect("nonzero denominator")
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        RationalFunction::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominator")
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> RationalFunction {
        RationalFunction::new(self.num.scale(c), self.den.clone()).expect("nonzero denominator")
    }

    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }
}

/// One term of a unipotent curve: `coefficient(tau) * path` applied to the
/// target slot, added to the image of the acting slot's generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveTerm {
    pub coefficient: RationalFunction,
    pub path: Path,
    pub target_slot: usize,
}

/// A one-parameter family of unipotent automorphisms of the ambient
/// projective: slot generators map to themselves plus radical terms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UnipotentCurve {
    /// Terms per acting slot.
    pub terms: BTreeMap<usize, Vec<CurveTerm>>,
}

impl UnipotentCurve {
    pub fn identity() -> Self {
        UnipotentCurve::default()
    }

    pub fn add_term(
        &mut self,
        slot: usize,
        coefficient: RationalFunction,
        path: Path,
        target_slot: usize,
    ) {
        self.terms.entry(slot).or_default().push(CurveTerm {
            coefficient,
            path,
            target_slot,
        });
    }

    pub fn validate(&self, ctx: &ProjectiveContext<'_>) -> Result<(), DegenerationError> {
        let quiver = &ctx.algebra.quiver;
        for (&slot, terms) in &self.terms {
            for t in terms {
                if t.path.is_empty() {
                    return Err(DegenerationError::ZeroLengthTerm);
                }
                if quiver.target_of(&t.path) != ctx.slots[slot] {
                    return Err(DegenerationError::EndpointMismatch { slot });
                }
                if t.path.source != ctx.slots[t.target_slot] {
                    return Err(DegenerationError::SourceMismatch { slot });
                }
            }
        }
        Ok(())
    }

    /// Reparametrize `tau -> tau + shift`.
    pub fn shift_parameter(&self, shift: &Rational) -> UnipotentCurve {
        self.map_coefficients(|f| {
            RationalFunction::new(f.num.shift_arg(shift), f.den.shift_arg(shift))
                .expect("nonzero denominator")
        })
    }

    /// Reparametrize `tau -> factor * tau` (factor nonzero).
    pub fn scale_parameter(&self, factor: &Rational) -> UnipotentCurve {
        self.map_coefficients(|f| {
            RationalFunction::new(f.num.scale_arg(factor), f.den.scale_arg(factor))
                .expect("nonzero denominator")
        })
    }

    fn map_coefficients<F: Fn(&RationalFunction) -> RationalFunction>(
        &self,
        f: F,
    ) -> UnipotentCurve {
        UnipotentCurve {
            terms: self
                .terms
                .iter()
                .map(|(&slot, terms)| {
                    (
                        slot,
                        terms
                            .iter()
                            .map(|t| CurveTerm {
                                coefficient: f(&t.coefficient),
                                path: t.path.clone(),
                                target_slot: t.target_slot,
                            })
                            .collect(),
                    )
                })
                .collect(),
        }
    }
}

/// Rows with polynomial entries spanning the moving subspace `g_tau(C)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceFamily {
    pub rows: Vec<Vec<Poly1>>,
    pub ambient_dim: usize,
}

impl SubspaceFamily {
    /// Rank at a fixed parameter value avoiding denominator zeros.
    pub fn rank_at(&self, tau: &Rational) -> usize {
        let rows: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|p| p.eval(tau)).collect())
            .collect();
        rank_of_rows(&rows, self.ambient_dim)
    }

    /// Rank over the rational-function field.
    pub fn generic_rank(&self) -> usize {
        generic_rank(&self.rows, self.ambient_dim)
    }

    pub fn evaluate(&self, tau: &Rational) -> Vec<Vec<Rational>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|p| p.eval(tau)).collect())
            .collect()
    }
}

fn generic_rank(rows: &[Vec<Poly1>], cols: usize) -> usize {
    reduce_over_function_field(rows, cols).len()
}

/// Gaussian elimination over the function field; returns independent rows
/// with denominators cleared and content removed.
fn reduce_over_function_field(rows: &[Vec<Poly1>], cols: usize) -> Vec<Vec<Poly1>> {
    let mut echelon: Vec<Vec<RationalFunction>> = Vec::new();
    for row in rows {
        let mut cur: Vec<RationalFunction> = row
            .iter()
            .map(|p| RationalFunction::from_poly(p.clone()))
            .collect();
        for pivot in &echelon {
            let lead_col = pivot.iter().position(|x| !x.is_zero()).expect("nonzero row");
            if cur[lead_col].is_zero() {
                continue;
            }
            let factor = cur[lead_col].mul(&invert(&pivot[lead_col]));
            for c in 0..cols {
                let delta = factor.mul(&pivot[c]);
                cur[c] = cur[c].add(&delta.neg());
            }
        }
        if cur.iter().any(|x| !x.is_zero()) {
            echelon.push(cur);
            echelon.sort_by_key(|r| r.iter().position(|x| !x.is_zero()).unwrap_or(cols));
        }
    }
    echelon
        .into_iter()
        .map(|row| {
            // Clear denominators.
            let mut lcm = Poly1::one();
            for x in &row {
                if !x.is_zero() {
                    let g = lcm.gcd(&x.den);
                    lcm = lcm.mul(&x.den.div_exact(&g));
                }
            }
            let cleared: Vec<Poly1> = row
                .iter()
                .map(|x| {
                    if x.is_zero() {
                        Poly1::zero()
                    } else {
                        x.num.mul(&lcm.div_exact(&x.den))
                    }
                })
                .collect();
            cleared
        })
        .collect()
}

fn invert(f: &RationalFunction) -> RationalFunction {
    RationalFunction::new(f.den.clone(), f.num.clone()).expect("nonzero")
}

/// Apply the curve to a generating set of the submodule, close under the
/// arrow action, and clear denominators row by row.
pub fn apply_curve(
    curve: &UnipotentCurve,
    submodule: &SubmodulePresentation,
    ctx: &ProjectiveContext<'_>,
) -> Result<SubspaceFamily, DegenerationError> {
    curve.validate(ctx)?;
    let algebra = ctx.algebra;
    let quiver = &algebra.quiver;
    let model = crate::algebra::TruncatedModule::build(algebra, &ctx.slots);
    let ambient = crate::algebra::realization_from_model(algebra, &model);
    let layout = model.vertex_layout(quiver);
    let mut offsets = Vec::new();
    {
        let mut acc = 0;
        for list in &layout {
            offsets.push(acc);
            acc += list.len();
        }
    }
    let total: usize = layout.iter().map(Vec::len).sum();
    let basis_vector = |p: &crate::quiver::ModPath| -> Vec<Rational> {
        let mut v = vec![Rational::zero(); total];
        for (bpos, c) in model.express(p) {
            let q = model.basis_paths()[bpos].clone();
            let vtx = quiver.target_of(&q.path).0;
            let k = layout[vtx].iter().position(|x| x == &q).expect("basis path");
            v[offsets[vtx] + k] = c;
        }
        v
    };
    // The images g(z_r) as rational-function vectors.
    let slot_images: Vec<Vec<RationalFunction>> = (0..ctx.slot_count())
        .map(|slot| {
            let mut img: Vec<RationalFunction> = basis_vector(&crate::quiver::ModPath::new(
                slot,
                Path::trivial(ctx.slots[slot]),
            ))
            .into_iter()
            .map(RationalFunction::constant)
            .collect();
            if let Some(terms) = curve.terms.get(&slot) {
                for t in terms {
                    let vec = basis_vector(&crate::quiver::ModPath::new(
                        t.target_slot,
                        t.path.clone(),
                    ));
                    for (acc, base) in img.iter_mut().zip(vec) {
                        if !base.is_zero() {
                            let add = t.coefficient.scale(&base);
                            *acc = acc.add(&add);
                        }
                    }
                }
            }
            img
        })
        .collect();
    // g is the module endomorphism sending z_r to slot_images[r]; evaluate it
    // on a stacked coordinate vector by rewriting each basis path p z_r as
    // p * g(z_r).
    let path_action: Vec<Matrix> = {
        // Matrices of each arrow on the ambient realization.
        ambient.arrow_maps.clone()
    };
    let act_path = |path: &Path, v: &[RationalFunction]| -> Vec<RationalFunction> {
        let mut cur = v.to_vec();
        for &a in &path.arrows {
            let s = quiver.arrow_source(a).0;
            let t = quiver.arrow_target(a).0;
            let mut next = vec![RationalFunction::zero(); total];
            let m = &path_action[a.0];
            for (col, x) in cur[offsets[s]..offsets[s] + layout[s].len()].iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for row in 0..layout[t].len() {
                    let c = &m[(row, col)];
                    if !c.is_zero() {
                        let add = x.scale(c);
                        next[offsets[t] + row] = next[offsets[t] + row].add(&add);
                    }
                }
            }
            // Components outside the moved block are zero already.
            cur = next;
        }
        cur
    };
    let apply_g = |v: &[Rational]| -> Vec<RationalFunction> {
        let mut out = vec![RationalFunction::zero(); total];
        for (vtx, list) in layout.iter().enumerate() {
            for (k, p) in list.iter().enumerate() {
                let coeff = &v[offsets[vtx] + k];
                if coeff.is_zero() {
                    continue;
                }
                let moved = act_path(&p.path, &slot_images[p.slot]);
                for (acc, x) in out.iter_mut().zip(moved) {
                    if !x.is_zero() {
                        let add = x.scale(coeff);
                        *acc = acc.add(&add);
                    }
                }
            }
        }
        out
    };
    // Images of the generators, then arrow closure up to the Loewy bound.
    let mut rows_rf: Vec<Vec<RationalFunction>> = Vec::new();
    let mut frontier: Vec<Vec<RationalFunction>> = submodule
        .generators
        .iter()
        .map(|g| apply_g(g))
        .collect();
    for _ in 0..=algebra.loewy_bound {
        let mut next = Vec::new();
        for v in &frontier {
            if v.iter().all(RationalFunction::is_zero) {
                continue;
            }
            rows_rf.push(v.clone());
            for a in quiver.arrows() {
                let s = quiver.arrow_source(a).0;
                let t = quiver.arrow_target(a).0;
                let m = &path_action[a.0];
                let mut image = vec![RationalFunction::zero(); total];
                for (col, x) in v[offsets[s]..offsets[s] + layout[s].len()].iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for row in 0..layout[t].len() {
                        let c = &m[(row, col)];
                        if !c.is_zero() {
                            let add = x.scale(c);
                            image[offsets[t] + row] = image[offsets[t] + row].add(&add);
                        }
                    }
                }
                next.push(image);
            }
        }
        frontier = next;
    }
    // Clear denominators row-wise.
    let rows: Vec<Vec<Poly1>> = rows_rf
        .into_iter()
        .map(|row| {
            let mut lcm = Poly1::one();
            for x in &row {
                if !x.is_zero() {
                    let g = lcm.gcd(&x.den);
                    lcm = lcm.mul(&x.den.div_exact(&g));
                }
            }
            row.into_iter()
                .map(|x| {
                    if x.is_zero() {
                        Poly1::zero()
                    } else {
                        x.num.mul(&lcm.div_exact(&x.den))
                    }
                })
                .collect()
        })
        .filter(|row: &Vec<Poly1>| row.iter().any(|p| !p.is_zero()))
        .collect();
    Ok(SubspaceFamily {
        rows,
        ambient_dim: total,
    })
}

/// Limit of the family as the parameter goes to infinity.
pub fn limit_at_infinity(
    family: &SubspaceFamily,
    cancel: &CancelToken,
) -> Result<SubmodulePresentation, DegenerationError> {
    let cols = family.ambient_dim;
    // Substitute s = 1/tau and clear: reverse each row against its max degree.
    let s_rows: Vec<Vec<Poly1>> = family
        .rows
        .iter()
        .map(|row| {
            let degree = row.iter().map(Poly1::degree).max().unwrap_or(0);
            row.iter().map(|p| p.reversed(degree)).collect()
        })
        .collect();
    // Reduce to a function-field basis; the generic rank is its size.
    let mut rows = reduce_over_function_field(&s_rows, cols);
    let k = rows.len();
    if k == 0 {
        return Ok(SubmodulePresentation::new(Vec::new(), cols));
    }
    normalize_rows(&mut rows);
    // Saturation at s = 0.
    let max_steps = rows
        .iter()
        .map(|r| r.iter().map(Poly1::degree).max().unwrap_or(0))
        .sum::<usize>()
        + k
        + 1;
    let mut steps = 0;
    loop {
        if cancel.is_cancelled() {
            return Err(DegenerationError::Cancelled);
        }
        let at_zero: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|p| p.coeff(0)).collect())
            .collect();
        if rank_of_rows(&at_zero, cols) == k {
            let reduced = row_space(&at_zero, cols);
            return Ok(SubmodulePresentation::new(reduced.rows_vec(), cols));
        }
        // A dependency among the evaluated rows.
        let dep = Matrix::from_rows(at_zero).transpose().kernel_basis();
        let lambda = dep.first().ok_or(DegenerationError::RankDrop)?;
        let mut combo = vec![Poly1::zero(); cols];
        for (i, c) in lambda.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (acc, p) in combo.iter_mut().zip(&rows[i]) {
                *acc = acc.add(&p.scale(c));
            }
        }
        let val = combo
            .iter()
            .filter_map(Poly1::valuation)
            .min()
            .ok_or(DegenerationError::RankDrop)?;
        debug_assert!(val >= 1, "dependency with nonvanishing combination");
        let replaced: Vec<Poly1> = combo.iter().map(|p| p.div_power(val)).collect();
        let target = lambda
            .iter()
            .rposition(|c| !c.is_zero())
            .expect("nonzero dependency");
        rows[target] = replaced;
        normalize_rows(&mut rows);
        steps += 1;
        assert!(steps <= max_steps, "saturation exceeded its termination bound");
    }
}

fn normalize_rows(rows: &mut [Vec<Poly1>]) {
    for row in rows.iter_mut() {
        let val = row.iter().filter_map(Poly1::valuation).min();
        if let Some(v) = val {
            if v > 0 {
                for p in row.iter_mut() {
                    *p = p.div_power(v);
                }
            }
            // Remove rational content for stable output.
            let lead = row
                .iter()
                .find_map(|p| {
                    let c = p.coeff(p.valuation().unwrap_or(0));
                    if c.is_zero() {
                        None
                    } else {
                        Some(c)
                    }
                })
                .expect("nonzero row");
            let inv = lead.abs().recip() * if lead.is_negative() { -Rational::one() } else { Rational::one() };
            for p in row.iter_mut() {
                *p = p.scale(&inv);
            }
        }
    }
}

/// Dominance verdict comparing a module against one of its limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominanceVerdict {
    Equal,
    StrictlyDominates,
    Violates,
}

/// Compare the layerings of `m` and `m_prime` under the dominance order.
pub fn verify_dominance(
    m: &ModuleRealization,
    m_prime: &ModuleRealization,
    algebra: &AlgebraPresentation,
) -> Result<DominanceVerdict, DegenerationError> {
    let lay_m = layering_of_unchecked(m, algebra);
    let lay_p = layering_of_unchecked(m_prime, algebra);
    if lay_m.total() != lay_p.total() {
        return Err(DegenerationError::DimensionMismatch);
    }
    if lay_m == lay_p {
        return Ok(DominanceVerdict::Equal);
    }
    match crate::layering::dominates(&lay_p, &lay_m) {
        Ok(true) => Ok(DominanceVerdict::StrictlyDominates),
        Ok(false) => Ok(DominanceVerdict::Violates),
        Err(_) => Err(DegenerationError::DimensionMismatch),
    }
}

/// Full degeneration report for one curve applied to one submodule.
#[derive(Debug, Clone)]
pub struct DegenerationReport {
    pub family_rank: usize,
    pub limit: SubmodulePresentation,
    pub module: ModuleRealization,
    pub limit_module: ModuleRealization,
    pub layering: SemisimpleSequence,
    pub limit_layering: SemisimpleSequence,
    pub verdict: DominanceVerdict,
    pub iso: IsoVerdict,
}

/// Compose [`apply_curve`] and [`limit_at_infinity`], realize both quotients,
/// and report layerings, dominance, and an isomorphism probe.
pub fn unipotent_degenerate(
    ctx: &ProjectiveContext<'_>,
    submodule: &SubmodulePresentation,
    curve: &UnipotentCurve,
    seed: u64,
    cancel: &CancelToken,
) -> Result<DegenerationReport, DegenerationError> {
    let family = apply_curve(curve, submodule, ctx)?;
    let limit = limit_at_infinity(&family, cancel)?;
    // Limits of arrow-stable families are arrow-stable.
    debug_assert!(limit_is_arrow_stable(ctx, &limit));
    let module = quotient_by_submodule(ctx, submodule);
    let limit_module = quotient_by_submodule(ctx, &limit);
    let layering = layering_of_unchecked(&module, ctx.algebra);
    let limit_layering = layering_of_unchecked(&limit_module, ctx.algebra);
    let verdict = verify_dominance(&module, &limit_module, ctx.algebra)?;
    let iso = iso_probe(&module, &limit_module, ctx.algebra, 12, seed)
        .map_err(|_| DegenerationError::DimensionMismatch)?;
    Ok(DegenerationReport {
        family_rank: family.generic_rank(),
        limit,
        module,
        limit_module,
        layering,
        limit_layering,
        verdict,
        iso,
    })
}

pub fn limit_is_arrow_stable(ctx: &ProjectiveContext<'_>, sub: &SubmodulePresentation) -> bool {
    let model = crate::algebra::TruncatedModule::build(ctx.algebra, &ctx.slots);
    let ambient = crate::algebra::realization_from_model(ctx.algebra, &model);
    let quiver = &ctx.algebra.quiver;
    let rank = rank_of_rows(&sub.generators, sub.ambient_dim);
    let mut rows = sub.generators.clone();
    for v in &sub.generators {
        for a in quiver.arrows() {
            rows.push(ambient.apply_arrow(quiver, a, v));
        }
    }
    rank_of_rows(&rows, sub.ambient_dim) == rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio};

    #[test]
    fn poly_arithmetic_and_gcd() {
        let t = Poly1::variable();
        let p = t.mul(&t).add(&Poly1::constant(rat(-1))); // t^2 - 1
        let q = t.add(&Poly1::constant(rat(1))); // t + 1
        let g = p.gcd(&q);
        assert_eq!(g, q); // monic gcd
        assert_eq!(p.eval(&rat(3)), rat(8));
        assert_eq!(p.reversed(2), Poly1::from_coeffs(vec![rat(1), rat(0), rat(-1)]).neg().neg());
    }

    #[test]
    fn rational_function_normalizes() {
        let t = Poly1::variable();
        let f = RationalFunction::new(t.mul(&t), t.clone()).unwrap();
        assert_eq!(f.num, Poly1::variable());
        assert_eq!(f.den, Poly1::one());
        let g = RationalFunction::new(Poly1::constant(rat(2)), t.scale(&rat(2))).unwrap();
        assert_eq!(g.den.leading(), rat(1));
        assert_eq!(g.eval(&rat(2)).unwrap(), ratio(1, 2));
    }

    #[test]
    fn shift_and_scale_arguments() {
        let t = Poly1::variable();
        let p = t.mul(&t); // t^2
        assert_eq!(p.shift_arg(&rat(1)).eval(&rat(2)), rat(9));
        assert_eq!(p.scale_arg(&rat(3)).eval(&rat(2)), rat(36));
    }
}
