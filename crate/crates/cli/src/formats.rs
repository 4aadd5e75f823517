//! File formats: the algebra description (JSON), skeleton lists, chart
//! ideals, point assignments, module dumps, curves, and submodule
//! presentations. All rationals travel as `p/q` strings; every emitted file
//! is newline-terminated and stable under re-runs.

use anyhow::{anyhow, bail, Context, Result};
use num::Zero;
use quivergrass_core::algebra::{AlgebraPresentation, ModuleRealization, Relation};
use quivergrass_core::degeneration::{Poly1, RationalFunction, UnipotentCurve};
use quivergrass_core::equations::GrassIdeal;
use quivergrass_core::quiver::{ArrowId, ModPath, Quiver, VertexId};
use quivergrass_core::realize::{PointData, SubmodulePresentation};
use quivergrass_core::scalar::{format_rational, parse_rational, Rational};
use quivergrass_core::skeleta::{CriticalData, ProjectiveContext, Skeleton};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowEntry>,
    pub loewy_bound: usize,
    #[serde(default)]
    pub relations: Vec<Vec<RelationTerm>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowEntry {
    pub name: String,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationTerm {
    pub coeff: String,
    pub path: Vec<String>,
}

pub fn parse_algebra(text: &str) -> Result<AlgebraPresentation> {
    let file: AlgebraFile = serde_json::from_str(text).context("invalid algebra file")?;
    let quiver = Quiver::new(
        file.vertices,
        file.arrows
            .into_iter()
            .map(|a| (a.name, a.from, a.to))
            .collect(),
    )
    .map_err(|e| anyhow!("invalid quiver: {e}"))?;
    let mut relations = Vec::new();
    for (i, rel) in file.relations.into_iter().enumerate() {
        let mut terms = Vec::new();
        for term in rel {
            let coeff = parse_rational(&term.coeff)
                .map_err(|e| anyhow!("relation {i}: bad coefficient: {e}"))?;
            let mut arrows = Vec::new();
            for name in &term.path {
                arrows.push(
                    quiver
                        .arrow_by_name(name)
                        .map_err(|e| anyhow!("relation {i}: {e}"))?,
                );
            }
            let source = arrows
                .first()
                .map(|&a| quiver.arrow_source(a))
                .ok_or_else(|| anyhow!("relation {i}: empty path"))?;
            let path = quiver
                .path(source, &arrows)
                .map_err(|e| anyhow!("relation {i}: {e}"))?;
            terms.push((coeff, path));
        }
        relations.push(Relation::new(terms));
    }
    Ok(AlgebraPresentation::new(quiver, relations, file.loewy_bound))
}

pub fn parse_sequence(text: &str) -> Result<Vec<Vec<usize>>> {
    serde_json::from_str(text.trim()).context("invalid sequence literal, expected [[..],[..]]")
}

fn format_mod_path(quiver: &Quiver, p: &ModPath) -> String {
    if p.path.arrows.is_empty() {
        format!("{}:", p.slot + 1)
    } else {
        format!(
            "{}: {}",
            p.slot + 1,
            p.path
                .arrows
                .iter()
                .map(|&a| quiver.arrow_name(a))
                .collect::<Vec<_>>()
                .join(".")
        )
    }
}

fn parse_mod_path(ctx: &ProjectiveContext<'_>, text: &str) -> Result<ModPath> {
    let quiver = &ctx.algebra.quiver;
    let (slot_text, path_text) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("expected `slot: arrows` in `{text}`"))?;
    let slot: usize = slot_text
        .trim()
        .parse()
        .map_err(|_| anyhow!("bad slot `{slot_text}`"))?;
    if slot == 0 || slot > ctx.slot_count() {
        bail!("slot {slot} out of range 1..={}", ctx.slot_count());
    }
    let slot = slot - 1;
    let path_text = path_text.trim();
    let arrows: Vec<ArrowId> = if path_text.is_empty() {
        Vec::new()
    } else {
        path_text
            .split('.')
            .map(|name| {
                quiver
                    .arrow_by_name(name.trim())
                    .map_err(|e| anyhow!("{e}"))
            })
            .collect::<Result<_>>()?
    };
    quiver
        .path(ctx.slots[slot], &arrows)
        .map(|path| ModPath::new(slot, path))
        .map_err(|e| anyhow!("{e}"))
}

pub fn render_skeleta(quiver: &Quiver, skeleta: &[Skeleton]) -> String {
    let mut out = String::new();
    for (i, sk) in skeleta.iter().enumerate() {
        if i > 0 {
            out.push_str("--\n");
        }
        for p in &sk.paths {
            out.push_str(&format_mod_path(quiver, p));
            out.push('\n');
        }
    }
    out
}

pub fn parse_skeleta(ctx: &ProjectiveContext<'_>, text: &str) -> Result<Vec<Skeleton>> {
    let mut skeleta = Vec::new();
    let mut current: Vec<ModPath> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "--" {
            if !current.is_empty() {
                skeleta.push(Skeleton::from_paths(current.drain(..)));
            }
            continue;
        }
        current.push(parse_mod_path(ctx, line)?);
    }
    if !current.is_empty() {
        skeleta.push(Skeleton::from_paths(current));
    }
    Ok(skeleta)
}

fn render_polynomial(poly: &quivergrass_core::equations::Polynomial) -> String {
    if poly.is_zero() {
        return "0".to_string();
    }
    let mut terms: Vec<String> = Vec::new();
    // Leading terms first.
    let mut collected: Vec<_> = poly.terms().collect();
    collected.reverse();
    for (mono, coeff) in collected {
        let mut parts = vec![format_rational(coeff)];
        for &(var, exp) in mono.exponents() {
            if exp == 1 {
                parts.push(format!("X[{var}]"));
            } else {
                parts.push(format!("X[{var}]^{exp}"));
            }
        }
        terms.push(parts.join(" * "));
    }
    terms.join(" + ")
}

pub fn render_ideal_text(
    quiver: &Quiver,
    ideal: &GrassIdeal,
    critical: &CriticalData,
    degree_sorted: bool,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("variables: {}\n", ideal.variables.len()));
    for (u, q) in &ideal.variables {
        out.push_str(&format!(
            "X[{} ; {}]\n",
            format_mod_path(quiver, u),
            format_mod_path(quiver, q)
        ));
    }
    out.push_str(&format!("free-variables: {}\n", ideal.free_variables.len()));
    for (u, q) in &ideal.free_variables {
        out.push_str(&format!(
            "X[{} ; {}]\n",
            format_mod_path(quiver, u),
            format_mod_path(quiver, q)
        ));
    }
    let _ = critical;
    let mut generators: Vec<&quivergrass_core::equations::Polynomial> =
        ideal.generators.iter().collect();
    if degree_sorted {
        generators.sort_by_key(|p| (p.degree(), p.term_count()));
    }
    out.push_str(&format!("generators: {}\n", generators.len()));
    for g in generators {
        out.push_str(&render_polynomial(g));
        out.push('\n');
    }
    out
}

pub fn render_ideal_json(quiver: &Quiver, ideal: &GrassIdeal) -> String {
    let variables: Vec<serde_json::Value> = ideal
        .variables
        .iter()
        .map(|(u, q)| {
            serde_json::json!({
                "critical": format_mod_path(quiver, u),
                "sigma": format_mod_path(quiver, q),
            })
        })
        .collect();
    let free: Vec<usize> = ideal
        .free_variables
        .iter()
        .filter_map(|pair| ideal.variables.iter().position(|v| v == pair))
        .collect();
    let generators: Vec<serde_json::Value> = ideal
        .generators
        .iter()
        .zip(&ideal.provenance)
        .map(|(g, (relation, slot, path))| {
            let terms: Vec<serde_json::Value> = g
                .terms()
                .map(|(m, c)| {
                    serde_json::json!({
                        "coeff": format_rational(c),
                        "monomial": m.exponents(),
                    })
                })
                .collect();
            serde_json::json!({
                "relation": relation,
                "slot": slot + 1,
                "skeleton_path": format_mod_path(quiver, path),
                "terms": terms,
            })
        })
        .collect();
    let skeleton: Vec<String> = ideal
        .skeleton
        .paths
        .iter()
        .map(|p| format_mod_path(quiver, p))
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({
        "skeleton": skeleton,
        "variables": variables,
        "free_variable_indices": free,
        "generators": generators,
    }))
    .expect("serializable")
        + "\n"
}

pub fn parse_point(
    ctx: &ProjectiveContext<'_>,
    critical: &CriticalData,
    text: &str,
) -> Result<PointData> {
    let mut assignments = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (pair_text, value_text) = line
            .rsplit_once('=')
            .ok_or_else(|| anyhow!("expected `critical ; sigma = p/q` in `{line}`"))?;
        let value = parse_rational(value_text.trim()).map_err(|e| anyhow!("{e}"))?;
        let (u_text, q_text) = pair_text
            .split_once(';')
            .ok_or_else(|| anyhow!("expected `critical ; sigma` in `{pair_text}`"))?;
        let u = parse_mod_path(ctx, u_text.trim())?;
        let q = parse_mod_path(ctx, q_text.trim())?;
        assignments.push(((u, q), value));
    }
    PointData::from_assignments(critical, &assignments)
        .ok_or_else(|| anyhow!("an assignment names a pair outside the coordinate index"))
}

pub fn render_module(quiver: &Quiver, m: &ModuleRealization) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "vertices: {}\n",
        quiver
            .vertices()
            .map(|v| quiver.vertex_name(v))
            .collect::<Vec<_>>()
            .join(" ")
    ));
    out.push_str(&format!(
        "dims: {}\n",
        m.vertex_dims
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    ));
    for a in quiver.arrows() {
        let mat = &m.arrow_maps[a.0];
        out.push_str(&format!(
            "arrow {}: {}x{}\n",
            quiver.arrow_name(a),
            mat.row_count(),
            mat.col_count()
        ));
        for r in 0..mat.row_count() {
            let row: Vec<String> = mat.row(r).iter().map(format_rational).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out.push_str(&format!("tops: {}\n", m.tops.len()));
    for t in &m.tops {
        let row: Vec<String> = t.iter().map(format_rational).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Render an ambient vector as a combination of slot paths of the truncated
/// basis; inverse of the submodule term syntax.
pub fn render_ambient_vector(ctx: &ProjectiveContext<'_>, v: &[Rational]) -> String {
    let (_, offsets, layout) = quivergrass_core::realize::ambient_coordinates(ctx);
    let quiver = &ctx.algebra.quiver;
    let mut terms = Vec::new();
    for (vtx, list) in layout.iter().enumerate() {
        for (k, p) in list.iter().enumerate() {
            let c = &v[offsets[vtx] + k];
            if !c.is_zero() {
                let path_text = if p.path.arrows.is_empty() {
                    format!("{}:", p.slot + 1)
                } else {
                    format!(
                        "{}:{}",
                        p.slot + 1,
                        p.path
                            .arrows
                            .iter()
                            .map(|&a| quiver.arrow_name(a))
                            .collect::<Vec<_>>()
                            .join(".")
                    )
                };
                terms.push(format!("{} * {}", format_rational(c), path_text));
            }
        }
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// Submodule file: a `slots:` header naming the cover, then one generator per
/// line as ` + `-separated `coeff * slot:path` terms.
pub fn parse_submodule_file(
    algebra: &AlgebraPresentation,
    text: &str,
) -> Result<(Vec<VertexId>, Vec<String>)> {
    let mut slots = None;
    let mut generator_lines = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("slots:") {
            let parsed: Result<Vec<VertexId>> = rest
                .split(',')
                .map(|name| {
                    algebra
                        .quiver
                        .vertex_by_name(name.trim())
                        .map_err(|e| anyhow!("{e}"))
                })
                .collect();
            slots = Some(parsed?);
            continue;
        }
        generator_lines.push(line.to_string());
    }
    let slots = slots.ok_or_else(|| anyhow!("missing `slots:` header"))?;
    Ok((slots, generator_lines))
}

pub fn parse_generators(
    ctx: &ProjectiveContext<'_>,
    lines: &[String],
) -> Result<SubmodulePresentation> {
    let (model, offsets, layout) = quivergrass_core::realize::ambient_coordinates(ctx);
    let total: usize = layout.iter().map(Vec::len).sum();
    let quiver = &ctx.algebra.quiver;
    let mut generators = Vec::new();
    for line in lines {
        if line.trim() == "0" {
            continue;
        }
        let mut v = vec![Rational::zero(); total];
        for term in line.split(" + ") {
            let (coeff_text, path_text) = term
                .split_once('*')
                .ok_or_else(|| anyhow!("expected `coeff * slot:path` in `{term}`"))?;
            let coeff = parse_rational(coeff_text.trim()).map_err(|e| anyhow!("{e}"))?;
            let p = parse_mod_path(ctx, path_text.trim())?;
            for (bpos, c) in model.express(&p) {
                let q = model.basis_paths()[bpos].clone();
                let vtx = quiver.target_of(&q.path).0;
                let k = layout[vtx]
                    .iter()
                    .position(|x| x == &q)
                    .expect("basis path");
                v[offsets[vtx] + k] += &coeff * &c;
            }
        }
        generators.push(v);
    }
    Ok(SubmodulePresentation::new(generators, total))
}

/// Polynomial in the curve parameter `t`: sums of `c`, `t`, `c*t^k` terms.
fn parse_tau_poly(text: &str) -> Result<Poly1> {
    let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if text.is_empty() {
        bail!("empty polynomial");
    }
    // Normalize: insert '+' before '-' (except a leading one) and split.
    let mut normalized = String::new();
    for (i, ch) in text.chars().enumerate() {
        if ch == '-' && i > 0 {
            normalized.push('+');
        }
        normalized.push(ch);
    }
    let mut coeffs: Vec<Rational> = Vec::new();
    for raw in normalized.split('+') {
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let (coeff_text, power) = match raw.split_once('t') {
            None => (raw, 0usize),
            Some((c, rest)) => {
                let rest = rest.trim();
                let power = if let Some(exp) = rest.strip_prefix('^') {
                    exp.trim()
                        .parse()
                        .map_err(|_| anyhow!("bad exponent in `{raw}`"))?
                } else if rest.is_empty() {
                    1
                } else {
                    bail!("unexpected `{rest}` after t in `{raw}`");
                };
                (c.trim().trim_end_matches('*').trim(), power)
            }
        };
        let coeff = if coeff_text.is_empty() {
            Rational::from_integer(1.into())
        } else if coeff_text == "-" {
            -Rational::from_integer(1.into())
        } else {
            parse_rational(coeff_text).map_err(|e| anyhow!("{e}"))?
        };
        if coeffs.len() <= power {
            coeffs.resize(power + 1, Rational::zero());
        }
        coeffs[power] += coeff;
    }
    Ok(Poly1::from_coeffs(coeffs))
}

fn parse_rational_function(text: &str) -> Result<RationalFunction> {
    let text = text.trim();
    fn strip(s: &str) -> &str {
        let s = s.trim();
        match s.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
            Some(inner) => inner,
            None => s,
        }
    }
    // Split on a '/' that's outside parentheses.
    let mut depth = 0;
    let mut split_at = None;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => {
                split_at = Some(i);
                break;
            }
            _ => {}
        }
    }
    let (num_text, den_text) = match split_at {
        Some(i) => (&text[..i], &text[i + 1..]),
        None => (text, "1"),
    };
    let num = parse_tau_poly(strip(num_text))?;
    let den = parse_tau_poly(strip(den_text))?;
    RationalFunction::new(num, den).ok_or_else(|| anyhow!("zero denominator in `{text}`"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use quivergrass_core::scalar::{rat, ratio};
    use quivergrass_core::skeleta::Setting;

    #[test]
    fn tau_polynomials_parse() {
        let p = parse_tau_poly("3*t^2+1").unwrap();
        assert_eq!(p.coeff(0), rat(1));
        assert_eq!(p.coeff(2), rat(3));
        let q = parse_tau_poly("-t").unwrap();
        assert_eq!(q.coeff(1), rat(-1));
        let r = parse_tau_poly("1/2*t - 2").unwrap();
        assert_eq!(r.coeff(0), rat(-2));
        assert_eq!(r.coeff(1), ratio(1, 2));
    }

    #[test]
    fn rational_function_literals_parse() {
        let f = parse_rational_function("(3*t^2+1)/(t)").unwrap();
        assert_eq!(f.num.coeff(2), rat(3));
        assert_eq!(f.den.coeff(1), rat(1));
        assert!(parse_rational_function("(t)").unwrap().den.degree() == 0);
        assert!(parse_rational_function("(1)/(0)").is_err());
    }

    #[test]
    fn curve_blocks_parse() {
        let q = Quiver::new(
            vec!["1".into()],
            vec![
                ("alpha".into(), "1".into(), "1".into()),
                ("beta".into(), "1".into(), "1".into()),
            ],
        )
        .unwrap();
        let algebra = AlgebraPresentation::new(q, vec![], 1);
        let ctx = ProjectiveContext::new(
            &algebra,
            vec![VertexId(0), VertexId(0)],
            Setting::Big,
        );
        let curves = parse_curves(
            &ctx,
            "1: (t) * beta -> 1\n1: (-t) * alpha -> 2\n--\n2: (t^2) * beta -> 1\n",
        )
        .unwrap();
        assert_eq!(curves.len(), 2);
        assert_eq!(curves[0].terms[&0].len(), 2);
        assert_eq!(curves[1].terms[&1].len(), 1);
        assert!(curves[0].validate(&ctx).is_ok());
    }

    #[test]
    fn skeleton_text_round_trips() {
        let q = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("a".into(), "1".into(), "2".into())],
        )
        .unwrap();
        let algebra = AlgebraPresentation::new(q, vec![], 1);
        let ctx = ProjectiveContext::new(
            &algebra,
            vec![VertexId(0), VertexId(0), VertexId(1)],
            Setting::Big,
        );
        let sk = Skeleton::from_paths(vec![
            parse_mod_path(&ctx, "1:").unwrap(),
            parse_mod_path(&ctx, "2:").unwrap(),
            parse_mod_path(&ctx, "1: a").unwrap(),
        ]);
        let text = render_skeleta(&ctx.algebra.quiver, &[sk.clone()]);
        let parsed = parse_skeleta(&ctx, &text).unwrap();
        assert_eq!(parsed, vec![sk]);
    }
}

/// Curve file: blocks separated by `--`; each line
/// `slot: coeff(t) * path -> target_slot`.
pub fn parse_curves(ctx: &ProjectiveContext<'_>, text: &str) -> Result<Vec<UnipotentCurve>> {
    let quiver = &ctx.algebra.quiver;
    let mut curves = Vec::new();
    let mut current = UnipotentCurve::identity();
    let mut saw_line = false;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "--" {
            curves.push(std::mem::take(&mut current));
            saw_line = false;
            continue;
        }
        saw_line = true;
        let (slot_text, rest) = line
            .split_once(':')
            .ok_or_else(|| anyhow!("expected `slot: coeff * path -> slot` in `{line}`"))?;
        let slot: usize = slot_text
            .trim()
            .parse()
            .map_err(|_| anyhow!("bad slot `{slot_text}`"))?;
        if slot == 0 || slot > ctx.slot_count() {
            bail!("slot {slot} out of range");
        }
        let (lhs, target_text) = rest
            .rsplit_once("->")
            .ok_or_else(|| anyhow!("missing `-> slot` in `{line}`"))?;
        let target: usize = target_text
            .trim()
            .parse()
            .map_err(|_| anyhow!("bad target slot `{target_text}`"))?;
        if target == 0 || target > ctx.slot_count() {
            bail!("target slot {target} out of range");
        }
        let (coeff_text, path_text) = lhs
            .rsplit_once('*')
            .ok_or_else(|| anyhow!("expected `coeff * path` in `{lhs}`"))?;
        let coefficient = parse_rational_function(coeff_text)?;
        let arrows: Vec<ArrowId> = path_text
            .trim()
            .split('.')
            .map(|name| quiver.arrow_by_name(name.trim()).map_err(|e| anyhow!("{e}")))
            .collect::<Result<_>>()?;
        let path = quiver
            .path(ctx.slots[target - 1], &arrows)
            .map_err(|e| anyhow!("{e}"))?;
        current.add_term(slot - 1, coefficient, path, target - 1);
    }
    if saw_line || curves.is_empty() {
        curves.push(current);
    }
    Ok(curves)
}
