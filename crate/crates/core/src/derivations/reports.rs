use std::collections::BTreeSet;

use serde::Serialize;

use super::{Analysis, DerivationError, Presentation};
use crate::exactnum::parse::parse_rational_function;
use crate::exactnum::RationalFunction;

const REALIZABILITY_NOTE: &str =
    "dim^j and dim^g are computed on the finite presentation; they agree with the ambient j-field only if the presentation is realizable";

fn names(p: &Presentation, ix: &[usize]) -> Vec<String> {
    ix.iter().map(|&i| p.name(i).to_string()).collect()
}

fn require_jpoints(p: &Presentation, zs: &[usize]) -> Result<(), DerivationError> {
    for &z in zs {
        if p.jpoint_at(z).is_none() {
            return Err(DerivationError::InvalidJPoint(format!("{} is not a j-point", p.name(z))));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaReport {
    pub z: Vec<String>,
    pub over: Vec<String>,
    pub td: usize,
    pub dim_g: usize,
    pub three_dim_g: usize,
    pub delta: i64,
    pub msc_counterexample_shape: bool,
    pub seed: u64,
}

/// `δ(z̄/B) = t.d.(z̄, j(z̄), j′(z̄), j″(z̄) / B, jets(A)) − 3·dim^g(z̄/B)`,
/// where `A` collects the j-points whose `z` lies in `B`.
pub fn delta(a: &Analysis, zs: &[usize], over: &[usize]) -> Result<DeltaReport, DerivationError> {
    let p = &a.presentation;
    require_jpoints(p, zs)?;
    let in_b: Vec<usize> = over.iter().copied().filter(|&b| p.jpoint_at(b).is_some()).collect();
    let mut base: Vec<usize> = over.to_vec();
    base.extend(a.jets(&in_b));
    let td = a.td(&a.jets(zs), &base);
    let dim_g = p.gcl_dim(zs, over, &[]);
    let value = td as i64 - 3 * dim_g as i64;
    Ok(DeltaReport {
        z: names(p, zs),
        over: names(p, over),
        td,
        dim_g,
        three_dim_g: 3 * dim_g,
        delta: value,
        msc_counterexample_shape: value < 0,
        seed: a.seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchanuelReport {
    pub z: Vec<String>,
    pub over: Vec<String>,
    pub lhs: usize,
    pub dim_g: usize,
    pub dim_j: usize,
    pub rhs: usize,
    pub holds: bool,
    pub equality: bool,
    pub verdict: &'static str,
    pub note: &'static str,
    pub seed: u64,
}

/// Evaluates `t.d.(z̄, j(z̄), j′(z̄), j″(z̄)/C) ≥ 3·dim^g(z̄/C) + dim^j(z̄/C)`.
/// A failure means the data cannot come from a j-field.
pub fn schanuel_report(a: &Analysis, zs: &[usize], c: &[usize]) -> Result<SchanuelReport, DerivationError> {
    let p = &a.presentation;
    require_jpoints(p, zs)?;
    let lhs = a.td(&a.jets(zs), c);
    let dim_g = p.gcl_dim(zs, c, &[]);
    let dim_j = a.dim_j(zs, c);
    let rhs = 3 * dim_g + dim_j;
    Ok(SchanuelReport {
        z: names(p, zs),
        over: names(p, c),
        lhs,
        dim_g,
        dim_j,
        rhs,
        holds: lhs >= rhs,
        equality: lhs == rhs,
        verdict: if lhs >= rhs { "holds" } else { "NotRealizable" },
        note: REALIZABILITY_NOTE,
        seed: a.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    /// `{z̄, g₁z̄, …, g_m z̄}` is gcl-independent.
    #[serde(rename = "a")]
    IndependentImages,
    /// `z̄ ⊆ C` and no `z_i` is special.
    #[serde(rename = "b")]
    ConstantNonSpecial,
    #[serde(rename = "trivial")]
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MainReport {
    pub tau: Vec<String>,
    pub z: Vec<String>,
    pub g: Vec<[String; 4]>,
    pub gz: Vec<Vec<String>>,
    pub over: Vec<String>,
    pub hypothesis: Hypothesis,
    pub n: usize,
    pub m: usize,
    pub lhs: usize,
    pub threshold_3nm: usize,
    pub threshold_4nm: usize,
    pub holds_3nm: bool,
    pub holds_4nm: bool,
    pub note: &'static str,
    pub seed: u64,
}

/// True when every entry of `g` is a rational multiple of one entry, i.e.
/// `g = a·h` with `a` a scalar and `h` rational.
fn is_scalar_times_rational(g: &[RationalFunction]) -> bool {
    let Some(pivot) = g.iter().find(|e| !e.is_zero()) else {
        return true;
    };
    g.iter()
        .all(|e| e.div(pivot).is_some_and(|r| r.is_constant()))
}

fn proportional(a: &[RationalFunction], b: &[RationalFunction]) -> bool {
    (0..4).all(|i| (0..4).all(|k| a[i].mul(&b[k]) == a[k].mul(&b[i])))
}

/// Checks the hypotheses of the main inequality on presentation data and
/// evaluates `t.d.(jets of z̄ and ḡz̄ / τ̄, C, z̄)` against `3nm` and `4nm`.
/// `C` is the declared constant set of the presentation.
pub fn main_inequality_report(
    a: &Analysis,
    tau: &[usize],
    zs: &[usize],
    gs: &[[String; 4]],
) -> Result<MainReport, DerivationError> {
    let p = &a.presentation;
    require_jpoints(p, zs)?;
    let c = p.constants.clone();
    let (n, m) = (zs.len(), gs.len());

    for (k, &t) in tau.iter().enumerate() {
        let others: Vec<usize> = tau.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &x)| x).collect();
        if a.jcl_member(t, &others) {
            return Err(DerivationError::PreconditionFailed(format!("{} lies in jcl of the other tau", p.name(t))));
        }
    }
    if p.gcl_dim(zs, &[], &[]) != n {
        return Err(DerivationError::PreconditionFailed("z is not gcl-independent".into()));
    }
    if m > 0 && tau.len() != m {
        return Err(DerivationError::PreconditionFailed(format!("{m} matrices but {} tau", tau.len())));
    }

    let parse = |s: &String| parse_rational_function(s, &p.vars).map_err(|e| DerivationError::Parse(e.to_string()));
    let mut gz_names = Vec::new();
    let mut gz = Vec::new();
    for (i, g) in gs.iter().enumerate() {
        let entries: Vec<RationalFunction> = g.iter().map(parse).collect::<Result<_, _>>()?;
        for e in &entries {
            if e.numer().support().iter().chain(e.denom().support().iter()).any(|&v| v != tau[i]) {
                return Err(DerivationError::PreconditionFailed(format!(
                    "g{} has entries outside Q({})",
                    i + 1,
                    p.name(tau[i])
                )));
            }
        }
        if is_scalar_times_rational(&entries) {
            return Err(DerivationError::PreconditionFailed(format!("g{} is of the form a·h", i + 1)));
        }
        let mut row = Vec::new();
        for &z in zs {
            let src = p.jpoints.iter().position(|q| q.z == z).expect("checked above");
            let found = p.orbits.iter().find(|o| {
                o.src == src && {
                    let og: Vec<RationalFunction> = o.g.iter().map(|e| RationalFunction::from_poly(e.clone())).collect();
                    proportional(&og, &entries)
                }
            });
            let o = found.ok_or_else(|| {
                DerivationError::PreconditionFailed(format!("no declared orbit g{}·{}", i + 1, p.name(z)))
            })?;
            let dst = p.jpoints[o.dst].z;
            row.push(p.name(dst).to_string());
            gz.push(dst);
        }
        gz_names.push(row);
    }

    let hypothesis = if m == 0 {
        Hypothesis::Trivial
    } else {
        let mut all = zs.to_vec();
        all.extend(&gz);
        let distinct: BTreeSet<usize> = all.iter().copied().collect();
        if distinct.len() == all.len() && p.gcl_dim(&all, &[], &[]) == all.len() {
            Hypothesis::IndependentImages
        } else {
            let special = p.orbits.iter().any(|o| o.src == o.dst && o.level.is_some() && zs.contains(&p.jpoints[o.src].z));
            if zs.iter().all(|z| c.contains(z)) && !special {
                Hypothesis::ConstantNonSpecial
            } else {
                return Err(DerivationError::HypothesisUncertified(
                    "the images are not gcl-independent and z is not a tuple of non-special constants".into(),
                ));
            }
        }
    };

    let mut s = Vec::new();
    for &z in zs.iter().chain(&gz) {
        let q = p.jpoint_at(z).expect("j-point");
        s.extend(&q.j[..3]);
    }
    let mut base = tau.to_vec();
    base.extend(&c);
    base.extend(zs);
    let lhs = a.td(&s, &base);
    Ok(MainReport {
        tau: names(p, tau),
        z: names(p, zs),
        g: gs.to_vec(),
        gz: gz_names,
        over: names(p, &c),
        hypothesis,
        n,
        m,
        lhs,
        threshold_3nm: 3 * n * m,
        threshold_4nm: 4 * n * m,
        holds_3nm: lhs >= 3 * n * m,
        holds_4nm: lhs >= 4 * n * m,
        note: "C is the declared constant set; both thresholds are printed without endorsing either",
        seed: a.seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum EssentialOutcome {
    NotEssential { witness: Vec<String>, delta: i64, delta_z: i64 },
    CandidateUpTo { bound: u64, delta_z: i64, searched: usize },
}

/// Looks for `c̄` among bounded-height orbit images of `z̄` with
/// `δ(c̄) < δ(z̄)`. Tuples have length at most `|z̄|`.
pub fn essential_candidate_check(a: &Analysis, zs: &[usize], bound: u64) -> Result<EssentialOutcome, DerivationError> {
    let p = &a.presentation;
    let dz = delta(a, zs, &[])?.delta;
    if dz >= 0 {
        return Err(DerivationError::PreconditionFailed(format!("delta(z) = {dz} is not negative")));
    }
    let mut pool: Vec<usize> = zs.to_vec();
    let mut grew = true;
    while grew {
        grew = false;
        for o in &p.orbits {
            let Some(h) = o.height() else { continue };
            if h > bound {
                continue;
            }
            let (s, d) = (p.jpoints[o.src].z, p.jpoints[o.dst].z);
            for (from, to) in [(s, d), (d, s)] {
                if pool.contains(&from) && !pool.contains(&to) {
                    pool.push(to);
                    grew = true;
                }
            }
        }
    }
    pool.sort_unstable();
    let mut searched = 0;
    let mut best: Option<(i64, Vec<usize>)> = None;
    for mask in 1u64..(1 << pool.len()) {
        let c: Vec<usize> = (0..pool.len()).filter(|i| mask >> i & 1 == 1).map(|i| pool[i]).collect();
        if c.len() > zs.len() {
            continue;
        }
        searched += 1;
        let d = delta(a, &c, &[])?.delta;
        if d < dz && best.as_ref().is_none_or(|(b, _)| d < *b) {
            best = Some((d, c));
        }
    }
    Ok(match best {
        Some((d, c)) => EssentialOutcome::NotEssential {
            witness: names(p, &c),
            delta: d,
            delta_z: dz,
        },
        None => EssentialOutcome::CandidateUpTo {
            bound,
            delta_z: dz,
            searched,
        },
    })
}
