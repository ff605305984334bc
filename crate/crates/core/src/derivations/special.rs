use rand::Rng;

use super::{DerivationError, Presentation};
use crate::exactnum::{upoly, Field, Fp, Monomial, MultiPoly, Ring};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStep {
    Free(usize),
    Solve { var: usize, relation: usize, degree: u32 },
}

/// A triangular solving order for the relations of a presentation.
///
/// Each relation either determines one generator in terms of generators
/// that come earlier, or is left as a check that every sampled point has
/// to satisfy.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub steps: Vec<SolveStep>,
    pub check_only: Vec<usize>,
    /// `coefficients[r]` holds the polynomial coefficients of relation `r`
    /// in its solved variable, lowest power first.
    coefficients: Vec<Vec<MultiPoly>>,
}

impl Layout {
    pub fn new(p: &Presentation) -> Layout {
        let n = p.num_generators();
        let mut solved_by: Vec<Option<usize>> = vec![None; n];
        let mut deps: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut check_only = Vec::new();

        let mut order: Vec<usize> = (0..p.relations.len()).collect();
        order.sort_by_key(|&r| p.relations[r].kind);
        for r in order {
            let rel = &p.relations[r];
            let support = rel.poly.support();
            let usable = |v: usize, solved_by: &[Option<usize>], deps: &[Vec<usize>]| {
                solved_by[v].is_none() && support.iter().all(|&w| w == v || !reaches(deps, w, v))
            };
            let pick = rel
                .prefer
                .filter(|&v| support.contains(&v) && usable(v, &solved_by, &deps))
                .or_else(|| {
                    support
                        .iter()
                        .copied()
                        .filter(|&v| usable(v, &solved_by, &deps))
                        .min_by_key(|&v| (rel.poly.degree_in(v), std::cmp::Reverse(v)))
                });
            match pick {
                Some(v) => {
                    solved_by[v] = Some(r);
                    deps[v] = support.iter().copied().filter(|&w| w != v).collect();
                }
                None => check_only.push(r),
            }
        }

        let mut steps = Vec::with_capacity(n);
        let mut state = vec![0u8; n];
        for v in 0..n {
            visit(v, &deps, &solved_by, p, &mut state, &mut steps);
        }
        let coefficients = p
            .relations
            .iter()
            .enumerate()
            .map(|(r, rel)| match solved_by.iter().position(|&s| s == Some(r)) {
                Some(v) => {
                    let parts = rel.poly.split_by(&[v]);
                    let top = rel.poly.degree_in(v) as usize;
                    let zero = MultiPoly::zero(p.vars.clone());
                    (0..=top)
                        .map(|k| parts.get(&Monomial(vec![k as u32])).cloned().unwrap_or_else(|| zero.clone()))
                        .collect()
                }
                None => Vec::new(),
            })
            .collect();
        check_only.sort_unstable();
        Layout {
            steps,
            check_only,
            coefficients,
        }
    }

    /// True when every solving step is linear, so the generic point has
    /// coordinates in the rational function field of the free generators.
    pub fn is_rational(&self) -> bool {
        self.steps
            .iter()
            .all(|s| !matches!(s, SolveStep::Solve { degree, .. } if *degree > 1))
    }

    pub fn free_generators(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .steps
            .iter()
            .filter_map(|s| match s {
                SolveStep::Free(v) => Some(*v),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// A point of the presented variety over `F_p`, or `None` when this
    /// attempt ran into a vanishing leading coefficient, a polynomial
    /// without roots, or a check relation that fails.
    pub fn try_sample<R: Rng + ?Sized>(&self, p: &Presentation, rng: &mut R) -> Option<Vec<Fp>> {
        let mut x = vec![Fp::ZERO; p.num_generators()];
        for step in &self.steps {
            match *step {
                SolveStep::Free(v) => x[v] = Fp::random(rng),
                SolveStep::Solve { var, relation, degree } => {
                    let coeffs: Vec<Fp> = self.coefficients[relation]
                        .iter()
                        .map(|c| c.eval(&x))
                        .collect::<Option<_>>()?;
                    if coeffs[degree as usize].is_zero() {
                        return None;
                    }
                    x[var] = if degree == 1 {
                        coeffs[0].negated().divided_by(&coeffs[1])?
                    } else {
                        let roots = upoly::roots(&coeffs, rng);
                        if roots.is_empty() {
                            return None;
                        }
                        roots[rng.gen_range(0..roots.len())]
                    };
                }
            }
        }
        let all_vanish = p.relations.iter().all(|r| r.poly.eval(&x).is_some_and(|v| v.is_zero()));
        all_vanish.then_some(x)
    }

    pub fn sample<R: Rng + ?Sized>(&self, p: &Presentation, rng: &mut R, attempts: usize) -> Result<Vec<Fp>, DerivationError> {
        for _ in 0..attempts {
            if let Some(x) = self.try_sample(p, rng) {
                return Ok(x);
            }
        }
        let failing: Vec<&str> = self
            .check_only
            .iter()
            .map(|&r| p.relations[r].origin.as_str())
            .collect();
        Err(DerivationError::SpecializationFailure(if failing.is_empty() {
            format!("{attempts} attempts hit degenerate values")
        } else {
            format!("{attempts} attempts; unsolved relations: {}", failing.join(", "))
        }))
    }

    /// Coordinates of the generic point over `K = ℚ(free generators)`,
    /// written in the field `F` through `embed_free`.
    pub fn generic_point<F: Field>(&self, p: &Presentation, embed_free: impl Fn(usize) -> F, zero: &F) -> Result<Vec<F>, DerivationError> {
        if !self.is_rational() {
            return Err(DerivationError::NotRational);
        }
        let mut x = vec![zero.clone(); p.num_generators()];
        for step in &self.steps {
            match *step {
                SolveStep::Free(v) => x[v] = embed_free(v),
                SolveStep::Solve { var, relation, .. } => {
                    let c: Vec<F> = self.coefficients[relation]
                        .iter()
                        .map(|c| c.eval(&x))
                        .collect::<Option<_>>()
                        .ok_or(DerivationError::NotRational)?;
                    x[var] = c[0]
                        .negated()
                        .divided_by(&c[1])
                        .ok_or_else(|| DerivationError::SpecializationFailure(format!("{} vanishes identically", p.relations[relation].origin)))?;
                }
            }
        }
        for r in &p.relations {
            if !r.poly.eval(&x).is_some_and(|v| v.is_zero()) {
                return Err(DerivationError::SpecializationFailure(format!("{} fails at the generic point", r.origin)));
            }
        }
        Ok(x)
    }
}

fn reaches(deps: &[Vec<usize>], from: usize, target: usize) -> bool {
    let mut stack = vec![from];
    let mut seen = vec![false; deps.len()];
    while let Some(v) = stack.pop() {
        if v == target {
            return true;
        }
        if !std::mem::replace(&mut seen[v], true) {
            stack.extend(&deps[v]);
        }
    }
    false
}

fn visit(v: usize, deps: &[Vec<usize>], solved_by: &[Option<usize>], p: &Presentation, state: &mut [u8], steps: &mut Vec<SolveStep>) {
    if state[v] != 0 {
        return;
    }
    state[v] = 1;
    for &w in &deps[v] {
        visit(w, deps, solved_by, p, state, steps);
    }
    state[v] = 2;
    steps.push(match solved_by[v] {
        Some(r) => SolveStep::Solve {
            var: v,
            relation: r,
            degree: p.relations[r].poly.degree_in(v),
        },
        None => SolveStep::Free(v),
    });
}
