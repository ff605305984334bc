use std::fmt::Debug;

use serde::Serialize;

use super::{Analysis, DerivationError, Presentation};
use crate::exactnum::{linalg, Field, Fp, RationalFunction, Ring};

/// `(∂_i τ_k)⁻¹`, the coefficients that turn a spanning family into one
/// with `∂′_i(τ_k) = δ_ik`.
pub fn kronecker_normalize<F: Field>(raw: &[Vec<F>]) -> Result<Vec<Vec<F>>, DerivationError> {
    if raw.iter().any(|r| r.len() != raw.len()) {
        return Err(DerivationError::SingularSystem);
    }
    linalg::inverse(raw).ok_or(DerivationError::SingularSystem)
}

/// A normalized system `∂′_1..∂′_m` for `τ̄` together with derivations
/// `∂̃` that vanish on every `τ_k`. Rows list values on all generators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivationSystem {
    pub tau: Vec<String>,
    pub generators: Vec<String>,
    pub over: Vec<String>,
    /// `"Q(...)"` for the exact generic point, `"F_p"` for a sampled one.
    pub field: String,
    pub exact: bool,
    pub matrix: Vec<Vec<String>>,
    pub complement: Vec<Vec<String>>,
    /// Size of the spanning family, `dim Ξ(K/C)`.
    pub spanning: usize,
    pub seed: u64,
}

/// Covectors at a point given in any field: the Jacobian rows of the
/// relations when `with_relations` is set, then `E_C`, then the Ξ rows.
fn covector_rows<F: Field>(p: &Presentation, x: &[F], c: &[usize], zero: &F, with_relations: bool) -> Vec<Vec<F>> {
    let n = p.num_generators();
    let one = zero.one_like();
    let unit = |i: usize| {
        let mut row = vec![zero.clone(); n];
        row[i] = one.clone();
        row
    };
    let mut rows = Vec::new();
    if with_relations {
        for r in &p.relations {
            let mut row = vec![zero.clone(); n];
            for v in r.poly.support() {
                row[v] = r.poly.derivative(v).eval(x).expect("relations evaluate at the point");
            }
            rows.push(row);
        }
    }
    rows.extend(c.iter().map(|&i| unit(i)));
    for jp in &p.jpoints {
        for step in 0..3 {
            let mut row = unit(jp.j[step]);
            row[jp.z] = row[jp.z].minus(&x[jp.j[step + 1]]);
            rows.push(row);
        }
    }
    rows
}

type Normalized<F> = (Vec<Vec<F>>, Vec<Vec<F>>);

/// Picks `m` members of the spanning family `basis` on which `(∂_i τ_k)` is
/// invertible, normalizes them, and projects the rest away from `τ̄`.
fn normalize_family<F: Field>(basis: &[Vec<F>], tau: &[usize], zero: &F) -> Result<Normalized<F>, DerivationError> {
    let n = basis.first().map_or(0, Vec::len);
    let mut chosen: Vec<usize> = Vec::new();
    let mut raw: Vec<Vec<F>> = Vec::new();
    for (i, d) in basis.iter().enumerate() {
        if raw.len() == tau.len() {
            break;
        }
        let mut trial = raw.clone();
        trial.push(tau.iter().map(|&t| d[t].clone()).collect());
        if linalg::rank(&trial) == trial.len() {
            raw = trial;
            chosen.push(i);
        }
    }
    if raw.len() < tau.len() {
        return Err(DerivationError::SingularSystem);
    }
    let coeffs = kronecker_normalize(&raw)?;
    let combine = |weights: &[F]| -> Vec<F> {
        (0..n)
            .map(|k| {
                let mut acc = zero.clone();
                for (w, &l) in weights.iter().zip(&chosen) {
                    acc.add_product(w, &basis[l][k]);
                }
                acc
            })
            .collect()
    };
    let normalized: Vec<Vec<F>> = coeffs.iter().map(|w| combine(w)).collect();
    let complement = basis
        .iter()
        .enumerate()
        .filter(|(i, _)| !chosen.contains(i))
        .map(|(_, d)| {
            let mut out = d.clone();
            for (i, &t) in tau.iter().enumerate() {
                for (k, o) in out.iter_mut().enumerate() {
                    *o = o.minus(&d[t].times(&normalized[i][k]));
                }
            }
            out
        })
        .collect();
    Ok((normalized, complement))
}

/// Spanning family of j-derivations at the exact generic point. A
/// derivation of `ℚ(free)` is fixed by its values on the free generators,
/// so the constraints are pulled back along the Jacobian of the
/// parametrization and solved in those coordinates.
fn exact_family(a: &Analysis, c: &[usize]) -> Result<(Vec<Vec<RationalFunction>>, Vec<usize>), DerivationError> {
    let p = &a.presentation;
    let zero = RationalFunction::constant(p.vars.clone(), 0.into());
    let x = a
        .layout
        .generic_point(p, |v| RationalFunction::var(p.vars.clone(), v), &zero)?;
    let free = a.layout.free_generators();
    let lift: Vec<Vec<RationalFunction>> = x.iter().map(|xk| free.iter().map(|&f| xk.derivative(f)).collect()).collect();
    let rows: Vec<Vec<RationalFunction>> = covector_rows(p, &x, c, &zero, false)
        .iter()
        .map(|row| {
            (0..free.len())
                .map(|j| {
                    let mut acc = zero.clone();
                    for (k, e) in row.iter().enumerate() {
                        if !e.is_zero() && !lift[k][j].is_zero() {
                            acc.add_product(e, &lift[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let small = linalg::nullspace(&rows, free.len(), &zero);
    let basis = small
        .iter()
        .map(|v| {
            lift.iter()
                .map(|l| {
                    let mut acc = zero.clone();
                    for (e, w) in l.iter().zip(v) {
                        if !e.is_zero() && !w.is_zero() {
                            acc.add_product(e, w);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok((basis, free))
}

fn render<F: Debug>(m: Vec<Vec<F>>, show: impl Fn(&F) -> String) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(&show).collect()).collect()
}

/// Largest presentation for which the exact computation is attempted.
const EXACT_LIMIT: usize = 16;

/// Builds a corresponding system of j-derivations for `τ̄` over `C`.
/// The computation is exact over the field of the free generators when the
/// presentation admits a rational parametrization of modest size, and runs
/// at a generic sampled `F_p` point otherwise.
pub fn corresponding_system(a: &Analysis, tau: &[usize], c: &[usize]) -> Result<DerivationSystem, DerivationError> {
    let p = &a.presentation;
    let n = p.num_generators();
    let names = |ix: &[usize]| ix.iter().map(|&i| p.name(i).to_string()).collect::<Vec<_>>();
    let exact = a.layout.is_rational() && n <= EXACT_LIMIT;
    let (matrix, complement, spanning, field) = if exact {
        let zero = RationalFunction::constant(p.vars.clone(), 0.into());
        let (basis, free) = exact_family(a, c)?;
        let (m, comp) = normalize_family(&basis, tau, &zero)?;
        (
            render(m, |f| f.to_string()),
            render(comp, |f| f.to_string()),
            basis.len(),
            format!("Q({})", names(&free).join(",")),
        )
    } else {
        let rows = covector_rows(p, &a.points()[a.generic_sample(c, true)], c, &Fp::ZERO, true);
        let basis = linalg::nullspace(&rows, n, &Fp::ZERO);
        let (m, comp) = normalize_family(&basis, tau, &Fp::ZERO)?;
        let show = |f: &Fp| f.value().to_string();
        (render(m, show), render(comp, show), basis.len(), "F_p".to_string())
    };
    Ok(DerivationSystem {
        tau: names(tau),
        generators: names(&(0..n).collect::<Vec<_>>()),
        over: names(c),
        field,
        exact,
        matrix,
        complement,
        spanning,
        seed: a.seed,
    })
}

/// Number of independent derivations found by the spanning step, for
/// plain derivations (`xi = false`) or j-derivations.
pub fn spanning_family_size(a: &Analysis, c: &[usize], xi: bool) -> usize {
    let rows = a.relation_rows(a.generic_sample(c, xi), c, xi);
    linalg::nullspace(&rows, a.num_generators(), &Fp::ZERO).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivations::DEFAULT_SEED;
    use crate::exactnum::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn diagonal_and_unipotent() {
        let raw = vec![vec![q(2, 1), q(0, 1)], vec![q(0, 1), q(3, 1)]];
        assert_eq!(
            kronecker_normalize(&raw).unwrap(),
            vec![vec![q(1, 2), q(0, 1)], vec![q(0, 1), q(1, 3)]]
        );
        let raw = vec![vec![q(1, 1), q(1, 1)], vec![q(0, 1), q(1, 1)]];
        assert_eq!(
            kronecker_normalize(&raw).unwrap(),
            vec![vec![q(1, 1), q(-1, 1)], vec![q(0, 1), q(1, 1)]]
        );
        let singular = vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]];
        assert_eq!(kronecker_normalize(&singular), Err(DerivationError::SingularSystem));
    }

    #[test]
    fn exact_system_on_generic_point() {
        let a = Analysis::from_json(
            r#"{"generators": ["z", "j0", "j1", "j2", "t"], "jpoints": [{"z": "z", "j0": "j0", "j1": "j1", "j2": "j2"}]}"#,
            DEFAULT_SEED,
        )
        .unwrap();
        let s = corresponding_system(&a, &[0, 4], &[]).unwrap();
        assert!(s.exact);
        assert_eq!(s.spanning, 2);
        assert_eq!(s.matrix[0][0], "1");
        assert_eq!(s.matrix[0][4], "0");
        assert_eq!(s.matrix[1][0], "0");
        assert_eq!(s.matrix[1][4], "1");
        assert_eq!(s.matrix[0][1], "j1");
        assert!(s.complement.is_empty());
    }

    #[test]
    fn hidden_relation_is_singular() {
        let a = Analysis::from_json(r#"{"generators": ["t", "u"], "relations": ["u - t^2"]}"#, DEFAULT_SEED).unwrap();
        assert_eq!(corresponding_system(&a, &[0, 1], &[]), Err(DerivationError::SingularSystem));
    }

    #[test]
    fn complement_vanishes_on_tau() {
        let a = Analysis::from_json(r#"{"generators": ["t", "u", "v"], "relations": ["v - t*u"]}"#, DEFAULT_SEED).unwrap();
        let s = corresponding_system(&a, &[2], &[]).unwrap();
        assert_eq!(s.spanning, 2);
        assert_eq!(s.complement.len(), 1);
        assert_eq!(s.complement[0][2], "0");
        assert_eq!(spanning_family_size(&a, &[], false), a.omega_dimension(&[]));
    }
}
