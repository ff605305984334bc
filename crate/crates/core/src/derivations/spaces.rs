use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DerivationError, Layout, Presentation};
use crate::exactnum::{linalg, Fp, MultiPoly};
use crate::pregeom::{Dependence, DependenceOracle};

pub const DEFAULT_SEED: u64 = 0x6a5f_6465_7269_76;
const SAMPLE_POINTS: usize = 3;
const ATTEMPTS: usize = 64;

/// Ranks of the covector systems attached to a presentation, measured at
/// a few independent points of the presented variety over `F_p`. Every
/// reported rank is the largest one seen, which is the generic rank
/// unless all points landed on a proper subvariety.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub presentation: Presentation,
    pub layout: Layout,
    pub seed: u64,
    points: Vec<Vec<Fp>>,
    jacobians: Vec<Vec<Vec<Fp>>>,
}

impl Analysis {
    pub fn new(presentation: Presentation, seed: u64) -> Result<Self, DerivationError> {
        let layout = Layout::new(&presentation);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gradients: Vec<Vec<(usize, MultiPoly)>> = presentation
            .relations
            .iter()
            .map(|r| r.poly.support().into_iter().map(|v| (v, r.poly.derivative(v))).collect())
            .collect();
        let n = presentation.num_generators();
        let mut points = Vec::with_capacity(SAMPLE_POINTS);
        let mut jacobians = Vec::with_capacity(SAMPLE_POINTS);
        for _ in 0..SAMPLE_POINTS {
            let x = layout.sample(&presentation, &mut rng, ATTEMPTS)?;
            let rows = gradients
                .iter()
                .map(|grad| {
                    let mut row = vec![Fp::ZERO; n];
                    for (v, d) in grad {
                        row[*v] = d.eval(&x).expect("polynomials evaluate over F_p");
                    }
                    row
                })
                .collect();
            points.push(x);
            jacobians.push(rows);
        }
        Ok(Analysis {
            presentation,
            layout,
            seed,
            points,
            jacobians,
        })
    }

    pub fn from_json(json: &str, seed: u64) -> Result<Self, DerivationError> {
        Self::new(Presentation::from_json(json)?, seed)
    }

    pub fn num_generators(&self) -> usize {
        self.presentation.num_generators()
    }

    pub fn points(&self) -> &[Vec<Fp>] {
        &self.points
    }

    fn unit(&self, i: usize) -> Vec<Fp> {
        let mut row = vec![Fp::ZERO; self.num_generators()];
        row[i] = Fp::ONE;
        row
    }

    /// The three j-derivation covectors of every j-point at point `k`.
    pub(crate) fn xi_rows(&self, k: usize) -> Vec<Vec<Fp>> {
        let x = &self.points[k];
        let mut rows = Vec::new();
        for jp in &self.presentation.jpoints {
            for step in 0..3 {
                let mut row = self.unit(jp.j[step]);
                row[jp.z] = row[jp.z].sub(x[jp.j[step + 1]]);
                rows.push(row);
            }
        }
        rows
    }

    /// Rows of `[J; E_C]`, plus the Ξ rows when `xi` is set, at point `k`.
    pub(crate) fn relation_rows(&self, k: usize, c: &[usize], xi: bool) -> Vec<Vec<Fp>> {
        let mut rows = self.jacobians[k].clone();
        rows.extend(c.iter().map(|&i| self.unit(i)));
        if xi {
            rows.extend(self.xi_rows(k));
        }
        rows
    }

    /// Index of the sampled point where the relation rows over `C` reach
    /// their generic rank.
    pub(crate) fn generic_sample(&self, c: &[usize], xi: bool) -> usize {
        (0..self.points.len())
            .max_by_key(|&k| (linalg::rank(&self.relation_rows(k, c, xi)), std::cmp::Reverse(k)))
            .unwrap_or(0)
    }

    fn max_rank(&self, build: impl Fn(usize) -> Vec<Vec<Fp>>) -> usize {
        (0..self.points.len()).map(|k| linalg::rank(&build(k))).max().unwrap_or(0)
    }

    fn rank_with_units(&self, c: &[usize], xi: bool, extra: &[usize]) -> usize {
        self.max_rank(|k| {
            let mut rows = self.relation_rows(k, c, xi);
            rows.extend(extra.iter().map(|&i| self.unit(i)));
            rows
        })
    }

    pub fn jacobian_rank(&self) -> usize {
        self.rank_with_units(&[], false, &[])
    }

    /// `dim Ω(K/C)`.
    pub fn omega_dimension(&self, c: &[usize]) -> usize {
        self.num_generators() - self.rank_with_units(c, false, &[])
    }

    /// `dim Ξ(K/C)`.
    pub fn xi_dimension(&self, c: &[usize]) -> usize {
        self.num_generators() - self.rank_with_units(c, true, &[])
    }

    /// `a ∈ jcl(C)`: the differential of `a` vanishes in `Ξ(K/C)`.
    pub fn jcl_member(&self, a: usize, c: &[usize]) -> bool {
        self.rank_with_units(c, true, &[a]) == self.rank_with_units(c, true, &[])
    }

    pub fn jcl_closure(&self, c: &[usize]) -> Vec<usize> {
        (0..self.num_generators()).filter(|&a| self.jcl_member(a, c)).collect()
    }

    /// A subset `C₀ ⊆ C` with `a ∈ jcl(C₀)`, obtained by dropping elements
    /// of `C` while membership is preserved.
    pub fn finite_support(&self, a: usize, c: &[usize]) -> Option<Vec<usize>> {
        if !self.jcl_member(a, c) {
            return None;
        }
        let mut c0 = c.to_vec();
        let mut i = 0;
        while i < c0.len() {
            let mut smaller = c0.clone();
            smaller.remove(i);
            if self.jcl_member(a, &smaller) {
                c0 = smaller;
            } else {
                i += 1;
            }
        }
        Some(c0)
    }

    /// `dim^j(Z/C)`: the number of independent `dz`, `z ∈ Z`, in `Ξ(K/C)`.
    pub fn dim_j(&self, zs: &[usize], c: &[usize]) -> usize {
        self.rank_with_units(c, true, zs) - self.rank_with_units(c, true, &[])
    }

    /// `t.d.(ℚ(S, T)/ℚ(T))`.
    pub fn td(&self, s: &[usize], t: &[usize]) -> usize {
        let mut all = t.to_vec();
        all.extend_from_slice(s);
        self.rank_with_units(&[], false, &all) - self.rank_with_units(&[], false, t)
    }

    /// Generators of the j-points at `zs`: each `z` followed by `j, j′, j″`.
    pub fn jets(&self, zs: &[usize]) -> Vec<usize> {
        let mut out = Vec::new();
        for &z in zs {
            if let Some(p) = self.presentation.jpoint_at(z) {
                out.extend([p.z, p.j[0], p.j[1], p.j[2]]);
            } else {
                out.push(z);
            }
        }
        out
    }
}

/// `jcl` restricted to a list of generators, as a dependence oracle.
pub struct JclOracle<'a> {
    pub analysis: &'a Analysis,
    pub universe: Vec<usize>,
    pub over: Vec<usize>,
}

impl<'a> JclOracle<'a> {
    pub fn new(analysis: &'a Analysis, universe: Vec<usize>, over: Vec<usize>) -> Self {
        JclOracle { analysis, universe, over }
    }

    pub fn all(analysis: &'a Analysis) -> Self {
        Self::new(analysis, (0..analysis.num_generators()).collect(), Vec::new())
    }
}

impl DependenceOracle for JclOracle<'_> {
    fn universe_size(&self) -> usize {
        self.universe.len()
    }

    fn decide(&self, x: usize, set: &[usize]) -> Dependence {
        let mut c = self.over.clone();
        c.extend(set.iter().map(|&i| self.universe[i]));
        if self.analysis.jcl_member(self.universe[x], &c) {
            Dependence::Dependent("d_j vanishes".into())
        } else {
            Dependence::Independent
        }
    }

    fn label(&self, x: usize) -> String {
        self.analysis.presentation.name(self.universe[x]).to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pregeom::pregeometry_property_suite;

    fn analysis(json: &str) -> Analysis {
        Analysis::from_json(json, DEFAULT_SEED).unwrap()
    }

    const ONE_POINT: &str =
        r#"{"generators": ["z", "j0", "j1", "j2"], "jpoints": [{"z": "z", "j0": "j0", "j1": "j1", "j2": "j2"}]}"#;

    #[test]
    fn omega_examples() {
        let a = analysis(r#"{"generators": ["t1", "t2"]}"#);
        assert_eq!(a.omega_dimension(&[]), 2);
        let a = analysis(r#"{"generators": ["t", "s"], "relations": ["s^2 - t"]}"#);
        assert_eq!(a.omega_dimension(&[]), 1);
        let a = analysis(r#"{"generators": ["t"], "constants": ["t"]}"#);
        assert_eq!(a.omega_dimension(&a.presentation.constants), 0);
    }

    #[test]
    fn generic_point() {
        let a = analysis(ONE_POINT);
        let idx = |n: &str| a.presentation.index(n).unwrap();
        assert_eq!(a.omega_dimension(&[]), 4);
        assert_eq!(a.xi_dimension(&[]), 1);
        assert_eq!(a.xi_dimension(&[idx("z")]), 0);
        assert!(a.jcl_member(idx("j0"), &[idx("z")]));
        assert!(a.jcl_member(idx("z"), &[idx("j2")]));
        assert!(!a.jcl_member(idx("z"), &[]));
        assert_eq!(a.dim_j(&[idx("z")], &[]), 1);
        assert_eq!(a.td(&a.jets(&[idx("z")]), &[]), 4);
    }

    #[test]
    fn fresh_transcendental_is_not_in_closure() {
        let a = analysis(r#"{"generators": ["t", "u"]}"#);
        assert!(!a.jcl_member(0, &[]));
        assert!(!a.jcl_member(0, &[1]));
    }

    #[test]
    fn finite_support_drops_irrelevant_constants() {
        let a = analysis(r#"{"generators": ["z", "j0", "j1", "j2", "t"], "jpoints": [{"z": "z", "j0": "j0", "j1": "j1", "j2": "j2"}]}"#);
        assert_eq!(a.finite_support(1, &[4, 0]), Some(vec![0]));
    }

    #[test]
    fn jcl_passes_the_pregeometry_suite() {
        let a = analysis(r#"{"generators": ["z", "j0", "j1", "j2", "t", "u", "s"],
            "relations": ["s - t*u"],
            "jpoints": [{"z": "z", "j0": "j0", "j1": "j1", "j2": "j2"}]}"#);
        let oracle = JclOracle::all(&a);
        let report = pregeometry_property_suite(&oracle, 3);
        assert!(report.all_passed(), "{:?}", report.failing());
    }
}
