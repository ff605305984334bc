use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Dependence, DependenceOracle, PregeomError};
use crate::exactnum::parse::{identifiers, parse_rational_function};
use crate::exactnum::{vars_of, RationalFunction, Vars};
use crate::moebius::{
    canonical_witness, orbit_decide_exact_over, orbit_decide_numeric, ExactOrbitDecision, NumericOrbitDecision,
    RatMatrix2,
};

/// Group assumption recorded in every report.
pub const ACTIVE_ASSUMPTION: &str = "G^F = GL2(F)";

/// `ℚ` or `ℚ(τ̄)` with the `τ̄` algebraically independent transcendentals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseField {
    Rationals,
    Transcendental(Vec<String>),
}

impl BaseField {
    /// Parses `"Q"` or `"Q(tau, sigma)"`.
    pub fn parse(s: &str) -> Result<Self, PregeomError> {
        let s = s.trim();
        if s == "Q" || s == "ℚ" {
            return Ok(BaseField::Rationals);
        }
        let inner = s
            .strip_prefix("Q(")
            .or_else(|| s.strip_prefix("ℚ("))
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| PregeomError::Config(format!("unrecognized base field {s:?}")))?;
        let gens: Vec<String> = inner
            .split(',')
            .map(|g| g.trim().to_string())
            .filter(|g| !g.is_empty())
            .collect();
        if gens.is_empty() {
            return Ok(BaseField::Rationals);
        }
        Ok(BaseField::Transcendental(gens))
    }

    pub fn generators(&self) -> &[String] {
        match self {
            BaseField::Rationals => &[],
            BaseField::Transcendental(g) => g,
        }
    }
}

impl std::fmt::Display for BaseField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BaseField::Rationals => write!(f, "Q"),
            BaseField::Transcendental(g) => write!(f, "Q({})", g.join(",")),
        }
    }
}

/// A point given either as a rational-function string or as a complex number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Exact(String),
    Numeric { re: f64, im: f64 },
}

impl std::fmt::Display for PointSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PointSpec::Exact(s) => write!(f, "{s}"),
            PointSpec::Numeric { re, im } => write!(f, "{re}{im:+}i"),
        }
    }
}

fn default_height() -> u32 {
    3
}

fn default_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GclConfig {
    pub base: String,
    #[serde(default = "default_height")]
    pub height: u32,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub universe: Vec<PointSpec>,
}

impl GclConfig {
    pub fn new(base: &str) -> Self {
        GclConfig {
            base: base.into(),
            height: default_height(),
            tol: default_tol(),
            universe: Vec::new(),
        }
    }

    pub fn with_height(mut self, h: u32) -> Self {
        self.height = h;
        self
    }

    pub fn with_universe(mut self, u: Vec<PointSpec>) -> Self {
        self.universe = u;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GclPoint {
    Exact(RationalFunction),
    Numeric(Complex64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Caveat {
    Exact,
    Bounded(u32),
}

/// A matrix `g` with `g · (to) = (point)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessRecord {
    pub to: String,
    pub matrix: [String; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimReport {
    pub dim: usize,
    pub basis: Vec<String>,
    pub witnesses: BTreeMap<String, WitnessRecord>,
    pub caveat: Caveat,
    pub base: String,
    pub assumption: String,
}

/// The geodesic closure over `F` on a finite universe: `x ∈ gcl(A)` iff
/// `x = g·a` for some `a ∈ A`, `g ∈ GL₂(F)`.
pub struct GclOracle {
    base: BaseField,
    points: Vec<GclPoint>,
    labels: Vec<String>,
    height: u32,
    tol: f64,
    pairs: Mutex<HashMap<(usize, usize), Option<[String; 4]>>>,
    used_numeric: AtomicBool,
}

impl GclOracle {
    pub fn from_config(cfg: &GclConfig) -> Result<Self, PregeomError> {
        let labels = cfg.universe.iter().map(|p| p.to_string()).collect();
        Self::new(cfg, &cfg.universe, labels)
    }

    /// Builds an oracle over `specs`, parsing all exact points into one
    /// variable context that also holds the base generators.
    pub fn new(cfg: &GclConfig, specs: &[PointSpec], labels: Vec<String>) -> Result<Self, PregeomError> {
        let base = BaseField::parse(&cfg.base)?;
        let exact = specs.iter().filter(|p| matches!(p, PointSpec::Exact(_))).count();
        if exact != 0 && exact != specs.len() {
            return Err(PregeomError::MixedRepresentation);
        }
        if exact < specs.len() && base != BaseField::Rationals {
            return Err(PregeomError::Config(
                "numeric points are supported over Q only".into(),
            ));
        }
        let vars = context(specs, &base)?;
        let points = specs
            .iter()
            .map(|p| match p {
                PointSpec::Exact(s) => parse_rational_function(s, &vars)
                    .map(GclPoint::Exact)
                    .map_err(|e| PregeomError::Parse(e.to_string())),
                PointSpec::Numeric { re, im } => Ok(GclPoint::Numeric(Complex64::new(*re, *im))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GclOracle {
            base,
            points,
            labels,
            height: cfg.height,
            tol: cfg.tol,
            pairs: Mutex::new(HashMap::new()),
            used_numeric: AtomicBool::new(false),
        })
    }

    pub fn points(&self) -> &[GclPoint] {
        &self.points
    }

    pub fn caveat(&self) -> Caveat {
        if self.used_numeric.load(Ordering::Relaxed) {
            Caveat::Bounded(self.height)
        } else {
            Caveat::Exact
        }
    }

    /// A witness `g` with `g·points[y] = points[x]`, if one exists (or is
    /// found within the height bound for numeric points).
    pub fn related(&self, x: usize, y: usize) -> Option<[String; 4]> {
        if let Some(v) = self.pairs.lock().unwrap().get(&(x, y)) {
            return v.clone();
        }
        let v = self.compute_related(x, y);
        self.pairs.lock().unwrap().insert((x, y), v.clone());
        v
    }

    fn compute_related(&self, x: usize, y: usize) -> Option<[String; 4]> {
        if x == y {
            return Some(matrix_strings(&RatMatrix2::identity()));
        }
        match (&self.points[x], &self.points[y]) {
            (GclPoint::Exact(fx), GclPoint::Exact(fy)) => {
                let decision = orbit_decide_exact_over(fx, fy, self.base.generators())
                    .expect("points share one variable context");
                match decision {
                    ExactOrbitDecision::Dependent(w) => Some(exact_witness_strings(&w)),
                    ExactOrbitDecision::Independent => None,
                }
            }
            (GclPoint::Numeric(zx), GclPoint::Numeric(zy)) => {
                self.used_numeric.store(true, Ordering::Relaxed);
                match orbit_decide_numeric(*zy, *zx, self.height, self.tol) {
                    NumericOrbitDecision::Dependent(g) => Some(matrix_strings(&g)),
                    NumericOrbitDecision::IndependentUpTo(_) => None,
                }
            }
            _ => unreachable!("mixed universes are rejected at construction"),
        }
    }
}

fn context(specs: &[PointSpec], base: &BaseField) -> Result<Vars, PregeomError> {
    let mut names: BTreeSet<String> = base.generators().iter().cloned().collect();
    for p in specs {
        if let PointSpec::Exact(s) = p {
            names.extend(identifiers(s).map_err(|e| PregeomError::Parse(e.to_string()))?);
        }
    }
    let names: Vec<String> = names.into_iter().collect();
    Ok(vars_of(&names))
}

fn matrix_strings(g: &RatMatrix2) -> [String; 4] {
    g.entries().map(|e| e.to_string())
}

fn exact_witness_strings(w: &[RationalFunction; 4]) -> [String; 4] {
    let consts: Option<Vec<_>> = w.iter().map(|e| e.constant_value()).collect();
    match consts {
        Some(c) => {
            let [a, b, cc, d]: [_; 4] = c.try_into().expect("four entries");
            matrix_strings(&canonical_witness(&RatMatrix2::new(a, b, cc, d)))
        }
        None => w.each_ref().map(|e| e.to_string()),
    }
}

impl DependenceOracle for GclOracle {
    fn universe_size(&self) -> usize {
        self.points.len()
    }

    fn decide(&self, x: usize, set: &[usize]) -> Dependence {
        for &a in set {
            if let Some(w) = self.related(x, a) {
                return Dependence::Dependent(format!("[[{}, {}], [{}, {}]] · {}", w[0], w[1], w[2], w[3], self.labels[a]));
            }
        }
        match self.caveat() {
            Caveat::Exact => Dependence::Independent,
            Caveat::Bounded(h) => Dependence::IndependentUpTo(h),
        }
    }

    fn label(&self, x: usize) -> String {
        self.labels[x].clone()
    }
}

/// `dim^g_F(points / over)`: a greedy orbit partition of `points`, counting
/// only orbits that avoid every orbit of `over`.
pub fn gcl_dimension(points: &[PointSpec], over: &[PointSpec], cfg: &GclConfig) -> Result<DimReport, PregeomError> {
    let specs: Vec<PointSpec> = points.iter().chain(over).cloned().collect();
    let ids: Vec<String> = (0..points.len())
        .map(|i| format!("p{i}"))
        .chain((0..over.len()).map(|i| format!("b{i}")))
        .collect();
    let oracle = GclOracle::new(cfg, &specs, ids.clone())?;
    let b_range = points.len()..specs.len();
    let mut basis: Vec<usize> = Vec::new();
    let mut witnesses = BTreeMap::new();
    for i in 0..points.len() {
        let hit = b_range
            .clone()
            .chain(basis.iter().copied())
            .find_map(|k| oracle.related(i, k).map(|w| (k, w)));
        match hit {
            Some((k, w)) => {
                witnesses.insert(
                    ids[i].clone(),
                    WitnessRecord {
                        to: ids[k].clone(),
                        matrix: w,
                    },
                );
            }
            None => basis.push(i),
        }
    }
    Ok(DimReport {
        dim: basis.len(),
        basis: basis.iter().map(|&i| ids[i].clone()).collect(),
        witnesses,
        caveat: oracle.caveat(),
        base: BaseField::parse(&cfg.base)?.to_string(),
        assumption: ACTIVE_ASSUMPTION.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pregeom::pregeometry_property_suite;

    fn ex(s: &[&str]) -> Vec<PointSpec> {
        s.iter().map(|p| PointSpec::Exact(p.to_string())).collect()
    }

    #[test]
    fn numeric_orbit_example() {
        let pts = vec![
            PointSpec::Numeric { re: 1.0, im: 1.0 },
            PointSpec::Numeric { re: 2.0, im: 1.0 },
            PointSpec::Numeric { re: 0.0, im: 2.0 },
        ];
        let r = gcl_dimension(&pts, &[], &GclConfig::new("Q")).unwrap();
        assert_eq!(r.dim, 1);
        assert_eq!(r.basis, vec!["p0"]);
        assert_eq!(r.caveat, Caveat::Bounded(3));
        assert_eq!(r.witnesses["p1"].to, "p0");
    }

    #[test]
    fn function_field_examples() {
        let r = gcl_dimension(&ex(&["t", "t^2"]), &[], &GclConfig::new("Q")).unwrap();
        assert_eq!((r.dim, r.caveat), (2, Caveat::Exact));

        let r = gcl_dimension(&ex(&["t"]), &ex(&["(t+1)/(t-1)"]), &GclConfig::new("Q")).unwrap();
        assert_eq!(r.dim, 0);
        assert_eq!(r.witnesses["p0"].matrix, ["1", "1", "1", "-1"].map(String::from));
    }

    #[test]
    fn mixed_points_are_rejected() {
        let pts = vec![PointSpec::Exact("t".into()), PointSpec::Numeric { re: 0.0, im: 1.0 }];
        assert_eq!(
            gcl_dimension(&pts, &[], &GclConfig::new("Q")).unwrap_err(),
            PregeomError::MixedRepresentation
        );
    }

    #[test]
    fn base_field_points_collapse() {
        let cfg = GclConfig::new("Q(tau)");
        let r = gcl_dimension(&ex(&["tau", "tau^2 + 1", "3"]), &[], &cfg).unwrap();
        assert_eq!(r.dim, 1);
        let r = gcl_dimension(&ex(&["t", "tau*t"]), &[], &cfg).unwrap();
        assert_eq!(r.dim, 1);
        let r = gcl_dimension(&ex(&["t", "tau*t"]), &[], &GclConfig::new("Q")).unwrap();
        assert_eq!(r.dim, 2);
    }

    #[test]
    fn exact_gcl_is_a_pregeometry() {
        let cfg = GclConfig::new("Q").with_universe(ex(&["t", "t+1", "t^2", "s"]));
        let oracle = GclOracle::from_config(&cfg).unwrap();
        let r = pregeometry_property_suite(&oracle, 4);
        assert!(r.all_passed(), "{r:?}");
    }

    #[test]
    fn base_field_parsing() {
        assert_eq!(BaseField::parse("Q").unwrap(), BaseField::Rationals);
        assert_eq!(
            BaseField::parse("Q(tau, sigma)").unwrap(),
            BaseField::Transcendental(vec!["tau".into(), "sigma".into()])
        );
        assert!(BaseField::parse("R").is_err());
    }
}
