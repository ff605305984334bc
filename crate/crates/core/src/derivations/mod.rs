//! Formal derivation spaces on finitely presented j-field data.
//!
//! A [`Presentation`] lists generators, polynomial relations among them,
//! a set of constants, j-points `(z, j, j′, j″, j‴)` and orbit relations
//! `dst = g·src`. Everything downstream is linear algebra on covectors:
//! the Jacobian rows of the relations span the kernel of `K^n → Ω(K/ℚ)`,
//! unit rows kill the constants, and each j-point adds the three rows
//! `d j − j′ dz`, `d j′ − j″ dz`, `d j″ − j‴ dz` that cut `Ξ` out of `Ω`.
//!
//! Ranks are taken at points of the presented variety over `F_p`
//! (`p = 2^61 − 1`) found by solving the relations in a triangular order;
//! when every solving step is linear, the same computation also runs
//! exactly over the rational function field of the free generators.

mod reports;
mod spaces;
mod special;
mod system;

pub use reports::{
    delta, essential_candidate_check, main_inequality_report, schanuel_report, DeltaReport, EssentialOutcome,
    Hypothesis, MainReport, SchanuelReport,
};
pub use spaces::{Analysis, JclOracle, DEFAULT_SEED};
pub use special::{Layout, SolveStep};
pub use system::{corresponding_system, kronecker_normalize, spanning_family_size, DerivationSystem};

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::parse::{parse_poly, parse_rational_function};
use crate::exactnum::{vars_of, MultiPoly, PolyRecord, Rational, RationalFunction, Vars};
use crate::modpoly::{derived_relation, ModPolyError};
use crate::moebius::{primitive_form, RatMatrix2};
use crate::qseries::daleth_form;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DerivationError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("generator {0:?} declared twice")]
    DuplicateGenerator(String),
    #[error("invalid j-point: {0}")]
    InvalidJPoint(String),
    #[error("invalid orbit relation: {0}")]
    InvalidOrbit(String),
    #[error("no consistent specialization found: {0}")]
    SpecializationFailure(String),
    #[error("the presentation needs a nonlinear solving step, so no exact parametrization exists")]
    NotRational,
    #[error("derivation matrix is singular")]
    SingularSystem,
    #[error("hypothesis not certified: {0}")]
    HypothesisUncertified(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error(transparent)]
    ModPoly(#[from] ModPolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum J3Mode {
    #[default]
    Daleth,
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JPointSpec {
    pub z: String,
    pub j0: String,
    pub j1: String,
    pub j2: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j3: Option<String>,
    #[serde(default)]
    pub j3_mode: J3Mode,
}

fn default_orders() -> Vec<u32> {
    vec![1, 2, 3]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSpec {
    pub g: [String; 4],
    pub src: String,
    pub dst: String,
    #[serde(default = "default_orders")]
    pub derived_orders: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelationSpec {
    Text(String),
    Terms(Vec<PolyRecord>),
}

/// The JSON form of a presentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PresentationSpec {
    pub generators: Vec<String>,
    #[serde(default)]
    pub relations: Vec<RelationSpec>,
    #[serde(default)]
    pub constants: Vec<String>,
    #[serde(default)]
    pub jpoints: Vec<JPointSpec>,
    #[serde(default)]
    pub orbits: Vec<OrbitSpec>,
}

/// Generator indices of one j-point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JPoint {
    pub z: usize,
    pub j: [usize; 4],
    pub mode: J3Mode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    /// Matrix entries cleared of denominators; rational iff `level` is set.
    pub g: [MultiPoly; 4],
    pub src: usize,
    pub dst: usize,
    /// `N(g)` for matrices over ℚ.
    pub level: Option<u32>,
    pub orders: Vec<u32>,
}

impl Orbit {
    /// Largest absolute entry of the primitive integral form, for matrices over ℚ.
    pub fn height(&self) -> Option<u64> {
        use num_traits::{Signed, ToPrimitive};
        self.level?;
        self.g
            .iter()
            .map(|e| {
                let v = e.constant_value().unwrap_or_else(Rational::zero);
                v.numer().abs().to_u64()
            })
            .try_fold(0u64, |acc, h| h.map(|h| acc.max(h)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RelationKind {
    User,
    Orbit,
    Daleth,
}

/// Where a relation came from, with the generator it is preferably solved for.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub poly: MultiPoly,
    pub origin: String,
    pub kind: RelationKind,
    pub prefer: Option<usize>,
}

/// A validated presentation. Generators named `j3` in daleth mode are
/// added automatically when a j-point leaves `j‴` implicit.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub vars: Vars,
    pub relations: Vec<Relation>,
    pub constants: Vec<usize>,
    pub jpoints: Vec<JPoint>,
    pub orbits: Vec<Orbit>,
    pub spec: PresentationSpec,
}

impl Presentation {
    pub fn from_json(s: &str) -> Result<Self, DerivationError> {
        let spec: PresentationSpec = serde_json::from_str(s).map_err(|e| DerivationError::Parse(e.to_string()))?;
        Self::new(spec)
    }

    pub fn new(spec: PresentationSpec) -> Result<Self, DerivationError> {
        let mut names = spec.generators.clone();
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.clone()) {
                return Err(DerivationError::DuplicateGenerator(n.clone()));
            }
        }
        for jp in &spec.jpoints {
            if jp.j3.is_none() {
                if jp.j3_mode == J3Mode::Free {
                    return Err(DerivationError::InvalidJPoint(format!(
                        "j-point {} has a free j3 but names none",
                        jp.z
                    )));
                }
                let fresh = format!("j3[{}]", jp.z);
                if !seen.insert(fresh.clone()) {
                    return Err(DerivationError::DuplicateGenerator(fresh));
                }
                names.push(fresh);
            }
        }
        let vars = vars_of(&names);
        let index = |n: &str| {
            vars.iter()
                .position(|v| v == n)
                .ok_or_else(|| DerivationError::UnknownGenerator(n.to_string()))
        };

        let mut relations = Vec::new();
        for (k, r) in spec.relations.iter().enumerate() {
            let poly = match r {
                RelationSpec::Text(s) => parse_poly(s, &vars).map_err(|e| DerivationError::Parse(e.to_string()))?,
                RelationSpec::Terms(t) => {
                    let sub = vars_of(&spec.generators);
                    MultiPoly::from_records(sub, t)
                        .and_then(|p| p.embed(&vars))
                        .map_err(|e| DerivationError::Parse(e.to_string()))?
                }
            };
            relations.push(Relation {
                poly,
                origin: format!("relation {k}"),
                kind: RelationKind::User,
                prefer: None,
            });
        }

        let constants = spec.constants.iter().map(|c| index(c)).collect::<Result<Vec<_>, _>>()?;

        let mut jpoints = Vec::new();
        for jp in &spec.jpoints {
            let j3 = match &jp.j3 {
                Some(n) => index(n)?,
                None => index(&format!("j3[{}]", jp.z))?,
            };
            let p = JPoint {
                z: index(&jp.z)?,
                j: [index(&jp.j0)?, index(&jp.j1)?, index(&jp.j2)?, j3],
                mode: jp.j3_mode,
            };
            let mut ids = vec![p.z];
            ids.extend(p.j);
            let distinct: HashSet<_> = ids.iter().collect();
            if distinct.len() != 5 {
                return Err(DerivationError::InvalidJPoint(format!(
                    "j-point {} reuses a generator",
                    jp.z
                )));
            }
            if jpoints.iter().any(|q: &JPoint| q.z == p.z) {
                return Err(DerivationError::InvalidJPoint(format!("j-point {} declared twice", jp.z)));
            }
            if p.mode == J3Mode::Daleth {
                relations.push(Relation {
                    poly: substitute(&daleth_form().numerator, &vars, &p.j),
                    origin: format!("daleth({})", jp.z),
                    kind: RelationKind::Daleth,
                    prefer: Some(j3),
                });
            }
            jpoints.push(p);
        }

        let jpoint_of = |n: &str| -> Result<usize, DerivationError> {
            let i = index(n)?;
            jpoints
                .iter()
                .position(|p| p.z == i)
                .ok_or_else(|| DerivationError::InvalidOrbit(format!("{n} is not a j-point")))
        };
        let mut orbits = Vec::new();
        for o in &spec.orbits {
            let (s, d) = (jpoint_of(&o.src)?, jpoint_of(&o.dst)?);
            let entries: Vec<RationalFunction> = o
                .g
                .iter()
                .map(|e| parse_rational_function(e, &vars).map_err(|e| DerivationError::Parse(e.to_string())))
                .collect::<Result<_, _>>()?;
            let det = entries[0].mul(&entries[3]).sub(&entries[1].mul(&entries[2]));
            if det.is_zero() {
                return Err(DerivationError::InvalidOrbit(format!("{} -> {}: singular matrix", o.src, o.dst)));
            }
            let rational: Option<Vec<Rational>> = entries.iter().map(|e| e.constant_value()).collect();
            let (g, level) = match rational {
                Some(r) => {
                    let m = RatMatrix2::new(r[0].clone(), r[1].clone(), r[2].clone(), r[3].clone());
                    let p = primitive_form(&m);
                    let ints = p.to_matrix();
                    let g = ints.entries().map(|e| MultiPoly::constant(vars.clone(), e.clone()));
                    (g, Some(p.n() as u32))
                }
                None => (clear_denominators(&entries), None),
            };
            for &k in &o.derived_orders {
                if !(1..=3).contains(&k) {
                    return Err(DerivationError::InvalidOrbit(format!("derived order {k}")));
                }
            }
            let orbit = Orbit {
                g,
                src: s,
                dst: d,
                level,
                orders: if level.is_some() { o.derived_orders.clone() } else { Vec::new() },
            };
            relations.extend(orbit_relations(&orbit, &jpoints, &vars, &format!("{}->{}", o.src, o.dst))?);
            orbits.push(orbit);
        }

        Ok(Presentation {
            vars,
            relations,
            constants,
            jpoints,
            orbits,
            spec,
        })
    }

    pub fn num_generators(&self) -> usize {
        self.vars.len()
    }

    pub fn index(&self, name: &str) -> Result<usize, DerivationError> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| DerivationError::UnknownGenerator(name.to_string()))
    }

    pub fn indices(&self, names: &[String]) -> Result<Vec<usize>, DerivationError> {
        names.iter().map(|n| self.index(n)).collect()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.vars[i]
    }

    /// The j-point whose `z` is generator `i`.
    pub fn jpoint_at(&self, i: usize) -> Option<&JPoint> {
        self.jpoints.iter().find(|p| p.z == i)
    }

    pub fn jpoint_named(&self, name: &str) -> Result<&JPoint, DerivationError> {
        let i = self.index(name)?;
        self.jpoint_at(i)
            .ok_or_else(|| DerivationError::InvalidJPoint(format!("{name} is not a j-point")))
    }

    /// Orbit classes of j-points under the declared orbit relations whose
    /// matrices lie in `GL₂(F)`, with `F = ℚ(base)`. Returns a class label
    /// per j-point.
    pub fn orbit_classes(&self, base: &[usize]) -> Vec<usize> {
        let n = self.jpoints.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let next = p[c];
                p[c] = r;
                c = next;
            }
            r
        }
        for o in &self.orbits {
            let inside = o
                .g
                .iter()
                .all(|e| e.support().iter().all(|v| base.contains(v)));
            if inside {
                let (a, b) = (find(&mut parent, o.src), find(&mut parent, o.dst));
                parent[a] = b;
            }
        }
        (0..n).map(|i| find(&mut parent, i)).collect()
    }

    /// `dim^g_F(z̄ / B)` on declared data: orbit classes among `zs` that avoid
    /// the classes of the j-points lying in `over`.
    pub fn gcl_dim(&self, zs: &[usize], over: &[usize], base: &[usize]) -> usize {
        let classes = self.orbit_classes(base);
        let class_of = |g: usize| self.jpoints.iter().position(|p| p.z == g).map(|k| classes[k]);
        let blocked: HashSet<usize> = over.iter().filter_map(|&g| class_of(g)).collect();
        let mut counted = HashSet::new();
        for &z in zs {
            if let Some(c) = class_of(z) {
                if !blocked.contains(&c) {
                    counted.insert(c);
                }
            }
        }
        counted.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.spec).expect("presentation serializes")
    }

    pub fn relation_summary(&self) -> BTreeMap<String, String> {
        self.relations
            .iter()
            .map(|r| (r.origin.clone(), r.poly.to_string()))
            .collect()
    }
}

/// `p(X, Y, Z, W)` with the variables replaced by the given generators.
fn substitute(p: &MultiPoly, vars: &Vars, gens: &[usize]) -> MultiPoly {
    let images: Vec<MultiPoly> = gens.iter().map(|&g| MultiPoly::var(vars.clone(), g)).collect();
    p.compose(&images)
}

fn clear_denominators(entries: &[RationalFunction]) -> [MultiPoly; 4] {
    std::array::from_fn(|k| {
        let mut p = entries[k].numer().clone();
        for (i, e) in entries.iter().enumerate() {
            if i != k {
                p = p.mul(e.denom());
            }
        }
        p
    })
}

fn orbit_relations(
    o: &Orbit,
    jpoints: &[JPoint],
    vars: &Vars,
    label: &str,
) -> Result<Vec<Relation>, DerivationError> {
    let (s, d) = (jpoints[o.src], jpoints[o.dst]);
    let var = |i| MultiPoly::var(vars.clone(), i);
    let [a, b, c, dd] = &o.g;
    let zs = var(s.z);
    let zrel = c.mul(&zs).add(dd).mul(&var(d.z)).sub(&a.mul(&zs).add(b));
    let mut out = vec![Relation {
        poly: zrel,
        origin: format!("orbit {label}: z"),
        kind: RelationKind::Orbit,
        prefer: Some(d.z),
    }];
    let Some(level) = o.level else {
        return Ok(out);
    };
    let phi = crate::modpoly::build_modular_polynomial(level)?;
    let phi_poly = {
        let mut p = MultiPoly::zero(vars.clone());
        for (&(i, k), coeff) in phi.poly.terms() {
            let term = var(s.j[0])
                .pow(i)
                .mul(&var(d.j[0]).pow(k))
                .scale(&Rational::from(coeff.clone()));
            p = p.add(&term);
        }
        p
    };
    out.push(Relation {
        poly: phi_poly,
        origin: format!("orbit {label}: Phi_{level}"),
        kind: RelationKind::Orbit,
        prefer: Some(d.j[0]),
    });
    let mut images: Vec<MultiPoly> = s.j.iter().map(|&i| var(i)).collect();
    images.extend(d.j.iter().map(|&i| var(i)));
    images.extend(o.g.iter().cloned());
    images.push(var(s.z));
    for &k in &o.orders {
        let rel = derived_relation(level, k)?;
        out.push(Relation {
            poly: rel.polynomial_form().compose(&images),
            origin: format!("orbit {label}: order {k}"),
            kind: RelationKind::Orbit,
            prefer: Some(d.j[k as usize]),
        });
    }
    Ok(out)
}
