#![allow(dead_code)]

use jfield_core::derivations::{Analysis, DEFAULT_SEED};
use jfield_core::exactnum::{Field, Fp, Rational};

pub fn rank<F: Field>(mut m: Vec<Vec<F>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inverse().unwrap();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].times(&inv);
                for k in c..cols {
                    let v = m[i][k].minus(&f.times(&m[r][k]));
                    m[i][k] = v;
                }
            }
        }
        r += 1;
    }
    r
}

/// A tower: `k` free generators, then generators fixed by `y − P` or
/// `y² − P²` with `P` a polynomial in earlier generators.
#[derive(Debug, Clone)]
pub struct Tower {
    pub free: usize,
    pub dependent: Vec<(bool, Vec<(i64, usize, usize)>)>,
}

impl Tower {
    pub fn names(&self) -> Vec<String> {
        (0..self.free)
            .map(|i| format!("x{i}"))
            .chain((0..self.dependent.len()).map(|i| format!("y{i}")))
            .collect()
    }

    /// `P` as text; a factor index equal to the number of available
    /// generators stands for the constant 1.
    pub fn poly(&self, i: usize) -> String {
        let names = self.names();
        let avail = self.free + i;
        self.dependent[i]
            .1
            .iter()
            .map(|&(c, a, b)| {
                if b >= avail {
                    format!("({c})*{}", names[a])
                } else {
                    format!("({c})*{}*{}", names[a], names[b])
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn json(&self) -> String {
        let names = self.names();
        let rels: Vec<String> = (0..self.dependent.len())
            .map(|i| {
                let y = &names[self.free + i];
                let p = self.poly(i);
                if self.dependent[i].0 {
                    format!("\"{y}^2 - ({p})^2\"")
                } else {
                    format!("\"{y} - ({p})\"")
                }
            })
            .collect();
        format!(
            "{{\"generators\": [{}], \"relations\": [{}]}}",
            names.iter().map(|n| format!("\"{n}\"")).collect::<Vec<_>>().join(", "),
            rels.join(", ")
        )
    }

    /// The Jacobian at `point(seed)` has full rank exactly when no squared
    /// relation has `P = 0` there.
    pub fn smooth_at(&self, seed: i64) -> bool {
        let x = self.point(seed);
        self.dependent.iter().enumerate().all(|(i, (squared, _))| !*squared || !x[self.free + i].is_zero())
    }

    /// A rational point with the free generators at `seed`-dependent values.
    pub fn point(&self, seed: i64) -> Vec<Rational> {
        let mut x: Vec<Rational> = (0..self.free).map(|i| Rational::new(seed * 7 + 3 * i as i64 + 2, 5 + i as i64)).collect();
        for (i, (_, terms)) in self.dependent.iter().enumerate() {
            let avail = self.free + i;
            let mut v = Rational::zero();
            for &(c, a, b) in terms {
                let f = if b >= avail { Rational::one() } else { x[b].clone() };
                v = &v + &(&(&Rational::from(c) * &x[a]) * &f);
            }
            x.push(v);
        }
        x
    }
}

/// Three j-points `z1, z2, z3` joined by optional orbits `z1 → z2`,
/// `z2 → z3`, with an optional constant value of `j(z1)`.
#[derive(Debug, Clone)]
pub struct Config {
    pub links: [u8; 2],
    pub constant: bool,
    pub extra: bool,
}

pub const MATRICES: [Option<[&str; 4]>; 4] = [None, Some(["2", "0", "0", "1"]), Some(["1", "1", "0", "1"]), Some(["0", "-1", "1", "0"])];

impl Config {
    pub fn json(&self) -> String {
        let mut gens = Vec::new();
        let mut jps = Vec::new();
        for i in 1..=3 {
            let n: Vec<String> = ["z", "a", "b", "c"].iter().map(|p| format!("{p}{i}")).collect();
            jps.push(format!(
                "{{\"z\": \"{}\", \"j0\": \"{}\", \"j1\": \"{}\", \"j2\": \"{}\"}}",
                n[0], n[1], n[2], n[3]
            ));
            gens.extend(n);
        }
        if self.extra {
            gens.push("t".into());
        }
        let mut orbits = Vec::new();
        for (k, &l) in self.links.iter().enumerate() {
            if let Some(m) = MATRICES[l as usize] {
                orbits.push(format!(
                    "{{\"g\": [\"{}\", \"{}\", \"{}\", \"{}\"], \"src\": \"z{}\", \"dst\": \"z{}\", \"derived_orders\": [1, 2, 3]}}",
                    m[0],
                    m[1],
                    m[2],
                    m[3],
                    k + 1,
                    k + 2
                ));
            }
        }
        let rels = if self.constant { "[\"a1 - 7\"]" } else { "[]" };
        format!(
            "{{\"generators\": [{}], \"relations\": {rels}, \"jpoints\": [{}], \"orbits\": [{}]}}",
            gens.iter().map(|g| format!("\"{g}\"")).collect::<Vec<_>>().join(", "),
            jps.join(", "),
            orbits.join(", ")
        )
    }

    /// `dim^g(A/C)` from the declared links, counted by hand.
    pub fn dim_g(&self, a: &[usize], c: &[usize]) -> usize {
        let class = |p: usize| -> usize {
            let mut root = p;
            while root > 0 && self.links[root - 1] != 0 {
                root -= 1;
            }
            root
        };
        let blocked: Vec<usize> = c.iter().map(|&p| class(p)).collect();
        let mut classes: Vec<usize> = a.iter().map(|&p| class(p)).filter(|k| !blocked.contains(k)).collect();
        classes.sort_unstable();
        classes.dedup();
        classes.len()
    }
}


pub fn analysis(c: &Config) -> Analysis {
    Analysis::from_json(&c.json(), DEFAULT_SEED).unwrap()
}

/// `t.d.(S/T)` recomputed from the sampled points with a local elimination.
pub fn brute_td(a: &Analysis, s: &[usize], t: &[usize]) -> usize {
    let n = a.num_generators();
    let rank_with = |units: &[usize]| {
        a.points()
            .iter()
            .map(|x| {
                let mut rows: Vec<Vec<Fp>> = a
                    .presentation
                    .relations
                    .iter()
                    .map(|r| {
                        let mut row = vec![Fp::ZERO; n];
                        for v in r.poly.support() {
                            row[v] = r.poly.derivative(v).eval(x).unwrap();
                        }
                        row
                    })
                    .collect();
                for &u in units {
                    let mut row = vec![Fp::ZERO; n];
                    row[u] = Fp::ONE;
                    rows.push(row);
                }
                rank(rows)
            })
            .max()
            .unwrap()
    };
    let all: Vec<usize> = t.iter().chain(s).copied().collect();
    rank_with(&all) - rank_with(t)
}

/// Generators `z_i, j, j′, j″` of the listed points (0-based).
pub fn jets(a: &Analysis, pts: &[usize]) -> Vec<usize> {
    a.jets(&zs(a, pts))
}

pub fn zs(a: &Analysis, pts: &[usize]) -> Vec<usize> {
    pts.iter().map(|&p| a.presentation.jpoints[p].z).collect()
}

pub fn brute_delta(a: &Analysis, cfg: &Config, pts: &[usize], over: &[usize]) -> i64 {
    let over_gens = zs(a, over);
    let mut base = over_gens.clone();
    base.extend(jets(a, over));
    brute_td(a, &jets(a, pts), &base) as i64 - 3 * cfg.dim_g(pts, over) as i64
}

pub fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..1u32 << n).map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
}
