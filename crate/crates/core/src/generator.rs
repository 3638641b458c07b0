//! Seeded random instance generation for experiments and property sweeps.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::money::int;
use crate::network::{Network, NodeId};

/// Graph family. The seller is an ordinary node of the generated graph.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum GeneratorKind {
    /// Every pair of the `n+1` nodes is an edge with probability `p`.
    ErdosRenyi { n: usize, p: f64 },
    /// Ring lattice over `n+1` nodes, `k` nearest neighbours, each edge
    /// rewired with probability `beta`.
    WattsStrogatz { n: usize, k: usize, beta: f64 },
    /// Uniform random tree over `n+1` nodes.
    RandomTree { n: usize },
    /// All `n` buyers adjacent to the seller and nothing else.
    Star { n: usize },
}

/// Valuation distribution; draws are always exact integers.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum ValuationKind {
    UniformInt { lo: i64, hi: i64 },
    /// Exponential with the given scale, rounded to the nearest integer.
    ExpInt { scale: f64 },
}

impl GeneratorKind {
    pub fn buyer_count(&self) -> usize {
        match *self {
            GeneratorKind::ErdosRenyi { n, .. } => n,
            GeneratorKind::WattsStrogatz { n, .. } => n,
            GeneratorKind::RandomTree { n } => n,
            GeneratorKind::Star { n } => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::GeneratorConfig(msg));
        match *self {
            GeneratorKind::ErdosRenyi { n, p } => {
                if n < 1 {
                    return bad("erdos_renyi needs n >= 1".into());
                }
                if !(0.0..=1.0).contains(&p) {
                    return bad(format!("edge probability {p} outside [0, 1]"));
                }
            }
            GeneratorKind::WattsStrogatz { n, k, beta } => {
                if n < 1 {
                    return bad("watts_strogatz needs n >= 1".into());
                }
                if k == 0 || k % 2 != 0 || k > n {
                    return bad(format!(
                        "watts_strogatz needs an even 0 < k <= n, got k={k}, n={n}"
                    ));
                }
                if !(0.0..=1.0).contains(&beta) {
                    return bad(format!("rewiring probability {beta} outside [0, 1]"));
                }
            }
            GeneratorKind::RandomTree { n } | GeneratorKind::Star { n } => {
                if n < 1 {
                    return bad("generator needs n >= 1".into());
                }
            }
        }
        Ok(())
    }
}

impl ValuationKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ValuationKind::UniformInt { lo, hi } => {
                if lo < 0 || hi < lo {
                    return Err(Error::GeneratorConfig(format!(
                        "uniform_int needs 0 <= lo <= hi, got {lo}..{hi}"
                    )));
                }
            }
            ValuationKind::ExpInt { scale } => {
                if !scale.is_finite() || scale <= 0.0 {
                    return Err(Error::GeneratorConfig(format!(
                        "exp_int needs a positive finite scale, got {scale}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> i64 {
        match *self {
            ValuationKind::UniformInt { lo, hi } => rng.gen_range(lo..=hi),
            ValuationKind::ExpInt { scale } => {
                let u: f64 = rng.gen();
                (-scale * (1.0 - u).ln()).round().max(0.0) as i64
            }
        }
    }
}

/// Generates a network: graph structure first, then one valuation per
/// buyer, all from a single seeded stream.
pub fn generate_network(
    gen: GeneratorKind,
    vals: ValuationKind,
    seed: u64,
) -> Result<Network> {
    gen.validate()?;
    vals.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = gen.buyer_count();
    let m = n + 1; // nodes including the seller

    let mut edges: Vec<(usize, usize)> = Vec::new();
    match gen {
        GeneratorKind::ErdosRenyi { p, .. } => {
            for a in 0..m {
                for b in (a + 1)..m {
                    if rng.gen_bool(p) {
                        edges.push((a, b));
                    }
                }
            }
        }
        GeneratorKind::WattsStrogatz { k, beta, .. } => {
            let mut has: Vec<Vec<bool>> = vec![vec![false; m]; m];
            let add = |has: &mut Vec<Vec<bool>>, a: usize, b: usize| {
                has[a][b] = true;
                has[b][a] = true;
            };
            for a in 0..m {
                for d in 1..=(k / 2) {
                    add(&mut has, a, (a + d) % m);
                }
            }
            for a in 0..m {
                for d in 1..=(k / 2) {
                    let b = (a + d) % m;
                    if rng.gen_bool(beta) && has[a][b] {
                        // rewire a-b to a-c for a fresh uniform endpoint
                        let mut tries = 0;
                        loop {
                            let c = rng.gen_range(0..m);
                            if c != a && !has[a][c] {
                                has[a][b] = false;
                                has[b][a] = false;
                                add(&mut has, a, c);
                                break;
                            }
                            tries += 1;
                            if tries > 4 * m {
                                break; // node saturated, keep the lattice edge
                            }
                        }
                    }
                }
            }
            for (a, row) in has.iter().enumerate() {
                for (b, &present) in row.iter().enumerate().skip(a + 1) {
                    if present {
                        edges.push((a, b));
                    }
                }
            }
        }
        GeneratorKind::RandomTree { .. } => {
            edges = pruefer_tree(m, &mut rng);
        }
        GeneratorKind::Star { .. } => {
            for b in 1..m {
                edges.push((0, b));
            }
        }
    }

    let mut builder = Network::builder();
    let mut ids = vec![NodeId::SELLER];
    for b in 1..m {
        ids.push(builder.buyer(&b.to_string(), int(vals.sample(&mut rng))));
    }
    for (a, b) in edges {
        builder.edge(ids[a], ids[b]);
    }
    // valuations were drawn after the structure, so edge order never
    // perturbs the bid stream
    builder.build()
}

/// Uniform random labelled tree on `m` nodes via a random Pruefer
/// sequence.
fn pruefer_tree(m: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    if m == 1 {
        return Vec::new();
    }
    if m == 2 {
        return vec![(0, 1)];
    }
    let seq: Vec<usize> = (0..m - 2).map(|_| rng.gen_range(0..m)).collect();
    let mut degree = vec![1usize; m];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(m - 1);
    let mut leaves: std::collections::BTreeSet<usize> = (0..m)
        .filter(|&v| degree[v] == 1)
        .collect();
    for &s in &seq {
        let leaf = *leaves.iter().next().expect("a tree always has a leaf");
        leaves.remove(&leaf);
        edges.push((leaf.min(s), leaf.max(s)));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.insert(s);
        }
    }
    let mut it = leaves.into_iter();
    let (a, b) = (it.next().unwrap(), it.next().unwrap());
    edges.push((a.min(b), a.max(b)));
    edges
}

/// Splittable stream of per-instance seeds derived from a master seed.
pub fn instance_seed(master: u64, index: u64) -> u64 {
    // splitmix64
    let mut z = master
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GeneratorKind::ErdosRenyi { n, p } => write!(f, "erdos_renyi({n},{p})"),
            GeneratorKind::WattsStrogatz { n, k, beta } => {
                write!(f, "watts_strogatz({n},{k},{beta})")
            }
            GeneratorKind::RandomTree { n } => write!(f, "random_tree({n})"),
            GeneratorKind::Star { n } => write!(f, "star({n})"),
        }
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = split_spec(s)?;
        let kind = match name {
            "erdos_renyi" => GeneratorKind::ErdosRenyi {
                n: parse_arg(&args, 0, s)?,
                p: parse_arg(&args, 1, s)?,
            },
            "watts_strogatz" => GeneratorKind::WattsStrogatz {
                n: parse_arg(&args, 0, s)?,
                k: parse_arg(&args, 1, s)?,
                beta: parse_arg(&args, 2, s)?,
            },
            "random_tree" => GeneratorKind::RandomTree {
                n: parse_arg(&args, 0, s)?,
            },
            "star" => GeneratorKind::Star {
                n: parse_arg(&args, 0, s)?,
            },
            other => {
                return Err(Error::GeneratorConfig(format!(
                    "unknown generator {other:?}"
                )))
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

impl fmt::Display for ValuationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ValuationKind::UniformInt { lo, hi } => write!(f, "uniform_int({lo},{hi})"),
            ValuationKind::ExpInt { scale } => write!(f, "exp_int({scale})"),
        }
    }
}

impl FromStr for ValuationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = split_spec(s)?;
        let kind = match name {
            "uniform_int" => ValuationKind::UniformInt {
                lo: parse_arg(&args, 0, s)?,
                hi: parse_arg(&args, 1, s)?,
            },
            "exp_int" => ValuationKind::ExpInt {
                scale: parse_arg(&args, 0, s)?,
            },
            other => {
                return Err(Error::GeneratorConfig(format!(
                    "unknown valuation distribution {other:?}"
                )))
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

fn split_spec(s: &str) -> Result<(&str, Vec<&str>)> {
    let s = s.trim();
    let open = s
        .find('(')
        .ok_or_else(|| Error::GeneratorConfig(format!("missing '(' in spec {s:?}")))?;
    if !s.ends_with(')') {
        return Err(Error::GeneratorConfig(format!("missing ')' in spec {s:?}")));
    }
    let name = &s[..open];
    let inner = &s[open + 1..s.len() - 1];
    let args = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(str::trim).collect()
    };
    Ok((name, args))
}

fn parse_arg<T: FromStr>(args: &[&str], idx: usize, spec: &str) -> Result<T> {
    args.get(idx)
        .and_then(|a| a.parse().ok())
        .ok_or_else(|| Error::GeneratorConfig(format!("bad argument {idx} in spec {spec:?}")))
}

// Compact string form in configs and CSVs.
impl Serialize for GeneratorKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GeneratorKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for ValuationKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ValuationKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
