//! Loop and external-path census, resilience values and closed-form bounds.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::LatticeParams;
use crate::graphs::{boundary, pairing, BoundaryGraph, EdgeSet};
use crate::matching::Matcher;
use crate::noise::trial_rng;
use crate::protocols::par_tally;
use crate::stats::{sigma, wilson};

/// Exhaustive enumeration is refused above this many edges unless a cap is given.
pub const ENUMERATION_BUDGET: usize = 60;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PathCensus {
    /// `counts[l]` = number of odd-pairing loops and external paths of length `l`.
    pub counts: Vec<u64>,
    pub max_len: usize,
    pub exhaustive: bool,
}

impl PathCensus {
    pub fn n(&self, len: usize) -> u64 {
        self.counts.get(len).copied().unwrap_or(0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("length,count\n");
        for (l, c) in self.counts.iter().enumerate().skip(1) {
            out.push_str(&format!("{l},{c}\n"));
        }
        out
    }
}

/// Calls `visit(edges, is_loop)` for every simple loop and every simple
/// path between distinct external vertices through internal ones.
/// Returns false when the cap cut off some branch.
pub fn for_each_cycle(g: &BoundaryGraph, cap: Option<usize>, mut visit: impl FnMut(&[usize], bool)) -> bool {
    let cap = cap.unwrap_or(usize::MAX);
    let mut complete = true;
    let mut on_path = vec![false; g.num_vertices()];
    let mut stack: Vec<usize> = Vec::new();

    // Loops rooted at their minimum edge e0 = (a, b): paths b -> a over edges > e0.
    for e0 in 0..g.num_edges() {
        let (a, b) = g.edges[e0];
        stack.push(e0);
        on_path[b] = true;
        dfs_loop(g, e0, b, a, cap, &mut on_path, &mut stack, &mut complete, &mut visit);
        on_path[b] = false;
        stack.pop();
    }
    // External paths from s to a larger external t.
    for s in 0..g.num_vertices() {
        if g.internal[s] {
            continue;
        }
        on_path[s] = true;
        dfs_ext(g, s, s, cap, &mut on_path, &mut stack, &mut complete, &mut visit);
        on_path[s] = false;
    }
    complete
}

#[allow(clippy::too_many_arguments)]
fn dfs_loop(
    g: &BoundaryGraph,
    e0: usize,
    v: usize,
    target: usize,
    cap: usize,
    on_path: &mut [bool],
    stack: &mut Vec<usize>,
    complete: &mut bool,
    visit: &mut impl FnMut(&[usize], bool),
) {
    for &f in &g.incidence[v] {
        if f <= e0 {
            continue;
        }
        let (x, y) = g.edges[f];
        let w = if x == v { y } else { x };
        if w == target {
            if stack.len() < cap {
                stack.push(f);
                visit(stack, true);
                stack.pop();
            } else {
                *complete = false;
            }
            continue;
        }
        if on_path[w] {
            continue;
        }
        if stack.len() + 1 >= cap {
            *complete = false;
            continue;
        }
        on_path[w] = true;
        stack.push(f);
        dfs_loop(g, e0, w, target, cap, on_path, stack, complete, visit);
        stack.pop();
        on_path[w] = false;
    }
}

#[allow(clippy::too_many_arguments)]
fn dfs_ext(
    g: &BoundaryGraph,
    s: usize,
    v: usize,
    cap: usize,
    on_path: &mut [bool],
    stack: &mut Vec<usize>,
    complete: &mut bool,
    visit: &mut impl FnMut(&[usize], bool),
) {
    for &f in &g.incidence[v] {
        let (x, y) = g.edges[f];
        let w = if x == v { y } else { x };
        if on_path[w] {
            continue;
        }
        if stack.len() >= cap {
            *complete = false;
            continue;
        }
        stack.push(f);
        if !g.internal[w] {
            if w > s {
                visit(stack, false);
            }
        } else {
            on_path[w] = true;
            dfs_ext(g, s, w, cap, on_path, stack, complete, visit);
            on_path[w] = false;
        }
        stack.pop();
    }
}

pub fn enumerate_census(g: &BoundaryGraph, l: &EdgeSet, cap: Option<usize>) -> Result<PathCensus> {
    if l.len() != g.num_edges() {
        return Err(Error::SizeMismatch { expected: g.num_edges(), got: l.len() });
    }
    if cap.is_none() && g.num_edges() > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded { edges: g.num_edges(), limit: ENUMERATION_BUDGET });
    }
    let mut counts = vec![0u64; 1];
    let mut max_len = 0;
    let complete = for_each_cycle(g, cap, |edges, _| {
        if edges.iter().filter(|&&e| l.contains(e)).count() % 2 == 1 {
            if counts.len() <= edges.len() {
                counts.resize(edges.len() + 1, 0);
            }
            counts[edges.len()] += 1;
            max_len = max_len.max(edges.len());
        }
    });
    Ok(PathCensus { counts, max_len, exhaustive: complete })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Σ_l C(l, ⌈l/2⌉) N(l) p^⌈l/2⌉`, summed from short to long.
pub fn res_value(census: &PathCensus, p: f64) -> f64 {
    census
        .counts
        .iter()
        .enumerate()
        .skip(1)
        .map(|(l, &n)| {
            let h = l.div_ceil(2);
            binomial(l, h) * n as f64 * p.powi(h as i32)
        })
        .sum()
}

/// Named closed-form bounds. Failure and resilience bounds are upper
/// bounds on probabilities; `achievability` is a lower bound on ν(0,0).
pub const BOUND_NAMES: &[&str] = &[
    "surface-res-x",
    "surface-res-z",
    "surface-failure",
    "cluster-res-x",
    "cluster-res-z",
    "cluster-failure",
    "achievability",
    "max-R",
];

fn check_validity(name: &str, p: f64, max: f64) -> Result<()> {
    if !(0.0..=max).contains(&p) {
        return Err(Error::OutOfValidity { name: name.to_string(), p, max });
    }
    Ok(())
}

pub fn closed_form_bounds(name: &str, params: &LatticeParams, p: f64) -> Result<f64> {
    let d = params.d as f64;
    let r = || {
        params
            .r
            .map(|r| r as f64)
            .ok_or_else(|| Error::InvalidParams(format!("{name} needs R")))
    };
    let tail = (10.0 * p.sqrt()).powi(params.d as i32 - 2);
    match name {
        "surface-res-x" | "surface-res-z" | "surface-failure" => {
            check_validity(name, p, 1.0 / 144.0)?;
            let c = match name {
                "surface-res-x" => 54.0,
                "surface-res-z" => 38.0,
                _ => 94.0,
            };
            Ok(c * p)
        }
        "cluster-res-x" => {
            check_validity(name, p, 1.0 / 400.0)?;
            Ok((2402.0 + 100.0 * d * (r()? - 1.0) * tail) * p)
        }
        "cluster-res-z" => {
            check_validity(name, p, 1.0 / 400.0)?;
            Ok((2400.0 + 100.0 * d * (r()? + 1.0) * tail) * p)
        }
        "cluster-failure" => {
            check_validity(name, p, 1.0 / 400.0)?;
            Ok((4806.0 + 200.0 * d * r()? * tail) * p)
        }
        "achievability" => {
            check_validity(name, p, 1.0 / 5006.0)?;
            Ok(1.0 - 5006.0 * p)
        }
        "max-R" => {
            if !(p > 0.0 && p <= 1.0 / 5006.0) {
                return Err(Error::OutOfValidity { name: name.to_string(), p, max: 1.0 / 5006.0 });
            }
            Ok((1.0 / (10.0 * p.sqrt())).powi(params.d as i32 - 2) / d)
        }
        _ => Err(Error::UnknownBound(name.to_string())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub hits: u64,
    pub trials: u64,
}

impl Estimate {
    pub fn p_hat(&self) -> f64 {
        self.hits as f64 / self.trials as f64
    }

    pub fn sigma(&self) -> f64 {
        sigma(self.p_hat(), self.trials)
    }

    pub fn interval(&self) -> (f64, f64) {
        wilson(self.hits, self.trials)
    }
}

/// Estimates `Pr[⟨E ⊕ MinMatch(∂E), L⟩ = 1]` for i.i.d.-`q` edge subsets `E`.
pub fn mismatch_probability_mc(
    g: &BoundaryGraph,
    l: &EdgeSet,
    q: f64,
    trials: u64,
    seed: u64,
    threads: usize,
) -> Result<Estimate> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParams(format!("q = {q} outside [0,1]")));
    }
    let [hits] = par_tally::<1, _, _>(threads, trials, || Matcher::new(g), |m, t, acc| {
        let mut rng = trial_rng(seed, t);
        let mut e = g.empty_edges();
        for i in 0..g.num_edges() {
            if rng.gen::<f64>() < q {
                e.insert(i);
            }
        }
        let mm = m.solve(g, &boundary(g, &e)?)?;
        if pairing(&e, l)? ^ pairing(&mm, l)? {
            acc[0] += 1;
        }
        Ok(())
    })?;
    Ok(Estimate { hits, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::build_surface_decoding;

    #[test]
    fn leading_counts_d3() {
        let (dec, decd) = build_surface_decoding(&LatticeParams::surface(3).unwrap()).unwrap();
        let c = enumerate_census(&dec, dec.recovery_set("L_X").unwrap(), None).unwrap();
        assert!(c.exhaustive);
        assert_eq!(c.n(1), 1);
        let cd = enumerate_census(&decd, decd.recovery_set("L_Z*").unwrap(), None).unwrap();
        assert_eq!(cd.n(1), 0);
        assert!(cd.n(2) >= 1);
        assert_eq!(res_value(&c, 0.0), 0.0);
    }

    #[test]
    fn empty_recovery_counts_nothing() {
        let (dec, _) = build_surface_decoding(&LatticeParams::surface(4).unwrap()).unwrap();
        let c = enumerate_census(&dec, &dec.empty_edges(), None).unwrap();
        assert!(c.counts.iter().all(|&n| n == 0));
    }

    #[test]
    fn named_bounds() {
        let s = LatticeParams::surface(3).unwrap();
        assert!((closed_form_bounds("surface-failure", &s, 1.0 / 144.0).unwrap() - 94.0 / 144.0).abs() < 1e-15);
        assert!(closed_form_bounds("surface-failure", &s, 0.01).is_err());
        let c = LatticeParams::cluster(5, 199).unwrap();
        let v = closed_form_bounds("max-R", &c, 1e-4).unwrap();
        assert!((v - 200.0).abs() < 1e-12 * 200.0);
        assert!(closed_form_bounds("nope", &c, 1e-4).is_err());
    }

    #[test]
    fn mc_zero_rate() {
        let (dec, _) = build_surface_decoding(&LatticeParams::surface(3).unwrap()).unwrap();
        let est = mismatch_probability_mc(&dec, dec.recovery_set("L_X").unwrap(), 0.0, 100, 1, 1).unwrap();
        assert_eq!(est.hits, 0);
    }
}
