//! Converse experiment for the cluster protocol under bit-flip noise, and
//! the closed-form low-latency converse.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::EdgeSet;
use crate::noise::{derive_gl, sample_error, trial_rng, NoiseModel};
use crate::protocols::{par_tally, Context, Decoder};
use crate::resilience::Estimate;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConverseParams {
    pub d: usize,
    pub r: usize,
    pub p: f64,
}

impl ConverseParams {
    pub fn new(d: usize, r: usize, p: f64) -> Result<Self> {
        if d < 2 || d % 2 == 1 {
            return Err(Error::InvalidParams(format!("d must be even and >= 2, got {d}")));
        }
        if r < 3 || r.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!("R must be odd and >= 3, got {r}")));
        }
        if !(p > 0.0 && p <= 0.25) {
            return Err(Error::InvalidParams(format!("p must lie in (0, 1/4], got {p}")));
        }
        Ok(ConverseParams { d, r, p })
    }

    /// Whether `R >= (1/(2√p))^d`, the length regime where the converse applies.
    pub fn in_converse_regime(&self) -> bool {
        self.r as f64 >= (1.0 / (2.0 * self.p.sqrt())).powi(self.d as i32)
    }

    fn num_paths(&self) -> usize {
        self.d * (self.r - 1) / 2
    }
}

/// Straight left-to-right paths at `u2 = 2j`, `u3 = 2k`.
pub fn straight_paths(ctx: &Context) -> Result<Vec<EdgeSet>> {
    let params = ctx.params();
    let r = params.r.ok_or_else(|| Error::InvalidParams("straight paths need a cluster context".into()))?;
    let d = params.di();
    let mut out = Vec::new();
    for j in 0..d {
        for k in 1..=(r as i32 - 1) / 2 {
            let mut path = ctx.dec.empty_edges();
            for u1 in (1..2 * d).step_by(2) {
                let s = crate::geometry::Site::new(u1, 2 * j, 2 * k);
                let e = ctx.dec.edge_of_label(&s).ok_or(Error::SupportOutOfLattice(s))?;
                path.insert(e);
            }
            out.push(path);
        }
    }
    Ok(out)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn appropriate_from_path_prob(params: &ConverseParams, per_path: f64) -> f64 {
    1.0 - (1.0 - per_path).powi(params.num_paths() as i32)
}

/// Closed form with per-edge rate `2p`.
pub fn pr_appropriate_exact(params: &ConverseParams) -> f64 {
    let h = params.d / 2;
    let q = 2.0 * params.p;
    appropriate_from_path_prob(params, binomial(params.d, h) * q.powi(h as i32) * (1.0 - q).powi(h as i32))
}

/// Same quantity for i.i.d. Bernoulli-`p` edges, which is what the sampler draws.
pub fn pr_appropriate_bernoulli(params: &ConverseParams) -> f64 {
    let h = params.d / 2;
    let p = params.p;
    appropriate_from_path_prob(params, binomial(params.d, h) * p.powi(h as i32) * (1.0 - p).powi(h as i32))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConverseStats {
    pub params: ConverseParams,
    pub seed: u64,
    pub pr_appr: Estimate,
    pub pr_bz1: Estimate,
    pub pr_e1_and_appr: Estimate,
}

pub fn converse_mc(params: &ConverseParams, trials: u64, seed: u64, threads: usize) -> Result<ConverseStats> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be >= 1".into()));
    }
    let ctx = Context::cluster(params.d, params.r)?;
    let paths = straight_paths(&ctx)?;
    let model = NoiseModel::Bitflip(params.p);
    let half = params.d / 2;
    let qubits = &ctx.lattice.qubits;
    let [appr, bz1, both] = par_tally::<3, _, _>(threads, trials, || Decoder::new(&ctx), |dec, t, acc| {
        let e = sample_error(&model, qubits, &mut trial_rng(seed, t));
        let (y, _) = derive_gl(&e, dec.ctx)?;
        let is_appr = paths.iter().any(|p| y.intersection(p).count() == half);
        let bz = dec.matched_parity_primal(&y)?;
        acc[0] += is_appr as u64;
        acc[1] += bz as u64;
        acc[2] += (is_appr && bz) as u64;
        Ok(())
    })?;
    let est = |hits| Estimate { hits, trials };
    Ok(ConverseStats { params: *params, seed, pr_appr: est(appr), pr_bz1: est(bz1), pr_e1_and_appr: est(both) })
}

fn check_latency(delta: u32, m: u32) -> Result<i32> {
    if delta == 0 || m == 0 {
        return Err(Error::InvalidParams("delta and m must be >= 1".into()));
    }
    Ok((delta * m) as i32)
}

/// Largest bus length compatible with constant-latency operation: `(3/(4 p0²))^{Δm}`.
pub fn latency_max_r(p0: f64, delta: u32, m: u32) -> Result<f64> {
    let dm = check_latency(delta, m)?;
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::InvalidParams(format!("p0 must lie in (0,1), got {p0}")));
    }
    Ok((3.0 / (4.0 * p0 * p0)).powi(dm))
}

/// Lower bound on the failure probability: `1 - exp(-R (4p²/3)^{Δm})`.
pub fn latency_pfail(r: f64, p: f64, delta: u32, m: u32) -> Result<f64> {
    let dm = check_latency(delta, m)?;
    if !(0.0..=1.0).contains(&p) || r < 0.0 {
        return Err(Error::InvalidParams(format!("need 0 <= p <= 1 and R >= 0, got p={p}, R={r}")));
    }
    Ok(1.0 - (-r * (4.0 * p * p / 3.0).powi(dm)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_shape() {
        let ctx = Context::cluster(4, 5).unwrap();
        let paths = straight_paths(&ctx).unwrap();
        assert_eq!(paths.len(), 4 * 2);
        for (i, p) in paths.iter().enumerate() {
            assert_eq!(p.count_ones(..), 4);
            assert!(crate::graphs::pairing(p, ctx.lx()).unwrap());
            assert!(crate::graphs::is_ext_path(&ctx.dec, p));
            for q in &paths[i + 1..] {
                assert!(p.is_disjoint(q));
            }
        }
    }

    #[test]
    fn formula_values() {
        let c = ConverseParams::new(4, 51, 0.25).unwrap();
        let want = 1.0 - 0.625f64.powi(100);
        assert!((pr_appropriate_exact(&c) - want).abs() < 1e-15);
        assert!(pr_appropriate_bernoulli(&c) <= 1.0);
        assert!(ConverseParams::new(3, 51, 0.25).is_err());
    }

    #[test]
    fn latency_values() {
        assert!((latency_max_r(0.5, 4, 1).unwrap() - 81.0).abs() < 1e-12);
        assert!((latency_pfail(3.0, 0.5, 1, 1).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert_eq!(latency_pfail(0.0, 0.5, 1, 1).unwrap(), 0.0);
    }
}
