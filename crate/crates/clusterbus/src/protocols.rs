//! Surface single-shot decoding and cluster entanglement generation.
//!
//! The fast path evaluates the success condition directly from the error;
//! [`Decoder::decode_from_outcomes`] runs the literal measurement-based
//! pipeline and is used for cross-checking against the tableau oracle.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{measurement_partition, Lattice, LatticeKind, LatticeParams, MeasurementPartition, Site};
use crate::graphs::{
    boundary, build_cluster_decoding, build_surface_decoding, pairing, BoundaryGraph, EdgeSet, VertexSet,
};
use crate::matching::Matcher;
use crate::noise::{derive_gl, derive_surface_supports, sample_error, trial_rng, NoiseModel, PauliError};
use crate::stats::wilson;

/// Bell label: the output is `(I ⊗ Z^alpha X^beta) Φ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Outcome {
    pub alpha: bool,
    pub beta: bool,
}

impl Outcome {
    pub fn new(alpha: bool, beta: bool) -> Self {
        Outcome { alpha, beta }
    }

    /// Position in `[n00, n01, n10, n11]`.
    pub fn index(&self) -> usize {
        2 * self.alpha as usize + self.beta as usize
    }

    pub fn is_success(&self) -> bool {
        !self.alpha && !self.beta
    }
}

/// Everything a protocol run needs, built once per (kind, d, R).
#[derive(Clone, Debug)]
pub struct Context {
    pub lattice: Lattice,
    pub partition: MeasurementPartition,
    /// Primal decoding graph (`T_dec` or `T_cl,dec`).
    pub dec: BoundaryGraph,
    /// Dual decoding graph (`T_dec*` or `T_cl,dec*`).
    pub dec_dual: BoundaryGraph,
    distinguished: BTreeSet<Site>,
    lx: EdgeSet,
    lz: EdgeSet,
}

impl Context {
    pub fn surface(d: usize) -> Result<Self> {
        Self::new(LatticeParams::surface(d)?)
    }

    pub fn cluster(d: usize, r: usize) -> Result<Self> {
        Self::new(LatticeParams::cluster(d, r)?)
    }

    pub fn new(params: LatticeParams) -> Result<Self> {
        let kind = params.kind();
        let lattice = Lattice::new(params)?;
        let partition = measurement_partition(kind, &params)?;
        let (dec, dec_dual, lx, lz) = match kind {
            LatticeKind::Surface => {
                let (a, b) = build_surface_decoding(&params)?;
                (a, b, "L_X", "L_Z*")
            }
            LatticeKind::Cluster => {
                let (a, b) = build_cluster_decoding(&params)?;
                (a, b, "L_cl,X", "L_cl,Z*")
            }
        };
        let lx = dec.recovery_set(lx)?.clone();
        let lz = dec_dual.recovery_set(lz)?.clone();
        let distinguished = partition.distinguished.iter().copied().collect();
        Ok(Context { lattice, partition, dec, dec_dual, distinguished, lx, lz })
    }

    pub fn kind(&self) -> LatticeKind {
        self.lattice.kind()
    }

    pub fn params(&self) -> LatticeParams {
        self.lattice.params
    }

    pub fn lx(&self) -> &EdgeSet {
        &self.lx
    }

    pub fn lz(&self) -> &EdgeSet {
        &self.lz
    }

    /// Output qubit that receives the Pauli correction.
    pub fn output_qubit(&self) -> Site {
        self.partition.distinguished[0]
    }

    /// All qubits except the distinguished ones, in canonical order.
    pub fn measured_qubits(&self) -> Vec<Site> {
        self.lattice.qubits.iter().filter(|s| !self.distinguished.contains(s)).copied().collect()
    }

    fn distinguished_parity(&self, supp: &BTreeSet<Site>) -> bool {
        self.distinguished.iter().filter(|s| supp.contains(s)).count() % 2 == 1
    }
}

/// A context plus reusable matchers for both decoding graphs.
pub struct Decoder<'c> {
    pub ctx: &'c Context,
    primal: Matcher,
    dual: Matcher,
}

impl<'c> Decoder<'c> {
    pub fn new(ctx: &'c Context) -> Self {
        Decoder { ctx, primal: Matcher::new(&ctx.dec), dual: Matcher::new(&ctx.dec_dual) }
    }

    /// `⟨w ⊕ MinMatch(∂w), L⟩` on the primal graph.
    pub fn matched_parity_primal(&mut self, w: &EdgeSet) -> Result<bool> {
        let m = self.primal.solve(&self.ctx.dec, &boundary(&self.ctx.dec, w)?)?;
        Ok(pairing(w, self.ctx.lx())? ^ pairing(&m, self.ctx.lx())?)
    }

    pub fn matched_parity_dual(&mut self, w: &EdgeSet) -> Result<bool> {
        let m = self.dual.solve(&self.ctx.dec_dual, &boundary(&self.ctx.dec_dual, w)?)?;
        Ok(pairing(w, self.ctx.lz())? ^ pairing(&m, self.ctx.lz())?)
    }

    pub fn min_match_primal(&mut self, marked: &VertexSet) -> Result<EdgeSet> {
        self.primal.solve(&self.ctx.dec, marked)
    }

    pub fn min_match_dual(&mut self, marked: &VertexSet) -> Result<EdgeSet> {
        self.dual.solve(&self.ctx.dec_dual, marked)
    }

    /// Bell label produced when `e` hits the resource state.
    pub fn outcome(&mut self, e: &PauliError) -> Result<Outcome> {
        let (w, w_dual) = match self.ctx.kind() {
            LatticeKind::Surface => derive_surface_supports(e, self.ctx)?,
            LatticeKind::Cluster => derive_gl(e, self.ctx)?,
        };
        let alpha = self.ctx.distinguished_parity(&e.zsupp) ^ self.matched_parity_primal(&w)?;
        let beta = self.ctx.distinguished_parity(&e.xsupp) ^ self.matched_parity_dual(&w_dual)?;
        Ok(Outcome { alpha, beta })
    }

    /// Edge sets `(w, w*)` of measured qubits that returned 1.
    fn outcome_edges(&self, outcomes: &[bool]) -> Result<(EdgeSet, EdgeSet)> {
        let measured = self.ctx.measured_qubits();
        if outcomes.len() != measured.len() {
            return Err(Error::SizeMismatch { expected: measured.len(), got: outcomes.len() });
        }
        let ones: Vec<&Site> = measured.iter().zip(outcomes).filter(|(_, &b)| b).map(|(s, _)| s).collect();
        Ok((self.ctx.dec.project_labels(ones.iter().copied()), self.ctx.dec_dual.project_labels(ones.iter().copied())))
    }

    /// Syndromes `(s, s*)` computed from measurement outcomes.
    pub fn syndromes(&self, outcomes: &[bool]) -> Result<(VertexSet, VertexSet)> {
        let (w, wd) = self.outcome_edges(outcomes)?;
        Ok((boundary(&self.ctx.dec, &w)?, boundary(&self.ctx.dec_dual, &wd)?))
    }

    /// Corrections `(ĉ_X, ĉ_Z)`; apply `Z^ĉ_X X^ĉ_Z` to the output qubit.
    /// `outcomes` follows [`Context::measured_qubits`]; `true` is the -1 eigenvalue.
    pub fn decode_from_outcomes(&mut self, outcomes: &[bool]) -> Result<(bool, bool)> {
        let (w, wd) = self.outcome_edges(outcomes)?;
        Ok((self.matched_parity_primal(&w)?, self.matched_parity_dual(&wd)?))
    }
}

pub fn surface_outcome(e: &PauliError, ctx: &Context) -> Result<Outcome> {
    if ctx.kind() != LatticeKind::Surface {
        return Err(Error::InvalidParams("surface_outcome needs a surface context".into()));
    }
    Decoder::new(ctx).outcome(e)
}

pub fn cluster_outcome(e: &PauliError, ctx: &Context) -> Result<Outcome> {
    if ctx.kind() != LatticeKind::Cluster {
        return Err(Error::InvalidParams("cluster_outcome needs a cluster context".into()));
    }
    Decoder::new(ctx).outcome(e)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialStats {
    pub kind: LatticeKind,
    pub d: usize,
    pub r: Option<usize>,
    pub noise: String,
    pub trials: u64,
    pub seed: u64,
    /// Tallies indexed by [`Outcome::index`].
    pub counts: [u64; 4],
}

impl TrialStats {
    pub fn nu00_hat(&self) -> f64 {
        self.counts[0] as f64 / self.trials as f64
    }

    /// Wilson 95% interval for ν(0,0).
    pub fn nu00_interval(&self) -> (f64, f64) {
        wilson(self.counts[0], self.trials)
    }
}

/// Trials per work unit; each unit owns one [`Decoder`].
const CHUNK: u64 = 2048;

/// Builds a rayon pool; `threads == 0` means the rayon default.
pub fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))
}

/// Sums `f(trial)` outputs over all trials in parallel chunks.
pub(crate) fn par_tally<const K: usize, S, F>(threads: usize, trials: u64, init: impl Fn() -> S + Sync, f: F) -> Result<[u64; K]>
where
    F: Fn(&mut S, u64, &mut [u64; K]) -> Result<()> + Sync,
{
    let pool = thread_pool(threads)?;
    let chunks = trials.div_ceil(CHUNK);
    pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut state = init();
                let mut acc = [0u64; K];
                for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                    f(&mut state, t, &mut acc)?;
                }
                Ok(acc)
            })
            .try_reduce(|| [0u64; K], |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            })
    })
}

pub fn run_trials(ctx: &Context, model: &NoiseModel, trials: u64, seed: u64, threads: usize) -> Result<TrialStats> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be >= 1".into()));
    }
    let qubits = &ctx.lattice.qubits;
    let counts = par_tally::<4, _, _>(threads, trials, || Decoder::new(ctx), |dec, t, acc| {
        let e = sample_error(model, qubits, &mut trial_rng(seed, t));
        acc[dec.outcome(&e)?.index()] += 1;
        Ok(())
    })?;
    let params = ctx.params();
    Ok(TrialStats {
        kind: ctx.kind(),
        d: params.d,
        r: params.r,
        noise: model.to_string(),
        trials,
        seed,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_succeeds() {
        let s = Context::surface(3).unwrap();
        assert_eq!(surface_outcome(&PauliError::identity(), &s).unwrap(), Outcome::new(false, false));
        let c = Context::cluster(2, 3).unwrap();
        assert_eq!(cluster_outcome(&PauliError::identity(), &c).unwrap(), Outcome::new(false, false));
    }

    #[test]
    fn distinguished_errors() {
        let s = Context::surface(2).unwrap();
        assert_eq!(surface_outcome(&PauliError::z(&[Site::planar(1, 0)]), &s).unwrap(), Outcome::new(true, false));
        let c = Context::cluster(2, 3).unwrap();
        assert_eq!(cluster_outcome(&PauliError::x(&[Site::new(1, 0, 1)]), &c).unwrap(), Outcome::new(false, true));
    }

    #[test]
    fn zero_noise_all_success() {
        let c = Context::cluster(2, 5).unwrap();
        let st = run_trials(&c, &NoiseModel::Depolarizing(0.0), 100, 0, 1).unwrap();
        assert_eq!(st.counts, [100, 0, 0, 0]);
        assert_eq!(st.nu00_hat(), 1.0);
    }

    #[test]
    fn all_zero_outcomes_decode_trivially() {
        for ctx in [Context::surface(3).unwrap(), Context::cluster(2, 3).unwrap()] {
            let n = ctx.measured_qubits().len();
            assert_eq!(Decoder::new(&ctx).decode_from_outcomes(&vec![false; n]).unwrap(), (false, false));
        }
    }

    #[test]
    fn wrong_context_kind() {
        let s = Context::surface(2).unwrap();
        assert!(cluster_outcome(&PauliError::identity(), &s).is_err());
    }
}
