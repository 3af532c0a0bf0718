//! Pauli errors, i.i.d. samplers and the restrictions fed to the decoders.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Lattice, LatticeKind, Site};
use crate::graphs::EdgeSet;
use crate::protocols::Context;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PauliError {
    /// Qubits carrying X or Y.
    pub xsupp: BTreeSet<Site>,
    /// Qubits carrying Z or Y.
    pub zsupp: BTreeSet<Site>,
}

impl PauliError {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn x(sites: &[Site]) -> Self {
        PauliError { xsupp: sites.iter().copied().collect(), zsupp: BTreeSet::new() }
    }

    pub fn z(sites: &[Site]) -> Self {
        PauliError { xsupp: BTreeSet::new(), zsupp: sites.iter().copied().collect() }
    }

    pub fn y(sites: &[Site]) -> Self {
        let s: BTreeSet<Site> = sites.iter().copied().collect();
        PauliError { xsupp: s.clone(), zsupp: s }
    }

    pub fn is_identity(&self) -> bool {
        self.xsupp.is_empty() && self.zsupp.is_empty()
    }

    pub fn support(&self) -> BTreeSet<Site> {
        self.xsupp.union(&self.zsupp).copied().collect()
    }

    /// Product up to phase.
    pub fn compose(&self, other: &PauliError) -> PauliError {
        PauliError {
            xsupp: self.xsupp.symmetric_difference(&other.xsupp).copied().collect(),
            zsupp: self.zsupp.symmetric_difference(&other.zsupp).copied().collect(),
        }
    }

    pub fn check_within(&self, lattice: &Lattice) -> Result<()> {
        match self.support().into_iter().find(|s| !lattice.contains(s)) {
            Some(s) => Err(Error::SupportOutOfLattice(s)),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NoiseModel {
    Depolarizing(f64),
    Bitflip(f64),
    Phaseflip(f64),
    Xz(f64, f64),
}

impl NoiseModel {
    /// Builds a model from a bare kind name and a rate; `xz` uses the rate for both.
    pub fn from_kind(kind: &str, p: f64) -> Result<Self> {
        let m = match kind {
            "depolarizing" => NoiseModel::Depolarizing(p),
            "bitflip" => NoiseModel::Bitflip(p),
            "phaseflip" => NoiseModel::Phaseflip(p),
            "xz" => NoiseModel::Xz(p, p),
            _ => return Err(Error::BadNoise(kind.to_string())),
        };
        m.validate()
    }

    fn validate(self) -> Result<Self> {
        let ok = |r: f64| (0.0..=1.0).contains(&r);
        let valid = match self {
            NoiseModel::Depolarizing(p) | NoiseModel::Bitflip(p) | NoiseModel::Phaseflip(p) => ok(p),
            NoiseModel::Xz(a, b) => ok(a) && ok(b),
        };
        if valid {
            Ok(self)
        } else {
            Err(Error::BadNoise(self.to_string()))
        }
    }

    /// Per-qubit probability of a non-identity error.
    pub fn rate(&self) -> f64 {
        match *self {
            NoiseModel::Depolarizing(p) | NoiseModel::Bitflip(p) | NoiseModel::Phaseflip(p) => p,
            NoiseModel::Xz(a, b) => a + b - a * b,
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseModel::Depolarizing(p) => write!(f, "depolarizing:{p}"),
            NoiseModel::Bitflip(p) => write!(f, "bitflip:{p}"),
            NoiseModel::Phaseflip(p) => write!(f, "phaseflip:{p}"),
            NoiseModel::Xz(a, b) => write!(f, "xz:{a},{b}"),
        }
    }
}

impl FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadNoise(s.to_string());
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        if kind == "xz" {
            let (a, b) = rest.split_once(',').ok_or_else(bad)?;
            return NoiseModel::Xz(num(a)?, num(b)?).validate();
        }
        NoiseModel::from_kind(kind, num(rest)?)
    }
}

/// Independent stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn sample_error<R: Rng + ?Sized>(model: &NoiseModel, qubits: &[Site], rng: &mut R) -> PauliError {
    let mut e = PauliError::identity();
    match *model {
        NoiseModel::Depolarizing(p) => {
            for &s in qubits {
                let u: f64 = rng.gen();
                if u < p {
                    match ((u / p) * 3.0) as usize {
                        0 => {
                            e.xsupp.insert(s);
                        }
                        1 => {
                            e.xsupp.insert(s);
                            e.zsupp.insert(s);
                        }
                        _ => {
                            e.zsupp.insert(s);
                        }
                    }
                }
            }
        }
        NoiseModel::Bitflip(p) => {
            for &s in qubits {
                if rng.gen::<f64>() < p {
                    e.xsupp.insert(s);
                }
            }
        }
        NoiseModel::Phaseflip(p) => {
            for &s in qubits {
                if rng.gen::<f64>() < p {
                    e.zsupp.insert(s);
                }
            }
        }
        NoiseModel::Xz(px, pz) => {
            for &s in qubits {
                if rng.gen::<f64>() < px {
                    e.xsupp.insert(s);
                }
                if rng.gen::<f64>() < pz {
                    e.zsupp.insert(s);
                }
            }
        }
    }
    e
}

/// `(zsupp ∩ X, xsupp ∩ Z)` as edge sets of the two planar decoding graphs.
pub fn derive_surface_supports(e: &PauliError, ctx: &Context) -> Result<(EdgeSet, EdgeSet)> {
    if ctx.kind() != LatticeKind::Surface {
        return Err(Error::InvalidParams("expected a surface context".into()));
    }
    e.check_within(&ctx.lattice)?;
    let ez = ctx.dec.project_labels(e.zsupp.iter().filter(|s| ctx.partition.set_x.contains(s)));
    let ex = ctx.dec_dual.project_labels(e.xsupp.iter().filter(|s| ctx.partition.set_z.contains(s)));
    Ok((ez, ex))
}

/// The glued errors on the two cluster decoding graphs.
pub fn derive_gl(e: &PauliError, ctx: &Context) -> Result<(EdgeSet, EdgeSet)> {
    if ctx.kind() != LatticeKind::Cluster {
        return Err(Error::InvalidParams("expected a cluster context".into()));
    }
    e.check_within(&ctx.lattice)?;
    let part = &ctx.partition;
    let mut egl = ctx.dec.project_labels(e.xsupp.iter().filter(|s| part.set_a.contains(s)));
    for s in e.zsupp.iter().filter(|s| part.set_x.contains(s)) {
        if let Some(i) = ctx.dec.edge_of_label(s) {
            egl.insert(i);
        }
    }
    let egl_dual = ctx.dec_dual.project_labels(e.xsupp.iter());
    Ok((egl, egl_dual))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for s in ["depolarizing:0.001", "bitflip:0.1", "phaseflip:0.25", "xz:0.1,0.2"] {
            let m: NoiseModel = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert!("depolarizing:1.5".parse::<NoiseModel>().is_err());
        assert!("foo:0.1".parse::<NoiseModel>().is_err());
    }

    #[test]
    fn zero_rate_is_identity() {
        let qs: Vec<Site> = (0..50).map(|i| Site::planar(i, 0)).collect();
        let mut rng = trial_rng(3, 0);
        assert!(sample_error(&NoiseModel::Depolarizing(0.0), &qs, &mut rng).is_identity());
    }

    #[test]
    fn bitflip_marginal() {
        let qs: Vec<Site> = (0..1000).map(|i| Site::planar(i, 0)).collect();
        let mut hits = 0usize;
        for t in 0..1000 {
            let e = sample_error(&NoiseModel::Bitflip(0.1), &qs, &mut trial_rng(11, t));
            assert!(e.zsupp.is_empty());
            hits += e.xsupp.len();
        }
        let n = 1e6;
        let sigma = (0.1f64 * 0.9 / n).sqrt();
        assert!((hits as f64 / n - 0.1).abs() < 3.0 * sigma);
    }

    #[test]
    fn streams_differ_by_trial() {
        let a: u64 = trial_rng(1, 0).gen();
        let b: u64 = trial_rng(1, 1).gen();
        assert_ne!(a, b);
        assert_eq!(a, trial_rng(1, 0).gen::<u64>());
    }
}
