//! Lattice sites, qubit sets and measurement patterns.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice position. Planar lattices use `u3 = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Site {
    pub u1: i32,
    pub u2: i32,
    pub u3: i32,
}

impl Site {
    pub const fn new(u1: i32, u2: i32, u3: i32) -> Self {
        Site { u1, u2, u3 }
    }

    pub const fn planar(u1: i32, u2: i32) -> Self {
        Site { u1, u2, u3: 0 }
    }

    pub fn odd_count(&self) -> usize {
        [self.u1, self.u2, self.u3].iter().filter(|c| c.rem_euclid(2) == 1).count()
    }

    pub fn coord(&self, axis: usize) -> i32 {
        match axis {
            0 => self.u1,
            1 => self.u2,
            _ => self.u3,
        }
    }

    pub fn shifted(&self, axis: usize, by: i32) -> Site {
        let mut s = *self;
        match axis {
            0 => s.u1 += by,
            1 => s.u2 += by,
            _ => s.u3 += by,
        }
        s
    }

    pub fn manhattan(&self, other: &Site) -> i32 {
        (self.u1 - other.u1).abs() + (self.u2 - other.u2).abs() + (self.u3 - other.u3).abs()
    }
}

// Canonical order: (u3, u2, u1).
impl Ord for Site {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.u3, self.u2, self.u1).cmp(&(other.u3, other.u2, other.u1))
    }
}

impl PartialOrd for Site {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.u1, self.u2, self.u3)
    }
}

#[inline]
pub(crate) fn is_odd(x: i32) -> bool {
    x.rem_euclid(2) == 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LatticeKind {
    Surface,
    Cluster,
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LatticeKind::Surface => "surface",
            LatticeKind::Cluster => "cluster",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeParams {
    pub d: usize,
    /// Bus length; `None` for the planar code.
    pub r: Option<usize>,
}

impl LatticeParams {
    pub fn surface(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParams(format!("d must be >= 2, got {d}")));
        }
        Ok(LatticeParams { d, r: None })
    }

    pub fn cluster(d: usize, r: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParams(format!("d must be >= 2, got {d}")));
        }
        if r < 3 || r.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!("R must be odd and >= 3, got {r}")));
        }
        Ok(LatticeParams { d, r: Some(r) })
    }

    pub fn kind(&self) -> LatticeKind {
        if self.r.is_some() {
            LatticeKind::Cluster
        } else {
            LatticeKind::Surface
        }
    }

    pub(crate) fn di(&self) -> i32 {
        self.d as i32
    }

    pub(crate) fn ri(&self) -> i32 {
        self.r.unwrap_or(0) as i32
    }

    fn require_cluster(&self) -> Result<i32> {
        self.r
            .map(|r| r as i32)
            .ok_or_else(|| Error::InvalidParams("cluster lattice needs R".into()))
    }
}

/// Edge midpoints of the planar code: mixed-parity sites with
/// `1 <= u1 <= 2d-1`, `0 <= u2 <= 2d-2`.
pub fn surface_qubits(params: &LatticeParams) -> Result<BTreeSet<Site>> {
    LatticeParams::surface(params.d)?;
    let d = params.di();
    let mut out = BTreeSet::new();
    for u1 in 1..=2 * d - 1 {
        for u2 in 0..=2 * d - 2 {
            if is_odd(u1) != is_odd(u2) {
                out.insert(Site::planar(u1, u2));
            }
        }
    }
    Ok(out)
}

pub fn cluster_qubits(params: &LatticeParams) -> Result<BTreeSet<Site>> {
    let r = params.require_cluster()?;
    LatticeParams::cluster(params.d, r as usize)?;
    let d = params.di();
    let mut out = BTreeSet::new();
    for u3 in 1..=r {
        for u2 in 0..=2 * d - 2 {
            for u1 in 1..=2 * d - 1 {
                let s = Site::new(u1, u2, u3);
                let k = s.odd_count();
                if k != 0 && k != 3 {
                    out.insert(s);
                }
            }
        }
    }
    Ok(out)
}

/// Qubits at Manhattan distance one from `u`.
pub fn neigh(u: &Site, qubits: &BTreeSet<Site>) -> BTreeSet<Site> {
    let mut out = BTreeSet::new();
    for axis in 0..3 {
        for by in [-1, 1] {
            let v = u.shifted(axis, by);
            if qubits.contains(&v) {
                out.insert(v);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementPartition {
    /// Bulk qubits measured in Z (empty for the planar code).
    pub set_a: BTreeSet<Site>,
    pub set_x: BTreeSet<Site>,
    pub set_z: BTreeSet<Site>,
    pub distinguished: Vec<Site>,
}

impl MeasurementPartition {
    pub fn basis_of(&self, s: &Site) -> Option<Basis> {
        if self.set_x.contains(s) {
            Some(Basis::X)
        } else if self.set_z.contains(s) || self.set_a.contains(s) {
            Some(Basis::Z)
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Z,
}

pub fn surface_q() -> Site {
    Site::planar(1, 0)
}

pub fn cluster_q(params: &LatticeParams) -> (Site, Site) {
    (Site::new(1, 0, 1), Site::new(1, 0, params.ri()))
}

pub fn measurement_partition(kind: LatticeKind, params: &LatticeParams) -> Result<MeasurementPartition> {
    match kind {
        LatticeKind::Surface => {
            let q = surface_q();
            let mut p = MeasurementPartition {
                set_a: BTreeSet::new(),
                set_x: BTreeSet::new(),
                set_z: BTreeSet::new(),
                distinguished: vec![q],
            };
            for s in surface_qubits(params)? {
                if s == q {
                    continue;
                }
                if s.u2 > s.u1 {
                    p.set_x.insert(s);
                } else {
                    p.set_z.insert(s);
                }
            }
            Ok(p)
        }
        LatticeKind::Cluster => {
            let r = params.require_cluster()?;
            let (q1, q2) = cluster_q(params);
            let mut p = MeasurementPartition {
                set_a: BTreeSet::new(),
                set_x: BTreeSet::new(),
                set_z: BTreeSet::new(),
                distinguished: vec![q1, q2],
            };
            for s in cluster_qubits(params)? {
                let in_b = (s.u3 == 1 || s.u3 == r) && is_odd(s.u1) != is_odd(s.u2);
                if !in_b {
                    p.set_a.insert(s);
                } else if s == q1 || s == q2 {
                    continue;
                } else if s.u2 > s.u1 {
                    p.set_x.insert(s);
                } else {
                    p.set_z.insert(s);
                }
            }
            Ok(p)
        }
    }
}

/// Qubit list of a lattice with binary-searchable canonical indexing.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub params: LatticeParams,
    pub qubits: Vec<Site>,
}

impl Lattice {
    pub fn new(params: LatticeParams) -> Result<Self> {
        let set = match params.kind() {
            LatticeKind::Surface => surface_qubits(&params)?,
            LatticeKind::Cluster => cluster_qubits(&params)?,
        };
        Ok(Lattice { params, qubits: set.into_iter().collect() })
    }

    pub fn kind(&self) -> LatticeKind {
        self.params.kind()
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn index_of(&self, s: &Site) -> Option<usize> {
        self.qubits.binary_search(s).ok()
    }

    pub fn contains(&self, s: &Site) -> bool {
        self.index_of(s).is_some()
    }

    pub fn qubit_set(&self) -> BTreeSet<Site> {
        self.qubits.iter().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d2_surface_qubits() {
        let q = surface_qubits(&LatticeParams::surface(2).unwrap()).unwrap();
        let want: BTreeSet<_> = [(1, 0), (3, 0), (1, 2), (3, 2), (2, 1)]
            .iter()
            .map(|&(a, b)| Site::planar(a, b))
            .collect();
        assert_eq!(q, want);
        assert!(!q.contains(&Site::planar(0, 1)));
    }

    #[test]
    fn surface_counts() {
        for d in 2..=8 {
            let n = surface_qubits(&LatticeParams::surface(d).unwrap()).unwrap().len();
            assert_eq!(n, 2 * d * d - 2 * d + 1);
        }
    }

    #[test]
    fn cluster_d2_r3() {
        let p = LatticeParams::cluster(2, 3).unwrap();
        let c = cluster_qubits(&p).unwrap();
        assert_eq!(c.len(), 21);
        assert!(c.contains(&Site::new(1, 0, 1)));
        assert!(!c.contains(&Site::new(2, 0, 2)));
        let m = measurement_partition(LatticeKind::Cluster, &p).unwrap();
        assert_eq!(m.set_a.len() + m.set_x.len() + m.set_z.len() + 2, 21);
    }

    #[test]
    fn surface_partition_d2() {
        let p = LatticeParams::surface(2).unwrap();
        let m = measurement_partition(LatticeKind::Surface, &p).unwrap();
        assert_eq!(m.set_x, [Site::planar(1, 2)].into_iter().collect());
        assert_eq!(
            m.set_z,
            [Site::planar(2, 1), Site::planar(3, 0), Site::planar(3, 2)].into_iter().collect()
        );
    }

    #[test]
    fn neighbours() {
        let p = LatticeParams::cluster(3, 3).unwrap();
        let c = cluster_qubits(&p).unwrap();
        let n = neigh(&Site::new(2, 2, 2), &c);
        assert!(n.iter().all(|v| v.manhattan(&Site::new(2, 2, 2)) == 1));
        let s = surface_qubits(&LatticeParams::surface(3).unwrap()).unwrap();
        assert_eq!(neigh(&Site::planar(0, 2), &s), [Site::planar(1, 2)].into_iter().collect());
    }

    #[test]
    fn bad_params() {
        assert!(LatticeParams::surface(1).is_err());
        assert!(LatticeParams::cluster(2, 4).is_err());
        assert!(LatticeParams::cluster(2, 1).is_err());
    }
}
