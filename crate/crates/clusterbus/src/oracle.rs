//! Small exact stabilizer simulation used to validate the combinatorial
//! engines, plus symbolic checks of the stabilizer-product identities.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{
    cluster_q, cluster_qubits, neigh, surface_q, surface_qubits, Basis, LatticeKind, LatticeParams, Site,
};
use crate::graphs::{build_cluster_decoding, build_cluster_glued, BoundaryGraph};
use crate::noise::PauliError;
use crate::protocols::{Context, Decoder, Outcome};

pub const MAX_QUBITS: usize = 64;

/// Reference qubit of the half-encoded Bell state.
pub const REFERENCE: Site = Site::new(-1, -1, -1);

/// Hermitian Pauli on at most 64 qubits; `neg` is the sign.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Pauli {
    pub x: u64,
    pub z: u64,
    pub neg: bool,
}

impl Pauli {
    pub fn single(col: usize, basis: Basis) -> Self {
        match basis {
            Basis::X => Pauli { x: 1 << col, z: 0, neg: false },
            Basis::Z => Pauli { x: 0, z: 1 << col, neg: false },
        }
    }

    pub fn commutes(&self, o: &Pauli) -> bool {
        ((self.x & o.z).count_ones() + (self.z & o.x).count_ones()).is_multiple_of(2)
    }

    /// Product of two commuting Paulis.
    pub fn mul(&self, o: &Pauli) -> Pauli {
        let e = 2 * (self.neg as i32 + o.neg as i32) + phase_exponent(self.x, self.z, o.x, o.z);
        let e = e.rem_euclid(4);
        debug_assert!(e % 2 == 0, "product of anticommuting Paulis");
        Pauli { x: self.x ^ o.x, z: self.z ^ o.z, neg: e == 2 }
    }

    fn key(&self) -> u128 {
        self.x as u128 | (self.z as u128) << 64
    }
}

/// Sum over qubits of the exponent of `i` picked up by `P1 P2`.
fn phase_exponent(x1: u64, z1: u64, x2: u64, z2: u64) -> i32 {
    let pc = |v: u64| v.count_ones() as i32;
    let y = x1 & z1;
    let xo = x1 & !z1;
    let zo = !x1 & z1;
    pc(y & z2 & !x2) - pc(y & x2 & !z2) + pc(xo & z2 & x2) - pc(xo & z2 & !x2) + pc(zo & x2 & !z2)
        - pc(zo & x2 & z2)
}

/// Pauli operator over lattice sites with an explicit power of `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparsePauli {
    pub x: BTreeSet<Site>,
    pub z: BTreeSet<Site>,
    pub phase: u8,
}

impl SparsePauli {
    pub fn mul(&self, o: &SparsePauli) -> SparsePauli {
        let mut e = (self.phase + o.phase) as i32;
        let sites: BTreeSet<&Site> = self.x.iter().chain(&self.z).collect();
        for s in sites {
            let b = |set: &BTreeSet<Site>| set.contains(s) as u64;
            e += phase_exponent(b(&self.x), b(&self.z), b(&o.x), b(&o.z));
        }
        SparsePauli {
            x: self.x.symmetric_difference(&o.x).copied().collect(),
            z: self.z.symmetric_difference(&o.z).copied().collect(),
            phase: e.rem_euclid(4) as u8,
        }
    }

    pub fn describe(&self) -> String {
        let sign = ["+", "+i", "-", "-i"][self.phase as usize];
        let mut parts = Vec::new();
        let all: BTreeSet<&Site> = self.x.iter().chain(&self.z).collect();
        for s in all {
            let c = match (self.x.contains(s), self.z.contains(s)) {
                (true, true) => 'Y',
                (true, false) => 'X',
                _ => 'Z',
            };
            parts.push(format!("{c}{s}"));
        }
        format!("{sign}{}", parts.join(""))
    }
}

/// `G_u = Z_u ∏ X_v` over nearest-neighbour qubits.
pub fn cluster_generator(u: &Site, qubits: &BTreeSet<Site>) -> SparsePauli {
    SparsePauli { x: neigh(u, qubits), z: [*u].into_iter().collect(), phase: 0 }
}

#[derive(Clone, Debug)]
pub struct Tableau {
    pub sites: Vec<Site>,
    pub rows: Vec<Pauli>,
    index: BTreeMap<Site, usize>,
}

impl Tableau {
    pub fn from_generators(sites: Vec<Site>, gens: &[SparsePauli]) -> Result<Self> {
        let n = sites.len();
        if n > MAX_QUBITS {
            return Err(Error::TooLarge { edges: n, limit: MAX_QUBITS });
        }
        if gens.len() != n {
            return Err(Error::SizeMismatch { expected: n, got: gens.len() });
        }
        let index: BTreeMap<Site, usize> = sites.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mask = |set: &BTreeSet<Site>| -> Result<u64> {
            set.iter().try_fold(0u64, |m, s| {
                index.get(s).map(|&c| m | 1 << c).ok_or(Error::SupportOutOfLattice(*s))
            })
        };
        let mut rows = Vec::with_capacity(n);
        for g in gens {
            if g.phase % 2 == 1 {
                return Err(Error::InvalidParams("non-Hermitian generator".into()));
            }
            rows.push(Pauli { x: mask(&g.x)?, z: mask(&g.z)?, neg: g.phase == 2 });
        }
        let t = Tableau { sites, rows, index };
        for (i, a) in t.rows.iter().enumerate() {
            if t.rows[i + 1..].iter().any(|b| !a.commutes(b)) {
                return Err(Error::InvalidParams(format!("generator {i} does not commute")));
            }
        }
        if t.reduced().len() != n {
            return Err(Error::InvalidParams("generators are not independent".into()));
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.sites.len()
    }

    pub fn column(&self, s: &Site) -> Result<usize> {
        self.index.get(s).copied().ok_or(Error::SupportOutOfLattice(*s))
    }

    pub fn to_pauli(&self, e: &PauliError) -> Result<Pauli> {
        let mut p = Pauli::default();
        for s in &e.xsupp {
            p.x |= 1 << self.column(s)?;
        }
        for s in &e.zsupp {
            p.z |= 1 << self.column(s)?;
        }
        Ok(p)
    }

    /// Conjugation by a Pauli: flips signs of anticommuting generators.
    pub fn apply_pauli(&mut self, e: &PauliError) -> Result<()> {
        let p = self.to_pauli(e)?;
        for r in &mut self.rows {
            if !r.commutes(&p) {
                r.neg ^= true;
            }
        }
        Ok(())
    }

    /// Reduced row echelon form as `(pivot bit, row)` pairs.
    fn reduced(&self) -> Vec<(u32, Pauli)> {
        let mut rest = self.rows.clone();
        let mut out: Vec<(u32, Pauli)> = Vec::new();
        for bit in 0..128u32 {
            let Some(k) = rest.iter().position(|r| r.key() >> bit & 1 == 1) else { continue };
            let piv = rest.swap_remove(k);
            for r in rest.iter_mut().chain(out.iter_mut().map(|(_, r)| r)) {
                if r.key() >> bit & 1 == 1 {
                    *r = r.mul(&piv);
                }
            }
            out.push((bit, piv));
        }
        out
    }

    /// `Some(neg)` when `±p` is in the stabilizer group.
    pub fn stabilizer_sign(&self, p: &Pauli) -> Option<bool> {
        let mut acc = Pauli::default();
        for (bit, row) in self.reduced() {
            if (p.key() ^ acc.key()) >> bit & 1 == 1 {
                acc = acc.mul(&row);
            }
        }
        (acc.key() == p.key()).then_some(acc.neg)
    }

    /// Measures one qubit; returns `true` for the -1 outcome.
    pub fn measure<R: Rng + ?Sized>(&mut self, col: usize, basis: Basis, rng: &mut R) -> bool {
        let p = Pauli::single(col, basis);
        let anti: Vec<usize> = (0..self.rows.len()).filter(|&i| !self.rows[i].commutes(&p)).collect();
        match anti.split_first() {
            Some((&k, others)) => {
                let pivot = self.rows[k];
                for &j in others {
                    self.rows[j] = self.rows[j].mul(&pivot);
                }
                let bit: bool = rng.gen();
                self.rows[k] = Pauli { neg: bit, ..p };
                bit
            }
            None => self.stabilizer_sign(&p).expect("commuting observable lies in the group"),
        }
    }

    pub fn measure_site<R: Rng + ?Sized>(&mut self, s: &Site, basis: Basis, rng: &mut R) -> Result<bool> {
        let c = self.column(s)?;
        Ok(self.measure(c, basis, rng))
    }

    /// Reads `(α, β)` from the signs of `X_a X_b` and `Z_a Z_b`.
    pub fn extract_bell_label(&self, qa: &Site, qb: &Site) -> Result<Outcome> {
        let (a, b) = (self.column(qa)?, self.column(qb)?);
        let xx = Pauli { x: 1 << a | 1 << b, z: 0, neg: false };
        let zz = Pauli { x: 0, z: 1 << a | 1 << b, neg: false };
        match (self.stabilizer_sign(&xx), self.stabilizer_sign(&zz)) {
            (Some(alpha), Some(beta)) => Ok(Outcome { alpha, beta }),
            _ => Err(Error::NotBell),
        }
    }
}

pub fn build_cluster_state(params: &LatticeParams) -> Result<Tableau> {
    let qubits = cluster_qubits(params)?;
    if qubits.len() > MAX_QUBITS {
        return Err(Error::TooLarge { edges: qubits.len(), limit: MAX_QUBITS });
    }
    let gens: Vec<SparsePauli> = qubits.iter().map(|u| cluster_generator(u, &qubits)).collect();
    Tableau::from_generators(qubits.into_iter().collect(), &gens)
}

/// Planar code with its logical qubit maximally entangled with [`REFERENCE`].
pub fn build_half_encoded_bell(params: &LatticeParams) -> Result<Tableau> {
    let qubits = surface_qubits(params)?;
    let d = params.di();
    let mut gens = Vec::new();
    for u1 in (2..=2 * d - 2).step_by(2) {
        for u2 in (0..=2 * d - 2).step_by(2) {
            let s = Site::planar(u1, u2);
            gens.push(SparsePauli { x: neigh(&s, &qubits), ..Default::default() });
        }
    }
    for u1 in (1..=2 * d - 1).step_by(2) {
        for u2 in (1..=2 * d - 3).step_by(2) {
            let s = Site::planar(u1, u2);
            gens.push(SparsePauli { z: neigh(&s, &qubits), ..Default::default() });
        }
    }
    let column: BTreeSet<Site> = qubits.iter().filter(|s| s.u1 == 1).copied().chain([REFERENCE]).collect();
    let row: BTreeSet<Site> = qubits.iter().filter(|s| s.u2 == 0).copied().chain([REFERENCE]).collect();
    gens.push(SparsePauli { x: column, ..Default::default() });
    gens.push(SparsePauli { z: row, ..Default::default() });
    let mut sites: Vec<Site> = qubits.into_iter().collect();
    sites.push(REFERENCE);
    Tableau::from_generators(sites, &gens)
}

/// One exact run of the measurement-based protocol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleRun {
    /// Outcomes in [`Context::measured_qubits`] order.
    pub outcomes: Vec<bool>,
    pub corrections: (bool, bool),
    pub label: Outcome,
}

/// Applies `e`, measures per the partition, decodes, corrects and reads the Bell label.
pub fn oracle_run<R: Rng + ?Sized>(ctx: &Context, e: &PauliError, rng: &mut R) -> Result<OracleRun> {
    let params = ctx.params();
    let (mut t, pair) = match ctx.kind() {
        LatticeKind::Surface => (build_half_encoded_bell(&params)?, (surface_q(), REFERENCE)),
        LatticeKind::Cluster => (build_cluster_state(&params)?, cluster_q(&params)),
    };
    t.apply_pauli(e)?;
    let measured = ctx.measured_qubits();
    let mut outcomes = Vec::with_capacity(measured.len());
    for s in &measured {
        let basis = ctx.partition.basis_of(s).expect("measured qubit has a basis");
        outcomes.push(t.measure_site(s, basis, rng)?);
    }
    let (cx, cz) = Decoder::new(ctx).decode_from_outcomes(&outcomes)?;
    let out = pair.0;
    let fix = PauliError {
        xsupp: if cz { [out].into_iter().collect() } else { BTreeSet::new() },
        zsupp: if cx { [out].into_iter().collect() } else { BTreeSet::new() },
    };
    t.apply_pauli(&fix)?;
    let label = t.extract_bell_label(&pair.0, &pair.1)?;
    Ok(OracleRun { outcomes, corrections: (cx, cz), label })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdentityReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn expect(&mut self, what: String, got: &SparsePauli, want: &SparsePauli) {
        self.checked += 1;
        if got != want {
            self.failures.push(format!("{what}: got {} want {}", got.describe(), want.describe()));
        }
    }
}

fn product<'a>(sites: impl IntoIterator<Item = &'a Site>, qubits: &BTreeSet<Site>) -> SparsePauli {
    sites.into_iter().fold(SparsePauli::default(), |acc, u| acc.mul(&cluster_generator(u, qubits)))
}

fn incident_labels(g: &BoundaryGraph, u: &Site) -> BTreeSet<Site> {
    let v = g.vertex_index(u).expect("vertex present");
    g.incidence[v].iter().map(|&e| g.labels[e]).collect()
}

/// Multiplies out the generator products for every internal vertex and
/// for the two logical-correlation stabilizers, comparing against the
/// supports predicted from the decoding graphs.
pub fn verify_stabilizer_identities(params: &LatticeParams) -> Result<IdentityReport> {
    let qubits = cluster_qubits(params)?;
    let (gl, gl_dual) = build_cluster_glued(params)?;
    let (dec, dec_dual) = build_cluster_decoding(params)?;
    let r = params.ri();
    let face = |s: &Site| s.u3 == 1 || s.u3 == r;
    let mut rep = IdentityReport::default();

    for &v in dec.internal_vertices() {
        let u = dec.vertices[v];
        let got = if face(&u) {
            cluster_generator(&u, &qubits)
        } else {
            product(&neigh(&u, &qubits), &qubits)
        };
        let inci = incident_labels(&gl, &u);
        let want = SparsePauli {
            x: inci.iter().filter(|s| face(s) && s.u1 % 2 != s.u2 % 2).copied().collect(),
            z: inci.iter().filter(|s| !(face(s) && s.u1 % 2 != s.u2 % 2)).copied().collect(),
            phase: 0,
        };
        rep.expect(format!("primal S^u at {u}"), &got, &want);
    }

    for &v in dec_dual.internal_vertices() {
        let u = dec_dual.vertices[v];
        let got = if face(&u) {
            let inner = u.shifted(2, if u.u3 == 1 { 1 } else { -1 });
            let front: Vec<Site> = neigh(&u, &qubits).into_iter().filter(|s| face(s)).collect();
            product(front.iter().chain([&inner]), &qubits)
        } else {
            product(&neigh(&u, &qubits), &qubits)
        };
        let want = SparsePauli { x: BTreeSet::new(), z: incident_labels(&gl_dual, &u), phase: 0 };
        rep.expect(format!("dual S^u at {u}"), &got, &want);
    }

    let (q1, q2) = cluster_q(params);
    let lx_a = dec.labels_of(dec.recovery_set("L_cl,X&A")?);
    let lx_b = dec.labels_of(dec.recovery_set("L_cl,X&B")?);
    let want_x = SparsePauli { x: lx_b.iter().copied().chain([q1, q2]).collect(), z: lx_a.clone(), phase: 0 };
    rep.expect("S^X".into(), &product(&lx_a, &qubits), &want_x);

    let lz = dec_dual.labels_of(dec_dual.recovery_set("L_cl,Z*")?);
    let lz_q: BTreeSet<Site> = lz.iter().copied().chain([q1, q2]).collect();
    let want_z = SparsePauli { x: BTreeSet::new(), z: lz_q.clone(), phase: 0 };
    rep.expect("S^Z".into(), &product(&lz_q, &qubits), &want_z);

    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::trial_rng;

    #[test]
    fn phase_of_xz() {
        // X·Z = -iY, Z·X = iY
        assert_eq!(phase_exponent(1, 0, 0, 1).rem_euclid(4), 3);
        assert_eq!(phase_exponent(0, 1, 1, 0).rem_euclid(4), 1);
        // Y·Y = I
        assert_eq!(phase_exponent(1, 1, 1, 1), 0);
    }

    #[test]
    fn cluster_d2_tableau() {
        let t = build_cluster_state(&LatticeParams::cluster(2, 3).unwrap()).unwrap();
        assert_eq!(t.n(), 21);
    }

    #[test]
    fn half_encoded_shapes() {
        let t = build_half_encoded_bell(&LatticeParams::surface(2).unwrap()).unwrap();
        assert_eq!(t.n(), 6);
        let t = build_half_encoded_bell(&LatticeParams::surface(3).unwrap()).unwrap();
        assert_eq!(t.n(), 14);
    }

    #[test]
    fn bell_pair_labels() {
        let (a, b) = (Site::planar(0, 0), Site::planar(1, 0));
        let gens = [
            SparsePauli { x: [a, b].into_iter().collect(), ..Default::default() },
            SparsePauli { z: [a, b].into_iter().collect(), ..Default::default() },
        ];
        let t = Tableau::from_generators(vec![a, b], &gens).unwrap();
        assert_eq!(t.extract_bell_label(&a, &b).unwrap(), Outcome::new(false, false));
        let mut tx = t.clone();
        tx.apply_pauli(&PauliError::x(&[b])).unwrap();
        assert_eq!(tx.extract_bell_label(&a, &b).unwrap(), Outcome::new(false, true));
        let mut ty = t.clone();
        ty.apply_pauli(&PauliError::y(&[b])).unwrap();
        assert_eq!(ty.extract_bell_label(&a, &b).unwrap(), Outcome::new(true, true));
        ty.apply_pauli(&PauliError::y(&[b])).unwrap();
        assert_eq!(ty.rows, t.rows);
    }

    #[test]
    fn repeated_measurement_agrees() {
        let mut t = build_cluster_state(&LatticeParams::cluster(2, 3).unwrap()).unwrap();
        let mut rng = trial_rng(5, 0);
        let first = t.measure(3, Basis::X, &mut rng);
        assert_eq!(t.measure(3, Basis::X, &mut rng), first);
    }

    /// Three-qubit toy code: S1 = Z1 Z2, S2 = X1 X2 X3 on a logical-encoded
    /// state; measuring X on qubit 2 and Z on qubit 3 teleports onto qubit 1.
    #[test]
    fn toy_code_decodes_all_eigenstates() {
        let s: Vec<Site> = (0..4).map(|i| Site::planar(i, 0)).collect();
        // qubits 1..3 encode, qubit 0 is a reference; logical X = X1X2, logical Z = Z1Z3.
        let mk = |x: &[usize], z: &[usize]| SparsePauli {
            x: x.iter().map(|&i| s[i]).collect(),
            z: z.iter().map(|&i| s[i]).collect(),
            phase: 0,
        };
        let gens = [mk(&[], &[1, 2]), mk(&[1, 2, 3], &[]), mk(&[0, 1, 2], &[]), mk(&[], &[0, 1, 3])];
        for seed in 0..16 {
            let mut t = Tableau::from_generators(s.clone(), &gens).unwrap();
            let mut rng = trial_rng(seed, 0);
            let x = t.measure(2, Basis::X, &mut rng);
            let z = t.measure(3, Basis::Z, &mut rng);
            let fix = PauliError {
                xsupp: if z { [s[1]].into_iter().collect() } else { BTreeSet::new() },
                zsupp: if x { [s[1]].into_iter().collect() } else { BTreeSet::new() },
            };
            t.apply_pauli(&fix).unwrap();
            assert_eq!(t.extract_bell_label(&s[1], &s[0]).unwrap(), Outcome::new(false, false));
        }
    }

    #[test]
    fn identities_small() {
        let rep = verify_stabilizer_identities(&LatticeParams::cluster(2, 3).unwrap()).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
    }
}
