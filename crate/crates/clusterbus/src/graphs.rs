//! Decoding graphs, the labeling map, recovery sets and the boundary map.
//!
//! Every edge is generated from the qubit that labels it, so the labeling
//! map is injective by construction.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::geometry::{
    cluster_qubits, is_odd, measurement_partition, surface_qubits, LatticeKind, LatticeParams, Site,
};

/// Dense edge subset of one graph.
pub type EdgeSet = FixedBitSet;
/// Dense subset of the internal vertices of one graph (indexed by internal index).
pub type VertexSet = FixedBitSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Primal,
    Dual,
}

#[derive(Clone, Copy, Debug)]
struct RawEdge {
    a: Site,
    b: Site,
    label: Site,
}

#[derive(Clone, Debug)]
pub struct BoundaryGraph {
    pub name: String,
    pub vertices: Vec<Site>,
    pub internal: Vec<bool>,
    pub edges: Vec<(usize, usize)>,
    pub labels: Vec<Site>,
    pub incidence: Vec<Vec<usize>>,
    pub recovery: BTreeMap<String, EdgeSet>,
    internal_index: Vec<Option<usize>>,
    internal_vertices: Vec<usize>,
    label_lookup: HashMap<Site, usize>,
}

impl BoundaryGraph {
    fn from_raw(name: &str, raw: &[RawEdge]) -> Result<Self> {
        let vset: BTreeSet<Site> = raw.iter().flat_map(|e| [e.a, e.b]).collect();
        let vertices: Vec<Site> = vset.into_iter().collect();
        let vidx = |s: &Site| vertices.binary_search(s).expect("endpoint registered");
        let mut pairs: Vec<((usize, usize), Site)> = raw
            .iter()
            .map(|e| {
                let (x, y) = (vidx(&e.a), vidx(&e.b));
                ((x.min(y), x.max(y)), e.label)
            })
            .collect();
        pairs.sort();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidParams(format!("{name}: duplicate edge at {}", w[0].1)));
            }
        }
        let mut incidence = vec![Vec::new(); vertices.len()];
        let mut label_lookup = HashMap::with_capacity(pairs.len());
        for (i, ((a, b), label)) in pairs.iter().enumerate() {
            if a == b {
                return Err(Error::InvalidParams(format!("{name}: self loop at {label}")));
            }
            incidence[*a].push(i);
            incidence[*b].push(i);
            if label_lookup.insert(*label, i).is_some() {
                return Err(Error::InvalidParams(format!("{name}: label {label} reused")));
            }
        }
        let n = vertices.len();
        Ok(BoundaryGraph {
            name: name.to_string(),
            vertices,
            internal: vec![false; n],
            edges: pairs.iter().map(|p| p.0).collect(),
            labels: pairs.iter().map(|p| p.1).collect(),
            incidence,
            recovery: BTreeMap::new(),
            internal_index: vec![None; n],
            internal_vertices: Vec::new(),
            label_lookup,
        })
    }

    fn set_internal(&mut self, flags: Vec<bool>) {
        self.internal = flags;
        self.internal_vertices.clear();
        for (v, &f) in self.internal.iter().enumerate() {
            if f {
                self.internal_index[v] = Some(self.internal_vertices.len());
                self.internal_vertices.push(v);
            } else {
                self.internal_index[v] = None;
            }
        }
    }

    /// Edge-induced subgraph of `ambient`, with internal vertices judged
    /// against the ambient incidence.
    fn induced(
        name: &str,
        ambient: &BoundaryGraph,
        keep: impl Fn(&Site) -> bool,
        rough: impl Fn(&Site) -> bool,
    ) -> Result<Self> {
        let raw: Vec<RawEdge> = ambient
            .edges
            .iter()
            .zip(&ambient.labels)
            .filter(|(_, l)| keep(l))
            .map(|(&(a, b), &label)| RawEdge { a: ambient.vertices[a], b: ambient.vertices[b], label })
            .collect();
        let mut g = BoundaryGraph::from_raw(name, &raw)?;
        let flags = g
            .vertices
            .iter()
            .map(|s| {
                let av = ambient.vertex_index(s).expect("subgraph vertex in ambient graph");
                !rough(s) && ambient.incidence[av].iter().all(|&e| keep(&ambient.labels[e]))
            })
            .collect();
        g.set_internal(flags);
        Ok(g)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_internal(&self) -> usize {
        self.internal_vertices.len()
    }

    pub fn internal_vertices(&self) -> &[usize] {
        &self.internal_vertices
    }

    pub fn internal_index(&self, v: usize) -> Option<usize> {
        self.internal_index[v]
    }

    pub fn vertex_index(&self, s: &Site) -> Option<usize> {
        self.vertices.binary_search(s).ok()
    }

    pub fn edge_of_label(&self, s: &Site) -> Option<usize> {
        self.label_lookup.get(s).copied()
    }

    pub fn recovery_set(&self, name: &str) -> Result<&EdgeSet> {
        self.recovery
            .get(name)
            .ok_or_else(|| Error::InvalidParams(format!("{}: no recovery set `{name}`", self.name)))
    }

    pub fn empty_edges(&self) -> EdgeSet {
        FixedBitSet::with_capacity(self.num_edges())
    }

    pub fn empty_vertices(&self) -> VertexSet {
        FixedBitSet::with_capacity(self.num_internal())
    }

    /// Edges whose labels lie in `labels`; labels outside the graph are ignored.
    pub fn project_labels<'a>(&self, labels: impl IntoIterator<Item = &'a Site>) -> EdgeSet {
        let mut es = self.empty_edges();
        for s in labels {
            if let Some(e) = self.edge_of_label(s) {
                es.insert(e);
            }
        }
        es
    }

    pub fn labels_of(&self, es: &EdgeSet) -> BTreeSet<Site> {
        es.ones().map(|e| self.labels[e]).collect()
    }

    /// Internal-vertex set from vertex sites; non-internal sites are rejected.
    pub fn vertex_set_of(&self, sites: &[Site]) -> Result<VertexSet> {
        let mut vs = self.empty_vertices();
        for s in sites {
            let i = self
                .vertex_index(s)
                .and_then(|v| self.internal_index(v))
                .ok_or(Error::SupportOutOfLattice(*s))?;
            vs.insert(i);
        }
        Ok(vs)
    }

    fn attach(&mut self, name: &str, pred: impl Fn(&Site) -> bool) {
        let mut es = self.empty_edges();
        for (i, l) in self.labels.iter().enumerate() {
            if pred(l) {
                es.insert(i);
            }
        }
        self.recovery.insert(name.to_string(), es);
    }

    /// Line-oriented text dump.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.vertices.iter().enumerate() {
            let tag = if self.internal[i] { "int" } else { "ext" };
            let _ = writeln!(out, "V {i} {} {} {} {tag}", s.u1, s.u2, s.u3);
        }
        for (i, (&(a, b), l)) in self.edges.iter().zip(&self.labels).enumerate() {
            let _ = writeln!(out, "E {i} {a} {b} {} {} {}", l.u1, l.u2, l.u3);
        }
        for (name, es) in &self.recovery {
            let _ = write!(out, "R {name}");
            for e in es.ones() {
                let _ = write!(out, " {e}");
            }
            out.push('\n');
        }
        out
    }
}

fn planar_edges(w: Site) -> (RawEdge, RawEdge) {
    let (h, v) = ((w.shifted(0, -1), w.shifted(0, 1)), (w.shifted(1, -1), w.shifted(1, 1)));
    let (p, q) = if is_odd(w.u1) { (h, v) } else { (v, h) };
    (RawEdge { a: p.0, b: p.1, label: w }, RawEdge { a: q.0, b: q.1, label: w })
}

fn surface_rough(side: Side, d: i32) -> impl Fn(&Site) -> bool {
    move |s: &Site| match side {
        Side::Primal => s.u1 == 0 || s.u1 == 2 * d,
        Side::Dual => s.u2 == -1 || s.u2 == 2 * d - 1,
    }
}

/// Planar lattice and its dual; every qubit labels one edge in each.
pub fn build_surface(params: &LatticeParams) -> Result<(BoundaryGraph, BoundaryGraph)> {
    let qubits = surface_qubits(params)?;
    let (mut primal, mut dual) = (Vec::new(), Vec::new());
    for &w in &qubits {
        let (p, q) = planar_edges(w);
        primal.push(p);
        dual.push(q);
    }
    Ok((BoundaryGraph::from_raw("T_sc", &primal)?, BoundaryGraph::from_raw("T_sc*", &dual)?))
}

pub fn build_surface_decoding(params: &LatticeParams) -> Result<(BoundaryGraph, BoundaryGraph)> {
    let (sc, scd) = build_surface(params)?;
    let part = measurement_partition(LatticeKind::Surface, params)?;
    let d = params.di();
    let mut dec = BoundaryGraph::induced("T_dec", &sc, |l| part.set_x.contains(l), surface_rough(Side::Primal, d))?;
    let mut decd =
        BoundaryGraph::induced("T_dec*", &scd, |l| part.set_z.contains(l), surface_rough(Side::Dual, d))?;
    dec.attach("L_X", |l| l.u1 == 1 && l.u2 >= 2 && !is_odd(l.u2));
    decd.attach("L_Z*", |l| l.u2 == 0 && l.u1 >= 3 && is_odd(l.u1));
    Ok((dec, decd))
}

/// Which side a cluster qubit's edge lives on.
pub fn cluster_edges(w: Site, r: i32) -> Vec<(Side, (Site, Site))> {
    let face = w.u3 == 1 || w.u3 == r;
    let mut out = Vec::with_capacity(2);
    if face {
        if is_odd(w.u1) != is_odd(w.u2) {
            let (p, q) = planar_edges(w);
            out.push((Side::Primal, (p.a, p.b)));
            out.push((Side::Dual, (q.a, q.b)));
        } else if !is_odd(w.u1) {
            let inner = Site::new(w.u1, w.u2, if w.u3 == 1 { 2 } else { r - 1 });
            out.push((Side::Primal, (w, inner)));
        }
        return out;
    }
    let odd: Vec<usize> = (0..3).filter(|&a| is_odd(w.coord(a))).collect();
    match odd.len() {
        1 => out.push((Side::Primal, (w.shifted(odd[0], -1), w.shifted(odd[0], 1)))),
        2 => {
            let even = (0..3).find(|a| !odd.contains(a)).unwrap();
            out.push((Side::Dual, (w.shifted(even, -1), w.shifted(even, 1))));
        }
        _ => {}
    }
    out
}

fn cluster_rough(side: Side, d: i32) -> impl Fn(&Site) -> bool {
    surface_rough(side, d)
}

/// The glued graphs: all primal-type / dual-type cluster edges.
pub fn build_cluster_glued(params: &LatticeParams) -> Result<(BoundaryGraph, BoundaryGraph)> {
    let qubits = cluster_qubits(params)?;
    let r = params.ri();
    let (mut primal, mut dual) = (Vec::new(), Vec::new());
    for &w in &qubits {
        for (side, (a, b)) in cluster_edges(w, r) {
            let e = RawEdge { a, b, label: w };
            match side {
                Side::Primal => primal.push(e),
                Side::Dual => dual.push(e),
            }
        }
    }
    Ok((BoundaryGraph::from_raw("T_gl", &primal)?, BoundaryGraph::from_raw("T_gl*", &dual)?))
}

pub fn build_cluster_decoding(params: &LatticeParams) -> Result<(BoundaryGraph, BoundaryGraph)> {
    let (gl, gld) = build_cluster_glued(params)?;
    let part = measurement_partition(LatticeKind::Cluster, params)?;
    let (d, r) = (params.di(), params.ri());
    let face = move |l: &Site| l.u3 == 1 || l.u3 == r;
    let keep_p = |l: &Site| part.set_a.contains(l) || part.set_x.contains(l);
    let keep_d = |l: &Site| part.set_a.contains(l) || part.set_z.contains(l);
    let mut dec = BoundaryGraph::induced("T_cl,dec", &gl, keep_p, cluster_rough(Side::Primal, d))?;
    let mut decd = BoundaryGraph::induced("T_cl,dec*", &gld, keep_d, cluster_rough(Side::Dual, d))?;
    let lx = move |l: &Site| {
        l.u1 == 1 && !is_odd(l.u2) && if face(l) { l.u2 >= 2 } else { !is_odd(l.u3) }
    };
    let lz = move |l: &Site| l.u2 == 0 && is_odd(l.u1) && is_odd(l.u3) && !(l.u1 == 1 && face(l));
    dec.attach("L_cl,X", lx);
    dec.attach("L_cl,X&A", move |l| lx(l) && !face(l));
    dec.attach("L_cl,X&B", move |l| lx(l) && face(l));
    decd.attach("L_cl,Z*", lz);
    decd.attach("L_cl,Z*&A", move |l| lz(l) && !face(l));
    decd.attach("L_cl,Z*&B", move |l| lz(l) && face(l));
    Ok((dec, decd))
}

/// Internal vertices with odd incidence in `es`.
pub fn boundary(g: &BoundaryGraph, es: &EdgeSet) -> Result<VertexSet> {
    if es.len() != g.num_edges() {
        return Err(Error::SizeMismatch { expected: g.num_edges(), got: es.len() });
    }
    let mut out = g.empty_vertices();
    for e in es.ones() {
        let (a, b) = g.edges[e];
        for v in [a, b] {
            if let Some(i) = g.internal_index(v) {
                out.toggle(i);
            }
        }
    }
    Ok(out)
}

/// Parity of `|a ∩ b|`.
pub fn pairing(a: &EdgeSet, b: &EdgeSet) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch { expected: a.len(), got: b.len() });
    }
    Ok(a.intersection(b).count() % 2 == 1)
}

pub fn pairing_sites(a: &BTreeSet<Site>, b: &BTreeSet<Site>) -> bool {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().filter(|s| large.contains(s)).count() % 2 == 1
}

fn degrees(g: &BoundaryGraph, es: &EdgeSet) -> BTreeMap<usize, usize> {
    let mut deg = BTreeMap::new();
    for e in es.ones() {
        let (a, b) = g.edges[e];
        *deg.entry(a).or_insert(0) += 1;
        *deg.entry(b).or_insert(0) += 1;
    }
    deg
}

fn connected(g: &BoundaryGraph, es: &EdgeSet) -> bool {
    let Some(start) = es.ones().next() else { return true };
    let mut seen = g.empty_edges();
    let mut queue = VecDeque::from([start]);
    seen.insert(start);
    while let Some(e) = queue.pop_front() {
        let (a, b) = g.edges[e];
        for v in [a, b] {
            for &f in &g.incidence[v] {
                if es.contains(f) && !seen.contains(f) {
                    seen.insert(f);
                    queue.push_back(f);
                }
            }
        }
    }
    seen.count_ones(..) == es.count_ones(..)
}

pub fn is_simple_loop(g: &BoundaryGraph, es: &EdgeSet) -> bool {
    es.count_ones(..) > 0 && degrees(g, es).values().all(|&k| k == 2) && connected(g, es)
}

/// Simple path between two distinct external vertices through internal ones.
pub fn is_ext_path(g: &BoundaryGraph, es: &EdgeSet) -> bool {
    let deg = degrees(g, es);
    let ends: Vec<_> = deg.iter().filter(|(_, &k)| k == 1).map(|(&v, _)| v).collect();
    ends.len() == 2
        && ends.iter().all(|&v| !g.internal[v])
        && deg.iter().all(|(&v, &k)| k == 1 || (k == 2 && g.internal[v]))
        && connected(g, es)
}

/// Splits a cycle into disjoint simple loops and external paths.
pub fn cycle_decompose(g: &BoundaryGraph, cyc: &EdgeSet) -> Result<Vec<EdgeSet>> {
    if boundary(g, cyc)?.count_ones(..) != 0 {
        return Err(Error::NotACycle);
    }
    let mut parts = Vec::new();
    let mut forest = g.empty_edges();
    let mut parent: Vec<Option<usize>> = vec![None; g.num_vertices()];
    let mut seen = vec![usize::MAX; g.num_vertices()];
    for (stamp, e) in cyc.ones().enumerate() {
        let (a, b) = g.edges[e];
        // BFS from a inside the forest looking for b.
        seen[a] = stamp;
        parent[a] = None;
        let mut queue = VecDeque::from([a]);
        let mut found = false;
        while let Some(v) = queue.pop_front() {
            if v == b {
                found = true;
                break;
            }
            for &f in &g.incidence[v] {
                if !forest.contains(f) {
                    continue;
                }
                let (x, y) = g.edges[f];
                let w = if x == v { y } else { x };
                if seen[w] != stamp {
                    seen[w] = stamp;
                    parent[w] = Some(f);
                    queue.push_back(w);
                }
            }
        }
        if found {
            let mut part = g.empty_edges();
            part.insert(e);
            let mut v = b;
            while let Some(f) = parent[v] {
                part.insert(f);
                forest.set(f, false);
                let (x, y) = g.edges[f];
                v = if x == v { y } else { x };
            }
            parts.push(part);
        } else {
            forest.insert(e);
        }
    }
    // The remaining forest has even degree at internal vertices; peel paths from leaves.
    let mut deg = vec![0usize; g.num_vertices()];
    for e in forest.ones() {
        let (a, b) = g.edges[e];
        deg[a] += 1;
        deg[b] += 1;
    }
    while forest.count_ones(..) > 0 {
        let leaf = (0..g.num_vertices()).find(|&v| deg[v] == 1).ok_or(Error::NotACycle)?;
        if g.internal[leaf] {
            return Err(Error::NotACycle);
        }
        let mut part = g.empty_edges();
        let mut v = leaf;
        loop {
            let f = *g.incidence[v].iter().find(|&&f| forest.contains(f)).ok_or(Error::NotACycle)?;
            forest.set(f, false);
            part.insert(f);
            let (x, y) = g.edges[f];
            deg[x] -= 1;
            deg[y] -= 1;
            v = if x == v { y } else { x };
            if !g.internal[v] {
                break;
            }
        }
        parts.push(part);
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2(a: i32, b: i32) -> Site {
        Site::planar(a, b)
    }

    #[test]
    fn surface_d2_shape() {
        let p = LatticeParams::surface(2).unwrap();
        let (sc, scd) = build_surface(&p).unwrap();
        assert_eq!(sc.num_vertices(), 6);
        assert_eq!(sc.num_edges(), 5);
        assert!(sc.vertex_index(&s2(0, 0)).is_some());
        let (a, b) = (sc.vertex_index(&s2(0, 0)).unwrap(), sc.vertex_index(&s2(0, 2)).unwrap());
        assert!(!sc.edges.contains(&(a.min(b), a.max(b))));
        assert_eq!(scd.num_edges(), 5);
    }

    #[test]
    fn surface_decoding_examples() {
        let (dec, decd) = build_surface_decoding(&LatticeParams::surface(2).unwrap()).unwrap();
        assert_eq!(dec.labels, vec![s2(1, 2)]);
        assert_eq!(dec.num_internal(), 0);
        assert_eq!(dec.labels_of(dec.recovery_set("L_X").unwrap()), [s2(1, 2)].into_iter().collect());
        assert_eq!(decd.labels_of(decd.recovery_set("L_Z*").unwrap()), [s2(3, 0)].into_iter().collect());
        let (dec3, _) = build_surface_decoding(&LatticeParams::surface(3).unwrap()).unwrap();
        let v = dec3.vertex_index(&s2(2, 4)).unwrap();
        assert!(dec3.internal[v]);
    }

    #[test]
    fn cluster_label_bijection() {
        for (d, r) in [(2, 3), (2, 5), (3, 3), (3, 5), (4, 7)] {
            let p = LatticeParams::cluster(d, r).unwrap();
            let (dec, decd) = build_cluster_decoding(&p).unwrap();
            let n = cluster_qubits(&p).unwrap().len();
            assert_eq!(dec.num_edges() + decd.num_edges(), n - 2);
            let all: BTreeSet<Site> = dec.labels.iter().chain(&decd.labels).copied().collect();
            assert_eq!(all.len(), n - 2);
        }
    }

    #[test]
    fn distance_one_label() {
        let p = LatticeParams::cluster(2, 3).unwrap();
        let (dec, _) = build_cluster_decoding(&p).unwrap();
        let e = dec.edge_of_label(&Site::new(2, 2, 1)).unwrap();
        let (a, b) = dec.edges[e];
        let ends: BTreeSet<_> = [dec.vertices[a], dec.vertices[b]].into_iter().collect();
        assert_eq!(ends, [Site::new(2, 2, 1), Site::new(2, 2, 2)].into_iter().collect());
        let lb = dec.labels_of(dec.recovery_set("L_cl,X&B").unwrap());
        assert_eq!(lb, [Site::new(1, 2, 1), Site::new(1, 2, 3)].into_iter().collect());
    }

    #[test]
    fn path_between_externals_has_no_boundary() {
        let (dec, _) = build_surface_decoding(&LatticeParams::surface(3).unwrap()).unwrap();
        // (0,4) -(1,4)- (2,4) -(3,4)- (4,4)
        let es = dec.project_labels(&[s2(1, 4), s2(3, 4)]);
        assert_eq!(boundary(&dec, &es).unwrap().count_ones(..), 0);
        assert!(is_ext_path(&dec, &es));
    }

    #[test]
    fn boundary_size_check() {
        let (dec, _) = build_surface_decoding(&LatticeParams::surface(3).unwrap()).unwrap();
        assert!(matches!(boundary(&dec, &FixedBitSet::with_capacity(1)), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn dump_format() {
        let (dec, _) = build_surface_decoding(&LatticeParams::surface(2).unwrap()).unwrap();
        let text = dec.dump();
        assert!(text.contains("V 0 0 2 0 ext"));
        assert!(text.contains("E 0 0 1 1 2 0"));
        assert!(text.contains("R L_X 0"));
    }
}
