//! Minimum matchings of marked internal vertices.
//!
//! External vertices are virtual boundary nodes of a fusion-blossom solver.
//! All edge weights are equal, so minimum weight means minimum cardinality.

use fusion_blossom::mwpm_solver::{PrimalDualSolver, SolverSerial};
use fusion_blossom::util::{SolverInitializer, SyndromePattern};

use crate::error::{Error, Result};
use crate::graphs::{boundary, BoundaryGraph, EdgeSet, VertexSet};

pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Reusable solver bound to one graph's shape.
pub struct Matcher {
    solver: Option<SolverSerial>,
    num_edges: usize,
    num_internal: usize,
    // connected component per vertex, and whether it touches an external vertex
    component: Vec<usize>,
    grounded: Vec<bool>,
}

impl Matcher {
    pub fn new(g: &BoundaryGraph) -> Self {
        let edges: Vec<(usize, usize, isize)> = g.edges.iter().map(|&(a, b)| (a, b, 2)).collect();
        let virt: Vec<usize> = (0..g.num_vertices()).filter(|&v| !g.internal[v]).collect();
        let solver = (!edges.is_empty()).then(|| {
            SolverSerial::new(&SolverInitializer::new(g.num_vertices(), edges, virt))
        });

        let mut component = vec![usize::MAX; g.num_vertices()];
        let mut grounded = Vec::new();
        for s in 0..g.num_vertices() {
            if component[s] != usize::MAX {
                continue;
            }
            let c = grounded.len();
            let mut ext = false;
            let mut stack = vec![s];
            component[s] = c;
            while let Some(v) = stack.pop() {
                ext |= !g.internal[v];
                for &e in &g.incidence[v] {
                    let (a, b) = g.edges[e];
                    let w = if a == v { b } else { a };
                    if component[w] == usize::MAX {
                        component[w] = c;
                        stack.push(w);
                    }
                }
            }
            grounded.push(ext);
        }
        Matcher { solver, num_edges: g.num_edges(), num_internal: g.num_internal(), component, grounded }
    }

    pub fn solve(&mut self, g: &BoundaryGraph, marked: &VertexSet) -> Result<EdgeSet> {
        if g.num_edges() != self.num_edges || g.num_internal() != self.num_internal {
            return Err(Error::SizeMismatch { expected: self.num_edges, got: g.num_edges() });
        }
        if marked.len() != g.num_internal() {
            return Err(Error::SizeMismatch { expected: g.num_internal(), got: marked.len() });
        }
        let mut out = g.empty_edges();
        if marked.count_ones(..) == 0 {
            return Ok(out);
        }
        let defects: Vec<usize> = marked.ones().map(|i| g.internal_vertices()[i]).collect();
        let mut parity = vec![false; self.grounded.len()];
        for &v in &defects {
            parity[self.component[v]] ^= true;
        }
        if parity.iter().zip(&self.grounded).any(|(&odd, &ext)| odd && !ext) {
            return Err(Error::Infeasible);
        }
        let solver = self.solver.as_mut().ok_or(Error::Infeasible)?;
        solver.solve(&SyndromePattern::new_vertices(defects));
        for e in solver.subgraph() {
            out.toggle(e);
        }
        solver.clear();
        if boundary(g, &out)? != *marked {
            return Err(Error::Infeasible);
        }
        Ok(out)
    }
}

/// One-shot minimum matching; prefer [`Matcher`] in loops.
pub fn min_match(g: &BoundaryGraph, marked: &VertexSet) -> Result<EdgeSet> {
    Matcher::new(g).solve(g, marked)
}

/// First subset (by cardinality, then lexicographic edge indices) with boundary `marked`.
pub fn brute_force_min_match(g: &BoundaryGraph, marked: &VertexSet) -> Result<EdgeSet> {
    let m = g.num_edges();
    if m > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { edges: m, limit: BRUTE_FORCE_LIMIT });
    }
    if marked.len() != g.num_internal() {
        return Err(Error::SizeMismatch { expected: g.num_internal(), got: marked.len() });
    }
    // boundary of each edge as a bitmask over internal vertices
    let words = g.num_internal().div_ceil(64).max(1);
    let mut edge_bd = vec![vec![0u64; words]; m];
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        for v in [a, b] {
            if let Some(i) = g.internal_index(v) {
                edge_bd[e][i / 64] ^= 1 << (i % 64);
            }
        }
    }
    let mut target = vec![0u64; words];
    for i in marked.ones() {
        target[i / 64] |= 1 << (i % 64);
    }
    let mut acc = vec![0u64; words];
    for k in 0..=m {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            acc.iter_mut().for_each(|w| *w = 0);
            for &e in &idx {
                for (w, x) in acc.iter_mut().zip(&edge_bd[e]) {
                    *w ^= x;
                }
            }
            if acc == target {
                let mut out = g.empty_edges();
                idx.iter().for_each(|&e| out.insert(e));
                return Ok(out);
            }
            // next k-combination in lexicographic order
            let mut i = k;
            while i > 0 && idx[i - 1] == i - 1 + m - k {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Err(Error::Infeasible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{LatticeParams, Site};
    use crate::graphs::build_surface_decoding;

    #[test]
    fn empty_marked() {
        let (dec, decd) = build_surface_decoding(&LatticeParams::surface(3).unwrap()).unwrap();
        for g in [&dec, &decd] {
            assert_eq!(min_match(g, &g.empty_vertices()).unwrap().count_ones(..), 0);
            assert_eq!(brute_force_min_match(g, &g.empty_vertices()).unwrap().count_ones(..), 0);
        }
    }

    #[test]
    fn single_internal_d3() {
        let (dec, _) = build_surface_decoding(&LatticeParams::surface(3).unwrap()).unwrap();
        let marked = dec.vertex_set_of(&[Site::planar(2, 4)]).unwrap();
        let m = min_match(&dec, &marked).unwrap();
        assert_eq!(m.count_ones(..), 1);
        assert_eq!(brute_force_min_match(&dec, &marked).unwrap().count_ones(..), 1);
    }

    #[test]
    fn all_subsets_agree_d3() {
        let (dec, decd) = build_surface_decoding(&LatticeParams::surface(3).unwrap()).unwrap();
        for g in [&dec, &decd] {
            let mut matcher = Matcher::new(g);
            for mask in 0u32..(1 << g.num_internal()) {
                let mut vs = g.empty_vertices();
                (0..g.num_internal()).filter(|i| mask >> i & 1 == 1).for_each(|i| vs.insert(i));
                let a = matcher.solve(g, &vs).unwrap();
                let b = brute_force_min_match(g, &vs).unwrap();
                assert_eq!(a.count_ones(..), b.count_ones(..));
                assert_eq!(boundary(g, &a).unwrap(), vs);
            }
        }
    }
}
