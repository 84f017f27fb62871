//! Maximum matchings, minimum vertex covers, and connected-matching
//! profiles of color classes.
//!
//! A color meets threshold k when some connected component of its class
//! contains a matching of k edges. Matchings are computed per component
//! with Hopcroft-Karp; the certifying cover comes from the matching by
//! alternating reachability, so matching and cover sizes always agree.

use crate::bits::Bits;
use crate::formula::ThresholdVector;
use crate::graph::{
    build_color_class, components, ColorClassGraph, ColorMatrix, Component, ComponentDecomposition,
};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use thiserror::Error;

/// Largest component size accepted by the subset-enumeration cover oracle.
pub const BRUTE_FORCE_LIMIT: usize = 20;

const NIL: usize = usize::MAX;
const INF: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchingError {
    #[error("threshold arity {arity} does not match color count {colors}")]
    ArityMismatch { arity: usize, colors: u8 },
    #[error("component has {vertices} vertices, exceeding the brute-force limit of {limit}")]
    TooLarge { vertices: usize, limit: usize },
}

// ==== Hopcroft-Karp ====

/// Maximum matching over the given side-one vertices. All their neighbors
/// are pulled in implicitly, so passing a component's side-one list
/// matches within that component. Returns (size, pair_u, pair_w) with
/// NIL entries for unmatched vertices.
fn hopcroft_karp(left: &[usize], adj: &[Bits], n: usize) -> (usize, Vec<usize>, Vec<usize>) {
    let mut pair_u = vec![NIL; n];
    let mut pair_w = vec![NIL; n];
    let mut dist = vec![INF; n];
    let mut queue = VecDeque::new();
    let mut size = 0;

    loop {
        // Layer side-one vertices by alternating BFS from the free ones.
        queue.clear();
        for &u in left {
            if pair_u[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = INF;
            }
        }
        let mut reached_free = false;
        while let Some(u) = queue.pop_front() {
            for w in adj[u].ones() {
                let u2 = pair_w[w];
                if u2 == NIL {
                    reached_free = true;
                } else if dist[u2] == INF {
                    dist[u2] = dist[u] + 1;
                    queue.push_back(u2);
                }
            }
        }
        if !reached_free {
            break;
        }
        for &u in left {
            if pair_u[u] == NIL && augment(u, adj, &mut pair_u, &mut pair_w, &mut dist) {
                size += 1;
            }
        }
    }
    (size, pair_u, pair_w)
}

fn augment(
    u: usize,
    adj: &[Bits],
    pair_u: &mut [usize],
    pair_w: &mut [usize],
    dist: &mut [u32],
) -> bool {
    for w in adj[u].ones() {
        let u2 = pair_w[w];
        let advances = u2 == NIL
            || (dist[u2] == dist[u].wrapping_add(1) && augment(u2, adj, pair_u, pair_w, dist));
        if advances {
            pair_u[u] = w;
            pair_w[w] = u;
            return true;
        }
    }
    dist[u] = INF;
    false
}

/// Matching size alone, for hot paths that need no certificate.
pub(crate) fn matching_size(left: &[usize], adj: &[Bits], n: usize) -> usize {
    hopcroft_karp(left, adj, n).0
}

// ==== certificates ====

/// A maximum matching of one component together with a minimum vertex
/// cover of equal size. Matching edges are (u, w) with side-local
/// indices; cover vertices use the 0..2n global space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingCertificate {
    pub matching: Vec<(usize, usize)>,
    pub cover: Vec<usize>,
    pub component_label: usize,
}

impl MatchingCertificate {
    pub fn size(&self) -> usize {
        self.matching.len()
    }
}

/// Maximum matching plus certifying cover for one component.
///
/// The cover contains the side-one vertices not reachable from free
/// side-one vertices by alternating paths, plus the reachable side-two
/// vertices. Its size always equals the matching size.
pub fn max_matching(
    g: &ColorClassGraph,
    decomp: &ComponentDecomposition,
    label: usize,
) -> MatchingCertificate {
    let comp = &decomp.components[label];
    let n = g.n();
    let (size, pair_u, pair_w) = hopcroft_karp(&comp.v1, adjacency(g), n);

    let mut matching: Vec<(usize, usize)> = comp
        .v1
        .iter()
        .filter(|&&u| pair_u[u] != NIL)
        .map(|&u| (u, pair_u[u]))
        .collect();
    matching.sort_unstable();

    // Alternating reachability from free side-one vertices: forward over
    // non-matching edges, back over matching edges.
    let mut reach_u = vec![false; n];
    let mut reach_w = vec![false; n];
    let mut stack: Vec<usize> = comp
        .v1
        .iter()
        .copied()
        .filter(|&u| pair_u[u] == NIL)
        .collect();
    for &u in &stack {
        reach_u[u] = true;
    }
    while let Some(u) = stack.pop() {
        for w in g.side1_adj(u).ones() {
            if pair_u[u] == w || reach_w[w] {
                continue;
            }
            reach_w[w] = true;
            let u2 = pair_w[w];
            if u2 != NIL && !reach_u[u2] {
                reach_u[u2] = true;
                stack.push(u2);
            }
        }
    }
    let mut cover: Vec<usize> = comp.v1.iter().copied().filter(|&u| !reach_u[u]).collect();
    cover.extend(
        comp.v2
            .iter()
            .copied()
            .filter(|&w| reach_w[w])
            .map(|w| n + w),
    );
    cover.sort_unstable();
    debug_assert_eq!(cover.len(), size);

    MatchingCertificate {
        matching,
        cover,
        component_label: label,
    }
}

fn adjacency(g: &ColorClassGraph) -> &[Bits] {
    // Side-one rows drive both matching and cover traversals.
    g.side1_rows()
}

/// Exact minimum vertex cover size by subset enumeration, smallest
/// subsets first. Independent of the matching path; intended as an
/// oracle for it.
pub fn brute_force_min_cover(
    g: &ColorClassGraph,
    decomp: &ComponentDecomposition,
    label: usize,
) -> Result<usize, MatchingError> {
    let comp = &decomp.components[label];
    let v = comp.vertex_count();
    if v > BRUTE_FORCE_LIMIT {
        return Err(MatchingError::TooLarge {
            vertices: v,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    // Local indices: component side-one vertices first, then side-two.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (iu, &u) in comp.v1.iter().enumerate() {
        for w in g.side1_adj(u).ones() {
            let iw = comp.v2.binary_search(&w).expect("component is closed");
            edges.push((iu, comp.v1.len() + iw));
        }
    }
    for size in 0..=v {
        let mut mask: u64 = (1u64 << size) - 1;
        let end: u64 = 1u64 << v;
        while mask < end {
            if edges
                .iter()
                .all(|&(a, b)| mask >> a & 1 == 1 || mask >> b & 1 == 1)
            {
                return Ok(size);
            }
            if mask == 0 {
                break;
            }
            // Gosper's hack: next mask with the same popcount.
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    unreachable!("taking all vertices always covers");
}

// ==== per-color profiles ====

/// Best connected-matching data for one color: the largest matching size
/// over the class's components, the label of the first component
/// attaining it, and that component's certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorProfile {
    pub best_size: usize,
    pub best_component: Option<usize>,
    pub certificate: Option<MatchingCertificate>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectedMatchingProfile {
    pub colors: Vec<ColorProfile>,
}

fn best_in_class(g: &ColorClassGraph, decomp: &ComponentDecomposition) -> ColorProfile {
    let mut best = ColorProfile {
        best_size: 0,
        best_component: None,
        certificate: None,
    };
    // Ties resolve to the smallest label because iteration ascends.
    for label in 0..decomp.components.len() {
        let cert = max_matching(g, decomp, label);
        if cert.size() > best.best_size {
            best.best_size = cert.size();
            best.best_component = Some(label);
            best.certificate = Some(cert);
        }
    }
    best
}

/// Largest connected matching per color. Unassigned cells contribute no
/// edges, so on a search partial this profiles the assigned prefix.
pub fn connected_matching_profile(m: &ColorMatrix) -> ConnectedMatchingProfile {
    let colors = (0..m.colors())
        .map(|c| {
            let g = build_color_class(m, c).expect("color in range");
            let d = components(&g);
            best_in_class(&g, &d)
        })
        .collect();
    ConnectedMatchingProfile { colors }
}

// ==== threshold reports ====

/// Per-color verdict of a threshold check, with the certifying component
/// detail whenever the class has any edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorReport {
    pub best_size: usize,
    pub threshold: usize,
    pub met: bool,
    pub component_vertices: Vec<usize>,
    pub matching_edges: Vec<(usize, usize)>,
    pub cover_vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub colors: Vec<ColorReport>,
    pub any_met: bool,
}

/// Checks every color against its threshold. A coloring is an avoiding
/// witness exactly when `any_met` is false.
pub fn meets_threshold(
    m: &ColorMatrix,
    t: &ThresholdVector,
) -> Result<WitnessReport, MatchingError> {
    if t.arity() != m.colors() as usize {
        return Err(MatchingError::ArityMismatch {
            arity: t.arity(),
            colors: m.colors(),
        });
    }
    let n = m.n();
    let mut colors = Vec::with_capacity(t.arity());
    for c in 0..m.colors() {
        let g = build_color_class(m, c).expect("color in range");
        let d = components(&g);
        let best = best_in_class(&g, &d);
        let threshold = t.entries()[c as usize];
        let (component_vertices, matching_edges, cover_vertices) =
            match (&best.certificate, best.best_component) {
                (Some(cert), Some(label)) => (
                    d.components[label].global_vertices(n),
                    cert.matching.clone(),
                    cert.cover.clone(),
                ),
                _ => (Vec::new(), Vec::new(), Vec::new()),
            };
        colors.push(ColorReport {
            best_size: best.best_size,
            threshold,
            met: best.best_size >= threshold,
            component_vertices,
            matching_edges,
            cover_vertices,
        });
    }
    let any_met = colors.iter().any(|r| r.met);
    Ok(WitnessReport { colors, any_met })
}

/// True when `comp`'s vertices can host a matching of size k at all.
/// Sanity bound: a k-matching needs k vertices on each side.
pub fn component_admits(comp: &Component, k: usize) -> bool {
    comp.v1.len() >= k && comp.v2.len() >= k
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn class(m: &ColorMatrix, c: u8) -> (ColorClassGraph, ComponentDecomposition) {
        let g = build_color_class(m, c).unwrap();
        let d = components(&g);
        (g, d)
    }

    /// Oracle: maximum matching by enumerating all subsets of an edge list.
    fn max_matching_by_enumeration(edges: &[(usize, usize)]) -> usize {
        let mut best = 0;
        for mask in 0u32..1 << edges.len() {
            let picked: Vec<(usize, usize)> = edges
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let disjoint = picked
                .iter()
                .enumerate()
                .all(|(i, &(u, w))| picked[..i].iter().all(|&(u2, w2)| u != u2 && w != w2));
            if disjoint {
                best = best.max(picked.len());
            }
        }
        best
    }

    #[test]
    fn complete_k33_has_perfect_matching() {
        let m = ColorMatrix::filled(3, 2, 0).unwrap();
        let (g, d) = class(&m, 0);
        let cert = max_matching(&g, &d, 0);
        assert_eq!(cert.size(), 3);
        assert_eq!(cert.cover.len(), 3);
        assert_eq!(brute_force_min_cover(&g, &d, 0), Ok(3));
    }

    #[test]
    fn star_matches_once_and_covers_at_center() {
        // K_{1,4}: vertex 0 joined to all of side two, inside n=4.
        let mut m = ColorMatrix::filled(4, 2, 1).unwrap();
        for w in 0..4 {
            m.set(0, w, 0);
        }
        let (g, d) = class(&m, 0);
        let cert = max_matching(&g, &d, 0);
        assert_eq!(cert.size(), 1);
        assert_eq!(cert.cover, vec![0]);
        assert_eq!(brute_force_min_cover(&g, &d, 0), Ok(1));
    }

    #[test]
    fn six_cycle_matches_perfectly() {
        // u0-w0-u1-w1-u2-w2-u0 inside n=3.
        let cycle = [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (0, 2)];
        assert_eq!(max_matching_by_enumeration(&cycle), 3);
        let mut m = ColorMatrix::filled(3, 2, 1).unwrap();
        for &(u, w) in &cycle {
            m.set(u, w, 0);
        }
        let (g, d) = class(&m, 0);
        assert_eq!(d.components.len(), 1);
        let cert = max_matching(&g, &d, 0);
        assert_eq!(cert.size(), 3);
        assert_eq!(cert.cover.len(), 3);
    }

    #[test]
    fn three_edge_path_covers_with_two() {
        // u0-w0-u1-w1 inside n=2.
        let mut m = ColorMatrix::filled(2, 2, 1).unwrap();
        m.set(0, 0, 0);
        m.set(1, 0, 0);
        m.set(1, 1, 0);
        let (g, d) = class(&m, 0);
        assert_eq!(brute_force_min_cover(&g, &d, 0), Ok(2));
        let cert = max_matching(&g, &d, 0);
        assert_eq!(cert.size(), 2);
        assert_eq!(cert.cover.len(), 2);
        for &(u, w) in &[(0, 0), (1, 0), (1, 1)] {
            assert!(
                cert.cover.contains(&u) || cert.cover.contains(&(2 + w)),
                "edge ({u},{w}) escapes cover {:?}",
                cert.cover
            );
        }
    }

    #[test]
    fn brute_force_refuses_oversized_components() {
        let m = ColorMatrix::filled(11, 2, 0).unwrap();
        let (g, d) = class(&m, 0);
        assert_eq!(
            brute_force_min_cover(&g, &d, 0),
            Err(MatchingError::TooLarge {
                vertices: 22,
                limit: 20
            })
        );
    }

    #[test]
    fn profile_of_constant_coloring() {
        let m = ColorMatrix::filled(3, 2, 0).unwrap();
        let p = connected_matching_profile(&m);
        assert_eq!(p.colors[0].best_size, 3);
        assert_eq!(p.colors[0].best_component, Some(0));
        assert_eq!(p.colors[1].best_size, 0);
        assert_eq!(p.colors[1].best_component, None);
    }

    #[test]
    fn threshold_on_complete_red_k22() {
        let m = ColorMatrix::filled(2, 2, 0).unwrap();
        let t = ThresholdVector::new(&[2, 2]).unwrap();
        let report = meets_threshold(&m, &t).unwrap();
        assert!(report.any_met);
        assert!(report.colors[0].met);
        assert_eq!(report.colors[0].best_size, 2);
        assert!(!report.colors[1].met);
    }

    #[test]
    fn threshold_on_two_row_strip() {
        // Row 0 color 0, row 1 color 1: both classes are stars.
        let mut m = ColorMatrix::new_unassigned(2, 2).unwrap();
        for w in 0..2 {
            m.set(0, w, 0);
            m.set(1, w, 1);
        }
        let t = ThresholdVector::new(&[2, 2]).unwrap();
        let report = meets_threshold(&m, &t).unwrap();
        assert!(!report.any_met);
        assert_eq!(report.colors[0].best_size, 1);
        assert_eq!(report.colors[1].best_size, 1);
    }

    #[test]
    fn every_two_coloring_of_k33_meets_2_2() {
        let t = ThresholdVector::new(&[2, 2]).unwrap();
        for code in 0u32..1 << 9 {
            let mut m = ColorMatrix::new_unassigned(3, 2).unwrap();
            for cell in 0..9 {
                m.set(cell / 3, cell % 3, (code >> cell & 1) as u8);
            }
            assert!(
                meets_threshold(&m, &t).unwrap().any_met,
                "coloring {code} avoids both thresholds"
            );
        }
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let m = ColorMatrix::filled(2, 2, 0).unwrap();
        let t = ThresholdVector::new(&[2, 2, 2]).unwrap();
        assert_eq!(
            meets_threshold(&m, &t),
            Err(MatchingError::ArityMismatch {
                arity: 3,
                colors: 2
            })
        );
    }

    fn arb_matrix(max_n: usize) -> impl Strategy<Value = ColorMatrix> {
        (1usize..=max_n, 2usize..=3).prop_flat_map(|(n, colors)| {
            proptest::collection::vec(0u8..colors as u8, n * n).prop_map(move |cells| {
                let mut m = ColorMatrix::new_unassigned(n, colors).unwrap();
                for u in 0..n {
                    for w in 0..n {
                        m.set(u, w, cells[u * n + w]);
                    }
                }
                m
            })
        })
    }

    proptest! {
        // Matching size, cover size, and the subset-enumeration oracle
        // agree on every component, and covers actually cover.
        #[test]
        fn matching_equals_cover_equals_oracle(m in arb_matrix(5)) {
            for c in 0..m.colors() {
                let (g, d) = class(&m, c);
                for label in 0..d.components.len() {
                    let cert = max_matching(&g, &d, label);
                    prop_assert_eq!(cert.cover.len(), cert.size());
                    prop_assert_eq!(brute_force_min_cover(&g, &d, label), Ok(cert.size()));
                    let comp = &d.components[label];
                    prop_assert!(component_admits(comp, cert.size()));
                    for &u in &comp.v1 {
                        for w in g.side1_adj(u).ones() {
                            prop_assert!(
                                cert.cover.contains(&u) || cert.cover.contains(&(m.n() + w))
                            );
                        }
                    }
                    let mut used1: Vec<usize> = cert.matching.iter().map(|e| e.0).collect();
                    let mut used2: Vec<usize> = cert.matching.iter().map(|e| e.1).collect();
                    used1.dedup();
                    used2.sort_unstable();
                    used2.dedup();
                    prop_assert_eq!(used1.len(), cert.size());
                    prop_assert_eq!(used2.len(), cert.size());
                    for &(u, w) in &cert.matching {
                        prop_assert!(g.has_edge(u, w));
                    }
                }
            }
        }

        // Recoloring a single cell to color c never shrinks c's best
        // connected matching and never grows any other color's.
        #[test]
        fn recolor_monotonicity(m in arb_matrix(5), cell in 0usize..25, to in 0u8..3) {
            let n = m.n();
            let (u, w) = (cell % n, (cell / n) % n);
            let to = to % m.colors();
            let before = connected_matching_profile(&m);
            let mut m2 = m.clone();
            m2.set(u, w, to);
            let after = connected_matching_profile(&m2);
            for c in 0..m.colors() as usize {
                if c == to as usize {
                    prop_assert!(after.colors[c].best_size >= before.colors[c].best_size);
                } else {
                    prop_assert!(after.colors[c].best_size <= before.colors[c].best_size);
                }
            }
        }
    }
}
