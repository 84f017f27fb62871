//! Extremal colorings: matrices one short of the closed-form value on
//! which every color stays below its threshold.
//!
//! Two families. The strip coloring works for any thresholds: color i
//! owns t_i - 1 full rows, so its class is complete bipartite with
//! t_i - 1 side-one vertices and caps at a (t_i - 1)-matching. The block
//! coloring partitions rows into three groups and columns into four and
//! beats the strip for three distinct thresholds below the sum regime.

use crate::formula::{self, ThresholdVector};
use crate::graph::ColorMatrix;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("block construction needs k >= 3, got {0}")]
    KTooSmall(usize),
    #[error("block construction needs k < l < m, got k={k}, l={l}, m={m}")]
    NotStrictlyIncreasing { k: usize, l: usize, m: usize },
    #[error("block offset i={i} is outside 0..={max}")]
    OffsetOutOfRange { i: usize, max: usize },
    #[error("block construction needs 2(m-l) <= k+i-1, got k={k}, l={l}, m={m}, i={i}")]
    MTooLarge {
        k: usize,
        l: usize,
        m: usize,
        i: usize,
    },
}

// ==== strip ====

/// Strip layout for a threshold vector: color i covers t_i - 1 rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripSpec {
    pub thresholds: ThresholdVector,
}

impl StripSpec {
    pub fn side(&self) -> usize {
        self.thresholds.sum() - self.thresholds.arity()
    }
}

/// The strip coloring of side sum(t) - arity, strips in color order.
pub fn build_strip(t: &ThresholdVector) -> ColorMatrix {
    let n = t.sum() - t.arity();
    let mut m = ColorMatrix::new_unassigned(n, t.arity()).expect("side >= 2 for entries >= 2");
    let mut row = 0;
    for (color, &ti) in t.entries().iter().enumerate() {
        for _ in 0..ti - 1 {
            for w in 0..n {
                m.set(row, w, color as u8);
            }
            row += 1;
        }
    }
    debug_assert_eq!(row, n);
    m
}

// ==== block ====

/// Validated block layout. Rows split into three contiguous groups of
/// sizes m-1, m-1, k-1-i; columns into four contiguous groups that sum
/// to the side k+2m-i-3. When 2(m-l) <= i the fourth group is empty and
/// the first three fill greedily against caps l-1, l-1, k-1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpec {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub i: usize,
    pub s_sizes: [usize; 3],
    pub t_sizes: [usize; 4],
}

impl BlockSpec {
    pub fn new(k: usize, l: usize, m: usize, i: usize) -> Result<Self, ConstructionError> {
        if k < 3 {
            return Err(ConstructionError::KTooSmall(k));
        }
        if !(k < l && l < m) {
            return Err(ConstructionError::NotStrictlyIncreasing { k, l, m });
        }
        if i > k - 2 {
            return Err(ConstructionError::OffsetOutOfRange { i, max: k - 2 });
        }
        if 2 * (m - l) > k + i - 1 {
            return Err(ConstructionError::MTooLarge { k, l, m, i });
        }
        let side = k + 2 * m - i - 3;
        let s_sizes = [m - 1, m - 1, k - 1 - i];
        let t_sizes = if 2 * (m - l) > i {
            let t4 = 2 * (m - l) - i;
            debug_assert!(t4 < k);
            [l - 1, l - 1, k - 1, t4]
        } else {
            let t1 = (l - 1).min(side);
            let t2 = (l - 1).min(side - t1);
            let t3 = side - t1 - t2;
            debug_assert!(t3 < k);
            [t1, t2, t3, 0]
        };
        debug_assert_eq!(s_sizes.iter().sum::<usize>(), side);
        debug_assert_eq!(t_sizes.iter().sum::<usize>(), side);
        Ok(BlockSpec {
            k,
            l,
            m,
            i,
            s_sizes,
            t_sizes,
        })
    }

    pub fn side(&self) -> usize {
        self.k + 2 * self.m - self.i - 3
    }
}

// Cell colors by (row group, column group): 0 stays below k, 1 below l,
// 2 below m.
const BLOCK_PATTERN: [[u8; 4]; 3] = [[2, 1, 2, 0], [1, 2, 0, 2], [0, 0, 1, 1]];

/// The block coloring for (k, l, m, i); avoids (k, l, m) at side
/// k+2m-i-3 with color 0 below k, color 1 below l, color 2 below m.
pub fn build_block(
    k: usize,
    l: usize,
    m: usize,
    i: usize,
) -> Result<ColorMatrix, ConstructionError> {
    let spec = BlockSpec::new(k, l, m, i)?;
    Ok(build_from_block_spec(&spec))
}

pub fn build_from_block_spec(spec: &BlockSpec) -> ColorMatrix {
    let n = spec.side();
    let mut out = ColorMatrix::new_unassigned(n, 3).expect("side >= 2");
    let mut row = 0;
    for (si, &rows) in spec.s_sizes.iter().enumerate() {
        for _ in 0..rows {
            let mut col = 0;
            for (ti, &cols) in spec.t_sizes.iter().enumerate() {
                for _ in 0..cols {
                    out.set(row, col, BLOCK_PATTERN[si][ti]);
                    col += 1;
                }
            }
            row += 1;
        }
    }
    debug_assert!(out.is_complete());
    out
}

// ==== witness selection ====

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    Strip,
    Block { i: usize },
}

/// Whether the witness side reaches value - 1, certifying the value as
/// tight. Strip witnesses for some repeated-threshold tuples fall short;
/// those are marked Unknown rather than guessed at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Optimality {
    Optimal,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub matrix: ColorMatrix,
    pub kind: WitnessKind,
    pub optimality: Optimality,
    /// The closed-form value the witness argues against.
    pub target: usize,
}

/// Largest known avoiding coloring for the thresholds. Distinct
/// three-color thresholds always get a matrix of side target - 1: the
/// strip in the sum regime, otherwise a block whose offset i is 0 in the
/// k+2m regime and 2(c-b)-a+1 in the doubled regime (the unique solution
/// of k+2m-i-2 = 2k+2l-3, which lands inside the block constraints
/// exactly over that regime; construction still re-validates it).
pub fn best_witness(t: &ThresholdVector) -> Witness {
    let (target, _) = formula::evaluate(t);
    let strip = |matrix: ColorMatrix| {
        let optimality = if matrix.n() == target - 1 {
            Optimality::Optimal
        } else {
            Optimality::Unknown
        };
        Witness {
            matrix,
            kind: WitnessKind::Strip,
            optimality,
            target,
        }
    };
    if t.arity() == 2 {
        return strip(build_strip(t));
    }
    let order = t.ascending_order();
    let e = t.entries();
    let (a, b, c) = (e[order[0]], e[order[1]], e[order[2]]);
    if a == b || b == c || c >= a + b - 1 {
        return strip(build_strip(t));
    }
    let i = if 2 * (c - b) < a {
        0
    } else {
        2 * (c - b) + 1 - a
    };
    let block = build_block(a, b, c, i).expect("offset lies inside block constraints");
    debug_assert_eq!(block.n(), target - 1);
    // Undo the sort: built color j guards the j-th smallest threshold.
    let mut map = vec![0u8; 3];
    for (j, &pos) in order.iter().enumerate() {
        map[j] = pos as u8;
    }
    Witness {
        matrix: block.relabeled(&map),
        kind: WitnessKind::Block { i },
        optimality: Optimality::Optimal,
        target,
    }
}
