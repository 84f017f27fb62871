//! Shared oracles for integration tests: full enumeration of complete
//! colorings, with no pruning and no symmetry reduction.

use cm_ramsey::formula::ThresholdVector;
use cm_ramsey::graph::ColorMatrix;
use cm_ramsey::matching::meets_threshold;

/// Visits every complete coloring of the n-by-n grid in base-`colors`
/// counting order until the visitor returns true; returns whether any
/// coloring was accepted.
pub fn any_complete_coloring<F>(n: usize, colors: usize, mut accept: F) -> bool
where
    F: FnMut(&ColorMatrix) -> bool,
{
    let cells = n * n;
    let mut digits = vec![0u8; cells];
    loop {
        let mut m = ColorMatrix::new_unassigned(n, colors).expect("valid shape");
        for (idx, &d) in digits.iter().enumerate() {
            m.set(idx / n, idx % n, d);
        }
        if accept(&m) {
            return true;
        }
        // Increment the base-`colors` counter; done on wraparound.
        let mut i = 0;
        loop {
            if i == cells {
                return false;
            }
            digits[i] += 1;
            if (digits[i] as usize) < colors {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Ground truth for search outcomes: does any complete coloring of side
/// n avoid every threshold?
pub fn exists_avoiding(n: usize, t: &ThresholdVector) -> bool {
    any_complete_coloring(n, t.arity(), |m| {
        !meets_threshold(m, t).expect("arity matches").any_met
    })
}
