//! Closed-form values for the smallest side N such that every coloring
//! of K_{N,N} has some color i whose class contains a connected matching
//! of size t_i.
//!
//! Values are permutation-invariant in the thresholds, so evaluation
//! sorts first. All regime boundaries are half-integers; comparisons are
//! done in exact integer arithmetic (2l vs k+1 style), never floats.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("threshold entry {value} at position {index} is below 2")]
    EntryTooSmall { index: usize, value: usize },
    #[error("threshold vector must have 2 or 3 entries, got {0}")]
    BadArity(usize),
}

/// Per-color connected-matching thresholds, arity 2 or 3, entries >= 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdVector {
    entries: Vec<usize>,
}

impl ThresholdVector {
    pub fn new(entries: &[usize]) -> Result<Self, FormulaError> {
        if !(2..=3).contains(&entries.len()) {
            return Err(FormulaError::BadArity(entries.len()));
        }
        for (index, &value) in entries.iter().enumerate() {
            if value < 2 {
                return Err(FormulaError::EntryTooSmall { index, value });
            }
        }
        Ok(ThresholdVector {
            entries: entries.to_vec(),
        })
    }

    pub fn arity(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn sum(&self) -> usize {
        self.entries.iter().sum()
    }

    /// Stable argsort: positions of the entries in ascending value order.
    pub fn ascending_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.entries.len()).collect();
        order.sort_by_key(|&i| self.entries[i]);
        order
    }
}

impl std::fmt::Display for ThresholdVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Which closed-form branch produced a three-color value. Labels name
/// the formula in the letters of the dispatch: for three distinct
/// thresholds (k,l,m) sorted ascending, for two equal thresholds the
/// repeated value is l and the remaining one k.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    KPlus2M,
    TwoKPlus2L,
    KPlusLPlusM,
    KPlus2L,
    FourL,
    TwoKPlusL,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::KPlus2M => "k+2m-2",
            Regime::TwoKPlus2L => "2k+2l-3",
            Regime::KPlusLPlusM => "k+l+m-2",
            Regime::KPlus2L => "k+2l-2",
            Regime::FourL => "4l-2",
            Regime::TwoKPlusL => "2k+l-2",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Two-color value: k + l - 1.
pub fn r2(k: usize, l: usize) -> Result<usize, FormulaError> {
    let t = ThresholdVector::new(&[k, l])?;
    Ok(t.sum() - 1)
}

/// Three-color value with the branch that produced it.
pub fn r3(k: usize, l: usize, m: usize) -> Result<(usize, Regime), FormulaError> {
    ThresholdVector::new(&[k, l, m])?;
    let mut s = [k, l, m];
    s.sort_unstable();
    Ok(r3_sorted(s[0], s[1], s[2]))
}

/// Dispatch over sorted thresholds a <= b <= c.
///
/// Two equal largest entries: the k <= l branch, k+2l-2.
/// Two equal smallest entries: value of (c,a,a), split on where the
/// repeated entry a falls against c: below (c+1)/2, up to 2c/3, or
/// beyond. Three distinct entries: split on c against a+b-1 and
/// b+(a-1)/2. With a = 2 the latter two branches are empty over the
/// integers, so everything lands in the sum branch.
fn r3_sorted(a: usize, b: usize, c: usize) -> (usize, Regime) {
    debug_assert!(2 <= a && a <= b && b <= c);
    if b == c {
        (a + 2 * b - 2, Regime::KPlus2L)
    } else if a == b {
        if 2 * a <= c + 1 {
            (c + 2 * a - 2, Regime::KPlus2L)
        } else if 3 * a <= 2 * c {
            (4 * a - 2, Regime::FourL)
        } else {
            (2 * c + a - 2, Regime::TwoKPlusL)
        }
    } else if c >= a + b - 1 {
        (a + b + c - 2, Regime::KPlusLPlusM)
    } else if 2 * (c - b) < a {
        (a + 2 * c - 2, Regime::KPlus2M)
    } else {
        (2 * a + 2 * b - 3, Regime::TwoKPlus2L)
    }
}

/// Value with regime for either arity; two-color values carry no regime.
pub fn evaluate(t: &ThresholdVector) -> (usize, Option<Regime>) {
    match t.entries() {
        [k, l] => (k + l - 1, None),
        [k, l, m] => {
            let (v, regime) = r3(*k, *l, *m).expect("entries validated at construction");
            (v, Some(regime))
        }
        _ => unreachable!("arity validated at construction"),
    }
}

/// Floor every color can be forced under: sum of thresholds minus arity,
/// plus one. A strip coloring of that side minus one avoids all
/// thresholds, for any arity.
pub fn lower_bound_generic(t: &ThresholdVector) -> usize {
    t.sum() - t.arity() + 1
}
