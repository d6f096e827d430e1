use serde::Serialize;

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::{Rational, RationalRepr, SqrtRational};

pub const REGULARITY_MAX_SIDE: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityViolation {
    pub a_sub: Vec<usize>,
    pub b_sub: Vec<usize>,
    pub density: RationalRepr,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityCheck {
    pub regular: bool,
    pub density: RationalRepr,
    /// Subsets `A'` examined.
    pub subsets: u64,
    pub violation: Option<RegularityViolation>,
}

/// Exact `ζ`-regularity of `(A, B)`: every `A' ⊆ A`, `B' ⊆ B` with
/// `|A'| >= ζ|A|` and `|B'| >= ζ|B|` has `|d(A', B') - d(A, B)| < ζ`.
///
/// `A'` runs over all subsets. For a fixed `A'` and size `s`, the
/// densities of the `s`-subsets of `B` are bracketed by the `s` columns
/// with the fewest and the most neighbours in `A'`, so two candidates per
/// size decide all of them. The reported violation is the first in order
/// of `A'` mask, then size, then low side before high side.
pub fn brute_force_regular(
    g: &Graph,
    a_set: &VertexSet,
    b_set: &VertexSet,
    zeta: SqrtRational,
) -> Result<RegularityCheck> {
    for side in [a_set, b_set] {
        if side.is_empty() {
            return Err(Error::EmptySide);
        }
        if side.len() > REGULARITY_MAX_SIDE {
            return Err(Error::OracleScaleExceeded {
                size: side.len(),
                max: REGULARITY_MAX_SIDE,
            });
        }
    }
    let a: Vec<usize> = a_set.to_vec();
    let b: Vec<usize> = b_set.to_vec();
    // column masks: bit i set when b sees a[i]
    let cols: Vec<u32> = b
        .iter()
        .map(|&y| a.iter().enumerate().fold(0, |m, (i, &x)| m | (g.has_edge(x, y) as u32) << i))
        .collect();
    let total: i64 = cols.iter().map(|c| c.count_ones() as i64).sum();
    let d = Rational::new(total, (a.len() * b.len()) as i64);
    let min_b = (1..=b.len()).find(|&s| zeta.count_reaches(s, b.len())).unwrap_or(b.len());

    let mut subsets = 0;
    for mask in 1u32..1 << a.len() {
        let size_a = mask.count_ones() as usize;
        if !zeta.count_reaches(size_a, a.len()) {
            continue;
        }
        subsets += 1;
        let mut order: Vec<(u32, usize)> =
            cols.iter().enumerate().map(|(j, c)| ((c & mask).count_ones(), j)).collect();
        order.sort();
        for s in min_b..=b.len() {
            let sides = [&order[..s], &order[order.len() - s..]];
            for side in sides {
                let edges: i64 = side.iter().map(|&(c, _)| c as i64).sum();
                let sub = Rational::new(edges, (size_a * s) as i64);
                let gap = sub - d;
                let gap = if gap < Rational::from_integer(0) { -gap } else { gap };
                if !zeta.exceeds(gap) {
                    let mut b_sub: Vec<usize> = side.iter().map(|&(_, j)| b[j]).collect();
                    b_sub.sort();
                    return Ok(RegularityCheck {
                        regular: false,
                        density: d.into(),
                        subsets,
                        violation: Some(RegularityViolation {
                            a_sub: (0..a.len()).filter(|i| mask >> i & 1 == 1).map(|i| a[i]).collect(),
                            b_sub,
                            density: sub.into(),
                        }),
                    });
                }
            }
        }
    }
    Ok(RegularityCheck {
        regular: true,
        density: d.into(),
        subsets,
        violation: None,
    })
}
