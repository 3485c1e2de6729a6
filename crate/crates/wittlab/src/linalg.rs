//! Fraction-free Gaussian elimination over polynomial rings, with
//! dependence tracking for explicit certificates.

use crate::fields::{CoefCtx, MPoly};

/// Result of eliminating a polynomial matrix.
pub struct PolyElimination {
    pub rank: usize,
    /// Pivot positions in elimination order.
    pub pivots: Vec<(usize, usize)>,
    /// First row found dependent on the pivot rows, with its combination.
    pub dependence: Option<Dependence>,
    /// The last pivot value (for square full-rank input this is the
    /// determinant of the matrix up to the pivot permutation sign).
    pub last_pivot: Option<MPoly>,
    /// Sign of the pivot row/column permutations.
    pub sign: i32,
}

/// An exact linear dependence among the original rows: the tracked
/// coefficients satisfy `sum_i combo[i] * row_i = 0` with `combo[row] != 0`.
pub struct Dependence {
    pub row: usize,
    pub combo: Vec<MPoly>,
}

fn perm_sign(seq: &[usize]) -> i32 {
    // parity of the permutation sorting `seq`
    let mut sign = 1;
    let mut seen = vec![false; seq.len()];
    let mut order: Vec<usize> = (0..seq.len()).collect();
    order.sort_by_key(|&k| seq[k]);
    for start in 0..order.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = order[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Bareiss elimination with full pivoting. Pivot choice: the lowest-index
/// unused row with a nonzero entry in an unused column, then its
/// lowest-index such column. Rows are never swapped, so original indices
/// survive; every remaining row is updated with the two-term fraction-free
/// rule, and an identity block tracks row combinations exactly.
///
/// Stops at the first row whose matrix part vanishes when `stop_at_dependence`
/// is set; otherwise runs to completion.
pub fn eliminate(
    ctx: &CoefCtx,
    nvars: usize,
    matrix: &[Vec<MPoly>],
    stop_at_dependence: bool,
) -> PolyElimination {
    let nrows = matrix.len();
    let ncols = matrix.first().map(Vec::len).unwrap_or(0);
    let one = MPoly::one(ctx.clone(), nvars);
    let mut m: Vec<Vec<MPoly>> = matrix.to_vec();
    let mut track: Vec<Vec<MPoly>> = (0..nrows)
        .map(|i| {
            (0..nrows)
                .map(|j| {
                    if i == j {
                        one.clone()
                    } else {
                        MPoly::zero(ctx.clone(), nvars)
                    }
                })
                .collect()
        })
        .collect();
    let mut row_used = vec![false; nrows];
    let mut col_used = vec![false; ncols];
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut prev = one.clone();
    let mut dependence = None;
    let mut last_pivot = None;

    loop {
        // locate the pivot and, along the way, the first exhausted row
        let mut pivot: Option<(usize, usize)> = None;
        for (i, row) in m.iter().enumerate() {
            if row_used[i] {
                continue;
            }
            let col = (0..ncols).find(|&j| !col_used[j] && !row[j].is_zero());
            match col {
                Some(j) => {
                    pivot = Some((i, j));
                    break;
                }
                None => {
                    if dependence.is_none() {
                        dependence = Some(Dependence {
                            row: i,
                            combo: track[i].clone(),
                        });
                        if stop_at_dependence {
                            let sign = {
                                let rows: Vec<usize> = pivots.iter().map(|&(r, _)| r).collect();
                                let cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
                                perm_sign(&rows) * perm_sign(&cols)
                            };
                            return PolyElimination {
                                rank: pivots.len(),
                                pivots,
                                dependence,
                                last_pivot,
                                sign,
                            };
                        }
                    }
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        let piv = m[pr][pc].clone();
        for i in 0..nrows {
            if row_used[i] || i == pr {
                continue;
            }
            let scale = m[i][pc].clone();
            let update = |target: &mut Vec<MPoly>, source: &[MPoly]| {
                for (t, s) in target.iter_mut().zip(source) {
                    let num = t.mul(&piv).sub(&s.mul(&scale));
                    *t = num
                        .exact_div(&prev)
                        .expect("fraction-free division is exact");
                }
            };
            let source_m = m[pr].clone();
            update(&mut m[i], &source_m);
            let source_t = track[pr].clone();
            update(&mut track[i], &source_t);
        }
        row_used[pr] = true;
        col_used[pc] = true;
        pivots.push((pr, pc));
        last_pivot = Some(piv.clone());
        prev = piv;
    }

    let sign = {
        let rows: Vec<usize> = pivots.iter().map(|&(r, _)| r).collect();
        let cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        perm_sign(&rows) * perm_sign(&cols)
    };
    PolyElimination {
        rank: pivots.len(),
        pivots,
        dependence,
        last_pivot,
        sign,
    }
}
