//! Dense linear assignment by shortest augmenting paths (Jonker-Volgenant
//! style, O(n³)).

use ndarray::ArrayView2;

/// Returns `perm` minimizing `Σ_i cost[i, perm[i]]` for a square cost matrix.
///
/// Rows are inserted one at a time; each insertion runs a Dijkstra-like
/// search over reduced costs and augments along the shortest path. Ties are
/// broken by the lowest column index, so the result is deterministic.
pub fn solve(cost: ArrayView2<'_, f64>) -> Vec<usize> {
    let n = cost.nrows();
    assert_eq!(n, cost.ncols(), "assignment needs a square matrix");
    if n == 0 {
        return Vec::new();
    }

    // 1-based internal indexing; column 0 is the virtual source.
    let mut u = vec![0.0_f64; n + 1];
    let mut v = vec![0.0_f64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![0.0_f64; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        minv.fill(f64::INFINITY);
        used.fill(false);

        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            let row = cost.row(i0 - 1);
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = row[j - 1] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }

        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[row_of_col[j] - 1] = j - 1;
    }
    perm
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn small_cases() {
        assert_eq!(solve(array![[5.0]].view()), vec![0]);
        assert_eq!(solve(array![[1.0, 2.0], [3.0, 1.0]].view()), vec![0, 1]);
        assert_eq!(solve(array![[4.0, 1.0], [1.0, 4.0]].view()), vec![1, 0]);
        assert_eq!(
            solve(array![[4.0, 1.0, 3.0], [2.0, 0.0, 5.0], [3.0, 2.0, 2.0]].view()),
            vec![1, 0, 2]
        );
    }

    #[test]
    fn result_is_a_permutation() {
        let c = array![[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        let mut p = solve(c.view());
        p.sort_unstable();
        assert_eq!(p, vec![0, 1, 2]);
    }
}
