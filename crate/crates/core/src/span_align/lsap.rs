//! Linear sum assignment (Hungarian algorithm with potentials).
//!
//! Dense O(n^2 m) over integer costs, rows ≤ columns. Rectangular inputs with
//! more rows than columns are transposed by the caller-facing wrapper.

const INF: i64 = i64::MAX / 4;

/// Minimum-cost assignment of every row to a distinct column.
///
/// Returns `assignment[row] = column`. Requires `rows <= cols`.
fn solve_wide(costs: &[Vec<i64>], cols: usize) -> Vec<usize> {
    let n = costs.len();
    let m = cols;
    debug_assert!(n <= m);
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![INF; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = costs[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![usize::MAX; n];
    for j in 1..=m {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Minimum-cost assignment for a rectangular cost matrix.
///
/// Every row is assigned when `rows <= cols`, otherwise every column is.
/// Returns `Some(column)` per row.
pub fn linear_sum_assignment(costs: &[Vec<i64>]) -> Vec<Option<usize>> {
    let rows = costs.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = costs[0].len();
    debug_assert!(costs.iter().all(|r| r.len() == cols));
    if cols == 0 {
        return vec![None; rows];
    }
    if rows <= cols {
        solve_wide(costs, cols).into_iter().map(Some).collect()
    } else {
        let transposed: Vec<Vec<i64>> = (0..cols)
            .map(|j| (0..rows).map(|i| costs[i][j]).collect())
            .collect();
        let col_to_row = solve_wide(&transposed, rows);
        let mut out = vec![None; rows];
        for (j, &i) in col_to_row.iter().enumerate() {
            out[i] = Some(j);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total(costs: &[Vec<i64>], a: &[Option<usize>]) -> i64 {
        a.iter()
            .enumerate()
            .filter_map(|(i, j)| j.map(|j| costs[i][j]))
            .sum()
    }

    fn brute(costs: &[Vec<i64>]) -> i64 {
        fn go(costs: &[Vec<i64>], i: usize, used: &mut Vec<bool>, need: usize) -> i64 {
            if i == costs.len() {
                return if need == 0 { 0 } else { INF };
            }
            let mut best = INF;
            let remaining_rows = costs.len() - i;
            if remaining_rows > need {
                best = best.min(go(costs, i + 1, used, need));
            }
            for j in 0..used.len() {
                if !used[j] && need > 0 {
                    used[j] = true;
                    let rest = go(costs, i + 1, used, need - 1);
                    if rest < INF {
                        best = best.min(costs[i][j] + rest);
                    }
                    used[j] = false;
                }
            }
            best
        }
        let cols = costs[0].len();
        let need = costs.len().min(cols);
        go(costs, 0, &mut vec![false; cols], need)
    }

    #[test]
    fn square_example() {
        let costs = vec![vec![4, 1, 3], vec![2, 0, 5], vec![3, 2, 2]];
        let a = linear_sum_assignment(&costs);
        assert_eq!(total(&costs, &a), 5);
    }

    #[test]
    fn rectangular_both_ways() {
        let wide = vec![vec![5, 1, 9, 2], vec![1, 7, 3, 8]];
        let a = linear_sum_assignment(&wide);
        assert_eq!(total(&wide, &a), 2);
        let tall: Vec<Vec<i64>> = (0..4).map(|j| wide.iter().map(|r| r[j]).collect()).collect();
        let a = linear_sum_assignment(&tall);
        assert_eq!(a.iter().filter(|x| x.is_some()).count(), 2);
        assert_eq!(total(&tall, &a), 2);
    }

    #[test]
    fn matches_brute_force_on_small_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..300 {
            let r = rng.random_range(1..6);
            let c = rng.random_range(1..6);
            let costs: Vec<Vec<i64>> = (0..r)
                .map(|_| (0..c).map(|_| rng.random_range(-9..10)).collect())
                .collect();
            let a = linear_sum_assignment(&costs);
            assert_eq!(total(&costs, &a), brute(&costs), "{costs:?}");
        }
    }
}
