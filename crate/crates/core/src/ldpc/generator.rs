//! Random code constructions used by tests, benches and desk-scale runs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SparseParityCheck;
use crate::error::{Error, Result};

/// Random `(col_deg, row_deg)`-regular code with `n` columns.
///
/// Sockets are matched by a seeded shuffle, duplicate edges are repaired by
/// swaps, and 4-cycles are then removed by edge swaps with a budget of
/// `10 · edges` attempts. Remaining 4-cycles, if any, are left in place.
pub fn build_regular_code(n: usize, col_deg: usize, row_deg: usize, seed: u64) -> Result<SparseParityCheck> {
    if col_deg == 0 || row_deg == 0 || n < row_deg || !(n * col_deg).is_multiple_of(row_deg) {
        return Err(Error::InfeasibleDegrees(format!(
            "n={n}, column degree {col_deg}, row degree {row_deg}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sockets: Vec<usize> = (0..n).flat_map(|j| std::iter::repeat_n(j, col_deg)).collect();
    sockets.shuffle(&mut rng);
    let mut rows: Vec<Vec<usize>> = sockets.chunks(row_deg).map(<[usize]>::to_vec).collect();
    // n >= row_deg keeps every column degree <= m, so duplicates are repairable
    repair_duplicates(&mut rows, &mut rng)?;

    let mut cols = vec![Vec::with_capacity(col_deg); n];
    for (i, row) in rows.iter().enumerate() {
        for &j in row {
            cols[j].push(i);
        }
    }
    remove_four_cycles(&mut rows, &mut cols, 10 * n * col_deg, &mut rng);
    SparseParityCheck::from_rows(n, rows)
}

fn repair_duplicates(rows: &mut [Vec<usize>], rng: &mut ChaCha8Rng) -> Result<()> {
    let m = rows.len();
    let budget = 1000 * rows.iter().map(Vec::len).sum::<usize>().max(1);
    let mut attempts = 0;
    for r in 0..m {
        loop {
            let dup = (0..rows[r].len()).find(|&p| rows[r][..p].contains(&rows[r][p]));
            let Some(p) = dup else { break };
            attempts += 1;
            if attempts > budget || m == 1 {
                return Err(Error::InfeasibleDegrees("could not remove duplicate edges".into()));
            }
            let r2 = rng.random_range(0..m);
            if r2 == r {
                continue;
            }
            let p2 = rng.random_range(0..rows[r2].len());
            let (a, b) = (rows[r][p], rows[r2][p2]);
            if !rows[r].contains(&b) && !rows[r2].contains(&a) {
                rows[r][p] = b;
                rows[r2][p2] = a;
            }
        }
    }
    Ok(())
}

/// Number of 4-cycles through row `r`, given a scratch counter of length `m`.
fn row_cycles(r: usize, rows: &[Vec<usize>], cols: &[Vec<usize>], scratch: &mut [usize]) -> usize {
    let mut touched = Vec::new();
    for &j in &rows[r] {
        for &r2 in &cols[j] {
            if r2 != r {
                if scratch[r2] == 0 {
                    touched.push(r2);
                }
                scratch[r2] += 1;
            }
        }
    }
    let mut total = 0;
    for r2 in touched {
        let s = scratch[r2];
        total += s * (s - 1) / 2;
        scratch[r2] = 0;
    }
    total
}

fn pair_cycles(a: &[usize], b: &[usize]) -> usize {
    let s = a.iter().filter(|j| b.contains(j)).count();
    s * s.saturating_sub(1) / 2
}

fn remove_four_cycles(rows: &mut [Vec<usize>], cols: &mut [Vec<usize>], budget: usize, rng: &mut ChaCha8Rng) {
    let m = rows.len();
    if m < 2 {
        return;
    }
    let mut scratch = vec![0usize; m];
    let mut bad: Vec<usize> = (0..m).filter(|&r| row_cycles(r, rows, cols, &mut scratch) > 0).collect();
    let mut in_bad = vec![false; m];
    bad.iter().for_each(|&r| in_bad[r] = true);

    for _ in 0..budget {
        if bad.is_empty() {
            break;
        }
        let bi = rng.random_range(0..bad.len());
        let r1 = bad[bi];
        let own = row_cycles(r1, rows, cols, &mut scratch);
        if own == 0 {
            bad.swap_remove(bi);
            in_bad[r1] = false;
            continue;
        }
        let r2 = rng.random_range(0..m);
        if r2 == r1 {
            continue;
        }
        let p1 = rng.random_range(0..rows[r1].len());
        let p2 = rng.random_range(0..rows[r2].len());
        let (c1, c2) = (rows[r1][p1], rows[r2][p2]);
        if rows[r1].contains(&c2) || rows[r2].contains(&c1) {
            continue;
        }
        // cycles through r1 or r2; the r1-r2 pair is counted once
        let before = own + row_cycles(r2, rows, cols, &mut scratch) - pair_cycles(&rows[r1], &rows[r2]);
        swap_edge(rows, cols, (r1, p1), (r2, p2));
        let after = row_cycles(r1, rows, cols, &mut scratch) + row_cycles(r2, rows, cols, &mut scratch)
            - pair_cycles(&rows[r1], &rows[r2]);
        if after >= before {
            swap_edge(rows, cols, (r1, p1), (r2, p2));
        } else if !in_bad[r2] && row_cycles(r2, rows, cols, &mut scratch) > 0 {
            in_bad[r2] = true;
            bad.push(r2);
        }
    }
}

fn swap_edge(rows: &mut [Vec<usize>], cols: &mut [Vec<usize>], (r1, p1): (usize, usize), (r2, p2): (usize, usize)) {
    let (c1, c2) = (rows[r1][p1], rows[r2][p2]);
    rows[r1][p1] = c2;
    rows[r2][p2] = c1;
    for (c, from, to) in [(c1, r1, r2), (c2, r2, r1)] {
        let slot = cols[c].iter().position(|&r| r == from).expect("edge present");
        cols[c][slot] = to;
    }
}

/// Number of 4-cycles in the Tanner graph of `h`.
pub fn count_four_cycles(h: &SparseParityCheck) -> usize {
    let mut scratch = vec![0usize; h.n_rows()];
    let total: usize = (0..h.n_rows())
        .map(|r| row_cycles(r, h.rows(), h.cols(), &mut scratch))
        .sum();
    total / 2
}

/// Random code whose Tanner graph is a single tree with `n` variables and
/// `m` checks, every check of degree at least 2. Such a code has full row
/// rank, so `k = n - m`.
pub fn build_tree_code(n: usize, m: usize, seed: u64) -> Result<SparseParityCheck> {
    if m == 0 || n < m + 1 {
        return Err(Error::InfeasibleDegrees(format!(
            "a tree with {m} checks of degree >= 2 needs at least {} variables, got {n}",
            m + 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<usize>> = vec![vec![0, 1]];
    let mut n_vars = 2;
    let (mut checks_left, mut leaves_left) = (m - 1, n - m - 1);
    while checks_left + leaves_left > 0 {
        let add_check = rng.random_range(0..checks_left + leaves_left) < checks_left;
        if add_check {
            let anchor = rng.random_range(0..n_vars);
            rows.push(vec![anchor, n_vars]);
            n_vars += 1;
            checks_left -= 1;
        } else {
            let r = rng.random_range(0..rows.len());
            rows[r].push(n_vars);
            n_vars += 1;
            leaves_left -= 1;
        }
    }
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(&mut rng);
    let rows = rows
        .into_iter()
        .map(|row| row.into_iter().map(|j| labels[j]).collect())
        .collect();
    SparseParityCheck::from_rows(n, rows)
}
