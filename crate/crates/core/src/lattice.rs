//! Exact integer linear algebra at desk scale: Hermite and Smith reduction,
//! kernels of integer matrices, and recovery of the invariant factors of a
//! finite abelian group from element-order counts. Everything is `i128`,
//! no floating point anywhere.

use alloc::vec;
use alloc::vec::Vec;

/// Row-style Hermite normal form of the lattice spanned by the given rows:
/// returns a canonical basis (pivots positive, entries above pivots reduced).
pub fn hermite_normal_form(rows: &[Vec<i128>]) -> Vec<Vec<i128>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<i128>> = rows.to_vec();
    let mut pivot_row = 0usize;
    for col in 0..ncols {
        // clear the column below pivot_row with gcd row operations
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..m.len() {
                if m[r][col] != 0 {
                    best = match best {
                        None => Some(r),
                        Some(b) => {
                            if m[r][col].abs() < m[b][col].abs() {
                                Some(r)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            let Some(b) = best else { break };
            m.swap(pivot_row, b);
            let mut done = true;
            let pv = m[pivot_row][col];
            for r in pivot_row + 1..m.len() {
                if m[r][col] != 0 {
                    let q = m[r][col].div_euclid(pv);
                    for c in 0..ncols {
                        m[r][c] -= q * m[pivot_row][c];
                    }
                    if m[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < m.len() && m[pivot_row][col] != 0 {
            if m[pivot_row][col] < 0 {
                for c in 0..ncols {
                    m[pivot_row][c] = -m[pivot_row][c];
                }
            }
            // reduce the entries above the pivot
            let pv = m[pivot_row][col];
            for r in 0..pivot_row {
                let q = m[r][col].div_euclid(pv);
                if q != 0 {
                    for c in 0..ncols {
                        m[r][c] -= q * m[pivot_row][c];
                    }
                }
            }
            pivot_row += 1;
        }
    }
    m.truncate(pivot_row);
    m
}

/// Basis (as rows) of the kernel `{x : M x = 0}` of an integer matrix,
/// via unimodular column reduction.
pub fn kernel_basis(matrix: &[Vec<i128>]) -> Vec<Vec<i128>> {
    if matrix.is_empty() {
        return Vec::new();
    }
    let nrows = matrix.len();
    let ncols = matrix[0].len();
    let mut m: Vec<Vec<i128>> = matrix.to_vec();
    // u tracks the column operations: m_original * u_cols = current m
    let mut u: Vec<Vec<i128>> = (0..ncols)
        .map(|i| (0..ncols).map(|j| i128::from(i == j)).collect())
        .collect(); // u[j] is the j-th column expressed in original coordinates
    let mut pivot_col = 0usize;
    for row in 0..nrows {
        loop {
            let mut best: Option<usize> = None;
            for c in pivot_col..ncols {
                if m[row][c] != 0 {
                    best = match best {
                        None => Some(c),
                        Some(b) => {
                            if m[row][c].abs() < m[row][b].abs() {
                                Some(c)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            let Some(b) = best else { break };
            for r in 0..nrows {
                let t = m[r][pivot_col];
                m[r][pivot_col] = m[r][b];
                m[r][b] = t;
            }
            u.swap(pivot_col, b);
            let pv = m[row][pivot_col];
            let mut done = true;
            for c in pivot_col + 1..ncols {
                if m[row][c] != 0 {
                    let q = m[row][c].div_euclid(pv);
                    for r in 0..nrows {
                        m[r][c] -= q * m[r][pivot_col];
                    }
                    for k in 0..ncols {
                        let delta = q * u[pivot_col][k];
                        u[c][k] -= delta;
                    }
                    if m[row][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pivot_col < ncols && m[row][pivot_col] != 0 {
            pivot_col += 1;
        }
    }
    // columns past pivot_col are identically zero in m: they span the kernel
    let mut kernel: Vec<Vec<i128>> = Vec::new();
    for c in pivot_col..ncols {
        debug_assert!((0..nrows).all(|r| m[r][c] == 0));
        kernel.push(u[c].clone());
    }
    hermite_normal_form(&kernel)
}

/// Diagonal of the Smith normal form (invariant factors, including 1s,
/// excluding zeros), for completeness of the integer toolkit.
pub fn smith_diagonal(matrix: &[Vec<i128>]) -> Vec<i128> {
    if matrix.is_empty() || matrix[0].is_empty() {
        return Vec::new();
    }
    let mut m = matrix.to_vec();
    let rows = m.len();
    let cols = m[0].len();
    let n = rows.min(cols);
    let mut out = Vec::new();
    let mut top = 0usize;
    while top < n {
        // find a nonzero entry in the submatrix
        let mut found = None;
        'scan: for r in top..rows {
            for c in top..cols {
                if m[r][c] != 0 {
                    found = Some((r, c));
                    break 'scan;
                }
            }
        }
        let Some((r0, c0)) = found else { break };
        m.swap(top, r0);
        for row in m.iter_mut() {
            row.swap(top, c0);
        }
        loop {
            let mut clean = true;
            // clear column
            for r in top + 1..rows {
                if m[r][top] != 0 {
                    let q = m[r][top].div_euclid(m[top][top]);
                    for c in top..cols {
                        m[r][c] -= q * m[top][c];
                    }
                    if m[r][top] != 0 {
                        // swap rows to shrink the pivot
                        m.swap(top, r);
                        clean = false;
                    }
                }
            }
            // clear row
            for c in top + 1..cols {
                if m[top][c] != 0 {
                    let q = m[top][c].div_euclid(m[top][top]);
                    for r in top..rows {
                        m[r][c] -= q * m[r][top];
                    }
                    if m[top][c] != 0 {
                        for row in m.iter_mut().skip(top) {
                            row.swap(top, c);
                        }
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // divisibility sweep: pivot must divide everything below-right
            let pv = m[top][top];
            let mut fixed = true;
            'div: for r in top + 1..rows {
                for c in top + 1..cols {
                    if m[r][c] % pv != 0 {
                        for cc in top..cols {
                            let add = m[r][cc];
                            m[top][cc] += add;
                        }
                        fixed = false;
                        break 'div;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        out.push(m[top][top].abs());
        top += 1;
    }
    out.retain(|&d| d != 0);
    out
}

/// Invariant factors (ascending, each dividing the next) of a finite abelian
/// group of order `n`, recovered from the counts `#{g : r^j g = 0}` supplied
/// by the callback. Exact: the counts determine the partition at each prime.
pub fn invariant_factors_from_counts(
    n: u64,
    mut count_killed_by: impl FnMut(u64) -> u64,
) -> Vec<u64> {
    if n <= 1 {
        return Vec::new();
    }
    let factors = crate::jacobian::factor_u64(n);
    // per prime: the partition lambda_1 >= lambda_2 >= ... of v_r(n)
    let mut partitions: Vec<(u64, Vec<u32>)> = Vec::new();
    for &(r, a) in &factors {
        let mut logs = vec![0u32; a as usize + 1];
        let mut rj = 1u64;
        for j in 1..=a as usize {
            rj *= r;
            let c = count_killed_by(rj);
            let mut e = 0u32;
            let mut cc = c;
            while cc % r == 0 {
                cc /= r;
                e += 1;
            }
            debug_assert_eq!(cc, 1, "kill count must be a power of r");
            logs[j] = e;
        }
        // m_j = logs[j] - logs[j-1] = #parts >= j; conjugate to get lambda
        let mut lambda: Vec<u32> = Vec::new();
        for j in 1..=a as usize {
            let mj = logs[j] - logs[j - 1];
            for i in 0..mj {
                if lambda.len() <= i as usize {
                    lambda.push(0);
                }
                lambda[i as usize] += 1;
            }
        }
        lambda.sort_unstable_by(|x, y| y.cmp(x));
        partitions.push((r, lambda));
    }
    let k = partitions.iter().map(|(_, l)| l.len()).max().unwrap_or(0);
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let mut d = 1u64;
        for (r, lambda) in &partitions {
            if let Some(&e) = lambda.get(i) {
                d *= r.pow(e);
            }
        }
        out.push(d);
    }
    out.reverse(); // ascending, d_1 | d_2 | ... | d_k
    out
}
