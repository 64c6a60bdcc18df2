//! Independent oracles for the integration suites.
//!
//! Everything here is computed by a route deliberately different from the
//! library's: partition functions by brute-force tableau enumeration
//! instead of determinant-free ratio formulas, dimensions and
//! multiplicities by cell-local hook products instead of shifted-part
//! products, and symmetric-block moments by explicit multiset
//! enumeration.

use num_bigint::BigUint;

/// Sum of `prod_cells x[T(cell) - 1]` over all semistandard fillings `T`
/// of `shape` with entries in `1..=x.len()`: rows weakly increase left to
/// right, columns strictly increase top to bottom.
///
/// This is the Schur polynomial `s_shape(x)` evaluated by definition, so
/// with `x_i = e^{-beta eps_i}` it is the block partition function.
pub fn ssyt_partition_function(shape: &[u32], x: &[f64]) -> f64 {
    let rows: Vec<usize> = shape
        .iter()
        .filter(|&&p| p > 0)
        .map(|&p| p as usize)
        .collect();
    if rows.is_empty() {
        return 1.0;
    }
    let mut filling: Vec<Vec<usize>> = rows.iter().map(|&len| vec![0; len]).collect();
    let mut total = 0.0;
    fill_cell(&rows, x, &mut filling, 0, 0, 1.0, &mut total);
    total
}

fn fill_cell(
    rows: &[usize],
    x: &[f64],
    filling: &mut Vec<Vec<usize>>,
    r: usize,
    c: usize,
    weight: f64,
    total: &mut f64,
) {
    if r == rows.len() {
        *total += weight;
        return;
    }
    let (next_r, next_c) = if c + 1 < rows[r] {
        (r, c + 1)
    } else {
        (r + 1, 0)
    };
    // Row-weak from the left neighbour, column-strict from the one above.
    let min_left = if c > 0 { filling[r][c - 1] } else { 1 };
    let min_above = if r > 0 { filling[r - 1][c] + 1 } else { 1 };
    for v in min_left.max(min_above)..=x.len() {
        filling[r][c] = v;
        fill_cell(rows, x, filling, next_r, next_c, weight * x[v - 1], total);
    }
    filling[r][c] = 0;
}

/// Conjugate partition (column lengths) of `shape`.
fn conjugate(shape: &[u32]) -> Vec<u32> {
    let width = shape.first().copied().unwrap_or(0) as usize;
    (0..width)
        .map(|c| shape.iter().filter(|&&p| p as usize > c).count() as u32)
        .collect()
}

/// Hook length of cell `(r, c)` (0-indexed): arm + leg + 1.
fn hook(shape: &[u32], conj: &[u32], r: usize, c: usize) -> u64 {
    let arm = shape[r] as u64 - c as u64 - 1;
    let leg = conj[c] as u64 - r as u64 - 1;
    arm + leg + 1
}

/// Number of standard fillings of `shape` by the hook length formula,
/// `n! / prod hooks`, evaluated exactly.
pub fn hook_length_multiplicity(shape: &[u32]) -> BigUint {
    let n: u64 = shape.iter().map(|&p| u64::from(p)).sum();
    let conj = conjugate(shape);
    let mut num = BigUint::from(1u32);
    for k in 2..=n {
        num *= k;
    }
    let mut den = BigUint::from(1u32);
    for (r, &len) in shape.iter().enumerate() {
        for c in 0..len as usize {
            den *= hook(shape, &conj, r, c);
        }
    }
    num / den
}

/// Unitary-group irrep dimension by the hook content formula,
/// `prod_cells (d + content) / hook`, evaluated exactly.
pub fn hook_content_dimension(shape: &[u32], d: u32) -> BigUint {
    let conj = conjugate(shape);
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for (r, &len) in shape.iter().enumerate() {
        for c in 0..len as usize {
            // content = column - row; d + content > 0 whenever the shape
            // fits in d rows.
            num *= (u64::from(d) + c as u64) - r as u64;
            den *= hook(shape, &conj, r, c);
        }
    }
    num / den
}

/// Mean and variance of the total energy over the uniform distribution on
/// the symmetric block, enumerated as all multisets of `n` level indices.
pub fn symmetric_block_energy_moments(levels: &[f64], n: u32) -> (f64, f64) {
    let mut count = 0u64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut stack: Vec<(usize, u32, f64)> = vec![(0, n, 0.0)];
    // Depth-first over non-decreasing index sequences; (start, left, acc)
    // assigns `left` more particles to levels `start..`.
    while let Some((start, left, acc)) = stack.pop() {
        if left == 0 {
            count += 1;
            sum += acc;
            sum_sq += acc * acc;
            continue;
        }
        for k in start..levels.len() {
            // Put one particle on level k; the rest stay at or above k.
            stack.push((k, left - 1, acc + levels[k]));
        }
    }
    let mean = sum / count as f64;
    (mean, sum_sq / count as f64 - mean * mean)
}
