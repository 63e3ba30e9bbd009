//! Brute-force reference solutions of the real program
//! `max ⟨a0, x⟩ s.t. |a_i · x| <= sqrt(b_i)` for `n <= 3`.
//!
//! Independent of the iterative solver; used to check it.

use crate::error::{Error, Result};

const MAX_DIM: usize = 3;

fn validate(rows: &[Vec<f64>], b: &[f64], a0: &[f64]) -> Result<usize> {
    let n = a0.len();
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidArgument(format!("oracle supports 1 <= n <= {MAX_DIM}, got {n}")));
    }
    if rows.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: rows.len(), found: b.len() });
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("row length differs from a0".into()));
    }
    if b.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument("b must be finite and non-negative".into()));
    }
    Ok(n)
}

/// Solves the `k x k` system in place by Gaussian elimination with partial
/// pivoting. Returns `None` when the system is (numerically) singular.
fn solve_linear(mut mat: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let k = rhs.len();
    let scale = mat
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |a, v| a.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| mat[i][col].abs().total_cmp(&mat[j][col].abs()))?;
        if mat[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        mat.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..k {
            let f = mat[r][col] / mat[col][col];
            for c in col..k {
                mat[r][c] -= f * mat[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; k];
    for r in (0..k).rev() {
        let s: f64 = (r + 1..k).map(|c| mat[r][c] * x[c]).sum();
        x[r] = (rhs[r] - s) / mat[r][r];
    }
    Some(x)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn feasible(rows: &[Vec<f64>], radii: &[f64], x: &[f64], slack: f64) -> bool {
    rows.iter()
        .zip(radii)
        .all(|(r, &rad)| dot(r, x).abs() <= rad + slack * (1.0 + rad))
}

/// Index combinations of size `k` from `0..m`.
fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

/// `n` linearly independent rows, or `None` if the rows do not span `R^n`
/// (the feasible set is then an unbounded cylinder).
fn spanning_rows(rows: &[Vec<f64>], n: usize) -> Option<Vec<usize>> {
    combinations(rows.len(), n).into_iter().find(|idx| {
        let mat: Vec<Vec<f64>> = idx.iter().map(|&i| rows[i].clone()).collect();
        solve_linear(mat, vec![0.0; n]).is_some()
    })
}

/// Best vertex among all intersections of `n` active hyperplanes
/// `s_i a_i · x = sqrt(b_i)`.
pub fn oracle_vertex_enumeration(rows: &[Vec<f64>], b: &[f64], a0: &[f64]) -> Result<Vec<f64>> {
    let n = validate(rows, b, a0)?;
    if spanning_rows(rows, n).is_none() {
        return Err(Error::Degenerate("constraints do not bound the feasible set".into()));
    }
    let radii: Vec<f64> = b.iter().map(|v| v.sqrt()).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for idx in combinations(rows.len(), n) {
        for signs in 0..(1u32 << n) {
            let mat: Vec<Vec<f64>> = idx
                .iter()
                .enumerate()
                .map(|(j, &i)| {
                    let s = if signs >> j & 1 == 1 { -1.0 } else { 1.0 };
                    rows[i].iter().map(|v| s * v).collect()
                })
                .collect();
            let rhs: Vec<f64> = idx.iter().map(|&i| radii[i]).collect();
            let Some(x) = solve_linear(mat, rhs) else { continue };
            if !feasible(rows, &radii, &x, 1e-9) {
                continue;
            }
            let val = dot(a0, &x);
            if best.as_ref().is_none_or(|(bv, _)| val > *bv) {
                best = Some((val, x));
            }
        }
    }
    best.map(|(_, x)| x)
        .ok_or_else(|| Error::Degenerate("no feasible vertex found".into()))
}

/// Grid search over a bounding box of the feasible set, refined by repeated
/// zooming around the best feasible grid point.
pub fn oracle_grid_search(
    rows: &[Vec<f64>],
    b: &[f64],
    a0: &[f64],
    grid_points: usize,
) -> Result<Vec<f64>> {
    let n = validate(rows, b, a0)?;
    if grid_points < 3 {
        return Err(Error::InvalidArgument("grid_points must be at least 3".into()));
    }
    let radii: Vec<f64> = b.iter().map(|v| v.sqrt()).collect();
    let basis = spanning_rows(rows, n)
        .ok_or_else(|| Error::Degenerate("constraints do not bound the feasible set".into()))?;
    // |x_j| <= Σ_k |B^{-1}_{jk}| r_k where B stacks the spanning rows.
    let mut half_width = vec![0.0; n];
    for (k, &i) in basis.iter().enumerate() {
        let mat: Vec<Vec<f64>> = basis.iter().map(|&r| rows[r].clone()).collect();
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        let col = solve_linear(mat, e).expect("spanning rows are invertible");
        for j in 0..n {
            half_width[j] += col[j].abs() * radii[i];
        }
    }
    let mut center = vec![0.0; n];
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _level in 0..6 {
        let step: Vec<f64> = half_width
            .iter()
            .map(|h| 2.0 * h / (grid_points - 1) as f64)
            .collect();
        let total = grid_points.pow(n as u32);
        let mut point = vec![0.0; n];
        for flat in 0..total {
            let mut rem = flat;
            for j in 0..n {
                let g = rem % grid_points;
                rem /= grid_points;
                point[j] = center[j] - half_width[j] + g as f64 * step[j];
            }
            if !feasible(rows, &radii, &point, 0.0) {
                continue;
            }
            let val = dot(a0, &point);
            if best.as_ref().is_none_or(|(bv, _)| val > *bv) {
                best = Some((val, point.clone()));
            }
        }
        let Some((_, ref bp)) = best else {
            return Err(Error::Degenerate("no feasible grid point".into()));
        };
        center = bp.clone();
        half_width = step.iter().map(|s| 2.0 * s).collect();
    }
    Ok(best.unwrap().1)
}

/// Vertex enumeration, falling back to grid search with `grid_points` per
/// axis when no vertex can be formed.
pub fn oracle_solve_small(
    rows: &[Vec<f64>],
    b: &[f64],
    a0: &[f64],
    grid_points: usize,
) -> Result<Vec<f64>> {
    match oracle_vertex_enumeration(rows, b, a0) {
        Ok(x) => Ok(x),
        Err(Error::Degenerate(msg)) if msg.starts_with("no feasible vertex") => {
            oracle_grid_search(rows, b, a0, grid_points)
        }
        Err(e) => Err(e),
    }
}
