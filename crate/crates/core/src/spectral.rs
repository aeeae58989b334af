//! Adjacency spectra, exact `A^2` statistics and the Hoffman-Wielandt check.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bits::{intersect_count, BitSet};
use crate::graph::GraphInstance;

/// Largest `q` handled by the dense solver.
pub const MAX_DENSE: usize = 4096;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SpectralError {
    #[error("q = {q} exceeds the dense eigensolver limit of {max}")]
    TooLarge { q: usize, max: usize },
    #[error("QL iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    /// Eigenvalues sorted by absolute value, largest first.
    pub lambda: Vec<f64>,
    pub lambda1_dev: f64,
    pub lambda2_ratio_34: f64,
    pub lambda2_ratio_12: f64,
    pub trace_check: f64,
}

impl SpectrumReport {
    pub fn lambda1(&self) -> f64 {
        self.lambda.first().copied().unwrap_or(0.0)
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda.get(1).copied().unwrap_or(0.0)
    }
}

/// Eigenvalues of a dense symmetric matrix stored row-major.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>, SpectralError> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = tridiagonalize(&mut a, n);
    tql(&mut d, &mut e)?;
    Ok(d)
}

/// Householder reduction to tridiagonal form; returns the diagonal and the
/// subdiagonal (`e[i]` couples `i-1` and `i`, `e[0] = 0`).
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let idx = |i: usize, j: usize| i * n + j;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[idx(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = a[idx(i, l)];
            } else {
                for k in 0..=l {
                    a[idx(i, k)] /= scale;
                    h += a[idx(i, k)] * a[idx(i, k)];
                }
                let f = a[idx(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[idx(i, l)] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[idx(j, k)] * a[idx(i, k)];
                    }
                    for k in j + 1..=l {
                        g += a[idx(k, j)] * a[idx(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[idx(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[idx(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[idx(j, k)] -= f * e[k] + g * a[idx(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[idx(i, l)];
        }
        d[i] = h;
    }
    e[0] = 0.0;
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[idx(i, i)];
    }
    (d, e)
}

/// Implicit QL with Wilkinson-style shifts on a symmetric tridiagonal matrix.
fn tql(d: &mut [f64], e: &mut [f64]) -> Result<(), SpectralError> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let cap = 30 * n.max(1);
    let mut sweeps = 0;
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > cap {
                return Err(SpectralError::NoConvergence { sweeps: cap });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn dense_adjacency(g: &GraphInstance) -> Vec<f64> {
    let n = g.q();
    let mut a = vec![0.0; n * n];
    for u in 0..n {
        for v in g.neighbors(u).iter() {
            a[u * n + v] = 1.0;
        }
    }
    a
}

pub fn sort_by_magnitude(lambda: &mut [f64]) {
    lambda.sort_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));
}

/// Full adjacency spectrum.
pub fn eigenvalues(g: &GraphInstance) -> Result<SpectrumReport, SpectralError> {
    let n = g.q();
    if n > MAX_DENSE {
        return Err(SpectralError::TooLarge { q: n, max: MAX_DENSE });
    }
    let mut lambda = symmetric_eigenvalues(dense_adjacency(g), n)?;
    sort_by_magnitude(&mut lambda);
    Ok(report_from(g, lambda))
}

fn report_from(g: &GraphInstance, lambda: Vec<f64>) -> SpectrumReport {
    let q = g.q() as f64;
    let l1 = lambda.first().copied().unwrap_or(0.0);
    let l2 = lambda.get(1).copied().unwrap_or(0.0).abs();
    let sum_sq: f64 = lambda.iter().map(|x| x * x).sum();
    SpectrumReport {
        lambda1_dev: l1 - q / 2.0,
        lambda2_ratio_34: l2 / q.powf(0.75),
        lambda2_ratio_12: l2 / q.sqrt(),
        trace_check: (sum_sq - 2.0 * g.edge_count() as f64).abs(),
        lambda,
    }
}

/// Power-method estimates of the top two eigenvalues (by magnitude), for
/// graphs beyond the dense limit. Values are approximate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxSpectrum {
    pub lambda1: f64,
    pub lambda2: f64,
    pub iterations: usize,
    pub approximate: bool,
}

fn adj_mul(g: &GraphInstance, x: &[f64]) -> Vec<f64> {
    (0..g.q())
        .into_par_iter()
        .map(|u| g.neighbors(u).iter().map(|v| x[v]).sum())
        .collect()
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|a| *a /= norm);
    }
    norm
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Iterates on `A^2` (so sign does not cause oscillation), deflating the
/// first eigenvector for the second value.
pub fn power_top_two(g: &GraphInstance, iterations: usize) -> ApproxSpectrum {
    let n = g.q();
    let start = |k: usize| -> Vec<f64> {
        (0..n)
            .map(|i| 1.0 + ((i * 7919 + k * 104_729) % 1000) as f64 / 1000.0)
            .collect()
    };
    let rayleigh = |v: &[f64]| dot(v, &adj_mul(g, v));
    let mut v1 = start(0);
    normalize(&mut v1);
    for _ in 0..iterations {
        let w = adj_mul(g, &adj_mul(g, &v1));
        v1 = w;
        if normalize(&mut v1) == 0.0 {
            break;
        }
    }
    let lambda1 = rayleigh(&v1);
    let mut v2 = start(1);
    let project = |v: &mut Vec<f64>| {
        let c = dot(v, &v1);
        v.iter_mut().zip(&v1).for_each(|(a, b)| *a -= c * b);
    };
    project(&mut v2);
    normalize(&mut v2);
    for _ in 0..iterations {
        let mut w = adj_mul(g, &adj_mul(g, &v2));
        project(&mut w);
        v2 = w;
        if normalize(&mut v2) == 0.0 {
            break;
        }
    }
    let lambda2 = rayleigh(&v2);
    ApproxSpectrum {
        lambda1,
        lambda2,
        iterations,
        approximate: true,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ASquaredStats {
    pub diag_band_hits: usize,
    /// Unordered pairs `u < v` with `A^2[u][v]` in the band.
    pub offdiag_band_hits: usize,
    pub offdiag_pairs: usize,
    pub c: f64,
    /// Vertices whose diagonal entry lies outside the band.
    pub exceptional_rows: Vec<u32>,
}

/// Calls `visit(u, v, codegree)` for every `u < v`, in parallel over `u`,
/// and sums the results.
fn sum_over_pairs<T, F>(g: &GraphInstance, visit: F) -> T
where
    T: Send + std::iter::Sum<T>,
    F: Fn(usize, usize, u32) -> T + Sync,
{
    (0..g.q())
        .into_par_iter()
        .map(|u| {
            let ru = g.row(u);
            (u + 1..g.q())
                .map(|v| visit(u, v, intersect_count(ru, g.row(v)) as u32))
                .sum::<T>()
        })
        .sum()
}

/// Counts diagonal entries of `A^2` in `q/2 +- c sqrt(q)` and off-diagonal
/// entries in `q/4 +- c sqrt(q)`, exactly.
pub fn a_squared_stats(g: &GraphInstance, c: f64) -> ASquaredStats {
    let q = g.q() as f64;
    let half = c * q.sqrt();
    let exceptional_rows: Vec<u32> = g
        .degrees()
        .iter()
        .enumerate()
        .filter(|&(_, &d)| (d as f64 - q / 2.0).abs() > half)
        .map(|(u, _)| u as u32)
        .collect();
    let offdiag_band_hits = sum_over_pairs(g, |_, _, k| usize::from((k as f64 - q / 4.0).abs() <= half));
    let n = g.q();
    ASquaredStats {
        diag_band_hits: n - exceptional_rows.len(),
        offdiag_band_hits,
        offdiag_pairs: n * n.saturating_sub(1) / 2,
        c,
        exceptional_rows,
    }
}

/// Unordered pairs `u < v`, both outside `exclude`, whose codegree lies
/// outside `q/4 +- half_width`.
pub fn offdiag_outliers(g: &GraphInstance, half_width: f64, exclude: &BitSet) -> usize {
    let q = g.q() as f64;
    sum_over_pairs(g, |u, v, k| {
        usize::from(!exclude.contains(u) && !exclude.contains(v) && (k as f64 - q / 4.0).abs() > half_width)
    })
}

/// The full `A^2` matrix, row-major.
pub fn a_squared(g: &GraphInstance) -> Vec<u32> {
    let n = g.q();
    (0..n)
        .into_par_iter()
        .flat_map_iter(|u| {
            let ru = g.row(u);
            (0..n).map(move |v| intersect_count(ru, g.row(v)) as u32)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HWReport {
    pub lhs_min: f64,
    pub rhs: f64,
    /// `lhs_min <= rhs` up to `1e-6 q^2`.
    pub holds: bool,
}

/// Squared Frobenius distance `||A^2 - (q/4)(I + J)||^2`, exact.
pub fn hw_rhs(g: &GraphInstance) -> f64 {
    let q = g.q() as i128;
    let diag: i128 = g
        .degrees()
        .iter()
        .map(|&d| {
            let t = 4 * d as i128 - 2 * q;
            t * t
        })
        .sum();
    let off: i128 = sum_over_pairs(g, |_, _, k| {
        let t = 4 * k as i128 - q;
        t * t
    });
    // Entries were scaled by 4, so divide by 16; off-diagonal pairs count twice.
    (diag + 2 * off) as f64 / 16.0
}

pub fn hw_gap(g: &GraphInstance, spectrum: &SpectrumReport) -> HWReport {
    let q = g.q() as f64;
    let big = q * (q + 1.0) / 4.0;
    let small = q / 4.0;
    let sq: Vec<f64> = spectrum.lambda.iter().map(|l| l * l).collect();
    let base: f64 = sq.iter().map(|s| (s - small).powi(2)).sum();
    let lhs_min = sq
        .iter()
        .map(|s| base - (s - small).powi(2) + (s - big).powi(2))
        .fold(f64::INFINITY, f64::min);
    let lhs_min = if lhs_min.is_finite() { lhs_min } else { 0.0 };
    let rhs = hw_rhs(g);
    HWReport {
        lhs_min,
        rhs,
        holds: lhs_min <= rhs + 1e-6 * q * q,
    }
}

/// `|lambda_2| / sqrt(q)`.
pub fn min_lambda2_check(g: &GraphInstance, spectrum: &SpectrumReport) -> f64 {
    spectrum.lambda2().abs() / (g.q() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Field;
    use crate::graph::{build_from_expr, diophantine, paley};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn paley13_spectrum() {
        let g = paley(&field(13)).unwrap();
        let s = eigenvalues(&g).unwrap();
        assert!((s.lambda1() - 6.0).abs() < 1e-9);
        let r = 13f64.sqrt();
        let plus = s.lambda.iter().filter(|l| (*l - (r - 1.0) / 2.0).abs() < 1e-9).count();
        let minus = s.lambda.iter().filter(|l| (*l + (r + 1.0) / 2.0).abs() < 1e-9).count();
        assert_eq!((plus, minus), (6, 6));
        assert!((min_lambda2_check(&g, &s) - (1.0 + r) / 2.0 / r).abs() < 1e-4);
        // A^2 = 3I + 2A + 3(J - I - A) in exact integers.
        let a2 = a_squared(&g);
        for u in 0..13 {
            for v in 0..13 {
                let want = if u == v { 6 } else if g.has_edge(u, v) { 2 } else { 3 };
                assert_eq!(a2[u * 13 + v], want);
            }
        }
    }

    #[test]
    fn complete_and_cycle() {
        let k5 = build_from_expr("(x-y)^2", &field(5)).unwrap();
        let s = eigenvalues(&k5).unwrap();
        assert!((s.lambda[0] - 4.0).abs() < 1e-12);
        assert!(s.lambda[1..].iter().all(|l| (l + 1.0).abs() < 1e-12));
        assert!((min_lambda2_check(&k5, &s) - 1.0 / 5f64.sqrt()).abs() < 1e-12);

        let c5 = paley(&field(5)).unwrap();
        let mut got = eigenvalues(&c5).unwrap().lambda;
        let mut want: Vec<f64> = (0..5)
            .map(|k| 2.0 * (2.0 * std::f64::consts::PI * k as f64 / 5.0).cos())
            .collect();
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn k5_hw() {
        let k5 = build_from_expr("(x-y)^2", &field(5)).unwrap();
        let s = eigenvalues(&k5).unwrap();
        let hw = hw_gap(&k5, &s);
        // A^2 = 3I + J: diagonal 4 vs 2.5, off-diagonal 3 vs 1.25.
        let want = 5.0 * 1.5f64.powi(2) + 20.0 * 1.75f64.powi(2);
        assert!((hw.rhs - want).abs() < 1e-12);
        assert!(hw.holds);
    }

    #[test]
    fn diophantine_101() {
        let g = diophantine(&field(101)).unwrap();
        let s = eigenvalues(&g).unwrap();
        assert!(s.lambda2().abs() <= 3.0 * 101f64.sqrt());
        assert!(s.trace_check < 1e-6 * 101.0);
        let sum: f64 = s.lambda.iter().sum();
        assert!(sum.abs() < 1e-8);
        let avg = 2.0 * g.edge_count() as f64 / 101.0;
        assert!(s.lambda1() >= avg - 1e-9);
        let hw = hw_gap(&g, &s);
        assert!(hw.holds);
        assert!(hw.rhs <= 5.0 * 101f64.powi(3));
        let st = a_squared_stats(&g, 2.0);
        assert!(st.exceptional_rows.len() <= 5);
        assert!(st.offdiag_band_hits as f64 >= 0.95 * st.offdiag_pairs as f64);
    }

    #[test]
    fn paley_stats_and_empty() {
        let g = paley(&field(13)).unwrap();
        let st = a_squared_stats(&g, 1.0);
        assert_eq!(st.diag_band_hits, 13);
        assert!(st.exceptional_rows.is_empty());
        assert_eq!(st.offdiag_band_hits, 78);
        let empty = build_from_expr("2", &field(5)).unwrap();
        assert!(a_squared(&empty).iter().all(|&x| x == 0));
        let s = eigenvalues(&empty).unwrap();
        assert!(s.lambda.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn matches_nalgebra_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1usize, 2, 3, 8, 31, 64, 90] {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        edges.push((u, v));
                    }
                }
            }
            let g = GraphInstance::from_edges(n, &edges);
            let mut ours = eigenvalues(&g).unwrap().lambda;
            let m = nalgebra::DMatrix::from_row_slice(n, n, &dense_adjacency(&g));
            let mut theirs: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
            ours.sort_by(f64::total_cmp);
            theirs.sort_by(f64::total_cmp);
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-9, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn power_method_agrees() {
        let g = diophantine(&field(61)).unwrap();
        let s = eigenvalues(&g).unwrap();
        let p = power_top_two(&g, 500);
        assert!((p.lambda1 - s.lambda1()).abs() < 1e-6);
        assert!(p.lambda2.abs() <= s.lambda2().abs() + 1e-6);
        assert!(p.lambda2.abs() >= 0.5 * s.lambda2().abs());
    }

    #[test]
    fn too_large() {
        let g = GraphInstance::from_edges(MAX_DENSE + 1, &[]);
        assert_eq!(
            eigenvalues(&g),
            Err(SpectralError::TooLarge { q: MAX_DENSE + 1, max: MAX_DENSE })
        );
    }
}
