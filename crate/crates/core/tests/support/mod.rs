//! Reference implementations shared by the integration tests. None of them
//! call into the Weiszfeld solver.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn gaussian_rows(rng: &mut ChaCha20Rng, n: usize, p: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..p).map(|_| rng.sample(StandardNormal)).collect()).collect()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn objective(points: &[Vec<f64>], y: &[f64]) -> f64 {
    points.iter().map(|x| norm(&x.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>())).sum()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting; `None`
/// when a pivot vanishes.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let m = b.len();
    for c in 0..m {
        let piv = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..m {
            let f = a[r][c] / a[c][c];
            for k in c..m {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; m];
    for c in (0..m).rev() {
        let s: f64 = (c + 1..m).map(|k| a[c][k] * x[k]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    Some(x)
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `Σ_{x_i ≠ y} S(x_i − y)` and the number of points equal to `y`.
fn sign_sum(points: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, usize) {
    let mut s = vec![0.0; y.len()];
    let mut mult = 0;
    for x in points {
        let d = sub(x, y);
        let r = norm(&d);
        if r == 0.0 {
            mult += 1;
        } else {
            s.iter_mut().zip(&d).for_each(|(a, v)| *a += v / r);
        }
    }
    (s, mult)
}

/// Spatial median by exhaustive subgradient checks at the data points
/// followed by damped Newton steps on the smooth part of the objective.
///
/// A data point `x_k` of multiplicity `m` is optimal exactly when
/// `‖Σ_{x_i ≠ x_k} S(x_i − x_k)‖ ≤ m`. Otherwise the minimizer is not a data
/// point and the objective is smooth (and strictly convex for non-collinear
/// data) around it. Newton can stall next to a non-optimal data point, where
/// the Hessian blows up; from there the iterate is pushed along the descent
/// direction of that point.
pub fn median_oracle(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let p = points[0].len();
    for x in points {
        let (s, mult) = sign_sum(points, x);
        if norm(&s) <= mult as f64 {
            return x.clone();
        }
    }
    let spread = points.iter().map(|x| max_abs(x)).fold(1.0, f64::max);
    let mut y: Vec<f64> = (0..p).map(|j| points.iter().map(|x| x[j]).sum::<f64>() / n as f64).collect();
    for _ in 0..1000 {
        let nearest = points
            .iter()
            .min_by(|a, b| norm(&sub(a, &y)).total_cmp(&norm(&sub(b, &y))))
            .unwrap();
        if norm(&sub(nearest, &y)) <= 1e-10 * spread {
            let (s, _) = sign_sum(points, nearest);
            let u: Vec<f64> = s.iter().map(|v| v / norm(&s)).collect();
            let f0 = objective(points, nearest);
            let mut t = spread;
            let mut next: Vec<f64> = nearest.iter().zip(&u).map(|(a, b)| a + t * b).collect();
            while objective(points, &next) >= f0 {
                t *= 0.5;
                next = nearest.iter().zip(&u).map(|(a, b)| a + t * b).collect();
            }
            y = next;
            continue;
        }
        let mut g = vec![0.0; p];
        let mut h = vec![vec![0.0; p]; p];
        for x in points {
            let d = sub(&y, x);
            let r = norm(&d);
            for a in 0..p {
                g[a] += d[a] / r;
                for b in 0..p {
                    let id = if a == b { 1.0 } else { 0.0 };
                    h[a][b] += (id - d[a] * d[b] / (r * r)) / r;
                }
            }
        }
        if norm(&g) <= 1e-13 * n as f64 {
            break;
        }
        let step = solve_dense(h, g.clone()).unwrap_or(g);
        let f0 = objective(points, &y);
        let mut t = 1.0;
        let mut next: Vec<f64> = y.iter().zip(&step).map(|(a, s)| a - t * s).collect();
        while !(objective(points, &next) <= f0) && t > 1e-30 {
            t *= 0.5;
            next = y.iter().zip(&step).map(|(a, s)| a - t * s).collect();
        }
        if norm(&sub(&y, &next)) <= 1e-16 * (1.0 + norm(&y)) {
            break;
        }
        y = next;
    }
    y
}

/// Norm of the minimal-norm subgradient of `Σ ‖x_i − y‖` at `y`; points
/// within `1e-9` of `y` count as coincident.
pub fn subgradient_residual(points: &[Vec<f64>], y: &[f64]) -> f64 {
    let mut s = vec![0.0; y.len()];
    let mut mult = 0.0;
    for x in points {
        let d = sub(x, y);
        let r = norm(&d);
        if r <= 1e-9 {
            mult += 1.0;
        } else {
            s.iter_mut().zip(&d).for_each(|(a, v)| *a += v / r);
        }
    }
    (norm(&s) - mult).max(0.0)
}

/// All `2^n` sign vectors, `true` meaning `+1`.
pub fn all_signs(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |mask| (0..n).map(|i| mask >> i & 1 == 1).collect())
}

/// Kolmogorov–Smirnov distance between an empirical sample and a discrete
/// law given by equally weighted atoms.
pub fn ks_distance(sample: &[f64], atoms: &[f64]) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let mut a = atoms.to_vec();
    a.sort_by(f64::total_cmp);
    let mut points: Vec<f64> = s.iter().chain(&a).copied().collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let cdf = |v: &[f64], x: f64| v.partition_point(|&y| y <= x) as f64 / v.len() as f64;
    points.iter().map(|&x| (cdf(&s, x) - cdf(&a, x)).abs()).fold(0.0, f64::max)
}

/// `⌈level·m⌉`-th order statistic of `values`.
pub fn upper_quantile(values: &[f64], level: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = (level * v.len() as f64).ceil() as usize;
    v[k.max(1) - 1]
}

pub fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}
