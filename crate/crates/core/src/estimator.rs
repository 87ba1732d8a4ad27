//! Spatial median, geometric median-of-means and the plug-in scale quantities.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::{Sample, Vector};
use crate::error::{Error, Result};
use crate::rng::{domain, substream};
use crate::scalar::{dist_sq, dot, max_abs, norm_sq, Scalar};

/// Stopping rules for the Weiszfeld iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig<T> {
    /// Relative iterate change `‖β_{t+1} − β_t‖ / max(1, ‖β_t‖)` below which the
    /// iteration may stop.
    pub tol: T,
    pub max_iter: usize,
    /// A point counts as coincident with the iterate when closer than
    /// `anchor_eps × scale`, where scale is the largest absolute data entry.
    pub anchor_eps: T,
    /// The estimating-equation residual must be at most `n × grad_tol` at exit.
    pub grad_tol: T,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self { tol: T::of(1e-10), max_iter: 1000, anchor_eps: T::of(1e-12), grad_tol: T::of(1e-7) }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero()) || self.max_iter == 0 || !(self.grad_tol > T::zero()) {
            return Err(Error::InvalidArgument(
                "solver needs tol > 0, grad_tol > 0 and max_iter >= 1".into(),
            ));
        }
        if !(self.anchor_eps >= T::zero()) {
            return Err(Error::InvalidArgument("anchor_eps must be >= 0".into()));
        }
        Ok(())
    }
}

/// Sample spatial median together with solver diagnostics and the plug-in
/// quantities `ζ̂₁ = mean ‖X_i − θ̂‖⁻¹` and `diag(B̂)`, `B̂ = mean S(X_i − θ̂)S(X_i − θ̂)ᵀ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialMedianFit<T> {
    pub theta_hat: Vector<T>,
    pub iterations: usize,
    /// `L_n(θ̂) = Σ (‖X_i − θ̂‖ − ‖X_i‖)`.
    pub objective: T,
    /// Norm of the minimal-norm subgradient of the objective at `θ̂`. Away from
    /// data points this is `‖Σ S(X_i − θ̂)‖`.
    pub grad_norm: T,
    /// `None` when every residual is zero.
    pub zeta1_hat: Option<T>,
    pub b_diag_hat: Vec<T>,
    /// Observations that entered the `ζ̂₁`/`B̂` averages.
    pub n_effective: usize,
}

/// `x / ‖x‖`, and the zero vector for `x = 0`.
pub fn spatial_sign<T: Scalar>(x: &[T]) -> Vec<T> {
    let r = norm_sq(x).sqrt();
    if r > T::zero() {
        x.iter().map(|&v| v / r).collect()
    } else {
        vec![T::zero(); x.len()]
    }
}

pub(crate) struct Solution<T> {
    pub point: Vec<T>,
    pub iterations: usize,
    pub residual: T,
    pub sum_dist: T,
}

/// Coordinate-wise median of the rows of a row-major `n × p` buffer.
pub(crate) fn coordinate_median<T: Scalar>(points: &[T], n: usize, p: usize) -> Vec<T> {
    let mut col = vec![T::zero(); n];
    let two = T::one() + T::one();
    (0..p)
        .map(|j| {
            for (c, row) in col.iter_mut().zip(points.chunks_exact(p)) {
                *c = row[j];
            }
            let cmp = |a: &T, b: &T| a.partial_cmp(b).expect("finite data");
            let mid = n / 2;
            let (lo, &mut hi, _) = col.select_nth_unstable_by(mid, cmp);
            if n % 2 == 1 {
                hi
            } else {
                let below = lo.iter().cloned().fold(T::neg_infinity(), T::max);
                (below + hi) / two
            }
        })
        .collect()
}

/// Modified Weiszfeld iteration (Vardi–Zhang step at data points) for
/// `argmin_β Σ ‖x_i − β‖` over the rows of `points`.
///
/// `trace`, when given, receives `Σ ‖x_i − β_t‖` for every visited iterate.
pub(crate) fn weiszfeld<T: Scalar>(
    points: &[T],
    n: usize,
    p: usize,
    init: Vec<T>,
    config: &SolverConfig<T>,
    mut trace: Option<&mut Vec<T>>,
) -> Result<Solution<T>> {
    debug_assert_eq!(points.len(), n * p);
    let scale = max_abs(points);
    let eps = config.anchor_eps * scale;
    let grad_bound = T::of_usize(n) * config.grad_tol;
    let slack = T::of(1e-9);

    let mut y = init;
    let mut grad = vec![T::zero(); p];
    let mut last_step = T::infinity();
    let mut prev_step = T::infinity();
    let mut last_step_raw = T::infinity();
    let mut last_obj = T::infinity();

    for it in 0..config.max_iter {
        // grad = Σ_{non-coincident} (x_i − y)/d_i; the plain Weiszfeld map is
        // y + grad / Σ 1/d_i.
        grad.iter_mut().for_each(|v| *v = T::zero());
        let mut wsum = T::zero();
        let mut sum_dist = T::zero();
        let mut coincident = 0usize;
        let mut nearest = (0usize, T::infinity());
        for (i, x) in points.chunks_exact(p).enumerate() {
            let d = dist_sq(x, &y).sqrt();
            sum_dist += d;
            if d < nearest.1 {
                nearest = (i, d);
            }
            if d <= eps {
                coincident += 1;
                continue;
            }
            let w = T::one() / d;
            wsum += w;
            for ((acc, &xv), &yv) in grad.iter_mut().zip(x).zip(&y) {
                *acc += w * (xv - yv);
            }
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(sum_dist);
        }
        if sum_dist > last_obj + slack * (T::one() + last_obj.abs()) {
            return Err(Error::DegenerateSample(it));
        }
        last_obj = sum_dist;

        if coincident == n {
            return Ok(Solution { point: y, iterations: it, residual: T::zero(), sum_dist });
        }

        let r = norm_sq(&grad).sqrt();
        let eta = T::of_usize(coincident);
        let residual = if coincident > 0 { (r - eta).max(T::zero()) } else { r };

        if coincident > 0 && r <= eta {
            return Ok(Solution { point: y, iterations: it, residual: T::zero(), sum_dist });
        }
        if residual == T::zero() || (last_step < config.tol && residual <= grad_bound) {
            return Ok(Solution { point: y, iterations: it, residual, sum_dist });
        }

        // Weiszfeld approaches an optimal data point only sublinearly, so the
        // nearest data point is tested directly once the iterate is close to
        // it or progress has slowed.
        let near = T::of(1e-3) * sum_dist / T::of_usize(n);
        let slow = it >= 5 && prev_step < T::infinity() && last_step_raw > T::of(0.5) * prev_step;
        if coincident == 0 && (slow || nearest.1 < near) {
            let anchor = &points[nearest.0 * p..(nearest.0 + 1) * p];
            if subgradient_residual(points, p, anchor, eps) == T::zero() {
                y.copy_from_slice(anchor);
                last_step = T::infinity();
                last_step_raw = T::infinity();
                prev_step = T::infinity();
                continue;
            }
        }

        // Vardi–Zhang: (1 − η/r)·T̃(y) + (η/r)·y when anchored at a data point.
        let factor = if coincident > 0 { (T::one() - eta / r) / wsum } else { T::one() / wsum };
        let y_norm = norm_sq(&y).sqrt();
        let mut next: Vec<T> = y.iter().zip(&grad).map(|(&yv, &g)| yv + factor * g).collect();
        let mut step = factor * r;
        // Weiszfeld contracts slowly when the minimizer sits close to a data
        // point; a damped Newton step is taken whenever it does better.
        if coincident == 0 && slow {
            if let Some(newton) = newton_step(points, p, &y, eps, &grad, &next) {
                step = norm_sq(&newton.iter().zip(&y).map(|(&a, &b)| a - b).collect::<Vec<_>>()).sqrt();
                next = newton;
            }
        }
        y = next;
        prev_step = last_step_raw;
        last_step_raw = step;
        last_step = step / y_norm.max(T::one());
    }

    let residual = subgradient_residual(points, p, &y, eps);
    Err(Error::DidNotConverge {
        iterations: config.max_iter,
        grad_norm: residual.as_f64(),
        replicate: None,
    })
}

fn sum_dist<T: Scalar>(points: &[T], p: usize, y: &[T]) -> T {
    points.chunks_exact(p).map(|x| dist_sq(x, y).sqrt()).sum()
}

/// `Σ (v − u_i u_iᵀv)/r_i` over points farther than `eps` from `y`, with
/// `u_i = (x_i − y)/r_i`: the Hessian of the objective applied to `v`.
fn hessian_apply<T: Scalar>(points: &[T], p: usize, y: &[T], eps: T, v: &[T], out: &mut [T]) {
    out.iter_mut().for_each(|o| *o = T::zero());
    let mut d = vec![T::zero(); p];
    for x in points.chunks_exact(p) {
        for ((dv, &xv), &yv) in d.iter_mut().zip(x).zip(y) {
            *dv = xv - yv;
        }
        let r2 = norm_sq(&d);
        let r = r2.sqrt();
        if r <= eps {
            continue;
        }
        let proj = dot(&d, v) / r2;
        for ((o, &vv), &dv) in out.iter_mut().zip(v).zip(&d) {
            *o += (vv - dv * proj) / r;
        }
    }
}

/// Newton step `y + t·H⁻¹g` (conjugate gradients on the Hessian, `t` halved
/// up to three times) when it lowers the objective below that of `fallback`.
fn newton_step<T: Scalar>(
    points: &[T],
    p: usize,
    y: &[T],
    eps: T,
    grad: &[T],
    fallback: &[T],
) -> Option<Vec<T>> {
    let mut dir = vec![T::zero(); p];
    let mut res = grad.to_vec();
    let mut search = res.clone();
    let mut hs = vec![T::zero(); p];
    let mut rr = norm_sq(&res);
    let stop = rr * T::of(1e-24);
    for _ in 0..p.min(50) {
        hessian_apply(points, p, y, eps, &search, &mut hs);
        let curv = dot(&search, &hs);
        if !(curv > T::zero()) {
            break;
        }
        let a = rr / curv;
        dir.iter_mut().zip(&search).for_each(|(d, &s)| *d += a * s);
        res.iter_mut().zip(&hs).for_each(|(r, &h)| *r -= a * h);
        let rr_next = norm_sq(&res);
        if rr_next <= stop {
            break;
        }
        let beta = rr_next / rr;
        search.iter_mut().zip(&res).for_each(|(s, &r)| *s = r + beta * *s);
        rr = rr_next;
    }
    let target = sum_dist(points, p, fallback);
    let mut t = T::one();
    for _ in 0..4 {
        let cand: Vec<T> = y.iter().zip(&dir).map(|(&yv, &d)| yv + t * d).collect();
        if sum_dist(points, p, &cand) < target {
            return Some(cand);
        }
        t = t * T::of(0.5);
    }
    None
}

fn subgradient_residual<T: Scalar>(points: &[T], p: usize, y: &[T], eps: T) -> T {
    let mut grad = vec![T::zero(); p];
    let mut coincident = 0usize;
    for x in points.chunks_exact(p) {
        let d = dist_sq(x, y).sqrt();
        if d <= eps {
            coincident += 1;
            continue;
        }
        for ((g, &xv), &yv) in grad.iter_mut().zip(x).zip(y) {
            *g += (xv - yv) / d;
        }
    }
    let r = norm_sq(&grad).sqrt();
    (r - T::of_usize(coincident)).max(T::zero())
}

pub(crate) fn solve<T: Scalar>(
    points: &[T],
    n: usize,
    p: usize,
    config: &SolverConfig<T>,
    trace: Option<&mut Vec<T>>,
) -> Result<Solution<T>> {
    config.validate()?;
    let init = coordinate_median(points, n, p);
    weiszfeld(points, n, p, init, config, trace)
}

fn fit_from_solution<T: Scalar>(sample: &Sample<T>, sol: Solution<T>, eps: T) -> SpatialMedianFit<T> {
    let p = sample.p();
    let mut inv_norm_sum = T::zero();
    let mut b = vec![T::zero(); p];
    let mut used = 0usize;
    let mut norms_sum = T::zero();
    for x in sample.rows() {
        norms_sum += norm_sq(x).sqrt();
        let r2 = dist_sq(x, &sol.point);
        let r = r2.sqrt();
        if r <= eps {
            continue;
        }
        used += 1;
        inv_norm_sum += T::one() / r;
        for ((bj, &xv), &tv) in b.iter_mut().zip(x).zip(&sol.point) {
            let d = xv - tv;
            *bj += d * d / r2;
        }
    }
    let (zeta1_hat, b_diag_hat) = if used > 0 {
        let m = T::of_usize(used);
        (Some(inv_norm_sum / m), b.into_iter().map(|v| v / m).collect())
    } else {
        (None, b)
    };
    SpatialMedianFit {
        theta_hat: Vector::from_vec_unchecked(sol.point),
        iterations: sol.iterations,
        objective: sol.sum_dist - norms_sum,
        grad_norm: sol.residual,
        zeta1_hat,
        b_diag_hat,
        n_effective: used,
    }
}

/// Minimizes `L_n(β) = Σ (‖X_i − β‖ − ‖X_i‖)` starting from the coordinate-wise
/// median, and computes `ζ̂₁` and `diag(B̂)` from the residuals at the optimum.
///
/// Observations that coincide with `θ̂` are left out of the `ζ̂₁`/`B̂` averages.
/// When the observations are collinear the minimizer may not be unique; the
/// point the iteration reaches is returned.
pub fn spatial_median<T: Scalar>(
    sample: &Sample<T>,
    config: &SolverConfig<T>,
) -> Result<SpatialMedianFit<T>> {
    let sol = solve(sample.as_flat(), sample.n(), sample.p(), config, None)?;
    let eps = config.anchor_eps * max_abs(sample.as_flat());
    Ok(fit_from_solution(sample, sol, eps))
}

/// [`spatial_median`] that also returns the objective value `Σ ‖X_i − β_t‖` of
/// every iterate, for monotonicity diagnostics.
pub fn spatial_median_traced<T: Scalar>(
    sample: &Sample<T>,
    config: &SolverConfig<T>,
) -> Result<(SpatialMedianFit<T>, Vec<T>)> {
    let mut trace = Vec::new();
    let sol = solve(sample.as_flat(), sample.n(), sample.p(), config, Some(&mut trace))?;
    let eps = config.anchor_eps * max_abs(sample.as_flat());
    Ok((fit_from_solution(sample, sol, eps), trace))
}

/// Geometric median-of-means: shuffle rows with a seeded permutation, split
/// into `k_blocks` contiguous blocks whose sizes differ by at most one, and
/// return the spatial median of the block means.
pub fn gmom<T: Scalar>(
    sample: &Sample<T>,
    k_blocks: usize,
    config: &SolverConfig<T>,
    seed: u64,
) -> Result<Vector<T>> {
    let n = sample.n();
    if k_blocks == 0 || k_blocks > n {
        return Err(Error::InvalidArgument(format!("k_blocks must lie in 1..={n}, got {k_blocks}")));
    }
    let order = gmom_permutation(n, seed);
    let means = block_means(sample, &order, k_blocks);
    let sol = solve(&means, k_blocks, sample.p(), config, None)?;
    Ok(Vector::from_vec_unchecked(sol.point))
}

/// Row order used by [`gmom`] for a given seed.
pub fn gmom_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = substream(seed, domain::GMOM_PERMUTATION, 0);
    order.shuffle(&mut rng);
    order
}

/// Block sizes used by [`gmom`]: the first `n mod k` blocks get one extra row.
pub fn gmom_block_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|b| n / k + usize::from(b < n % k)).collect()
}

fn block_means<T: Scalar>(sample: &Sample<T>, order: &[usize], k: usize) -> Vec<T> {
    let p = sample.p();
    let mut out = vec![T::zero(); k * p];
    let mut start = 0;
    for (b, size) in gmom_block_sizes(sample.n(), k).into_iter().enumerate() {
        let dst = &mut out[b * p..(b + 1) * p];
        for &i in &order[start..start + size] {
            for (acc, &x) in dst.iter_mut().zip(sample.row(i)) {
                *acc += x;
            }
        }
        let inv = T::one() / T::of_usize(size);
        dst.iter_mut().for_each(|v| *v *= inv);
        start += size;
    }
    out
}

/// Empirical max-norm remainder of the linear (Bahadur) expansion,
/// `‖√n(θ̂ − θ) − n^{-1/2} ζ̂₁⁻¹ Σ S(X_i − θ)‖_∞`, with `ζ̂₁` taken from `fit`.
pub fn bahadur_remainder<T: Scalar>(
    sample: &Sample<T>,
    theta_true: &[T],
    fit: &SpatialMedianFit<T>,
) -> Result<T> {
    let p = sample.p();
    if theta_true.len() != p {
        return Err(Error::DimensionMismatch { expected: p, found: theta_true.len() });
    }
    let zeta = fit.zeta1_hat.ok_or(Error::DegenerateRemainder)?;
    let mut sign_sum = vec![T::zero(); p];
    let mut buf = vec![T::zero(); p];
    for x in sample.rows() {
        for ((b, &xv), &t) in buf.iter_mut().zip(x).zip(theta_true) {
            *b = xv - t;
        }
        let r = norm_sq(&buf).sqrt();
        if r > T::zero() {
            for (s, &b) in sign_sum.iter_mut().zip(&buf) {
                *s += b / r;
            }
        }
    }
    let sqrt_n = T::of_usize(sample.n()).sqrt();
    let rem = fit
        .theta_hat
        .iter()
        .zip(theta_true)
        .zip(&sign_sum)
        .map(|((&th, &t), &s)| (sqrt_n * (th - t) - s / (sqrt_n * zeta)).abs())
        .fold(T::zero(), T::max);
    Ok(rem)
}
