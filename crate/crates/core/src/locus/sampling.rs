//! Newton projection onto a rank locus.
//!
//! With `A(p)` equal to the weighted W (or its transpose, whichever has fewer
//! columns `n`), `p` lies in `V^k` iff `A(p) V = 0` for some orthonormal
//! `n x (n - k)` matrix `V`. The incidence system is solved by Gauss-Newton
//! with minimum-norm steps; the gauge freedoms of the blocks and of `V` are
//! pinned by first-order orthogonality rows.

use super::point::PointPP;
use super::wmatrix::LocusModel;
use super::LocusSpec;
use crate::seed::child_rng;
use crate::tensor::singular_values;
use crate::{CMatrix, CVector, Complex64, Error, Result};
use rayon::prelude::*;

const STALL_WINDOW: usize = 10;

#[derive(Clone, Debug)]
pub struct SamplingOptions {
    pub max_iterations: usize,
    /// Stop once `||A V||`, relative to the kernel norm, falls below this.
    pub merit_tolerance: f64,
    /// Starts spent before giving up when no start succeeds.
    pub min_attempts: usize,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self {
            max_iterations: 80,
            merit_tolerance: 1e-14,
            min_attempts: 32,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SampleOutcome {
    /// Accepted points, in start order.
    pub points: Vec<PointPP>,
    pub attempts: usize,
}

impl SampleOutcome {
    pub fn success_ratio(&self) -> f64 {
        self.points.len() as f64 / self.attempts.max(1) as f64
    }
}

/// Runs `count` seeded random starts and keeps the ones that converge onto
/// the locus. If none does, keeps trying up to `min_attempts` starts before
/// reporting `EmptyOrNotFound`.
pub fn sample_locus(spec: &LocusSpec, count: usize, seed: u64) -> Result<SampleOutcome> {
    sample_locus_with(spec, count, seed, &SamplingOptions::default())
}

pub fn sample_locus_with(
    spec: &LocusSpec,
    count: usize,
    seed: u64,
    opts: &SamplingOptions,
) -> Result<SampleOutcome> {
    if count == 0 {
        return Err(Error::InvalidParams("sample count must be at least 1".into()));
    }
    let run = |range: std::ops::Range<usize>| -> Vec<Option<PointPP>> {
        range
            .into_par_iter()
            .map(|i| {
                let mut rng = child_rng(seed, i as u64);
                let start = PointPP::random(spec.group_dims(), &mut rng);
                project_with(spec, &start, opts)
            })
            .collect()
    };
    let mut points: Vec<PointPP> = run(0..count).into_iter().flatten().collect();
    let mut attempts = count;
    if points.is_empty() && count < opts.min_attempts {
        points = run(count..opts.min_attempts).into_iter().flatten().collect();
        attempts = opts.min_attempts;
    }
    if points.is_empty() {
        return Err(Error::EmptyOrNotFound { attempts });
    }
    points.truncate(count);
    Ok(SampleOutcome { points, attempts })
}

/// Projects `start` onto the locus; `None` if Newton does not reach a point
/// whose `(k+1)`-th singular value is below `tau_rank / 10` relative.
pub fn project_to_locus(spec: &LocusSpec, start: &PointPP) -> Option<PointPP> {
    project_with(spec, start, &SamplingOptions::default())
}

pub(crate) fn project_with(spec: &LocusSpec, start: &PointPP, opts: &SamplingOptions) -> Option<PointPP> {
    if spec.is_everything() {
        return Some(start.clone());
    }
    let model = spec.model();
    let k = spec.k();
    let transpose = model.cols() > model.rows();
    let eval = |blocks: &[CVector]| -> CMatrix {
        let w = model.eval_blocks(blocks);
        if transpose {
            w.transpose()
        } else {
            w
        }
    };
    let mut blocks: Vec<CVector> = start.blocks().to_vec();
    let a = eval(&blocks);
    let n = a.ncols();
    let m = n - k;
    let mut v = initial_kernel(&a, m);
    let reference = model.kernel_norm().max(f64::MIN_POSITIVE);
    let merit_of = |a: &CMatrix, v: &CMatrix| (a * v).norm() / reference;
    let mut merit = merit_of(&a, &v);
    let mut history = Vec::with_capacity(opts.max_iterations);
    for it in 0..opts.max_iterations {
        if merit < opts.merit_tolerance {
            break;
        }
        // Gauss-Newton is fast near a solution; slow progress means no nearby point.
        if it >= STALL_WINDOW && merit > 0.5 * history[it - STALL_WINDOW] {
            break;
        }
        history.push(merit);
        let step = match newton_step(model, &blocks, &v, &eval) {
            Some(s) => s,
            None => break,
        };
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..12 {
            let (nb, nv) = apply_step(&blocks, &v, &step, t);
            let nm = merit_of(&eval(&nb), &nv);
            if nm < merit {
                blocks = nb;
                v = nv;
                merit = nm;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let p = PointPP::new(blocks).ok()?;
    accept(model, &p, k, spec.tau_rank()).then_some(p)
}

fn accept(model: &LocusModel, p: &PointPP, k: usize, tau: f64) -> bool {
    let s = singular_values(&model.eval(p));
    let s1 = s.first().copied().unwrap_or(0.0);
    if s1 <= model.floor(0.1 * tau) {
        return true;
    }
    s.get(k).map_or(true, |&sk| sk < 0.1 * tau * s1)
}

/// Right singular vectors of the `m` smallest singular values.
fn initial_kernel(a: &CMatrix, m: usize) -> CMatrix {
    let n = a.ncols();
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[x].total_cmp(&svd.singular_values[y]));
    let mut v = CMatrix::zeros(n, m);
    for (j, &idx) in order.iter().take(m).enumerate() {
        for i in 0..n {
            v[(i, j)] = vt[(idx, i)].conj();
        }
    }
    v
}

struct Step {
    dp: Vec<CVector>,
    dv: CMatrix,
}

fn newton_step(
    model: &LocusModel,
    blocks: &[CVector],
    v: &CMatrix,
    eval: &dyn Fn(&[CVector]) -> CMatrix,
) -> Option<Step> {
    let a = eval(blocks);
    let (ra, n) = (a.nrows(), a.ncols());
    let m = v.ncols();
    let dims = model.group_sizes();
    let np: usize = dims.iter().sum();
    let nunk = np + n * m;
    let neq = ra * m + dims.len() + m * m;
    let mut j = CMatrix::zeros(neq, nunk);
    let mut rhs = CVector::zeros(neq);
    let av = &a * v;
    for b in 0..m {
        for i in 0..ra {
            rhs[b * ra + i] = -av[(i, b)];
        }
    }
    // Derivatives in p: A is multilinear, so dA/dp_g[c] is A with block g set to e_c.
    let mut col = 0;
    for (g, &d) in dims.iter().enumerate() {
        for c in 0..d {
            let mut bl = blocks.to_vec();
            let mut e = CVector::zeros(d);
            e[c] = Complex64::new(1.0, 0.0);
            bl[g] = e;
            let dav = eval(&bl) * v;
            for b in 0..m {
                for i in 0..ra {
                    j[(b * ra + i, col)] = dav[(i, b)];
                }
            }
            col += 1;
        }
    }
    // Derivatives in V[r, b]: d(AV)[i, b] = A[i, r].
    for b in 0..m {
        for r in 0..n {
            let c = np + b * n + r;
            for i in 0..ra {
                j[(b * ra + i, c)] = a[(i, r)];
            }
        }
    }
    // Gauge rows.
    let mut row = ra * m;
    let mut off = 0;
    for (g, &d) in dims.iter().enumerate() {
        for c in 0..d {
            j[(row, off + c)] = blocks[g][c].conj();
        }
        off += d;
        row += 1;
    }
    for a_ in 0..m {
        for b in 0..m {
            for r in 0..n {
                j[(row, np + b * n + r)] = v[(r, a_)].conj();
            }
            row += 1;
        }
    }
    let scale = j.norm().max(f64::MIN_POSITIVE);
    let svd = j.svd(true, true);
    let x = svd.solve(&rhs, 1e-12 * scale).ok()?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    let mut dp = Vec::with_capacity(dims.len());
    let mut off = 0;
    for &d in dims {
        dp.push(x.rows(off, d).into_owned());
        off += d;
    }
    let dv = CMatrix::from_fn(n, m, |r, b| x[np + b * n + r]);
    Some(Step { dp, dv })
}

fn apply_step(blocks: &[CVector], v: &CMatrix, step: &Step, t: f64) -> (Vec<CVector>, CMatrix) {
    let tc = Complex64::new(t, 0.0);
    let nb = blocks
        .iter()
        .zip(&step.dp)
        .map(|(b, d)| {
            let x = b + d * tc;
            let n = x.norm();
            if n > 0.0 {
                x / Complex64::new(n, 0.0)
            } else {
                b.clone()
            }
        })
        .collect();
    let nv = orthonormalize(&(v + &step.dv * tc));
    (nb, nv)
}

fn orthonormalize(v: &CMatrix) -> CMatrix {
    v.clone().qr().q()
}
