//! Linearity of locus components.
//!
//! A component is linear when it is a product of linear subspaces, one per
//! measured group. Around each sample the test collects nearby locus points,
//! takes per-group spans of their blocks and probes random points of the
//! product of spans. A probe that is robustly outside the locus, next to a
//! sample that is robustly inside, is a witness of nonlinearity.

use super::point::PointPP;
use super::poly::{Coefficient, MultiHomogPoly};
use super::sampling::project_to_locus;
use super::{robust_membership, LocusSpec};
use crate::seed::{child_rng, derive_seed};
use crate::tensor::{numerical_rank, random_complex_vector, singular_values};
use crate::{CMatrix, CVector, Complex64, Error, Result};
use rand::Rng;
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct LinearityOptions {
    /// Radius of the neighbourhood used for local spans.
    pub epsilon: f64,
    /// Relative singular-value cutoff for span bases.
    pub span_tolerance: f64,
    /// Random product-of-span points probed per sample.
    pub span_points: usize,
    /// At most this many samples are analysed.
    pub max_samples: usize,
    /// Interpolation steps of a continuation path.
    pub path_steps: usize,
    /// Fraction of unclear samples above which the verdict is Inconclusive.
    pub unclear_fraction: f64,
    /// Step of the local walk used to fit a `(1,1)` form.
    pub walk_step: f64,
}

impl Default for LinearityOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            span_tolerance: 1e-7,
            span_points: 50,
            max_samples: 40,
            path_steps: 16,
            unclear_fraction: 0.25,
            walk_step: 0.02,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    Linear,
    Nonlinear,
}

/// Samples grouped into one component.
#[derive(Clone, Debug)]
pub struct ComponentSample {
    pub points: Vec<PointPP>,
    /// Orthonormal span basis per group (columns), the largest local span seen.
    pub spans: Vec<CMatrix>,
    pub kind: ComponentKind,
    /// Fitted `(1,1)` form, for two-group cuts where one fits.
    pub form: Option<MultiHomogPoly<Complex64>>,
    /// Coefficient rank of `form`.
    pub form_rank: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Witness {
    /// Robust member of the locus.
    pub locus_point: PointPP,
    /// Robust non-member in the product of the local spans at `locus_point`.
    pub span_point: PointPP,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub enum VerdictTag {
    Linear,
    NonlinearWitness(Witness),
    Inconclusive,
}

impl VerdictTag {
    pub fn name(&self) -> &'static str {
        match self {
            VerdictTag::Linear => "Linear",
            VerdictTag::NonlinearWitness(_) => "NonlinearWitness",
            VerdictTag::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinearityVerdict {
    pub tag: VerdictTag,
    pub components_found: usize,
    pub components: Vec<ComponentSample>,
    pub samples_used: usize,
    pub unclear: usize,
}

#[derive(Clone, Debug)]
enum Local {
    Linear(Vec<CMatrix>),
    Nonlinear(Vec<CMatrix>, Witness),
    Unclear,
}

/// Decides whether the components met by `samples` are linear.
pub fn linearity_test(spec: &LocusSpec, samples: &[PointPP], seed: u64) -> Result<LinearityVerdict> {
    linearity_test_with(spec, samples, seed, &LinearityOptions::default())
}

pub fn linearity_test_with(
    spec: &LocusSpec,
    samples: &[PointPP],
    seed: u64,
    opts: &LinearityOptions,
) -> Result<LinearityVerdict> {
    for p in samples {
        if p.dims() != spec.group_dims() {
            return Err(Error::InvalidDimension("sample does not match the cut".into()));
        }
    }
    let samples: Vec<PointPP> = samples.iter().take(opts.max_samples).cloned().collect();
    if samples.is_empty() {
        return Ok(LinearityVerdict {
            tag: VerdictTag::Inconclusive,
            components_found: 0,
            components: Vec::new(),
            samples_used: 0,
            unclear: 0,
        });
    }
    if spec.is_everything() {
        let spans = spec.group_dims().iter().map(|&d| CMatrix::identity(d, d)).collect();
        return Ok(LinearityVerdict {
            tag: VerdictTag::Linear,
            components_found: 1,
            components: vec![ComponentSample {
                points: samples.clone(),
                spans,
                kind: ComponentKind::Linear,
                form: None,
                form_rank: None,
            }],
            samples_used: samples.len(),
            unclear: 0,
        });
    }

    let locals: Vec<Local> = samples
        .par_iter()
        .enumerate()
        .map(|(i, p)| analyze_sample(spec, p, derive_seed(seed, i as u64), opts))
        .collect();

    let two_group = spec.group_dims().len() == 2;
    let forms: Vec<Option<CVector>> = samples
        .par_iter()
        .zip(&locals)
        .enumerate()
        .map(|(i, (p, l))| match l {
            Local::Nonlinear(..) if two_group => {
                fit_bilinear_form(spec, p, derive_seed(seed, 1_000_000 + i as u64), opts)
            }
            _ => None,
        })
        .collect();

    let mut unclear = 0;
    let mut witness: Option<Witness> = None;
    let mut linear_clusters: Vec<ComponentSample> = Vec::new();
    let mut nonlinear_clusters: Vec<(ComponentSample, Option<CVector>)> = Vec::new();
    for (i, (p, local)) in samples.iter().zip(&locals).enumerate() {
        match local {
            Local::Unclear => unclear += 1,
            Local::Linear(spans) => {
                // Samples on a singular stratum (where components meet) see a
                // smaller local span, contained in the component's span.
                let found = linear_clusters.iter_mut().find(|c| {
                    (spans_contain(&c.spans, spans) || spans_contain(spans, &c.spans))
                        && straight_path_on_locus(spec, &c.points[0], p, opts)
                });
                match found {
                    Some(c) => {
                        if !spans_contain(&c.spans, spans) {
                            c.spans = spans.clone();
                        }
                        c.points.push(p.clone());
                    }
                    None => linear_clusters.push(ComponentSample {
                        points: vec![p.clone()],
                        spans: spans.clone(),
                        kind: ComponentKind::Linear,
                        form: None,
                        form_rank: None,
                    }),
                }
            }
            Local::Nonlinear(spans, w) => {
                let form = forms[i].clone();
                let form_rank = form.as_ref().map(|f| {
                    let poly = form_poly(spec.group_dims(), f);
                    bilinear_rank_factor_test(&poly).map(|b| b.coefficient_rank).unwrap_or(0)
                });
                if form_rank == Some(1) {
                    // A rank-1 form is a product of linear forms: the fitted
                    // piece is linear, which contradicts the span probe.
                    unclear += 1;
                    continue;
                }
                if witness.is_none() {
                    witness = Some(w.clone());
                }
                let dims = spec.group_dims();
                let found = nonlinear_clusters.iter_mut().find(|(c, f)| match (f, &form) {
                    (Some(a), Some(b)) => {
                        projectively_equal(a, b)
                            || (form_vanishes(dims, a, p) && c.points.iter().take(3).all(|q| form_vanishes(dims, b, q)))
                    }
                    (Some(a), None) => form_vanishes(dims, a, p),
                    (None, Some(b)) => c.points.iter().all(|q| form_vanishes(dims, b, q)),
                    (None, None) => c
                        .points
                        .iter()
                        .take(3)
                        .any(|q| continuation_connects(spec, q, p, opts)),
                });
                match found {
                    Some((c, f)) => {
                        if f.is_none() && form.is_some() {
                            c.form = form.as_ref().map(|b| form_poly(dims, b));
                            c.form_rank = form_rank;
                            *f = form;
                        }
                        c.points.push(p.clone());
                    }
                    None => nonlinear_clusters.push((
                        ComponentSample {
                            points: vec![p.clone()],
                            spans: spans.clone(),
                            kind: ComponentKind::Nonlinear,
                            form: form.as_ref().map(|f| form_poly(spec.group_dims(), f)),
                            form_rank,
                        },
                        form,
                    )),
                }
            }
        }
    }

    // A linear piece inside an irreducible fitted hypersurface is part of
    // that component, typically a point where two components cross.
    let mut rng = child_rng(seed, u64::MAX);
    linear_clusters.retain(|lc| {
        let probes: Vec<PointPP> = (0..4).map(|_| random_span_point(&lc.spans, &mut rng)).collect();
        let host = nonlinear_clusters.iter_mut().find(|(c, f)| {
            c.form_rank.is_some_and(|r| r >= 2)
                && f.as_ref().is_some_and(|f| {
                    lc.points.iter().chain(&probes).all(|q| form_vanishes(spec.group_dims(), f, q))
                })
        });
        match host {
            Some((c, _)) => {
                c.points.extend(lc.points.iter().cloned());
                false
            }
            None => true,
        }
    });

    let classified = samples.len() - unclear;
    let mut components = linear_clusters;
    components.extend(nonlinear_clusters.into_iter().map(|(c, _)| c));
    let tag = if let Some(w) = witness {
        VerdictTag::NonlinearWitness(w)
    } else if classified == 0 || unclear as f64 > opts.unclear_fraction * samples.len() as f64 {
        VerdictTag::Inconclusive
    } else {
        VerdictTag::Linear
    };
    Ok(LinearityVerdict {
        tag,
        components_found: components.len(),
        components,
        samples_used: samples.len(),
        unclear,
    })
}

fn random_direction<R: Rng + ?Sized>(p: &PointPP, scale: f64, rng: &mut R) -> Vec<CVector> {
    p.blocks()
        .iter()
        .map(|b| {
            let d = random_complex_vector(b.len(), rng);
            let n = d.norm().max(f64::MIN_POSITIVE);
            b + d * Complex64::new(scale / n, 0.0)
        })
        .collect()
}

fn analyze_sample(spec: &LocusSpec, p: &PointPP, seed: u64, opts: &LinearityOptions) -> Local {
    if robust_membership(spec, p).ok().flatten() != Some(true) {
        return Local::Unclear;
    }
    let mut rng = child_rng(seed, 0);
    let dims = spec.group_dims().to_vec();
    let wanted = dims.iter().sum::<usize>() + 4;
    let mut neighbours = Vec::with_capacity(wanted);
    for _ in 0..2 * wanted {
        if neighbours.len() == wanted {
            break;
        }
        let Ok(start) = PointPP::new(random_direction(p, opts.epsilon, &mut rng)) else {
            continue;
        };
        if let Some(q) = project_to_locus(spec, &start) {
            if q.distance(p) <= 20.0 * opts.epsilon {
                neighbours.push(q);
            }
        }
    }
    if neighbours.len() * 2 < wanted {
        return Local::Unclear;
    }
    let spans: Vec<CMatrix> = (0..dims.len())
        .map(|g| {
            let mut cols = vec![p.block(g).clone()];
            cols.extend(neighbours.iter().map(|q| q.block(g).clone()));
            span_basis(&CMatrix::from_columns(&cols), opts.span_tolerance)
        })
        .collect();
    let mut saw_unclear = false;
    for _ in 0..opts.span_points {
        let q = random_span_point(&spans, &mut rng);
        match robust_membership(spec, &q).ok().flatten() {
            Some(true) => {}
            Some(false) => {
                let rank = spec.model().rank(&q, spec.tau_rank());
                let detail = format!(
                    "random point of the local span product has rank {rank} > k = {}; span dims {:?}",
                    spec.k(),
                    spans.iter().map(|s| s.ncols()).collect::<Vec<_>>()
                );
                return Local::Nonlinear(
                    spans,
                    Witness {
                        locus_point: p.clone(),
                        span_point: q,
                        detail,
                    },
                );
            }
            None => saw_unclear = true,
        }
    }
    if saw_unclear {
        Local::Unclear
    } else {
        Local::Linear(spans)
    }
}

/// Orthonormal basis of the column span at a relative singular-value cutoff.
fn span_basis(m: &CMatrix, tol: f64) -> CMatrix {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested u");
    let s = svd.singular_values;
    let max = s.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..s.len()).filter(|&i| s[i] > tol * max).collect();
    CMatrix::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

fn random_span_point<R: Rng + ?Sized>(spans: &[CMatrix], rng: &mut R) -> PointPP {
    let blocks = spans
        .iter()
        .map(|s| s * random_complex_vector(s.ncols(), rng))
        .collect();
    PointPP::new(blocks).expect("span bases have full column rank")
}

fn projector(s: &CMatrix) -> CMatrix {
    s * s.adjoint()
}

/// Whether every span of `inner` lies in the matching span of `outer`.
fn spans_contain(outer: &[CMatrix], inner: &[CMatrix]) -> bool {
    outer.len() == inner.len()
        && outer.iter().zip(inner).all(|(o, i)| {
            o.ncols() >= i.ncols() && (i - projector(o) * i).norm() < 1e-6
        })
}

fn align_phase(a: &CVector, b: &CVector) -> CVector {
    let ip = a.dotc(b);
    if ip.norm() < 1e-14 {
        return b.clone();
    }
    b * (ip.conj() / ip.norm())
}

fn interpolate(a: &PointPP, b: &PointPP, t: f64) -> Option<PointPP> {
    let blocks = a
        .blocks()
        .iter()
        .zip(b.blocks())
        .map(|(x, y)| x * Complex64::new(1.0 - t, 0.0) + align_phase(x, y) * Complex64::new(t, 0.0))
        .collect();
    PointPP::new(blocks).ok()
}

fn straight_path_on_locus(spec: &LocusSpec, a: &PointPP, b: &PointPP, opts: &LinearityOptions) -> bool {
    (1..opts.path_steps).all(|i| {
        let t = i as f64 / opts.path_steps as f64;
        interpolate(a, b, t)
            .map(|q| robust_membership(spec, &q).ok().flatten() == Some(true))
            .unwrap_or(false)
    })
}

/// Interpolates from `a` to `b`, re-projecting every step; the path must
/// move continuously and end next to `b`.
fn continuation_connects(spec: &LocusSpec, a: &PointPP, b: &PointPP, opts: &LinearityOptions) -> bool {
    let step = (a.distance(b) / opts.path_steps as f64).max(1e-9);
    let mut prev = a.clone();
    for i in 1..=opts.path_steps {
        let t = i as f64 / opts.path_steps as f64;
        let Some(q) = interpolate(a, b, t).and_then(|s| project_to_locus(spec, &s)) else {
            return false;
        };
        if q.distance(&prev) > 4.0 * step + 1e-6 {
            return false;
        }
        prev = q;
    }
    prev.distance(b) <= 4.0 * step + 1e-6
}

/// Walks along the locus from `p` and fits a single `(1,1)` form to the
/// visited points; `None` unless the fit has a one-dimensional solution space.
fn fit_bilinear_form(spec: &LocusSpec, p: &PointPP, seed: u64, opts: &LinearityOptions) -> Option<CVector> {
    let dims = spec.group_dims();
    let (d1, d2) = (dims[0], dims[1]);
    let wanted = d1 * d2 + 4;
    let mut rng = child_rng(seed, 0);
    let mut points = vec![p.clone()];
    let mut current = p.clone();
    for _ in 0..3 * wanted {
        if points.len() == wanted {
            break;
        }
        let Ok(start) = PointPP::new(random_direction(&current, opts.walk_step, &mut rng)) else {
            continue;
        };
        if let Some(q) = project_to_locus(spec, &start) {
            if q.distance(&current) <= 4.0 * opts.walk_step {
                current = q.clone();
                points.push(q);
            }
        }
    }
    if points.len() < wanted {
        return None;
    }
    let rows = CMatrix::from_fn(points.len(), d1 * d2, |r, c| {
        points[r].block(0)[c / d2] * points[r].block(1)[c % d2]
    });
    let svd = rows.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let s = &svd.singular_values;
    let max = s.iter().copied().fold(0.0, f64::max);
    let small: Vec<usize> = (0..s.len()).filter(|&i| s[i] <= 1e-8 * max).collect();
    // Rows >= columns, so the thin SVD covers the whole column space.
    if small.len() != 1 || s.len() != d1 * d2 {
        return None;
    }
    let mut c = CVector::from_fn(d1 * d2, |i, _| vt[(small[0], i)].conj());
    normalize_form(&mut c);
    Some(c)
}

fn normalize_form(c: &mut CVector) {
    let n = c.norm();
    if let Some(z) = c.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).copied() {
        *c *= z.conj() / (z.norm() * n);
    }
}

/// Whether the unit-normalised `(1,1)` form `c` vanishes at `p` within `1e-6`.
fn form_vanishes(dims: &[usize], c: &CVector, p: &PointPP) -> bool {
    let (x, y) = (p.block(0), p.block(1));
    let d2 = dims[1];
    let v: Complex64 = (0..c.len()).map(|i| c[i] * x[i / d2] * y[i % d2]).sum();
    v.norm() <= 1e-6 * c.norm()
}

fn projectively_equal(a: &CVector, b: &CVector) -> bool {
    a.dotc(b).norm() / (a.norm() * b.norm()) > 1.0 - 1e-8
}

fn form_poly(dims: &[usize], c: &CVector) -> MultiHomogPoly<Complex64> {
    let (d1, d2) = (dims[0], dims[1]);
    let terms = (0..d1 * d2).map(|idx| {
        let mut e = vec![0u32; d1 + d2];
        e[idx / d2] = 1;
        e[d1 + idx % d2] = 1;
        (e, c[idx])
    });
    MultiHomogPoly::from_terms(dims.to_vec(), terms).expect("(1,1) terms are homogeneous")
}

/// Coefficient rank of a `(1,1)` form and, at rank 1, its two linear factors.
#[derive(Clone, Debug)]
pub struct BilinearFactorization {
    pub coefficient_rank: usize,
    /// Coefficient vectors `(l1, l2)` with `q(x, y) = (l1 . x) (l2 . y)`.
    pub factors: Option<(CVector, CVector)>,
}

/// Relative singular-value threshold for the coefficient rank.
const BILINEAR_RANK_TOL: f64 = 1e-9;

/// Writes `q = x^T B y` and returns the numerical rank of `B`; a form splits
/// into a product of linear forms exactly when that rank is 1.
pub fn bilinear_rank_factor_test<C: Coefficient>(q: &MultiHomogPoly<C>) -> Result<BilinearFactorization> {
    let b = q.bilinear_matrix()?;
    let (m, n) = (b.len(), b.first().map_or(0, |r| r.len()));
    let mat = CMatrix::from_fn(m, n, |i, j| b[i][j].to_c64());
    let rank = numerical_rank(&singular_values(&mat), BILINEAR_RANK_TOL);
    let factors = (rank == 1).then(|| {
        let svd = mat.svd(true, true);
        let (u, vt) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
        let top = (0..svd.singular_values.len())
            .max_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]))
            .expect("nonempty");
        let sigma = Complex64::new(svd.singular_values[top], 0.0);
        // B = sigma u v^dagger, so x^T B y = (sigma u . x)(conj(v) . y).
        let l1 = u.column(top).into_owned() * sigma;
        let l2 = vt.row(top).transpose().into_owned();
        (l1, l2)
    });
    Ok(BilinearFactorization {
        coefficient_rank: rank,
        factors,
    })
}
