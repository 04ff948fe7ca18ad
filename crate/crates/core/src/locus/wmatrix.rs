use super::ensemble::Ensemble;
use super::point::PointPP;
use super::poly::{Coefficient, GaussianRational, MultiHomogPoly};
use crate::tensor::{digits_of, index_of_digits, numerical_rank, singular_values, Cut};
use crate::{CMatrix, CVector, Complex64, Error, Result};
use std::collections::HashMap;

/// Default cap on the number of minors expanded symbolically.
pub const DEFAULT_MINOR_LIMIT: usize = 20_000;

/// Matrix of multihomogeneous forms: row `f` per ensemble member, column `b`
/// per residual basis state. Entries have multidegree `(1, ..., 1)`.
///
/// Rows are unweighted; `row_weights` holds the square roots of the member
/// weights, which scale rows and so leave every rank locus unchanged.
#[derive(Clone, Debug)]
pub struct WMatrix<C: Coefficient> {
    rows: usize,
    cols: usize,
    entries: Vec<MultiHomogPoly<C>>,
    row_weights: Vec<f64>,
    group_sizes: Vec<usize>,
}

impl<C: Coefficient> WMatrix<C> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, f: usize, b: usize) -> &MultiHomogPoly<C> {
        &self.entries[f * self.cols + b]
    }

    pub fn row_weights(&self) -> &[f64] {
        &self.row_weights
    }

    pub fn group_sizes(&self) -> &[usize] {
        &self.group_sizes
    }

    /// Unweighted evaluation at a point.
    pub fn eval(&self, p: &PointPP) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |f, b| self.entry(f, b).eval(p.blocks()))
    }
}

/// Members' amplitudes reordered so the measured groups come first, then the
/// residual, as `D x c` blocks (row = joint measured index, col = residual).
fn reordered_amplitudes<T: Clone>(amps: &[T], dims: &[usize], cut: &Cut) -> Vec<T> {
    let order = cut.axis_order();
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let mut out = amps.to_vec();
    let mut new_digits = vec![0; dims.len()];
    for (i, a) in amps.iter().enumerate() {
        let old = digits_of(i, dims);
        for (slot, &o) in new_digits.iter_mut().zip(&order) {
            *slot = old[o];
        }
        out[index_of_digits(&new_digits, &new_dims)] = a.clone();
    }
    out
}

fn build<C: Coefficient>(e: &Ensemble, cut: &Cut, amps: Vec<Vec<C>>) -> Result<WMatrix<C>> {
    let system = e.system();
    cut.check_system(system)?;
    let group_sizes = cut.group_dims(system);
    let cols = cut.residual_dim(system);
    if cols == 0 {
        return Err(Error::InvalidCut("empty residual".into()));
    }
    let d: usize = group_sizes.iter().product();
    let offsets: Vec<usize> = group_sizes
        .iter()
        .scan(0, |acc, &n| {
            let o = *acc;
            *acc += n;
            Some(o)
        })
        .collect();
    let nvars: usize = group_sizes.iter().sum();
    let monomials: Vec<Vec<u32>> = (0..d)
        .map(|mu| {
            let digits = digits_of(mu, &group_sizes);
            let mut e = vec![0u32; nvars];
            for (g, &x) in digits.iter().enumerate() {
                e[offsets[g] + x] = 1;
            }
            e
        })
        .collect();
    let mut entries = Vec::with_capacity(amps.len() * cols);
    for a in &amps {
        let a = reordered_amplitudes(a, system.dims(), cut);
        for b in 0..cols {
            let terms = (0..d).map(|mu| (monomials[mu].clone(), a[mu * cols + b].clone()));
            let mut poly = MultiHomogPoly::from_terms(group_sizes.clone(), terms)?;
            if poly.is_zero() {
                poly = MultiHomogPoly::zero(group_sizes.clone(), vec![1; group_sizes.len()]);
            }
            entries.push(poly);
        }
    }
    Ok(WMatrix {
        rows: amps.len(),
        cols,
        entries,
        row_weights: e.weights().iter().map(|w| w.sqrt()).collect(),
        group_sizes,
    })
}

/// Float W-matrix of an ensemble for a cut.
pub fn build_w_matrix(e: &Ensemble, cut: &Cut) -> Result<WMatrix<Complex64>> {
    let amps = e
        .members()
        .iter()
        .map(|(_, m)| m.amplitudes().iter().copied().collect())
        .collect();
    build(e, cut, amps)
}

/// Exact W-matrix; requires an ensemble with exact amplitudes.
pub fn build_exact_w_matrix(e: &Ensemble, cut: &Cut) -> Result<WMatrix<GaussianRational>> {
    let exact = e
        .exact_amplitudes()
        .ok_or_else(|| Error::InvalidState("ensemble has no exact amplitudes".into()))?;
    build(e, cut, exact.to_vec())
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Determinant by Laplace expansion along rows, memoised on the set of
/// remaining columns.
fn determinant<C: Coefficient>(m: &[Vec<&MultiHomogPoly<C>>]) -> MultiHomogPoly<C> {
    let n = m.len();
    let group_sizes = m[0][0].group_sizes().to_vec();
    let mut memo: HashMap<u64, MultiHomogPoly<C>> = HashMap::new();
    fn rec<C: Coefficient>(
        m: &[Vec<&MultiHomogPoly<C>>],
        row: usize,
        cols: u64,
        gs: &[usize],
        memo: &mut HashMap<u64, MultiHomogPoly<C>>,
    ) -> MultiHomogPoly<C> {
        let n = m.len();
        if row == n {
            return MultiHomogPoly::constant(gs.to_vec(), C::one());
        }
        if let Some(p) = memo.get(&cols) {
            return p.clone();
        }
        let mut acc: Option<MultiHomogPoly<C>> = None;
        let mut sign_pos = true;
        for c in 0..n {
            if cols & (1 << c) == 0 {
                continue;
            }
            let entry = m[row][c];
            if !entry.is_zero() {
                let sub = rec(m, row + 1, cols & !(1 << c), gs, memo);
                if !sub.is_zero() {
                    let term = entry * &sub;
                    let term = if sign_pos { term } else { -&term };
                    acc = Some(match acc {
                        None => term,
                        Some(a) => &a + &term,
                    });
                }
            }
            sign_pos = !sign_pos;
        }
        let out = acc.unwrap_or_else(|| {
            let deg = m[row][0].multidegree().iter().map(|d| d * (n - row) as u32).collect();
            MultiHomogPoly::zero(gs.to_vec(), deg)
        });
        memo.insert(cols, out.clone());
        out
    }
    rec(m, 0, (1u64 << n) - 1, &group_sizes, &mut memo)
}

/// Nonzero `(k+1) x (k+1)` minors of `w`, in lexicographic order of
/// (row subset, column subset). Empty when `k + 1` exceeds either side,
/// i.e. when the rank condition holds everywhere.
pub fn minor_polynomials<C: Coefficient>(
    w: &WMatrix<C>,
    k: usize,
    limit: usize,
) -> Result<Vec<MultiHomogPoly<C>>> {
    let size = k + 1;
    if size > w.rows.min(w.cols) {
        return Ok(Vec::new());
    }
    if size > 63 {
        return Err(Error::TooManyMinors { count: usize::MAX, limit });
    }
    let count = binomial(w.rows, size).saturating_mul(binomial(w.cols, size));
    if count > limit {
        return Err(Error::TooManyMinors { count, limit });
    }
    let row_sets = subsets(w.rows, size);
    let col_sets = subsets(w.cols, size);
    let mut out = Vec::new();
    for rs in &row_sets {
        for cs in &col_sets {
            let sub: Vec<Vec<&MultiHomogPoly<C>>> =
                rs.iter().map(|&r| cs.iter().map(|&c| w.entry(r, c)).collect()).collect();
            let det = determinant(&sub);
            if !det.is_zero() {
                out.push(det);
            }
        }
    }
    Ok(out)
}

/// Fast numerical evaluator of the weighted W-matrix.
///
/// Stores the reordered amplitudes as a `D x (g c)` matrix `K`, so that the
/// weighted W at `p` is the reshaped row vector `segre(p)^T K`.
#[derive(Clone, Debug)]
pub struct LocusModel {
    group_sizes: Vec<usize>,
    rows: usize,
    cols: usize,
    kernel: CMatrix,
    scale: f64,
}

impl LocusModel {
    pub fn new(e: &Ensemble, cut: &Cut) -> Result<Self> {
        let system = e.system();
        cut.check_system(system)?;
        let group_sizes = cut.group_dims(system);
        let cols = cut.residual_dim(system);
        let d: usize = group_sizes.iter().product();
        let rows = e.len();
        let mut kernel = CMatrix::zeros(d, rows * cols);
        for (f, (w, m)) in e.members().iter().enumerate() {
            let a = reordered_amplitudes(m.amplitudes().as_slice(), system.dims(), cut);
            let sw = Complex64::new(w.sqrt(), 0.0);
            for mu in 0..d {
                for b in 0..cols {
                    kernel[(mu, f * cols + b)] = a[mu * cols + b] * sw;
                }
            }
        }
        let scale = kernel.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok(Self {
            group_sizes,
            rows,
            cols,
            kernel,
            scale,
        })
    }

    pub fn group_sizes(&self) -> &[usize] {
        &self.group_sizes
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Largest kernel entry; sets the absolute floor for numerical rank.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Frobenius norm of the kernel; bounds `||W(p)||` at unit blocks.
    pub fn kernel_norm(&self) -> f64 {
        self.kernel.norm()
    }

    /// Weighted W at arbitrary (not necessarily normalised) blocks.
    pub fn eval_blocks(&self, blocks: &[CVector]) -> CMatrix {
        let mut s = CVector::from_element(1, Complex64::new(1.0, 0.0));
        for b in blocks {
            s = s.kronecker(b);
        }
        self.eval_segre(&s)
    }

    /// Weighted W from a joint (Segre or grouped) measured vector.
    pub fn eval_segre(&self, s: &CVector) -> CMatrix {
        let flat = self.kernel.tr_mul(s);
        CMatrix::from_fn(self.rows, self.cols, |f, b| flat[f * self.cols + b])
    }

    pub fn eval(&self, p: &PointPP) -> CMatrix {
        self.eval_blocks(p.blocks())
    }

    /// Hermitian Gram form `M = sum_f w_f v_f v_f^dagger`, `v_f` the rows of W.
    pub fn gram(&self, p: &PointPP) -> CMatrix {
        let w = self.eval(p);
        w.transpose() * w.conjugate()
    }

    /// Numerical rank of the weighted W at relative threshold `tau`, with
    /// an absolute floor of `tau * scale / 100`.
    pub fn rank(&self, p: &PointPP, tau: f64) -> usize {
        rank_of(&self.eval(p), tau, self.floor(tau))
    }

    /// Below this largest singular value W counts as zero. The floor moves
    /// with `tau` so that robust membership also probes it.
    pub(crate) fn floor(&self, tau: f64) -> f64 {
        1e-2 * tau * self.scale.max(f64::MIN_POSITIVE)
    }
}

pub(crate) fn rank_of(w: &CMatrix, tau: f64, floor: f64) -> usize {
    let s = singular_values(w);
    let max = s.first().copied().unwrap_or(0.0);
    if max <= floor {
        return 0;
    }
    numerical_rank(&s, tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locus::ensemble_from_state;
    use crate::locus::poly::rational;
    use crate::tensor::{MixedState, PartySystem, PureStateVec};
    use num_complex::Complex;

    fn ghz3() -> Ensemble {
        let s = PartySystem::qubits(3);
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut v = CVector::zeros(8);
        v[0] = h;
        v[7] = h;
        Ensemble::new(vec![(1.0, PureStateVec::new(s, v).unwrap())]).unwrap()
    }

    #[test]
    fn ghz_split_entries() {
        let e = ghz3();
        let cut = Cut::parse(e.system(), "A:B|C").unwrap();
        let w = build_w_matrix(&e, &cut).unwrap();
        assert_eq!((w.rows(), w.cols()), (1, 2));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let e00 = w.entry(0, 0);
        assert_eq!(e00.num_terms(), 1);
        assert!((e00.coefficient(&[1, 0, 1, 0]).unwrap().re - h).abs() < 1e-15);
        let e01 = w.entry(0, 1);
        assert!((e01.coefficient(&[0, 1, 0, 1]).unwrap().re - h).abs() < 1e-15);
        let minors = minor_polynomials(&w, 0, DEFAULT_MINOR_LIMIT).unwrap();
        assert_eq!(minors.len(), 2);
        assert!(minor_polynomials(&w, 1, DEFAULT_MINOR_LIMIT).unwrap().is_empty());
    }

    #[test]
    fn model_matches_polynomial_evaluation() {
        let e = ghz3();
        let cut = Cut::parse(e.system(), "A:B|C").unwrap();
        let w = build_w_matrix(&e, &cut).unwrap();
        let model = LocusModel::new(&e, &cut).unwrap();
        let p = PointPP::from_real(&[&[0.6, 0.8], &[0.8, -0.6]]).unwrap();
        assert!((w.eval(&p) - model.eval(&p)).norm() < 1e-14);
        let q = PointPP::from_real(&[&[1.0, 0.0], &[1.0, 0.0]]).unwrap();
        let g = model.gram(&q);
        assert!((g[(0, 0)].re - 0.5).abs() < 1e-15 && g[(1, 1)].norm() < 1e-15);
        assert_eq!(model.rank(&q, 1e-8), 1);
        let z = PointPP::from_real(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        assert_eq!(model.rank(&z, 1e-8), 0);
    }

    #[test]
    fn maximally_mixed_gram_is_quarter_identity() {
        let rho = MixedState::maximally_mixed(PartySystem::qubits(2));
        let e = ensemble_from_state(&rho, 1e-12);
        let cut = Cut::parse(e.system(), "A|B").unwrap();
        let model = LocusModel::new(&e, &cut).unwrap();
        let p = PointPP::from_real(&[&[0.3, -0.9]]).unwrap();
        let g = model.gram(&p);
        assert!((g - CMatrix::identity(2, 2) * Complex64::new(0.25, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn exact_determinant_of_product_forms() {
        // Two members |00>|0>, |11>|1> scaled by 2 and 3: det = 6 x0 y0 x1 y1.
        let s = PartySystem::qubits(3);
        let z = || Complex::new(rational(0, 1), rational(0, 1));
        let mut a = vec![z(); 8];
        a[0] = Complex::new(rational(2, 1), rational(0, 1));
        let mut b = vec![z(); 8];
        b[7] = Complex::new(rational(3, 1), rational(0, 1));
        let e = Ensemble::from_exact(s, vec![(0.5, a), (0.5, b)]).unwrap();
        let cut = Cut::parse(e.system(), "A:B|C").unwrap();
        let w = build_exact_w_matrix(&e, &cut).unwrap();
        let minors = minor_polynomials(&w, 1, DEFAULT_MINOR_LIMIT).unwrap();
        assert_eq!(minors.len(), 1);
        let det = &minors[0];
        assert_eq!(det.multidegree(), &[2, 2]);
        assert_eq!(det.num_terms(), 1);
        assert_eq!(det.coefficient(&[1, 1, 1, 1]), Some(&Complex::new(rational(6, 1), rational(0, 1))));
    }

    #[test]
    fn minor_limit_enforced() {
        let e = ghz3();
        let cut = Cut::parse(e.system(), "A:B|C").unwrap();
        let w = build_w_matrix(&e, &cut).unwrap();
        assert!(matches!(minor_polynomials(&w, 0, 1), Err(Error::TooManyMinors { count: 2, limit: 1 })));
    }
}
