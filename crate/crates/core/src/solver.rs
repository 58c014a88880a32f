//! Regularized boundary sampling: weighted sampling matrix and truncated-SVD
//! pseudoinverse solve.

use ndarray::{Array1, Array2, ArrayView1, Axis};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain_err, EpwError, Result};
use crate::sampling::ApproximationSet;
use crate::waves::Point3;

/// Boundary nodes with positive cubature weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySampling {
    pub nodes: Vec<Point3>,
    pub weights: Vec<f64>,
}

impl BoundarySampling {
    pub fn new(nodes: Vec<Point3>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(EpwError::Dimension(format!(
                "{} nodes vs {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return domain_err(format!("cubature weight {w} must be positive"));
        }
        Ok(BoundarySampling { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// b_s = w_s^{1/2} g(x_s).
    pub fn sample<G>(&self, g: G) -> Array1<Complex64>
    where
        G: Fn(&Point3) -> Complex64 + Sync,
    {
        let v: Vec<Complex64> = self
            .nodes
            .par_iter()
            .zip(&self.weights)
            .map(|(x, w)| g(x) * w.sqrt())
            .collect();
        Array1::from(v)
    }
}

/// A[s,p] = w_s^{1/2} φ_p(x_s) and b[s] = w_s^{1/2} g(x_s).
#[derive(Clone, Debug)]
pub struct SamplingMatrix {
    pub a: Array2<Complex64>,
    pub b: Array1<Complex64>,
}

/// The S×P matrix of weighted wave samples, assembled in parallel over rows.
pub fn assemble_matrix(set: &ApproximationSet, bs: &BoundarySampling) -> Result<Array2<Complex64>> {
    let (s, p) = (bs.len(), set.len());
    if s < p {
        return Err(EpwError::Dimension(format!("S = {s} boundary samples < P = {p} waves")));
    }
    let kernels = set.kernels();
    let mut a = Array2::<Complex64>::zeros((s, p));
    a.axis_iter_mut(Axis(0))
        .into_par_iter()
        .zip(bs.nodes.par_iter().zip(&bs.weights))
        .for_each(|(mut row, (x, w))| {
            let hw = 0.5 * w.ln();
            for ((r, k), ls) in row.iter_mut().zip(&kernels).zip(&set.ln_scales) {
                *r = k.eval_scaled(x, ls + hw);
            }
        });
    Ok(a)
}

pub fn assemble<G>(set: &ApproximationSet, bs: &BoundarySampling, g: G) -> Result<SamplingMatrix>
where
    G: Fn(&Point3) -> Complex64 + Sync,
{
    Ok(SamplingMatrix { a: assemble_matrix(set, bs)?, b: bs.sample(g) })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegularizedFit {
    pub xi: Vec<Complex64>,
    pub eps_rank: usize,
    pub sigma_max: f64,
    pub residual: f64,
    pub coeff_norm: f64,
}

/// Thin SVD A = U Σ V* kept for repeated regularized solves against one matrix.
pub struct SvdSolver {
    a: Array2<Complex64>,
    u: Array2<Complex64>,
    sigma: Vec<f64>,
    vt: Array2<Complex64>,
}

impl SvdSolver {
    pub fn new(a: Array2<Complex64>) -> Result<Self> {
        if a.is_empty() {
            return Err(EpwError::Dimension("empty sampling matrix".into()));
        }
        let (u, sigma, vt) = lapack::thin_svd(a.as_standard_layout().into_owned())?;
        Ok(SvdSolver { a, u, sigma, vt })
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.a
    }

    /// Singular values in nonincreasing order.
    pub fn singular_values(&self) -> &[f64] {
        &self.sigma
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn epsilon_rank(&self, epsilon: f64) -> usize {
        count_retained(&self.sigma, epsilon)
    }

    /// ξ = V Σ_ε^† U* b, applied right to left.
    pub fn solve(&self, b: ArrayView1<Complex64>, epsilon: f64) -> Result<RegularizedFit> {
        check_epsilon(epsilon)?;
        if b.len() != self.a.nrows() {
            return Err(EpwError::Dimension(format!("rhs length {} vs {} rows", b.len(), self.a.nrows())));
        }
        let rank = self.epsilon_rank(epsilon);
        let sigma_max = self.sigma_max();
        if b.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            return Ok(RegularizedFit {
                xi: vec![Complex64::new(0.0, 0.0); self.a.ncols()],
                eps_rank: rank,
                sigma_max,
                residual: 0.0,
                coeff_norm: 0.0,
            });
        }
        let ub = self.u.t().mapv(|v| v.conj()).dot(&b);
        let c: Array1<Complex64> = ub
            .iter()
            .zip(&self.sigma)
            .enumerate()
            .map(|(j, (v, s))| if j < rank { v / s } else { Complex64::new(0.0, 0.0) })
            .collect();
        let xi = self.vt.t().mapv(|v| v.conj()).dot(&c);
        let res = residual(&self.a, b, xi.view())?;
        let coeff_norm = l2(xi.view());
        Ok(RegularizedFit { xi: xi.to_vec(), eps_rank: rank, sigma_max, residual: res, coeff_norm })
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return domain_err(format!("epsilon = {epsilon} must lie in (0, 1]"));
    }
    Ok(())
}

fn count_retained(sigma: &[f64], epsilon: f64) -> usize {
    let cut = epsilon * sigma.first().copied().unwrap_or(0.0);
    sigma.iter().take_while(|s| **s >= cut && **s > 0.0).count()
}

fn l2(v: ArrayView1<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn regularized_solve(mat: &SamplingMatrix, epsilon: f64) -> Result<RegularizedFit> {
    check_epsilon(epsilon)?;
    SvdSolver::new(mat.a.clone())?.solve(mat.b.view(), epsilon)
}

/// Singular values only, computed in place (the matrix is consumed).
pub fn singular_values(a: Array2<Complex64>) -> Result<Vec<f64>> {
    if a.is_empty() {
        return Err(EpwError::Dimension("empty sampling matrix".into()));
    }
    let a = if a.is_standard_layout() { a } else { a.as_standard_layout().into_owned() };
    lapack::values_only(a)
}

/// #{σ_p ≥ ε σ_max}.
pub fn epsilon_rank(sigma: &[f64], epsilon: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    Ok(count_retained(sigma, epsilon))
}

/// ℰ = ‖Aξ − b‖ / ‖b‖.
pub fn residual(a: &Array2<Complex64>, b: ArrayView1<Complex64>, xi: ArrayView1<Complex64>) -> Result<f64> {
    if a.ncols() != xi.len() || a.nrows() != b.len() {
        return Err(EpwError::Dimension(format!(
            "A is {}x{}, xi has {}, b has {}",
            a.nrows(),
            a.ncols(),
            xi.len(),
            b.len()
        )));
    }
    let nb = l2(b);
    if nb == 0.0 {
        return Err(EpwError::Singular("residual undefined for zero right-hand side".into()));
    }
    Ok(l2((a.dot(&xi) - b).view()) / nb)
}

/// u_N(x) = Σ_p ξ_p φ_p(x) at each point.
pub fn evaluate_expansion(set: &ApproximationSet, xi: &[Complex64], points: &[Point3]) -> Result<Vec<Complex64>> {
    if xi.len() != set.len() {
        return Err(EpwError::Dimension(format!("{} coefficients for {} waves", xi.len(), set.len())));
    }
    let kernels = set.kernels();
    Ok(points
        .par_iter()
        .map(|x| {
            kernels
                .iter()
                .zip(&set.ln_scales)
                .zip(xi)
                .map(|((k, ls), c)| c * k.eval_scaled(x, *ls))
                .sum()
        })
        .collect())
}

/// Bidiagonal QR-iteration SVD (xGESVD). The divide-and-conquer driver loses
/// orthogonality of the singular vectors on the large, numerically rank-deficient
/// matrices produced by EPW sets, so it is not used.
mod lapack {
    use std::os::raw::{c_char, c_int};

    use lapack_sys::{__BindgenComplex, zgesvd_};
    use ndarray::Array2;
    use num_complex::Complex64;

    use crate::error::{EpwError, Result};

    fn dim(n: usize) -> Result<c_int> {
        c_int::try_from(n).map_err(|_| EpwError::Dimension(format!("dimension {n} exceeds the LAPACK index range")))
    }

    fn ptr(v: &mut [Complex64]) -> *mut __BindgenComplex<f64> {
        v.as_mut_ptr().cast()
    }

    /// Runs zgesvd on a row-major S×P matrix, seen by LAPACK as the column-major
    /// P×S matrix Aᵀ = U' Σ V'^T. Then U_A = V'^T and V_A^* = U'^T, and both are
    /// returned in row-major order without any transposition.
    fn gesvd(mut a: Array2<Complex64>, vectors: bool) -> Result<(Vec<f64>, Vec<Complex64>, Vec<Complex64>)> {
        let (rows, cols) = a.dim();
        let k = rows.min(cols);
        let (m, n, kk) = (dim(cols)?, dim(rows)?, dim(k)?);
        let job: c_char = if vectors { b'S' } else { b'N' } as c_char;
        let buf = a.as_slice_mut().expect("standard layout");
        let mut s = vec![0.0; k];
        let (mut vh, mut u) = if vectors {
            (vec![Complex64::default(); cols * k], vec![Complex64::default(); k * rows])
        } else {
            (vec![Complex64::default(); 1], vec![Complex64::default(); 1])
        };
        let (ldu, ldvt) = if vectors { (m, kk) } else { (1, 1) };
        let mut rwork = vec![0.0; 5 * k.max(1)];
        let mut info: c_int = 0;
        let mut query = [Complex64::default()];
        let call = |buf: &mut [Complex64], s: &mut [f64], vh: &mut [Complex64], u: &mut [Complex64], work: &mut [Complex64], lwork: c_int, rwork: &mut [f64], info: &mut c_int| unsafe {
            zgesvd_(&job, &job, &m, &n, ptr(buf), &m, s.as_mut_ptr(), ptr(vh), &ldu, ptr(u), &ldvt, ptr(work), &lwork, rwork.as_mut_ptr(), info);
        };
        call(buf, &mut s, &mut vh, &mut u, &mut query, -1, &mut rwork, &mut info);
        if info != 0 {
            return Err(EpwError::Linalg(format!("zgesvd workspace query failed with info = {info}")));
        }
        let lwork = query[0].re as usize;
        let mut work = vec![Complex64::default(); lwork.max(1)];
        call(buf, &mut s, &mut vh, &mut u, &mut work, dim(lwork.max(1))?, &mut rwork, &mut info);
        if info != 0 {
            return Err(EpwError::Linalg(format!("zgesvd failed with info = {info}")));
        }
        Ok((s, u, vh))
    }

    /// Thin SVD A = U Σ V^*: U is S×k, V^* is k×P, k = min(S, P).
    pub fn thin_svd(a: Array2<Complex64>) -> Result<(Array2<Complex64>, Vec<f64>, Array2<Complex64>)> {
        let (rows, cols) = a.dim();
        let k = rows.min(cols);
        let (s, u, vh) = gesvd(a, true)?;
        let u = Array2::from_shape_vec((rows, k), u).expect("shape");
        let vh = Array2::from_shape_vec((k, cols), vh).expect("shape");
        Ok((u, s, vh))
    }

    pub fn values_only(a: Array2<Complex64>) -> Result<Vec<f64>> {
        Ok(gesvd(a, false)?.0)
    }
}
