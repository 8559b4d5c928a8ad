//! Circulant realizations, their spectra, and the trace functional
//! `g(X) = Tr P(C)` with its gradient and Hessian majorant.
//!
//! Entry `(i, j)` of the matrix is `x[(j - i) mod n]` with `x = X / √n`, so the
//! eigenvalues are `λ_t = Σ_k x_k ω^{tk}` with `ω = exp(2πi/n)`: an
//! unnormalized inverse DFT of the first row.

use std::cell::RefCell;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::ensembles::{EnsembleSpec, RandomStream};
use crate::error::{Error, Result};
use crate::stats::pairwise_sum;

/// Default cap on visited tuples for enumeration oracles.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 100_000_000;

const IMAGINARY_TOLERANCE: f64 = 1e-8;

/// `P(x) = Σ_{k=2}^{d} a_k x^k`, with no constant or linear term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TestPolynomial {
    // coeffs[i] = a_{i+2}
    coeffs: Vec<f64>,
}

impl TestPolynomial {
    /// From `a_2, a_3, …, a_d`. The leading coefficient must be nonzero.
    pub fn new(coeffs_from_degree_two: Vec<f64>) -> Result<Self> {
        if coeffs_from_degree_two.is_empty() {
            return Err(Error::invalid("polynomial needs at least the x^2 coefficient"));
        }
        if coeffs_from_degree_two.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("polynomial coefficients must be finite"));
        }
        if *coeffs_from_degree_two.last().unwrap() == 0.0 {
            return Err(Error::invalid("leading coefficient a_d must be nonzero"));
        }
        Ok(Self { coeffs: coeffs_from_degree_two })
    }

    /// From a dense list `a_0, a_1, …, a_d`. Positions 0 and 1 must be zero:
    /// a constant term only shifts the trace by a constant, and the degree-one
    /// statistic is `X_0` itself, which has no Gaussian limit.
    pub fn from_dense(dense: &[f64]) -> Result<Self> {
        if dense.len() < 3 {
            return Err(Error::invalid(
                "dense polynomial must list a_0, a_1 and at least a_2 (degree >= 2)",
            ));
        }
        if dense[0] != 0.0 || dense[1] != 0.0 {
            return Err(Error::invalid(format!(
                "a_0 = {} and a_1 = {} must both be zero: constant and degree-one terms \
                 are excluded, only degree >= 2 terms are allowed",
                dense[0], dense[1]
            )));
        }
        let mut coeffs = dense[2..].to_vec();
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    pub fn monomial(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::invalid(format!("monomial degree must be >= 2, got {degree}")));
        }
        let mut coeffs = vec![0.0; degree - 1];
        coeffs[degree - 2] = 1.0;
        Self::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() + 1
    }

    /// `a_k`; zero outside `2..=d`.
    pub fn coefficient(&self, k: usize) -> f64 {
        if k < 2 {
            0.0
        } else {
            self.coeffs.get(k - 2).copied().unwrap_or(0.0)
        }
    }

    /// `(k, a_k)` for `k = 2..=d`, zeros included.
    pub fn terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs.iter().enumerate().map(|(i, &a)| (i + 2, a))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0, 0.0];
        dense.extend_from_slice(&self.coeffs);
        dense
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        // Horner on a_2 + a_3 z + …, then times z².
        let inner = self
            .coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
        inner * z * z
    }

    /// `P'(z)`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let inner = self
            .terms()
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (k, a)| acc * z + a * k as f64);
        inner * z
    }

    /// Majorant `m2(z) = Σ k(k-1)|a_k| z^{k-2}`, nonnegative and
    /// nondecreasing on `z >= 0`.
    pub fn majorant(&self, z: f64) -> f64 {
        self.terms()
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .fold(0.0, |acc, (k, a)| acc * z + (k * (k - 1)) as f64 * a.abs())
    }
}

impl TryFrom<Vec<f64>> for TestPolynomial {
    type Error = Error;

    fn try_from(dense: Vec<f64>) -> Result<Self> {
        Self::from_dense(&dense)
    }
}

impl From<TestPolynomial> for Vec<f64> {
    fn from(p: TestPolynomial) -> Self {
        p.to_dense()
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

/// One realization of `C_n`. The spectrum is computed on first use and then
/// shared; the `OnceLock` makes publication single-assignment.
#[derive(Debug)]
pub struct CirculantSample {
    raw: Vec<f64>,
    row: Vec<f64>,
    spectrum: OnceLock<Vec<Complex64>>,
}

impl Clone for CirculantSample {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(s.clone());
        }
        Self { raw: self.raw.clone(), row: self.row.clone(), spectrum }
    }
}

impl CirculantSample {
    /// Draws `X` for `(spec, n, stream)` and scales by `1/√n`.
    pub fn build(spec: &EnsembleSpec, n: usize, stream: RandomStream) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("matrix dimension must be at least 1"));
        }
        Ok(Self::from_raw(spec.sample_sequence(n, stream)))
    }

    /// From unscaled inputs `X_0 … X_{n-1}`.
    pub fn from_raw(raw: Vec<f64>) -> Self {
        assert!(!raw.is_empty(), "circulant dimension must be at least 1");
        let scale = (raw.len() as f64).sqrt().recip();
        let row = raw.iter().map(|x| x * scale).collect();
        Self { raw, row, spectrum: OnceLock::new() }
    }

    /// From the first row `x` of the matrix itself; `X = √n x`.
    pub fn from_row(row: Vec<f64>) -> Self {
        assert!(!row.is_empty(), "circulant dimension must be at least 1");
        let scale = (row.len() as f64).sqrt();
        let raw = row.iter().map(|x| x * scale).collect();
        Self { raw, row, spectrum: OnceLock::new() }
    }

    pub fn dim(&self) -> usize {
        self.row.len()
    }

    pub fn raw_inputs(&self) -> &[f64] {
        &self.raw
    }

    pub fn scaled_row(&self) -> &[f64] {
        &self.row
    }

    /// Entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let n = self.dim();
        self.row[(j + n - i % n) % n]
    }

    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| {
            let mut buf: Vec<Complex64> =
                self.row.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            inverse_plan(buf.len()).process(&mut buf);
            buf
        })
    }

    /// `Tr C^p` as the eigenvalue power sum `Σ_t λ_t^p`.
    pub fn trace_power_spectral(&self, p: u32) -> Result<f64> {
        if p == 0 {
            return Err(Error::invalid("trace power must be at least 1"));
        }
        let (re, im): (Vec<f64>, Vec<f64>) = self
            .spectrum()
            .iter()
            .map(|l| {
                let v = l.powu(p);
                (v.re, v.im)
            })
            .unzip();
        let (re, im) = (pairwise_sum(&re), pairwise_sum(&im));
        check_real("trace_power_spectral", re, im)?;
        Ok(re)
    }

    /// `Tr C^p = n Σ x_{i_1}⋯x_{i_p}` over index tuples with
    /// `i_1 + ⋯ + i_p ≡ 0 (mod n)`, enumerating the `n^{p-1}` free indices.
    pub fn trace_power_direct(&self, p: u32, budget: u64) -> Result<f64> {
        if p == 0 {
            return Err(Error::invalid("trace power must be at least 1"));
        }
        let n = self.dim();
        let required = (n as u128).pow(p - 1);
        if required > budget as u128 {
            return Err(Error::BudgetExceeded { required, budget });
        }
        let x = &self.row;
        let free = (p - 1) as usize;
        let mut idx = vec![0usize; free];
        let mut acc = NeumaierSum::default();
        loop {
            let sum: usize = idx.iter().sum();
            let last = (n - sum % n) % n;
            let prod = idx.iter().fold(x[last], |acc, &i| acc * x[i]);
            acc.add(prod);

            // odometer
            let mut pos = 0;
            loop {
                if pos == free {
                    return Ok(n as f64 * acc.total());
                }
                idx[pos] += 1;
                if idx[pos] < n {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    /// `Tr P(C) = Σ_k a_k Tr C^k`, spectral route.
    pub fn trace_polynomial(&self, poly: &TestPolynomial) -> Result<f64> {
        let (re, im): (Vec<f64>, Vec<f64>) = self
            .spectrum()
            .iter()
            .map(|&l| {
                let v = poly.eval(l);
                (v.re, v.im)
            })
            .unzip();
        let (re, im) = (pairwise_sum(&re), pairwise_sum(&im));
        check_real("trace_polynomial", re, im)?;
        Ok(re)
    }

    /// Operator 2-norm, `max_t |λ_t|` (circulant matrices are normal).
    pub fn spectral_norm(&self) -> f64 {
        self.spectrum().iter().map(|l| l.norm()).fold(0.0, f64::max)
    }

    /// `∂g/∂X_m` for `g(X) = Tr P(C)`.
    ///
    /// `P'(C)` is circulant with first row `d = DFT(P'(λ)) / n`. Each `x_m`
    /// occupies the `n` positions `(i, i+m)`, and `∂ Tr P(C) / ∂c_{ij} = P'(C)_{ji}`,
    /// so `∂g/∂x_m = n d_{-m}` and `∂g/∂X_m = √n d_{-m}`.
    pub fn gradient_trace_polynomial(&self, poly: &TestPolynomial) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut symbol: Vec<Complex64> =
            self.spectrum().iter().map(|&l| poly.derivative(l)).collect();
        forward_plan(n).process(&mut symbol);
        let inv_n = (n as f64).recip();
        for d in symbol.iter_mut() {
            *d *= inv_n;
        }
        let max_re = symbol.iter().map(|d| d.re.abs()).fold(0.0, f64::max);
        let max_im = symbol.iter().map(|d| d.im.abs()).fold(0.0, f64::max);
        let tolerance = IMAGINARY_TOLERANCE * (1.0 + max_re);
        if max_im > tolerance {
            return Err(Error::ImaginaryResidual {
                context: "gradient_trace_polynomial",
                residual: max_im,
                tolerance,
            });
        }
        let sqrt_n = (n as f64).sqrt();
        Ok((0..n).map(|m| sqrt_n * symbol[(n - m) % n].re).collect())
    }

    /// `m2(‖C‖) / n`, the Hessian-norm surrogate used for `κ₂`.
    ///
    /// This does not dominate the operator norm of `∇²g` in general: for
    /// `P(x) = x²` the Hessian is `2` times the permutation `m ↦ -m mod n`,
    /// with norm 2, while this value is `2/n`. [`Self::hessian_norm_majorant`]
    /// is a valid upper bound.
    pub fn hessian_norm_bound(&self, poly: &TestPolynomial) -> f64 {
        self.hessian_norm_majorant(poly) / self.dim() as f64
    }

    /// `m2(‖C‖)`, which dominates `‖∇²g‖`: the map `X ↦ C` has Jacobian
    /// `J` with orthogonal columns of norm 1 (after the `1/√n` scaling), so
    /// `‖∇²g‖ = ‖Jᵀ H J‖ <= ‖H‖ <= m2(‖C‖)`.
    pub fn hessian_norm_majorant(&self, poly: &TestPolynomial) -> f64 {
        poly.majorant(self.spectral_norm())
    }
}

fn check_real(context: &'static str, re: f64, im: f64) -> Result<()> {
    let tolerance = IMAGINARY_TOLERANCE * (1.0 + re.abs());
    if im.abs() > tolerance {
        return Err(Error::ImaginaryResidual { context, residual: im.abs(), tolerance });
    }
    Ok(())
}

#[derive(Default)]
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    fn gaussian_sample(n: usize, seed: u64) -> CirculantSample {
        CirculantSample::build(&EnsembleSpec::gaussian(), n, RandomStream::new(seed, 0)).unwrap()
    }

    fn dense(sample: &CirculantSample) -> DMatrix<f64> {
        let n = sample.dim();
        DMatrix::from_fn(n, n, |i, j| sample.entry(i, j))
    }

    // Explicit matrix powers; independent of the spectrum.
    fn dense_trace_polynomial(sample: &CirculantSample, poly: &TestPolynomial) -> f64 {
        let c = dense(sample);
        let mut power = c.clone();
        let mut total = 0.0;
        for k in 2..=poly.degree() {
            power = &power * &c;
            total += poly.coefficient(k) * power.trace();
        }
        total
    }

    fn poly(c: &[f64]) -> TestPolynomial {
        TestPolynomial::new(c.to_vec()).unwrap()
    }

    #[test]
    fn polynomial_validation() {
        assert!(TestPolynomial::new(vec![]).is_err());
        assert!(TestPolynomial::new(vec![1.0, 0.0]).is_err());
        assert!(TestPolynomial::new(vec![f64::NAN]).is_err());
        assert!(TestPolynomial::from_dense(&[0.0, 1.0, 1.0]).is_err());
        assert!(TestPolynomial::from_dense(&[1.0, 0.0, 1.0]).is_err());
        assert!(TestPolynomial::from_dense(&[0.0, 1.0]).is_err());
        let p = TestPolynomial::from_dense(&[0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.to_dense(), vec![0.0, 0.0, 1.0]);
        assert!(TestPolynomial::monomial(1).is_err());
        assert_eq!(TestPolynomial::monomial(4).unwrap().coefficient(4), 1.0);
    }

    #[test]
    fn polynomial_evaluation() {
        let p = poly(&[1.0, -2.0, 0.5]); // x² - 2x³ + x⁴/2
        let z = Complex64::new(0.3, -1.2);
        let expect = z * z - 2.0 * z * z * z + 0.5 * z.powu(4);
        assert_relative_eq!((p.eval(z) - expect).norm(), 0.0, epsilon = 1e-13);
        let dexpect = 2.0 * z - 6.0 * z * z + 2.0 * z.powu(3);
        assert_relative_eq!((p.derivative(z) - dexpect).norm(), 0.0, epsilon = 1e-13);
        // m2(z) = 2 + 12 z + 6 z²
        assert_relative_eq!(p.majorant(2.0), 2.0 + 24.0 + 24.0);
    }

    #[test]
    fn one_by_one() {
        let s = CirculantSample::from_row(vec![1.7]);
        assert_eq!(s.spectrum(), &[Complex64::new(1.7, 0.0)]);
        assert_relative_eq!(s.trace_power_spectral(3).unwrap(), 1.7f64.powi(3), max_relative = 1e-15);
        assert_eq!(s.spectral_norm(), 1.7);
        let c = -0.4;
        let s = CirculantSample::from_row(vec![c]);
        assert_relative_eq!(
            s.trace_polynomial(&poly(&[1.0, 1.0])).unwrap(),
            c * c + c * c * c,
            max_relative = 1e-14
        );
        assert_eq!(s.spectral_norm(), 0.4);
        let g = s.gradient_trace_polynomial(&TestPolynomial::monomial(3).unwrap()).unwrap();
        assert_relative_eq!(g[0], 3.0 * c * c, max_relative = 1e-14);
    }

    #[test]
    fn rademacher_scaling() {
        let s = CirculantSample::build(&EnsembleSpec::rademacher(), 4, RandomStream::new(5, 0))
            .unwrap();
        assert!(s.scaled_row().iter().all(|x| x.abs() == 0.5));
    }

    #[test]
    fn build_is_deterministic() {
        let a = gaussian_sample(8, 77);
        let b = gaussian_sample(8, 77);
        assert_eq!(a.raw_inputs(), b.raw_inputs());
        assert_eq!(a.spectrum(), b.spectrum());
        assert!(CirculantSample::build(&EnsembleSpec::gaussian(), 0, RandomStream::new(0, 0))
            .is_err());
    }

    #[test]
    fn two_by_two() {
        let (a, b) = (0.7, -1.3);
        let s = CirculantSample::from_row(vec![a, b]);
        let l = s.spectrum();
        assert_relative_eq!(l[0].re, a + b, epsilon = 1e-15);
        assert_relative_eq!(l[1].re, a - b, epsilon = 1e-15);
        let expected = 2.0 * (a * a + b * b);
        assert_relative_eq!(s.trace_power_spectral(2).unwrap(), expected, max_relative = 1e-14);
        assert_relative_eq!(
            s.trace_power_direct(2, DEFAULT_ENUMERATION_BUDGET).unwrap(),
            expected,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            s.trace_polynomial(&TestPolynomial::monomial(2).unwrap()).unwrap(),
            expected,
            max_relative = 1e-14
        );
        assert_relative_eq!(s.spectral_norm(), (a + b).abs().max((a - b).abs()), max_relative = 1e-15);
    }

    #[test]
    fn identity_spectrum() {
        let s = CirculantSample::from_row(vec![1.0, 0.0, 0.0]);
        for l in s.spectrum() {
            assert_relative_eq!(l.re, 1.0, epsilon = 1e-15);
            assert_relative_eq!(l.im, 0.0, epsilon = 1e-15);
        }
        assert_relative_eq!(s.spectral_norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn spectrum_matches_dense_eigenvectors() {
        // (C v)_i = λ_t v_i for v_j = ω^{tj}
        let s = gaussian_sample(6, 3);
        let n = 6;
        for t in 0..n {
            let w = |j: usize| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (t * j) as f64 / n as f64);
            for i in 0..n {
                let cv: Complex64 = (0..n).map(|j| s.entry(i, j) * w(j)).sum();
                assert!((cv - s.spectrum()[t] * w(i)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn trace_identity_and_conjugate_symmetry() {
        let s = gaussian_sample(16, 9);
        let sum: Complex64 = s.spectrum().iter().sum();
        let expected = 16.0 * s.scaled_row()[0];
        assert!(rel(sum.re, expected) < 1e-12);
        let l = s.spectrum();
        for t in 1..16 {
            assert!((l[16 - t] - l[t].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn direct_route_small_cases() {
        let s = gaussian_sample(7, 4);
        assert_eq!(s.trace_power_direct(1, 1).unwrap(), 7.0 * s.scaled_row()[0]);
        let s5 = gaussian_sample(5, 8);
        let a = s5.trace_power_spectral(3).unwrap();
        let b = s5.trace_power_direct(3, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert!(rel(a, b) < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn direct_route_budget_refusal() {
        let s = gaussian_sample(100, 1);
        let err = s.trace_power_direct(5, 1_000_000).unwrap_err();
        match err {
            Error::BudgetExceeded { required, budget } => {
                assert_eq!(required, 100u128.pow(4));
                assert_eq!(budget, 1_000_000);
            }
            other => panic!("unexpected {other}"),
        }
        assert!(s.trace_power_direct(0, 10).is_err());
        assert!(s.trace_power_spectral(0).is_err());
    }

    #[test]
    fn dense_oracle_n64() {
        let p = poly(&[1.0, 0.0, 2.0]);
        for seed in 0..5 {
            let s = gaussian_sample(64, seed);
            let a = s.trace_polynomial(&p).unwrap();
            let b = dense_trace_polynomial(&s, &p);
            assert!(rel(a, b) < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn gradient_of_square_is_reflection() {
        let s = gaussian_sample(9, 12);
        let g = s.gradient_trace_polynomial(&TestPolynomial::monomial(2).unwrap()).unwrap();
        let x = s.raw_inputs();
        for m in 0..9 {
            assert_relative_eq!(g[m], 2.0 * x[(9 - m) % 9], epsilon = 1e-12);
        }
    }

    fn trace_of_raw(raw: &[f64], p: &TestPolynomial) -> f64 {
        CirculantSample::from_raw(raw.to_vec()).trace_polynomial(p).unwrap()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = poly(&[1.0, 1.0]);
        let s = gaussian_sample(32, 21);
        let g = s.gradient_trace_polynomial(&p).unwrap();
        let h = 1e-5;
        let scale = g.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for m in 0..32 {
            let mut up = s.raw_inputs().to_vec();
            let mut dn = up.clone();
            up[m] += h;
            dn[m] -= h;
            let fd = (trace_of_raw(&up, &p) - trace_of_raw(&dn, &p)) / (2.0 * h);
            assert!((fd - g[m]).abs() <= 1e-6 * scale, "m={m}: {fd} vs {}", g[m]);
        }
    }

    #[test]
    fn hessian_bound_formula() {
        let s = gaussian_sample(16, 2);
        let sq = TestPolynomial::monomial(2).unwrap();
        assert_relative_eq!(s.hessian_norm_bound(&sq), 2.0 / 16.0, max_relative = 1e-15);
        let cube = poly(&[0.0, 2.5]);
        assert_relative_eq!(
            s.hessian_norm_bound(&cube),
            6.0 * 2.5 * s.spectral_norm() / 16.0,
            max_relative = 1e-14
        );
    }

    // Dense Hessian by finite differences of the analytic gradient.
    fn fd_hessian_norm(s: &CirculantSample, p: &TestPolynomial) -> f64 {
        let n = s.dim();
        let h = 1e-5;
        let mut hess = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut up = s.raw_inputs().to_vec();
            let mut dn = up.clone();
            up[j] += h;
            dn[j] -= h;
            let gu = CirculantSample::from_raw(up).gradient_trace_polynomial(p).unwrap();
            let gd = CirculantSample::from_raw(dn).gradient_trace_polynomial(p).unwrap();
            for i in 0..n {
                hess[(i, j)] = (gu[i] - gd[i]) / (2.0 * h);
            }
        }
        let sym = (&hess + hess.transpose()) * 0.5;
        sym.symmetric_eigenvalues().iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    #[test]
    fn hessian_majorant_dominates() {
        let p = poly(&[1.0, 0.0, 1.0]);
        for seed in 0..10 {
            let s = gaussian_sample(16, seed);
            let norm = fd_hessian_norm(&s, &p);
            assert!(norm <= s.hessian_norm_majorant(&p) * (1.0 + 1e-6));
        }
    }

    #[test]
    fn square_hessian_exceeds_scaled_surrogate() {
        // Documents the gap: ‖∇²g‖ = 2 for P = x², surrogate is 2/n.
        let s = gaussian_sample(8, 1);
        let sq = TestPolynomial::monomial(2).unwrap();
        let norm = fd_hessian_norm(&s, &sq);
        assert_relative_eq!(norm, 2.0, max_relative = 1e-6);
        assert!(norm > s.hessian_norm_bound(&sq));
    }

    #[test]
    fn degree_one_identity() {
        for seed in 0..20 {
            let s = gaussian_sample(33, seed);
            let t = s.trace_power_spectral(1).unwrap() / 33f64.sqrt();
            assert!((t - s.raw_inputs()[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn polynomial_serde_is_dense_list() {
        let p = poly(&[1.0, 0.0, 2.0]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "[0.0,0.0,1.0,0.0,2.0]");
        let back: TestPolynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<TestPolynomial>("[0.0,1.0,1.0]").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn routes_agree(n in 1usize..=32, p in 1u32..=4, seed in any::<u64>()) {
            let s = gaussian_sample(n, seed);
            let a = s.trace_power_spectral(p).unwrap();
            let b = s.trace_power_direct(p, DEFAULT_ENUMERATION_BUDGET).unwrap();
            let scale: f64 = s.spectrum().iter().map(|l| l.norm().powi(p as i32)).sum();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1e-3 * scale));
        }

        #[test]
        fn majorant_nondecreasing(c in prop::collection::vec(-3.0f64..3.0, 1..6), z in 0.0f64..5.0, dz in 0.0f64..1.0) {
            let mut c = c;
            if *c.last().unwrap() == 0.0 { *c.last_mut().unwrap() = 1.0; }
            let p = TestPolynomial::new(c).unwrap();
            prop_assert!(p.majorant(z) >= 0.0);
            prop_assert!(p.majorant(z + dz) >= p.majorant(z));
        }
    }
}
