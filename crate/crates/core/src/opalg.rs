//! Dense complex operator algebra for small Hilbert spaces.
//!
//! Everything in the crate that touches a quantum state goes through this
//! module: Hermitian eigendecomposition, support-restricted fractional powers,
//! trace norms, Kronecker products and the state carriers ([`DensityOperator`],
//! [`PureState`], [`CqState`]). Dimensions are expected to stay at or below 16.
//!
//! Fractional powers act on the support only: eigenvalues below
//! [`Tolerances::clip_eps`] are treated as exact zeros and `0^x := 0` for every
//! exponent, including negative ones.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Numerical tolerances shared by validators and spectral functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max entrywise `|A - A^H|` accepted as Hermitian.
    pub herm: f64,
    /// Most negative eigenvalue accepted as PSD.
    pub psd: f64,
    /// Max `|Tr A - 1|` for a density operator.
    pub trace: f64,
    /// Eigenvalues below this are treated as zero before taking powers.
    pub clip_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            psd: 1e-10,
            trace: 1e-10,
            clip_eps: 1e-12,
        }
    }
}

/// Spectral decomposition `m = V diag(values) V^H`, values sorted descending.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigh {
    /// `V diag(f(values)) V^H`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let s = f(lam);
            for i in 0..d {
                scaled[(i, j)] *= s;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// Projector onto the span of eigenvectors whose eigenvalue satisfies `keep`.
    pub fn projector(&self, keep: impl Fn(f64) -> bool) -> ComplexMatrix {
        self.map(|lam| if keep(lam) { 1.0 } else { 0.0 })
    }
}

/// Largest entrywise deviation `max |m - m^H|`.
pub fn hermitian_defect(m: &ComplexMatrix) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in i..d {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

fn check_hermitian(m: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    check_square(m)?;
    let defect = hermitian_defect(m);
    if !(defect <= tol.herm) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix with default tolerances.
pub fn eigh(m: &ComplexMatrix) -> Result<Eigh> {
    eigh_with(m, &Tolerances::default())
}

pub fn eigh_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<Eigh> {
    check_hermitian(m, tol)?;
    Ok(eigh_unchecked(m))
}

/// Eigendecomposition of the Hermitian part `(m + m^H)/2`, no validation.
///
/// Internal products such as `s m s` are Hermitian only up to roundoff; this
/// entry point is used for those.
pub(crate) fn eigh_unchecked(m: &ComplexMatrix) -> Eigh {
    match m.nrows() {
        0 => Eigh {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        },
        1 => Eigh {
            values: vec![m[(0, 0)].re],
            vectors: ComplexMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)),
        },
        2 => eigh_2x2(m),
        _ => eigh_general(m),
    }
}

fn eigh_2x2(m: &ComplexMatrix) -> Eigh {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let half_gap = 0.5 * (a - d);
    let radius = half_gap.hypot(b.norm());
    let hi = mean + radius;
    let lo = mean - radius;

    // Two candidate null vectors of (m - hi I); take the better conditioned one.
    let c1 = (b, Complex64::new(hi - a, 0.0));
    let c2 = (Complex64::new(hi - d, 0.0), b.conj());
    let n1 = (c1.0.norm_sqr() + c1.1.norm_sqr()).sqrt();
    let n2 = (c2.0.norm_sqr() + c2.1.norm_sqr()).sqrt();
    let (v0, v1) = if n1.max(n2) <= f64::MIN_POSITIVE {
        (Complex64::new(1.0, 0.0), ZERO)
    } else if n1 >= n2 {
        (c1.0 / n1, c1.1 / n1)
    } else {
        (c2.0 / n2, c2.1 / n2)
    };
    let vectors = ComplexMatrix::from_row_slice(2, 2, &[v0, -v1.conj(), v1, v0.conj()]);
    Eigh {
        values: vec![hi, lo],
        vectors,
    }
}

fn eigh_general(m: &ComplexMatrix) -> Eigh {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let d = m.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
    Eigh { values, vectors }
}

/// Eigenvalues only, sorted descending, of the Hermitian part of `m`.
pub(crate) fn eigenvalues_unchecked(m: &ComplexMatrix) -> Vec<f64> {
    if m.nrows() == 2 {
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
        let radius = (0.5 * (a - d)).hypot(b.norm());
        let mean = 0.5 * (a + d);
        return vec![mean + radius, mean - radius];
    }
    eigh_unchecked(m).values
}

/// Scalar power with the support convention: values below `clip_eps` map to 0.
#[inline]
pub(crate) fn clipped_pow(lam: f64, x: f64, clip_eps: f64) -> f64 {
    if lam < clip_eps {
        0.0
    } else {
        lam.powf(x)
    }
}

/// Support-restricted power `m^x` of a PSD matrix.
pub fn matrix_power_psd(m: &ComplexMatrix, x: f64) -> Result<ComplexMatrix> {
    matrix_power_psd_with(m, x, &Tolerances::default())
}

pub fn matrix_power_psd_with(m: &ComplexMatrix, x: f64, tol: &Tolerances) -> Result<ComplexMatrix> {
    let eig = eigh_with(m, tol)?;
    check_psd_spectrum(&eig.values, tol)?;
    Ok(eig.map(|lam| clipped_pow(lam, x, tol.clip_eps)))
}

fn check_psd_spectrum(values: &[f64], tol: &Tolerances) -> Result<()> {
    match values.last() {
        Some(&min) if min < -tol.psd => Err(Error::NotPsd(min)),
        _ => Ok(()),
    }
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    let tol = Tolerances::default();
    check_hermitian(m, &tol)?;
    Ok(eigenvalues_unchecked(m).iter().map(|v| v.abs()).sum())
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Partial trace over the second factor of a `d1*d2` square matrix.
pub fn partial_trace_second(m: &ComplexMatrix, d1: usize, d2: usize) -> Result<ComplexMatrix> {
    check_square(m)?;
    if m.nrows() != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            got: m.nrows(),
        });
    }
    Ok(ComplexMatrix::from_fn(d1, d1, |i, j| {
        (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()
    }))
}

/// Partial trace over the first factor of a `d1*d2` square matrix.
pub fn partial_trace_first(m: &ComplexMatrix, d1: usize, d2: usize) -> Result<ComplexMatrix> {
    check_square(m)?;
    if m.nrows() != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            got: m.nrows(),
        });
    }
    Ok(ComplexMatrix::from_fn(d2, d2, |i, j| {
        (0..d1).map(|k| m[(k * d2 + i, k * d2 + j)]).sum()
    }))
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

fn ginibre(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}

/// Ginibre-distributed density operator `G G^H / Tr(G G^H)`, deterministic per seed.
pub fn random_density(dim: usize, rng_seed: u64) -> DensityOperator {
    assert!(dim >= 1, "random_density needs dim >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let g = ginibre(dim, &mut rng);
    let gg = &g * g.adjoint();
    let tr = trace(&gg).re;
    let mut m = gg / Complex64::new(tr, 0.0);
    symmetrize(&mut m);
    DensityOperator(m)
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary(dim: usize, rng_seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let g = ginibre(dim, &mut rng);
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random Hermitian matrix with Gaussian entries (test fixture).
pub fn random_hermitian(dim: usize, rng_seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let g = ginibre(dim, &mut rng);
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

pub(crate) fn symmetrize(m: &mut ComplexMatrix) {
    let d = m.nrows();
    for i in 0..d {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..d {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// One failed density-operator invariant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "magnitude", rename_all = "snake_case")]
pub enum Violation {
    NotSquare(f64),
    Hermiticity(f64),
    Positivity(f64),
    Trace(f64),
}

impl Violation {
    pub fn magnitude(&self) -> f64 {
        match *self {
            Violation::NotSquare(m)
            | Violation::Hermiticity(m)
            | Violation::Positivity(m)
            | Violation::Trace(m) => m,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn worst(&self) -> Option<Violation> {
        self.violations
            .iter()
            .copied()
            .max_by(|a, b| a.magnitude().total_cmp(&b.magnitude()))
    }
}

/// Checks the three density-operator invariants and reports every violation.
pub fn validate(m: &ComplexMatrix) -> ValidationReport {
    validate_with(m, &Tolerances::default())
}

pub fn validate_with(m: &ComplexMatrix, tol: &Tolerances) -> ValidationReport {
    let mut report = ValidationReport::default();
    if m.nrows() != m.ncols() {
        report
            .violations
            .push(Violation::NotSquare((m.nrows() as f64 - m.ncols() as f64).abs()));
        return report;
    }
    let defect = hermitian_defect(m);
    if !(defect <= tol.herm) {
        report.violations.push(Violation::Hermiticity(defect));
    }
    let min_eig = eigenvalues_unchecked(m).last().copied().unwrap_or(0.0);
    if min_eig < -tol.psd {
        report.violations.push(Violation::Positivity(-min_eig));
    }
    let tr_err = (trace(m).re - 1.0).abs();
    if !(tr_err <= tol.trace) {
        report.violations.push(Violation::Trace(tr_err));
    }
    report
}

/// Hermitian, PSD, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(ComplexMatrix);

impl DensityOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::new_with(m, &Tolerances::default())
    }

    pub fn new_with(mut m: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let report = validate_with(&m, tol);
        if let Some(v) = report.worst() {
            return Err(match v {
                Violation::NotSquare(_) => Error::NotSquare {
                    rows: m.nrows(),
                    cols: m.ncols(),
                },
                Violation::Hermiticity(x) => Error::NotHermitian(x),
                Violation::Positivity(x) => Error::NotPsd(-x),
                Violation::Trace(x) => Error::InvalidState(format!("trace off by {x:e}")),
            });
        }
        symmetrize(&mut m);
        Ok(Self(m))
    }

    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let d = probs.len();
        let m = ComplexMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::new(probs[i], 0.0)
            } else {
                ZERO
            }
        });
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let m = ComplexMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0);
        Self(m)
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self(psi.projector())
    }

    /// Bloch-ball parameterisation `(I + x X + y Y + z Z)/2`; requires `|r| <= 1`.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Self {
        Self(bloch_matrix(x, y, z))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        Self(tensor(&self.0, &other.0))
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from_matrix(&self.0)
    }

    pub fn from_json(j: &MatrixJson) -> Result<Self> {
        Self::new(j.to_matrix()?)
    }
}

pub(crate) fn bloch_matrix(x: f64, y: f64, z: f64) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        ],
    )
}

/// Unit vector in a `dim`-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if amplitudes.is_empty() || (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "pure state has squared norm {norm_sq}"
            )));
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|psi><psi|`.
    pub fn projector(&self) -> ComplexMatrix {
        let d = self.dim();
        ComplexMatrix::from_fn(d, d, |i, j| self.amplitudes[i] * self.amplitudes[j].conj())
    }
}

/// Classical-quantum ensemble `sum_x p(x) |x><x| ⊗ W_x`.
#[derive(Debug, Clone)]
pub struct CqState {
    labels: Vec<String>,
    probs: Vec<f64>,
    states: Vec<DensityOperator>,
}

impl CqState {
    pub fn new(labels: Vec<String>, probs: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        if labels.len() != probs.len() || probs.len() != states.len() || probs.is_empty() {
            return Err(Error::InvalidState(
                "cq state needs one probability and one state per label".into(),
            ));
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidState("negative probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        Ok(Self {
            labels,
            probs,
            states,
        })
    }

    /// Labels `0..k` as strings.
    pub fn from_ensemble(probs: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        let labels = (0..probs.len()).map(|i| i.to_string()).collect();
        Self::new(labels, probs, states)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn classical_dim(&self) -> usize {
        self.probs.len()
    }

    pub fn quantum_dim(&self) -> usize {
        self.states[0].dim()
    }

    /// `rho_E = sum_x p(x) W_x`.
    pub fn eve_marginal(&self) -> DensityOperator {
        let d = self.quantum_dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (p, w) in self.probs.iter().zip(&self.states) {
            m += w.matrix() * Complex64::new(*p, 0.0);
        }
        DensityOperator(m)
    }

    /// Block-diagonal joint matrix on `C^{|A|} ⊗ H_E`.
    pub fn joint_matrix(&self) -> ComplexMatrix {
        let k = self.classical_dim();
        let d = self.quantum_dim();
        let mut m = ComplexMatrix::zeros(k * d, k * d);
        for (x, (p, w)) in self.probs.iter().zip(&self.states).enumerate() {
            let block = w.matrix() * Complex64::new(*p, 0.0);
            m.view_mut((x * d, x * d), (d, d)).copy_from(&block);
        }
        m
    }

    /// The n-fold product ensemble over label tuples, ordered lexicographically.
    pub fn tensor_power(&self, n: usize) -> CqState {
        assert!(n >= 1);
        let mut out = self.clone();
        for _ in 1..n {
            let mut labels = Vec::new();
            let mut probs = Vec::new();
            let mut states = Vec::new();
            for (la, (pa, wa)) in out.labels.iter().zip(out.probs.iter().zip(&out.states)) {
                for (lb, (pb, wb)) in self.labels.iter().zip(self.probs.iter().zip(&self.states)) {
                    labels.push(format!("{la}{lb}"));
                    probs.push(pa * pb);
                    states.push(wa.tensor(wb));
                }
            }
            out = CqState {
                labels,
                probs,
                states,
            };
        }
        out
    }
}

/// JSON matrix format `{"dim": d, "re": [[..]], "im": [[..]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let d = m.nrows();
        Self {
            dim: d,
            re: (0..d).map(|i| (0..d).map(|j| m[(i, j)].re).collect()).collect(),
            im: Some((0..d).map(|i| (0..d).map(|j| m[(i, j)].im).collect()).collect()),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let d = self.dim;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if d == 0 || !shape_ok(&self.re) {
            return Err(Error::InvalidParameter {
                name: "re",
                reason: format!("expected a {d}x{d} array"),
            });
        }
        if let Some(im) = &self.im {
            if !shape_ok(im) {
                return Err(Error::InvalidParameter {
                    name: "im",
                    reason: format!("expected a {d}x{d} array"),
                });
            }
        }
        Ok(ComplexMatrix::from_fn(d, d, |i, j| {
            let im = self.im.as_ref().map_or(0.0, |im| im[i][j]);
            Complex64::new(self.re[i][j], im)
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn real(d: usize, rows: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_row_slice(d, d, &rows.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    fn max_abs(m: &ComplexMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn reconstruction_error(m: &ComplexMatrix, e: &Eigh) -> f64 {
        max_abs(&(m - e.map(|l| l)))
    }

    fn orthonormality_error(v: &ComplexMatrix) -> f64 {
        let d = v.nrows();
        max_abs(&(v.adjoint() * v - ComplexMatrix::identity(d, d)))
    }

    #[test]
    fn eigh_identity_and_diagonal() {
        let e = eigh(&ComplexMatrix::identity(2, 2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);

        let e = eigh(&real(2, &[3.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
        assert_abs_diff_eq!(e.vectors[(0, 0)].norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.vectors[(1, 1)].norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn eigh_pauli_x() {
        let m = real(2, &[0.0, 1.0, 1.0, 0.0]);
        let e = eigh(&m).unwrap();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1], -1.0, epsilon = 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(e.vectors[(0, 0)].norm(), s, epsilon = 1e-12);
        assert_abs_diff_eq!(e.vectors[(1, 0)].norm(), s, epsilon = 1e-12);
        assert!(reconstruction_error(&m, &e) < 1e-12);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = real(2, &[1.0, 0.5, 0.0, 1.0]);
        match eigh(&m) {
            Err(Error::NotHermitian(x)) => assert_abs_diff_eq!(x, 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        for dim in 1..=16 {
            for seed in 0..5 {
                let m = random_hermitian(dim, 1000 * dim as u64 + seed);
                let e = eigh(&m).unwrap();
                assert!(reconstruction_error(&m, &e) <= 1e-9, "dim {dim}");
                assert!(orthonormality_error(&e.vectors) <= 1e-10, "dim {dim}");
                assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn power_examples() {
        let id = ComplexMatrix::identity(3, 3);
        assert!(max_abs(&(matrix_power_psd(&id, -0.7).unwrap() - &id)) < 1e-14);

        let p = matrix_power_psd(&real(2, &[4.0, 0.0, 0.0, 0.0]), -0.5).unwrap();
        assert!(max_abs(&(p - real(2, &[0.5, 0.0, 0.0, 0.0]))) < 1e-15);

        let p = matrix_power_psd(&real(2, &[0.25, 0.0, 0.0, 0.75]), 0.5).unwrap();
        assert_abs_diff_eq!(p[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p[(1, 1)].re, 0.75f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn power_rejects_negative_spectrum() {
        let m = real(2, &[1.0, 0.0, 0.0, -0.1]);
        assert!(matches!(matrix_power_psd(&m, 0.5), Err(Error::NotPsd(_))));
    }

    #[test]
    fn power_composition() {
        for seed in 0..20 {
            let rho = random_density(4, seed);
            let m = rho.matrix();
            assert!(max_abs(&(matrix_power_psd(m, 1.0).unwrap() - m)) <= 1e-10);
            let (a, b) = (0.7, -1.3);
            let lhs = matrix_power_psd(&matrix_power_psd(m, a).unwrap(), b).unwrap();
            let rhs = matrix_power_psd(m, a * b).unwrap();
            assert!(max_abs(&(lhs - rhs)) <= 1e-8);
        }
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm(&ComplexMatrix::zeros(3, 3)).unwrap(), 0.0);
        let rho = random_density(3, 7);
        assert_eq!(trace_norm(&(rho.matrix() - rho.matrix())).unwrap(), 0.0);
        assert_abs_diff_eq!(
            trace_norm(&real(2, &[0.5, 0.0, 0.0, -0.5])).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert!(trace_norm(&real(2, &[0.0, 1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn trace_norm_triangle() {
        for seed in 0..50 {
            let a = random_hermitian(3, 3 * seed);
            let b = random_hermitian(3, 3 * seed + 1);
            let lhs = trace_norm(&(&a + &b)).unwrap();
            let rhs = trace_norm(&a).unwrap() + trace_norm(&b).unwrap();
            assert!(lhs <= rhs + 1e-10);
        }
    }

    #[test]
    fn tensor_examples() {
        let i2 = ComplexMatrix::identity(2, 2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4, 4));

        let (p, q) = (0.3, 0.8);
        let t = tensor(&real(2, &[p, 0.0, 0.0, 1.0 - p]), &real(2, &[q, 0.0, 0.0, 1.0 - q]));
        let want = [p * q, p * (1.0 - q), (1.0 - p) * q, (1.0 - p) * (1.0 - q)];
        for (i, w) in want.iter().enumerate() {
            assert_abs_diff_eq!(t[(i, i)].re, *w, epsilon = 1e-15);
        }
    }

    #[test]
    fn tensor_rank_multiplies() {
        let rank = |m: &ComplexMatrix| eigh(m).unwrap().values.iter().filter(|&&v| v > 1e-9).count();
        for seed in 0..10 {
            // rank-1 and rank-2 PSD factors inside 3-dim spaces
            let v = random_density(3, seed);
            let e = eigh(v.matrix()).unwrap();
            let a = e.map(|l| if l == e.values[0] { l } else { 0.0 });
            let b = e.map(|l| if l == e.values[2] { 0.0 } else { l });
            assert_eq!(rank(&a), 1);
            assert_eq!(rank(&b), 2);
            assert_eq!(rank(&tensor(&a, &b)), 2);
            assert_eq!(rank(&tensor(&b, &b)), 4);
        }
    }

    #[test]
    fn tensor_mixed_product_and_bilinearity() {
        for seed in 0..20 {
            let a = random_hermitian(2, 4 * seed);
            let b = random_hermitian(2, 4 * seed + 1);
            let c = random_hermitian(2, 4 * seed + 2);
            let d = random_hermitian(2, 4 * seed + 3);
            let lhs = tensor(&a, &b) * tensor(&c, &d);
            let rhs = tensor(&(&a * &c), &(&b * &d));
            assert!(max_abs(&(lhs - rhs)) <= 1e-12);

            let k = Complex64::new(0.3, -1.2);
            let lin = tensor(&(&a * k + &c), &b) - (tensor(&a, &b) * k + tensor(&c, &b));
            assert!(max_abs(&lin) <= 1e-12);
        }
    }

    #[test]
    fn partial_traces_of_product() {
        let a = random_density(2, 1);
        let b = random_density(3, 2);
        let ab = a.tensor(&b);
        let ta = partial_trace_second(ab.matrix(), 2, 3).unwrap();
        let tb = partial_trace_first(ab.matrix(), 2, 3).unwrap();
        assert!(max_abs(&(ta - a.matrix())) < 1e-14);
        assert!(max_abs(&(tb - b.matrix())) < 1e-14);
    }

    #[test]
    fn random_density_examples() {
        let one = random_density(1, 99);
        assert_abs_diff_eq!(one.matrix()[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_eq!(random_density(3, 5), random_density(3, 5));
        for seed in 0..20 {
            assert!(validate(random_density(3, seed).matrix()).is_ok());
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let u = random_unitary(4, 3);
        assert!(orthonormality_error(&u) < 1e-12);
    }

    #[test]
    fn validate_examples() {
        assert!(validate(DensityOperator::maximally_mixed(2).matrix()).is_ok());

        let r = validate(&real(2, &[0.6, 0.0, 0.0, 0.6]));
        assert_eq!(r.violations.len(), 1);
        match r.violations[0] {
            Violation::Trace(x) => assert_abs_diff_eq!(x, 0.2, epsilon = 1e-12),
            v => panic!("unexpected {v:?}"),
        }

        let r = validate(&real(2, &[1.1, 0.0, 0.0, -0.1]));
        assert_eq!(r.violations.len(), 1);
        match r.violations[0] {
            Violation::Positivity(x) => assert_abs_diff_eq!(x, 0.1, epsilon = 1e-12),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn json_roundtrip_validates() {
        let rho = random_density(3, 11);
        let j = rho.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(DensityOperator::from_json(&back).unwrap(), rho);

        let bad: MatrixJson = serde_json::from_str(r#"{"dim":2,"re":[[0.6,0],[0,0.6]]}"#).unwrap();
        assert!(DensityOperator::from_json(&bad).is_err());
        let ragged: MatrixJson = serde_json::from_str(r#"{"dim":2,"re":[[1,0]]}"#).unwrap();
        assert!(ragged.to_matrix().is_err());
    }

    #[test]
    fn cq_state_checks() {
        let w = DensityOperator::maximally_mixed(2);
        assert!(CqState::from_ensemble(vec![0.5, 0.6], vec![w.clone(), w.clone()]).is_err());
        assert!(CqState::from_ensemble(vec![0.5, 0.5], vec![w.clone(), DensityOperator::maximally_mixed(3)]).is_err());
        let cq = CqState::from_ensemble(vec![0.25, 0.75], vec![w.clone(), w]).unwrap();
        assert_eq!(cq.tensor_power(2).classical_dim(), 4);
        assert_abs_diff_eq!(trace(&cq.joint_matrix()).re, 1.0, epsilon = 1e-15);
    }
}
