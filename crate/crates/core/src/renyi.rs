//! Quantum relative entropy, Petz and sandwiched Rényi divergences, and the
//! optimised quantities built on them: the α-order mutual information
//! `I_α(A;E) = inf_σ D̃_α(ρ_AE ‖ ρ_A ⊗ σ)` and the conditional entropy
//! `H_α(A|E)`.
//!
//! All values are in bits. Divergences are `+∞` when the support condition
//! fails and never NaN.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::opalg::{
    self, bloch_matrix, clipped_pow, eigenvalues_unchecked, eigh_unchecked, ComplexMatrix, CqState,
    DensityOperator, Tolerances,
};

/// `Tr[ρ Π_ker(σ)]` above this means `supp ρ ⊄ supp σ`.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Rényi order parameter.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Alpha(f64);

impl Alpha {
    /// Any order usable in a divergence: finite, positive, not 1.
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::InvalidAlpha(value, "order must be finite and positive"));
        }
        if value == 1.0 {
            return Err(Error::InvalidAlpha(value, "order 1 is only reached as a limit"));
        }
        Ok(Self(value))
    }

    /// Orders accepted by the secrecy-bound pipeline, `1 < α ≤ 2`.
    pub fn in_bound_range(value: f64) -> Result<Self> {
        if !(value > 1.0 && value <= 2.0) {
            return Err(Error::InvalidAlpha(value, "expected 1 < alpha <= 2"));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Exponent `(1-α)/(2α)` used to sandwich the reference state.
    pub fn sandwich_exponent(self) -> f64 {
        (1.0 - self.0) / (2.0 * self.0)
    }
}

/// Value of a divergence-type quantity in bits, plus optimiser diagnostics.
#[derive(Debug, Clone)]
pub struct DivergenceResult {
    pub value: f64,
    pub minimizer: Option<DensityOperator>,
    pub converged: bool,
    pub evaluations: usize,
}

impl DivergenceResult {
    fn exact(value: f64) -> Self {
        Self {
            value,
            minimizer: None,
            converged: true,
            evaluations: 1,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }

    /// `{value_bits, converged, minimizer?}`; infinite values print as `"inf"`.
    pub fn to_json(&self) -> serde_json::Value {
        let value = if self.value.is_finite() {
            json!(self.value)
        } else {
            json!("inf")
        };
        let mut out = json!({ "value_bits": value, "converged": self.converged });
        if let Some(m) = &self.minimizer {
            out["minimizer"] = serde_json::to_value(m.to_json()).expect("matrix json");
        }
        out
    }
}

fn check_reference(sigma: &ComplexMatrix, dim: usize) -> Result<opalg::Eigh> {
    if sigma.nrows() != dim || sigma.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: sigma.nrows(),
        });
    }
    let tol = Tolerances::default();
    let eig = opalg::eigh_with(sigma, &tol)?;
    if let Some(&min) = eig.values.last() {
        if min < -tol.psd {
            return Err(Error::NotPsd(min));
        }
    }
    Ok(eig)
}

/// `Tr[ρ Π]` where `Π` projects onto the numerical kernel of `eig`.
fn weight_outside_support(rho: &ComplexMatrix, eig: &opalg::Eigh, clip_eps: f64) -> f64 {
    if eig.values.iter().all(|&v| v >= clip_eps) {
        return 0.0;
    }
    let ker = eig.projector(|v| v < clip_eps);
    (rho * ker).trace().re
}

fn to_bits(nats_or_log2: f64) -> f64 {
    nats_or_log2 / std::f64::consts::LN_2
}

/// Umegaki relative entropy `Tr ρ(log ρ − log σ)` in bits.
pub fn quantum_relative_entropy(rho: &DensityOperator, sigma: &ComplexMatrix) -> Result<DivergenceResult> {
    let tol = Tolerances::default();
    let sig = check_reference(sigma, rho.dim())?;
    if weight_outside_support(rho.matrix(), &sig, tol.clip_eps) > SUPPORT_TOL {
        return Ok(DivergenceResult::exact(f64::INFINITY));
    }
    let rho_eig = eigh_unchecked(rho.matrix());
    let neg_entropy: f64 = rho_eig
        .values
        .iter()
        .filter(|&&v| v >= tol.clip_eps)
        .map(|&v| v * v.ln())
        .sum();
    let log_sigma = sig.map(|v| if v < tol.clip_eps { 0.0 } else { v.ln() });
    let cross = (rho.matrix() * log_sigma).trace().re;
    Ok(DivergenceResult::exact(to_bits(neg_entropy - cross).max(0.0)))
}

fn renyi_from_trace(q: f64, alpha: Alpha) -> f64 {
    if !(q > 0.0) {
        return f64::INFINITY;
    }
    q.log2() / (alpha.value() - 1.0)
}

/// Petz divergence `(1/(α−1)) log₂ Tr[ρ^α σ^{1−α}]`.
pub fn petz_renyi(rho: &DensityOperator, sigma: &ComplexMatrix, alpha: Alpha) -> Result<DivergenceResult> {
    let tol = Tolerances::default();
    let a = alpha.value();
    let sig = check_reference(sigma, rho.dim())?;
    if a > 1.0 && weight_outside_support(rho.matrix(), &sig, tol.clip_eps) > SUPPORT_TOL {
        return Ok(DivergenceResult::exact(f64::INFINITY));
    }
    let rho_a = eigh_unchecked(rho.matrix()).map(|v| clipped_pow(v, a, tol.clip_eps));
    let sig_pow = sig.map(|v| clipped_pow(v, 1.0 - a, tol.clip_eps));
    let q = (rho_a * sig_pow).trace().re;
    Ok(DivergenceResult::exact(renyi_from_trace(q, alpha)))
}

/// Sandwiched divergence `(1/(α−1)) log₂ Tr[(σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α]`.
pub fn sandwiched_renyi(rho: &DensityOperator, sigma: &ComplexMatrix, alpha: Alpha) -> Result<DivergenceResult> {
    let tol = Tolerances::default();
    let sig = check_reference(sigma, rho.dim())?;
    if alpha.value() > 1.0 && weight_outside_support(rho.matrix(), &sig, tol.clip_eps) > SUPPORT_TOL {
        return Ok(DivergenceResult::exact(f64::INFINITY));
    }
    let s = sig.map(|v| clipped_pow(v, alpha.sandwich_exponent(), tol.clip_eps));
    let q = trace_of_power(&(&s * rho.matrix() * &s), alpha.value(), tol.clip_eps);
    Ok(DivergenceResult::exact(renyi_from_trace(q, alpha)))
}

fn trace_of_power(m: &ComplexMatrix, a: f64, clip_eps: f64) -> f64 {
    eigenvalues_unchecked(m)
        .into_iter()
        .map(|v| clipped_pow(v, a, clip_eps))
        .sum()
}

/// Search strategy for `inf_σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaMethod {
    /// Exhaustive scan of the qubit Bloch ball with local refinement.
    BlochGrid,
    /// Projected descent over density matrices of any small dimension.
    IterativeDescent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaOptimizerConfig {
    pub method: SigmaMethod,
    /// Points per Bloch axis in the coarse scan.
    pub grid_steps: usize,
    /// Local rescans, each over a window 10× narrower.
    pub refine_rounds: usize,
    pub max_iters: usize,
    /// Stop once the objective moves by less than this between iterations.
    pub conv_tol: f64,
}

impl Default for SigmaOptimizerConfig {
    fn default() -> Self {
        Self {
            method: SigmaMethod::BlochGrid,
            grid_steps: 200,
            refine_rounds: 3,
            max_iters: 5000,
            conv_tol: 1e-10,
        }
    }
}

impl SigmaOptimizerConfig {
    pub fn descent() -> Self {
        Self {
            method: SigmaMethod::IterativeDescent,
            ..Self::default()
        }
    }

    pub fn with_grid_steps(mut self, steps: usize) -> Self {
        self.grid_steps = steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_steps < 10 {
            return Err(crate::error::invalid("grid_steps", "must be at least 10"));
        }
        if !(self.conv_tol > 0.0) {
            return Err(crate::error::invalid("conv_tol", "must be positive"));
        }
        Ok(())
    }
}

/// Best reference state found by [`minimize_over_sigma`].
#[derive(Debug, Clone)]
pub struct SigmaMinimum {
    pub value: f64,
    pub minimizer: DensityOperator,
    pub converged: bool,
    pub evaluations: usize,
}

impl From<SigmaMinimum> for DivergenceResult {
    fn from(m: SigmaMinimum) -> Self {
        Self {
            value: m.value,
            minimizer: Some(m.minimizer),
            converged: m.converged,
            evaluations: m.evaluations,
        }
    }
}

/// Points per axis used by the local refinement scans.
const REFINE_STEPS: usize = 41;

/// Minimises `objective` over density operators of dimension `dim`.
///
/// Infinite (or NaN) objective values mark infeasible references and are
/// skipped. Ties keep the first point in scan order.
pub fn minimize_over_sigma<F>(objective: F, dim: usize, cfg: &SigmaOptimizerConfig) -> Result<SigmaMinimum>
where
    F: Fn(&ComplexMatrix) -> f64 + Sync,
{
    cfg.validate()?;
    match cfg.method {
        SigmaMethod::BlochGrid => {
            if dim != 2 {
                return Err(crate::error::invalid(
                    "method",
                    format!("bloch-grid needs a qubit reference, got dim {dim}"),
                ));
            }
            Ok(bloch_grid(&objective, cfg))
        }
        SigmaMethod::IterativeDescent => Ok(projected_descent(&objective, dim, cfg)),
    }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

#[derive(Clone, Copy)]
struct GridBest {
    value: f64,
    index: usize,
    point: [f64; 3],
}

fn better(a: GridBest, b: GridBest) -> GridBest {
    if b.value < a.value || (b.value == a.value && b.index < a.index) {
        b
    } else {
        a
    }
}

/// Scans an `steps³` lattice of half-width `half` around `center`, restricted to the ball.
fn scan_cube<F>(objective: &F, center: [f64; 3], half: f64, steps: usize) -> (Option<GridBest>, usize)
where
    F: Fn(&ComplexMatrix) -> f64 + Sync,
{
    let coord = |c: f64, i: usize| c + half * (2.0 * i as f64 / (steps - 1) as f64 - 1.0);
    let results: Vec<(Option<GridBest>, usize)> = (0..steps)
        .into_par_iter()
        .map(|ix| {
            let x = coord(center[0], ix);
            let mut best: Option<GridBest> = None;
            let mut evals = 0usize;
            for iy in 0..steps {
                let y = coord(center[1], iy);
                for iz in 0..steps {
                    let z = coord(center[2], iz);
                    if x * x + y * y + z * z > 1.0 + 1e-12 {
                        continue;
                    }
                    let v = sanitize(objective(&bloch_matrix(x, y, z)));
                    evals += 1;
                    if v.is_infinite() {
                        continue;
                    }
                    let cand = GridBest {
                        value: v,
                        index: (ix * steps + iy) * steps + iz,
                        point: [x, y, z],
                    };
                    best = Some(match best {
                        None => cand,
                        Some(b) => better(b, cand),
                    });
                }
            }
            (best, evals)
        })
        .collect();
    // rows come back in index order, so the fold is deterministic
    results
        .into_iter()
        .fold((None, 0), |(acc, n), (row, e)| {
            let merged = match (acc, row) {
                (None, r) => r,
                (a, None) => a,
                (Some(a), Some(r)) => Some(better(a, r)),
            };
            (merged, n + e)
        })
}

fn bloch_grid<F>(objective: &F, cfg: &SigmaOptimizerConfig) -> SigmaMinimum
where
    F: Fn(&ComplexMatrix) -> f64 + Sync,
{
    let (mut best, mut evaluations) = scan_cube(objective, [0.0; 3], 1.0, cfg.grid_steps);
    let mut half = 1.0f64;
    let mut spacing = 2.0 / (cfg.grid_steps - 1) as f64;
    let steps = REFINE_STEPS.min(cfg.grid_steps) | 1;
    for _ in 0..cfg.refine_rounds {
        let Some(b) = best else { break };
        half = (half / 10.0).max(1.5 * spacing);
        spacing = 2.0 * half / (steps - 1) as f64;
        let (local, e) = scan_cube(objective, b.point, half, steps);
        evaluations += e;
        if let Some(l) = local {
            if l.value < b.value {
                best = Some(l);
            }
        }
    }
    match best {
        Some(b) => SigmaMinimum {
            value: b.value,
            minimizer: DensityOperator::from_bloch(b.point[0], b.point[1], b.point[2]),
            converged: true,
            evaluations,
        },
        None => SigmaMinimum {
            value: f64::INFINITY,
            minimizer: DensityOperator::maximally_mixed(2),
            converged: false,
            evaluations,
        },
    }
}

/// Orthonormal basis of the real vector space of `d×d` Hermitian matrices.
fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        let mut e = ComplexMatrix::zeros(d, d);
        e[(i, i)] = Complex64::new(1.0, 0.0);
        basis.push(e);
        for j in (i + 1)..d {
            let mut re = ComplexMatrix::zeros(d, d);
            re[(i, j)] = Complex64::new(s, 0.0);
            re[(j, i)] = Complex64::new(s, 0.0);
            basis.push(re);
            let mut im = ComplexMatrix::zeros(d, d);
            im[(i, j)] = Complex64::new(0.0, -s);
            im[(j, i)] = Complex64::new(0.0, s);
            basis.push(im);
        }
    }
    basis
}

/// Clip eigenvalues at zero and renormalise the trace.
fn project_to_states(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let eig = eigh_unchecked(m);
    let total: f64 = eig.values.iter().map(|v| v.max(0.0)).sum();
    if !(total > 0.0) {
        return None;
    }
    let mut p = eig.map(|v| v.max(0.0) / total);
    opalg::symmetrize(&mut p);
    Some(p)
}

fn projected_descent<F>(objective: &F, dim: usize, cfg: &SigmaOptimizerConfig) -> SigmaMinimum
where
    F: Fn(&ComplexMatrix) -> f64 + Sync,
{
    let basis = hermitian_basis(dim);
    let identity = ComplexMatrix::identity(dim, dim);
    let mut sigma = DensityOperator::maximally_mixed(dim).into_matrix();
    let mut value = sanitize(objective(&sigma));
    let mut evaluations = 1usize;
    let mut converged = false;
    let mut step = 1.0f64;
    let h = 1e-6;

    if value.is_infinite() {
        return SigmaMinimum {
            value,
            minimizer: DensityOperator::from_matrix_unchecked(sigma),
            converged: false,
            evaluations,
        };
    }

    for _ in 0..cfg.max_iters {
        // central differences, falling back to one-sided steps near the boundary
        let grads: Vec<f64> = basis
            .par_iter()
            .map(|e| {
                let up = sanitize(objective(&(&sigma + e * Complex64::new(h, 0.0))));
                let down = sanitize(objective(&(&sigma - e * Complex64::new(h, 0.0))));
                match (up.is_finite(), down.is_finite()) {
                    (true, true) => (up - down) / (2.0 * h),
                    (true, false) => (up - value) / h,
                    (false, true) => (value - down) / h,
                    (false, false) => 0.0,
                }
            })
            .collect();
        evaluations += 2 * basis.len();

        let mut grad = ComplexMatrix::zeros(dim, dim);
        for (g, e) in grads.iter().zip(&basis) {
            grad += e * Complex64::new(*g, 0.0);
        }
        // stay on the trace-one hyperplane
        let tr = grad.trace() / Complex64::new(dim as f64, 0.0);
        grad -= &identity * tr;
        let gnorm = grad.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if gnorm < 1e-14 {
            converged = true;
            break;
        }

        let mut t = (step * 2.0).min(1.0 / gnorm);
        let mut accepted = None;
        while t > 1e-16 {
            if let Some(cand) = project_to_states(&(&sigma - &grad * Complex64::new(t, 0.0))) {
                let v = sanitize(objective(&cand));
                evaluations += 1;
                if v < value {
                    accepted = Some((cand, v));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((cand, v)) = accepted else {
            converged = true;
            break;
        };
        let change = value - v;
        sigma = cand;
        value = v;
        step = t;
        if change < cfg.conv_tol {
            converged = true;
            break;
        }
    }

    SigmaMinimum {
        value,
        minimizer: DensityOperator::from_matrix_unchecked(sigma),
        converged,
        evaluations,
    }
}

/// `σ ↦ D̃_α(ρ_AE ‖ ρ_A ⊗ σ)` for a cq state, via the block form
/// `(1/(α−1)) log₂ Σ_x Q(x) Tr[(σ^s W_x σ^s)^α]` with `s = (1−α)/2α`.
///
/// `weight_power` raises the label weights: 1 for the mutual information,
/// α for the conditional-entropy objective `Σ_x Q(x)^α Tr[...]`.
fn cq_objective<'a>(cq: &'a CqState, alpha: Alpha, weight_power: f64) -> impl Fn(&ComplexMatrix) -> f64 + Sync + 'a {
    let tol = Tolerances::default();
    let a = alpha.value();
    let s_exp = alpha.sandwich_exponent();
    move |sigma: &ComplexMatrix| {
        let eig = eigh_unchecked(sigma);
        if eig.values.last().is_some_and(|&v| v < -tol.psd) {
            return f64::INFINITY;
        }
        let singular = eig.values.iter().any(|&v| v < tol.clip_eps);
        let ker = singular.then(|| eig.projector(|v| v < tol.clip_eps));
        let s = eig.map(|v| clipped_pow(v, s_exp, tol.clip_eps));
        let mut total = 0.0;
        for (q, w) in cq.probs().iter().zip(cq.states()) {
            if *q == 0.0 {
                continue;
            }
            if let Some(k) = &ker {
                if (w.matrix() * k).trace().re > SUPPORT_TOL {
                    return f64::INFINITY;
                }
            }
            let inner = &s * w.matrix() * &s;
            total += q.powf(weight_power) * trace_of_power(&inner, a, tol.clip_eps);
        }
        renyi_from_trace(total, alpha)
    }
}

fn check_bound_alpha(alpha: Alpha) -> Result<()> {
    Alpha::in_bound_range(alpha.value()).map(|_| ())
}

/// `I_α(A;E) = inf_σ D̃_α(ρ_AE ‖ ρ_A ⊗ σ)` for `1 < α ≤ 2`.
pub fn alpha_mutual_information(cq: &CqState, alpha: Alpha, cfg: &SigmaOptimizerConfig) -> Result<DivergenceResult> {
    check_bound_alpha(alpha)?;
    let objective = cq_objective(cq, alpha, 1.0);
    let min = minimize_over_sigma(objective, cq.quantum_dim(), cfg)?;
    Ok(DivergenceResult {
        value: min.value.max(0.0),
        ..min.into()
    })
}

/// `H_α(A|E)`, using `log₂|A| − I_α` when the label distribution is uniform
/// and [`conditional_renyi_entropy_direct`] otherwise.
pub fn conditional_renyi_entropy(cq: &CqState, alpha: Alpha, cfg: &SigmaOptimizerConfig) -> Result<DivergenceResult> {
    check_bound_alpha(alpha)?;
    let k = cq.classical_dim();
    let uniform = cq.probs().iter().all(|&p| (p - 1.0 / k as f64).abs() <= 1e-12);
    if !uniform {
        return conditional_renyi_entropy_direct(cq, alpha, cfg);
    }
    let mi = alpha_mutual_information(cq, alpha, cfg)?;
    Ok(DivergenceResult {
        value: (k as f64).log2() - mi.value,
        ..mi
    })
}

/// `H_α(A|E) = max_σ (1/(1−α)) log₂ Tr[(σ^s ρ_AE σ^s)^α]`, optimised on the
/// full joint matrix with `σ` acting on `E` only.
pub fn conditional_renyi_entropy_direct(
    cq: &CqState,
    alpha: Alpha,
    cfg: &SigmaOptimizerConfig,
) -> Result<DivergenceResult> {
    check_bound_alpha(alpha)?;
    let tol = Tolerances::default();
    let joint = cq.joint_matrix();
    let k = cq.classical_dim();
    let a = alpha.value();
    let s_exp = alpha.sandwich_exponent();
    let id_a = ComplexMatrix::identity(k, k);
    let objective = |sigma: &ComplexMatrix| {
        let eig = eigh_unchecked(sigma);
        if eig.values.last().is_some_and(|&v| v < -tol.psd) {
            return f64::INFINITY;
        }
        let lifted = |m: &ComplexMatrix| opalg::tensor(&id_a, m);
        if eig.values.iter().any(|&v| v < tol.clip_eps) {
            let ker = lifted(&eig.projector(|v| v < tol.clip_eps));
            if (&joint * ker).trace().re > SUPPORT_TOL {
                return f64::INFINITY;
            }
        }
        let s = lifted(&eig.map(|v| clipped_pow(v, s_exp, tol.clip_eps)));
        let q = trace_of_power(&(&s * &joint * &s), a, tol.clip_eps);
        // negated entropy, so that the optimiser minimises
        renyi_from_trace(q, alpha)
    };
    let min = minimize_over_sigma(objective, cq.quantum_dim(), cfg)?;
    Ok(DivergenceResult {
        value: -min.value,
        ..min.into()
    })
}
