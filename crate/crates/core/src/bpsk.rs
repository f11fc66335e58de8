//! BPSK coherent-state channel to the eavesdropper.
//!
//! The received states `|±β⟩` live in the two-dimensional span of the even
//! and odd photon-number components, so Eve's system is represented exactly
//! by a qubit: `|±β⟩ = √β_e |φ_e⟩ ± √β_o |φ_o⟩`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::opalg::{ComplexMatrix, CqState, DensityOperator, PureState};
use crate::renyi::Alpha;

/// Photonic link parameters; `beta_prime` is treated as an amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BpskParams {
    pub beta_prime: f64,
    pub gamma: f64,
    pub eta: f64,
}

impl BpskParams {
    pub fn new(beta_prime: f64, gamma: f64, eta: f64) -> Result<Self> {
        if !(beta_prime >= 0.0 && beta_prime.is_finite()) {
            return Err(invalid("beta_prime", format!("{beta_prime} is not a non-negative amplitude")));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(invalid("gamma", format!("{gamma} is outside (0, 1]")));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(invalid("eta", format!("{eta} is outside (0, 1]")));
        }
        Ok(Self { beta_prime, gamma, eta })
    }

    /// `β = √(γη) β′`.
    pub fn received_amplitude(&self) -> f64 {
        (self.gamma * self.eta).sqrt() * self.beta_prime
    }

    /// Mean photon number at Eve, `|β|² = γ η |β′|²`.
    pub fn n_photon(&self) -> f64 {
        self.gamma * self.eta * self.beta_prime * self.beta_prime
    }
}

/// Validated `β = √(γη) β′` for raw inputs.
pub fn received_amplitude(params: &BpskParams) -> Result<f64> {
    let p = BpskParams::new(params.beta_prime, params.gamma, params.eta)?;
    Ok(p.received_amplitude())
}

/// Weights of the even and odd photon-number sectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySplit {
    pub beta_e: f64,
    pub beta_o: f64,
}

impl EnergySplit {
    pub fn new(beta_e: f64, beta_o: f64) -> Result<Self> {
        if !(beta_e >= 0.0 && beta_o >= 0.0) || (beta_e + beta_o - 1.0).abs() > 1e-12 {
            return Err(invalid("split", format!("({beta_e}, {beta_o}) is not a distribution")));
        }
        Ok(Self { beta_e, beta_o })
    }

    /// `⟨β|−β⟩ = β_e − β_o`.
    pub fn overlap(&self) -> f64 {
        self.beta_e - self.beta_o
    }

    pub fn channel(&self) -> TwoPureStateChannel {
        TwoPureStateChannel {
            p: [self.beta_e, self.beta_o],
        }
    }
}

/// `β_e = e^{-x} cosh x`, `β_o = e^{-x} sinh x` for `x = |β|²`, in the
/// overflow-free form `(1 ± e^{-2x})/2`.
pub fn energy_split(n_photon: f64) -> Result<EnergySplit> {
    if !(n_photon >= 0.0) {
        return Err(invalid("n_photon", format!("{n_photon} must be non-negative")));
    }
    let beta_o = -0.5 * (-2.0 * n_photon).exp_m1();
    let beta_e = 0.5 * (1.0 + (-2.0 * n_photon).exp());
    Ok(EnergySplit { beta_e, beta_o })
}

/// `|±β⟩` in the `{|φ_e⟩, |φ_o⟩}` basis.
pub fn eve_states(split: &EnergySplit) -> (PureState, PureState) {
    let (e, o) = (split.beta_e.sqrt(), split.beta_o.sqrt());
    let norm = e.hypot(o);
    let plus = PureState::from_real(&[e / norm, o / norm]).expect("unit vector");
    let minus = PureState::from_real(&[e / norm, -o / norm]).expect("unit vector");
    (plus, minus)
}

/// `Σ_x Q(x) |x⟩⟨x| ⊗ |v(x)⟩⟨v(x)|` with `v(0) = |+β⟩`, `v(1) = |−β⟩`.
pub fn bpsk_cq_state(split: &EnergySplit, q: [f64; 2]) -> Result<CqState> {
    let (plus, minus) = eve_states(split);
    CqState::from_ensemble(
        q.to_vec(),
        vec![DensityOperator::from_pure(&plus), DensityOperator::from_pure(&minus)],
    )
}

/// Two pure states `√p(1)|e₁⟩ ± √p(2)|e₂⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPureStateChannel {
    pub p: [f64; 2],
}

impl TwoPureStateChannel {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        if !(p1 >= 0.0 && p2 >= 0.0) || (p1 + p2 - 1.0).abs() > 1e-12 {
            return Err(invalid("p", format!("({p1}, {p2}) is not a distribution")));
        }
        Ok(Self { p: [p1, p2] })
    }

    /// `|v(x)⟩` for `x ∈ {0, 1}`.
    pub fn state(&self, x: u8) -> PureState {
        let sign = if x == 0 { 1.0 } else { -1.0 };
        let (a, b) = (self.p[0].sqrt(), self.p[1].sqrt());
        let norm = a.hypot(b);
        PureState::from_real(&[a / norm, sign * b / norm]).expect("unit vector")
    }
}

/// Scalar evaluation path for the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    /// Direct double-precision evaluation.
    #[default]
    Double,
    /// Factor out the dominant weight and use `ln_1p`; accurate when one
    /// weight is tiny or α is close to 1.
    Compensated,
}

impl Precision {
    /// Reads `QWK_PRECISION` (`double` | `compensated`); unset means double.
    pub fn from_env() -> Result<Self> {
        match std::env::var("QWK_PRECISION") {
            Err(_) => Ok(Self::Double),
            Ok(v) => match v.trim().to_ascii_lowercase().as_str() {
                "" | "double" => Ok(Self::Double),
                "compensated" | "extended" => Ok(Self::Compensated),
                other => Err(invalid("QWK_PRECISION", format!("unknown precision `{other}`"))),
            },
        }
    }
}

fn weighted_power_log2(p: [f64; 2], t: f64, precision: Precision) -> f64 {
    match precision {
        Precision::Double => (p[0].powf(t) + p[1].powf(t)).log2(),
        Precision::Compensated => {
            let (hi, lo) = if p[0] >= p[1] { (p[0], p[1]) } else { (p[1], p[0]) };
            if hi == 0.0 {
                return f64::NEG_INFINITY;
            }
            let ratio = (lo / hi).powf(t);
            (t * hi.ln() + ratio.ln_1p()) / std::f64::consts::LN_2
        }
    }
}

/// `((2α−1)/(α−1)) log₂ Σ_z p(z)^{α/(2α−1)}`, the maximum over inputs of the
/// α-order mutual information of a two-pure-state channel.
pub fn two_pure_state_i_alpha(ch: &TwoPureStateChannel, alpha: Alpha) -> Result<f64> {
    two_pure_state_i_alpha_with(ch, alpha, Precision::Double)
}

pub fn two_pure_state_i_alpha_with(ch: &TwoPureStateChannel, alpha: Alpha, precision: Precision) -> Result<f64> {
    let a = Alpha::in_bound_range(alpha.value())?.value();
    let t = a / (2.0 * a - 1.0);
    let value = (2.0 * a - 1.0) / (a - 1.0) * weighted_power_log2(ch.p, t, precision);
    Ok(value.max(0.0))
}

/// `I_α` of the BPSK channel with uniform inputs, closed form.
pub fn closed_form_i_alpha(split: &EnergySplit, alpha: Alpha) -> Result<f64> {
    two_pure_state_i_alpha(&split.channel(), alpha)
}

pub fn closed_form_i_alpha_with(split: &EnergySplit, alpha: Alpha, precision: Precision) -> Result<f64> {
    two_pure_state_i_alpha_with(&split.channel(), alpha, precision)
}

/// Offset used to read the α → 1 end of the closed form.
pub const LIMIT_OFFSET: f64 = 1e-6;

/// The α → 1⁺ end of the closed form, evaluated at `1 + LIMIT_OFFSET`.
pub fn closed_form_limit_at_one(split: &EnergySplit) -> f64 {
    closed_form_i_alpha_with(split, Alpha::in_bound_range(1.0 + LIMIT_OFFSET).expect("in range"), Precision::Compensated)
        .expect("alpha in range")
}

/// `(Σ_z p(z)^{α/(2α−1)})^{(2α−1)/α}`, the reverse-Hölder minimum.
pub fn reverse_holder_minimum(ch: &TwoPureStateChannel, alpha: Alpha) -> f64 {
    let a = alpha.value();
    let t = a / (2.0 * a - 1.0);
    (ch.p[0].powf(t) + ch.p[1].powf(t)).powf(1.0 / t)
}

/// `Σ_z p(z) Q′(z)^{(1−α)/α}` with `p(z) > 0, Q′(z) = 0` giving `+∞`.
fn reverse_holder_objective(p: [f64; 2], q1: f64, a: f64) -> f64 {
    let exp = (1.0 - a) / a;
    [q1, 1.0 - q1]
        .iter()
        .zip(p)
        .map(|(&q, pz)| {
            if pz == 0.0 {
                0.0
            } else if q <= 0.0 {
                f64::INFINITY
            } else {
                pz * q.powf(exp)
            }
        })
        .sum()
}

/// Default grid resolution for [`classical_min_oracle`].
pub const ORACLE_GRID_STEPS: usize = 1_000_000;

/// Brute-force `min_{Q′} Σ_z p(z) Q′(z)^{(1−α)/α}` over a grid of `Q′(1)`,
/// followed by golden-section refinement around the best cell.
///
/// Returns the minimum and the minimising `(Q′(1), Q′(2))`.
pub fn classical_min_oracle(ch: &TwoPureStateChannel, alpha: Alpha, grid_steps: usize) -> Result<(f64, [f64; 2])> {
    let a = Alpha::in_bound_range(alpha.value())?.value();
    if grid_steps < 2 {
        return Err(invalid("grid_steps", "need at least 2 cells"));
    }
    let f = |q: f64| reverse_holder_objective(ch.p, q, a);
    let n = grid_steps as f64;
    let (mut best_i, mut best) = (0usize, f64::INFINITY);
    for i in 0..=grid_steps {
        let v = f(i as f64 / n);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let lo = best_i.saturating_sub(1) as f64 / n;
    let hi = (best_i + 1).min(grid_steps) as f64 / n;
    let (q, v) = golden_section(&f, lo, hi, 200);
    let (q, v) = if v < best { (q, v) } else { (best_i as f64 / n, best) };
    Ok((v, [q, 1.0 - q]))
}

/// Golden-section search for the minimum of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_section(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Whether `V w0 V† = w1` for `V = diag(1, −1)`, within 1e-10.
pub fn check_symmetry(w0: &DensityOperator, w1: &DensityOperator) -> bool {
    if w0.dim() != 2 || w1.dim() != 2 {
        return false;
    }
    let mut flipped: ComplexMatrix = w0.matrix().clone();
    flipped[(0, 1)] = -flipped[(0, 1)];
    flipped[(1, 0)] = -flipped[(1, 0)];
    (flipped - w1.matrix()).iter().all(|z| z.norm() <= 1e-10)
}

/// Either `|β|²` directly or the link parameters it derives from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhotonSpec {
    Direct { n_photon: f64 },
    Link(BpskParams),
}

impl PhotonSpec {
    pub fn n_photon(&self) -> Result<f64> {
        match self {
            PhotonSpec::Direct { n_photon } if *n_photon >= 0.0 => Ok(*n_photon),
            PhotonSpec::Direct { n_photon } => Err(Error::InvalidParameter {
                name: "n_photon",
                reason: format!("{n_photon} must be non-negative"),
            }),
            PhotonSpec::Link(p) => Ok(BpskParams::new(p.beta_prime, p.gamma, p.eta)?.n_photon()),
        }
    }
}
