//! Named invariant checks, grouped into suites, with measured slack.
//!
//! A check passes when `measured ≤ tolerance`. Errors inside a check are
//! reported as a failure of that check; the suite always runs to the end.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bpsk::{
    bpsk_cq_state, classical_min_oracle, closed_form_i_alpha, closed_form_limit_at_one, energy_split,
    reverse_holder_minimum, two_pure_state_i_alpha, TwoPureStateChannel, ORACLE_GRID_STEPS,
};
use crate::error::{invalid, Error, Result};
use crate::fmt::{round9, sig9};
use crate::opalg::{
    eigh, matrix_power_psd, partial_trace_second, random_density, random_hermitian, random_unitary, tensor,
    trace_norm, ComplexMatrix, CqState, DensityOperator,
};
use crate::renyi::{
    alpha_mutual_information, conditional_renyi_entropy, conditional_renyi_entropy_direct, petz_renyi,
    quantum_relative_entropy, sandwiched_renyi, Alpha, SigmaOptimizerConfig,
};
use crate::secbound::{
    channel_leakage_bound, dvb_rate_table, exponent, hashing_leakage_bound_log2, secure_rate, tradeoff_report,
    FrameConfig, Rate, RateTable, TradeoffInputs,
};
use crate::wiretap::{
    codeword_histogram, collision_probability, hash_output_histogram, inner_decode, inner_encode,
    max_collision_probability, random_seed, BitVec, ToeplitzSeed,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Renyi,
    Bpsk,
    Wiretap,
    Secbound,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "renyi" => Ok(Suite::Renyi),
            "bpsk" => Ok(Suite::Bpsk),
            "wiretap" => Ok(Suite::Wiretap),
            "secbound" => Ok(Suite::Secbound),
            other => Err(invalid("suite", format!("unknown suite `{other}`"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::All => "all",
            Suite::Renyi => "renyi",
            Suite::Bpsk => "bpsk",
            Suite::Wiretap => "wiretap",
            Suite::Secbound => "secbound",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyOptions {
    /// Multiplies every tolerance; values below 1 tighten the suite.
    pub tolerance_scale: f64,
    pub seed: u64,
    /// Coarse Bloch-grid resolution for the closed-form comparison.
    pub grid_steps: usize,
    /// Random state pairs in the divergence battery.
    pub pairs: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tolerance_scale: 1.0,
            seed: 0,
            grid_steps: 40,
            pairs: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    /// `tolerance − measured`; negative on failure.
    pub slack: f64,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let num = |x: f64| if x.is_finite() { json!(round9(x)) } else { json!(x.to_string()) };
        let checks: Vec<_> = self
            .checks
            .iter()
            .map(|c| {
                let mut v = json!({
                    "name": c.name,
                    "passed": c.passed,
                    "measured": num(c.measured),
                    "tolerance": num(c.tolerance),
                    "slack": num(c.slack),
                });
                if let Some(d) = &c.detail {
                    v["detail"] = json!(d);
                }
                v
            })
            .collect();
        json!({
            "suite": self.suite.to_string(),
            "passed": self.passed(),
            "failed": self.failures().count(),
            "checks": checks,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "passed", "measured", "tolerance", "slack", "detail"])
            .expect("in-memory write");
        for c in &self.checks {
            w.write_record([
                c.name.as_str(),
                if c.passed { "true" } else { "false" },
                &sig9(c.measured),
                &sig9(c.tolerance),
                &sig9(c.slack),
                c.detail.as_deref().unwrap_or(""),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

struct Runner {
    scale: f64,
    checks: Vec<Check>,
}

/// What a check body reports: the measured defect, and optional detail.
struct Measured(f64, Option<String>);

impl From<f64> for Measured {
    fn from(x: f64) -> Self {
        Measured(x, None)
    }
}

impl Runner {
    fn run<M: Into<Measured>>(&mut self, name: &str, tolerance: f64, body: impl FnOnce() -> Result<M>) {
        let tolerance = tolerance * self.scale;
        let check = match body() {
            Ok(m) => {
                let Measured(measured, detail) = m.into();
                let passed = measured <= tolerance;
                Check {
                    name: name.to_string(),
                    passed,
                    measured,
                    tolerance,
                    slack: tolerance - measured,
                    detail,
                }
            }
            Err(e) => Check {
                name: name.to_string(),
                passed: false,
                measured: f64::NAN,
                tolerance,
                slack: f64::NAN,
                detail: Some(format!("error: {e}")),
            },
        };
        self.checks.push(check);
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<VerifyReport> {
    if !(opts.tolerance_scale >= 0.0) || !opts.tolerance_scale.is_finite() {
        return Err(invalid("tolerance_scale", "must be a finite non-negative number"));
    }
    if opts.grid_steps < 2 {
        return Err(invalid("grid_steps", "need at least 2 points per axis"));
    }
    let mut r = Runner {
        scale: opts.tolerance_scale,
        checks: Vec::new(),
    };
    if suite.includes(Suite::Renyi) {
        opalg_checks(&mut r, opts);
        renyi_checks(&mut r, opts);
    }
    if suite.includes(Suite::Bpsk) {
        bpsk_checks(&mut r, opts);
    }
    if suite.includes(Suite::Secbound) {
        secbound_checks(&mut r);
    }
    if suite.includes(Suite::Wiretap) {
        wiretap_checks(&mut r, opts);
    }
    Ok(VerifyReport {
        suite,
        checks: r.checks,
    })
}

fn al(v: f64) -> Result<Alpha> {
    Alpha::new(v)
}

fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn random_pairs(opts: &VerifyOptions) -> Vec<(DensityOperator, DensityOperator)> {
    (0..opts.pairs as u64)
        .map(|i| {
            let dim = 2 + (i % 2) as usize;
            let base = opts.seed.wrapping_mul(1_000_003).wrapping_add(2 * i);
            (random_density(dim, base), random_density(dim, base + 1))
        })
        .collect()
}

fn opalg_checks(r: &mut Runner, opts: &VerifyOptions) {
    r.run("opalg.eigh_reconstruction", 1e-9, || {
        let mut worst = 0f64;
        for (i, d) in [2usize, 3, 4, 8, 16].iter().enumerate() {
            let m = random_hermitian(*d, opts.seed + i as u64);
            let e = eigh(&m)?;
            worst = worst.max(max_abs(&(e.map(|x| x) - &m)));
        }
        Ok(worst)
    });
    r.run("opalg.power_composition", 1e-8, || {
        let mut worst = 0f64;
        for i in 0..10u64 {
            let m = random_density(2 + (i % 3) as usize, opts.seed + 100 + i).into_matrix();
            worst = worst.max(max_abs(&(matrix_power_psd(&m, 1.0)? - &m)));
            let lhs = matrix_power_psd(&matrix_power_psd(&m, 0.7)?, 1.9)?;
            worst = worst.max(max_abs(&(lhs - matrix_power_psd(&m, 0.7 * 1.9)?)));
        }
        Ok(worst)
    });
    r.run("opalg.trace_norm_triangle", 1e-10, || {
        let mut worst = 0f64;
        for i in 0..20u64 {
            let d = 2 + (i % 3) as usize;
            let a = random_hermitian(d, opts.seed + 200 + 2 * i);
            let b = random_hermitian(d, opts.seed + 201 + 2 * i);
            let excess = trace_norm(&(&a + &b))? - trace_norm(&a)? - trace_norm(&b)?;
            worst = worst.max(excess);
        }
        Ok(worst.max(0.0))
    });
    r.run("opalg.tensor_mixed_product", 1e-12, || {
        let mut worst = 0f64;
        for i in 0..10u64 {
            let s = opts.seed + 300 + 4 * i;
            let [a, b, c, d] = [0, 1, 2, 3].map(|k| random_hermitian(2, s + k));
            let lhs = tensor(&a, &b) * tensor(&c, &d);
            let rhs = tensor(&(&a * &c), &(&b * &d));
            worst = worst.max(max_abs(&(lhs - rhs)));
            let bil = tensor(&(&a + &c), &b) - tensor(&a, &b) - tensor(&c, &b);
            worst = worst.max(max_abs(&bil));
        }
        Ok(worst)
    });
}

fn renyi_checks(r: &mut Runner, opts: &VerifyOptions) {
    let pairs = random_pairs(opts);

    r.run("renyi.ordering_in_alpha", 1e-9, || {
        let alphas = [0.6, 1.2, 1.5, 2.0, 3.0].map(|a| Alpha::new(a).expect("valid"));
        let mut worst = 0f64;
        for (rho, sigma) in &pairs {
            let petz: Vec<f64> = alphas
                .iter()
                .map(|&a| petz_renyi(rho, sigma.matrix(), a).map(|d| d.value))
                .collect::<Result<_>>()?;
            let sand: Vec<f64> = alphas
                .iter()
                .map(|&a| sandwiched_renyi(rho, sigma.matrix(), a).map(|d| d.value))
                .collect::<Result<_>>()?;
            for w in petz.windows(2).chain(sand.windows(2)) {
                worst = worst.max(w[0] - w[1]);
            }
        }
        Ok(worst.max(0.0))
    });

    r.run("renyi.sandwiched_le_petz", 1e-9, || {
        let mut worst = 0f64;
        for (rho, sigma) in &pairs {
            for a in [1.2, 1.5, 2.0, 3.0] {
                let a = al(a)?;
                let excess = sandwiched_renyi(rho, sigma.matrix(), a)?.value - petz_renyi(rho, sigma.matrix(), a)?.value;
                worst = worst.max(excess);
            }
        }
        Ok(worst.max(0.0))
    });

    r.run("renyi.alpha_to_one", 1e-3, || {
        let mut worst = 0f64;
        for (rho, sigma) in &pairs {
            let d = quantum_relative_entropy(rho, sigma.matrix())?.value;
            for a in [1.0 + 1e-4, 1.0 - 1e-4] {
                let a = al(a)?;
                worst = worst.max((petz_renyi(rho, sigma.matrix(), a)?.value - d).abs());
                worst = worst.max((sandwiched_renyi(rho, sigma.matrix(), a)?.value - d).abs());
            }
        }
        Ok(worst)
    });

    r.run("renyi.alpha_to_one_monotone", 0.0, || {
        let mut worst = 0f64;
        for (rho, sigma) in &pairs {
            let d = quantum_relative_entropy(rho, sigma.matrix())?.value;
            let mut prev = (f64::INFINITY, f64::INFINITY);
            for a in [1.1, 1.01, 1.001] {
                let a = al(a)?;
                let gp = (petz_renyi(rho, sigma.matrix(), a)?.value - d).abs();
                let gs = (sandwiched_renyi(rho, sigma.matrix(), a)?.value - d).abs();
                worst = worst.max(gp - prev.0).max(gs - prev.1);
                prev = (gp, gs);
            }
        }
        Ok(worst.max(0.0))
    });

    r.run("renyi.commuting_classical", 1e-10, || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xC0);
        let mut worst = 0f64;
        for _ in 0..50 {
            let dim = rng.random_range(2..=3);
            let p = simplex(&mut rng, dim);
            let q = simplex(&mut rng, dim);
            let rho = DensityOperator::diagonal(&p)?;
            let sigma = DensityOperator::diagonal(&q)?;
            for a in [0.5, 0.8, 1.5, 2.0, 3.0] {
                let classical = p.iter().zip(&q).map(|(x, y)| x.powf(a) * y.powf(1.0 - a)).sum::<f64>().log2() / (a - 1.0);
                let a = al(a)?;
                worst = worst.max((petz_renyi(&rho, sigma.matrix(), a)?.value - classical).abs());
                worst = worst.max((sandwiched_renyi(&rho, sigma.matrix(), a)?.value - classical).abs());
            }
        }
        Ok(worst)
    });

    r.run("renyi.data_processing", 1e-9, || {
        let mut worst = 0f64;
        for i in 0..20u64 {
            let s = opts.seed + 500 + 4 * i;
            let (rho, sigma, tau) = (random_density(2, s), random_density(2, s + 1), random_density(2, s + 2));
            let u = random_unitary(4, s + 3);
            let channel = |x: &DensityOperator| -> Result<DensityOperator> {
                let joint = &u * tensor(x.matrix(), tau.matrix()) * u.adjoint();
                DensityOperator::new(partial_trace_second(&joint, 2, 2)?)
            };
            let (lr, ls) = (channel(&rho)?, channel(&sigma)?);
            for a in [0.5, 0.7, 1.5, 2.0, 5.0] {
                let a = al(a)?;
                let excess = sandwiched_renyi(&lr, ls.matrix(), a)?.value - sandwiched_renyi(&rho, sigma.matrix(), a)?.value;
                worst = worst.max(excess);
            }
        }
        Ok(worst.max(0.0))
    });

    let descent = SigmaOptimizerConfig::descent();
    r.run("renyi.additivity", 2e-3, || {
        let split = energy_split(0.1)?;
        let cq = bpsk_cq_state(&split, [0.5, 0.5])?;
        let cq2 = cq.tensor_power(2);
        let mut worst = 0f64;
        for a in [1.5, 2.0] {
            let a = al(a)?;
            let single = alpha_mutual_information(&cq, a, &descent)?.value;
            let double = alpha_mutual_information(&cq2, a, &descent)?.value;
            worst = worst.max((double - 2.0 * single).abs());
        }
        Ok(worst)
    });

    r.run("renyi.product_state_zero", 1e-8, || {
        let tau = random_density(2, opts.seed + 900);
        let cq = CqState::from_ensemble(vec![0.3, 0.7], vec![tau.clone(), tau])?;
        let mut worst = 0f64;
        for a in [1.2, 2.0] {
            worst = worst.max(alpha_mutual_information(&cq, al(a)?, &descent)?.value.abs());
        }
        Ok(worst)
    });

    r.run("renyi.i_alpha_nonnegative", 0.0, || {
        let mut worst = 0f64;
        for i in 0..5u64 {
            let states = vec![random_density(2, opts.seed + 910 + 2 * i), random_density(2, opts.seed + 911 + 2 * i)];
            let cq = CqState::from_ensemble(vec![0.5, 0.5], states)?;
            worst = worst.max(-alpha_mutual_information(&cq, al(1.5)?, &descent)?.value);
        }
        Ok(worst.max(0.0))
    });

    r.run("renyi.i_alpha_monotone_bpsk", 1e-9, || {
        let cq = bpsk_cq_state(&energy_split(0.1)?, [0.5, 0.5])?;
        let mut prev = f64::NEG_INFINITY;
        let mut worst = 0f64;
        for k in 0..=10 {
            let a = 1.001 + 0.999 * k as f64 / 10.0;
            let v = alpha_mutual_information(&cq, al(a)?, &descent)?.value;
            worst = worst.max(prev - v);
            prev = v;
        }
        Ok(worst.max(0.0))
    });
}

fn simplex(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..dim).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

fn bpsk_checks(r: &mut Runner, opts: &VerifyOptions) {
    r.run("bpsk.split_sum", 1e-15, || {
        let mut worst = 0f64;
        for x in [0.0, 1e-12, 1e-6, 0.05, 0.1, 0.5, 1.0, 10.0, 400.0] {
            let s = energy_split(x)?;
            worst = worst.max((s.beta_e + s.beta_o - 1.0).abs());
        }
        Ok(worst)
    });

    r.run("bpsk.overlap", 1e-12, || {
        let mut worst = 0f64;
        for x in [0.0, 0.05, 0.1, 0.5, 1.0, 3.0] {
            let s = energy_split(x)?;
            worst = worst.max((s.overlap() - (-2.0 * x).exp()).abs());
        }
        Ok(worst)
    });

    r.run("bpsk.closed_form_vs_grid", 1e-4, || {
        let cfg = SigmaOptimizerConfig::default().with_grid_steps(opts.grid_steps);
        let mut worst = 0f64;
        for x in [0.05, 0.1, 0.5, 1.0] {
            let split = energy_split(x)?;
            let cq = bpsk_cq_state(&split, [0.5, 0.5])?;
            for a in [1.1, 1.3, 1.5, 1.8, 2.0] {
                let a = al(a)?;
                let grid = alpha_mutual_information(&cq, a, &cfg)?.value;
                worst = worst.max((grid - closed_form_i_alpha(&split, a)?).abs());
            }
        }
        Ok(worst)
    });

    r.run("bpsk.uniform_q_optimal", 0.0, || {
        let split = energy_split(0.1)?;
        let cfg = SigmaOptimizerConfig::descent();
        let mut best = (f64::NEG_INFINITY, 0.0);
        for k in 0..=20 {
            let q0 = k as f64 / 20.0;
            let v = alpha_mutual_information(&bpsk_cq_state(&split, [q0, 1.0 - q0])?, al(1.5)?, &cfg)?.value;
            // ties resolve toward the centre
            if v > best.0 + 1e-9 || ((v - best.0).abs() <= 1e-9 && (q0 - 0.5).abs() < (best.1 - 0.5f64).abs()) {
                best = (v, q0);
            }
        }
        Ok(Measured((best.1 - 0.5f64).abs(), Some(format!("argmax Q(0) = {}", best.1))))
    });

    r.run("bpsk.reverse_holder_oracle", 1e-8, || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xB0);
        let mut worst = 0f64;
        for _ in 0..20 {
            let p1: f64 = rng.random_range(0.0..1.0);
            let ch = TwoPureStateChannel::new(p1, 1.0 - p1)?;
            let a = al(rng.random_range(1.01..=2.0))?;
            let (oracle, _) = classical_min_oracle(&ch, a, ORACLE_GRID_STEPS)?;
            worst = worst.max((oracle - reverse_holder_minimum(&ch, a)).abs());
            let link = a.value() / (a.value() - 1.0) * reverse_holder_minimum(&ch, a).log2();
            worst = worst.max((link - two_pure_state_i_alpha(&ch, a)?).abs());
        }
        Ok(worst)
    });

    r.run("bpsk.monotone_alpha_energy", 1e-10, || {
        let mut worst = 0f64;
        let energies = [0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0];
        let alphas: Vec<f64> = (1..=100).map(|k| 1.0 + k as f64 / 100.0).collect();
        let mut prev_row: Option<Vec<f64>> = None;
        for x in energies {
            let split = energy_split(x)?;
            let row: Vec<f64> = alphas
                .iter()
                .map(|&a| closed_form_i_alpha(&split, al(a)?))
                .collect::<Result<_>>()?;
            for w in row.windows(2) {
                worst = worst.max(w[0] - w[1]);
            }
            if let Some(prev) = &prev_row {
                for (p, c) in prev.iter().zip(&row) {
                    worst = worst.max(p - c);
                }
            }
            prev_row = Some(row);
        }
        Ok(worst.max(0.0))
    });
}

fn secbound_checks(r: &mut Runner) {
    let report = tradeoff_report(&TradeoffInputs::new(0.1, 0.631, 16200));

    r.run("secbound.feasibility_law", 0.0, || {
        let rep = report.as_ref().map_err(Clone::clone)?;
        let bad = rep
            .curve
            .grid
            .iter()
            .filter(|p| (p.exponent > 0.0) != (rep.rho_sac > p.i_alpha_bits))
            .count();
        Ok(bad as f64)
    });

    r.run("secbound.delta_slope", 1e-12, || {
        let rep = report.as_ref().map_err(Clone::clone)?;
        let mut worst = 0f64;
        for p in rep.curve.grid.iter().filter(|p| p.exponent > 0.0).step_by(50) {
            let a = al(p.alpha)?;
            let b1 = crate::secbound::leakage_bound(1000, rep.rho_sac, p.i_alpha_bits, a)?;
            let b2 = crate::secbound::leakage_bound(1001, rep.rho_sac, p.i_alpha_bits, a)?;
            worst = worst.max(((b2.log2_delta_bound - b1.log2_delta_bound) + p.exponent).abs());
        }
        Ok(worst)
    });

    r.run("secbound.curve_consistency", 1e-12, || {
        let rep = report.as_ref().map_err(Clone::clone)?;
        let mut worst = 0f64;
        let mut max = f64::NEG_INFINITY;
        for p in &rep.curve.grid {
            worst = worst.max((exponent(al(p.alpha)?, rep.rho_sac, p.i_alpha_bits) - p.exponent).abs());
            max = max.max(p.exponent);
        }
        Ok(worst.max((max - rep.curve.max_exponent).abs()))
    });

    r.run("secbound.asymptotic_threshold", 0.0, || {
        let rep = report.as_ref().map_err(Clone::clone)?;
        let split = energy_split(rep.n_photon)?;
        let g = &rep.curve.grid;
        // threshold at the smallest grid α, against one grid step of I_α variation
        let step = (g[1].i_alpha_bits - g[0].i_alpha_bits).abs();
        let gap = (g[0].i_alpha_bits - closed_form_limit_at_one(&split)).abs();
        Ok(Measured((gap - 2.0 * step).max(0.0), Some(format!("gap {} vs step {}", sig9(gap), sig9(step)))))
    });

    r.run("secbound.operating_point", 0.0, || {
        let rep = report.as_ref().map_err(Clone::clone)?;
        let interior = rep.curve.argmax_alpha > 1.0 && rep.curve.argmax_alpha < 2.0;
        let ok = rep.curve.is_unimodal(1e-12) && rep.curve.max_exponent > 0.0 && interior && rep.log2_delta_at_argmax() <= -300.0;
        Ok(Measured(
            if ok { 0.0 } else { 1.0 },
            Some(format!(
                "argmax alpha {}, max exponent {}, log2 delta {}",
                sig9(rep.curve.argmax_alpha),
                sig9(rep.curve.max_exponent),
                sig9(rep.log2_delta_at_argmax())
            )),
        ))
    });

    r.run("secbound.dvb_rates_negative", 0.0, || {
        let positive = dvb_rate_table(RateTable::Bpsk)
            .iter()
            .map(|rate| secure_rate(rate.value(), 0.631))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .filter(|p| p.rho_sec >= 0.0)
            .count();
        Ok(positive as f64)
    });

    r.run("secbound.hypothetical_rate", 1e-12, || {
        let plan = secure_rate(Rate::new(3, 4).value(), 0.631)?;
        Ok((plan.rho_sec - 0.119).abs())
    });

    r.run("secbound.hashing_matches_channel", 1e-12, || {
        let split = energy_split(0.1)?;
        let cq = bpsk_cq_state(&split, [0.5, 0.5])?;
        let a = al(2.0)?;
        let h = conditional_renyi_entropy(&cq, a, &SigmaOptimizerConfig::default())?.value;
        let hashing = hashing_leakage_bound_log2(1.0, h, a)?;
        let channel = channel_leakage_bound(&FrameConfig::new(1, 1, 0, 1.0, None)?, 1.0 - h, a)?.log2_delta_bound;
        Ok((hashing - channel).abs())
    });

    r.run("secbound.conditional_entropy_paths", 1e-4, || {
        let cq = bpsk_cq_state(&energy_split(0.1)?, [0.5, 0.5])?;
        let a = al(2.0)?;
        let cfg = SigmaOptimizerConfig::default();
        let identity = conditional_renyi_entropy(&cq, a, &cfg)?.value;
        let direct = conditional_renyi_entropy_direct(&cq, a, &SigmaOptimizerConfig::descent())?.value;
        Ok((identity - direct).abs())
    });
}

fn wiretap_checks(r: &mut Runner, opts: &VerifyOptions) {
    r.run("wiretap.round_trip", 0.0, || {
        let mut bad = 0u64;
        for k1 in 1..=4 {
            for k2 in 1..=4 {
                let len = k1 + k2 - 1;
                for s in 0..1u64 << len {
                    let seed = ToeplitzSeed::new(k1, k2, BitVec::from_u64(s, len))?;
                    for m in 0..1u64 << k1 {
                        for l in 0..1u64 << k2 {
                            let m = BitVec::from_u64(m, k1);
                            let a = inner_encode(&m, &BitVec::from_u64(l, k2), &seed)?;
                            bad += (inner_decode(&a, &seed)? != m) as u64;
                        }
                    }
                }
            }
        }
        Ok(bad as f64)
    });

    r.run("wiretap.max_collision_k1_3_k2_2", 0.0, || {
        let p = max_collision_probability(3, 2)?;
        let gap = p - Ratio::new(1, 8);
        let gap = *gap.numer() as f64 / *gap.denom() as f64;
        Ok(Measured(gap.abs(), Some(format!("max collision probability {p}"))))
    });

    r.run("wiretap.universal2", 0.0, || {
        let mut worst = 0f64;
        for k1 in 1..=3 {
            for k2 in 1..=3 {
                let p = max_collision_probability(k1, k2)?;
                let bound = Ratio::new(1, 1u64 << k1);
                if p > bound {
                    let d = p - bound;
                    worst = worst.max(*d.numer() as f64 / *d.denom() as f64);
                }
            }
        }
        Ok(worst)
    });

    r.run("wiretap.collision_pair_exact", 0.0, || {
        let a = BitVec::from_bits(&[1, 0, 1, 1, 0]);
        let b = BitVec::from_bits(&[1, 0, 1, 0, 1]);
        let p = collision_probability(3, 2, &a, &b)?;
        Ok(if p == Ratio::new(1, 8) { 0.0 } else { 1.0 })
    });

    r.run("wiretap.hash_uniformity", 0.0, || {
        let mut worst = 0u64;
        for k1 in 1..=3 {
            for k2 in 1..=3 {
                let expected = 1u64 << (k2 - 1);
                for d in 1..1u64 << k2 {
                    for c in hash_output_histogram(k1, k2, &BitVec::from_u64(d, k2))? {
                        worst = worst.max(c.abs_diff(expected));
                    }
                }
            }
        }
        Ok(worst as f64)
    });

    r.run("wiretap.codeword_uniformity", 0.0, || {
        let mut worst = 0u64;
        for k1 in 1..=4 {
            for k2 in 1..=4 {
                let expected = 1u64 << (k1 + k2 - 1);
                for c in codeword_histogram(k1, k2)? {
                    worst = worst.max(c.abs_diff(expected));
                }
            }
        }
        Ok(worst as f64)
    });

    r.run("wiretap.linearity", 0.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x1F);
        let mut bad = 0u64;
        for i in 0..200u64 {
            let (k1, k2) = (rng.random_range(1..=16), rng.random_range(1..=16));
            let seed = random_seed(k1, k2, opts.seed.wrapping_add(i))?;
            let mut bits = |n: usize| BitVec::from_bools(&(0..n).map(|_| rng.random::<bool>()).collect::<Vec<_>>());
            let (m, l, m2, l2) = (bits(k1), bits(k2), bits(k1), bits(k2));
            let lhs = inner_encode(&m.xor(&m2)?, &l.xor(&l2)?, &seed)?;
            let rhs = inner_encode(&m, &l, &seed)?.xor(&inner_encode(&m2, &l2, &seed)?)?;
            bad += (lhs != rhs) as u64;
        }
        Ok(bad as f64)
    });
}
