//! Finite-length leakage bounds for the hashed wiretap code.
//!
//! The leakage δ after privacy amplification obeys
//! `δ ≤ 2^{(2−α)/α} · 2^{−n e(α)}` with exponent
//! `e(α) = ((α−1)/α)(ρ_sac − I_α)` for every `1 < α ≤ 2`. Bounds are carried
//! in the log₂ domain throughout: at n = 16200 the linear values sit far
//! below the smallest normal double.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bpsk::{closed_form_i_alpha_with, energy_split, golden_section, Precision};
use crate::error::{invalid, Result};
use crate::renyi::Alpha;

/// Block-code dimensions and the declared reliability figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameConfig {
    pub n: u64,
    pub k1: u64,
    pub k2: u64,
    pub rho_rel: f64,
    /// Bob's decoding error target; echoed into reports, never computed.
    pub eps_n: Option<f64>,
}

impl FrameConfig {
    pub fn new(n: u64, k1: u64, k2: u64, rho_rel: f64, eps_n: Option<f64>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "blocklength must be positive"));
        }
        if k1 + k2 > n {
            return Err(invalid("k1", format!("k1 + k2 = {} exceeds n = {n}", k1 + k2)));
        }
        if !(rho_rel > 0.0 && rho_rel <= 1.0) {
            return Err(invalid("rho_rel", format!("{rho_rel} is outside (0, 1]")));
        }
        if let Some(e) = eps_n {
            if !(0.0..=1.0).contains(&e) {
                return Err(invalid("eps_n", format!("{e} is not a probability")));
            }
        }
        Ok(Self { n, k1, k2, rho_rel, eps_n })
    }

    /// `ρ_sac = k2 / n`.
    pub fn rho_sac(&self) -> f64 {
        self.k2 as f64 / self.n as f64
    }
}

/// `log₂` of the prefactor `2^{(2−α)/α}`.
pub fn prefactor_log2(alpha: Alpha) -> f64 {
    let a = alpha.value();
    (2.0 - a) / a
}

/// `e(α) = ((α−1)/α)(ρ_sac − I_α)`.
pub fn exponent(alpha: Alpha, rho_sac: f64, i_alpha: f64) -> f64 {
    let a = alpha.value();
    (a - 1.0) / a * (rho_sac - i_alpha)
}

/// `log₂` of the hashing bound `2^{2/α − 1 + ((α−1)/α)(k1 − H_α(A|E))}`.
pub fn hashing_leakage_bound_log2(k1: f64, h_alpha: f64, alpha: Alpha) -> Result<f64> {
    let a = Alpha::in_bound_range(alpha.value())?.value();
    Ok(2.0 / a - 1.0 + (a - 1.0) / a * (k1 - h_alpha))
}

/// Linear hashing bound; underflows to 0 for very secure parameters.
pub fn hashing_leakage_bound(k1: f64, h_alpha: f64, alpha: Alpha) -> Result<f64> {
    Ok(hashing_leakage_bound_log2(k1, h_alpha, alpha)?.exp2())
}

/// Leakage bound at one order α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeakageBound {
    pub alpha: f64,
    pub log2_delta_bound: f64,
    /// `min(1, 2^{log2_delta_bound})`.
    pub delta_bound: f64,
    pub exponent_bits_per_use: f64,
    /// `ρ_sac > I_α`, i.e. the bound decays with n.
    pub feasible: bool,
}

impl LeakageBound {
    /// The stored log₂ bound recomputed from α, n and the exponent.
    pub fn recompute_log2(&self, n: u64) -> f64 {
        (2.0 - self.alpha) / self.alpha - n as f64 * self.exponent_bits_per_use
    }
}

/// `δ ≤ 2^{(2−α)/α − n e(α)}` for a sacrifice rate given directly.
pub fn leakage_bound(n: u64, rho_sac: f64, i_alpha: f64, alpha: Alpha) -> Result<LeakageBound> {
    let alpha = Alpha::in_bound_range(alpha.value())?;
    let e = exponent(alpha, rho_sac, i_alpha);
    let log2_delta_bound = prefactor_log2(alpha) - n as f64 * e;
    Ok(LeakageBound {
        alpha: alpha.value(),
        log2_delta_bound,
        delta_bound: log2_delta_bound.exp2().min(1.0),
        exponent_bits_per_use: e,
        feasible: rho_sac > i_alpha,
    })
}

/// [`leakage_bound`] with `ρ_sac = k2/n` taken from the frame.
pub fn channel_leakage_bound(cfg: &FrameConfig, i_alpha: f64, alpha: Alpha) -> Result<LeakageBound> {
    leakage_bound(cfg.n, cfg.rho_sac(), i_alpha, alpha)
}

/// Uniform α grid on `(min, max]`: `min + (max − min) i / steps`, `i = 1..=steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaGrid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    /// Golden-section refinement around the grid argmax.
    pub refine: bool,
}

impl Default for AlphaGrid {
    fn default() -> Self {
        Self {
            min: 1.0,
            max: 2.0,
            steps: 2000,
            refine: true,
        }
    }
}

impl AlphaGrid {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        let g = Self {
            min,
            max,
            steps,
            refine: true,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min >= 1.0 && self.min < self.max && self.max <= 2.0) {
            return Err(invalid(
                "alpha",
                format!("range ({}, {}] must satisfy 1 <= min < max <= 2", self.min, self.max),
            ));
        }
        if self.steps == 0 {
            return Err(invalid("alpha_steps", "need at least one grid point"));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let span = self.max - self.min;
        (1..=self.steps)
            .map(|i| if i == self.steps { self.max } else { self.min + span * i as f64 / self.steps as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentPoint {
    pub alpha: f64,
    pub i_alpha_bits: f64,
    pub exponent: f64,
}

/// `e(α)` over a grid, with its maximiser.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentCurve {
    pub grid: Vec<ExponentPoint>,
    pub rho_sac: f64,
    pub argmax_alpha: f64,
    pub max_exponent: f64,
    pub feasible: bool,
}

impl ExponentCurve {
    /// True when `e` rises (weakly) to its maximum and falls (weakly) after it.
    pub fn is_unimodal(&self, slack: f64) -> bool {
        let Some(peak) = self.grid.iter().position(|p| p.alpha == self.argmax_alpha) else {
            return false;
        };
        let rising = self.grid[..=peak].windows(2).all(|w| w[1].exponent >= w[0].exponent - slack);
        let falling = self.grid[peak..].windows(2).all(|w| w[1].exponent <= w[0].exponent + slack);
        rising && falling
    }

    pub fn argmax_point(&self) -> ExponentPoint {
        *self
            .grid
            .iter()
            .find(|p| p.alpha == self.argmax_alpha)
            .expect("argmax lies on the grid")
    }
}

fn first_max(points: &[ExponentPoint]) -> usize {
    let mut best = 0;
    for (i, p) in points.iter().enumerate() {
        if p.exponent > points[best].exponent {
            best = i;
        }
    }
    best
}

/// Maximises `e(α)` over the grid; ties go to the smaller α. With
/// refinement enabled, a golden-section search between the neighbours of
/// the grid argmax inserts a better point into the curve when it finds one.
pub fn optimize_exponent<F>(i_alpha_fn: F, rho_sac: f64, grid: &AlphaGrid) -> Result<ExponentCurve>
where
    F: Fn(Alpha) -> Result<f64>,
{
    grid.validate()?;
    let eval = |a: f64| -> Result<ExponentPoint> {
        let alpha = Alpha::in_bound_range(a)?;
        let i = i_alpha_fn(alpha)?;
        Ok(ExponentPoint {
            alpha: a,
            i_alpha_bits: i,
            exponent: exponent(alpha, rho_sac, i),
        })
    };
    let mut points = grid.points().into_iter().map(eval).collect::<Result<Vec<_>>>()?;
    let mut best = first_max(&points);

    if grid.refine && points.len() >= 2 {
        let lo = if best == 0 { grid.min } else { points[best - 1].alpha };
        let hi = points.get(best + 1).map_or(grid.max, |p| p.alpha);
        let lo = if lo <= 1.0 { lo + (hi - lo) * 1e-9 } else { lo };
        let neg = |a: f64| eval(a).map_or(f64::INFINITY, |p| -p.exponent);
        let (a_star, neg_e) = golden_section(&neg, lo, hi, 200);
        if -neg_e > points[best].exponent && !points.iter().any(|p| p.alpha == a_star) {
            let p = eval(a_star)?;
            let at = points.partition_point(|q| q.alpha < a_star);
            points.insert(at, p);
            best = first_max(&points);
        }
    }

    let top = points[best];
    Ok(ExponentCurve {
        rho_sac,
        argmax_alpha: top.alpha,
        max_exponent: top.exponent,
        feasible: top.exponent > 0.0,
        grid: points,
    })
}

/// `ρ_sec = ρ_rel − ρ_sac`; negative values are kept and flagged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecureRatePlan {
    pub rho_rel: f64,
    pub rho_sac: f64,
    pub rho_sec: f64,
    pub feasible: bool,
}

pub fn secure_rate(rho_rel: f64, rho_sac: f64) -> Result<SecureRatePlan> {
    for (name, v) in [("rho_rel", rho_rel), ("rho_sac", rho_sac)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(invalid(name, format!("{v} is outside [0, 1]")));
        }
    }
    let rho_sec = rho_rel - rho_sac;
    Ok(SecureRatePlan {
        rho_rel,
        rho_sac,
        rho_sec,
        feasible: rho_sec > 0.0,
    })
}

/// Exact code rate `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rate {
    pub num: u32,
    pub den: u32,
}

impl Rate {
    pub const fn new(num: u32, den: u32) -> Self {
        Self { num, den }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl std::str::FromStr for Rate {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let num = n.trim().parse().map_err(|_| invalid("rates", format!("bad numerator in `{s}`")))?;
            let den: u32 = d.trim().parse().map_err(|_| invalid("rates", format!("bad denominator in `{s}`")))?;
            if den == 0 {
                return Err(invalid("rates", format!("zero denominator in `{s}`")));
            }
            return Ok(Rate::new(num, den));
        }
        // decimal shorthand such as 0.75, kept exact up to 6 places
        let v: f64 = s.parse().map_err(|_| invalid("rates", format!("cannot parse rate `{s}`")))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(invalid("rates", format!("rate {v} is outside [0, 1]")));
        }
        let den = 1_000_000u32;
        let num = (v * den as f64).round() as u32;
        let g = gcd(num, den);
        Ok(Rate::new(num / g, den / g))
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateTable {
    /// Code rates usable with BPSK.
    Bpsk,
    /// Every code rate in the standard's short-frame table.
    Full,
}

/// DVB-S2X code rates.
pub fn dvb_rate_table(mode: RateTable) -> Vec<Rate> {
    match mode {
        RateTable::Bpsk => vec![Rate::new(1, 2), Rate::new(2, 5), Rate::new(1, 3), Rate::new(1, 4)],
        RateTable::Full => vec![
            Rate::new(2, 5),
            Rate::new(1, 2),
            Rate::new(3, 5),
            Rate::new(2, 3),
            Rate::new(3, 4),
            Rate::new(4, 5),
            Rate::new(5, 6),
            Rate::new(8, 9),
            Rate::new(9, 10),
        ],
    }
}

/// One CSV row of the trade-off sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeoffRow {
    pub alpha: f64,
    pub i_alpha_bits: f64,
    pub exponent: f64,
    pub log2_delta_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateVerdict {
    pub rate: Rate,
    pub plan: SecureRatePlan,
}

/// Exponent curve, leakage bounds at `n`, and secure-rate verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffReport {
    pub n_photon: f64,
    pub rho_sac: f64,
    pub n: u64,
    pub eps_n: Option<f64>,
    pub curve: ExponentCurve,
    pub rows: Vec<TradeoffRow>,
    pub verdicts: Vec<RateVerdict>,
}

pub const CSV_HEADER: [&str; 4] = ["alpha", "i_alpha_bits", "exponent", "log2_delta_bound"];

impl TradeoffReport {
    pub fn log2_delta_at_argmax(&self) -> f64 {
        let p = self.curve.argmax_point();
        (2.0 - p.alpha) / p.alpha - self.n as f64 * p.exponent
    }

    /// `log₂ δ` at the optimal α for each blocklength in `ns`.
    pub fn delta_vs_blocklength(&self, ns: &[u64]) -> Vec<(u64, f64)> {
        let p = self.curve.argmax_point();
        ns.iter()
            .map(|&n| (n, (2.0 - p.alpha) / p.alpha - n as f64 * p.exponent))
            .collect()
    }

    pub fn exponent_verdict(&self) -> &'static str {
        if self.curve.feasible {
            "positive exponent"
        } else {
            "no positive exponent"
        }
    }

    /// CSV with the fixed header, floats at 9 significant digits.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                crate::fmt::sig9(r.alpha),
                crate::fmt::sig9(r.i_alpha_bits),
                crate::fmt::sig9(r.exponent),
                crate::fmt::sig9(r.log2_delta_bound),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    /// `{argmax_alpha, max_exponent, n, rho_sac, verdicts: [...]}` plus
    /// the echoed reliability target and bound values.
    pub fn summary_json(&self) -> serde_json::Value {
        use crate::fmt::round9;
        let verdicts: Vec<_> = self
            .verdicts
            .iter()
            .map(|v| {
                json!({
                    "rate": v.rate.to_string(),
                    "rho_rel": round9(v.plan.rho_rel),
                    "rho_sec": round9(v.plan.rho_sec),
                    "feasible": v.plan.feasible,
                })
            })
            .collect();
        json!({
            "argmax_alpha": round9(self.curve.argmax_alpha),
            "max_exponent": round9(self.curve.max_exponent),
            "n": self.n,
            "rho_sac": round9(self.rho_sac),
            "n_photon": round9(self.n_photon),
            "eps_n": self.eps_n,
            "log2_delta_bound": round9(self.log2_delta_at_argmax()),
            "exponent_verdict": self.exponent_verdict(),
            "bound_is_seed_average": true,
            "verdicts": verdicts,
        })
    }
}

/// Inputs for [`tradeoff_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffInputs {
    pub n_photon: f64,
    pub rho_sac: f64,
    pub n: u64,
    pub grid: AlphaGrid,
    pub rates: Vec<Rate>,
    pub eps_n: Option<f64>,
    pub precision: Precision,
}

impl TradeoffInputs {
    pub fn new(n_photon: f64, rho_sac: f64, n: u64) -> Self {
        Self {
            n_photon,
            rho_sac,
            n,
            grid: AlphaGrid::default(),
            rates: dvb_rate_table(RateTable::Bpsk),
            eps_n: None,
            precision: Precision::Double,
        }
    }
}

/// The BPSK trade-off pipeline: closed-form `I_α`, exponent curve, leakage
/// bound at `n`, and the secure rate for each reliability rate.
pub fn tradeoff_report(inputs: &TradeoffInputs) -> Result<TradeoffReport> {
    if !(0.0..=1.0).contains(&inputs.rho_sac) {
        return Err(invalid("rho_sac", format!("{} is outside [0, 1]", inputs.rho_sac)));
    }
    if inputs.n == 0 {
        return Err(invalid("n", "blocklength must be positive"));
    }
    let split = energy_split(inputs.n_photon)?;
    let curve = optimize_exponent(
        |a| closed_form_i_alpha_with(&split, a, inputs.precision),
        inputs.rho_sac,
        &inputs.grid,
    )?;
    let rows = curve
        .grid
        .iter()
        .map(|p| {
            let alpha = Alpha::in_bound_range(p.alpha)?;
            Ok(TradeoffRow {
                alpha: p.alpha,
                i_alpha_bits: p.i_alpha_bits,
                exponent: p.exponent,
                log2_delta_bound: prefactor_log2(alpha) - inputs.n as f64 * p.exponent,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let verdicts = inputs
        .rates
        .iter()
        .map(|&rate| {
            Ok(RateVerdict {
                rate,
                plan: secure_rate(rate.value(), inputs.rho_sac)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TradeoffReport {
        n_photon: inputs.n_photon,
        rho_sac: inputs.rho_sac,
        n: inputs.n,
        eps_n: inputs.eps_n,
        curve,
        rows,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bpsk::closed_form_i_alpha;
    use approx::assert_abs_diff_eq;

    fn al(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    #[test]
    fn hashing_bound_examples() {
        assert_eq!(hashing_leakage_bound(10.0, 10.0, al(2.0)).unwrap(), 1.0);
        assert_eq!(hashing_leakage_bound(0.0, 20.0, al(2.0)).unwrap(), 2f64.powi(-10));
        let v = hashing_leakage_bound(0.0, 30.0, al(1.5)).unwrap();
        assert_abs_diff_eq!(v, 2f64.powf(1.0 / 3.0 - 10.0), epsilon = 1e-15);
        assert_abs_diff_eq!(v, 1.2303e-3, epsilon = 1e-6);
        assert!(hashing_leakage_bound(0.0, 1.0, al(2.5)).is_err());
    }

    #[test]
    fn channel_bound_examples() {
        let cfg = FrameConfig::new(1000, 400, 500, 0.9, None).unwrap();
        let b = channel_leakage_bound(&cfg, 0.5, al(1.5)).unwrap();
        assert_eq!(b.exponent_bits_per_use, 0.0);
        assert_abs_diff_eq!(b.log2_delta_bound, 1.0 / 3.0, epsilon = 1e-15);
        assert!(!b.feasible);
        assert_eq!(b.delta_bound, 1.0);

        let b = leakage_bound(200, 0.8, 0.3, al(2.0)).unwrap();
        assert_abs_diff_eq!(b.log2_delta_bound, -200.0 * 0.5 / 2.0, epsilon = 1e-12);

        let b = leakage_bound(16200, 0.631, 0.631 - 0.0238 * 1.463865 / 0.463865, al(1.463865)).unwrap();
        assert_abs_diff_eq!(b.exponent_bits_per_use, 0.0238, epsilon = 1e-12);
        assert!(b.log2_delta_bound < -385.0 && b.log2_delta_bound > -386.0);
        assert_eq!(b.delta_bound, 2f64.powf(b.log2_delta_bound));
        assert!((b.recompute_log2(16200) - b.log2_delta_bound).abs() <= 1e-12);
    }

    #[test]
    fn frame_config_validation() {
        assert!(FrameConfig::new(10, 6, 5, 0.5, None).is_err());
        assert!(FrameConfig::new(10, 2, 5, 0.0, None).is_err());
        assert!(FrameConfig::new(0, 0, 0, 0.5, None).is_err());
        assert!(FrameConfig::new(10, 2, 5, 0.5, Some(1.5)).is_err());
        assert_eq!(FrameConfig::new(10, 2, 5, 0.5, Some(1e-5)).unwrap().rho_sac(), 0.5);
    }

    #[test]
    fn constant_information_peaks_at_two() {
        let c = optimize_exponent(|_| Ok(0.2), 0.5, &AlphaGrid::default()).unwrap();
        assert_eq!(c.argmax_alpha, 2.0);
        assert_abs_diff_eq!(c.max_exponent, 0.5 * 0.3, epsilon = 1e-15);
        assert!(c.feasible);
    }

    #[test]
    fn fixed_alpha_two_from_closed_form() {
        let s = energy_split(0.1).unwrap();
        let e = exponent(al(2.0), 1.0, closed_form_i_alpha(&s, al(2.0)).unwrap());
        assert_abs_diff_eq!(e, 0.5 * (1.0 - 0.5686130284928248), epsilon = 1e-12);
        assert_abs_diff_eq!(e, 0.2157, epsilon = 1e-4);
    }

    #[test]
    fn exponent_curve_is_consistent() {
        let r = tradeoff_report(&TradeoffInputs::new(0.1, 0.631, 16200)).unwrap();
        let c = &r.curve;
        assert!(c.grid.windows(2).all(|w| w[0].alpha < w[1].alpha));
        assert!(c.grid.iter().all(|p| p.alpha > 1.0 && p.alpha <= 2.0));
        let max = c.grid.iter().map(|p| p.exponent).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(max, c.max_exponent);
        for p in &c.grid {
            let e = exponent(al(p.alpha), c.rho_sac, p.i_alpha_bits);
            assert!((e - p.exponent).abs() <= 1e-12);
            assert_eq!(p.exponent > 0.0, c.rho_sac > p.i_alpha_bits);
        }
        assert!(c.is_unimodal(1e-15));
    }

    #[test]
    fn ties_break_toward_smaller_alpha() {
        let g = AlphaGrid { refine: false, ..AlphaGrid::new(1.0, 2.0, 10).unwrap() };
        // every point has e = 0
        let c = optimize_exponent(|_| Ok(0.5), 0.5, &g).unwrap();
        assert_eq!(c.argmax_alpha, g.points()[0]);
        assert!(!c.feasible);
    }

    #[test]
    fn secure_rate_examples() {
        let p = secure_rate(0.5, 0.631).unwrap();
        assert_abs_diff_eq!(p.rho_sec, -0.131, epsilon = 1e-15);
        assert!(!p.feasible);
        let p = secure_rate(0.75, 0.631).unwrap();
        assert_abs_diff_eq!(p.rho_sec, 0.119, epsilon = 1e-15);
        assert!(p.feasible);
        assert_eq!(secure_rate(0.4, 0.0).unwrap().rho_sec, 0.4);
        assert!(secure_rate(1.2, 0.1).is_err());
    }

    #[test]
    fn rate_tables() {
        let b = dvb_rate_table(RateTable::Bpsk);
        assert_eq!(b.iter().map(|r| r.to_string()).collect::<Vec<_>>(), ["1/2", "2/5", "1/3", "1/4"]);
        assert!(b.iter().all(|r| r.value() - 0.631 < 0.0));
        assert_eq!(dvb_rate_table(RateTable::Full).len(), 9);
        assert_eq!("3/4".parse::<Rate>().unwrap(), Rate::new(3, 4));
        assert_eq!("0.75".parse::<Rate>().unwrap(), Rate::new(3, 4));
        assert!("1/0".parse::<Rate>().is_err());
        assert!("x".parse::<Rate>().is_err());
    }

    #[test]
    fn zero_photons_report() {
        let r = tradeoff_report(&TradeoffInputs::new(0.0, 0.5, 100)).unwrap();
        for row in &r.rows {
            assert_eq!(row.i_alpha_bits, 0.0);
            assert_abs_diff_eq!(row.exponent, (row.alpha - 1.0) / row.alpha * 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn saturated_sacrifice_has_no_positive_exponent() {
        let r = tradeoff_report(&TradeoffInputs::new(0.1, 0.0, 16200)).unwrap();
        assert!(r.curve.max_exponent <= 0.0);
        assert_eq!(r.exponent_verdict(), "no positive exponent");
        assert_eq!(r.summary_json()["exponent_verdict"], "no positive exponent");
    }

    #[test]
    fn csv_header_is_fixed() {
        let mut inputs = TradeoffInputs::new(0.1, 0.631, 16200);
        inputs.grid = AlphaGrid::new(1.0, 2.0, 4).unwrap();
        let csv = tradeoff_report(&inputs).unwrap().to_csv();
        assert_eq!(csv.lines().next().unwrap(), "alpha,i_alpha_bits,exponent,log2_delta_bound");
        assert!(csv.lines().count() >= 5);
    }
}
