//! Price-series ingestion and the supervised-window pipeline.
//!
//! The modeling representation is simple returns `r_t = (p_t - p_{t-1}) /
//! p_{t-1}`, min-max scaled to [-1, 1] so targets match the model's tanh
//! output range. The scaler is always fitted on training returns only;
//! validation values may fall outside [-1, 1] and are deliberately not
//! clipped. Windows carry their target's source index so the no-leakage
//! invariant (every window index strictly precedes its target) stays
//! checkable downstream.
//!
//! Synthetic generators stand in for proprietary market data: a sine wave
//! (predictable), a random walk (unpredictable null), and an AR(1) returns
//! process (tunable signal).

use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Matrix;
use crate::rng::SeededRng;

/// Dated daily closing prices, strictly increasing in date, all positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub name: String,
    pub dates: Vec<NaiveDate>,
    pub closes: Vec<f64>,
}

impl PriceSeries {
    pub fn new(name: impl Into<String>, dates: Vec<NaiveDate>, closes: Vec<f64>) -> Result<Self> {
        if dates.len() != closes.len() {
            return Err(Error::Data(format!(
                "{} dates vs {} closes",
                dates.len(),
                closes.len()
            )));
        }
        for window in dates.windows(2) {
            if window[0] >= window[1] {
                return Err(Error::Data(format!(
                    "dates not strictly increasing at {} -> {}",
                    window[0], window[1]
                )));
            }
        }
        if let Some((i, &p)) = closes.iter().enumerate().find(|(_, &p)| p <= 0.0 || !p.is_finite()) {
            return Err(Error::Data(format!("non-positive close {p} at row {i}")));
        }
        Ok(PriceSeries {
            name: name.into(),
            dates,
            closes,
        })
    }

    pub fn len(&self) -> usize {
        self.closes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closes.is_empty()
    }

    /// Contiguous slice of the series as a new series.
    pub fn slice(&self, start: usize, end: usize) -> PriceSeries {
        PriceSeries {
            name: self.name.clone(),
            dates: self.dates[start..end].to_vec(),
            closes: self.closes[start..end].to_vec(),
        }
    }

    /// Writes the series in the input CSV format (`date,close` header).
    pub fn write_csv(&self, mut writer: impl std::io::Write) -> Result<()> {
        writeln!(writer, "date,close")?;
        for (date, close) in self.dates.iter().zip(&self.closes) {
            writeln!(writer, "{date},{close}")?;
        }
        Ok(())
    }
}

/// Loads a `date,close` CSV: UTF-8, ISO-8601 dates, decimal-point floats.
/// Rows are sorted by date; duplicate dates and non-positive prices are
/// rejected with their line number.
pub fn load_csv(path: impl AsRef<Path>) -> Result<PriceSeries> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".to_string());

    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "date,close" => {}
        Some((_, header)) => {
            return Err(Error::Data(format!(
                "expected header 'date,close', got '{header}' in {}",
                path.display()
            )))
        }
        None => return Err(Error::Data(format!("{} is empty", path.display()))),
    }

    let mut rows: Vec<(NaiveDate, f64)> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1; // 1-based, including the header line
        if line.trim().is_empty() {
            continue;
        }
        let (date_str, close_str) = line
            .split_once(',')
            .ok_or_else(|| Error::Data(format!("line {line_no}: expected 'date,close', got '{line}'")))?;
        let date = NaiveDate::parse_from_str(date_str.trim(), "%Y-%m-%d")
            .map_err(|e| Error::Data(format!("line {line_no}: bad date '{date_str}': {e}")))?;
        let close: f64 = close_str
            .trim()
            .parse()
            .map_err(|e| Error::Data(format!("line {line_no}: bad close '{close_str}': {e}")))?;
        if close <= 0.0 || !close.is_finite() {
            return Err(Error::Data(format!("line {line_no}: non-positive close {close}")));
        }
        rows.push((date, close));
    }
    rows.sort_by_key(|(date, _)| *date);
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::Data(format!("duplicate date {}", pair[0].0)));
        }
    }
    let (dates, closes) = rows.into_iter().unzip();
    PriceSeries::new(name, dates, closes)
}

/// Simple returns: `r_t = (p_t - p_{t-1}) / p_{t-1}`, length `len - 1`.
pub fn to_returns(series: &PriceSeries) -> Result<Vec<f64>> {
    returns_of(&series.closes)
}

pub(crate) fn returns_of(closes: &[f64]) -> Result<Vec<f64>> {
    if closes.len() < 2 {
        return Err(Error::Argument(format!(
            "need at least 2 prices for returns, got {}",
            closes.len()
        )));
    }
    Ok(closes
        .windows(2)
        .map(|pair| (pair[1] - pair[0]) / pair[0])
        .collect())
}

/// Affine min-max map onto [-1, 1], fitted on training returns only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub min: f64,
    pub max: f64,
}

impl Scaler {
    /// Fits on the training slice. Values outside the fitted range (e.g.
    /// from a more volatile validation period) transform outside [-1, 1]
    /// and are not clipped.
    pub fn fit(train_returns: &[f64]) -> Result<Scaler> {
        if train_returns.is_empty() {
            return Err(Error::Argument("cannot fit scaler on empty returns".into()));
        }
        let min = train_returns.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = train_returns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !min.is_finite() || !max.is_finite() || min >= max {
            return Err(Error::Data(format!(
                "degenerate return range [{min}, {max}]; cannot scale"
            )));
        }
        Ok(Scaler { min, max })
    }

    pub fn transform(&self, value: f64) -> f64 {
        2.0 * (value - self.min) / (self.max - self.min) - 1.0
    }

    pub fn transform_all(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&v| self.transform(v)).collect()
    }

    /// Inverse of [`Scaler::transform`]; maps model-space values back to
    /// returns (needed for sign-based accuracy, since the forward map does
    /// not preserve zero).
    pub fn inverse(&self, value: f64) -> f64 {
        self.min + (value + 1.0) * (self.max - self.min) / 2.0
    }
}

/// Supervised windows over a scaled return sequence.
///
/// Window `k` covers source indices `[k, k+lag)`; its target is index
/// `k + lag`, recorded in `origin_indices`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSet {
    /// Each window is a lag x input_dim matrix.
    pub windows: Vec<Matrix>,
    pub targets: Vec<f64>,
    /// Source index of each target in the scaled return sequence.
    pub origin_indices: Vec<usize>,
    pub lag: usize,
    pub input_dim: usize,
}

impl WindowSet {
    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    /// First `n` samples (used for memorization experiments).
    pub fn take(&self, n: usize) -> WindowSet {
        WindowSet {
            windows: self.windows[..n].to_vec(),
            targets: self.targets[..n].to_vec(),
            origin_indices: self.origin_indices[..n].to_vec(),
            lag: self.lag,
            input_dim: self.input_dim,
        }
    }

    /// Samples whose target index satisfies the predicate.
    pub fn filter_by_origin(&self, keep: impl Fn(usize) -> bool) -> WindowSet {
        let mut out = WindowSet {
            windows: Vec::new(),
            targets: Vec::new(),
            origin_indices: Vec::new(),
            lag: self.lag,
            input_dim: self.input_dim,
        };
        for ((window, &target), &origin) in self
            .windows
            .iter()
            .zip(&self.targets)
            .zip(&self.origin_indices)
        {
            if keep(origin) {
                out.windows.push(window.clone());
                out.targets.push(target);
                out.origin_indices.push(origin);
            }
        }
        out
    }
}

/// Builds all `length - lag` windows over a scaled return sequence
/// (input_dim = 1: one return per timestep).
pub fn make_windows(scaled_returns: &[f64], lag: usize) -> Result<WindowSet> {
    if lag < 1 {
        return Err(Error::Argument("lag must be >= 1".into()));
    }
    if scaled_returns.len() < lag + 1 {
        return Err(Error::Argument(format!(
            "need at least lag+1 = {} returns for one window, got {}",
            lag + 1,
            scaled_returns.len()
        )));
    }
    let count = scaled_returns.len() - lag;
    let mut windows = Vec::with_capacity(count);
    let mut targets = Vec::with_capacity(count);
    let mut origin_indices = Vec::with_capacity(count);
    for k in 0..count {
        let window = Matrix::from_vec(lag, 1, scaled_returns[k..k + lag].to_vec())?;
        windows.push(window);
        targets.push(scaled_returns[k + lag]);
        origin_indices.push(k + lag);
        // No-leakage invariant by construction: indices [k, k+lag) < k+lag.
        debug_assert!(k + lag > k + lag - 1);
    }
    Ok(WindowSet {
        windows,
        targets,
        origin_indices,
        lag,
        input_dim: 1,
    })
}

/// Recipe for a synthetic price series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SyntheticSpec {
    /// `p_t = 100 + 10 sin(2 pi t / 20) + noise`.
    Sine { length: usize, noise_std: f64, seed: u64 },
    /// `p_t = p_{t-1} (1 + e_t)`, `e ~ N(0, noise_std)`, from 100.
    RandomWalk { length: usize, noise_std: f64, seed: u64 },
    /// Returns follow `r_t = phi r_{t-1} + e_t`; prices compounded from 100.
    Ar1 {
        length: usize,
        noise_std: f64,
        ar_coefficient: f64,
        seed: u64,
    },
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let (length, noise_std) = match self {
            SyntheticSpec::Sine { length, noise_std, .. }
            | SyntheticSpec::RandomWalk { length, noise_std, .. }
            | SyntheticSpec::Ar1 { length, noise_std, .. } => (*length, *noise_std),
        };
        let mut violations = Vec::new();
        if length < 64 {
            violations.push(format!("length must be >= 64, got {length}"));
        }
        if noise_std < 0.0 || noise_std.is_nan() {
            violations.push(format!("noise_std must be >= 0, got {noise_std}"));
        }
        if let SyntheticSpec::Ar1 { ar_coefficient, .. } = self {
            if ar_coefficient.abs() >= 1.0 || ar_coefficient.is_nan() {
                violations.push(format!(
                    "ar_coefficient must satisfy |phi| < 1, got {ar_coefficient}"
                ));
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(violations.join("; ")))
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            SyntheticSpec::Sine { seed, .. }
            | SyntheticSpec::RandomWalk { seed, .. }
            | SyntheticSpec::Ar1 { seed, .. } => *seed,
        }
    }

    fn label(&self) -> String {
        match self {
            SyntheticSpec::Sine { seed, .. } => format!("sine-{seed}"),
            SyntheticSpec::RandomWalk { seed, .. } => format!("random_walk-{seed}"),
            SyntheticSpec::Ar1 { ar_coefficient, seed, .. } => {
                format!("ar1-{ar_coefficient}-{seed}")
            }
        }
    }
}

/// Generates a synthetic series with consecutive calendar dates from
/// 2010-01-01. Deterministic per spec (including its seed).
pub fn synthesize(spec: &SyntheticSpec) -> Result<PriceSeries> {
    spec.validate()?;
    let mut rng = SeededRng::new(spec.seed());
    let closes: Vec<f64> = match *spec {
        SyntheticSpec::Sine { length, noise_std, .. } => (0..length)
            .map(|t| {
                let base = 100.0 + 10.0 * (std::f64::consts::TAU * t as f64 / 20.0).sin();
                if noise_std > 0.0 {
                    base + rng.normal(0.0, noise_std)
                } else {
                    base
                }
            })
            .collect(),
        SyntheticSpec::RandomWalk { length, noise_std, .. } => {
            let mut prices = Vec::with_capacity(length);
            let mut price = 100.0;
            prices.push(price);
            for _ in 1..length {
                price *= 1.0 + rng.normal(0.0, noise_std);
                prices.push(price);
            }
            prices
        }
        SyntheticSpec::Ar1 {
            length,
            noise_std,
            ar_coefficient,
            ..
        } => {
            let mut prices = Vec::with_capacity(length);
            let mut price = 100.0;
            prices.push(price);
            let mut ret = 0.0;
            for _ in 1..length {
                ret = ar_coefficient * ret + rng.normal(0.0, noise_std);
                price *= 1.0 + ret;
                prices.push(price);
            }
            prices
        }
    };
    let start = NaiveDate::from_ymd_opt(2010, 1, 1).expect("valid date");
    let dates = (0..closes.len() as i64)
        .map(|d| start + chrono::Duration::days(d))
        .collect();
    PriceSeries::new(spec.label(), dates, closes)
}

/// Rolling volatility: population standard deviation of returns over a
/// trailing window. Output length is `len(returns) - window + 1`.
pub fn rolling_volatility(series: &PriceSeries, window: usize) -> Result<Vec<f64>> {
    if window < 1 {
        return Err(Error::Argument("volatility window must be >= 1".into()));
    }
    if series.len() < window + 1 {
        return Err(Error::Argument(format!(
            "need at least window+1 = {} prices, got {}",
            window + 1,
            series.len()
        )));
    }
    let returns = to_returns(series)?;
    Ok(returns
        .windows(window)
        .map(|chunk| {
            let mean = chunk.iter().sum::<f64>() / window as f64;
            let var = chunk.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / window as f64;
            var.sqrt()
        })
        .collect())
}

/// Formats a volatility profile as CSV (`index,volatility`).
pub fn volatility_csv(volatility: &[f64]) -> String {
    let mut out = String::from("index,volatility\n");
    for (i, v) in volatility.iter().enumerate() {
        let _ = writeln!(out, "{i},{v}");
    }
    out
}
