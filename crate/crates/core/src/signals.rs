//! Time histories and their frequency-domain feature representations.
//!
//! Two feature kinds feed the networks: log Fourier-amplitude spectral
//! ratios (frame benchmark, 5x512) and real/imaginary frequency response
//! functions (lumped benchmark, 6x512). Both live on a fixed 512-bin grid
//! carried alongside the data.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const FEATURE_BINS: usize = 512;

/// Uniformly sampled signal (ground acceleration, response acceleration,
/// or dynamic strain).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    pub dt: T,
    pub values: Vec<T>,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(dt: T, values: Vec<T>) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::validation("time step must be positive"));
        }
        if values.is_empty() {
            return Err(Error::validation("time series must be nonempty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("time series contains non-finite samples"));
        }
        Ok(TimeSeries { dt, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn duration(&self) -> T {
        self.dt * T::of(self.values.len() as f64)
    }

    pub fn rms(&self) -> T {
        let n = T::of(self.values.len() as f64);
        let ss: T = self.values.iter().map(|&v| v * v).sum();
        (ss / n).sqrt()
    }
}

/// Frequency grid of a feature matrix: `n_bins` bins at `f_start + k*df`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FeatureGrid {
    pub f_start: f64,
    pub df: f64,
    pub n_bins: usize,
}

impl FeatureGrid {
    pub fn frequency(&self, bin: usize) -> f64 {
        self.f_start + self.df * bin as f64
    }

    pub fn f_end(&self) -> f64 {
        self.frequency(self.n_bins - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    LogAmplitudeRatio,
    FrfRealImag,
}

/// channels x 512 feature matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T> {
    pub channels: usize,
    pub grid: FeatureGrid,
    pub kind: FeatureKind,
    data: Vec<T>,
}

impl<T: Real> FeatureMatrix<T> {
    pub fn new(channels: usize, grid: FeatureGrid, kind: FeatureKind, data: Vec<T>) -> Result<Self> {
        if grid.n_bins != FEATURE_BINS {
            return Err(Error::validation(format!(
                "feature grid must have {} bins, got {}",
                FEATURE_BINS, grid.n_bins
            )));
        }
        if data.len() != channels * grid.n_bins {
            return Err(Error::validation("feature data length does not match channels x bins"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::numerical("feature matrix contains non-finite entries"));
        }
        Ok(FeatureMatrix { channels, grid, kind, data })
    }

    pub fn row(&self, channel: usize) -> &[T] {
        &self.data[channel * self.grid.n_bins..(channel + 1) * self.grid.n_bins]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }
}

/// Observation-noise description. `snr_db` is an amplitude (RMS) ratio:
/// 40 dB means noise RMS = signal RMS / 100. An infinite SNR leaves the
/// series untouched.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum NoiseSpec {
    SnrDb { snr_db: f64, seed: u64 },
    Sigma { sigma: f64, seed: u64 },
}

impl NoiseSpec {
    pub fn seed(&self) -> u64 {
        match self {
            NoiseSpec::SnrDb { seed, .. } | NoiseSpec::Sigma { seed, .. } => *seed,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            NoiseSpec::SnrDb { snr_db, .. } => NoiseSpec::SnrDb { snr_db, seed },
            NoiseSpec::Sigma { sigma, .. } => NoiseSpec::Sigma { sigma, seed },
        }
    }

    pub fn none() -> Self {
        NoiseSpec::SnrDb { snr_db: f64::INFINITY, seed: 0 }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, NoiseSpec::SnrDb { snr_db, .. } if snr_db.is_infinite())
    }
}

/// Adds independent Gaussian noise per the spec; deterministic given the seed.
pub fn add_noise<T: Real>(ts: &TimeSeries<T>, spec: &NoiseSpec) -> TimeSeries<T> {
    let sigma = match *spec {
        NoiseSpec::SnrDb { snr_db, .. } => {
            if snr_db.is_infinite() {
                return ts.clone();
            }
            ts.rms().to_f64_lossy() / 10f64.powf(snr_db / 20.0)
        }
        NoiseSpec::Sigma { sigma, .. } => sigma,
    };
    if sigma == 0.0 {
        return ts.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed());
    let normal = rand_distr::Normal::new(0.0f64, sigma).expect("valid sigma");
    let values = ts
        .values
        .iter()
        .map(|&v| v + T::of(normal.sample(&mut rng)))
        .collect();
    TimeSeries { dt: ts.dt, values }
}

/// Forward DFT of a real series, zero-padded to `n_fft`.
pub fn fft_forward<T: Real>(values: &[T], n_fft: usize) -> Vec<Complex<T>> {
    assert!(n_fft >= values.len());
    let mut buf: Vec<Complex<T>> = values
        .iter()
        .map(|&v| Complex::new(v, T::zero()))
        .chain(std::iter::repeat(Complex::new(T::zero(), T::zero())))
        .take(n_fft)
        .collect();
    FftPlanner::new().plan_fft_forward(n_fft).process(&mut buf);
    buf
}

/// Inverse DFT with 1/N normalization, so `fft_inverse(fft_forward(x, n), n)`
/// reproduces `x`.
pub fn fft_inverse<T: Real>(spectrum: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = spectrum.len();
    let mut buf = spectrum.to_vec();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = T::one() / T::of(n as f64);
    for v in &mut buf {
        *v = Complex::new(v.re * scale, v.im * scale);
    }
    buf
}

fn next_power_of_two(n: usize) -> usize {
    n.next_power_of_two()
}

fn check_common_sampling<T: Real>(series: &[&TimeSeries<T>]) -> Result<()> {
    let first = series[0];
    for s in series {
        if s.dt != first.dt {
            return Err(Error::validation("all series must share the sampling interval"));
        }
        if s.len() != first.len() {
            return Err(Error::validation("all series must share the sample count"));
        }
    }
    Ok(())
}

/// Magnitude floor applied to input-spectrum bins before division:
/// bins below `1e-12 * max|bin|` are raised to that value (phase kept).
const INPUT_FLOOR_REL: f64 = 1e-12;

fn floored<T: Real>(v: Complex<T>, floor: T) -> Complex<T> {
    let mag = v.norm();
    if mag >= floor {
        v
    } else if mag == T::zero() {
        Complex::new(floor, T::zero())
    } else {
        let s = floor / mag;
        Complex::new(v.re * s, v.im * s)
    }
}

/// Log Fourier-amplitude spectral-ratio features (frame benchmark).
///
/// Per channel, natural log of |FFT(response)| / |FFT(input)| on 512
/// consecutive DFT bins starting at the first bin >= 0.12 Hz. Records are
/// zero-padded to a power of two; for 2048-sample records at 50 Hz this
/// yields df = 1/40.96 Hz and bins 5..=516 (0.12207 to 12.5977 Hz).
pub fn log_spectral_ratio_features<T: Real>(
    responses: &[TimeSeries<T>],
    input: &TimeSeries<T>,
) -> Result<FeatureMatrix<T>> {
    let mut all: Vec<&TimeSeries<T>> = responses.iter().collect();
    all.push(input);
    check_common_sampling(&all)?;

    let n_fft = next_power_of_two(input.len());
    let dt = input.dt.to_f64_lossy();
    let df = 1.0 / (n_fft as f64 * dt);
    let k0 = (0.12 / df - 1e-9).ceil() as usize;
    if k0 + FEATURE_BINS > n_fft / 2 {
        return Err(Error::validation(format!(
            "record too short: {} feature bins from {:.5} Hz exceed the Nyquist range",
            FEATURE_BINS,
            k0 as f64 * df
        )));
    }
    let grid = FeatureGrid { f_start: k0 as f64 * df, df, n_bins: FEATURE_BINS };

    let input_spec = fft_forward(&input.values, n_fft);
    let max_mag = input_spec[k0..k0 + FEATURE_BINS]
        .iter()
        .map(|c| c.norm())
        .fold(T::zero(), T::max);
    let floor = max_mag * T::of(INPUT_FLOOR_REL);

    let mut data = Vec::with_capacity(responses.len() * FEATURE_BINS);
    for resp in responses {
        let spec = fft_forward(&resp.values, n_fft);
        for k in k0..k0 + FEATURE_BINS {
            let denom = floored(input_spec[k], floor).norm();
            data.push((spec[k].norm() / denom).ln());
        }
    }
    FeatureMatrix::new(responses.len(), grid, FeatureKind::LogAmplitudeRatio, data)
}

/// Lumped-model FRF grid: 512 bins of 0.01 Hz starting at 0.10 Hz.
pub const FRF_GRID: FeatureGrid = FeatureGrid { f_start: 0.10, df: 0.01, n_bins: FEATURE_BINS };

/// Spectrum of a real series evaluated at one frequency.
///
/// Uses the exact DFT bin when `f` lands on the record's natural grid
/// (e.g. 10000 samples at 100 Hz give df = 0.01 Hz exactly), otherwise a
/// direct evaluation of the DFT sum at `f`. Either way the value is the
/// DFT of the record at that frequency, not an interpolation.
fn spectrum_at<T: Real>(values: &[T], dt: T, f: f64, cached_fft: &[Complex<T>]) -> Complex<T> {
    let n = values.len();
    let df = 1.0 / (n as f64 * dt.to_f64_lossy());
    let ratio = f / df;
    let k = ratio.round();
    if (ratio - k).abs() < 1e-9 && (k as usize) < n {
        return cached_fft[k as usize];
    }
    // direct DFT sum at an off-grid frequency
    let w = -2.0 * std::f64::consts::PI * f * dt.to_f64_lossy();
    let (mut re, mut im) = (T::zero(), T::zero());
    for (j, &x) in values.iter().enumerate() {
        let ang = w * j as f64;
        re += x * T::of(ang.cos());
        im += x * T::of(ang.sin());
    }
    Complex::new(re, im)
}

/// Frequency-response-function features (lumped benchmark).
///
/// Per floor, the complex ratio FFT(response)/FFT(input) on the 0.10 to
/// 5.21 Hz grid; rows are emitted as (real, imaginary) per floor, giving
/// 2 x floors x 512.
pub fn frf_features<T: Real>(
    responses: &[TimeSeries<T>],
    input: &TimeSeries<T>,
) -> Result<FeatureMatrix<T>> {
    let mut all: Vec<&TimeSeries<T>> = responses.iter().collect();
    all.push(input);
    check_common_sampling(&all)?;

    let n = input.len();
    let nyquist = 0.5 / input.dt.to_f64_lossy();
    if FRF_GRID.f_end() >= nyquist {
        return Err(Error::validation("FRF grid exceeds the Nyquist frequency"));
    }

    let input_fft = fft_forward(&input.values, n);
    let input_bins: Vec<Complex<T>> = (0..FEATURE_BINS)
        .map(|k| spectrum_at(&input.values, input.dt, FRF_GRID.frequency(k), &input_fft))
        .collect();
    let max_mag = input_bins.iter().map(|c| c.norm()).fold(T::zero(), T::max);
    let floor = max_mag * T::of(INPUT_FLOOR_REL);

    let mut data = vec![T::zero(); responses.len() * 2 * FEATURE_BINS];
    for (i, resp) in responses.iter().enumerate() {
        let resp_fft = fft_forward(&resp.values, n);
        for k in 0..FEATURE_BINS {
            let num = spectrum_at(&resp.values, resp.dt, FRF_GRID.frequency(k), &resp_fft);
            let ratio = num / floored(input_bins[k], floor);
            data[(2 * i) * FEATURE_BINS + k] = ratio.re;
            data[(2 * i + 1) * FEATURE_BINS + k] = ratio.im;
        }
    }
    FeatureMatrix::new(responses.len() * 2, FRF_GRID, FeatureKind::FrfRealImag, data)
}

/// Seeded broadband ground motion for out-of-the-box runs and tests:
/// band-limited Gaussian noise with a rise/hold/decay envelope, scaled to
/// the requested peak.
pub fn synthetic_broadband<T: Real>(
    seed: u64,
    dt: T,
    samples: usize,
    f_lo: f64,
    f_hi: f64,
    peak: T,
) -> TimeSeries<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let n_fft = next_power_of_two(samples.max(2));
    let noise: Vec<T> = (0..n_fft).map(|_| T::standard_normal(&mut rng)).collect();
    let mut spec = fft_forward(&noise, n_fft);
    let df = 1.0 / (n_fft as f64 * dt.to_f64_lossy());
    for k in 0..n_fft {
        // symmetric band mask keeps the series real after the inverse transform
        let f = if k <= n_fft / 2 { k as f64 * df } else { (n_fft - k) as f64 * df };
        if f < f_lo || f > f_hi {
            spec[k] = Complex::new(T::zero(), T::zero());
        }
    }
    let band = fft_inverse(&spec);
    let mut values: Vec<T> = band[..samples].iter().map(|c| c.re).collect();
    let n = samples as f64;
    for (i, v) in values.iter_mut().enumerate() {
        let t = i as f64 / n;
        let env = if t < 0.1 {
            t / 0.1
        } else if t < 0.6 {
            1.0
        } else {
            (-(t - 0.6) * 5.0).exp()
        };
        *v = *v * T::of(env);
    }
    let max = values.iter().map(|v| v.abs()).fold(T::zero(), T::max);
    if max > T::zero() {
        let s = peak / max;
        for v in &mut values {
            *v *= s;
        }
    }
    TimeSeries { dt, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn series(dt: f64, values: Vec<f64>) -> TimeSeries<f64> {
        TimeSeries::new(dt, values).unwrap()
    }

    #[test]
    fn identical_response_gives_zero_log_ratio_row() {
        let input = synthetic_broadband(1, 0.02f64, 2048, 0.05, 20.0, 1.0);
        let m = log_spectral_ratio_features(&[input.clone()], &input).unwrap();
        for &v in m.row(0) {
            assert!(v.abs() < 1e-9, "log ratio {v} not ~0");
        }
    }

    #[test]
    fn frame_grid_matches_expected_bins() {
        let input = synthetic_broadband(2, 0.02f64, 2048, 0.05, 20.0, 1.0);
        let m = log_spectral_ratio_features(&[input.clone()], &input).unwrap();
        assert_relative_eq!(m.grid.df, 1.0 / 40.96, max_relative = 1e-12);
        assert_relative_eq!(m.grid.f_start, 0.1220703125, max_relative = 1e-12);
        assert_relative_eq!(m.grid.f_end(), 12.59765625, max_relative = 1e-12);
        assert_eq!(m.grid.n_bins, 512);
    }

    #[test]
    fn sdof_log_ratio_matches_analytic_transfer_function() {
        // linear SDOF under broadband input: the feature approximates
        // ln|H(f)| of the absolute-acceleration transfer function
        let (f0, zeta) = (3.0f64, 0.05f64);
        let w0 = 2.0 * std::f64::consts::PI * f0;
        let dt = 0.02f64;
        let n = 2048usize;
        let input = synthetic_broadband(3, dt, n, 0.05, 22.0, 1.0);
        // frequency-domain simulation on the padded grid (exact for the
        // sampled spectrum), then back to time domain
        let n_fft = 2048;
        let spec_in = fft_forward(&input.values, n_fft);
        let df = 1.0 / (n_fft as f64 * dt);
        let mut spec_out = spec_in.clone();
        for k in 0..n_fft {
            let f = if k <= n_fft / 2 { k as f64 * df } else { -((n_fft - k) as f64) * df };
            let w = 2.0 * std::f64::consts::PI * f;
            // relative-displacement FRF to ground acceleration
            let denom = Complex::new(w0 * w0 - w * w, 2.0 * zeta * w0 * w);
            let h_rel = Complex::new(-1.0, 0.0) / denom;
            // absolute acceleration = (-w^2) * rel + ground
            let h_abs = Complex::new(-w * w, 0.0) * h_rel + Complex::new(1.0, 0.0);
            spec_out[k] *= h_abs;
        }
        let resp_vals: Vec<f64> = fft_inverse(&spec_out).iter().map(|c| c.re).collect();
        let resp = series(dt, resp_vals);
        let m = log_spectral_ratio_features(&[resp], &input).unwrap();
        // check near the resonance bin
        let kres = ((f0 - m.grid.f_start) / m.grid.df).round() as usize;
        let f = m.grid.frequency(kres);
        let w = 2.0 * std::f64::consts::PI * f;
        let denom = Complex::new(w0 * w0 - w * w, 2.0 * zeta * w0 * w);
        let h_abs = Complex::new(-w * w, 0.0) * (Complex::new(-1.0, 0.0) / denom) + Complex::new(1.0, 0.0);
        let expected = h_abs.norm().ln();
        assert!((m.row(0)[kres] - expected).abs() < 0.05);
    }

    #[test]
    fn frf_identity_is_one_plus_zero_i() {
        let input = synthetic_broadband(4, 0.01f64, 10_000, 0.05, 10.0, 1.0);
        let m = frf_features(&[input.clone()], &input).unwrap();
        for k in 0..FEATURE_BINS {
            assert!((m.row(0)[k] - 1.0).abs() < 1e-9);
            assert!(m.row(1)[k].abs() < 1e-9);
        }
    }

    #[test]
    fn frf_grid_spans_010_to_521() {
        assert_relative_eq!(FRF_GRID.f_start, 0.10);
        assert_relative_eq!(FRF_GRID.f_end(), 5.21, max_relative = 1e-12);
        assert_eq!(FRF_GRID.n_bins, 512);
    }

    #[test]
    fn frf_bins_match_naive_dft() {
        let dt = 0.01f64;
        let input = synthetic_broadband(5, dt, 10_000, 0.05, 10.0, 1.0);
        let resp = synthetic_broadband(6, dt, 10_000, 0.05, 10.0, 0.7);
        let m = frf_features(&[resp.clone()], &input).unwrap();
        // naive DFT oracle at a handful of bins
        let naive = |x: &[f64], f: f64| {
            let mut acc = Complex::new(0.0, 0.0);
            for (j, &v) in x.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * f * dt * j as f64;
                acc += Complex::new(v * ang.cos(), v * ang.sin());
            }
            acc
        };
        for &k in &[0usize, 17, 93, 200, 311, 400, 499, 511] {
            let f = m.grid.frequency(k);
            let expect = naive(&resp.values, f) / naive(&input.values, f);
            let got = Complex::new(m.row(0)[k], m.row(1)[k]);
            assert!((got - expect).norm() <= 1e-8 * expect.norm().max(1e-30),
                "bin {k}: {got} vs {expect}");
        }
    }

    #[test]
    fn infinite_snr_is_identity() {
        let ts = series(0.01, vec![1.0, -2.0, 3.0]);
        let out = add_noise(&ts, &NoiseSpec::none());
        assert_eq!(out, ts);
    }

    #[test]
    fn snr_40db_noise_std_is_rms_over_100() {
        let ts = synthetic_broadband(7, 0.01f64, 50_000, 0.05, 10.0, 1.0);
        let spec = NoiseSpec::SnrDb { snr_db: 40.0, seed: 11 };
        let out = add_noise(&ts, &spec);
        let diffs: Vec<f64> = out.values.iter().zip(&ts.values).map(|(a, b)| a - b).collect();
        let std = (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt();
        let target = ts.rms() / 100.0;
        assert!((std / target - 1.0).abs() < 0.05, "std {std} vs {target}");
    }

    #[test]
    fn sigma_mode_noise_std_within_5_percent() {
        let ts = series(0.01, vec![0.0; 10_000]);
        let spec = NoiseSpec::Sigma { sigma: 0.001, seed: 5 };
        let out = add_noise(&ts, &spec);
        let std = (out.values.iter().map(|v| v * v).sum::<f64>() / out.values.len() as f64).sqrt();
        assert!((std / 0.001 - 1.0).abs() < 0.05);
    }

    #[test]
    fn noise_is_deterministic_given_seed() {
        let ts = synthetic_broadband(8, 0.01f64, 1000, 0.1, 10.0, 1.0);
        let spec = NoiseSpec::SnrDb { snr_db: 40.0, seed: 99 };
        assert_eq!(add_noise(&ts, &spec), add_noise(&ts, &spec));
    }

    #[test]
    fn ratio_features_invariant_to_common_scale() {
        let input = synthetic_broadband(9, 0.02f64, 2048, 0.05, 20.0, 1.0);
        let resp = synthetic_broadband(10, 0.02f64, 2048, 0.05, 20.0, 0.5);
        let scale = 3.7;
        let scaled = |ts: &TimeSeries<f64>| TimeSeries {
            dt: ts.dt,
            values: ts.values.iter().map(|v| v * scale).collect(),
        };
        let a = log_spectral_ratio_features(&[resp.clone()], &input).unwrap();
        let b = log_spectral_ratio_features(&[scaled(&resp)], &scaled(&input)).unwrap();
        for (x, y) in a.data().iter().zip(b.data()) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn fft_round_trip(vals in proptest::collection::vec(-1e3f64..1e3, 64..=64)) {
            let spec = fft_forward(&vals, 64);
            let back = fft_inverse(&spec);
            for (a, b) in vals.iter().zip(&back) {
                prop_assert!((a - b.re).abs() < 1e-10 * a.abs().max(1.0));
                prop_assert!(b.im.abs() < 1e-10);
            }
        }

        #[test]
        fn parseval_holds(vals in proptest::collection::vec(-1e3f64..1e3, 128..=128)) {
            let spec = fft_forward(&vals, 128);
            let time_energy: f64 = vals.iter().map(|v| v * v).sum();
            let freq_energy: f64 = spec.iter().map(|c| c.norm_sqr()).sum::<f64>() / 128.0;
            prop_assert!((time_energy - freq_energy).abs() <= 1e-9 * time_energy.max(1.0));
        }
    }
}
