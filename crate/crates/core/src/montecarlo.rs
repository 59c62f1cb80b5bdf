//! Stochastic oracle for the analytic decoherence engine.
//!
//! Strain realizations are synthesized in the frequency domain: each
//! resolvable bin inside the spectrum band receives an independent complex
//! Gaussian coefficient of variance `S_h[w_k] * dw / (2 pi)` (the two-sided
//! convention), the spectrum is Hermitian-symmetrized and inverse
//! transformed. The resulting series is real, zero-mean, stationary and
//! Gaussian with exactly the target spectral content, and is bit-reproducible
//! given the seed: realization `i` draws from stream `i` of a counter-mode
//! generator, so ensembles are independent of execution order and worker
//! count.
//!
//! Each realization is pushed through the interferometer response at the
//! series midpoint; the ensemble of phases yields the empirical dephasing
//! variance, the empirical fringe contrast `<cos(phase)>`, normality
//! diagnostics, and an averaged-periodogram check of the realized spectrum
//! against the target.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::background::{SpectrumError, StrainSpectrum};
use crate::interferometer::{two_arm_phase, InstrumentConfig, InstrumentError, StrainSeries};
use crate::quantity::{Dim, DimensionError, PhysQuantity};

/// Realizations per work item; fixed so that parallel scheduling cannot
/// change the reduction tree.
const BATCH: usize = 64;

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Instrument(#[from] InstrumentError),
    #[error("need at least 2 realizations, got {0}")]
    TooFewRealizations(usize),
    #[error("{field} must be positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error(
        "sampling cannot cover the spectrum band: resolvable angular frequencies are \
         [{resolution:.6e}, {nyquist:.6e}] /s but the band is [{band_low:.6e}, {band_high:.6e}] /s"
    )]
    NyquistCoverage { resolution: f64, nyquist: f64, band_low: f64, band_high: f64 },
    #[error("simulation step {dt} s exceeds tau_at/100 = {max} s")]
    StepVsArmTime { dt: f64, max: f64 },
    #[error("simulation duration {duration} s shorter than 4 tau_at = {min} s")]
    DurationVsArmTime { duration: f64, min: f64 },
}

/// Seeded synthesis / ensemble parameters.
#[derive(Clone, Debug)]
pub struct SimulationConfig {
    seed: u64,
    n_realizations: usize,
    dt: f64,
    n_samples: usize,
    spectrum: StrainSpectrum,
}

impl SimulationConfig {
    pub fn new(
        seed: u64,
        n_realizations: usize,
        dt: PhysQuantity,
        duration: PhysQuantity,
        spectrum: StrainSpectrum,
    ) -> Result<Self, SimulationError> {
        if n_realizations < 2 {
            return Err(SimulationError::TooFewRealizations(n_realizations));
        }
        let dt = dt.expect_dim(Dim::TIME, "simulation step")?;
        if !(dt > 0.0) {
            return Err(SimulationError::NonPositive { field: "dt", value: dt });
        }
        let duration = duration.expect_dim(Dim::TIME, "simulation duration")?;
        if !(duration > 0.0) {
            return Err(SimulationError::NonPositive { field: "duration", value: duration });
        }
        let n_samples = (duration / dt).round() as usize;
        let resolution = 2.0 * std::f64::consts::PI / (n_samples as f64 * dt);
        let nyquist = std::f64::consts::PI / dt;
        let (band_low, band_high) = spectrum.band_raw();
        if band_low < resolution * (1.0 - 1e-9) || band_high > nyquist * (1.0 + 1e-9) {
            return Err(SimulationError::NyquistCoverage { resolution, nyquist, band_low, band_high });
        }
        Ok(SimulationConfig { seed, n_realizations, dt, n_samples, spectrum })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn n_realizations(&self) -> usize {
        self.n_realizations
    }

    pub fn dt(&self) -> PhysQuantity {
        PhysQuantity::seconds(self.dt)
    }

    pub fn duration(&self) -> PhysQuantity {
        PhysQuantity::seconds(self.n_samples as f64 * self.dt)
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn spectrum(&self) -> &StrainSpectrum {
        &self.spectrum
    }

    fn bin_sigma(&self, k: usize) -> f64 {
        let omega = 2.0 * std::f64::consts::PI * k as f64 / (self.n_samples as f64 * self.dt);
        let (lo, hi) = self.spectrum.band_raw();
        if omega < lo || omega > hi {
            return 0.0;
        }
        let s = self.spectrum.evaluate_raw(omega).expect("in-band bin");
        (s / (self.n_samples as f64 * self.dt)).sqrt()
    }
}

/// One strain realization for the given stream index.
pub fn synthesize_realization(sim: &SimulationConfig, realization: u64) -> StrainSeries {
    let n = sim.n_samples;
    let mut rng = ChaCha8Rng::seed_from_u64(sim.seed);
    rng.set_stream(realization);

    let mut buf = vec![Complex::new(0.0, 0.0); n];
    let half = n / 2;
    for k in 1..=half {
        let sigma = sim.bin_sigma(k);
        if sigma == 0.0 {
            continue;
        }
        if 2 * k == n {
            // Nyquist bin is its own mirror and must stay real.
            let x: f64 = StandardNormal.sample(&mut rng);
            buf[k] = Complex::new(x * sigma, 0.0);
        } else {
            let x: f64 = StandardNormal.sample(&mut rng);
            let y: f64 = StandardNormal.sample(&mut rng);
            let c = Complex::new(x, y) * (sigma / 2f64.sqrt());
            buf[k] = c;
            buf[n - k] = c.conj();
        }
    }

    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let samples = buf.into_iter().map(|c| c.re).collect();
    StrainSeries::new(0.0, sim.dt, samples).expect("n >= 2 by construction")
}

/// Synthesizes the stream-0 realization.
pub fn synthesize_strain(sim: &SimulationConfig) -> StrainSeries {
    synthesize_realization(sim, 0)
}

/// Ensemble statistics of the dephasing phase.
#[derive(Clone, Debug)]
pub struct EnsembleResult {
    /// Sample variance of the per-realization phases.
    pub empirical_variance: f64,
    /// Mean of cos(phase): the real part of the empirical fringe factor.
    pub empirical_contrast: f64,
    /// Standard error of the variance estimate, variance * sqrt(2/(n-1)).
    pub standard_error: f64,
    /// Standard error of the contrast estimate.
    pub contrast_standard_error: f64,
    /// Largest relative deviation of the realization-averaged periodogram
    /// from the target spectrum over band-interior bins.
    pub realized_psd_check: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub n_realizations: usize,
    /// Per-realization phases in realization order.
    pub phases: Vec<f64>,
}

struct BatchPartial {
    sum: f64,
    sum2: f64,
    sum3: f64,
    sum4: f64,
    sum_cos: f64,
    sum_cos2: f64,
    periodogram: Vec<f64>,
    phases: Vec<f64>,
}

/// Runs the ensemble: synthesize, filter, differentiate, collect statistics.
///
/// Realizations are processed in fixed batches of [`BATCH`] and folded in
/// batch order, so the result is identical for every worker count.
pub fn ensemble_dephasing(
    cfg: &InstrumentConfig,
    sim: &SimulationConfig,
) -> Result<EnsembleResult, SimulationError> {
    let tau = cfg.arm_time().value();
    if sim.dt > tau / 100.0 * (1.0 + 1e-12) {
        return Err(SimulationError::StepVsArmTime { dt: sim.dt, max: tau / 100.0 });
    }
    let duration = sim.n_samples as f64 * sim.dt;
    if duration < 4.0 * tau * (1.0 - 1e-12) {
        return Err(SimulationError::DurationVsArmTime { duration, min: 4.0 * tau });
    }

    let n = sim.n_samples;
    let half = n / 2;
    let forward = FftPlanner::new().plan_fft_forward(n);
    let n_real = sim.n_realizations;
    let n_batches = n_real.div_ceil(BATCH);

    let partials: Result<Vec<BatchPartial>, SimulationError> = (0..n_batches)
        .into_par_iter()
        .map(|batch| {
            let start = batch * BATCH;
            let end = ((batch + 1) * BATCH).min(n_real);
            let mut part = BatchPartial {
                sum: 0.0,
                sum2: 0.0,
                sum3: 0.0,
                sum4: 0.0,
                sum_cos: 0.0,
                sum_cos2: 0.0,
                periodogram: vec![0.0; half + 1],
                phases: Vec::with_capacity(end - start),
            };
            let mut spectrum_buf = vec![Complex::new(0.0, 0.0); n];
            for r in start..end {
                let series = synthesize_realization(sim, r as u64);
                let phi = two_arm_phase(cfg, &series)?;

                for (slot, &s) in spectrum_buf.iter_mut().zip(series.samples()) {
                    *slot = Complex::new(s, 0.0);
                }
                forward.process(&mut spectrum_buf);
                let norm = sim.dt / n as f64;
                for k in 0..=half {
                    part.periodogram[k] += spectrum_buf[k].norm_sqr() * norm;
                }

                part.sum += phi;
                part.sum2 += phi * phi;
                part.sum3 += phi * phi * phi;
                part.sum4 += phi * phi * phi * phi;
                let c = phi.cos();
                part.sum_cos += c;
                part.sum_cos2 += c * c;
                part.phases.push(phi);
            }
            Ok(part)
        })
        .collect();
    let partials = partials?;

    let mut sum = 0.0;
    let mut sum2 = 0.0;
    let mut sum3 = 0.0;
    let mut sum4 = 0.0;
    let mut sum_cos = 0.0;
    let mut sum_cos2 = 0.0;
    let mut periodogram = vec![0.0; half + 1];
    let mut phases = Vec::with_capacity(n_real);
    for part in partials {
        sum += part.sum;
        sum2 += part.sum2;
        sum3 += part.sum3;
        sum4 += part.sum4;
        sum_cos += part.sum_cos;
        sum_cos2 += part.sum_cos2;
        for (acc, p) in periodogram.iter_mut().zip(&part.periodogram) {
            *acc += p;
        }
        phases.extend_from_slice(&part.phases);
    }

    let nf = n_real as f64;
    let mean = sum / nf;
    let m2 = (sum2 / nf - mean * mean).max(0.0);
    let m3 = sum3 / nf - 3.0 * mean * sum2 / nf + 2.0 * mean.powi(3);
    let m4 = sum4 / nf - 4.0 * mean * sum3 / nf + 6.0 * mean * mean * sum2 / nf - 3.0 * mean.powi(4);
    let empirical_variance = m2 * nf / (nf - 1.0);
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };

    let empirical_contrast = sum_cos / nf;
    let cos_var = (sum_cos2 / nf - empirical_contrast * empirical_contrast).max(0.0);
    let contrast_standard_error = (cos_var / nf).sqrt();
    let standard_error = empirical_variance * (2.0 / (nf - 1.0)).sqrt();

    // Averaged periodogram against the target, strictly inside the band.
    let d_omega = 2.0 * std::f64::consts::PI / (n as f64 * sim.dt);
    let (band_low, band_high) = sim.spectrum.band_raw();
    let mut realized_psd_check = 0.0f64;
    for (k, acc) in periodogram.iter().enumerate().take(half + 1).skip(1) {
        let omega = k as f64 * d_omega;
        if omega < band_low + d_omega || omega > band_high - d_omega {
            continue;
        }
        let target = sim.spectrum.evaluate_raw(omega).expect("interior bin");
        if target > 0.0 {
            realized_psd_check = realized_psd_check.max((acc / nf / target - 1.0).abs());
        }
    }

    Ok(EnsembleResult {
        empirical_variance,
        empirical_contrast,
        standard_error,
        contrast_standard_error,
        realized_psd_check,
        skewness,
        excess_kurtosis,
        n_realizations: n_real,
        phases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dephasing::variance_white_atomic;
    use crate::quad::adaptive_gk15;

    const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn instrument() -> InstrumentConfig {
        InstrumentConfig::new(
            PhysQuantity::kilograms(2.207e-25),
            PhysQuantity::meters_per_second(0.2),
            PhysQuantity::seconds(1.0),
            0.043,
            PhysQuantity::per_second(TWO_PI * 3.52e14),
            PhysQuantity::meters(1.0),
        )
        .unwrap()
    }

    fn white_band(level: f64, f_low: f64, f_high: f64) -> StrainSpectrum {
        StrainSpectrum::white(
            PhysQuantity::per_hertz(level),
            PhysQuantity::per_second(TWO_PI * f_low),
            PhysQuantity::per_second(TWO_PI * f_high),
        )
        .unwrap()
    }

    fn sim(seed: u64, n: usize, level: f64) -> SimulationConfig {
        SimulationConfig::new(
            seed,
            n,
            PhysQuantity::seconds(0.005),
            PhysQuantity::seconds(64.0),
            white_band(level, 0.02, 45.0),
        )
        .unwrap()
    }

    #[test]
    fn config_rejects_uncovered_bands() {
        // Band reaches below the frequency resolution.
        let err = SimulationConfig::new(
            1,
            10,
            PhysQuantity::seconds(0.005),
            PhysQuantity::seconds(64.0),
            white_band(1e-34, 1e-6, 1.0),
        )
        .unwrap_err();
        assert!(matches!(err, SimulationError::NyquistCoverage { .. }));
        // Band reaches above Nyquist.
        let err = SimulationConfig::new(
            1,
            10,
            PhysQuantity::seconds(0.005),
            PhysQuantity::seconds(64.0),
            white_band(1e-34, 0.02, 500.0),
        )
        .unwrap_err();
        assert!(matches!(err, SimulationError::NyquistCoverage { .. }));
        assert!(matches!(
            SimulationConfig::new(
                1,
                1,
                PhysQuantity::seconds(0.005),
                PhysQuantity::seconds(64.0),
                white_band(1e-34, 0.02, 45.0)
            ),
            Err(SimulationError::TooFewRealizations(1))
        ));
    }

    #[test]
    fn zero_spectrum_synthesizes_zero_series() {
        let cfg = instrument();
        let s = SimulationConfig::new(
            7,
            100,
            PhysQuantity::seconds(0.005),
            PhysQuantity::seconds(64.0),
            white_band(0.0, 0.02, 45.0),
        )
        .unwrap();
        let series = synthesize_strain(&s);
        assert!(series.samples().iter().all(|&x| x == 0.0));
        let out = ensemble_dephasing(&cfg, &s).unwrap();
        assert_eq!(out.empirical_variance, 0.0);
        assert_eq!(out.empirical_contrast, 1.0);
        assert_eq!(out.standard_error, 0.0);
    }

    #[test]
    fn synthesis_is_deterministic_for_fixed_seed() {
        let s = sim(42, 10, 1e-34);
        let a = synthesize_strain(&s);
        let b = synthesize_strain(&s);
        assert_eq!(a.samples(), b.samples());
        // Different streams decorrelate.
        let c = synthesize_realization(&s, 1);
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn lag_zero_autocovariance_matches_band_integral() {
        // Mean over realizations of the time-averaged h^2 against the
        // two-sided band integral of the spectrum, within 3 standard errors.
        let s = sim(11, 1000, 1e-34);
        let (lo, hi) = s.spectrum().band_raw();
        let target = 2.0
            * adaptive_gk15(&|w: f64| s.spectrum().evaluate_raw(w).unwrap(), lo, hi, 1e-50, 20).value
            / TWO_PI;
        let mut means = Vec::new();
        for r in 0..1000u64 {
            let series = synthesize_realization(&s, r);
            let m: f64 =
                series.samples().iter().map(|&x| x * x).sum::<f64>() / series.len() as f64;
            means.push(m);
        }
        let n = means.len() as f64;
        let mean = means.iter().sum::<f64>() / n;
        let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        assert!(
            (mean - target).abs() < 3.0 * se,
            "autocovariance {mean} vs {target} (se {se})"
        );
    }

    #[test]
    fn ensemble_variance_tracks_closed_form() {
        let cfg = instrument();
        let s = sim(2026, 2000, 1e-34);
        let out = ensemble_dephasing(&cfg, &s).unwrap();
        let closed = variance_white_atomic(&cfg, PhysQuantity::per_hertz(1e-34)).unwrap();
        let z = (out.empirical_variance - closed).abs() / out.standard_error;
        assert!(z < 3.0, "z = {z}, {} vs {closed}", out.empirical_variance);
        assert!(out.realized_psd_check < 0.10, "psd dev {}", out.realized_psd_check);
        // Contrast is indistinguishable from 1 at this noise level.
        assert!((out.empirical_contrast - 1.0).abs() <= 3.0 * out.contrast_standard_error + 1e-15);
    }

    #[test]
    fn contrast_and_normality_at_unit_variance() {
        // Amplified level so the variance is order one and the Gaussian
        // contrast formula is actually exercised.
        let cfg = instrument();
        let s = sim(77, 4000, 9.65e-15);
        let out = ensemble_dephasing(&cfg, &s).unwrap();
        let predicted = (-0.5 * out.empirical_variance).exp();
        let z = (out.empirical_contrast - predicted).abs() / out.contrast_standard_error;
        assert!(z < 3.0, "contrast z = {z}");
        let n = out.n_realizations as f64;
        assert!(out.skewness.abs() < 3.0 * (6.0 / n).sqrt(), "skew {}", out.skewness);
        assert!(out.excess_kurtosis.abs() < 3.0 * (24.0 / n).sqrt(), "kurt {}", out.excess_kurtosis);
    }

    #[test]
    fn standard_error_shrinks_with_sqrt_n() {
        let cfg = instrument();
        let a = ensemble_dephasing(&cfg, &sim(5, 1000, 1e-34)).unwrap();
        let b = ensemble_dephasing(&cfg, &sim(5, 2000, 1e-34)).unwrap();
        let ratio = b.standard_error / a.standard_error;
        let expected = 0.5f64.sqrt();
        assert!(
            ratio > expected * 0.8 && ratio < expected * 1.2,
            "se ratio {ratio} vs {expected}"
        );
    }

    #[test]
    fn ensemble_independent_of_worker_count() {
        let cfg = instrument();
        let s = sim(99, 300, 1e-34);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| ensemble_dephasing(&cfg, &s).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| ensemble_dephasing(&cfg, &s).unwrap());
        assert_eq!(single.phases, multi.phases);
        assert_eq!(single.empirical_variance.to_bits(), multi.empirical_variance.to_bits());
        assert_eq!(single.empirical_contrast.to_bits(), multi.empirical_contrast.to_bits());
        assert_eq!(single.realized_psd_check.to_bits(), multi.realized_psd_check.to_bits());
    }

    #[test]
    fn ensemble_checks_instrument_pairing() {
        let cfg = instrument();
        // dt too coarse relative to the arm time.
        let coarse = SimulationConfig::new(
            1,
            10,
            PhysQuantity::seconds(0.02),
            PhysQuantity::seconds(64.0),
            white_band(1e-34, 0.02, 20.0),
        )
        .unwrap();
        assert!(matches!(
            ensemble_dephasing(&cfg, &coarse),
            Err(SimulationError::StepVsArmTime { .. })
        ));
        // Duration shorter than four arm times.
        let short = SimulationConfig::new(
            1,
            10,
            PhysQuantity::seconds(0.005),
            PhysQuantity::seconds(2.0),
            white_band(1e-34, 0.5, 45.0),
        )
        .unwrap();
        assert!(matches!(
            ensemble_dephasing(&cfg, &short),
            Err(SimulationError::DurationVsArmTime { .. })
        ));
    }
}
