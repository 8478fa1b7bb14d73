// resonator.hpp — S21 resonance model and fitting, photon-number
// calibration, and the power-dependent loss saturation analysis.

#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "acceptorloss/fourlevel.hpp"

namespace acceptorloss {

struct S21Trace {
    std::vector<double> frequencies_hz;           // strictly ascending
    std::vector<std::complex<double>> values;     // complex transmission
    double power_dbm_at_device = std::numeric_limits<double>::quiet_NaN();
};

// Notch (side-coupled) resonance parameters. Parameter order for the
// uncertainty array: a, phi, tau, f0, Q, Qc, df.
struct ResonatorFit {
    double baseline_a = 1.0;      // off-resonance |S21|
    double phase_rad = 0.0;       // phi
    double delay_s = 0.0;         // tau
    double f_start_hz = 0.0;      // first frequency of the fitted trace
    double f0_hz = 0.0;
    double q_loaded = 0.0;        // Q
    double q_coupling = 0.0;      // Qc
    double asymmetry_hz = 0.0;    // df
    double q_internal = 0.0;      // Qi, derived
    std::array<double, 7> stderr_params{};  // 1-sigma, same order as above minus f_start
    double residual_rms = 0.0;    // per complex sample

    // 1/Qi = 1/Q - Re[(1 + 2i df/f0)/Qc]
    double derived_q_internal() const;
};

// S21(f) = a e^{i(phi + 2 pi (f - f_start) tau)}
//          (1 - (Q/Qc)(1 + 2i df/f0) / (1 + 2i Q (f - f0)/f0))
std::complex<double> s21_model(const ResonatorFit& fit, double f_hz);

// Complex least-squares fit of the notch model. Initial guess: baseline
// removal, algebraic circle fit, then damped least-squares refinement.
// Unweighted by default; optional per-point weights multiply the residuals.
// Throws InsufficientSpan when the trace cannot bracket the dip or spans
// fewer than 3 linewidths, FitDiverged when no acceptable optimum is found.
ResonatorFit fit_s21(const S21Trace& trace, const std::optional<ResonatorFit>& guess = {},
                     const std::vector<double>& weights = {});

// <n> = (2 / (hbar w0^2)) (Q^2 / Qe) Pin, w0 = 2 pi f0.
double photon_number(double pin_watts, double f0_hz, double q_loaded, double q_ext);

// Same quantity through the decay-rate form 2 ke Pin / (hbar w0 (ki + ke)^2).
double photon_number_kappa(double pin_watts, double f0_hz, double kappa_i, double kappa_e);

// A(T) = tanh(hbar w / (2 kB T)), w = 2 pi f.
double thermal_factor(double f_hz, double t_kelvin);

struct SaturationFitParams {
    double tan_delta0 = 0.0;   // zero-drive, zero-temperature loss tangent
    double n_c = 1.0;          // critical photon number
    double beta = 1.0;         // geometry-dependent exponent, (0, 2]
    double a_thermal = 1.0;    // thermal factor A(T), (0, 1]
};

// tan(delta)(n) = tan(delta0) A(T) / sqrt(1 + (n/n_c)^beta)
double saturation_model(double n_photons, const SaturationFitParams& p);

struct SaturationPoint {
    double n_photons = 0.0;
    double tan_delta = 0.0;
};

struct SaturationLogLogFit {
    double slope_a = 0.0;            // shared slope (= beta/2)
    double intercept_zero_field = 0.0;
    double intercept_in_field = 0.0;
    double nc_ratio = 0.0;           // n_c(B=0)/n_c(B>0) = 10^{db/a}
    bool regime_warning = false;     // curvature above threshold: n/n_c >> 1 violated
};

// Joint log-log fit with a shared slope across field states,
// log10(tan delta) = -a log10(n) + b_state. Caller asserts n/n_c >> 1.
SaturationLogLogFit fit_saturation_loglog(const std::vector<SaturationPoint>& zero_field,
                                          const std::vector<SaturationPoint>& in_field);

// Two-level thermal inversion: T = h f / (kB ln((1-p)/p)), 0 < p < 0.5.
double temperature_from_excited_population(double f_hz, double p_excited);

// Multi-resonator Qi averages are geometric means (Qi spans decades across
// a chip; the arithmetic mean would be dominated by the best resonator).
double geometric_mean_qi(const std::vector<double>& qi_values);

// Bridge from the four-level steady state to the loss model: the loss
// tangent scales with the normalized population difference
// (rho11 - rho33)/(rho11 - rho33)_0 evaluated at |Omega|^2 = n/photons_per_rabi_sq.
struct SaturationCurveInputs {
    FourLevelParams level_params;   // omega_rabi is overwritten per point
    bool field_on = false;
    double tan_delta0 = 1e-6;
    double a_thermal = 1.0;
    double photons_per_rabi_sq = 1.0;  // n = photons_per_rabi_sq |Omega|^2
};

double predict_tan_delta(const SaturationCurveInputs& inputs, double n_photons);

std::vector<SaturationPoint> predict_saturation_curve(const SaturationCurveInputs& inputs,
                                                      const std::vector<double>& n_photons);

} // namespace acceptorloss
