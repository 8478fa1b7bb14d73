#include "acceptorloss/resonator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "acceptorloss/constants.hpp"
#include "acceptorloss/errors.hpp"
#include "acceptorloss/levmar.hpp"

namespace acceptorloss {

namespace {

using Cplx = std::complex<double>;
constexpr double two_pi = 2.0 * std::numbers::pi;

void validate_trace(const S21Trace& trace) {
    if (trace.frequencies_hz.size() != trace.values.size())
        throw std::invalid_argument("s21 trace: frequency/value size mismatch");
    if (trace.frequencies_hz.size() < 8)
        throw InsufficientSpan("s21 trace: need at least 8 samples to fit");
    for (std::size_t k = 1; k < trace.frequencies_hz.size(); ++k)
        if (!(trace.frequencies_hz[k] > trace.frequencies_hz[k - 1]))
            throw NonMonotonicFrequency("s21 trace: frequencies must be strictly ascending");
}

std::vector<double> unwrapped_phase(const std::vector<Cplx>& values) {
    std::vector<double> phase(values.size());
    double offset = 0.0;
    double prev = std::arg(values.front());
    phase[0] = prev;
    for (std::size_t k = 1; k < values.size(); ++k) {
        double cur = std::arg(values[k]);
        double d = cur - prev;
        while (d > std::numbers::pi) { d -= two_pi; offset -= two_pi; }
        while (d < -std::numbers::pi) { d += two_pi; offset += two_pi; }
        phase[k] = cur + offset;
        prev = cur;
    }
    return phase;
}

// Least-squares circle through points (x, y): returns center and radius.
struct Circle {
    Cplx center;
    double radius;
};

Circle kasa_circle_fit(const std::vector<Cplx>& pts) {
    // x^2 + y^2 = 2 cx x + 2 cy y + (r^2 - cx^2 - cy^2)
    Eigen::MatrixXd a(pts.size(), 3);
    Eigen::VectorXd b(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const double x = pts[k].real(), y = pts[k].imag();
        a(static_cast<Eigen::Index>(k), 0) = 2.0 * x;
        a(static_cast<Eigen::Index>(k), 1) = 2.0 * y;
        a(static_cast<Eigen::Index>(k), 2) = 1.0;
        b(static_cast<Eigen::Index>(k)) = x * x + y * y;
    }
    const Eigen::Vector3d sol = (a.transpose() * a).ldlt().solve(a.transpose() * b);
    Circle c;
    c.center = Cplx(sol(0), sol(1));
    c.radius = std::sqrt(std::max(0.0, sol(2) + sol(0) * sol(0) + sol(1) * sol(1)));
    return c;
}

// Boxcar smoothing; the window is clipped at the edges.
std::vector<double> boxcar(const std::vector<double>& y, std::size_t half_width) {
    const std::size_t n = y.size();
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t lo = k > half_width ? k - half_width : 0;
        const std::size_t hi = std::min(n - 1, k + half_width);
        double acc = 0.0;
        for (std::size_t i = lo; i <= hi; ++i) acc += y[i];
        out[k] = acc / static_cast<double>(hi - lo + 1);
    }
    return out;
}

// Primary guess (index 0) from baseline removal + smoothed width + circle
// fit, and a deliberately broad fallback (index 1) that rescues traces whose
// dip is too shallow for the width estimator.
std::array<ResonatorFit, 2> initial_guesses(const S21Trace& trace) {
    const std::vector<double>& f = trace.frequencies_hz;
    const std::vector<Cplx>& s = trace.values;
    const std::size_t n = f.size();
    const double span = f.back() - f.front();

    // Edge windows (off-resonant) for baseline magnitude and delay.
    const std::size_t edge = std::max<std::size_t>(2, n / 10);
    std::vector<double> edge_mags;
    for (std::size_t k = 0; k < edge; ++k) {
        edge_mags.push_back(std::abs(s[k]));
        edge_mags.push_back(std::abs(s[n - 1 - k]));
    }
    std::nth_element(edge_mags.begin(), edge_mags.begin() + edge_mags.size() / 2,
                     edge_mags.end());
    const double a0 = std::max(1e-12, edge_mags[edge_mags.size() / 2]);

    // Phase slope over the edge windows: phi(f) ~ phi0 + 2 pi (f - f_start) tau.
    const std::vector<double> phase = unwrapped_phase(s);
    double sxx = 0.0, sxy = 0.0, sx = 0.0, sy = 0.0, m = 0.0;
    auto accumulate = [&](std::size_t k) {
        const double x = f[k] - f.front();
        sx += x; sy += phase[k]; sxx += x * x; sxy += x * phase[k]; m += 1.0;
    };
    for (std::size_t k = 0; k < edge; ++k) accumulate(k);
    for (std::size_t k = n - edge; k < n; ++k) accumulate(k);
    const double det = m * sxx - sx * sx;
    const double slope = det > 0.0 ? (m * sxy - sx * sy) / det : 0.0;
    const double phi0 = det > 0.0 ? (sy * sxx - sx * sxy) / det : phase.front();
    const double tau0 = slope / two_pi;

    // Remove baseline; dip position and width from the normalized trace.
    std::vector<Cplx> z(n);
    std::vector<double> z2(n);
    for (std::size_t k = 0; k < n; ++k) {
        z[k] = s[k] / (a0 * std::exp(Cplx(0.0, phi0 + two_pi * (f[k] - f.front()) * tau0)));
        z2[k] = std::norm(z[k]);
    }
    // Noise on |z|^2 swamps shallow dips; smooth before locating the minimum.
    const std::vector<double> z2s = boxcar(z2, std::max<std::size_t>(1, n / 200));

    std::size_t imin = 0;
    for (std::size_t k = 1; k < n; ++k)
        if (z2s[k] < z2s[imin]) imin = k;
    if (imin < 2 || imin > n - 3)
        throw InsufficientSpan("fit_s21: resonance dip sits at the edge of the trace");
    const double f0 = f[imin];

    // Half-depth width in smoothed |z|^2 gives the loaded linewidth f0/Q.
    const double zmin2 = z2s[imin];
    const double half_level = 0.5 * (1.0 + zmin2);
    auto cross = [&](bool left) {
        std::size_t k = imin;
        while (left ? k > 0 : k + 1 < n) {
            const std::size_t next = left ? k - 1 : k + 1;
            if (z2s[next] >= half_level) {
                const double y0 = z2s[k], y1 = z2s[next];
                const double t = (half_level - y0) / (y1 - y0);
                return f[k] + t * (f[next] - f[k]);
            }
            k = next;
        }
        return left ? f.front() : f.back();
    };
    // A dip narrower than a few samples or wider than the window is an
    // artifact of noise; clamp to the resolvable band.
    const double sample_spacing = span / static_cast<double>(n - 1);
    const double width =
        std::clamp(std::abs(cross(false) - cross(true)), 3.0 * sample_spacing, span);
    double q0 = std::clamp(f0 / width, f0 / span, f0 / (3.0 * sample_spacing));

    // Algebraic circle fit pins the complex dip depth D = (Q/Qc)(1 + 2i df/f0).
    const Circle circle = kasa_circle_fit(z);
    Cplx depth = 2.0 * (Cplx(1.0, 0.0) - circle.center);
    double re_depth = std::clamp(depth.real(), 1e-6, 2.0);

    ResonatorFit guess;
    guess.baseline_a = a0;
    guess.phase_rad = phi0;
    guess.delay_s = tau0;
    guess.f_start_hz = f.front();
    guess.f0_hz = f0;
    guess.q_loaded = q0;
    guess.q_coupling = q0 / re_depth;
    guess.asymmetry_hz = f0 * depth.imag() / (2.0 * re_depth);

    ResonatorFit broad = guess;
    broad.q_loaded = f0 / (span / 3.0);
    broad.q_coupling = broad.q_loaded / std::max(1.0 - std::sqrt(std::max(zmin2, 0.0)), 0.01);
    broad.asymmetry_hz = 0.0;
    return {guess, broad};
}

} // namespace

double ResonatorFit::derived_q_internal() const {
    const Cplx corr = Cplx(1.0, 2.0 * asymmetry_hz / f0_hz) / q_coupling;
    const double inv_qi = 1.0 / q_loaded - corr.real();
    return 1.0 / inv_qi;
}

std::complex<double> s21_model(const ResonatorFit& fit, double f_hz) {
    const Cplx baseline =
        fit.baseline_a *
        std::exp(Cplx(0.0, fit.phase_rad + two_pi * (f_hz - fit.f_start_hz) * fit.delay_s));
    const Cplx numer = (fit.q_loaded / fit.q_coupling) *
                       Cplx(1.0, 2.0 * fit.asymmetry_hz / fit.f0_hz);
    const Cplx denom = Cplx(1.0, 2.0 * fit.q_loaded * (f_hz - fit.f0_hz) / fit.f0_hz);
    return baseline * (Cplx(1.0, 0.0) - numer / denom);
}

ResonatorFit fit_s21(const S21Trace& trace, const std::optional<ResonatorFit>& guess,
                     const std::vector<double>& weights) {
    validate_trace(trace);
    if (!weights.empty() && weights.size() != trace.values.size())
        throw std::invalid_argument("fit_s21: weights size mismatch");

    std::vector<ResonatorFit> starts;
    if (guess) {
        starts.push_back(*guess);
    } else {
        const auto pair = initial_guesses(trace);
        starts.assign(pair.begin(), pair.end());
    }
    const std::vector<double>& f = trace.frequencies_hz;
    const std::vector<Cplx>& s = trace.values;
    const std::size_t n = f.size();
    const double span = f.back() - f.front();
    const double f_start = f.front();

    auto unpack = [f_start](const Eigen::VectorXd& p) {
        ResonatorFit fit;
        fit.baseline_a = std::exp(p(0));
        fit.phase_rad = p(1);
        fit.delay_s = p(2);
        fit.f_start_hz = f_start;
        fit.f0_hz = p(3);
        fit.q_loaded = std::exp(p(4));
        fit.q_coupling = std::exp(p(5));
        fit.asymmetry_hz = p(6);
        return fit;
    };

    auto residual = [&](const Eigen::VectorXd& p) {
        const ResonatorFit fit = unpack(p);
        Eigen::VectorXd r(2 * n);
        for (std::size_t k = 0; k < n; ++k) {
            const Cplx d = s21_model(fit, f[k]) - s[k];
            const double w = weights.empty() ? 1.0 : weights[k];
            r(2 * k) = w * d.real();
            r(2 * k + 1) = w * d.imag();
        }
        return r;
    };

    // Internal parameterization: (ln a, phi, tau, f0, ln Q, ln Qc, df).
    // Refine from every start and keep the lowest-residual optimum.
    std::optional<LevMarResult> best;
    for (const ResonatorFit& g : starts) {
        Eigen::VectorXd p0(7);
        p0 << std::log(g.baseline_a), g.phase_rad, g.delay_s, g.f0_hz, std::log(g.q_loaded),
            std::log(g.q_coupling), g.asymmetry_hz;
        const double linewidth = g.f0_hz / g.q_loaded;
        Eigen::VectorXd steps(7);
        steps << 1e-6, 1e-6, 1e-6 / span, 1e-6 * std::max(linewidth, span * 1e-6), 1e-6, 1e-6,
            1e-6 * std::max(linewidth, span * 1e-6);
        const LevMarResult lm = levmar_solve(residual, p0, steps);
        if (!best || lm.rss < best->rss) best = lm;
    }
    const LevMarResult& lm = *best;

    ResonatorFit fit = unpack(lm.params);
    fit.residual_rms = std::sqrt(lm.rss / static_cast<double>(n));
    if (!std::isfinite(fit.residual_rms) || fit.residual_rms > 0.25 * fit.baseline_a)
        throw FitDiverged("fit_s21: residual above threshold");
    if (span < 3.0 * fit.f0_hz / fit.q_loaded)
        throw InsufficientSpan("fit_s21: trace spans fewer than 3 linewidths");

    // 1-sigma parameter uncertainties from the Jacobian at the optimum.
    const Eigen::MatrixXd jtj = lm.jacobian.transpose() * lm.jacobian;
    const double dof = static_cast<double>(2 * n) - 7.0;
    const double sigma2 = dof > 0.0 ? lm.rss / dof : 0.0;
    const Eigen::MatrixXd cov = sigma2 * jtj.inverse();
    for (int i = 0; i < 7; ++i)
        fit.stderr_params[static_cast<std::size_t>(i)] =
            std::sqrt(std::max(0.0, cov(i, i)));
    // ln-space uncertainties back to natural units.
    fit.stderr_params[0] *= fit.baseline_a;
    fit.stderr_params[4] *= fit.q_loaded;
    fit.stderr_params[5] *= fit.q_coupling;

    fit.q_internal = fit.derived_q_internal();
    return fit;
}

double photon_number(double pin_watts, double f0_hz, double q_loaded, double q_ext) {
    if (pin_watts < 0.0 || !(f0_hz > 0.0) || !(q_loaded > 0.0) || !(q_ext > 0.0))
        throw std::invalid_argument("photon_number: inputs must be positive");
    const double w0 = two_pi * f0_hz;
    return 2.0 / (constants::hbar * w0 * w0) * (q_loaded * q_loaded / q_ext) * pin_watts;
}

double photon_number_kappa(double pin_watts, double f0_hz, double kappa_i, double kappa_e) {
    if (pin_watts < 0.0 || !(f0_hz > 0.0) || !(kappa_e > 0.0) || kappa_i < 0.0)
        throw std::invalid_argument("photon_number_kappa: inputs must be positive");
    const double w0 = two_pi * f0_hz;
    const double ktot = kappa_i + kappa_e;
    return 2.0 * kappa_e / (ktot * ktot) * pin_watts / (constants::hbar * w0);
}

double thermal_factor(double f_hz, double t_kelvin) {
    if (!(t_kelvin > 0.0) || !(f_hz > 0.0))
        throw std::invalid_argument("thermal_factor: f and T must be > 0");
    return std::tanh(constants::planck * f_hz / (2.0 * constants::boltzmann * t_kelvin));
}

double saturation_model(double n_photons, const SaturationFitParams& p) {
    if (n_photons < 0.0) throw std::invalid_argument("saturation_model: n must be >= 0");
    if (!(p.tan_delta0 > 0.0) || !(p.n_c > 0.0))
        throw std::invalid_argument("saturation_model: tan_delta0 and n_c must be > 0");
    if (!(p.beta > 0.0) || p.beta > 2.0)
        throw std::invalid_argument("saturation_model: beta must be in (0, 2]");
    if (!(p.a_thermal > 0.0) || p.a_thermal > 1.0)
        throw std::invalid_argument("saturation_model: A(T) must be in (0, 1]");
    return p.tan_delta0 * p.a_thermal / std::sqrt(1.0 + std::pow(n_photons / p.n_c, p.beta));
}

SaturationLogLogFit fit_saturation_loglog(const std::vector<SaturationPoint>& zero_field,
                                          const std::vector<SaturationPoint>& in_field) {
    auto check = [](const std::vector<SaturationPoint>& pts, const char* name) {
        if (pts.size() < 2)
            throw DegenerateFit(std::string("fit_saturation_loglog: need >= 2 points for ") + name);
        for (const SaturationPoint& p : pts)
            if (!(p.n_photons > 0.0) || !(p.tan_delta > 0.0))
                throw std::invalid_argument(
                    "fit_saturation_loglog: photon numbers and loss tangents must be > 0");
        const auto [mn, mx] = std::minmax_element(
            pts.begin(), pts.end(), [](const SaturationPoint& a, const SaturationPoint& b) {
                return a.n_photons < b.n_photons;
            });
        if (mn->n_photons == mx->n_photons)
            throw DegenerateFit(std::string("fit_saturation_loglog: all photon numbers equal for ") +
                                name);
    };
    check(zero_field, "B=0");
    check(in_field, "B>0");

    const std::size_t m = zero_field.size() + in_field.size();
    Eigen::MatrixXd a(m, 3);
    Eigen::VectorXd y(m);
    std::size_t row = 0;
    for (const SaturationPoint& p : zero_field) {
        a(row, 0) = -std::log10(p.n_photons);
        a(row, 1) = 1.0;
        a(row, 2) = 0.0;
        y(row++) = std::log10(p.tan_delta);
    }
    for (const SaturationPoint& p : in_field) {
        a(row, 0) = -std::log10(p.n_photons);
        a(row, 1) = 0.0;
        a(row, 2) = 1.0;
        y(row++) = std::log10(p.tan_delta);
    }

    const Eigen::Vector3d sol = (a.transpose() * a).ldlt().solve(a.transpose() * y);
    SaturationLogLogFit fit;
    fit.slope_a = sol(0);
    fit.intercept_zero_field = sol(1);
    fit.intercept_in_field = sol(2);
    if (!(fit.slope_a > 0.0))
        throw DegenerateFit("fit_saturation_loglog: nonpositive shared slope; data are not in "
                            "the power-law regime");
    // beta = 2a must stay in the admissible saturation-exponent band
    if (2.0 * fit.slope_a < 0.05 || 2.0 * fit.slope_a > 2.0)
        throw DegenerateFit("fit_saturation_loglog: fitted beta = " +
                            std::to_string(2.0 * fit.slope_a) + " outside [0.05, 2]");
    fit.nc_ratio = std::pow(10.0, (fit.intercept_zero_field - fit.intercept_in_field) / fit.slope_a);

    // Curvature probe: a quadratic term in log-log beyond threshold flags
    // points outside the n/n_c >> 1 regime.
    auto curvature = [](const std::vector<SaturationPoint>& pts) {
        if (pts.size() < 3) return 0.0;
        Eigen::MatrixXd q(pts.size(), 3);
        Eigen::VectorXd yy(pts.size());
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double x = std::log10(pts[k].n_photons);
            q(static_cast<Eigen::Index>(k), 0) = 1.0;
            q(static_cast<Eigen::Index>(k), 1) = x;
            q(static_cast<Eigen::Index>(k), 2) = x * x;
            yy(static_cast<Eigen::Index>(k)) = std::log10(pts[k].tan_delta);
        }
        const Eigen::Vector3d c = (q.transpose() * q).ldlt().solve(q.transpose() * yy);
        return std::abs(c(2));
    };
    constexpr double curvature_threshold = 0.05;  // per decade^2
    fit.regime_warning = curvature(zero_field) > curvature_threshold ||
                         curvature(in_field) > curvature_threshold;
    return fit;
}

double geometric_mean_qi(const std::vector<double>& qi_values) {
    if (qi_values.empty())
        throw std::invalid_argument("geometric_mean_qi: need at least one value");
    double acc = 0.0;
    for (double q : qi_values) {
        if (!(q > 0.0)) throw std::invalid_argument("geometric_mean_qi: values must be > 0");
        acc += std::log(q);
    }
    return std::exp(acc / static_cast<double>(qi_values.size()));
}

double temperature_from_excited_population(double f_hz, double p_excited) {
    if (!(f_hz > 0.0)) throw std::invalid_argument("temperature_from_excited_population: f > 0");
    if (!(p_excited > 0.0) || p_excited >= 0.5)
        throw std::invalid_argument(
            "temperature_from_excited_population: population must lie in (0, 0.5)");
    return constants::planck * f_hz /
           (constants::boltzmann * std::log((1.0 - p_excited) / p_excited));
}

double predict_tan_delta(const SaturationCurveInputs& inputs, double n_photons) {
    if (n_photons < 0.0) throw std::invalid_argument("predict_tan_delta: n must be >= 0");
    if (!(inputs.photons_per_rabi_sq > 0.0))
        throw std::invalid_argument("predict_tan_delta: photons_per_rabi_sq must be > 0");
    FourLevelParams p = inputs.level_params;
    p.omega_rabi = std::sqrt(n_photons / inputs.photons_per_rabi_sq);
    const DensityMatrix4 rho = inputs.field_on ? steady_state_analytic_field(p)
                                               : steady_state_analytic_zero_field(p);
    const double diff = rho(0, 0).real() - rho(2, 2).real();
    const double diff0 = equilibrium_population_difference(p.nbar);
    return inputs.tan_delta0 * inputs.a_thermal * diff / diff0;
}

std::vector<SaturationPoint> predict_saturation_curve(const SaturationCurveInputs& inputs,
                                                      const std::vector<double>& n_photons) {
    std::vector<SaturationPoint> curve;
    curve.reserve(n_photons.size());
    for (double n : n_photons) curve.push_back({n, predict_tan_delta(inputs, n)});
    return curve;
}

} // namespace acceptorloss
