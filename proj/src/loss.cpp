#include "acceptorloss/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "acceptorloss/constants.hpp"
#include "acceptorloss/errors.hpp"

namespace acceptorloss {

namespace {

void validate(const DopantSpec& d) {
    if (d.concentration_cm3 < 0.0)
        throw std::invalid_argument("dopant spec: concentration must be >= 0");
    if (!(d.epsilon_r > 1.0))
        throw std::invalid_argument("dopant spec: epsilon_r must be > 1");
}

// mu^2 N / (2 eps0 hbar), the integrated susceptibility (units Hz).
double susceptibility_scale(const DopantSpec& d) {
    const double mu = constants::debye_to_coulomb_meter(d.dipole_debye);
    const double n = constants::per_cm3_to_per_m3(d.concentration_cm3);
    return mu * mu * n / (2.0 * constants::vacuum_permittivity * constants::hbar);
}

} // namespace

double LossSpectrum::total_participation() const {
    double total = underflow_weight + overflow_weight;
    for (std::size_t k = 0; k + 1 < bin_edges_hz.size(); ++k)
        total += p_per_hz[k] * (bin_edges_hz[k + 1] - bin_edges_hz[k]);
    return total;
}

double LossSpectrum::value_at(double f_hz) const {
    if (bin_edges_hz.size() < 2 || f_hz < bin_edges_hz.front() || f_hz >= bin_edges_hz.back())
        return 0.0;
    const auto it = std::upper_bound(bin_edges_hz.begin(), bin_edges_hz.end(), f_hz);
    const std::size_t k = static_cast<std::size_t>(it - bin_edges_hz.begin()) - 1;
    return p_per_hz[k];
}

std::vector<double> uniform_bins(double f_lo_hz, double f_hi_hz, double width_hz) {
    if (!(width_hz > 0.0) || !(f_hi_hz > f_lo_hz))
        throw std::invalid_argument("uniform_bins: need width > 0 and f_hi > f_lo");
    std::vector<double> edges;
    const auto n = static_cast<std::size_t>(std::ceil((f_hi_hz - f_lo_hz) / width_hz - 1e-9));
    edges.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) edges.push_back(f_lo_hz + width_hz * static_cast<double>(k));
    return edges;
}

std::vector<double> default_bins() { return uniform_bins(0.0, 150e9, 0.5e9); }

double susceptibility_im(double f_hz, double f0_hz, double linewidth_hz,
                         const DopantSpec& dopant) {
    validate(dopant);
    if (!(linewidth_hz > 0.0))
        throw std::invalid_argument("susceptibility_im: linewidth must be > 0");
    const double half = 0.5 * linewidth_hz;
    const double df = f_hz - f0_hz;
    const double lorentzian = half / std::numbers::pi / (df * df + half * half);
    return susceptibility_scale(dopant) * lorentzian;
}

std::vector<SplittingSample> splitting_map(const StrainField& field,
                                           const AcceptorParams& params) {
    // Validate up front so bad cells are reported with their indices.
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < field.cells.size(); ++i) {
        const StrainCell& c = field.cells[i];
        const bool finite = std::isfinite(c.strain.xx) && std::isfinite(c.strain.yy) &&
                            std::isfinite(c.strain.zz) && std::isfinite(c.strain.xy) &&
                            std::isfinite(c.strain.yz) && std::isfinite(c.strain.zx) &&
                            std::isfinite(c.weight);
        if (!finite || c.weight < 0.0) bad.push_back(i);
    }
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "splitting_map: invalid strain cells at indices";
        for (std::size_t i : bad) msg << ' ' << i;
        throw InvalidStrainCell(msg.str());
    }

    std::vector<SplittingSample> out(field.cells.size());
    auto run = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const StrainCell& c = field.cells[i];
            const LevelStructure ls = level_structure(params, c.strain, {}, {});
            out[i] = {c.weight, ls.orbital_splitting_hz};
        }
    };

    const std::size_t n = field.cells.size();
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (n < 512 || hw == 1) {
        run(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + hw - 1) / hw;
        for (unsigned t = 0; t < hw; ++t) {
            const std::size_t lo = std::min(n, static_cast<std::size_t>(t) * chunk);
            const std::size_t hi = std::min(n, lo + chunk);
            if (lo < hi) pool.emplace_back(run, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

LossSpectrum weighted_participation(const std::vector<SplittingSample>& samples,
                                    const std::vector<double>& bin_edges_hz) {
    if (bin_edges_hz.size() < 2 || !std::is_sorted(bin_edges_hz.begin(), bin_edges_hz.end()))
        throw std::invalid_argument("weighted_participation: bin edges must be ascending");

    LossSpectrum spectrum;
    spectrum.bin_edges_hz = bin_edges_hz;
    spectrum.p_per_hz.assign(bin_edges_hz.size() - 1, 0.0);

    std::vector<double> weight_per_bin(spectrum.p_per_hz.size(), 0.0);
    for (const SplittingSample& s : samples) {
        if (s.splitting_hz < bin_edges_hz.front()) {
            spectrum.underflow_weight += s.weight;
        } else if (s.splitting_hz >= bin_edges_hz.back()) {
            spectrum.overflow_weight += s.weight;
        } else {
            const auto it =
                std::upper_bound(bin_edges_hz.begin(), bin_edges_hz.end(), s.splitting_hz);
            weight_per_bin[static_cast<std::size_t>(it - bin_edges_hz.begin()) - 1] += s.weight;
        }
    }
    for (std::size_t k = 0; k < weight_per_bin.size(); ++k)
        spectrum.p_per_hz[k] = weight_per_bin[k] / (bin_edges_hz[k + 1] - bin_edges_hz[k]);
    return spectrum;
}

double loss_tangent_narrowband(double p_per_hz, const DopantSpec& dopant) {
    validate(dopant);
    if (p_per_hz < 0.0) throw std::invalid_argument("loss_tangent_narrowband: P must be >= 0");
    return susceptibility_scale(dopant) * p_per_hz / dopant.epsilon_r;
}

double loss_tangent_full(const LossSpectrum& spectrum, double f_hz, double linewidth_hz,
                         const DopantSpec& dopant) {
    validate(dopant);
    if (!(linewidth_hz > 0.0))
        throw std::invalid_argument("loss_tangent_full: linewidth must be > 0");
    const double half = 0.5 * linewidth_hz;
    // Integral of the unit Lorentzian over each bin, in closed form.
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < spectrum.bin_edges_hz.size(); ++k) {
        if (spectrum.p_per_hz[k] == 0.0) continue;
        const double lo = spectrum.bin_edges_hz[k];
        const double hi = spectrum.bin_edges_hz[k + 1];
        const double frac =
            (std::atan((hi - f_hz) / half) - std::atan((lo - f_hz) / half)) / std::numbers::pi;
        acc += spectrum.p_per_hz[k] * frac;
    }
    return susceptibility_scale(dopant) * acc / dopant.epsilon_r;
}

DopingFitResult doping_fit(const std::vector<DopingPoint>& points) {
    if (points.size() < 2) throw std::invalid_argument("doping_fit: need at least 2 points");
    for (const DopingPoint& p : points)
        if (!(p.concentration_cm3 > 0.0) || !(p.q > 0.0))
            throw std::invalid_argument("doping_fit: concentrations and Q must be > 0");
    const auto [mn, mx] = std::minmax_element(
        points.begin(), points.end(),
        [](const DopingPoint& a, const DopingPoint& b) {
            return a.concentration_cm3 < b.concentration_cm3;
        });
    if (mn->concentration_cm3 == mx->concentration_cm3)
        throw DegenerateFit("doping_fit: all concentrations equal");

    // log Q = -log(a rho) with slope pinned to -1: the least-squares
    // intercept is the mean of -(log Q + log rho).
    double acc = 0.0;
    for (const DopingPoint& p : points) acc += std::log(p.q) + std::log(p.concentration_cm3);
    DopingFitResult result;
    result.a_cm3 = std::exp(-acc / static_cast<double>(points.size()));
    return result;
}

double compare_loss_channels(double tls_density_cm3_ghz, double tls_participation,
                             double acceptor_density_cm3_ghz, double acceptor_participation) {
    if (!(tls_density_cm3_ghz > 0.0) || !(tls_participation > 0.0) ||
        !(acceptor_density_cm3_ghz > 0.0) || !(acceptor_participation > 0.0))
        throw std::invalid_argument("compare_loss_channels: all inputs must be > 0");
    return (acceptor_density_cm3_ghz * acceptor_participation) /
           (tls_density_cm3_ghz * tls_participation);
}

} // namespace acceptorloss
