// loss.hpp — first-principles acceptor loss-tangent pipeline
//
// susceptibility -> strain-map splittings -> weighted participation P(f0)
// -> loss tangent / Q, plus the doping-scaling fit and channel comparison.

#pragma once

#include <vector>

#include "acceptorloss/acceptor.hpp"

namespace acceptorloss {

// Volumetric dopant description. The dipole carries any orientation
// averaging factor (e.g. sqrt(1/3) for randomly aligned dipoles) applied by
// the caller.
struct DopantSpec {
    double concentration_cm3 = 0.0;  // N
    double dipole_debye = 0.0;       // mu, orientation factor included
    double epsilon_r = 11.7;         // host dielectric constant, > 1
};

// One spatial cell of the cross-section: participation weight p(r) dV and
// the local strain tensor.
struct StrainCell {
    double x_um = 0.0;
    double y_um = 0.0;
    double weight = 0.0;  // p(r) dV, dimensionless, >= 0
    StrainTensor strain;
};

struct StrainField {
    std::vector<StrainCell> cells;
    double total_bulk_participation = 0.0;  // sum of weights, <= 1
};

// Weighted participation density over splitting frequency. p_per_hz[k] is
// the participation per hertz in [bin_edges_hz[k], bin_edges_hz[k+1]).
// Weight falling outside the bin range is kept in the under/overflow
// accumulators so total participation is conserved exactly.
struct LossSpectrum {
    std::vector<double> bin_edges_hz;  // ascending, size n+1
    std::vector<double> p_per_hz;      // size n, >= 0
    double underflow_weight = 0.0;
    double overflow_weight = 0.0;

    double total_participation() const;
    double value_at(double f_hz) const;  // p_per_hz of the containing bin, 0 outside
};

// Uniform bin edges [f_lo, f_lo + width, ..., >= f_hi].
std::vector<double> uniform_bins(double f_lo_hz, double f_hi_hz, double width_hz);

// Default binning for acceptor splitting spectra: 0.5 GHz bins, 0-150 GHz.
std::vector<double> default_bins();

inline constexpr double default_linewidth_hz = 1e6;  // homogeneous linewidth default

// Imaginary part of the atomic susceptibility,
//   chi''(f, f0) = mu^2 N g(f, f0) / (2 eps0 hbar),
// with g a unit-area Lorentzian of FWHM linewidth_hz in ordinary frequency.
// Dimensionless. linewidth must be > 0.
double susceptibility_im(double f_hz, double f0_hz, double linewidth_hz, const DopantSpec& dopant);

struct SplittingSample {
    double weight = 0.0;
    double splitting_hz = 0.0;
};

// Per-cell orbital splitting at E = B = 0 via the acceptor level structure.
// Parallelizes over cells. Throws InvalidStrainCell naming the indices of
// cells with non-finite strain or negative weight.
std::vector<SplittingSample> splitting_map(const StrainField& field, const AcceptorParams& params);

// Histogram of participation weights over splitting frequency, normalized
// per hertz. Each cell contributes a delta at its splitting.
LossSpectrum weighted_participation(const std::vector<SplittingSample>& samples,
                                    const std::vector<double>& bin_edges_hz);

// tan(delta) = mu^2 P N / (2 eps0 eps_r hbar) for participation density P
// (1/Hz) at the probe frequency; Q = 1/tan(delta).
double loss_tangent_narrowband(double p_per_hz, const DopantSpec& dopant);

// Participation-averaged loss tangent: the spectrum integrated against
// chi''(f, f0)/eps_r. Piecewise-constant P over bins with the Lorentzian
// integrated exactly per bin, so arbitrary bin-width/linewidth ratios are
// handled without sampling error.
double loss_tangent_full(const LossSpectrum& spectrum, double f_hz, double linewidth_hz,
                         const DopantSpec& dopant);

struct DopingPoint {
    double concentration_cm3 = 0.0;
    double q = 0.0;
};

// Fixed-slope log-log fit log Q = -log(a rho): least-squares intercept only.
struct DopingFitResult {
    double a_cm3 = 0.0;
    double predicted_q(double concentration_cm3) const { return 1.0 / (a_cm3 * concentration_cm3); }
};

// Requires >= 2 points with positive concentration and Q; throws
// DegenerateFit when all concentrations coincide.
DopingFitResult doping_fit(const std::vector<DopingPoint>& points);

// (acceptor density x participation) / (tls density x participation),
// assuming equal dipole moments for the two channels.
double compare_loss_channels(double tls_density_cm3_ghz, double tls_participation,
                             double acceptor_density_cm3_ghz, double acceptor_participation);

} // namespace acceptorloss
