// fourlevel.hpp — driven, phonon-damped four-level acceptor dynamics
//
// Levels |1>,|2> are the long-lived lower-branch (generalized spin) states,
// |3>,|4> the upper orbital branch. The drive is resonant with |1><->|3>;
// in the rotating frame the in-field Hamiltonian carries the Zeeman
// splittings Delta (lower branch) and delta (upper branch) on |2> and |4>.
//
// All rates are in 1/s and enter the equations of motion directly; the
// closed forms below mix Omega and the gammas, so they must share units.

#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace acceptorloss {

struct FourLevelParams {
    double gamma_prime = 1.0;   // spontaneous rate |3>->|1> and |4>->|2>, > 0
    double gamma_tilde = 0.0;   // spontaneous rate |3>->|2> and |4>->|1>, >= 0
    double nbar = 0.0;          // thermal phonon occupancy, >= 0
    std::complex<double> omega_rabi{0.0, 0.0};  // drive amplitude (rad/s)
    double delta_lower = 0.0;   // Zeeman splitting of the lower branch (rad/s)
    double delta_upper = 0.0;   // Zeeman splitting of the upper branch (rad/s)
    // Optional spin relaxation |2> <-> |1|. The model follows the regime
    // where spin lifetimes far exceed orbital lifetimes, so this defaults to
    // exactly zero and is excluded from all analytic comparisons.
    double gamma_spin = 0.0;
};

using DensityMatrix4 = Eigen::Matrix4cd;
using Liouvillian = Eigen::Matrix<std::complex<double>, 16, 16>;
using Vector16cd = Eigen::Vector<std::complex<double>, 16>;

// Column-major stacking: vec(rho)[i + 4j] = rho(i,j).
Vector16cd vectorize(const DensityMatrix4& rho);
DensityMatrix4 unvectorize(const Vector16cd& v);

// Hermitian to 'tol', unit trace to 'tol', eigenvalues >= -tol.
bool is_valid_density_matrix(const DensityMatrix4& rho, double tol = 1e-10);

// The eight phonon-assisted collapse operators C1..C8 in order:
// sqrt(nbar g') |3><1|, sqrt((nbar+1) g') |1><3|,
// sqrt(nbar gt) |3><2|, sqrt((nbar+1) gt) |2><3|,
// sqrt(nbar gt) |4><1|, sqrt((nbar+1) gt) |1><4|,
// sqrt(nbar g') |4><2|, sqrt((nbar+1) g') |2><4|.
std::array<Eigen::Matrix4cd, 8> collapse_operators(const FourLevelParams& p);

// L[rho] = -i[H, rho] + sum_i D[C_i] rho, vectorized to 16x16.
// field_on selects the in-field rotating-frame Hamiltonian with
// Delta |2><2| + delta |4><4|; otherwise both branches are degenerate.
Liouvillian build_liouvillian(const FourLevelParams& p, bool field_on);

// Null-space steady state (smallest singular vector, trace-normalized).
// Throws DegenerateSteadyState when the null space is not one-dimensional,
// e.g. gamma_tilde = 0 (decoupled sectors) or Omega = 0 with nbar = 0.
DensityMatrix4 steady_state_numeric(const Liouvillian& liouvillian,
                                    double degeneracy_tol = 1e-10);

// Pumping rate R = 4|Omega|^2 / ((1+2 nbar)(g' + gt)).
double pumping_rate(const FourLevelParams& p);

// Closed-form diagonal steady state at zero field:
// rho11 = rho22 = ((1+nbar) G + R) / (2 ((1+2 nbar) G + 2R)), etc.
DensityMatrix4 steady_state_analytic_zero_field(const FourLevelParams& p);

// Closed-form diagonal steady state in field, valid in the secular regime
// |Delta - delta| >> |Omega| (detuned coherences dropped).
DensityMatrix4 steady_state_analytic_field(const FourLevelParams& p);

// Conservative secular-approximation guard: |Delta - delta| >= 10 |Omega|.
bool secular_approximation_valid(const FourLevelParams& p);

// Equilibrium population difference (rho11 - rho33) at Omega = 0: 1/(4 nbar + 2).
double equilibrium_population_difference(double nbar);

// |Omega_c(B=0)|^2 = (G^2/8) (2 nbar + 1)^2 (sqrt(2) - 1); returns Omega_c.
double critical_rabi_zero_field(const FourLevelParams& p);

// In-field critical Rabi frequency
//   |Omega_c|^2 = nbar (1+nbar) (1+2 nbar)^2 g' G^2 (sqrt(2)-1)
//               / (g' + 8 nbar (1+nbar) g' + gt + 4 nbar (1+nbar) gt).
// Throws ZeroTemperatureSaturation at nbar = 0, where dark-state pumping
// saturates at arbitrarily low power.
double critical_rabi_field(const FourLevelParams& p);

// Pc(B=0)/Pc(B>0) = 1 + 1/(8 nbar (nbar+1)) + b/(8 nbar (nbar+1)) + b/2
// with branching b = gamma_tilde / gamma_prime. Always > 1; requires nbar > 0.
double saturation_ratio(double nbar, double branching);

// Bose-Einstein occupancy 1/(exp(h f / kB T) - 1) and its inverse.
double nbar_from_temperature(double f_hz, double t_kelvin);
double temperature_from_nbar(double f_hz, double nbar);

// rho(t) = exp(L t)[rho0] via the matrix exponential. Throws StepFailure if
// the propagated state loses trace or hermiticity beyond 1e-9.
DensityMatrix4 evolve(const Liouvillian& liouvillian, const DensityMatrix4& rho0, double t_seconds);

} // namespace acceptorloss
