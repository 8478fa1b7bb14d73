#include "acceptorloss/fourlevel.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "acceptorloss/constants.hpp"
#include "acceptorloss/errors.hpp"

namespace acceptorloss {

namespace {

using Matrix4cd = Eigen::Matrix4cd;
using Cplx = std::complex<double>;

Matrix4cd ketbra(int row, int col) {
    Matrix4cd m = Matrix4cd::Zero();
    m(row, col) = 1.0;
    return m;
}

Liouvillian kron4(const Matrix4cd& a, const Matrix4cd& b) {
    Liouvillian out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
    return out;
}

void validate(const FourLevelParams& p) {
    if (!(p.gamma_prime > 0.0))
        throw std::invalid_argument("four-level params: gamma_prime must be > 0");
    if (p.gamma_tilde < 0.0)
        throw std::invalid_argument("four-level params: gamma_tilde must be >= 0");
    if (p.nbar < 0.0)
        throw std::invalid_argument("four-level params: nbar must be >= 0");
}

} // namespace

Vector16cd vectorize(const DensityMatrix4& rho) {
    return Eigen::Map<const Vector16cd>(rho.data());
}

DensityMatrix4 unvectorize(const Vector16cd& v) {
    return Eigen::Map<const DensityMatrix4>(v.data());
}

bool is_valid_density_matrix(const DensityMatrix4& rho, double tol) {
    if ((rho - rho.adjoint()).norm() > tol) return false;
    if (std::abs(rho.trace() - Cplx(1.0, 0.0)) > tol) return false;
    Eigen::SelfAdjointEigenSolver<Matrix4cd> es(0.5 * (rho + rho.adjoint()));
    return es.eigenvalues().minCoeff() >= -tol;
}

std::array<Matrix4cd, 8> collapse_operators(const FourLevelParams& p) {
    validate(p);
    const double up_p = std::sqrt(p.nbar * p.gamma_prime);
    const double dn_p = std::sqrt((p.nbar + 1.0) * p.gamma_prime);
    const double up_t = std::sqrt(p.nbar * p.gamma_tilde);
    const double dn_t = std::sqrt((p.nbar + 1.0) * p.gamma_tilde);
    // 0-indexed levels: |1>..|4> -> 0..3
    return {
        up_p * ketbra(2, 0),  // C1 = sqrt(nbar g') |3><1|
        dn_p * ketbra(0, 2),  // C2 = sqrt((nbar+1) g') |1><3|
        up_t * ketbra(2, 1),  // C3 = sqrt(nbar gt) |3><2|
        dn_t * ketbra(1, 2),  // C4 = sqrt((nbar+1) gt) |2><3|
        up_t * ketbra(3, 0),  // C5 = sqrt(nbar gt) |4><1|
        dn_t * ketbra(0, 3),  // C6 = sqrt((nbar+1) gt) |1><4|
        up_p * ketbra(3, 1),  // C7 = sqrt(nbar g') |4><2|
        dn_p * ketbra(1, 3),  // C8 = sqrt((nbar+1) g') |2><4|
    };
}

Liouvillian build_liouvillian(const FourLevelParams& p, bool field_on) {
    validate(p);
    const Cplx i_unit(0.0, 1.0);
    const Matrix4cd eye = Matrix4cd::Identity();

    // Rotating-frame Hamiltonian over hbar (units 1/s).
    Matrix4cd h = Matrix4cd::Zero();
    h(2, 0) = p.omega_rabi;             // Omega |3><1|
    h(3, 1) = p.omega_rabi;             // Omega |4><2|
    h(0, 2) = std::conj(p.omega_rabi);  // Omega* |1><3|
    h(1, 3) = std::conj(p.omega_rabi);  // Omega* |2><4|
    if (field_on) {
        h(1, 1) = p.delta_lower;  // Delta |2><2|
        h(3, 3) = p.delta_upper;  // delta |4><4|
    }

    // vec(A rho B) = (B^T kron A) vec(rho) for column-major stacking.
    Liouvillian l = -i_unit * (kron4(eye, h) - kron4(h.transpose(), eye));

    auto add_dissipator = [&l, &eye](const Matrix4cd& c) {
        const Matrix4cd cdc = c.adjoint() * c;
        l += kron4(c.conjugate(), c);
        l -= 0.5 * kron4(eye, cdc);
        l -= 0.5 * kron4(cdc.transpose(), eye);
    };

    for (const Matrix4cd& c : collapse_operators(p)) add_dissipator(c);

    if (p.gamma_spin > 0.0) {
        add_dissipator(std::sqrt((p.nbar + 1.0) * p.gamma_spin) * ketbra(0, 1));
        add_dissipator(std::sqrt(p.nbar * p.gamma_spin) * ketbra(1, 0));
    }
    return l;
}

DensityMatrix4 steady_state_numeric(const Liouvillian& liouvillian, double degeneracy_tol) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(liouvillian, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();  // descending
    const double scale = sv(0);
    if (scale == 0.0) throw DegenerateSteadyState("steady_state_numeric: zero Liouvillian");
    if (sv(14) < degeneracy_tol * scale)
        throw DegenerateSteadyState(
            "steady_state_numeric: null space is not one-dimensional "
            "(decoupled sectors or undriven zero-temperature system)");

    const Vector16cd v = svd.matrixV().col(15);
    DensityMatrix4 rho = unvectorize(v);
    // Dividing by the complex trace removes the arbitrary global phase of
    // the singular vector; hermitizing first could cancel the state away.
    const Cplx tr = rho.trace();
    if (std::abs(tr) < 1e-12)
        throw DegenerateSteadyState("steady_state_numeric: null vector is traceless");
    rho /= tr;
    rho = 0.5 * (rho + rho.adjoint().eval());
    return rho;
}

double pumping_rate(const FourLevelParams& p) {
    validate(p);
    const double g = p.gamma_prime + p.gamma_tilde;
    return 4.0 * std::norm(p.omega_rabi) / ((1.0 + 2.0 * p.nbar) * g);
}

DensityMatrix4 steady_state_analytic_zero_field(const FourLevelParams& p) {
    validate(p);
    const double g = p.gamma_prime + p.gamma_tilde;
    const double r = pumping_rate(p);
    const double denom = (1.0 + 2.0 * p.nbar) * g + 2.0 * r;
    const double ground = 0.5 * ((1.0 + p.nbar) * g + r) / denom;
    const double excited = 0.5 * (p.nbar * g + r) / denom;
    DensityMatrix4 rho = DensityMatrix4::Zero();
    rho(0, 0) = ground;
    rho(1, 1) = ground;
    rho(2, 2) = excited;
    rho(3, 3) = excited;
    return rho;
}

DensityMatrix4 steady_state_analytic_field(const FourLevelParams& p) {
    validate(p);
    const double gp = p.gamma_prime;
    const double gt = p.gamma_tilde;
    const double g = gp + gt;
    const double nb = p.nbar;
    const double r = pumping_rate(p);

    DensityMatrix4 rho = DensityMatrix4::Zero();
    if (r == 0.0) {
        // Undriven thermal populations; also covers the nbar = 0 limit where
        // the generic denominator vanishes.
        const double ground = (1.0 + nb) / (2.0 * (1.0 + 2.0 * nb));
        const double excited = nb / (2.0 * (1.0 + 2.0 * nb));
        rho(0, 0) = ground;
        rho(1, 1) = ground;
        rho(2, 2) = excited;
        rho(3, 3) = excited;
        return rho;
    }

    const double denom = r * (1.0 + 8.0 * nb * (1.0 + nb)) * gp +
                         r * (1.0 + 2.0 * nb) * (1.0 + 2.0 * nb) * gt +
                         4.0 * nb * (1.0 + nb) * (1.0 + 2.0 * nb) * gp * g;
    rho(0, 0) = nb * (1.0 + nb) * (2.0 * (1.0 + nb) * gp * g + r * (2.0 * gp + gt)) / denom;
    rho(1, 1) = (1.0 + nb) *
                (2.0 * nb * (1.0 + nb) * gp * g + r * (gp + 2.0 * nb * gp + gt + nb * gt)) / denom;
    rho(2, 2) = nb * (1.0 + nb) * (2.0 * nb * gp * g + r * (2.0 * gp + gt)) / denom;
    rho(3, 3) = nb * (2.0 * nb * (1.0 + nb) * gp * g + r * (gp + 2.0 * nb * gp + nb * gt)) / denom;
    return rho;
}

bool secular_approximation_valid(const FourLevelParams& p) {
    return std::abs(p.delta_lower - p.delta_upper) >= 10.0 * std::abs(p.omega_rabi);
}

double equilibrium_population_difference(double nbar) {
    return 1.0 / (4.0 * nbar + 2.0);
}

double critical_rabi_zero_field(const FourLevelParams& p) {
    validate(p);
    const double g = p.gamma_prime + p.gamma_tilde;
    const double two_nb_1 = 2.0 * p.nbar + 1.0;
    const double oc2 = g * g / 8.0 * two_nb_1 * two_nb_1 * (std::sqrt(2.0) - 1.0);
    return std::sqrt(oc2);
}

double critical_rabi_field(const FourLevelParams& p) {
    validate(p);
    if (p.nbar == 0.0)
        throw ZeroTemperatureSaturation(
            "critical_rabi_field: at nbar = 0 dark-state pumping saturates the loss "
            "at arbitrarily low drive (Omega_c -> 0)");
    const double gp = p.gamma_prime;
    const double gt = p.gamma_tilde;
    const double g = gp + gt;
    const double nb = p.nbar;
    const double two_nb_1 = 2.0 * nb + 1.0;
    const double numer =
        nb * (1.0 + nb) * two_nb_1 * two_nb_1 * gp * g * g * (std::sqrt(2.0) - 1.0);
    const double denom = gp + 8.0 * nb * (1.0 + nb) * gp + gt + 4.0 * nb * (1.0 + nb) * gt;
    return std::sqrt(numer / denom);
}

double saturation_ratio(double nbar, double branching) {
    if (!(nbar > 0.0)) throw std::invalid_argument("saturation_ratio: nbar must be > 0");
    if (branching < 0.0) throw std::invalid_argument("saturation_ratio: branching must be >= 0");
    const double pump = 8.0 * nbar * (nbar + 1.0);
    return 1.0 + 1.0 / pump + branching / pump + 0.5 * branching;
}

double nbar_from_temperature(double f_hz, double t_kelvin) {
    if (!(f_hz > 0.0) || !(t_kelvin > 0.0))
        throw std::invalid_argument("nbar_from_temperature: f and T must be > 0");
    const double x = constants::planck * f_hz / (constants::boltzmann * t_kelvin);
    return 1.0 / std::expm1(x);
}

double temperature_from_nbar(double f_hz, double nbar) {
    if (!(f_hz > 0.0) || !(nbar > 0.0))
        throw std::invalid_argument("temperature_from_nbar: f and nbar must be > 0");
    return constants::planck * f_hz / (constants::boltzmann * std::log1p(1.0 / nbar));
}

DensityMatrix4 evolve(const Liouvillian& liouvillian, const DensityMatrix4& rho0,
                      double t_seconds) {
    if (t_seconds < 0.0) throw std::invalid_argument("evolve: t must be >= 0");
    if (!is_valid_density_matrix(rho0, 1e-9))
        throw std::invalid_argument("evolve: rho0 is not a valid density matrix");
    if (t_seconds == 0.0) return rho0;

    const Liouvillian propagator = (t_seconds * liouvillian).exp();
    DensityMatrix4 rho = unvectorize(propagator * vectorize(rho0));
    const double herm_defect = (rho - rho.adjoint()).norm();
    rho = 0.5 * (rho + rho.adjoint().eval());
    const double trace_defect = std::abs(rho.trace() - Cplx(1.0, 0.0));
    if (trace_defect > 1e-9 || herm_defect > 1e-8 || !rho.allFinite())
        throw StepFailure("evolve: propagated state lost trace/hermiticity beyond tolerance");
    return rho;
}

} // namespace acceptorloss
