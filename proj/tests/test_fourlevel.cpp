#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "acceptorloss/constants.hpp"
#include "acceptorloss/errors.hpp"
#include "acceptorloss/fourlevel.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace acceptorloss;
using Cplx = std::complex<double>;
namespace cn = acceptorloss::constants;

namespace {

FourLevelParams random_params(std::mt19937& gen, bool allow_zero_tilde = false) {
    FourLevelParams p;
    p.gamma_prime = testutil::log_uniform(gen, 0.3, 3.0);
    p.gamma_tilde = allow_zero_tilde && testutil::uniform(gen, 0.0, 1.0) < 0.2
                        ? 0.0
                        : testutil::log_uniform(gen, 0.1, 3.0);
    p.nbar = testutil::uniform(gen, 0.01, 2.0);
    p.omega_rabi = testutil::complex_gaussian(gen, 1.0);
    p.delta_lower = testutil::gaussian(gen, 5.0);
    p.delta_upper = testutil::gaussian(gen, 5.0);
    return p;
}

Eigen::Vector4d populations(const DensityMatrix4& rho) {
    return rho.diagonal().real();
}

} // namespace

TEST_CASE("collapse operators carry the stated weights on the stated transitions") {
    FourLevelParams p;
    p.gamma_prime = 1.0;
    p.gamma_tilde = 0.5;
    p.nbar = 1.0;
    const auto c = collapse_operators(p);

    // C2 = sqrt((nbar+1) g') |1><3|
    CHECK(std::abs(c[1](0, 2)) == doctest::Approx(std::sqrt(2.0)));
    // C1 = sqrt(nbar g') |3><1|
    CHECK(std::abs(c[0](2, 0)) == doctest::Approx(1.0));
    // C4 = sqrt((nbar+1) gt) |2><3|
    CHECK(std::abs(c[3](1, 2)) == doctest::Approx(1.0));
    // each operator has exactly one nonzero entry
    for (const auto& op : c) {
        int nonzero = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (std::abs(op(i, j)) > 0.0) ++nonzero;
        CHECK(nonzero == 1);
    }
}

TEST_CASE("nbar = 0 silences the four upward operators") {
    FourLevelParams p;
    p.gamma_prime = 2.0;
    p.gamma_tilde = 0.7;
    p.nbar = 0.0;
    const auto c = collapse_operators(p);
    CHECK(c[0].norm() == 0.0);  // C1
    CHECK(c[2].norm() == 0.0);  // C3
    CHECK(c[4].norm() == 0.0);  // C5
    CHECK(c[6].norm() == 0.0);  // C7
    CHECK(c[1].norm() > 0.0);
}

TEST_CASE("gamma_tilde = 0 leaves only the |1>-|3> and |2>-|4> channels") {
    FourLevelParams p;
    p.gamma_prime = 1.0;
    p.gamma_tilde = 0.0;
    p.nbar = 0.4;
    const auto c = collapse_operators(p);
    CHECK(c[2].norm() == 0.0);
    CHECK(c[3].norm() == 0.0);
    CHECK(c[4].norm() == 0.0);
    CHECK(c[5].norm() == 0.0);
    CHECK(c[0].norm() > 0.0);
    CHECK(c[7].norm() > 0.0);
}

TEST_CASE("Liouvillian preserves the trace: vec(I)^T L = 0") {
    auto gen = testutil::rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const FourLevelParams p = random_params(gen, true);
        for (bool field_on : {false, true}) {
            const Liouvillian l = build_liouvillian(p, field_on);
            Vector16cd trace_row = Vector16cd::Zero();
            for (int i = 0; i < 4; ++i) trace_row(i + 4 * i) = 1.0;
            const double defect = (trace_row.transpose() * l).norm();
            CHECK(defect <= 1e-12 * l.norm());
        }
    }
}

TEST_CASE("undriven zero-temperature ground mixture is dark") {
    FourLevelParams p;
    p.gamma_prime = 1.3;
    p.gamma_tilde = 0.6;
    p.nbar = 0.0;
    p.omega_rabi = 0.0;
    const Liouvillian l = build_liouvillian(p, false);
    DensityMatrix4 rho = DensityMatrix4::Zero();
    rho(0, 0) = 0.5;
    rho(1, 1) = 0.5;
    CHECK((l * vectorize(rho)).norm() < 1e-14);
}

TEST_CASE("Liouvillian action reproduces the printed equations of motion") {
    // Oracle: the explicit population/coherence derivatives written out for
    // the four-level master equation, zero-field and in-field variants.
    auto gen = testutil::rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        const FourLevelParams p = random_params(gen, true);
        const DensityMatrix4 rho = testutil::random_density_matrix(gen);
        const double g = p.gamma_prime + p.gamma_tilde;
        const double nb = p.nbar;
        const Cplx om = p.omega_rabi;
        const Cplx omc = std::conj(om);
        const Cplx i_unit(0.0, 1.0);
        const double gp = p.gamma_prime, gt = p.gamma_tilde;

        for (bool field_on : {false, true}) {
            const double dl = field_on ? p.delta_lower : 0.0;
            const double du = field_on ? p.delta_upper : 0.0;
            const DensityMatrix4 m = unvectorize(build_liouvillian(p, field_on) * vectorize(rho));

            auto r = [&rho](int i, int j) { return rho(i - 1, j - 1); };
            const Cplx d11 = -g * nb * r(1, 1) + (1.0 + nb) * (gp * r(3, 3) + gt * r(4, 4)) +
                             i_unit * om * r(1, 3) - i_unit * omc * r(3, 1);
            const Cplx d22 = -g * nb * r(2, 2) + (1.0 + nb) * (gt * r(3, 3) + gp * r(4, 4)) +
                             i_unit * om * r(2, 4) - i_unit * omc * r(4, 2);
            const Cplx d33 = -g * (1.0 + nb) * r(3, 3) + nb * (gt * r(2, 2) + gp * r(1, 1)) -
                             i_unit * om * r(1, 3) + i_unit * omc * r(3, 1);
            const Cplx d13 = -g * (0.5 + nb) * r(1, 3) + i_unit * omc * (r(1, 1) - r(3, 3));
            const Cplx d24 = -g * (0.5 + nb) * r(2, 4) + i_unit * (du - dl) * r(2, 4) +
                             i_unit * omc * (r(2, 2) - r(4, 4));
            const Cplx d12 = -g * nb * r(1, 2) + i_unit * dl * r(1, 2) +
                             i_unit * (om * r(1, 4) - omc * r(3, 2));
            const Cplx d14 = -g * (0.5 + nb) * r(1, 4) + i_unit * du * r(1, 4) +
                             i_unit * omc * (r(1, 2) - r(3, 4));
            const Cplx d23 = -g * (0.5 + nb) * r(2, 3) - i_unit * dl * r(2, 3) +
                             i_unit * omc * (r(2, 1) - r(4, 3));
            const Cplx d34 = -g * (1.0 + nb) * r(3, 4) + i_unit * du * r(3, 4) +
                             i_unit * omc * r(3, 2) - i_unit * om * r(1, 4);
            const Cplx d44 = -(d11 + d22 + d33);  // trace conservation

            CHECK(std::abs(m(0, 0) - d11) < 1e-12);
            CHECK(std::abs(m(1, 1) - d22) < 1e-12);
            CHECK(std::abs(m(2, 2) - d33) < 1e-12);
            CHECK(std::abs(m(3, 3) - d44) < 1e-12);
            CHECK(std::abs(m(0, 2) - d13) < 1e-12);
            CHECK(std::abs(m(1, 3) - d24) < 1e-12);
            CHECK(std::abs(m(0, 1) - d12) < 1e-12);
            CHECK(std::abs(m(0, 3) - d14) < 1e-12);
            CHECK(std::abs(m(1, 2) - d23) < 1e-12);
            CHECK(std::abs(m(2, 3) - d34) < 1e-12);
        }
    }
}

TEST_CASE("numeric steady state: thermal populations without drive") {
    FourLevelParams p;
    p.gamma_prime = 1.0;
    p.gamma_tilde = 0.5;
    p.nbar = 0.3;
    p.omega_rabi = 0.0;
    const DensityMatrix4 rho = steady_state_numeric(build_liouvillian(p, false));
    const double ground = (1.0 + p.nbar) / (2.0 * (1.0 + 2.0 * p.nbar));
    const double excited = p.nbar / (2.0 * (1.0 + 2.0 * p.nbar));
    CHECK(rho(0, 0).real() == doctest::Approx(ground).epsilon(1e-10));
    CHECK(rho(1, 1).real() == doctest::Approx(ground).epsilon(1e-10));
    CHECK(rho(2, 2).real() == doctest::Approx(excited).epsilon(1e-10));
    CHECK(rho(3, 3).real() == doctest::Approx(excited).epsilon(1e-10));
    CHECK(is_valid_density_matrix(rho, 1e-9));
    // Boltzmann-like branch ratio.
    CHECK(rho(2, 2).real() / rho(0, 0).real() ==
          doctest::Approx(p.nbar / (1.0 + p.nbar)).epsilon(1e-9));
}

TEST_CASE("numeric steady state approaches diag(1/2,1/2,0,0) as nbar -> 0+") {
    FourLevelParams p;
    p.gamma_prime = 1.0;
    p.gamma_tilde = 0.8;
    p.nbar = 1e-7;
    p.omega_rabi = 0.0;
    const DensityMatrix4 rho = steady_state_numeric(build_liouvillian(p, false));
    CHECK(rho(0, 0).real() == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(rho(1, 1).real() == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(rho(2, 2).real() < 1e-6);
    CHECK(rho(3, 3).real() < 1e-6);
}

TEST_CASE("strong zero-field drive equalizes all four populations") {
    FourLevelParams p;
    p.gamma_prime = 1.0;
    p.gamma_tilde = 0.4;
    p.nbar = 0.2;
    p.omega_rabi = 300.0;  // R >> (g' + gt)(nbar + 1/2)
    const DensityMatrix4 rho = steady_state_numeric(build_liouvillian(p, false));
    for (int i = 0; i < 4; ++i) CHECK(rho(i, i).real() == doctest::Approx(0.25).epsilon(1e-4));
}

TEST_CASE("in-field drive at zero temperature polarizes the dark ground state") {
    FourLevelParams p;
    p.gamma_prime = 1.0;
    p.gamma_tilde = 0.5;
    p.nbar = 0.0;
    p.omega_rabi = 5.0;
    p.delta_lower = 5e5;  // far-detuned spin transition
    p.delta_upper = 1e5;
    const DensityMatrix4 rho = steady_state_numeric(build_liouvillian(p, true));
    CHECK(rho(1, 1).real() > 0.999);
}

TEST_CASE("degenerate cases are reported, not silently resolved") {
    FourLevelParams p;
    p.gamma_prime = 1.0;

    SUBCASE("undriven zero-temperature system") {
        p.gamma_tilde = 0.5;
        p.nbar = 0.0;
        p.omega_rabi = 0.0;
        CHECK_THROWS_AS(steady_state_numeric(build_liouvillian(p, false)), DegenerateSteadyState);
    }
    SUBCASE("gamma_tilde = 0 decouples the sectors for any drive") {
        p.gamma_tilde = 0.0;
        p.nbar = 0.4;
        p.omega_rabi = 1.5;
        CHECK_THROWS_AS(steady_state_numeric(build_liouvillian(p, false)), DegenerateSteadyState);
    }
}

TEST_CASE("zero-drive analytic populations and the R -> infinity limit") {
    FourLevelParams p;
    p.gamma_prime = 0.8;
    p.gamma_tilde = 0.3;
    p.nbar = 0.7;
    p.omega_rabi = 0.0;
    DensityMatrix4 rho = steady_state_analytic_zero_field(p);
    CHECK(rho(0, 0).real() == doctest::Approx((1.0 + 0.7) / (2.0 * 2.4)));
    CHECK(rho(2, 2).real() == doctest::Approx(0.7 / (2.0 * 2.4)));
    CHECK(rho(2, 2).real() / rho(0, 0).real() == doctest::Approx(0.7 / 1.7));

    p.omega_rabi = 1e5;
    rho = steady_state_analytic_zero_field(p);
    for (int i = 0; i < 4; ++i) CHECK(rho(i, i).real() == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("zero-field analytic equals numeric to 1e-9 per population") {
    auto gen = testutil::rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        FourLevelParams p = random_params(gen);
        p.omega_rabi = testutil::uniform(gen, 0.0, 10.0) * p.gamma_prime;
        const DensityMatrix4 analytic = steady_state_analytic_zero_field(p);
        const DensityMatrix4 numeric = steady_state_numeric(build_liouvillian(p, false));
        const Eigen::Vector4d err = (populations(analytic) - populations(numeric)).cwiseAbs();
        CHECK(err.maxCoeff() < 1e-9);
    }
}

TEST_CASE("in-field analytic: thermal reduction at R = 0 and polarization at nbar -> 0") {
    FourLevelParams p;
    p.gamma_prime = 1.0;
    p.gamma_tilde = 0.5;
    p.nbar = 0.25;
    p.omega_rabi = 0.0;
    DensityMatrix4 rho = steady_state_analytic_field(p);
    CHECK(rho(0, 0).real() == doctest::Approx(1.25 / 3.0).epsilon(1e-12));
    CHECK(rho(2, 2).real() == doctest::Approx(0.25 / 3.0).epsilon(1e-12));

    p.nbar = 1e-7;
    p.omega_rabi = 10.0;
    rho = steady_state_analytic_field(p);
    CHECK(rho(1, 1).real() > 0.999);

    p.nbar = 0.0;
    rho = steady_state_analytic_field(p);
    CHECK(rho(1, 1).real() == doctest::Approx(1.0));
}

TEST_CASE("ground-state imbalance rho22 > rho11 whenever the drive is on") {
    auto gen = testutil::rng(37);
    for (int trial = 0; trial < 40; ++trial) {
        FourLevelParams p = random_params(gen);
        p.omega_rabi = testutil::log_uniform(gen, 1e-3, 10.0) * p.gamma_prime;
        const DensityMatrix4 rho = steady_state_analytic_field(p);
        CHECK(rho(1, 1).real() > rho(0, 0).real());
    }
}

TEST_CASE("deep-secular regime: analytic field solution matches numeric to 1e-6") {
    FourLevelParams p;
    p.gamma_prime = 1.0;
    p.gamma_tilde = 1.0;
    p.nbar = 0.1;
    // R = 1 corresponds to |Omega|^2 = R (1+2 nbar)(g'+gt)/4
    const double omega = std::sqrt(1.0 * 1.2 * 2.0 / 4.0);
    p.omega_rabi = omega;
    p.delta_lower = 1e6 * omega;
    p.delta_upper = 0.0;
    const DensityMatrix4 analytic = steady_state_analytic_field(p);
    const DensityMatrix4 numeric = steady_state_numeric(build_liouvillian(p, true));
    const Eigen::Vector4d err = (populations(analytic) - populations(numeric)).cwiseAbs();
    CHECK(err.maxCoeff() < 1e-6);
}

TEST_CASE("secular discrepancy grows monotonically as the detuning shrinks") {
    FourLevelParams p;
    p.gamma_prime = 1.0;
    p.gamma_tilde = 0.7;
    p.nbar = 0.15;
    const double omega = 0.8;
    p.omega_rabi = omega;
    double previous = -1.0;
    for (double ratio : {1e4, 1e3, 1e2, 10.0}) {
        p.delta_lower = ratio * omega;
        p.delta_upper = 0.0;
        const DensityMatrix4 analytic = steady_state_analytic_field(p);
        const DensityMatrix4 numeric = steady_state_numeric(build_liouvillian(p, true));
        const double err = (populations(analytic) - populations(numeric)).cwiseAbs().maxCoeff();
        CHECK(err > previous);
        previous = err;
    }
    CHECK(previous > 1e-5);  // at 10x the approximation is visibly off
}

TEST_CASE("secular validity guard at the 10x threshold") {
    FourLevelParams p;
    p.omega_rabi = 2.0;
    p.delta_lower = 25.0;
    p.delta_upper = 0.0;
    CHECK(secular_approximation_valid(p));
    p.delta_upper = 6.0;  // |25 - 6| = 19 < 20
    CHECK(!secular_approximation_valid(p));
}

TEST_CASE("zero-field critical Rabi: closed form and scaling") {
    FourLevelParams p;
    p.gamma_prime = 0.6;
    p.gamma_tilde = 0.4;
    p.nbar = 0.0;
    const double g = 1.0;
    CHECK(critical_rabi_zero_field(p) ==
          doctest::Approx(g * std::sqrt((std::sqrt(2.0) - 1.0) / 8.0)).epsilon(1e-12));
    CHECK(critical_rabi_zero_field(p) == doctest::Approx(0.2275449 * g).epsilon(1e-6));

    // |Omega_c|^2 scales as (2 nbar + 1)^2.
    p.nbar = 0.8;
    const double oc1 = critical_rabi_zero_field(p);
    p.nbar = 2.1;  // 2*nbar+1 doubles from 2.6 to 5.2
    const double oc2 = critical_rabi_zero_field(p);
    CHECK(oc2 / oc1 == doctest::Approx(5.2 / 2.6).epsilon(1e-12));
}

TEST_CASE("zero-field critical Rabi agrees with the bisection oracle") {
    auto gen = testutil::rng(41);
    for (int trial = 0; trial < 6; ++trial) {
        FourLevelParams p;
        p.gamma_prime = testutil::log_uniform(gen, 0.5, 2.0);
        p.gamma_tilde = testutil::log_uniform(gen, 0.2, 2.0);
        p.nbar = testutil::uniform(gen, 0.02, 1.5);
        const double closed = critical_rabi_zero_field(p);
        const double target = equilibrium_population_difference(p.nbar) / std::sqrt(2.0);
        const double oracle = oracles::bisect_saturation_omega(p, false, target, 2.0 * closed);
        CHECK(std::abs(oracle - closed) <= 1e-6 * closed);
        // At Omega_c the numeric difference sits at the saturation condition.
        CHECK(oracles::numeric_population_difference(p, false, closed) ==
              doctest::Approx(target).epsilon(1e-9));
    }
}

TEST_CASE("in-field critical Rabi rejects nbar = 0 and vanishes as nbar -> 0+") {
    FourLevelParams p;
    p.gamma_prime = 1.0;
    p.gamma_tilde = 1.0;
    p.nbar = 0.0;
    CHECK_THROWS_AS(critical_rabi_field(p), ZeroTemperatureSaturation);
    p.nbar = 1e-12;
    CHECK(critical_rabi_field(p) < 1e-5);
}

TEST_CASE("in-field critical Rabi agrees with the deep-secular bisection oracle") {
    auto gen = testutil::rng(43);
    for (int trial = 0; trial < 5; ++trial) {
        FourLevelParams p;
        p.gamma_prime = testutil::log_uniform(gen, 0.5, 2.0);
        p.gamma_tilde = testutil::log_uniform(gen, 0.3, 2.0);
        p.nbar = testutil::uniform(gen, 0.05, 1.0);
        const double closed = critical_rabi_field(p);
        p.delta_lower = 1e5 * closed;
        p.delta_upper = 0.0;
        const double target = equilibrium_population_difference(p.nbar) / std::sqrt(2.0);
        const double oracle = oracles::bisect_saturation_omega(p, true, target, 2.0 * closed);
        CHECK(std::abs(oracle - closed) <= 1e-6 * closed);
    }
}

TEST_CASE("saturation ratio: worked value, limits, monotonicity, identity") {
    CHECK(saturation_ratio(0.1, 1.0) == doctest::Approx(3.7727272727).epsilon(1e-9));
    CHECK(saturation_ratio(1e3, 2.0) == doctest::Approx(1.0 + 1.0).epsilon(1e-6));

    CHECK_THROWS_AS(saturation_ratio(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(saturation_ratio(-0.5, 1.0), std::invalid_argument);

    auto gen = testutil::rng(47);
    double previous = std::numeric_limits<double>::infinity();
    for (double nb : {0.01, 0.05, 0.2, 0.5, 1.0, 3.0}) {
        const double r = saturation_ratio(nb, 1.0);
        CHECK(r > 1.0);
        CHECK(r < previous);
        previous = r;
    }

    // ratio == |Omega_c(B=0) / Omega_c(B>0)|^2 to 1e-9 relative.
    for (int trial = 0; trial < 20; ++trial) {
        FourLevelParams p;
        p.gamma_prime = testutil::log_uniform(gen, 0.2, 5.0);
        p.gamma_tilde = testutil::log_uniform(gen, 0.05, 5.0);
        p.nbar = testutil::log_uniform(gen, 0.01, 3.0);
        const double ratio = saturation_ratio(p.nbar, p.gamma_tilde / p.gamma_prime);
        const double oc0 = critical_rabi_zero_field(p);
        const double oc1 = critical_rabi_field(p);
        CHECK(std::abs(ratio - (oc0 * oc0) / (oc1 * oc1)) <= 1e-9 * ratio);
    }
}

TEST_CASE("thermal occupancy: asymptote, anchor value, round trip") {
    // deep quantum regime: nbar ~ exp(-hf/kT)
    const double f = 10e9, t = 0.02;
    const double x = cn::planck * f / (cn::boltzmann * t);
    CHECK(nbar_from_temperature(f, t) == doctest::Approx(std::exp(-x)).epsilon(1e-8));

    CHECK(nbar_from_temperature(6.1e9, 0.075) == doctest::Approx(0.0205889).epsilon(1e-5));

    for (double temp : {0.01, 0.075, 0.3}) {
        const double nb = nbar_from_temperature(6.1e9, temp);
        CHECK(temperature_from_nbar(6.1e9, nb) == doctest::Approx(temp).epsilon(1e-9));
    }
}

TEST_CASE("evolve: identity at t = 0 and long-time convergence to the steady state") {
    FourLevelParams p;
    p.gamma_prime = 1.0;
    p.gamma_tilde = 0.5;
    p.nbar = 0.3;
    p.omega_rabi = 0.7;
    const Liouvillian l = build_liouvillian(p, false);

    auto gen = testutil::rng(53);
    const DensityMatrix4 rho0 = testutil::random_density_matrix(gen);
    CHECK((evolve(l, rho0, 0.0) - rho0).norm() == 0.0);

    const DensityMatrix4 steady = steady_state_numeric(l);
    const DensityMatrix4 late = evolve(l, rho0, 80.0);
    CHECK((late - steady).norm() < 1e-6);
}

TEST_CASE("evolve preserves trace, hermiticity, positivity along the trajectory") {
    FourLevelParams p;
    p.gamma_prime = 1.2;
    p.gamma_tilde = 0.3;
    p.nbar = 0.5;
    p.omega_rabi = Cplx(0.4, 0.9);
    p.delta_lower = 3.0;
    p.delta_upper = 1.0;
    const Liouvillian l = build_liouvillian(p, true);
    auto gen = testutil::rng(59);
    const DensityMatrix4 rho0 = testutil::random_density_matrix(gen);
    for (double t : {0.01, 0.1, 0.5, 2.0, 10.0}) {
        const DensityMatrix4 rho = evolve(l, rho0, t);
        CHECK(std::abs(rho.trace() - Cplx(1.0)) < 1e-10);
        CHECK((rho - rho.adjoint()).norm() < 1e-10);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
        CHECK(es.eigenvalues().minCoeff() > -1e-8);
    }
}

TEST_CASE("evolve reproduces the two-channel decay closed form") {
    FourLevelParams p;
    p.gamma_prime = 1.4;
    p.gamma_tilde = 0.6;
    p.nbar = 0.0;
    p.omega_rabi = 0.0;
    const double g = p.gamma_prime + p.gamma_tilde;
    const Liouvillian l = build_liouvillian(p, false);
    DensityMatrix4 rho0 = DensityMatrix4::Zero();
    rho0(2, 2) = 1.0;  // |3><3|
    for (double t : {0.05, 0.3, 1.0, 2.5}) {
        const DensityMatrix4 rho = evolve(l, rho0, t);
        const double decayed = 1.0 - std::exp(-g * t);
        CHECK(rho(2, 2).real() == doctest::Approx(std::exp(-g * t)).epsilon(1e-9));
        CHECK(rho(0, 0).real() ==
              doctest::Approx(p.gamma_prime / g * decayed).epsilon(1e-9));
        CHECK(rho(1, 1).real() ==
              doctest::Approx(p.gamma_tilde / g * decayed).epsilon(1e-9));
    }
}

TEST_CASE("evolve validates its inputs") {
    FourLevelParams p;
    p.gamma_prime = 1.0;
    const Liouvillian l = build_liouvillian(p, false);
    DensityMatrix4 bad = DensityMatrix4::Identity();  // trace 4
    CHECK_THROWS_AS(evolve(l, bad, 1.0), std::invalid_argument);
    DensityMatrix4 good = DensityMatrix4::Identity() * 0.25;
    CHECK_THROWS_AS(evolve(l, good, -1.0), std::invalid_argument);
}
