#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "acceptorloss/spin32.hpp"

using namespace acceptorloss;
using Cplx = std::complex<double>;

TEST_CASE("Jz is diagonal with m = 3/2, 1/2, -1/2, -3/2") {
    const SpinOperators s = build_spin_operators();
    Eigen::Matrix4cd expected = Eigen::Matrix4cd::Zero();
    expected(0, 0) = 1.5;
    expected(1, 1) = 0.5;
    expected(2, 2) = -0.5;
    expected(3, 3) = -1.5;
    CHECK((s.jz - expected).norm() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("commutation relations [Ji, Jj] = i eps_ijk Jk") {
    const SpinOperators s = build_spin_operators();
    const Cplx i_unit(0.0, 1.0);
    auto comm = [](const Eigen::Matrix4cd& a, const Eigen::Matrix4cd& b) {
        return (a * b - b * a).eval();
    };
    CHECK((comm(s.jx, s.jy) - i_unit * s.jz).norm() < 1e-14);
    CHECK((comm(s.jy, s.jz) - i_unit * s.jx).norm() < 1e-14);
    CHECK((comm(s.jz, s.jx) - i_unit * s.jy).norm() < 1e-14);
}

TEST_CASE("Casimir Jx^2 + Jy^2 + Jz^2 = 15/4") {
    const SpinOperators s = build_spin_operators();
    const Eigen::Matrix4cd casimir = s.jx * s.jx + s.jy * s.jy + s.jz * s.jz;
    CHECK((casimir - 3.75 * Eigen::Matrix4cd::Identity()).norm() < 1e-14);
}

TEST_CASE("all components Hermitian") {
    const SpinOperators s = build_spin_operators();
    CHECK((s.jx - s.jx.adjoint()).norm() < 1e-15);
    CHECK((s.jy - s.jy.adjoint()).norm() < 1e-15);
    CHECK((s.jz - s.jz.adjoint()).norm() < 1e-15);
}

TEST_CASE("Jx matches independent ladder-operator construction") {
    // Brute-force oracle: matrix elements <m'|J+-|m> = sqrt(j(j+1) - m(m+-1))
    // assembled element by element, independent of the production path.
    const double j = 1.5;
    const double ms[4] = {1.5, 0.5, -0.5, -1.5};
    Eigen::Matrix4cd jx_oracle = Eigen::Matrix4cd::Zero();
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            double value = 0.0;
            if (r == c - 1) value += 0.5 * std::sqrt(j * (j + 1) - ms[c] * (ms[c] + 1));  // J+
            if (r == c + 1) value += 0.5 * std::sqrt(j * (j + 1) - ms[c] * (ms[c] - 1));  // J-
            jx_oracle(r, c) = value;
        }
    }
    const SpinOperators s = build_spin_operators();
    CHECK((s.jx - jx_oracle).norm() < 1e-14);

    // Spot values: <3/2|Jx|1/2> = sqrt(3)/2, <1/2|Jx|-1/2> = 1.
    CHECK(s.jx(0, 1).real() == doctest::Approx(std::sqrt(3.0) / 2.0));
    CHECK(s.jx(1, 2).real() == doctest::Approx(1.0));
}
