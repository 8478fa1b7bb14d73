#include "acceptorloss/spin32.hpp"

#include <cmath>
#include <complex>

namespace acceptorloss {

SpinOperators build_spin_operators() {
    using std::complex;
    constexpr double j = 1.5;
    // m values in basis order +3/2, +1/2, -1/2, -3/2
    const double m[4] = {1.5, 0.5, -0.5, -1.5};

    Eigen::Matrix4cd jplus = Eigen::Matrix4cd::Zero();
    for (int col = 1; col < 4; ++col) {
        // J+ |j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>; m increases toward row 0
        const double mm = m[col];
        jplus(col - 1, col) = std::sqrt(j * (j + 1.0) - mm * (mm + 1.0));
    }
    const Eigen::Matrix4cd jminus = jplus.adjoint();

    SpinOperators ops;
    ops.jx = 0.5 * (jplus + jminus);
    ops.jy = complex<double>(0.0, -0.5) * (jplus - jminus);
    ops.jz = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 4; ++i) ops.jz(i, i) = m[i];
    return ops;
}

} // namespace acceptorloss
