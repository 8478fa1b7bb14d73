// spin32.hpp — spin-3/2 angular momentum operators
//
// Basis ordering is fixed as m = +3/2, +1/2, -1/2, -3/2 throughout the
// toolkit; every 4x4 matrix in the acceptor model is expressed in this basis.

#pragma once

#include <Eigen/Dense>

namespace acceptorloss {

struct SpinOperators {
    Eigen::Matrix4cd jx;
    Eigen::Matrix4cd jy;
    Eigen::Matrix4cd jz;
};

// Jx, Jy, Jz for j = 3/2 from the ladder construction. Dimensionless
// (hbar factored out); satisfy [Jx,Jy] = i Jz and Jx^2+Jy^2+Jz^2 = 15/4.
SpinOperators build_spin_operators();

// Anticommutator {A,B}+ = AB + BA.
inline Eigen::Matrix4cd anticommutator(const Eigen::Matrix4cd& a, const Eigen::Matrix4cd& b) {
    return a * b + b * a;
}

} // namespace acceptorloss
