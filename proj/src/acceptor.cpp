#include "acceptorloss/acceptor.hpp"

#include <cmath>

#include "acceptorloss/constants.hpp"

namespace acceptorloss {

namespace {

const SpinOperators& spin_ops() {
    static const SpinOperators ops = build_spin_operators();
    return ops;
}

} // namespace

Eigen::Matrix4cd hamiltonian_magnetic(const AcceptorParams& params, const FieldVector& b) {
    const SpinOperators& s = spin_ops();
    Eigen::Matrix4cd h =
        params.g1 * (s.jx * b.x + s.jy * b.y + s.jz * b.z) +
        params.g2 * ((s.jx * s.jx * s.jx) * b.x + (s.jy * s.jy * s.jy) * b.y +
                     (s.jz * s.jz * s.jz) * b.z);
    return constants::bohr_magneton * h;
}

Eigen::Matrix4cd hamiltonian_electric(const AcceptorParams& params, const FieldVector& e) {
    const SpinOperators& s = spin_ops();
    const double p = constants::debye_to_coulomb_meter(params.dipole_debye);
    Eigen::Matrix4cd h = e.x * anticommutator(s.jy, s.jz) +
                         e.y * anticommutator(s.jz, s.jx) +
                         e.z * anticommutator(s.jx, s.jy);
    return (p / std::sqrt(3.0)) * h;
}

Eigen::Matrix4cd hamiltonian_strain(const AcceptorParams& params, const StrainTensor& strain) {
    const SpinOperators& s = spin_ops();
    const double g = constants::ev_to_joules(params.deformation_ev);
    const double gp = constants::ev_to_joules(params.deformation_prime_ev);
    Eigen::Matrix4cd h =
        g * (strain.xx * (s.jx * s.jx) + strain.yy * (s.jy * s.jy) + strain.zz * (s.jz * s.jz));
    h += (gp / std::sqrt(3.0)) * (strain.xy * anticommutator(s.jx, s.jy) +
                                  strain.yz * anticommutator(s.jy, s.jz) +
                                  strain.zx * anticommutator(s.jz, s.jx));
    return h;
}

LevelStructure level_structure(const AcceptorParams& params,
                               const StrainTensor& strain,
                               const FieldVector& e,
                               const FieldVector& b) {
    const Eigen::Matrix4cd h =
        hamiltonian_strain(params, strain) + hamiltonian_electric(params, e) +
        hamiltonian_magnetic(params, b);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(h);

    LevelStructure out;
    out.eigenvalues_joule = solver.eigenvalues();  // ascending
    out.eigenvectors = solver.eigenvectors();

    const Eigen::Vector4d& ev = out.eigenvalues_joule;
    const double lower_mean = 0.5 * (ev(0) + ev(1));
    const double upper_mean = 0.5 * (ev(2) + ev(3));
    out.orbital_splitting_hz = constants::joules_to_hz(upper_mean - lower_mean);
    out.zeeman_lower_hz = constants::joules_to_hz(ev(1) - ev(0));
    out.zeeman_upper_hz = constants::joules_to_hz(ev(3) - ev(2));
    return out;
}

} // namespace acceptorloss
