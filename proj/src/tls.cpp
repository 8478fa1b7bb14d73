#include "acceptorloss/tls.hpp"

#include <cmath>
#include <stdexcept>

#include "acceptorloss/constants.hpp"

namespace acceptorloss {

Eigen::Matrix2cd tls_hamiltonian(const TlsParams& params, double strain, double efield) {
    if (params.tunneling_hz < 0.0)
        throw std::invalid_argument("tls_hamiltonian: tunneling rate must be >= 0");
    const double eps0 = constants::hz_to_joules(params.asymmetry_hz);
    const double delta0 = constants::hz_to_joules(params.tunneling_hz);
    const double de = std::hypot(eps0, delta0);
    if (de == 0.0)
        throw std::invalid_argument("tls_hamiltonian: energy splitting dE must be > 0");

    const double coupling = constants::ev_to_joules(params.deformation_ev) * strain +
                            constants::debye_to_coulomb_meter(params.dipole_debye) * efield;
    const double cz = 0.5 * de + coupling * eps0 / de;  // sigma_z coefficient
    const double cx = coupling * delta0 / de;           // sigma_x coefficient

    Eigen::Matrix2cd h;
    h << cz, cx,
         cx, -cz;
    return h;
}

} // namespace acceptorloss
