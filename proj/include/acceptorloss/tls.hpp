// tls.hpp — standard-tunneling-model two-level system Hamiltonian

#pragma once

#include <Eigen/Dense>

namespace acceptorloss {

// Double-well TLS parameters. Asymmetry and tunneling are stored as
// frequencies (value * h gives the energy).
struct TlsParams {
    double asymmetry_hz = 0.0;    // eps0 / h
    double tunneling_hz = 0.0;    // Delta0 / h, >= 0
    double deformation_ev = 1.0;  // gamma
    double dipole_debye = 3.0;    // p
};

// H = (1/2) dE sigma_z + (gamma S + p E) ((eps0/dE) sigma_z + (Delta0/dE) sigma_x)
// with dE = sqrt(eps0^2 + Delta0^2). Returned in joules in the energy
// eigenbasis of the unperturbed splitting. Rejects dE = 0.
Eigen::Matrix2cd tls_hamiltonian(const TlsParams& params, double strain, double efield_v_per_m);

} // namespace acceptorloss
