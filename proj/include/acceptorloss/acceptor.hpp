// acceptor.hpp — boron acceptor spin-3/2 level structure under strain,
// electric, and magnetic fields.
//
// Hamiltonians are returned in joules in the m = +3/2, +1/2, -1/2, -3/2
// basis. All builders are pure and thread-safe.

#pragma once

#include <Eigen/Dense>

#include "acceptorloss/spin32.hpp"

namespace acceptorloss {

// Physical constants of the boron acceptor. Defaults are the literature
// values for boron in silicon.
struct AcceptorParams {
    double g1 = -1.07;                 // linear g-factor
    double g2 = -0.03;                 // cubic g-factor
    double dipole_debye = 0.26;        // electric dipole p_B (Debye)
    double deformation_ev = -1.42;     // gamma_B (eV)
    double deformation_prime_ev = -3.7;  // gamma_B' (eV)
};

// Symmetric strain tensor, six independent components, dimensionless.
struct StrainTensor {
    double xx = 0.0;
    double yy = 0.0;
    double zz = 0.0;
    double xy = 0.0;
    double yz = 0.0;
    double zx = 0.0;
};

// Cartesian field vector. Units depend on use: tesla for magnetic fields,
// V/m for electric fields.
struct FieldVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// H_B = mu_B [g1 (Jx Bx + c.p.) + g2 (Jx^3 Bx + c.p.)], joules.
// Linear in B entrywise even though J^3 terms appear.
Eigen::Matrix4cd hamiltonian_magnetic(const AcceptorParams& params, const FieldVector& b_tesla);

// H_E = (p_B/sqrt(3)) (Ex {Jy,Jz}+ + c.p.), joules. Traceless.
Eigen::Matrix4cd hamiltonian_electric(const AcceptorParams& params, const FieldVector& e_volt_per_m);

// H_S = gamma_B (Sxx Jx^2 + c.p.) + (gamma_B'/sqrt(3)) (Sxy {Jx,Jy}+ + c.p.), joules.
Eigen::Matrix4cd hamiltonian_strain(const AcceptorParams& params, const StrainTensor& strain);

struct LevelStructure {
    double orbital_splitting_hz = 0.0;  // mean(E3,E4) - mean(E1,E2), in Hz
    double zeeman_lower_hz = 0.0;       // E2 - E1
    double zeeman_upper_hz = 0.0;       // E4 - E3
    Eigen::Vector4d eigenvalues_joule;  // ascending
    Eigen::Matrix4cd eigenvectors;      // columns, same order as eigenvalues
};

// Diagonalizes H_S + H_E + H_B. Eigenvectors within a Kramers-degenerate
// pair carry gauge freedom and are not canonicalized; only eigenvalues and
// splittings are contractually stable.
LevelStructure level_structure(const AcceptorParams& params,
                               const StrainTensor& strain,
                               const FieldVector& e_volt_per_m,
                               const FieldVector& b_tesla);

} // namespace acceptorloss
