#pragma once

#include <cmath>

#include "vefs/mesh.hpp"
#include "vefs/stokes.hpp"

namespace vefs {

// Manufactured steady solution on the flat strip (zeta = 0, b = 1): smooth
// periodic fields vanishing at the bottom, with sources obtained by
// substituting into the continuous equations. Used as the convergence
// oracle for the discrete step.
struct ManufacturedProblem {
  double U = 1.0;  // velocity amplitude
  double Q = 0.5;  // pressure amplitude
  double P = 0.1;  // surface-slope amplitude
  double Lx = 1.0;

  double kappa() const { return 2.0 * M_PI / Lx; }

  double u1(double x, double z) const {
    return U * std::sin(kappa() * x) * (z + 1.0) * (z + 1.0);
  }
  double u2(double x, double z) const {
    return U * std::cos(kappa() * x) * (z + 1.0) * (z + 1.0);
  }
  double q(double x, double z) const { return Q * std::cos(kappa() * x) * z; }
  double phi(double x) const { return P * std::cos(kappa() * x); }

  StokesSolution exact(const Mesh &m) const {
    StokesSolution s = StokesSolution::zero(m);
    for (int j = 0; j < m.nz; ++j)
      for (int i = 0; i < m.nx; ++i) {
        s.u.x(i, j) = u1(m.X1(i, j), m.X2(i, j));
        s.u.z(i, j) = u2(m.X1(i, j), m.X2(i, j));
        s.q(i, j) = q(m.X1(i, j), m.X2(i, j));
      }
    for (int jc = 0; jc < m.nz - 1; ++jc)
      for (int i = 0; i < m.nx; ++i) {
        const double xc = m.s[i] + 0.5 * m.ds;
        const double zc = -1.0 + (jc + 0.5) * m.dtc;
        s.q_center(i, jc) = q(xc, zc);
      }
    for (int i = 0; i < m.nx; ++i) s.phi[i] = phi(m.s[i]);
    return s;
  }

  StokesRHS sources(const Mesh &m, const DimensionlessParams &par) const {
    const double k = kappa(), om = 1.0 - par.eps;
    StokesRHS r = StokesRHS::zero(m);
    for (int j = 0; j < m.nz; ++j)
      for (int i = 0; i < m.nx; ++i) {
        const double x = m.X1(i, j), z = m.X2(i, j);
        const double zp = z + 1.0;
        const double lap1 = U * std::sin(k * x) * (2.0 - k * k * zp * zp);
        const double lap2 = U * std::cos(k * x) * (2.0 - k * k * zp * zp);
        r.f.x(i, j) = -om * lap1 - Q * k * std::sin(k * x) * z;
        r.f.z(i, j) = -om * lap2 + Q * std::cos(k * x);
        r.a_div(i, j) = U * std::cos(k * x) * (k * zp * zp + 2.0 * zp);
      }
    for (int i = 0; i < m.nx; ++i) {
      const double x = m.s[i];
      r.g.x[i] = om * U * (2.0 - k) * std::sin(k * x);
      r.g.z[i] = 4.0 * U * om * std::cos(k * x) + par.alpha * P * k * std::sin(k * x);
      r.k[i] = U * k * std::sin(k * x);
    }
    return r;
  }

  double velocity_error(const StokesSolution &sol, const Mesh &m) const {
    StokesSolution ex = exact(m);
    const Scal dx = sol.u.x - ex.u.x, dz = sol.u.z - ex.u.z;
    const double num = std::sqrt((m.wq * (dx * dx + dz * dz)).sum());
    const double den = std::sqrt((m.wq * (ex.u.x * ex.u.x + ex.u.z * ex.u.z)).sum());
    return num / den;
  }
};

} // namespace vefs
