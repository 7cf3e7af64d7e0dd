#include "vefs/mesh.hpp"

#include <stdexcept>

namespace vefs {

Mesh build_mesh(const DomainProfile &profile, int nx, int nz) {
  if (nx < 4 || nz < 3)
    throw std::invalid_argument("build_mesh: need nx >= 4 and nz >= 3");
  if (profile.n_surface() != nx)
    throw std::invalid_argument("build_mesh: profile sampling must match nx");
  profile.validate();

  Mesh m;
  m.nx = nx;
  m.nz = nz;
  m.Lx = profile.Lx;
  m.ds = profile.Lx / nx;
  m.dtc = 1.0 / (nz - 1);
  m.profile = profile;
  m.surf = make_surface_geometry(profile);

  m.s = Surf::LinSpaced(nx, 0.0, profile.Lx - m.ds);
  m.h = profile.zeta + profile.b;

  m.X1.resize(nx, nz);
  m.X2.resize(nx, nz);
  m.beta.resize(nx, nz);
  m.beta_s.resize(nx, nz);
  m.beta_t.resize(nx, nz);

  // X2_s = -b' + t (zeta' + b'); beta = -X2_s / h.
  const Surf &zp = m.surf.zeta_p, &bp = m.surf.b_p;
  const Surf &zpp = m.surf.zeta_pp, &bpp = m.surf.b_pp;
  const Surf hp = zp + bp;   // h'
  const Surf hpp = zpp + bpp;
  for (int j = 0; j < nz; ++j) {
    const double t = j * m.dtc;
    for (int i = 0; i < nx; ++i) {
      m.X1(i, j) = m.s[i];
      m.X2(i, j) = -profile.b[i] + t * m.h[i];
      const double mu = -bp[i] + t * hp[i];
      const double mu_s = -bpp[i] + t * hpp[i];
      m.beta(i, j) = -mu / m.h[i];
      m.beta_s(i, j) = -(mu_s * m.h[i] - mu * hp[i]) / (m.h[i] * m.h[i]);
      m.beta_t(i, j) = -hp[i] / m.h[i];
    }
  }

  // Positive Jacobian: X2_t = h > 0 checked by validate(); also make sure
  // rows do not cross (monotone X2 per column is automatic for h > 0).

  // Center metrics via midpoint averages of the nodal profile data.
  m.hc.resize(nx);
  m.beta_c.resize(nx, nz - 1);
  for (int i = 0; i < nx; ++i) {
    const int ip = (i + 1) % nx;
    m.hc[i] = 0.5 * (m.h[i] + m.h[ip]);
    const double bpc = 0.5 * (bp[i] + bp[ip]);
    const double hpc = 0.5 * (hp[i] + hp[ip]);
    for (int j = 0; j < nz - 1; ++j) {
      const double t = (j + 0.5) * m.dtc;
      m.beta_c(i, j) = -(-bpc + t * hpc) / m.hc[i];
    }
  }

  // Quadrature weights: dX = h(s) ds dt, trapezoid in t, uniform in s.
  m.wq.resize(nx, nz);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nz; ++j) {
      double wt = (j == 0 || j == nz - 1) ? 0.5 : 1.0;
      m.wq(i, j) = m.h[i] * m.ds * m.dtc * wt;
    }

  return m;
}

} // namespace vefs
