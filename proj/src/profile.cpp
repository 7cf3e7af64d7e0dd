#include "vefs/profile.hpp"

#include <stdexcept>

#include "vefs/dft.hpp"

namespace vefs {

void DomainProfile::validate() const {
  if (zeta.size() != b.size())
    throw std::invalid_argument("profile: zeta and b sampled on different grids");
  if (n_surface() < 4)
    throw std::invalid_argument("profile: need at least 4 surface samples");
  if (Lx <= 0.0)
    throw std::invalid_argument("profile: period must be positive");
  for (int i = 0; i < n_surface(); ++i)
    if (!(zeta[i] > -b[i]))
      throw std::domain_error("profile: collapsed domain, zeta <= -b at column " +
                              std::to_string(i));
}

SurfaceDeriv::SurfaceDeriv(int n, double L, DerivMode mode) {
  if (mode == DerivMode::Spectral) {
    M_ = dft::diff_matrix(n, L);
  } else {
    M_ = Eigen::MatrixXd::Zero(n, n);
    const double h = L / n;
    for (int i = 0; i < n; ++i) {
      M_(i, (i + 1) % n) = 0.5 / h;
      M_(i, (i - 1 + n) % n) = -0.5 / h;
    }
  }
}

SurfaceGeometry make_surface_geometry(const DomainProfile &p) {
  p.validate();
  SurfaceGeometry g;
  g.ddx = SurfaceDeriv(p.n_surface(), p.Lx, p.deriv);
  g.zeta_p = g.ddx(p.zeta);
  g.zeta_pp = g.ddx(g.zeta_p);
  g.b_p = g.ddx(p.b);
  g.b_pp = g.ddx(g.b_p);
  g.sq = (1.0 + g.zeta_p.square()).sqrt();
  g.N = {-g.zeta_p / g.sq, 1.0 / g.sq};
  g.T = {1.0 / g.sq, g.zeta_p / g.sq};
  return g;
}

} // namespace vefs
