#include "vefs/geometry.hpp"

namespace vefs {

GeometryState GeometryState::rest(const Mesh &m) {
  GeometryState g;
  g.eta = Vec2F::zero(m.nx, m.nz);
  g.d_eta = Ten2F::zero(m.nx, m.nz);
  g.xi = Ten2F::zero(m.nx, m.nz);
  g.N = m.surf.N;
  g.calN = m.surf.N;
  g.Phi = Surf::Zero(m.nx);
  return g;
}

Ten2F xi_from_eta(const Ten2F &d_eta) {
  const int nx = static_cast<int>(d_eta.xx.rows());
  const int nz = static_cast<int>(d_eta.xx.cols());
  Ten2F xi = Ten2F::zero(nx, nz);
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nx; ++i) {
      const double a11 = 1.0 + d_eta.xx(i, j), a12 = d_eta.xz(i, j);
      const double a21 = d_eta.zx(i, j), a22 = 1.0 + d_eta.zz(i, j);
      const double det = a11 * a22 - a12 * a21;
      if (std::abs(det) < 1e-12)
        throw MeshTangled("xi_from_eta: singular deformation at node (" +
                          std::to_string(i) + "," + std::to_string(j) + ")");
      xi.xx(i, j) = a22 / det - 1.0;
      xi.xz(i, j) = -a12 / det;
      xi.zx(i, j) = -a21 / det;
      xi.zz(i, j) = a11 / det - 1.0;
    }
  return xi;
}

SurfVec2 surface_normal(const DomainProfile &profile) {
  return make_surface_geometry(profile).N;
}

Surf phi_from_eta(const SurfVec2 &eta_trace, const Mesh &m) {
  const Surf e1p = m.surf.ddx(eta_trace.x);
  const Surf e2p = m.surf.ddx(eta_trace.z);
  for (int i = 0; i < m.nx; ++i)
    if (std::abs(1.0 + e1p[i]) < 1e-10)
      throw SurfaceFolded("phi_from_eta: surface parametrization folded at column " +
                          std::to_string(i));
  return (m.surf.zeta_p + e2p) / (1.0 + e1p) - m.surf.zeta_p;
}

SurfVec2 curvature_term(const Surf &Phi, const Mesh &m, const SurfVec2 &eta_trace) {
  const Surf e1p = m.surf.ddx(eta_trace.x);
  const Surf e2p = m.surf.ddx(eta_trace.z);
  const Surf slope = Phi + m.surf.zeta_p;
  const Surf denom = (1.0 + slope.square()).sqrt();
  const Surf pref = m.surf.sq /
                    ((1.0 + e1p).square() + (m.surf.zeta_p + e2p).square()).sqrt();
  SurfVec2 hn;
  hn.x = pref * m.surf.dT(Surf(1.0 / denom));
  hn.z = pref * m.surf.dT(Surf(slope / denom));
  return hn;
}

Surf phi_rate(const SurfVec2 &u_trace, const SurfVec2 &calN, const Mesh &m) {
  for (int i = 0; i < m.nx; ++i)
    if (std::abs(calN.z[i]) < 1e-10)
      throw SurfaceOverturned("phi_rate: overturned surface at column " +
                              std::to_string(i));
  const Surf du1 = m.surf.dT(u_trace.x);
  const Surf du2 = m.surf.dT(u_trace.z);
  return (du1 * calN.x + du2 * calN.z) / calN.z.square();
}

SurfVec2 convected_normal(const SurfVec2 &eta_trace, const Mesh &m) {
  return {m.surf.N.x - m.surf.dT(eta_trace.z), m.surf.N.z + m.surf.dT(eta_trace.x)};
}

GeometryState advance_eta(const GeometryState &g, const Vec2F &u, double dt,
                          const Mesh &m) {
  if (!(dt > 0.0))
    throw std::invalid_argument("advance_eta: dt must be positive");
  GeometryState out = g;
  out.eta.x = g.eta.x + dt * u.x;
  out.eta.z = g.eta.z + dt * u.z;
  out.d_eta = {ops::dx1(m, out.eta.x), ops::dx2(m, out.eta.x),
               ops::dx1(m, out.eta.z), ops::dx2(m, out.eta.z)};
  out.xi = xi_from_eta(out.d_eta);
  out.calN = convected_normal({out.eta.x.col(m.nz - 1), out.eta.z.col(m.nz - 1)}, m);
  return out;
}

} // namespace vefs
