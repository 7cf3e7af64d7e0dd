#include "vefs/ops.hpp"

namespace vefs::ops {

Scal ds(const Mesh &m, const Scal &f) {
  const int nx = m.nx, nz = m.nz;
  Scal g(nx, nz);
  const double c = 0.5 / m.ds;
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nx; ++i) {
      const int ip = (i + 1) % nx, im = (i + nx - 1) % nx;
      g(i, j) = c * (f(ip, j) - f(im, j));
    }
  return g;
}

Scal dt(const Mesh &m, const Scal &f) {
  const int nx = m.nx, nz = m.nz;
  Scal g(nx, nz);
  const double c = 0.5 / m.dtc;
  for (int i = 0; i < nx; ++i) {
    g(i, 0) = c * (-3.0 * f(i, 0) + 4.0 * f(i, 1) - f(i, 2));
    for (int j = 1; j < nz - 1; ++j)
      g(i, j) = c * (f(i, j + 1) - f(i, j - 1));
    g(i, nz - 1) = c * (3.0 * f(i, nz - 1) - 4.0 * f(i, nz - 2) + f(i, nz - 3));
  }
  return g;
}

Scal dx1(const Mesh &m, const Scal &f) { return ds(m, f) + m.beta * dt(m, f); }

Scal dx2(const Mesh &m, const Scal &f) {
  Scal g = dt(m, f);
  for (int j = 0; j < m.nz; ++j)
    g.col(j) /= m.h;
  return g;
}

Ten2F grad(const Mesh &m, const Vec2F &u) {
  return {dx1(m, u.x), dx2(m, u.x), dx1(m, u.z), dx2(m, u.z)};
}

Sym2F sym_grad(const Mesh &m, const Vec2F &u) {
  Ten2F g = grad(m, u);
  return {g.xx, 0.5 * (g.xz + g.zx), g.zz};
}

Scal div(const Mesh &m, const Vec2F &u) { return dx1(m, u.x) + dx2(m, u.z); }

Vec2F div_sym(const Mesh &m, const Sym2F &s) {
  return {dx1(m, s.xx) + dx2(m, s.xz), dx1(m, s.xz) + dx2(m, s.zz)};
}

Surf trace(const Mesh &m, const Scal &f) { return f.col(m.nz - 1); }

SurfVec2 trace(const Mesh &m, const Vec2F &u) {
  return {u.x.col(m.nz - 1), u.z.col(m.nz - 1)};
}

Scal div_center(const Mesh &m, const Vec2F &u) {
  const int nx = m.nx, nz = m.nz;
  Scal g(nx, nz - 1);
  const double cs = 1.0 / m.ds, ct = 1.0 / m.dtc;
  for (int j = 0; j < nz - 1; ++j)
    for (int i = 0; i < nx; ++i) {
      const int ip = (i + 1) % nx;
      const double u1s =
          cs * (0.5 * (u.x(ip, j) + u.x(ip, j + 1)) - 0.5 * (u.x(i, j) + u.x(i, j + 1)));
      const double u1t =
          ct * (0.5 * (u.x(i, j + 1) + u.x(ip, j + 1)) - 0.5 * (u.x(i, j) + u.x(ip, j)));
      const double u2t =
          ct * (0.5 * (u.z(i, j + 1) + u.z(ip, j + 1)) - 0.5 * (u.z(i, j) + u.z(ip, j)));
      g(i, j) = u1s + m.beta_c(i, j) * u1t + u2t / m.hc[i];
    }
  return g;
}

Scal to_center(const Mesh &m, const Scal &f) {
  const int nx = m.nx, nz = m.nz;
  Scal g(nx, nz - 1);
  for (int j = 0; j < nz - 1; ++j)
    for (int i = 0; i < nx; ++i) {
      const int ip = (i + 1) % nx;
      g(i, j) = 0.25 * (f(i, j) + f(ip, j) + f(i, j + 1) + f(ip, j + 1));
    }
  return g;
}

Scal center_to_node(const Mesh &m, const Scal &qc) {
  const int nx = m.nx, nz = m.nz;
  Scal g(nx, nz);
  auto qbar = [&](int i, int jc) { // horizontal center pair average at node column i
    const int im = (i + nx - 1) % nx;
    return 0.5 * (qc(im, jc) + qc(i, jc));
  };
  for (int i = 0; i < nx; ++i) {
    for (int j = 1; j < nz - 1; ++j)
      g(i, j) = 0.5 * (qbar(i, j - 1) + qbar(i, j));
    g(i, 0) = 1.5 * qbar(i, 0) - 0.5 * qbar(i, 1);
    g(i, nz - 1) = 1.5 * qbar(i, nz - 2) - 0.5 * qbar(i, nz - 3);
  }
  return g;
}

Surf center_to_surface(const Mesh &m, const Scal &qc) {
  const int nx = m.nx, nz = m.nz;
  Surf g(nx);
  for (int i = 0; i < nx; ++i) {
    const int im = (i + nx - 1) % nx;
    const double q1 = 0.5 * (qc(im, nz - 2) + qc(i, nz - 2));
    const double q2 = 0.5 * (qc(im, nz - 3) + qc(i, nz - 3));
    g(i) = 1.5 * q1 - 0.5 * q2;
  }
  return g;
}

double l2_weighted(const Mesh &m, const Scal &f) {
  return std::sqrt((m.wq * f * f).sum());
}

double l2_surface(const Mesh &m, const Surf &f) {
  return std::sqrt((m.surf.sq * f * f).sum() * m.ds);
}

} // namespace vefs::ops
