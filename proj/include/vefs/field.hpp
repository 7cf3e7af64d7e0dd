#pragma once

#include <Eigen/Dense>
#include <vector>

namespace vefs {

// Node fields are (nx, nz) arrays indexed (i, j): i along the periodic
// horizontal direction, j from the bottom row (j = 0) to the free surface
// (j = nz-1). Surface fields carry one value per column.
using Scal = Eigen::ArrayXXd;
using Surf = Eigen::ArrayXd;

struct Vec2F {
  Scal x, z;

  static Vec2F zero(int nx, int nz) {
    return {Scal::Zero(nx, nz), Scal::Zero(nx, nz)};
  }
  Vec2F &operator+=(const Vec2F &o) { x += o.x; z += o.z; return *this; }
  Vec2F &operator-=(const Vec2F &o) { x -= o.x; z -= o.z; return *this; }
  friend Vec2F operator+(Vec2F a, const Vec2F &b) { return a += b; }
  friend Vec2F operator-(Vec2F a, const Vec2F &b) { return a -= b; }
  friend Vec2F operator*(double s, Vec2F a) { a.x *= s; a.z *= s; return a; }
};

// Symmetric 2x2 tensor field; the off-diagonal entry is stored once.
struct Sym2F {
  Scal xx, xz, zz;

  static Sym2F zero(int nx, int nz) {
    return {Scal::Zero(nx, nz), Scal::Zero(nx, nz), Scal::Zero(nx, nz)};
  }
  Sym2F &operator+=(const Sym2F &o) { xx += o.xx; xz += o.xz; zz += o.zz; return *this; }
  Sym2F &operator-=(const Sym2F &o) { xx -= o.xx; xz -= o.xz; zz -= o.zz; return *this; }
  friend Sym2F operator+(Sym2F a, const Sym2F &b) { return a += b; }
  friend Sym2F operator-(Sym2F a, const Sym2F &b) { return a -= b; }
  friend Sym2F operator*(double s, Sym2F a) { a.xx *= s; a.xz *= s; a.zz *= s; return a; }
};

// General (non-symmetric) 2x2 tensor field, e.g. velocity gradients and
// deformation tensors. Component tc(i,j) = d(component t)/d(X_c).
struct Ten2F {
  Scal xx, xz, zx, zz;

  static Ten2F zero(int nx, int nz) {
    return {Scal::Zero(nx, nz), Scal::Zero(nx, nz), Scal::Zero(nx, nz), Scal::Zero(nx, nz)};
  }
  static Ten2F identity(int nx, int nz) {
    return {Scal::Ones(nx, nz), Scal::Zero(nx, nz), Scal::Zero(nx, nz), Scal::Ones(nx, nz)};
  }
};

struct SurfVec2 {
  Surf x, z;
  static SurfVec2 zero(int nx) { return {Surf::Zero(nx), Surf::Zero(nx)}; }
  SurfVec2 &operator+=(const SurfVec2 &o) { x += o.x; z += o.z; return *this; }
  SurfVec2 &operator-=(const SurfVec2 &o) { x -= o.x; z -= o.z; return *this; }
  friend SurfVec2 operator+(SurfVec2 a, const SurfVec2 &b) { return a += b; }
  friend SurfVec2 operator-(SurfVec2 a, const SurfVec2 &b) { return a -= b; }
  friend SurfVec2 operator*(double s, SurfVec2 a) { a.x *= s; a.z *= s; return a; }
};

template <class F>
using Traj = std::vector<F>;

inline double l2(const Scal &f) { return std::sqrt((f * f).sum()); }
inline double linf(const Scal &f) { return f.abs().maxCoeff(); }

} // namespace vefs
