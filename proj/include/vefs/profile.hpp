#pragma once

#include <Eigen/Dense>

#include "vefs/field.hpp"

namespace vefs {

enum class DerivMode { Spectral, Central };

// Reference domain profile: initial free-surface height zeta(X1) and bottom
// depth b(X1) (bottom at X2 = -b), sampled on n_surface equispaced points of
// one period [0, Lx). Both samplings are periodic.
struct DomainProfile {
  Surf zeta;
  Surf b;
  double Lx = 1.0;
  DerivMode deriv = DerivMode::Spectral;

  int n_surface() const { return static_cast<int>(zeta.size()); }
  double dx() const { return Lx / n_surface(); }

  void validate() const; // throws on collapsed domain (zeta <= -b anywhere)
};

// X1-derivative along the surface, applied to per-column sampled functions.
// Spectral by default; 2nd-order central differences behind the fallback flag.
class SurfaceDeriv {
public:
  SurfaceDeriv() = default;
  SurfaceDeriv(int n, double L, DerivMode mode);

  Surf operator()(const Surf &f) const { return (M_ * f.matrix()).array(); }
  const Eigen::MatrixXd &matrix() const { return M_; }

private:
  Eigen::MatrixXd M_;
};

// Profile with cached surface-derivative operator and derived samplings.
struct SurfaceGeometry {
  SurfaceDeriv ddx;     // d/dX1 on surface samplings
  Surf zeta_p, zeta_pp; // zeta', zeta''
  Surf b_p, b_pp;
  Surf sq;              // sqrt(1 + zeta'^2)
  SurfVec2 N;           // unit upward normal of the initial surface
  SurfVec2 T;           // unit tangent of the initial surface

  // Tangential derivative along the initial surface: (1+zeta'^2)^(-1/2) d/dX1.
  Surf dT(const Surf &f) const { return ddx(f) / sq; }
};

SurfaceGeometry make_surface_geometry(const DomainProfile &p);

} // namespace vefs
