#pragma once

#include "vefs/field.hpp"
#include "vefs/profile.hpp"

namespace vefs {

// Boundary-fitted structured mesh of the reference domain. Columns are
// equispaced in X1 over one period; each column spans X2 in [-b, zeta]
// through the stretched coordinate t in [0, 1]:
//
//   X2(s, t) = -b(s) + t (zeta(s) + b(s)),   s = X1.
//
// j = 0 is the bottom row (S_B), j = nz-1 the surface row (S_F). Pressure
// and divergence live on the staggered center sub-grid (i+1/2, j+1/2).
struct Mesh {
  int nx = 0, nz = 0;
  double Lx = 0.0, ds = 0.0, dtc = 0.0; // dtc: spacing of the stretched coordinate

  DomainProfile profile;
  SurfaceGeometry surf;

  Surf s;      // column abscissae (nx)
  Surf h;      // column heights zeta + b (nx)
  Scal X1, X2; // node coordinates (nx, nz)

  // Metric terms of the mapping at nodes: d/dX1 = d/ds + beta d/dt,
  // d/dX2 = (1/h) d/dt with beta = -X2_s / h.
  Scal beta, beta_s, beta_t;

  // Same metric terms at cell centers, plus center column heights.
  Surf hc;            // (nx), at s_{i+1/2}
  Scal beta_c;        // (nx, nz-1)

  // Trapezoidal quadrature weights for node fields (sum = domain area).
  Scal wq;

  int surface_row() const { return nz - 1; }
  int bottom_row() const { return 0; }
};

// Builds the boundary-fitted mesh. Requires nx >= 4, nz >= 3 and
// profile.n_surface() == nx; rejects collapsed profiles.
Mesh build_mesh(const DomainProfile &profile, int nx, int nz);

} // namespace vefs
