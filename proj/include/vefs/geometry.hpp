#pragma once

#include <stdexcept>

#include "vefs/field.hpp"
#include "vefs/mesh.hpp"
#include "vefs/ops.hpp"

namespace vefs {

struct MeshTangled : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SurfaceFolded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SurfaceOverturned : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deformation state of the Lagrangian map X -> X + eta(X, t).
struct GeometryState {
  Vec2F eta;    // displacement
  Ten2F d_eta;  // d(eta_i)/d(X_j)
  Ten2F xi;     // (Id + d_eta)^(-1) - Id
  SurfVec2 N;    // unit normal of the reference surface (time independent)
  SurfVec2 calN; // convected (non-unit) surface normal vector
  Surf Phi;     // surface slope unknown

  static GeometryState rest(const Mesh &m);
};

// Exact nodewise 2x2 inversion of Id + d_eta, minus Id. Throws MeshTangled
// when |det(Id + d_eta)| < 1e-12 at any node.
Ten2F xi_from_eta(const Ten2F &d_eta);

// Unit upward normal of the initial surface, N = (-zeta', 1)/sqrt(1+zeta'^2).
SurfVec2 surface_normal(const DomainProfile &profile);

// Surface slope unknown from the displacement trace along S_F:
// Phi = (zeta' + eta2')/(1 + eta1') - zeta' with total X1-derivatives of the
// traces. Throws SurfaceFolded when |1 + eta1'| < 1e-10.
Surf phi_from_eta(const SurfVec2 &eta_trace, const Mesh &m);

// Mean-curvature times normal of the deformed surface, written through Phi.
SurfVec2 curvature_term(const Surf &Phi, const Mesh &m, const SurfVec2 &eta_trace);

// Rate of the surface unknown: Phi_t = dT(u) . calN / calN_2^2.
// Throws SurfaceOverturned when |calN_2| < 1e-10.
Surf phi_rate(const SurfVec2 &u_trace, const SurfVec2 &calN, const Mesh &m);

// Explicit Euler kinematic update eta <- eta + dt u; recomputes d_eta, xi and
// the convected normal. Phi is left untouched (it has its own evolution).
GeometryState advance_eta(const GeometryState &g, const Vec2F &u, double dt,
                          const Mesh &m);

// Convected normal from the displacement traces:
// calN = (N1 - dT(eta2), N2 + dT(eta1)).
SurfVec2 convected_normal(const SurfVec2 &eta_trace, const Mesh &m);

} // namespace vefs
