#pragma once

#include "vefs/field.hpp"
#include "vefs/mesh.hpp"

namespace vefs::ops {

// Shared nodal derivative operators on the boundary-fitted grid. Every module
// (geometry, error terms, Stokes assembly, residual reports) differentiates
// through these, so discrete residual identities hold to solver tolerance.

Scal ds(const Mesh &m, const Scal &f);  // d/ds, central, periodic
Scal dt(const Mesh &m, const Scal &f);  // d/dt, central inside, one-sided at walls
Scal dx1(const Mesh &m, const Scal &f); // d/dX1 = ds + beta dt
Scal dx2(const Mesh &m, const Scal &f); // d/dX2 = dt / h

Ten2F grad(const Mesh &m, const Vec2F &u);    // (du_i/dX_j)
Sym2F sym_grad(const Mesh &m, const Vec2F &u); // D[u]
Scal div(const Mesh &m, const Vec2F &u);
Vec2F div_sym(const Mesh &m, const Sym2F &s); // row-wise divergence of a tensor

// Surface traces (row j = nz-1).
Surf trace(const Mesh &m, const Scal &f);
SurfVec2 trace(const Mesh &m, const Vec2F &u);

// Divergence evaluated on the staggered center sub-grid (nx, nz-1).
Scal div_center(const Mesh &m, const Vec2F &u);
// Node field averaged onto centers.
Scal to_center(const Mesh &m, const Scal &f);
// Center field interpolated back to nodes (one-sided at bottom/surface rows).
Scal center_to_node(const Mesh &m, const Scal &qc);
// Surface trace of a center field by one-sided vertical extrapolation.
Surf center_to_surface(const Mesh &m, const Scal &qc);

double l2_weighted(const Mesh &m, const Scal &f); // sqrt(sum wq f^2)
double l2_surface(const Mesh &m, const Surf &f);  // arc-length weighted

} // namespace vefs::ops
