#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>

#include "vefs/field.hpp"
#include "vefs/mesh.hpp"
#include "vefs/scaling.hpp"

namespace vefs {

struct StokesRHS {
  Vec2F f;    // momentum source at nodes
  Scal a_div; // divergence data at nodes
  SurfVec2 g; // surface traction data
  Surf k;     // surface kinematic source

  static StokesRHS zero(const Mesh &m);
};

struct StokesSolution {
  Vec2F u;
  Scal q_center; // pressure on the staggered sub-grid (nx, nz-1)
  Scal q;        // pressure interpolated back to nodes
  Surf phi;

  static StokesSolution zero(const Mesh &m);
};

struct StokesResiduals {
  double momentum = 0.0;
  double divergence = 0.0;
  double traction = 0.0;
  double kinematic = 0.0;
  double max() const;
};

// One backward-Euler step of the free-boundary Stokes subproblem:
//
//   Re (u - u_prev)/dt - (1-eps) Lap u + grad q = f + div sigma
//   div u = a
//   -q N + 2(1-eps) D[u] N - alpha dT(phi N) = g - sigma N   on S_F
//   phi = phi_prev + dt (dT(u).N + k)                        on S_F
//   u = 0                                                    on S_B
//
// The surface unknown is eliminated into the traction row, so each step is
// a single sparse solve in (u, q). The factorization depends only on the
// mesh, dt and parameters and is cached across steps.
class StokesOperator {
public:
  StokesOperator(const Mesh &mesh, const DimensionlessParams &params, double dt,
                 double lin_tol = 1e-10);

  StokesSolution solve_step(const StokesSolution &prev, const StokesRHS &rhs,
                            const Sym2F &sigma) const;

  // Discrete residual norms of the four equation groups for a candidate
  // solution (relative to the data magnitude).
  StokesResiduals residual_report(const StokesSolution &sol, const StokesSolution &prev,
                                  const StokesRHS &rhs, const Sym2F &sigma) const;

  bool used_pressure_constraint() const { return pressure_constraint_; }
  const Mesh &mesh() const { return mesh_; }
  double dt() const { return dt_; }
  const DimensionlessParams &params() const { return params_; }

private:
  Eigen::VectorXd assemble_rhs(const StokesSolution &prev, const StokesRHS &rhs,
                               const Sym2F &sigma) const;

  Mesh mesh_;
  DimensionlessParams params_;
  double dt_;
  double lin_tol_;
  bool pressure_constraint_ = false;

  int n_u_ = 0, n_q_ = 0, n_ = 0;
  Eigen::SparseMatrix<double> A_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
  Eigen::MatrixXd dT_; // surface tangential derivative matrix
};

// Convenience wrapper assembling a fresh operator (tests, one-off solves).
StokesSolution solve_step(const StokesSolution &prev, const StokesRHS &rhs,
                          const Sym2F &sigma, double dt, const DimensionlessParams &params,
                          const Mesh &mesh);

// Discrete row evaluators, shared with the residual reports of the outer
// solver. Interior rows are meaningful for j = 1..nz-2 only.
Vec2F momentum_apply(const Mesh &m, const DimensionlessParams &p, double dt,
                     const Vec2F &u, const Vec2F &u_prev, const Scal &q_center,
                     const Sym2F &sigma);
Scal continuity_apply(const Mesh &m, const Vec2F &u);
SurfVec2 traction_apply(const Mesh &m, const DimensionlessParams &p, const Vec2F &u,
                        const Scal &q_center, const Sym2F &sigma, const Surf &phi);
Surf kinematic_apply(const Mesh &m, const Vec2F &u, const Surf &phi,
                     const Surf &phi_prev, double dt);

// Metric-aware nodal Laplacian (valid at interior rows) and center-to-node
// pressure gradient; both match the assembled stencils exactly.
Scal laplacian_node(const Mesh &m, const Scal &w);
Vec2F gradq_node(const Mesh &m, const Scal &q_center);

} // namespace vefs
