#pragma once

#include <optional>

#include "vefs/constitutive.hpp"
#include "vefs/field.hpp"
#include "vefs/geometry.hpp"
#include "vefs/mesh.hpp"
#include "vefs/norms.hpp"
#include "vefs/stokes.hpp"

namespace vefs {

// Space-time state of one solve window, sampled on nt+1 time levels.
struct FlowState {
  Traj<Vec2F> u;
  Traj<Scal> q_center;
  Traj<Scal> q; // nodal pressure, reconstructed from centers
  Traj<Surf> phi;
  Traj<Sym2F> sigma;
  double dt = 0.0;

  int steps() const { return static_cast<int>(u.size()) - 1; }
  static FlowState zero(const Mesh &m, int n_steps, double dt);
  FlowState &operator+=(const FlowState &o);
  friend FlowState operator+(FlowState a, const FlowState &b) { return a += b; }
  FlowState &operator-=(const FlowState &o);
  friend FlowState operator-(FlowState a, const FlowState &b) { return a -= b; }
};

// Seven-slot right-hand side: five equation sources plus initial fields.
struct RHSData {
  Traj<Vec2F> f;
  Traj<Scal> a;
  Traj<Sym2F> m;
  Traj<SurfVec2> g;
  Traj<Surf> k;
  Vec2F u0;
  Sym2F sigma0;

  static RHSData zero(const Mesh &m, int n_steps);
};

struct IterationReport {
  std::vector<double> diffs;  // successive state-difference norms
  std::vector<double> kappas; // contraction factors, from iteration 2 onward
  int iterations = 0;
  bool converged = false;
  double wall_seconds = 0.0;
  double kappa() const; // geometric mean of the recorded factors
};

// Composite norm mirroring the solution space: second differences for u,
// first differences plus sup-in-time for sigma, plain L2 for q and phi.
double state_norm(const FlowState &x, const Mesh &m);

struct CompatibilityReport {
  double divergence = 0.0;
  double no_slip = 0.0;
  double traction = 0.0;
  bool pass(double tol) const {
    return divergence <= tol && no_slip <= tol && traction <= tol;
  }
};

// Initial-data compatibility: div u0 = 0, u0 = 0 on the bottom, and the
// tangential traction balance on the surface.
CompatibilityReport compatibility_check(const Vec2F &u0, const Sym2F &sigma0,
                                        const Mesh &m, const DimensionlessParams &params);

// Source carried by the rest state: gravity of the initial surface elevation
// plus its curvature, in the traction slot only.
RHSData zeroth_order_source(const Mesh &m, const DimensionlessParams &params,
                            int n_steps);

// Q remainder of the curvature term beyond its linearization (surface
// fields; vanishes quadratically in the slope unknown).
SurfVec2 curvature_remainder(const Surf &Phi, const Mesh &m);

// Stress/Stokes splitting iteration for the zero-initial-condition problem
// with optional lift couplings; solves the five-slot system exactly in the
// structure of the outer construction.
std::pair<FlowState, IterationReport>
picard_coupled_solve(const RHSData &rhs, const Traj<Vec2F> &u_lift,
                     const Traj<Sym2F> &sigma_lift, const StokesOperator &op,
                     const ConstitutiveLaw &law, double tol, int max_iter);

// Full linearized solve with initial conditions: exponential stress lift,
// velocity lift carrying u0 and the (a, g, k) data, then the splitting
// iteration for the remainder; returns the summed solution.
std::pair<FlowState, IterationReport>
solve_with_initial_conditions(const RHSData &rhs, const StokesOperator &op,
                              const ConstitutiveLaw &law, double tol, int max_iter);

// Deformation-induced error sources of the five equations, evaluated with
// the shared discrete operators. Initial-condition slots stay zero.
RHSData error_terms(const FlowState &total, const Traj<GeometryState> &geom,
                    const StokesOperator &op, const ConstitutiveLaw &law);

// Geometry trajectory from explicit-Euler kinematics of the velocity.
Traj<GeometryState> build_geometry(const Traj<Vec2F> &u, double dt, const Mesh &m);

struct LagrangianResiduals {
  double momentum = 0.0;
  double divergence = 0.0;
  double constitutive = 0.0;
  double traction = 0.0;
  double kinematic = 0.0;
  double max() const;
};

// Discrete residuals of the five rows of the full Lagrangian system for a
// converged window (space-time L2).
LagrangianResiduals lagrangian_residual_report(const FlowState &total,
                                               const Traj<GeometryState> &geom,
                                               const StokesOperator &op,
                                               const ConstitutiveLaw &law);

struct SolveOptions {
  double tol = 1e-9;
  int max_outer = 30;
  int max_picard = 60;
  bool auto_halve = false;
  int max_halvings = 6;
  bool force_incompatible = false;
  double compat_tol = 1e-8;
  bool stub_sigma = false; // diagnostic: freeze the stress at zero
};

struct SolveResult {
  FlowState total;
  Traj<GeometryState> geom;
  IterationReport outer;
  std::vector<IterationReport> inner;
  double T_used = 0.0;
  int halvings = 0;
  LagrangianResiduals residuals;
};

// Outer contraction: lift initial conditions and the rest-state source, then
// iterate remainder <- inverse linearized problem applied to minus the
// deformation errors, until the increment norm drops below tol.
SolveResult solve_lagrangian(const Vec2F &u0, const Sym2F &sigma0, const Mesh &mesh,
                             const DimensionlessParams &params, const ConstitutiveLaw &law,
                             double T, int n_steps, const SolveOptions &opts);

// Restart data for window marching: the deformed surface resampled as a new
// profile over the fixed bottom, with end-time fields composed back onto the
// new reference mesh.
struct RestartState {
  DomainProfile profile;
  Vec2F u0;
  Sym2F sigma0;
};

RestartState restart_state(const Mesh &mesh, const GeometryState &geom_end,
                           const Vec2F &u_end, const Sym2F &sigma_end);

} // namespace vefs
