#pragma once

#include <optional>
#include <string>

#include "vefs/field.hpp"
#include "vefs/geometry.hpp"
#include "vefs/mesh.hpp"
#include "vefs/scaling.hpp"

namespace vefs {

enum class LawKind { JohnsonSegalman, Giesekus, PTTExponential, PTTLinear };

// Constitutive law selection. a = 1 with JohnsonSegalman is the
// upper-convected (Oldroyd-B) limit.
struct ConstitutiveLaw {
  LawKind kind = LawKind::JohnsonSegalman;
  double a = 1.0;
  double c_giesekus = 0.0;
  double eps_ptt = 0.0;
  // The network-destruction factor is evaluated as Y(x) = exp(eps_ptt x)
  // on the discrete level; this toggle restores the We factor of the
  // continuous definition Y(x) = exp(eps_ptt We x).
  bool ptt_we_factor = false;

  void validate() const;
};

// Slip-interpolated coupling between a velocity gradient and a symmetric
// tensor:
//   g_a(G, s) = (a-1)/2 (G^T s + s G) + (a+1)/2 (s G^T + G s).
// Bilinear, symmetry preserving, affine in a.
Sym2F g_a(const Ten2F &grad_u, const Sym2F &sigma, double a);

// 3x3 matrix of the linear map s -> g_a(G, s) on (s_xx, s_xz, s_zz).
Eigen::Matrix3d ga_matrix(double gxx, double gxz, double gzx, double gzz, double a);

// 3x3 matrix of s -> (A s + s A)/2 for symmetric A.
Eigen::Matrix3d sym_product_matrix(double axx, double axz, double azz);

struct StressIntegratorInput {
  // Lagged velocity of the current sweep and optional lift trajectories;
  // empty vectors mean identically zero.
  const Traj<Vec2F> *u_n = nullptr;
  const Traj<Vec2F> *u_lift = nullptr;
  const Traj<Sym2F> *sigma_lift = nullptr;
  // Lagged total stress for the Giesekus/PTT coefficients.
  const Traj<Sym2F> *sigma_lag = nullptr;
  const Traj<Sym2F> *m = nullptr;
};

// Backward-Euler integration of the stress equation
//   s + We (ds/dt - g_a(Gn, s) - g_a(G_lift, s) - g_a(Gn, sigma_lift))
//     [+ law terms] = 2 eps D[u_n] + m,    s(0) = sigma_init,
// implicit in everything linear in the unknown, per-node 3x3 solves.
// We = 0 degenerates to the algebraic relation s = 2 eps D[u_n] + m.
Traj<Sym2F> integrate_stress(const Sym2F &sigma_init, const StressIntegratorInput &in,
                             int n_steps, double dt, const Mesh &mesh,
                             const DimensionlessParams &params,
                             const ConstitutiveLaw &law);

// One splitting sweep for the stress: previous velocity iterate drives the
// sources, lift couplings included, zero initial condition.
Traj<Sym2F> picard_sigma_step(const Traj<Sym2F> &sigma_prev, const Traj<Vec2F> &u_n,
                              const Traj<Vec2F> &u_lift, const Traj<Sym2F> &sigma_lift,
                              const Traj<Sym2F> *m, int n_steps, double dt,
                              const Mesh &mesh, const DimensionlessParams &params,
                              const ConstitutiveLaw &law);

// Initial-stress lift: s1 + We ds1/dt = m1, s1(0) = sigma0, integrated
// exactly (exponential decay plus trapezoidal convolution of m1).
Traj<Sym2F> lift_sigma1(const Sym2F &sigma0, const Traj<Sym2F> *m1, double We,
                        int n_steps, double dt);

// Residual of the full Lagrangian constitutive equation at time index k,
// with the deformed-coordinate gradient (grad u) (Id + xi) and the backward
// time difference of the stored trajectory.
Sym2F lagrangian_stress_residual(const Traj<Sym2F> &sigma, const Traj<Vec2F> &u,
                                 const GeometryState &geom, int k, double dt,
                                 const Mesh &mesh, const DimensionlessParams &params,
                                 const ConstitutiveLaw &law);

// Smallness/boundedness conditions under which the stress sweep stays
// uniformly bounded. Diagnostic only.
struct BoundCondition {
  bool satisfied = true;
  double value = 0.0; // satisfied iff value < 1
  std::string description;
};

BoundCondition giesekus_bound_condition(double c_giesekus, double S, double T0, double We);
BoundCondition ptt_bound_condition(double eps_ptt, double S, double T0);
BoundCondition velocity_smallness_condition(double V, double grad_u_lift_norm, double T0);

} // namespace vefs
