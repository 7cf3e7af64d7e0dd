#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "vefs/fixed_point.hpp"
#include "vefs/ops.hpp"

using namespace vefs;

namespace {

Mesh make_mesh(int nx, int nz, double amp = 0.0) {
  DomainProfile p;
  p.Lx = 1.0;
  p.zeta.resize(nx);
  p.b = Surf::Ones(nx);
  for (int i = 0; i < nx; ++i) p.zeta[i] = amp * std::sin(2.0 * M_PI * i / nx);
  return build_mesh(p, nx, nz);
}

DimensionlessParams base_params() {
  DimensionlessParams p;
  p.Re = 1.0;
  p.We = 1.0;
  p.eps = 0.4;
  p.alpha = 0.3;
  p.g0 = 1.0;
  p.a = 0.8;
  return p;
}

} // namespace

TEST_CASE("compatibility: zero data on a flat strip passes") {
  Mesh m = make_mesh(8, 5);
  CompatibilityReport rep = compatibility_check(Vec2F::zero(8, 5), Sym2F::zero(8, 5), m,
                                                base_params());
  CHECK(rep.divergence < 1e-13);
  CHECK(rep.no_slip == 0.0);
  CHECK(rep.traction < 1e-13);
}

TEST_CASE("compatibility: tangential surface stress is reported") {
  const int nx = 8, nz = 5;
  Mesh m = make_mesh(nx, nz);
  Sym2F sig0 = Sym2F::zero(nx, nz);
  sig0.xz.setConstant(0.3); // N sigma T = sigma_xz on the flat strip
  CompatibilityReport rep =
      compatibility_check(Vec2F::zero(nx, nz), sig0, m, base_params());
  CHECK(rep.traction == doctest::Approx(0.3 * std::sqrt(1.0)).epsilon(1e-10));
}

TEST_CASE("compatibility: stress built to cancel the viscous term passes") {
  const int nx = 16, nz = 9;
  Mesh m = make_mesh(nx, nz);
  DimensionlessParams par = base_params();
  // divergence-free swirl vanishing at the bottom: u = curl(psi),
  // psi = s(x) p(z) with p(-1) = p'(-1) = 0
  Vec2F u0 = Vec2F::zero(nx, nz);
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nx; ++i) {
      const double x = m.X1(i, j), z = m.X2(i, j);
      const double w = 2.0 * M_PI;
      const double p = (z + 1.0) * (z + 1.0), pp = 2.0 * (z + 1.0);
      u0.x(i, j) = std::sin(w * x) * pp;     // psi_z
      u0.z(i, j) = -w * std::cos(w * x) * p; // -psi_x
    }
  // cancel (1-eps) N D[u0] T on the surface with sigma0_xz
  Sym2F sig0 = Sym2F::zero(nx, nz);
  const Sym2F D = ops::sym_grad(m, u0);
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nx; ++i) sig0.xz(i, j) = -(1.0 - par.eps) * D.xz(i, j);
  CompatibilityReport rep = compatibility_check(u0, sig0, m, par);
  CHECK(rep.no_slip < 1e-12);
  CHECK(rep.traction < 1e-8);
}

TEST_CASE("rest-state source vanishes exactly on the flat strip") {
  Mesh m = make_mesh(8, 5);
  RHSData r = zeroth_order_source(m, base_params(), 4);
  CHECK(r.g[0].x.abs().maxCoeff() < 1e-12);
  CHECK(r.g[0].z.abs().maxCoeff() < 1e-12);
  CHECK(r.f[0].x.abs().maxCoeff() == 0.0);
}

TEST_CASE("rest-state source splits into gravity and curvature parts") {
  const int nx = 32;
  Mesh m = make_mesh(nx, 6, 0.05);
  DimensionlessParams par = base_params();

  par.alpha = 0.0;
  RHSData r = zeroth_order_source(m, par, 2);
  for (int i = 0; i < nx; ++i) {
    CHECK(r.g[0].x[i] ==
          doctest::Approx(par.g0 * m.profile.zeta[i] * m.surf.N.x[i]).epsilon(1e-12));
    CHECK(r.g[0].z[i] ==
          doctest::Approx(par.g0 * m.profile.zeta[i] * m.surf.N.z[i]).epsilon(1e-12));
  }

  par.alpha = 0.7;
  par.g0 = 0.0;
  r = zeroth_order_source(m, par, 2);
  // cross-module oracle: at zero displacement the curvature term is
  // dT(T), so the source must equal -alpha * curvature
  SurfVec2 hn = curvature_term(Surf::Zero(nx), m, SurfVec2::zero(nx));
  CHECK((r.g[0].x + par.alpha * hn.x).abs().maxCoeff() < 1e-11);
  CHECK((r.g[0].z + par.alpha * hn.z).abs().maxCoeff() < 1e-11);
}

TEST_CASE("curvature remainder worked values and zero cancellation") {
  const int nx = 16;
  Mesh m = make_mesh(nx, 5);

  SurfVec2 Q = curvature_remainder(Surf::Zero(nx), m);
  CHECK(Q.x.abs().maxCoeff() == 0.0);
  CHECK(Q.z.abs().maxCoeff() == 0.0);

  const double c = 0.4;
  Q = curvature_remainder(Surf::Constant(nx, c), m);
  const double q1 = 1.0 / std::sqrt(1.0 + c * c) - 1.0;
  CHECK(Q.x(0) == doctest::Approx(q1).epsilon(1e-13));
  CHECK(Q.z(0) == doctest::Approx(c * q1).epsilon(1e-13));
}

TEST_CASE("curvature remainder is exactly the nonlinear curvature rest") {
  // T + phi N + Q(Phi) must reproduce the full curvature bracket
  const int nx = 24;
  Mesh m = make_mesh(nx, 5, 0.07);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> un(-0.3, 0.3);
  Surf phi(nx);
  for (int i = 0; i < nx; ++i) phi[i] = un(rng);
  const Surf one_zp2 = 1.0 + m.surf.zeta_p.square();
  const Surf Phi = one_zp2 * phi;
  SurfVec2 Q = curvature_remainder(Phi, m);
  const Surf slope = Phi + m.surf.zeta_p;
  const Surf denom = (1.0 + slope.square()).sqrt();
  CHECK((m.surf.T.x + phi * m.surf.N.x + Q.x - 1.0 / denom).abs().maxCoeff() < 1e-13);
  CHECK((m.surf.T.z + phi * m.surf.N.z + Q.z - slope / denom).abs().maxCoeff() < 1e-13);
}

TEST_CASE("error terms vanish identically on the undeformed state") {
  Mesh m = make_mesh(10, 6, 0.05);
  DimensionlessParams par = base_params();
  StokesOperator op(m, par, 0.05);
  ConstitutiveLaw law;
  const int n = 4;
  FlowState x = FlowState::zero(m, n, 0.05);
  // nonzero fields, zero geometry: every term must carry xi/eta/phi
  for (int k = 0; k <= n; ++k) {
    x.u[k].x.setConstant(0.7);
    x.sigma[k].xx.setConstant(0.5);
    x.q[k].setConstant(0.3);
    x.q_center[k].setConstant(0.3);
  }
  Traj<GeometryState> geom(n + 1, GeometryState::rest(m));
  RHSData E = error_terms(x, geom, op, law);
  for (int k = 0; k <= n; ++k) {
    CHECK(E.f[k].x.abs().maxCoeff() == 0.0);
    CHECK(E.a[k].abs().maxCoeff() == 0.0);
    CHECK(E.m[k].xx.abs().maxCoeff() == 0.0);
    CHECK(E.g[k].x.abs().maxCoeff() < 1e-14);
    CHECK(E.g[k].z.abs().maxCoeff() < 1e-14);
    CHECK(E.k[k].abs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("error terms scale with the expected polynomial degrees") {
  Mesh m = make_mesh(10, 6);
  DimensionlessParams par = base_params();
  par.eps = 0.0; // isolates the quadratic stress part of the third slot
  StokesOperator op(m, par, 0.05);
  ConstitutiveLaw law;
  const int n = 2;

  // fixed small geometry from a fixed displacement history
  FlowState base = FlowState::zero(m, n, 0.05);
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j < m.nz; ++j)
      for (int i = 0; i < m.nx; ++i) {
        const double x = m.X1(i, j), z = m.X2(i, j);
        base.u[k].x(i, j) = 0.3 * std::sin(2.0 * M_PI * x) * (z + 1.0);
        base.u[k].z(i, j) = 0.2 * std::cos(2.0 * M_PI * x) * (z + 1.0);
        base.sigma[k].xx(i, j) = 0.4 * std::cos(2.0 * M_PI * x);
        base.sigma[k].xz(i, j) = 0.1 * std::sin(2.0 * M_PI * x) * z;
      }
  Traj<GeometryState> geom = build_geometry(base.u, 0.05, m);

  auto scaled = [&](double lam) {
    FlowState s = base;
    for (int k = 0; k <= n; ++k) {
      s.u[k] = lam * s.u[k];
      s.sigma[k] = lam * s.sigma[k];
    }
    return error_terms(s, geom, op, law); // geometry held fixed
  };
  RHSData E1 = scaled(1.0), E2 = scaled(2.0);
  // divergence error linear in the state
  CHECK(ops::l2_weighted(m, E2.a[n]) / ops::l2_weighted(m, E1.a[n]) ==
        doctest::Approx(2.0).epsilon(1e-10));
  // stress-gradient coupling quadratic in the state (eps = 0)
  const double m1 = std::sqrt(std::pow(ops::l2_weighted(m, E1.m[n].xx), 2) +
                              2.0 * std::pow(ops::l2_weighted(m, E1.m[n].xz), 2) +
                              std::pow(ops::l2_weighted(m, E1.m[n].zz), 2));
  const double m2 = std::sqrt(std::pow(ops::l2_weighted(m, E2.m[n].xx), 2) +
                              2.0 * std::pow(ops::l2_weighted(m, E2.m[n].xz), 2) +
                              std::pow(ops::l2_weighted(m, E2.m[n].zz), 2));
  CHECK(m2 / m1 == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("traction and kinematic rows: composed equals direct") {
  // The linearized row plus rest-state source plus error term must equal
  // the full nonlinear row evaluated directly; this pins the curvature
  // remainder and the convected-normal algebra.
  const int nx = 16, nz = 6;
  Mesh m = make_mesh(nx, nz, 0.06);
  DimensionlessParams par = base_params();
  StokesOperator op(m, par, 0.04);
  ConstitutiveLaw law;
  const int n = 3;
  const double dt = 0.04;

  FlowState x = FlowState::zero(m, n, dt);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> un(-0.2, 0.2);
  for (int k = 0; k <= n; ++k) {
    for (int j = 0; j < nz; ++j)
      for (int i = 0; i < nx; ++i) {
        const double z = m.X2(i, j);
        x.u[k].x(i, j) = 0.3 * std::sin(2.0 * M_PI * m.X1(i, j) + 0.2 * k) * (z + 1.0);
        x.u[k].z(i, j) = 0.2 * std::cos(2.0 * M_PI * m.X1(i, j) - 0.1 * k) * (z + 1.0);
        x.sigma[k].xx(i, j) = un(rng);
        x.sigma[k].xz(i, j) = un(rng);
        x.sigma[k].zz(i, j) = un(rng);
      }
    for (int jc = 0; jc < nz - 1; ++jc)
      for (int i = 0; i < nx; ++i) x.q_center[k](i, jc) = un(rng);
    x.q[k] = ops::center_to_node(m, x.q_center[k]);
    for (int i = 0; i < nx; ++i) x.phi[k][i] = 0.1 * std::cos(2.0 * M_PI * i / nx + k);
  }
  x.phi[0].setZero();
  Traj<GeometryState> geom = build_geometry(x.u, dt, m);
  RHSData E = error_terms(x, geom, op, law);
  RHSData P0 = zeroth_order_source(m, par, n);

  const int k = n;
  const Surf one_zp2 = 1.0 + m.surf.zeta_p.square();
  const int top = nz - 1;

  // composed traction row
  SurfVec2 lin = traction_apply(m, par, x.u[k], x.q_center[k], x.sigma[k], x.phi[k]);
  Surf comp_x = lin.x + P0.g[k].x + E.g[k].x;
  Surf comp_z = lin.z + P0.g[k].z + E.g[k].z;

  // direct full traction row
  const SurfVec2 &calN = geom[k].calN;
  const Ten2F G = ops::grad(m, x.u[k]);
  Ten2F xb = geom[k].xi;
  xb.xx += 1.0;
  xb.zz += 1.0;
  Ten2F Gxb = {G.xx * xb.xx + G.xz * xb.zx, G.xx * xb.xz + G.xz * xb.zz,
               G.zx * xb.xx + G.zz * xb.zx, G.zx * xb.xz + G.zz * xb.zz};
  const Surf qs = ops::center_to_surface(m, x.q_center[k]);
  const Surf Phi = one_zp2 * x.phi[k];
  const Surf slope = Phi + m.surf.zeta_p;
  const Surf denom = (1.0 + slope.square()).sqrt();
  const Surf elev = m.profile.zeta + geom[k].eta.z.col(top);
  Surf dir_x = x.sigma[k].xx.col(top) * calN.x + x.sigma[k].xz.col(top) * calN.z -
               qs * calN.x +
               (1.0 - par.eps) * (2.0 * Gxb.xx.col(top) * calN.x +
                                  (Gxb.xz.col(top) + Gxb.zx.col(top)) * calN.z) +
               par.g0 * elev * calN.x - par.alpha * m.surf.dT(Surf(1.0 / denom));
  Surf dir_z = x.sigma[k].xz.col(top) * calN.x + x.sigma[k].zz.col(top) * calN.z -
               qs * calN.z +
               (1.0 - par.eps) * ((Gxb.xz.col(top) + Gxb.zx.col(top)) * calN.x +
                                  2.0 * Gxb.zz.col(top) * calN.z) +
               par.g0 * elev * calN.z - par.alpha * m.surf.dT(Surf(slope / denom));

  CHECK((comp_x - dir_x).abs().maxCoeff() < 1e-11);
  CHECK((comp_z - dir_z).abs().maxCoeff() < 1e-11);

  // composed kinematic row equals the direct slope evolution
  Surf lin_kin = kinematic_apply(m, x.u[k], x.phi[k], x.phi[k - 1], dt);
  Surf comp_kin = one_zp2 * lin_kin + E.k[k];
  SurfVec2 ut = {x.u[k].x.col(top), x.u[k].z.col(top)};
  Surf dir_kin = (one_zp2 * x.phi[k] - one_zp2 * x.phi[k - 1]) / dt -
                 phi_rate(ut, geom[k].calN, m);
  CHECK((comp_kin - dir_kin).abs().maxCoeff() < 1e-11);
}

TEST_CASE("splitting solve with zero data converges immediately to zero") {
  Mesh m = make_mesh(8, 5);
  DimensionlessParams par = base_params();
  StokesOperator op(m, par, 0.05);
  ConstitutiveLaw law;
  RHSData rhs = RHSData::zero(m, 4);
  auto [x, rep] = solve_with_initial_conditions(rhs, op, law, 1e-10, 20);
  CHECK(rep.converged);
  CHECK(rep.iterations == 1);
  CHECK(state_norm(x, m) == 0.0);
}

TEST_CASE("initial stress relaxes along the exponential envelope") {
  const int nx = 12, nz = 6;
  Mesh m = make_mesh(nx, nz);
  DimensionlessParams par = base_params();
  ConstitutiveLaw law;
  const int n = 20;
  const double T = 0.4, dt = T / n;
  StokesOperator op(m, par, dt);

  // compatible initial stress: sigma_xz vanishes on the surface row
  Sym2F sig0 = Sym2F::zero(nx, nz);
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nx; ++i) {
      sig0.xx(i, j) = 0.5 * std::cos(2.0 * M_PI * m.X1(i, j));
      sig0.xz(i, j) = -0.3 * m.X2(i, j) * (m.X2(i, j) + 1.0);
    }
  RHSData rhs = RHSData::zero(m, n);
  rhs.sigma0 = sig0;
  auto [x, rep] = solve_with_initial_conditions(rhs, op, law, 1e-10, 40);
  CHECK(rep.converged);
  // the nodal stress follows exp(-t/We) sigma0 within 5% of the initial size
  const double s0 = linf(sig0.xx);
  for (int k = 0; k <= n; ++k) {
    const double envelope = std::exp(-k * dt / par.We);
    Scal diff = x.sigma[k].xx - envelope * sig0.xx;
    CHECK(linf(diff) < 0.05 * s0);
  }
}

TEST_CASE("inner contraction factor shrinks with the window") {
  const int nx = 10, nz = 6;
  Mesh m = make_mesh(nx, nz);
  DimensionlessParams par = base_params();
  par.eps = 0.5;
  ConstitutiveLaw law;
  const int n = 8;

  // fixed smooth body force and stress source
  auto run_at = [&](double T) {
    const double dt = T / n;
    StokesOperator op(m, par, dt);
    RHSData rhs = RHSData::zero(m, n);
    for (int k = 0; k <= n; ++k)
      for (int j = 0; j < nz; ++j)
        for (int i = 0; i < nx; ++i) {
          rhs.f[k].x(i, j) = std::sin(2.0 * M_PI * m.X1(i, j));
          rhs.f[k].z(i, j) = std::cos(2.0 * M_PI * m.X1(i, j));
          rhs.m[k].xx(i, j) = 0.5 * std::cos(2.0 * M_PI * m.X1(i, j));
        }
    Traj<Vec2F> no_u;
    Traj<Sym2F> no_s;
    auto [x, rep] = picard_coupled_solve(rhs, no_u, no_s, op, law, 1e-12, 60);
    CHECK(rep.converged);
    return rep.kappa();
  };
  const double k1 = run_at(0.4), k2 = run_at(0.2), k3 = run_at(0.1);
  CHECK(k1 > k2);
  CHECK(k2 > k3);
  CHECK(fit_loglog_slope({0.4, 0.2, 0.1}, {k1, k2, k3}) > 0.0);
}

TEST_CASE("flat equilibrium is preserved to machine precision") {
  Mesh m = make_mesh(10, 6);
  DimensionlessParams par = base_params();
  ConstitutiveLaw law;
  SolveOptions opts;
  opts.tol = 1e-11;
  SolveResult res = solve_lagrangian(Vec2F::zero(10, 6), Sym2F::zero(10, 6), m, par, law,
                                     0.1, 10, opts);
  CHECK(res.outer.converged);
  for (int k = 0; k <= 10; ++k) {
    CHECK(ops::l2_weighted(m, res.total.u[k].x) < 1e-12);
    CHECK(ops::l2_weighted(m, res.total.u[k].z) < 1e-12);
    CHECK(linf(res.total.sigma[k].xx) < 1e-12);
    CHECK(res.total.phi[k].abs().maxCoeff() < 1e-12);
  }
  CHECK(res.residuals.max() < 1e-10);
}

TEST_CASE("small bump solve converges and satisfies the full system") {
  const int nx = 16, nz = 7;
  Mesh m = make_mesh(nx, nz, 0.01);
  DimensionlessParams par = base_params();
  ConstitutiveLaw law;
  law.a = par.a;
  SolveOptions opts;
  opts.tol = 1e-9;
  SolveResult res = solve_lagrangian(Vec2F::zero(nx, nz), Sym2F::zero(nx, nz), m, par,
                                     law, 0.05, 6, opts);
  CHECK(res.outer.converged);
  // full-system residuals at convergence within 10 tol
  CHECK(res.residuals.momentum <= 10.0 * opts.tol);
  CHECK(res.residuals.divergence <= 10.0 * opts.tol);
  CHECK(res.residuals.constitutive <= 10.0 * opts.tol);
  CHECK(res.residuals.traction <= 10.0 * opts.tol);
  CHECK(res.residuals.kinematic <= 10.0 * opts.tol);
}

TEST_CASE("restart transfers a rigid state consistently") {
  const int nx = 12, nz = 6;
  Mesh m = make_mesh(nx, nz, 0.02);
  GeometryState g = GeometryState::rest(m);
  // pure horizontal rigid translation of the surface
  Vec2F u = {Scal::Constant(nx, nz, 0.3), Scal::Zero(nx, nz)};
  g = advance_eta(g, u, 0.1, m);
  Vec2F u_end = u;
  Sym2F s_end = Sym2F::zero(nx, nz);
  s_end.xx.setConstant(0.7);
  RestartState rs = restart_state(m, g, u_end, s_end);
  // the translated sinusoid is again a sinusoid sampled on the same grid
  for (int i = 0; i < nx; ++i) {
    const double shifted =
        0.02 * std::sin(2.0 * M_PI * (m.s[i] - 0.03) / m.Lx);
    CHECK(rs.profile.zeta[i] == doctest::Approx(shifted).epsilon(0.02));
  }
  CHECK((rs.sigma0.xx - 0.7).abs().maxCoeff() < 1e-10);
  for (int i = 0; i < nx; ++i) {
    CHECK(rs.u0.x(i, 0) == 0.0);
    CHECK(rs.u0.z(i, 0) == 0.0);
  }
}
