#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "vefs/mms.hpp"
#include "vefs/ops.hpp"
#include "vefs/stokes.hpp"

using namespace vefs;

namespace {

Mesh make_mesh(int nx, int nz, double amp = 0.0,
               DerivMode mode = DerivMode::Spectral) {
  DomainProfile p;
  p.Lx = 1.0;
  p.deriv = mode;
  p.zeta.resize(nx);
  p.b = Surf::Ones(nx);
  for (int i = 0; i < nx; ++i) p.zeta[i] = amp * std::sin(2.0 * M_PI * i / nx);
  return build_mesh(p, nx, nz);
}

DimensionlessParams base_params() {
  DimensionlessParams p;
  p.Re = 1.0;
  p.eps = 0.3;
  p.alpha = 0.2;
  p.g0 = 1.0;
  return p;
}

StokesRHS random_rhs(const Mesh &m, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  StokesRHS r = StokesRHS::zero(m);
  for (int j = 0; j < m.nz; ++j)
    for (int i = 0; i < m.nx; ++i) {
      r.f.x(i, j) = u(rng);
      r.f.z(i, j) = u(rng);
      r.a_div(i, j) = 0.1 * u(rng);
    }
  for (int i = 0; i < m.nx; ++i) {
    r.g.x[i] = u(rng);
    r.g.z[i] = u(rng);
    r.k[i] = 0.1 * u(rng);
  }
  return r;
}

} // namespace

TEST_CASE("zero data keeps the zero state exactly") {
  Mesh m = make_mesh(8, 6);
  StokesOperator op(m, base_params(), 0.05);
  StokesSolution sol = op.solve_step(StokesSolution::zero(m), StokesRHS::zero(m),
                                     Sym2F::zero(m.nx, m.nz));
  CHECK(sol.u.x.abs().maxCoeff() == 0.0);
  CHECK(sol.u.z.abs().maxCoeff() == 0.0);
  CHECK(sol.q_center.abs().maxCoeff() == 0.0);
  CHECK(sol.phi.abs().maxCoeff() == 0.0);
}

TEST_CASE("constant isotropic stress is absorbed by the pressure") {
  Mesh m = make_mesh(12, 7, 0.05);
  StokesOperator op(m, base_params(), 0.1);
  Sym2F sig = Sym2F::zero(m.nx, m.nz);
  const double c = 0.8;
  sig.xx.setConstant(c);
  sig.zz.setConstant(c);
  StokesSolution sol =
      op.solve_step(StokesSolution::zero(m), StokesRHS::zero(m), sig);
  CHECK(sol.u.x.abs().maxCoeff() < 1e-10);
  CHECK(sol.u.z.abs().maxCoeff() < 1e-10);
  CHECK((sol.q_center - c).abs().maxCoeff() < 1e-9);
}

TEST_CASE("solver is linear in the data") {
  Mesh m = make_mesh(10, 6, 0.03);
  StokesOperator op(m, base_params(), 0.05);
  StokesRHS r1 = random_rhs(m, 1), r2 = random_rhs(m, 2);
  Sym2F zero_s = Sym2F::zero(m.nx, m.nz);
  StokesSolution prev = StokesSolution::zero(m);

  const double al = 2.0, be = -0.7;
  StokesRHS rc = StokesRHS::zero(m);
  rc.f.x = al * r1.f.x + be * r2.f.x;
  rc.f.z = al * r1.f.z + be * r2.f.z;
  rc.a_div = al * r1.a_div + be * r2.a_div;
  rc.g.x = al * r1.g.x + be * r2.g.x;
  rc.g.z = al * r1.g.z + be * r2.g.z;
  rc.k = al * r1.k + be * r2.k;

  StokesSolution s1 = op.solve_step(prev, r1, zero_s);
  StokesSolution s2 = op.solve_step(prev, r2, zero_s);
  StokesSolution sc = op.solve_step(prev, rc, zero_s);
  const double scale =
      std::max(1.0, std::max(sc.u.x.abs().maxCoeff(), sc.q_center.abs().maxCoeff()));
  CHECK((sc.u.x - al * s1.u.x - be * s2.u.x).abs().maxCoeff() / scale < 1e-11);
  CHECK((sc.u.z - al * s1.u.z - be * s2.u.z).abs().maxCoeff() / scale < 1e-11);
  CHECK((sc.q_center - al * s1.q_center - be * s2.q_center).abs().maxCoeff() / scale <
        1e-11);
  CHECK((sc.phi - al * s1.phi - be * s2.phi).abs().maxCoeff() / scale < 1e-11);
}

TEST_CASE("bottom no-slip is imposed strongly") {
  Mesh m = make_mesh(10, 6, 0.02);
  StokesOperator op(m, base_params(), 0.05);
  StokesSolution sol =
      op.solve_step(StokesSolution::zero(m), random_rhs(m, 5), Sym2F::zero(m.nx, m.nz));
  for (int i = 0; i < m.nx; ++i) {
    CHECK(sol.u.x(i, 0) == 0.0);
    CHECK(sol.u.z(i, 0) == 0.0);
  }
}

TEST_CASE("discrete rows reproduce the data after a solve") {
  // the row evaluators and the assembled matrix must agree; this identity
  // backs every downstream residual report
  Mesh m = make_mesh(12, 7, 0.04);
  DimensionlessParams par = base_params();
  const double dt = 0.07;
  StokesOperator op(m, par, dt);
  StokesRHS rhs = random_rhs(m, 9);
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  Sym2F sig = Sym2F::zero(m.nx, m.nz);
  for (int j = 0; j < m.nz; ++j)
    for (int i = 0; i < m.nx; ++i) {
      sig.xx(i, j) = un(rng);
      sig.xz(i, j) = un(rng);
      sig.zz(i, j) = un(rng);
    }
  StokesSolution prev = StokesSolution::zero(m);
  for (int j = 0; j < m.nz; ++j)
    for (int i = 0; i < m.nx; ++i) {
      prev.u.x(i, j) = 0.1 * un(rng);
      prev.u.z(i, j) = 0.1 * un(rng);
    }
  for (int i = 0; i < m.nx; ++i) prev.phi[i] = 0.1 * un(rng);

  StokesSolution sol = op.solve_step(prev, rhs, sig);

  Vec2F mom = momentum_apply(m, par, dt, sol.u, prev.u, sol.q_center, sig);
  double mom_err = 0.0;
  for (int j = 1; j < m.nz - 1; ++j)
    for (int i = 0; i < m.nx; ++i) {
      mom_err = std::max(mom_err, std::abs(mom.x(i, j) - rhs.f.x(i, j)));
      mom_err = std::max(mom_err, std::abs(mom.z(i, j) - rhs.f.z(i, j)));
    }
  CHECK(mom_err < 1e-9);

  Scal cont = continuity_apply(m, sol.u) - ops::to_center(m, rhs.a_div);
  CHECK(cont.abs().maxCoeff() < 1e-10);

  SurfVec2 tr = traction_apply(m, par, sol.u, sol.q_center, sig, sol.phi);
  CHECK((tr.x - rhs.g.x).abs().maxCoeff() < 1e-9);
  CHECK((tr.z - rhs.g.z).abs().maxCoeff() < 1e-9);

  Surf kin = kinematic_apply(m, sol.u, sol.phi, prev.phi, dt) - rhs.k;
  CHECK(kin.abs().maxCoeff() < 1e-10);

  StokesResiduals res = op.residual_report(sol, prev, rhs, sig);
  CHECK(res.max() < 1e-10);
}

TEST_CASE("incompressibility after every solve") {
  Mesh m = make_mesh(16, 9, 0.05);
  StokesOperator op(m, base_params(), 0.02);
  StokesSolution prev = StokesSolution::zero(m);
  for (int step = 0; step < 5; ++step) {
    StokesRHS rhs = random_rhs(m, 100 + step);
    StokesSolution sol = op.solve_step(prev, rhs, Sym2F::zero(m.nx, m.nz));
    Scal d = continuity_apply(m, sol.u) - ops::to_center(m, rhs.a_div);
    const double rel = std::sqrt((d * d).sum()) /
                       std::max(1.0, std::sqrt(ops::to_center(m, rhs.a_div).square().sum()));
    CHECK(rel <= 1e-10);
    prev = sol;
  }
}

TEST_CASE("manufactured solution converges with order >= 1") {
  DimensionlessParams par = base_params();
  ManufacturedProblem mms;
  std::vector<double> hs, errs;
  double finest_traction = 1.0;
  for (int lev = 0; lev < 3; ++lev) {
    const int nx = 16 << lev, nz = (8 << lev) + 1;
    Mesh m = make_mesh(nx, nz, 0.0, DerivMode::Central);
    StokesOperator op(m, par, 1.0);
    StokesRHS rhs = mms.sources(m, par);
    StokesSolution prev = mms.exact(m);
    StokesSolution sol = op.solve_step(prev, rhs, Sym2F::zero(nx, nz));
    hs.push_back(1.0 / nx);
    errs.push_back(mms.velocity_error(sol, m));
    finest_traction = op.residual_report(sol, prev, rhs, Sym2F::zero(nx, nz)).traction;
  }
  const double o1 = std::log2(errs[0] / errs[1]);
  const double o2 = std::log2(errs[1] / errs[2]);
  INFO("errors ", errs[0], " ", errs[1], " ", errs[2]);
  CHECK(o1 >= 1.0);
  CHECK(o2 >= 1.0);
  CHECK(finest_traction <= 1e-8);
}

TEST_CASE("newtonian step matches an independent flat-strip assembly") {
  // eps = 0, sigma = 0, alpha = 0 on the flat strip: rebuild the same
  // backward-Euler B-grid step with plain dense linear algebra
  const int nx = 8, nz = 5;
  Mesh m = make_mesh(nx, nz);
  DimensionlessParams par;
  par.Re = 2.0;
  par.eps = 0.0;
  par.alpha = 0.0;
  const double dt = 0.1;
  const double dz = m.dtc; // h = 1

  StokesRHS rhs = random_rhs(m, 42);
  rhs.k.setZero(); // no surface sources beyond traction
  StokesOperator op(m, par, dt);
  StokesSolution sol =
      op.solve_step(StokesSolution::zero(m), rhs, Sym2F::zero(nx, nz));

  // independent assembly
  const int nu = nx * (nz - 1);
  const int nq = nx * (nz - 1);
  const int N = 2 * nu + nq;
  auto U = [&](int c, int i, int j) { return c * nu + (j - 1) * nx + ((i + nx) % nx); };
  auto Qi = [&](int i, int jc) { return 2 * nu + jc * nx + ((i + nx) % nx); };
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
  const double ds = m.ds;

  for (int c = 0; c < 2; ++c)
    for (int j = 1; j < nz - 1; ++j)
      for (int i = 0; i < nx; ++i) {
        const int r = U(c, i, j);
        A(r, U(c, i, j)) += par.Re / dt + 2.0 / (ds * ds) + 2.0 / (dz * dz);
        A(r, U(c, i + 1, j)) += -1.0 / (ds * ds);
        A(r, U(c, i - 1, j)) += -1.0 / (ds * ds);
        A(r, U(c, i, j + 1)) += -1.0 / (dz * dz);
        if (j - 1 >= 1) A(r, U(c, i, j - 1)) += -1.0 / (dz * dz);
        // center-gradient of q
        if (c == 0) {
          A(r, Qi(i, j - 1)) += 0.5 / ds;
          A(r, Qi(i, j)) += 0.5 / ds;
          A(r, Qi(i - 1, j - 1)) += -0.5 / ds;
          A(r, Qi(i - 1, j)) += -0.5 / ds;
        } else {
          A(r, Qi(i, j)) += 0.5 / dz;
          A(r, Qi(i - 1, j)) += 0.5 / dz;
          A(r, Qi(i, j - 1)) += -0.5 / dz;
          A(r, Qi(i - 1, j - 1)) += -0.5 / dz;
        }
        b[r] = (c == 0) ? rhs.f.x(i, j) : rhs.f.z(i, j);
      }
  // traction rows, N = (0,1)
  const int top = nz - 1;
  for (int i = 0; i < nx; ++i) {
    // c = 0: (du1/dz + du2/dx) = g1
    int r = U(0, i, top);
    A(r, U(0, i, top)) += 1.5 / dz;
    A(r, U(0, i, top - 1)) += -2.0 / dz;
    if (top - 2 >= 1) A(r, U(0, i, top - 2)) += 0.5 / dz;
    A(r, U(1, i + 1, top)) += 0.5 / ds;
    A(r, U(1, i - 1, top)) += -0.5 / ds;
    b[r] = rhs.g.x[i];
    // c = 1: -q_s + 2 du2/dz = g2
    r = U(1, i, top);
    A(r, U(1, i, top)) += 2.0 * 1.5 / dz;
    A(r, U(1, i, top - 1)) += -2.0 * 2.0 / dz;
    if (top - 2 >= 1) A(r, U(1, i, top - 2)) += 2.0 * 0.5 / dz;
    A(r, Qi(i, nz - 2)) += -0.75;
    A(r, Qi(i - 1, nz - 2)) += -0.75;
    A(r, Qi(i, nz - 3)) += 0.25;
    A(r, Qi(i - 1, nz - 3)) += 0.25;
    b[r] = rhs.g.z[i];
  }
  // continuity rows
  for (int jc = 0; jc < nz - 1; ++jc)
    for (int i = 0; i < nx; ++i) {
      const int r = Qi(i, jc);
      auto addu = [&](int c, int ii, int jj, double w) {
        if (jj >= 1) A(r, U(c, ii, jj)) += w;
      };
      addu(0, i, jc, -0.5 / ds);
      addu(0, i, jc + 1, -0.5 / ds);
      addu(0, i + 1, jc, 0.5 / ds);
      addu(0, i + 1, jc + 1, 0.5 / ds);
      addu(1, i, jc, -0.5 / dz);
      addu(1, i + 1, jc, -0.5 / dz);
      addu(1, i, jc + 1, 0.5 / dz);
      addu(1, i + 1, jc + 1, 0.5 / dz);
      // nodal a averaged to the center
      const int ip = (i + 1) % nx;
      b[r] = 0.25 * (rhs.a_div(i, jc) + rhs.a_div(ip, jc) + rhs.a_div(i, jc + 1) +
                     rhs.a_div(ip, jc + 1));
    }

  Eigen::VectorXd x = A.fullPivLu().solve(b);
  double err = 0.0;
  for (int j = 1; j < nz; ++j)
    for (int i = 0; i < nx; ++i) {
      err = std::max(err, std::abs(x[U(0, i, j)] - sol.u.x(i, j)));
      err = std::max(err, std::abs(x[U(1, i, j)] - sol.u.z(i, j)));
    }
  CHECK(err < 1e-10);
}

TEST_CASE("residual report scales linearly under a velocity perturbation") {
  Mesh m = make_mesh(10, 6);
  DimensionlessParams par = base_params();
  StokesOperator op(m, par, 0.05);
  StokesRHS rhs = random_rhs(m, 3);
  StokesSolution prev = StokesSolution::zero(m);
  StokesSolution sol = op.solve_step(prev, rhs, Sym2F::zero(m.nx, m.nz));

  auto mom_res = [&](double delta) {
    StokesSolution pert = sol;
    pert.u.x += delta * Scal::Ones(m.nx, m.nz) *
                (m.X2 + 1.0) * (m.X2 + 1.0); // vanishes at the bottom
    Vec2F r = momentum_apply(m, par, op.dt(), pert.u, prev.u, pert.q_center,
                             Sym2F::zero(m.nx, m.nz));
    double e = 0.0;
    for (int j = 1; j < m.nz - 1; ++j)
      for (int i = 0; i < m.nx; ++i)
        e = std::max(e, std::abs(r.x(i, j) - rhs.f.x(i, j)));
    return e;
  };
  const double r1 = mom_res(1e-3), r2 = mom_res(2e-3);
  CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("zero solution with nonzero source has the source as residual") {
  Mesh m = make_mesh(8, 5);
  DimensionlessParams par = base_params();
  StokesOperator op(m, par, 0.1);
  StokesRHS rhs = StokesRHS::zero(m);
  rhs.f.x.setConstant(1.0);
  StokesSolution zero = StokesSolution::zero(m);
  Vec2F r = momentum_apply(m, par, 0.1, zero.u, zero.u, zero.q_center,
                           Sym2F::zero(m.nx, m.nz));
  for (int j = 1; j < m.nz - 1; ++j)
    for (int i = 0; i < m.nx; ++i) {
      CHECK(r.x(i, j) - rhs.f.x(i, j) == doctest::Approx(-1.0));
    }
}
