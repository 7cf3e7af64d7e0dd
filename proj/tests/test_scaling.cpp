#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "vefs/mesh.hpp"
#include "vefs/scaling.hpp"

using namespace vefs;

namespace {
Mesh flat_mesh(int nx = 8, int nz = 5) {
  DomainProfile p;
  p.Lx = 1.0;
  p.zeta = Surf::Zero(nx);
  p.b = Surf::Ones(nx);
  return build_mesh(p, nx, nz);
}
} // namespace

TEST_CASE("newtonian limit gives eps = 0") {
  PhysicalParams p;
  p.mu_pol = 0.0;
  DimensionlessParams d = nondimensionalize(p);
  CHECK(d.eps == 0.0);
}

TEST_CASE("reference values from the defining ratios") {
  PhysicalParams p;
  p.rho = 1000.0;
  p.L = 1.0;
  p.U0 = 1.0;
  p.mu_sol = 0.5;
  p.mu_pol = 0.5;
  p.lambda = 2.0;
  DimensionlessParams d = nondimensionalize(p);
  CHECK(d.Re == doctest::Approx(1000.0));
  CHECK(d.eps == doctest::Approx(0.5));
  CHECK(d.We == doctest::Approx(2.0));

  p.alpha_tilde = 0.07;
  d = nondimensionalize(p);
  CHECK(d.alpha == doctest::Approx(0.07));
}

TEST_CASE("eps = 1 is rejected") {
  DimensionlessParams d;
  d.eps = 1.0;
  CHECK_THROWS(d.validate());
}

TEST_CASE("hydrostatic rest maps to identically zero fields") {
  Mesh m = flat_mesh();
  PhysicalParams pp;
  pp.alpha_tilde = 0.01;
  Vec2F v = Vec2F::zero(m.nx, m.nz);
  Sym2F tau = Sym2F::zero(m.nx, m.nz);
  Scal p(m.nx, m.nz);
  for (int j = 0; j < m.nz; ++j)
    for (int i = 0; i < m.nx; ++i)
      p(i, j) = pp.P_atm - pp.rho * pp.g_tilde * pp.L * m.X2(i, j);
  DimensionlessFields f = scale_fields(v, p, tau, pp, m);
  CHECK(f.v.x.abs().maxCoeff() == 0.0);
  CHECK(f.p.abs().maxCoeff() < 1e-9 * pp.P_atm);
}

TEST_CASE("stress scale follows the viscosity-velocity ratio") {
  Mesh m = flat_mesh();
  PhysicalParams pp;
  pp.mu_sol = 1.0;
  pp.mu_pol = 0.0;
  pp.U0 = 1.0;
  pp.L = 1.0;
  Sym2F tau = Sym2F::zero(m.nx, m.nz);
  tau.xx.setConstant(2.0);
  DimensionlessFields f =
      scale_fields(Vec2F::zero(m.nx, m.nz), Scal::Constant(m.nx, m.nz, pp.P_atm), tau, pp, m);
  CHECK(f.tau.xx(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("scale then unscale is the identity on random fields") {
  Mesh m = flat_mesh();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PhysicalParams pp;
  pp.mu_sol = 0.7;
  pp.mu_pol = 0.2;
  pp.lambda = 0.5;
  pp.U0 = 2.0;
  pp.L = 0.5;
  Vec2F v = Vec2F::zero(m.nx, m.nz);
  Sym2F tau = Sym2F::zero(m.nx, m.nz);
  Scal p(m.nx, m.nz);
  for (int j = 0; j < m.nz; ++j)
    for (int i = 0; i < m.nx; ++i) {
      v.x(i, j) = u(rng);
      v.z(i, j) = u(rng);
      p(i, j) = pp.P_atm + 1e4 * u(rng);
      tau.xx(i, j) = u(rng);
      tau.xz(i, j) = u(rng);
      tau.zz(i, j) = u(rng);
    }
  DimensionlessFields f = scale_fields(v, p, tau, pp, m);
  Vec2F v2;
  Scal p2;
  Sym2F tau2;
  unscale_fields(f, pp, m, v2, p2, tau2);
  CHECK((v2.x - v.x).abs().maxCoeff() < 1e-14);
  CHECK((v2.z - v.z).abs().maxCoeff() < 1e-14);
  CHECK((p2 - p).abs().maxCoeff() < 1e-9);
  CHECK((tau2.xx - tau.xx).abs().maxCoeff() < 1e-14);
}
