#include "vefs/scaling.hpp"

#include <stdexcept>

namespace vefs {

void PhysicalParams::validate() const {
  if (!(rho > 0.0 && mu_sol > 0.0 && g_tilde > 0.0 && L > 0.0 && U0 > 0.0))
    throw std::invalid_argument("physical parameters must be strictly positive");
  if (mu_pol < 0.0 || lambda < 0.0 || alpha_tilde < 0.0)
    throw std::invalid_argument("mu_pol, lambda, alpha_tilde must be nonnegative");
  if (!(mu_sol + mu_pol > 0.0))
    throw std::invalid_argument("total viscosity must be positive");
}

void DimensionlessParams::validate() const {
  if (!(Re > 0.0)) throw std::invalid_argument("Re must be positive");
  if (We < 0.0) throw std::invalid_argument("We must be nonnegative");
  if (!(eps >= 0.0 && eps < 1.0))
    throw std::invalid_argument("retardation ratio must lie in [0, 1)");
  if (!(a >= -1.0 && a <= 1.0))
    throw std::invalid_argument("slip parameter must lie in [-1, 1]");
}

DimensionlessParams nondimensionalize(const PhysicalParams &p) {
  p.validate();
  const double mu = p.mu_sol + p.mu_pol;
  DimensionlessParams d;
  d.Re = p.rho * p.L * p.U0 / mu;
  d.We = p.lambda * p.U0 / p.L;
  d.eps = p.mu_pol / mu;
  d.alpha = p.alpha_tilde / (p.U0 * mu);
  d.g0 = p.rho * p.g_tilde * p.L * p.L / (mu * p.U0);
  d.validate();
  return d;
}

DimensionlessFields scale_fields(const Vec2F &v_phys, const Scal &p_phys,
                                 const Sym2F &tau_phys, const PhysicalParams &pp,
                                 const Mesh &mesh) {
  pp.validate();
  const double mu = pp.mu_sol + pp.mu_pol;
  const double sp = pp.L / (mu * pp.U0); // pressure/stress scale
  DimensionlessFields f;
  f.v = {v_phys.x / pp.U0, v_phys.z / pp.U0};
  f.p = (p_phys - pp.P_atm + pp.rho * pp.g_tilde * pp.L * mesh.X2) * sp;
  f.tau = {tau_phys.xx * sp, tau_phys.xz * sp, tau_phys.zz * sp};
  return f;
}

void unscale_fields(const DimensionlessFields &f, const PhysicalParams &pp,
                    const Mesh &mesh, Vec2F &v_phys, Scal &p_phys, Sym2F &tau_phys) {
  const double mu = pp.mu_sol + pp.mu_pol;
  const double sp = mu * pp.U0 / pp.L;
  v_phys = {f.v.x * pp.U0, f.v.z * pp.U0};
  p_phys = f.p * sp + pp.P_atm - pp.rho * pp.g_tilde * pp.L * mesh.X2;
  tau_phys = {f.tau.xx * sp, f.tau.xz * sp, f.tau.zz * sp};
}

} // namespace vefs
