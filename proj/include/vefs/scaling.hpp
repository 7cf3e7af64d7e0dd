#pragma once

#include "vefs/field.hpp"
#include "vefs/mesh.hpp"

namespace vefs {

// Dimensional material and scale parameters (SI units).
struct PhysicalParams {
  double rho = 1000.0;     // density
  double mu_sol = 1.0;     // solvent viscosity
  double mu_pol = 0.0;     // polymeric viscosity
  double lambda = 0.0;     // relaxation time
  double g_tilde = 9.81;   // gravity
  double alpha_tilde = 0.0; // surface tension coefficient
  double P_atm = 101325.0;
  double L = 1.0;  // characteristic length
  double U0 = 1.0; // characteristic velocity

  void validate() const;
};

struct DimensionlessParams {
  double Re = 1.0;
  double We = 0.0;
  double eps = 0.0;   // retardation ratio, in [0, 1)
  double alpha = 0.0; // surface tension
  double g0 = 0.0;    // gravity
  double a = 1.0;     // slip parameter, in [-1, 1]

  void validate() const;
};

DimensionlessParams nondimensionalize(const PhysicalParams &p);

struct DimensionlessFields {
  Vec2F v;
  Scal p;
  Sym2F tau;
};

// Strips atmosphere and hydrostatic head from the pressure, so the rest
// state maps to exactly zero fields.
DimensionlessFields scale_fields(const Vec2F &v_phys, const Scal &p_phys,
                                 const Sym2F &tau_phys, const PhysicalParams &pp,
                                 const Mesh &mesh);

// Inverse of scale_fields.
void unscale_fields(const DimensionlessFields &f, const PhysicalParams &pp,
                    const Mesh &mesh, Vec2F &v_phys, Scal &p_phys, Sym2F &tau_phys);

} // namespace vefs
