#include "vefs/constitutive.hpp"

#include <cmath>
#include <stdexcept>

#include "vefs/ops.hpp"

namespace vefs {

void ConstitutiveLaw::validate() const {
  if (!(a >= -1.0 && a <= 1.0))
    throw std::invalid_argument("law: slip parameter must lie in [-1, 1]");
  if (kind == LawKind::Giesekus && !(c_giesekus > 0.0))
    throw std::invalid_argument("law: c_giesekus must be positive");
  if ((kind == LawKind::PTTExponential || kind == LawKind::PTTLinear) && !(eps_ptt > 0.0))
    throw std::invalid_argument("law: eps_ptt must be positive");
}

Sym2F g_a(const Ten2F &G, const Sym2F &S, double a) {
  const double cm = 0.5 * (a - 1.0), cp = 0.5 * (a + 1.0);
  // A = G^T S + S G, B = S G^T + G S, both symmetric.
  Sym2F r;
  r.xx = cm * 2.0 * (G.xx * S.xx + G.zx * S.xz) + cp * 2.0 * (S.xx * G.xx + S.xz * G.xz);
  r.xz = cm * (G.xx * S.xz + G.zx * S.zz + S.xx * G.xz + S.xz * G.zz) +
         cp * (S.xx * G.zx + S.xz * G.zz + G.xx * S.xz + G.xz * S.zz);
  r.zz = cm * 2.0 * (G.xz * S.xz + G.zz * S.zz) + cp * 2.0 * (S.xz * G.zx + S.zz * G.zz);
  return r;
}

Eigen::Matrix3d ga_matrix(double gxx, double gxz, double gzx, double gzz, double a) {
  const double cm = a - 1.0, cp = a + 1.0;
  Eigen::Matrix3d M;
  M(0, 0) = 2.0 * a * gxx;
  M(0, 1) = cm * gzx + cp * gxz;
  M(0, 2) = 0.0;
  M(1, 0) = 0.5 * (cm * gxz + cp * gzx);
  M(1, 1) = a * (gxx + gzz);
  M(1, 2) = 0.5 * (cm * gzx + cp * gxz);
  M(2, 0) = 0.0;
  M(2, 1) = cm * gxz + cp * gzx;
  M(2, 2) = 2.0 * a * gzz;
  return M;
}

Eigen::Matrix3d sym_product_matrix(double axx, double axz, double azz) {
  Eigen::Matrix3d M;
  M << axx, axz, 0.0,
       0.5 * axz, 0.5 * (axx + azz), 0.5 * axz,
       0.0, axz, azz;
  return M;
}

namespace {

inline double ptt_y_minus_one(double tr, double eps_ptt, bool linear) {
  // exp form through expm1 so small traces do not cancel.
  return linear ? eps_ptt * tr : std::expm1(eps_ptt * tr);
}

struct LawTerms {
  bool giesekus = false;
  bool ptt = false;
  bool ptt_linear = false;
  double c = 0.0;
  double eps_ptt_eff = 0.0;
};

LawTerms law_terms(const ConstitutiveLaw &law, double We) {
  LawTerms t;
  switch (law.kind) {
  case LawKind::JohnsonSegalman: break;
  case LawKind::Giesekus:
    t.giesekus = true;
    t.c = law.c_giesekus;
    break;
  case LawKind::PTTExponential:
  case LawKind::PTTLinear:
    t.ptt = true;
    t.ptt_linear = (law.kind == LawKind::PTTLinear);
    t.eps_ptt_eff = law.ptt_we_factor ? law.eps_ptt * We : law.eps_ptt;
    break;
  }
  return t;
}

} // namespace

Traj<Sym2F> integrate_stress(const Sym2F &sigma_init, const StressIntegratorInput &in,
                             int n_steps, double dt, const Mesh &mesh,
                             const DimensionlessParams &params,
                             const ConstitutiveLaw &law) {
  params.validate();
  law.validate();
  const int nx = mesh.nx, nz = mesh.nz;
  const double We = params.We, eps = params.eps;
  const LawTerms lt = law_terms(law, We);

  Traj<Sym2F> sig(n_steps + 1, Sym2F::zero(nx, nz));
  sig[0] = sigma_init;

  auto at = [&](const Traj<Vec2F> *traj, int k) -> const Vec2F * {
    return (traj && !traj->empty()) ? &(*traj)[k] : nullptr;
  };
  auto at_s = [&](const Traj<Sym2F> *traj, int k) -> const Sym2F * {
    return (traj && !traj->empty()) ? &(*traj)[k] : nullptr;
  };

  for (int k = 1; k <= n_steps; ++k) {
    const Vec2F *un = at(in.u_n, k);
    const Vec2F *ul = at(in.u_lift, k);
    const Sym2F *s1 = at_s(in.sigma_lift, k);
    const Sym2F *slag = at_s(in.sigma_lag, k);
    const Sym2F *mk = at_s(in.m, k);

    Ten2F Gn = un ? ops::grad(mesh, *un) : Ten2F::zero(nx, nz);
    Ten2F Gl = ul ? ops::grad(mesh, *ul) : Ten2F::zero(nx, nz);

    // Explicit part: 2 eps D[u_n] + m + We g_a(Gn, sigma_lift) (+ law terms).
    Sym2F rhs = Sym2F::zero(nx, nz);
    if (un) {
      Sym2F D = {Gn.xx, 0.5 * (Gn.xz + Gn.zx), Gn.zz};
      rhs += 2.0 * eps * D;
    }
    if (mk) rhs += *mk;
    if (We > 0.0 && s1 && un) rhs += We * g_a(Gn, *s1, params.a);

    if (We == 0.0) {
      // Algebraic Newtonian-limit closure; the frame terms all carry We.
      sig[k] = rhs;
      continue;
    }

    const Sym2F &prev = sig[k - 1];
    for (int j = 0; j < nz; ++j)
      for (int i = 0; i < nx; ++i) {
        Eigen::Matrix3d A = (1.0 + We / dt) * Eigen::Matrix3d::Identity();
        A -= We * ga_matrix(Gn.xx(i, j), Gn.xz(i, j), Gn.zx(i, j), Gn.zz(i, j), params.a);
        if (ul)
          A -= We * ga_matrix(Gl.xx(i, j), Gl.xz(i, j), Gl.zx(i, j), Gl.zz(i, j), params.a);

        Eigen::Vector3d r(rhs.xx(i, j) + (We / dt) * prev.xx(i, j),
                          rhs.xz(i, j) + (We / dt) * prev.xz(i, j),
                          rhs.zz(i, j) + (We / dt) * prev.zz(i, j));

        // Lagged total stress drives the extra Giesekus/PTT coefficients.
        double lxx = 0.0, lxz = 0.0, lzz = 0.0;
        if (slag) { lxx = slag->xx(i, j); lxz = slag->xz(i, j); lzz = slag->zz(i, j); }
        if (s1) { lxx += s1->xx(i, j); lxz += s1->xz(i, j); lzz += s1->zz(i, j); }

        if (lt.giesekus) {
          Eigen::Matrix3d Mg = lt.c * sym_product_matrix(lxx, lxz, lzz);
          A += Mg;
          if (s1)
            r -= Mg * Eigen::Vector3d(s1->xx(i, j), s1->xz(i, j), s1->zz(i, j));
        }
        if (lt.ptt) {
          const double ym1 = ptt_y_minus_one(lxx + lzz, lt.eps_ptt_eff, lt.ptt_linear);
          A += ym1 * Eigen::Matrix3d::Identity();
          if (s1)
            r -= ym1 * Eigen::Vector3d(s1->xx(i, j), s1->xz(i, j), s1->zz(i, j));
        }

        Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
        if (!lu.isInvertible()) {
          const double cond = A.norm() / std::max(lu.rcond(), 1e-300);
          throw std::runtime_error(
              "stress integrator: singular implicit system at node (" +
              std::to_string(i) + "," + std::to_string(j) + "), step " +
              std::to_string(k) + ", condition ~" + std::to_string(cond));
        }
        Eigen::Vector3d x = lu.solve(r);
        if (!x.allFinite())
          throw std::runtime_error("stress integrator: non-finite stress at step " +
                                   std::to_string(k));
        sig[k].xx(i, j) = x[0];
        sig[k].xz(i, j) = x[1];
        sig[k].zz(i, j) = x[2];
      }
  }
  return sig;
}

Traj<Sym2F> picard_sigma_step(const Traj<Sym2F> &sigma_prev, const Traj<Vec2F> &u_n,
                              const Traj<Vec2F> &u_lift, const Traj<Sym2F> &sigma_lift,
                              const Traj<Sym2F> *m, int n_steps, double dt,
                              const Mesh &mesh, const DimensionlessParams &params,
                              const ConstitutiveLaw &law) {
  StressIntegratorInput in;
  in.u_n = &u_n;
  in.u_lift = u_lift.empty() ? nullptr : &u_lift;
  in.sigma_lift = sigma_lift.empty() ? nullptr : &sigma_lift;
  in.sigma_lag = sigma_prev.empty() ? nullptr : &sigma_prev;
  in.m = m;
  return integrate_stress(Sym2F::zero(mesh.nx, mesh.nz), in, n_steps, dt, mesh, params, law);
}

Traj<Sym2F> lift_sigma1(const Sym2F &sigma0, const Traj<Sym2F> *m1, double We,
                        int n_steps, double dt) {
  const int nx = static_cast<int>(sigma0.xx.rows());
  const int nz = static_cast<int>(sigma0.xx.cols());
  Traj<Sym2F> sig(n_steps + 1, Sym2F::zero(nx, nz));

  if (We == 0.0) {
    // Degenerate algebraic lift: sigma1 = m1 (zero without a source).
    sig[0] = sigma0;
    for (int k = 1; k <= n_steps; ++k)
      if (m1 && !m1->empty()) sig[k] = (*m1)[k];
    return sig;
  }

  const double decay = std::exp(-dt / We);
  sig[0] = sigma0;
  for (int k = 1; k <= n_steps; ++k) {
    sig[k] = decay * sig[k - 1];
    if (m1 && !m1->empty()) {
      // Trapezoidal convolution of (1/We) exp(-(t-s)/We) m1(s).
      const double w = 0.5 * dt / We;
      sig[k] += w * decay * (*m1)[k - 1] + w * (*m1)[k];
    }
  }
  return sig;
}

Sym2F lagrangian_stress_residual(const Traj<Sym2F> &sigma, const Traj<Vec2F> &u,
                                 const GeometryState &geom, int k, double dt,
                                 const Mesh &mesh, const DimensionlessParams &params,
                                 const ConstitutiveLaw &law) {
  const int nx = mesh.nx, nz = mesh.nz;
  const Ten2F G = ops::grad(mesh, u[k]);
  // Deformed-coordinate gradient Gt = G (Id + xi).
  Ten2F Gt;
  const Ten2F &xi = geom.xi;
  Gt.xx = G.xx * (1.0 + xi.xx) + G.xz * xi.zx;
  Gt.xz = G.xx * xi.xz + G.xz * (1.0 + xi.zz);
  Gt.zx = G.zx * (1.0 + xi.xx) + G.zz * xi.zx;
  Gt.zz = G.zx * xi.xz + G.zz * (1.0 + xi.zz);

  const Sym2F &s = sigma[k];
  Sym2F dsdt = (k > 0) ? Sym2F{(s.xx - sigma[k - 1].xx) / dt, (s.xz - sigma[k - 1].xz) / dt,
                               (s.zz - sigma[k - 1].zz) / dt}
                       : Sym2F::zero(nx, nz);

  Sym2F r = s;
  if (params.We > 0.0) {
    Sym2F frame = g_a(Gt, s, params.a);
    r += params.We * (dsdt - frame);
  }
  Sym2F D = {Gt.xx, 0.5 * (Gt.xz + Gt.zx), Gt.zz};
  r -= 2.0 * params.eps * D;

  switch (law.kind) {
  case LawKind::JohnsonSegalman: break;
  case LawKind::Giesekus:
    r.xx += law.c_giesekus * (s.xx * s.xx + s.xz * s.xz);
    r.xz += law.c_giesekus * (s.xx * s.xz + s.xz * s.zz);
    r.zz += law.c_giesekus * (s.xz * s.xz + s.zz * s.zz);
    break;
  case LawKind::PTTExponential:
  case LawKind::PTTLinear: {
    const double e = law.ptt_we_factor ? law.eps_ptt * params.We : law.eps_ptt;
    Scal ym1(nx, nz);
    const Scal tr = s.xx + s.zz;
    for (int j = 0; j < nz; ++j)
      for (int i = 0; i < nx; ++i)
        ym1(i, j) = ptt_y_minus_one(tr(i, j), e, law.kind == LawKind::PTTLinear);
    r.xx += ym1 * s.xx;
    r.xz += ym1 * s.xz;
    r.zz += ym1 * s.zz;
    break;
  }
  }
  return r;
}

BoundCondition giesekus_bound_condition(double c, double S, double T0, double We) {
  BoundCondition b;
  b.value = 2.0 * c * S * T0 / We;
  b.satisfied = b.value < 1.0;
  b.description = "2 c S T0 / We < 1";
  return b;
}

BoundCondition ptt_bound_condition(double eps_ptt, double S, double T0) {
  BoundCondition b;
  b.value = std::expm1(eps_ptt * S) * T0;
  b.satisfied = b.value < 1.0;
  b.description = "(exp(eps_ptt S) - 1) T0 < 1";
  return b;
}

BoundCondition velocity_smallness_condition(double V, double grad_u_lift_norm, double T0) {
  BoundCondition b;
  b.value = std::sqrt(T0) * (V + grad_u_lift_norm);
  b.satisfied = b.value < 1.0;
  b.description = "sqrt(T0) (V + |grad u_lift|) < 1";
  return b;
}

} // namespace vefs
