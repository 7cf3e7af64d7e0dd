#include "vefs/norms.hpp"

#include <cmath>
#include <stdexcept>

#include "vefs/dft.hpp"
#include "vefs/geometry.hpp"
#include "vefs/ops.hpp"

namespace vefs {

namespace {

// Squared integer-order norm |f|_n^2 = sum_kappa sum_{p<=n} (1+kappa^2)^{n-p} V_p
// with V_p the spectral energy of the p-th vertical derivative.
double spatial_integer_sq(const Scal &f, const Mesh &m, int n) {
  const int nx = m.nx, nz = m.nz;
  const double hbar = m.h.mean();
  const double wt = hbar * m.ds * m.dtc / nx; // Parseval: |c_m|^2 / nx = nx |f|^2 slice
  double total = 0.0;
  Scal d = f;
  for (int p = 0; p <= n; ++p) {
    // vertical trapezoid weights x row DFT energies
    for (int j = 0; j < nz; ++j) {
      Eigen::ArrayXd row = d.col(j);
      Eigen::VectorXcd c = dft::forward(row);
      const double wj = (j == 0 || j == nz - 1) ? 0.5 : 1.0;
      for (int mm = 0; mm < nx; ++mm) {
        const int k = dft::signed_mode(mm, nx);
        const double kap = 2.0 * M_PI * k / m.Lx;
        total += wt * wj * std::pow(1.0 + kap * kap, n - p) * std::norm(c[mm]);
      }
    }
    if (p < n) d = ops::dx2(m, d);
  }
  return total;
}

double trapez_sq(const std::vector<double> &vals_sq, double dt) {
  double s = 0.0;
  const int n = static_cast<int>(vals_sq.size());
  for (int k = 0; k < n; ++k) {
    const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
    s += w * vals_sq[k] * dt;
  }
  return s;
}

} // namespace

double spatial_norm(const Scal &f, const Mesh &m, double s) {
  if (s < 0.0) throw std::invalid_argument("spatial_norm: s must be nonnegative");
  const int n0 = static_cast<int>(std::floor(s));
  const double th = s - n0;
  const double lo = spatial_integer_sq(f, m, n0);
  if (th == 0.0) return std::sqrt(lo);
  const double hi = spatial_integer_sq(f, m, n0 + 1);
  if (lo == 0.0 || hi == 0.0) return 0.0;
  return std::sqrt(std::pow(lo, 1.0 - th) * std::pow(hi, th));
}

double surface_spatial_norm(const Surf &f, const Mesh &m, double s) {
  const int nx = m.nx;
  Eigen::VectorXcd c = dft::forward(f);
  const double wt = m.ds / nx;
  double total = 0.0;
  for (int mm = 0; mm < nx; ++mm) {
    const int k = dft::signed_mode(mm, nx);
    const double kap = 2.0 * M_PI * k / m.Lx;
    total += wt * std::pow(1.0 + kap * kap, s) * std::norm(c[mm]);
  }
  return std::sqrt(total);
}

double time_h_norm_generic(int n, double dt, double theta,
                           const std::function<double(int)> &normsq,
                           const std::function<double(int, int)> &diff_normsq) {
  if (theta < 0.0) throw std::invalid_argument("time norm: theta must be nonnegative");
  const int p = static_cast<int>(std::floor(theta));
  const double tf = theta - p;
  if (p > 0)
    throw std::invalid_argument("time_h_norm_generic: integer orders handled by caller");

  std::vector<double> vs(n);
  for (int k = 0; k < n; ++k) vs[k] = normsq(k);
  double total = trapez_sq(vs, dt);

  if (tf > 0.0) {
    double semi = 0.0;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < k; ++l) {
        const double tau = (k - l) * dt;
        semi += 2.0 * diff_normsq(k, l) / std::pow(tau, 1.0 + 2.0 * tf) * dt * dt;
      }
    total += semi;
  }
  return std::sqrt(total);
}

double time_h_norm(const Eigen::VectorXd &v, double dt, double theta) {
  std::vector<Eigen::VectorXd> samples(v.size());
  for (int k = 0; k < v.size(); ++k) samples[k] = Eigen::VectorXd::Constant(1, v[k]);
  return time_h_norm_flat(samples, dt, theta);
}

double time_h_norm_flat(const std::vector<Eigen::VectorXd> &v, double dt, double theta) {
  const int p = static_cast<int>(std::floor(theta));
  const double tf = theta - p;

  // Integer part: L^2 norms of divided differences up to order p, then the
  // Gagliardo double sum of the p-th difference quotient.
  std::vector<Eigen::VectorXd> d = v;
  double total = 0.0;
  for (int q = 0; q <= p; ++q) {
    std::vector<double> vs(d.size());
    for (size_t k = 0; k < d.size(); ++k) vs[k] = d[k].squaredNorm();
    total += trapez_sq(vs, dt);
    if (q < p) {
      if (d.size() < 2) { d.clear(); break; }
      std::vector<Eigen::VectorXd> nd(d.size() - 1);
      for (size_t k = 0; k + 1 < d.size(); ++k) nd[k] = (d[k + 1] - d[k]) / dt;
      d = std::move(nd);
    }
  }
  if (tf > 0.0 && d.size() >= 2) {
    const int n2 = static_cast<int>(d.size());
    double semi = 0.0;
    for (int k = 0; k < n2; ++k)
      for (int l = 0; l < k; ++l) {
        const double tau = (k - l) * dt;
        semi += 2.0 * (d[k] - d[l]).squaredNorm() / std::pow(tau, 1.0 + 2.0 * tf) * dt * dt;
      }
    total += semi;
  }
  return std::sqrt(total);
}

double time_h_norm_odd_reflection(const Eigen::VectorXd &v, double dt, double theta) {
  // Odd periodic extension over (-T, T], then a symbol norm on the circle.
  const int n = static_cast<int>(v.size());
  Eigen::ArrayXd w(2 * n);
  for (int k = 0; k < n; ++k) w[k] = v[k];
  w[n] = 0.0;
  for (int k = 1; k < n; ++k) w[2 * n - k] = -v[k];
  w[n] = -v[n - 1]; // closest odd continuation at the fold
  Eigen::VectorXcd c = dft::forward(w);
  const double period = 2.0 * n * dt;
  double total = 0.0;
  for (int mm = 0; mm < 2 * n; ++mm) {
    const int k = dft::signed_mode(mm, 2 * n);
    const double om = 2.0 * M_PI * k / period;
    total += dt / (2.0 * n) * std::pow(1.0 + om * om, theta) * std::norm(c[mm]);
  }
  return std::sqrt(total);
}

double k_norm(const Traj<Scal> &f, const Mesh &m, double dt, double s) {
  const int n = static_cast<int>(f.size());
  std::vector<double> hs(n);
  for (int k = 0; k < n; ++k) hs[k] = std::pow(spatial_norm(f[k], m, s), 2);
  const double part1 = std::sqrt(trapez_sq(hs, dt));

  const Scal wr = m.wq.sqrt();
  std::vector<Eigen::VectorXd> flat(n);
  for (int k = 0; k < n; ++k) {
    Scal wf = f[k] * wr;
    flat[k] = Eigen::Map<Eigen::VectorXd>(wf.data(), wf.size());
  }
  const double part2 = time_h_norm_flat(flat, dt, s / 2.0);
  return std::max(part1, part2);
}

double k_norm_surface(const Traj<Surf> &f, const Mesh &m, double dt, double s) {
  const int n = static_cast<int>(f.size());
  std::vector<double> hs(n);
  for (int k = 0; k < n; ++k) hs[k] = std::pow(surface_spatial_norm(f[k], m, s), 2);
  const double part1 = std::sqrt(trapez_sq(hs, dt));

  const double w = std::sqrt(m.ds);
  std::vector<Eigen::VectorXd> flat(n);
  for (int k = 0; k < n; ++k) flat[k] = w * f[k].matrix();
  const double part2 = time_h_norm_flat(flat, dt, s / 2.0);
  return std::max(part1, part2);
}

double ht_hs_norm(const Traj<Scal> &f, const Mesh &m, double dt, double theta, double s) {
  const int n = static_cast<int>(f.size());
  return time_h_norm_generic(
      n, dt, theta, [&](int k) { return std::pow(spatial_norm(f[k], m, s), 2); },
      [&](int k, int l) { return std::pow(spatial_norm(Scal(f[k] - f[l]), m, s), 2); });
}

double ht_hs_norm(const Traj<Ten2F> &f, const Mesh &m, double dt, double theta, double s) {
  auto comp = [&](auto sel) {
    const int n = static_cast<int>(f.size());
    return time_h_norm_generic(
        n, dt, theta, [&](int k) { return std::pow(spatial_norm(sel(f[k]), m, s), 2); },
        [&](int k, int l) {
          return std::pow(spatial_norm(Scal(sel(f[k]) - sel(f[l])), m, s), 2);
        });
  };
  const double a = comp([](const Ten2F &t) -> const Scal & { return t.xx; });
  const double b = comp([](const Ten2F &t) -> const Scal & { return t.xz; });
  const double c = comp([](const Ten2F &t) -> const Scal & { return t.zx; });
  const double d = comp([](const Ten2F &t) -> const Scal & { return t.zz; });
  return std::sqrt(a * a + b * b + c * c + d * d);
}

double fit_loglog_slope(const std::vector<double> &T, const std::vector<double> &v) {
  const int n = static_cast<int>(T.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(T[i]), y = std::log(v[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / denom;
}

ScalingReport check_integral_lemma(const Eigen::VectorXd &v, double dt, double s,
                                   double eps_prime, const std::vector<double> &T_ladder) {
  ScalingReport rep;
  rep.name = "time-integral gain";
  rep.predicted = eps_prime;
  bool all_zero = true;
  for (double T : T_ladder) {
    const int n = std::max(4, static_cast<int>(std::lround(T / dt)) + 1);
    if (n > v.size())
      throw std::invalid_argument("check_integral_lemma: ladder exceeds samples");
    Eigen::VectorXd vv = v.head(n);
    Eigen::VectorXd V(n);
    V[0] = 0.0;
    for (int k = 1; k < n; ++k) V[k] = V[k - 1] + 0.5 * dt * (vv[k] + vv[k - 1]);
    const double num = time_h_norm(V, dt, s + 1.0 - eps_prime);
    const double den = time_h_norm(vv, dt, s);
    rep.T.push_back(T);
    rep.value.push_back(den > 0 ? num / den : 0.0);
    if (den > 0.0) all_zero = false;
  }
  if (all_zero) {
    rep.vacuous = true;
    rep.pass = true;
    return rep;
  }
  rep.slope = fit_loglog_slope(rep.T, rep.value);
  rep.pass = rep.slope >= 0.8 * eps_prime;
  return rep;
}

bool SmallnessReport::all_pass() const {
  return xi_smallness.pass && vanishing_decay.pass && sup_embedding.pass &&
         product_bound.pass;
}

SmallnessReport check_smallness_lemmas(const Traj<Vec2F> &u, const Mesh &m, double dt,
                                       double r, const std::vector<double> &T_ladder) {
  SmallnessReport rep;
  const int n_total = static_cast<int>(u.size());

  // Scalar probe: the L2 magnitude history of u; initially vanishing when
  // u(0) = 0.
  Eigen::VectorXd fmag(n_total);
  for (int k = 0; k < n_total; ++k)
    fmag[k] = std::sqrt(std::pow(ops::l2_weighted(m, u[k].x), 2) +
                        std::pow(ops::l2_weighted(m, u[k].z), 2));
  const bool vacuous = fmag.maxCoeff() == 0.0;

  // (a) |xi(u)|_{A'} with A' = H^{(1+r)/2}(0,T;H^{1+r}).
  rep.xi_smallness.name = "xi smallness";
  rep.xi_smallness.predicted = 0.0;
  {
    // Deformation along the whole trajectory, then restricted per window.
    Traj<Ten2F> xi(n_total);
    GeometryState g = GeometryState::rest(m);
    xi[0] = g.xi;
    for (int k = 1; k < n_total; ++k) {
      g = advance_eta(g, u[k - 1], dt, m);
      xi[k] = g.xi;
    }
    for (double T : T_ladder) {
      const int n = std::max(3, static_cast<int>(std::lround(T / dt)) + 1);
      Traj<Ten2F> part(xi.begin(), xi.begin() + n);
      rep.xi_smallness.T.push_back(T);
      rep.xi_smallness.value.push_back(
          ht_hs_norm(part, m, dt, (1.0 + r) / 2.0, 1.0 + r));
    }
    if (vacuous) {
      rep.xi_smallness.vacuous = true;
      rep.xi_smallness.pass = true;
    } else {
      rep.xi_smallness.slope =
          fit_loglog_slope(rep.xi_smallness.T, rep.xi_smallness.value);
      rep.xi_smallness.pass = rep.xi_smallness.slope > 0.0;
    }
  }

  // (b) |f|_{H^s} <= C T^{r-s} |f|_{H^r} for initially vanishing f;
  // measured with r_b = 1, s_b = 0.
  rep.vanishing_decay.name = "initially-vanishing norm decay";
  {
    const double rb = 1.0, sb = 0.0;
    rep.vanishing_decay.predicted = rb - sb;
    for (double T : T_ladder) {
      const int n = std::max(4, static_cast<int>(std::lround(T / dt)) + 1);
      Eigen::VectorXd f = fmag.head(n);
      const double num = time_h_norm(f, dt, sb);
      const double den = time_h_norm(f, dt, rb);
      rep.vanishing_decay.T.push_back(T);
      rep.vanishing_decay.value.push_back(den > 0 ? num / den : 0.0);
    }
    if (vacuous) {
      rep.vanishing_decay.vacuous = true;
      rep.vanishing_decay.pass = true;
    } else {
      rep.vanishing_decay.slope =
          fit_loglog_slope(rep.vanishing_decay.T, rep.vanishing_decay.value);
      rep.vanishing_decay.pass = rep.vanishing_decay.slope >= 0.8 * (rb - sb);
    }
  }

  // (c) sup |v| <= C |v|_{H^{(1+r)/2}} with T-independent C for v(0) = 0.
  rep.sup_embedding.name = "sup embedding uniformity";
  {
    for (double T : T_ladder) {
      const int n = std::max(4, static_cast<int>(std::lround(T / dt)) + 1);
      Eigen::VectorXd f = fmag.head(n);
      const double den = time_h_norm(f, dt, (1.0 + r) / 2.0);
      rep.sup_embedding.T.push_back(T);
      rep.sup_embedding.value.push_back(den > 0 ? f.cwiseAbs().maxCoeff() / den : 0.0);
    }
    if (vacuous) {
      rep.sup_embedding.vacuous = true;
      rep.sup_embedding.pass = true;
    } else {
      const double lo =
          *std::min_element(rep.sup_embedding.value.begin(), rep.sup_embedding.value.end());
      const double hi =
          *std::max_element(rep.sup_embedding.value.begin(), rep.sup_embedding.value.end());
      rep.sup_embedding.slope = fit_loglog_slope(rep.sup_embedding.T, rep.sup_embedding.value);
      rep.sup_embedding.pass = lo > 0.0 && hi / lo <= 2.0;
    }
  }

  // (d) |uv|_{s'} <= C |u|_s |v|_{s'} with u(0) = 0, s' < 1/2 < s; T-uniform C.
  rep.product_bound.name = "product bound uniformity";
  {
    const double s = (1.0 + r) / 2.0, sp = r / 2.0;
    for (double T : T_ladder) {
      const int n = std::max(4, static_cast<int>(std::lround(T / dt)) + 1);
      Eigen::VectorXd uu = fmag.head(n);
      Eigen::VectorXd vv(n);
      for (int k = 0; k < n; ++k)
        vv[k] = 1.0 + 0.3 * std::cos(5.0 * k * dt); // fixed non-vanishing factor
      Eigen::VectorXd prod = uu.cwiseProduct(vv);
      const double den = time_h_norm(uu, dt, s) * time_h_norm(vv, dt, sp);
      rep.product_bound.T.push_back(T);
      rep.product_bound.value.push_back(den > 0 ? time_h_norm(prod, dt, sp) / den : 0.0);
    }
    if (vacuous) {
      rep.product_bound.vacuous = true;
      rep.product_bound.pass = true;
    } else {
      const double lo =
          *std::min_element(rep.product_bound.value.begin(), rep.product_bound.value.end());
      const double hi =
          *std::max_element(rep.product_bound.value.begin(), rep.product_bound.value.end());
      rep.product_bound.slope = fit_loglog_slope(rep.product_bound.T, rep.product_bound.value);
      rep.product_bound.pass = lo > 0.0 && hi / lo <= 2.0;
    }
  }

  return rep;
}

NegativeControlReport constant_function_control(double r, int samples_per_unit) {
  NegativeControlReport rep;
  auto ratio_at = [&](double T) {
    const int n = std::max(4, static_cast<int>(std::lround(T * samples_per_unit)) + 1);
    const double dt = T / (n - 1);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    return 1.0 / time_h_norm(v, dt, (1.0 + r) / 2.0);
  };
  rep.ratio_T1 = ratio_at(1.0);
  rep.ratio_T64 = ratio_at(1.0 / 64.0);
  rep.growth = rep.ratio_T64 / rep.ratio_T1;
  rep.pass = rep.growth >= 4.0;
  return rep;
}

} // namespace vefs
