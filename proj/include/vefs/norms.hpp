#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vefs/field.hpp"
#include "vefs/mesh.hpp"

namespace vefs {

enum class NormKind { SpatialH, TemporalH, KComposite, SurfaceK };

struct NormSpec {
  double s_space = 0.0;
  double s_time = 0.0;
  NormKind kind = NormKind::SpatialH;
};

struct SampledTrajectory {
  Traj<Scal> values;
  double dt = 0.0;
  const Mesh *mesh = nullptr;
};

// Discrete H^s norm on the strip: DFT in the periodic direction with symbol
// (1+kappa^2)^(s/2); integer vertical orders by finite differences; the
// fractional remainder by geometric interpolation between integer orders.
// Measure convention: uniform computational-coordinate weights (exact area
// on flat strips, equivalent norm on curved ones).
double spatial_norm(const Scal &f, const Mesh &m, double s);

// Same construction for per-column surface samplings (exact in s).
double surface_spatial_norm(const Surf &f, const Mesh &m, double s);

// Fractional Sobolev norm in time of a scalar sequence on a uniform grid:
// integer part by divided differences, fractional part by the Gagliardo
// double sum (the ground-truth definition; no extension involved).
double time_h_norm(const Eigen::VectorXd &v, double dt, double theta);

// Spectral shortcut via odd reflection; valid (equivalent) only for
// initially vanishing sequences.
double time_h_norm_odd_reflection(const Eigen::VectorXd &v, double dt, double theta);

// H^theta(0,T;X) for trajectory-like data given squared X-norms of samples
// and of pairwise differences (theta < 1).
double time_h_norm_generic(int n_samples, double dt, double theta,
                           const std::function<double(int)> &normsq,
                           const std::function<double(int, int)> &diff_normsq);

// H^theta(0,T;X) of flattened (already weighted) samples, any theta >= 0.
double time_h_norm_flat(const std::vector<Eigen::VectorXd> &v, double dt, double theta);

// K^s(Omega x (0,T)) = L^2(0,T;H^s) \cap H^{s/2}(0,T;L^2): max of the two
// constituent norms.
double k_norm(const Traj<Scal> &f, const Mesh &m, double dt, double s);
double k_norm_surface(const Traj<Surf> &f, const Mesh &m, double dt, double s);

// H^{theta}(0,T; H^{s}) of a scalar trajectory (Gagliardo in time with the
// spatial norm as the value norm).
double ht_hs_norm(const Traj<Scal> &f, const Mesh &m, double dt, double theta, double s);

// Same norm for each component of a 2x2 tensor trajectory, combined in
// quadrature.
double ht_hs_norm(const Traj<Ten2F> &f, const Mesh &m, double dt, double theta, double s);

struct ScalingReport {
  std::string name;
  std::vector<double> T;
  std::vector<double> value; // measured ratio per window
  double slope = 0.0;        // fitted d log(value) / d log(T)
  double predicted = 0.0;
  bool pass = false;
  bool vacuous = false;
};

// Fits log(value) against log(T) by least squares.
double fit_loglog_slope(const std::vector<double> &T, const std::vector<double> &v);

// Scaling of the time-integral map v -> V(t) = int_0^t v:
// |V|_{s+1-eps'} / |v|_s against T; passes when the fitted slope is at
// least 0.8 eps'.
ScalingReport check_integral_lemma(const Eigen::VectorXd &v, double dt, double s,
                                   double eps_prime, const std::vector<double> &T_ladder);

struct SmallnessReport {
  ScalingReport xi_smallness;      // (a) |xi|_{A'} shrinks with T
  ScalingReport vanishing_decay;   // (b) |f|_{H^s} / |f|_{H^r} ~ T^{r-s}
  ScalingReport sup_embedding;     // (c) sup|v| / |v|_{H^{(1+r)/2}} T-uniform
  ScalingReport product_bound;     // (d) |uv|_{s'} / (|u|_s |v|_{s'}) T-uniform
  bool all_pass() const;
};

// Four scaling checks on an initially vanishing velocity trajectory.
SmallnessReport check_smallness_lemmas(const Traj<Vec2F> &u, const Mesh &m, double dt,
                                       double r, const std::vector<double> &T_ladder);

// Negative control: for a constant-in-time function the sup / H^{(1+r)/2}
// ratio must blow up as T -> 0 (measured growth from T=1 to T=1/64).
struct NegativeControlReport {
  double ratio_T1 = 0.0;
  double ratio_T64 = 0.0;
  double growth = 0.0;
  bool pass = false; // growth >= 4
};
NegativeControlReport constant_function_control(double r, int samples_per_unit = 64);

} // namespace vefs
