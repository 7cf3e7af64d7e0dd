#include "vefs/stokes.hpp"

#include <stdexcept>
#include <vector>

#include "vefs/ops.hpp"

namespace vefs {

StokesRHS StokesRHS::zero(const Mesh &m) {
  return {Vec2F::zero(m.nx, m.nz), Scal::Zero(m.nx, m.nz), SurfVec2::zero(m.nx),
          Surf::Zero(m.nx)};
}

StokesSolution StokesSolution::zero(const Mesh &m) {
  return {Vec2F::zero(m.nx, m.nz), Scal::Zero(m.nx, m.nz - 1),
          Scal::Zero(m.nx, m.nz), Surf::Zero(m.nx)};
}

double StokesResiduals::max() const {
  return std::max(std::max(momentum, divergence), std::max(traction, kinematic));
}

Scal laplacian_node(const Mesh &m, const Scal &w) {
  const int nx = m.nx, nz = m.nz;
  Scal g = Scal::Zero(nx, nz);
  const double cs2 = 1.0 / (m.ds * m.ds), ct2 = 1.0 / (m.dtc * m.dtc);
  const double cst = 1.0 / (4.0 * m.ds * m.dtc), ct = 0.5 / m.dtc;
  for (int j = 1; j < nz - 1; ++j)
    for (int i = 0; i < nx; ++i) {
      const int ip = (i + 1) % nx, im = (i + nx - 1) % nx;
      const double b = m.beta(i, j);
      const double wss = cs2 * (w(ip, j) - 2.0 * w(i, j) + w(im, j));
      const double wst = cst * (w(ip, j + 1) - w(ip, j - 1) - w(im, j + 1) + w(im, j - 1));
      const double wtt = ct2 * (w(i, j + 1) - 2.0 * w(i, j) + w(i, j - 1));
      const double wt = ct * (w(i, j + 1) - w(i, j - 1));
      const double invh2 = 1.0 / (m.h[i] * m.h[i]);
      g(i, j) = wss + 2.0 * b * wst + (b * b + invh2) * wtt +
                (m.beta_s(i, j) + b * m.beta_t(i, j)) * wt;
    }
  return g;
}

Vec2F gradq_node(const Mesh &m, const Scal &qc) {
  const int nx = m.nx, nz = m.nz;
  Vec2F g = Vec2F::zero(nx, nz);
  const double cs = 0.5 / m.ds, ct = 0.5 / m.dtc;
  for (int j = 1; j < nz - 1; ++j)
    for (int i = 0; i < nx; ++i) {
      const int im = (i + nx - 1) % nx;
      const double qs = cs * ((qc(i, j - 1) + qc(i, j)) - (qc(im, j - 1) + qc(im, j)));
      const double qt = ct * ((qc(im, j) + qc(i, j)) - (qc(im, j - 1) + qc(i, j - 1)));
      g.x(i, j) = qs + m.beta(i, j) * qt;
      g.z(i, j) = qt / m.h[i];
    }
  return g;
}

Vec2F momentum_apply(const Mesh &m, const DimensionlessParams &p, double dt,
                     const Vec2F &u, const Vec2F &u_prev, const Scal &q_center,
                     const Sym2F &sigma) {
  const double om = 1.0 - p.eps;
  Vec2F dsig = ops::div_sym(m, sigma);
  Vec2F gq = gradq_node(m, q_center);
  Vec2F r;
  r.x = p.Re * (u.x - u_prev.x) / dt - om * laplacian_node(m, u.x) + gq.x - dsig.x;
  r.z = p.Re * (u.z - u_prev.z) / dt - om * laplacian_node(m, u.z) + gq.z - dsig.z;
  return r;
}

Scal continuity_apply(const Mesh &m, const Vec2F &u) { return ops::div_center(m, u); }

SurfVec2 traction_apply(const Mesh &m, const DimensionlessParams &p, const Vec2F &u,
                        const Scal &q_center, const Sym2F &sigma, const Surf &phi) {
  const int top = m.nz - 1;
  const double om = 1.0 - p.eps;
  const SurfVec2 &N = m.surf.N;

  const Surf qs = ops::center_to_surface(m, q_center);
  const Scal u1x = ops::dx1(m, u.x), u1z = ops::dx2(m, u.x);
  const Scal u2x = ops::dx1(m, u.z), u2z = ops::dx2(m, u.z);

  Surf d11 = u1x.col(top), d12 = Surf(0.5 * (u1z.col(top) + u2x.col(top)));
  Surf d22 = u2z.col(top);

  SurfVec2 r;
  r.x = sigma.xx.col(top) * N.x + sigma.xz.col(top) * N.z - qs * N.x +
        2.0 * om * (d11 * N.x + d12 * N.z) - p.alpha * m.surf.dT(Surf(phi * N.x));
  r.z = sigma.xz.col(top) * N.x + sigma.zz.col(top) * N.z - qs * N.z +
        2.0 * om * (d12 * N.x + d22 * N.z) - p.alpha * m.surf.dT(Surf(phi * N.z));
  return r;
}

Surf kinematic_apply(const Mesh &m, const Vec2F &u, const Surf &phi,
                     const Surf &phi_prev, double dt) {
  const int top = m.nz - 1;
  Surf w = m.surf.N.x * m.surf.dT(Surf(u.x.col(top))) +
           m.surf.N.z * m.surf.dT(Surf(u.z.col(top)));
  return (phi - phi_prev) / dt - w;
}

namespace {

struct Indexer {
  int nx, nz, nu, nq;
  explicit Indexer(const Mesh &m)
      : nx(m.nx), nz(m.nz), nu(m.nx * (m.nz - 1)), nq(m.nx * (m.nz - 1)) {}
  // velocity dof, component c, node (i, j), j >= 1
  int u(int c, int i, int j) const { return c * nu + (j - 1) * nx + i; }
  int q(int i, int jc) const { return 2 * nu + jc * nx + i; }
  int total() const { return 2 * nu + nq; }
};

} // namespace

StokesOperator::StokesOperator(const Mesh &mesh, const DimensionlessParams &params,
                               double dt, double lin_tol)
    : mesh_(mesh), params_(params), dt_(dt), lin_tol_(lin_tol) {
  if (!(dt > 0.0)) throw std::invalid_argument("stokes: dt must be positive");
  params.validate();
  const int nx = mesh_.nx, nz = mesh_.nz;
  if (nz < 3) throw std::invalid_argument("stokes: need nz >= 3");

  Indexer ix(mesh_);
  n_u_ = 2 * ix.nu;
  n_q_ = ix.nq;
  n_ = ix.total();

  // Tangential derivative matrix on the surface row.
  dT_ = mesh_.surf.ddx.matrix();
  for (int i = 0; i < nx; ++i) dT_.row(i) /= mesh_.surf.sq[i];

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(n_) * 16 + static_cast<size_t>(nx) * nx * 4);
  auto add = [&](int r, int c, double v) {
    if (v != 0.0) trip.emplace_back(r, c, v);
  };
  // Velocity columns at the bottom row are not unknowns (no-slip).
  auto addu = [&](int r, int c, int i, int j, double v) {
    if (j >= 1) add(r, ix.u(c, (i + nx) % nx, j), v);
  };

  const double om = 1.0 - params_.eps;
  const double cs2 = 1.0 / (mesh_.ds * mesh_.ds), ct2 = 1.0 / (mesh_.dtc * mesh_.dtc);
  const double cst = 1.0 / (4.0 * mesh_.ds * mesh_.dtc), ctc = 0.5 / mesh_.dtc;
  const double cs = 0.5 / mesh_.ds;

  // Momentum rows at interior nodes.
  for (int c = 0; c < 2; ++c)
    for (int j = 1; j < nz - 1; ++j)
      for (int i = 0; i < nx; ++i) {
        const int row = ix.u(c, i, j);
        const double b = mesh_.beta(i, j);
        const double invh2 = 1.0 / (mesh_.h[i] * mesh_.h[i]);
        const double bt = mesh_.beta_s(i, j) + b * mesh_.beta_t(i, j);

        add(row, ix.u(c, i, j), params_.Re / dt_ + om * (2.0 * cs2 + 2.0 * (b * b + invh2) * ct2));
        addu(row, c, i + 1, j, -om * cs2);
        addu(row, c, i - 1, j, -om * cs2);
        addu(row, c, i, j + 1, -om * ((b * b + invh2) * ct2 + bt * ctc));
        addu(row, c, i, j - 1, -om * ((b * b + invh2) * ct2 - bt * ctc));
        addu(row, c, i + 1, j + 1, -om * 2.0 * b * cst);
        addu(row, c, i + 1, j - 1, om * 2.0 * b * cst);
        addu(row, c, i - 1, j + 1, om * 2.0 * b * cst);
        addu(row, c, i - 1, j - 1, -om * 2.0 * b * cst);

        // pressure gradient from the four surrounding centers
        const int im = (i + nx - 1) % nx;
        if (c == 0) {
          add(row, ix.q(i, j - 1), cs - b * ctc);
          add(row, ix.q(i, j), cs + b * ctc);
          add(row, ix.q(im, j - 1), -cs - b * ctc);
          add(row, ix.q(im, j), -cs + b * ctc);
        } else {
          const double cth = ctc / mesh_.h[i];
          add(row, ix.q(i, j), cth);
          add(row, ix.q(im, j), cth);
          add(row, ix.q(i, j - 1), -cth);
          add(row, ix.q(im, j - 1), -cth);
        }
      }

  // Traction rows at surface nodes.
  const int top = nz - 1;
  const SurfVec2 &N = mesh_.surf.N;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < nx; ++i) {
      const int row = ix.u(c, i, top);
      const int im = (i + nx - 1) % nx;
      const double Nc = (c == 0) ? N.x[i] : N.z[i];

      // -q_surf N_c, with one-sided extrapolation from the two top center rows
      add(row, ix.q(i, nz - 2), -0.75 * Nc);
      add(row, ix.q(im, nz - 2), -0.75 * Nc);
      add(row, ix.q(i, nz - 3), 0.25 * Nc);
      add(row, ix.q(im, nz - 3), 0.25 * Nc);

      // 2 (1-eps) D[u] N: derivative stencils at the surface row.
      const double b = mesh_.beta(i, top);
      const double invh = 1.0 / mesh_.h[i];
      // d/dX1 = central in s + one-sided beta d/dt; d/dX2 = one-sided /h.
      struct Entry { int c, i, j; double w; };
      auto for_dx1 = [&](int comp, double scale, auto &&sink) {
        sink(Entry{comp, i + 1, top, scale * cs});
        sink(Entry{comp, i - 1, top, -scale * cs});
        sink(Entry{comp, i, top, scale * b * 3.0 * ctc});
        sink(Entry{comp, i, top - 1, -scale * b * 4.0 * ctc});
        sink(Entry{comp, i, top - 2, scale * b * ctc});
      };
      auto for_dx2 = [&](int comp, double scale, auto &&sink) {
        sink(Entry{comp, i, top, scale * invh * 3.0 * ctc});
        sink(Entry{comp, i, top - 1, -scale * invh * 4.0 * ctc});
        sink(Entry{comp, i, top - 2, scale * invh * ctc});
      };
      auto sink = [&](const Entry &e) { addu(row, e.c, e.i, e.j, e.w); };

      if (c == 0) {
        // (1-eps)[2 u1_x N1 + (u1_z + u2_x) N2]
        for_dx1(0, 2.0 * om * N.x[i], sink);
        for_dx2(0, om * N.z[i], sink);
        for_dx1(1, om * N.z[i], sink);
      } else {
        // (1-eps)[(u2_x + u1_z) N1 + 2 u2_z N2]
        for_dx1(1, om * N.x[i], sink);
        for_dx2(0, om * N.x[i], sink);
        for_dx2(1, 2.0 * om * N.z[i], sink);
      }
    }

  // Implicit surface-tension blocks: -alpha dt dT( (dT u . N) N ).
  if (params_.alpha != 0.0) {
    for (int c = 0; c < 2; ++c)
      for (int cp = 0; cp < 2; ++cp) {
        // block = dT diag(N_c N_cp) dT
        Eigen::MatrixXd mid = dT_;
        for (int l = 0; l < nx; ++l) {
          const double Ncl = (c == 0) ? N.x[l] : N.z[l];
          const double Npl = (cp == 0) ? N.x[l] : N.z[l];
          mid.row(l) *= Ncl * Npl;
        }
        const Eigen::MatrixXd block = dT_ * mid;
        for (int i = 0; i < nx; ++i)
          for (int mcol = 0; mcol < nx; ++mcol)
            add(ix.u(c, i, top), ix.u(cp, mcol, top),
                -params_.alpha * dt_ * block(i, mcol));
      }
  }

  // Continuity rows at centers.
  for (int jc = 0; jc < nz - 1; ++jc)
    for (int i = 0; i < nx; ++i) {
      const int row = ix.q(i, jc);
      const int ip = (i + 1) % nx;
      const double bc = mesh_.beta_c(i, jc);
      const double cth = ctc / mesh_.hc[i];
      addu(row, 0, i, jc, -cs - bc * ctc);
      addu(row, 0, i, jc + 1, -cs + bc * ctc);
      addu(row, 0, ip, jc, cs - bc * ctc);
      addu(row, 0, ip, jc + 1, cs + bc * ctc);
      addu(row, 1, i, jc, -cth);
      addu(row, 1, ip, jc, -cth);
      addu(row, 1, i, jc + 1, cth);
      addu(row, 1, ip, jc + 1, cth);
    }

  A_.resize(n_, n_);
  A_.setFromTriplets(trip.begin(), trip.end());
  A_.makeCompressed();

  lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  lu_->compute(A_);
  if (lu_->info() != Eigen::Success) {
    // Rank-deficient pressure: border with a mean-pressure constraint.
    pressure_constraint_ = true;
    std::vector<Eigen::Triplet<double>> trip2 = trip;
    for (int k = 0; k < n_q_; ++k) {
      trip2.emplace_back(2 * ix.nu + k, n_, 1.0);
      trip2.emplace_back(n_, 2 * ix.nu + k, 1.0);
    }
    Eigen::SparseMatrix<double> A2(n_ + 1, n_ + 1);
    A2.setFromTriplets(trip2.begin(), trip2.end());
    A2.makeCompressed();
    A_ = A2;
    lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu_->compute(A_);
    if (lu_->info() != Eigen::Success)
      throw std::runtime_error("stokes: factorization failed even with pressure constraint");
  }
}

Eigen::VectorXd StokesOperator::assemble_rhs(const StokesSolution &prev,
                                             const StokesRHS &rhs, const Sym2F &sigma) const {
  const int nx = mesh_.nx, nz = mesh_.nz;
  Indexer ix(mesh_);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(pressure_constraint_ ? n_ + 1 : n_);

  const Vec2F dsig = ops::div_sym(mesh_, sigma);
  for (int j = 1; j < nz - 1; ++j)
    for (int i = 0; i < nx; ++i) {
      b[ix.u(0, i, j)] = rhs.f.x(i, j) + dsig.x(i, j) + params_.Re / dt_ * prev.u.x(i, j);
      b[ix.u(1, i, j)] = rhs.f.z(i, j) + dsig.z(i, j) + params_.Re / dt_ * prev.u.z(i, j);
    }

  const int top = nz - 1;
  const SurfVec2 &N = mesh_.surf.N;
  const Surf sNx = sigma.xx.col(top) * N.x + sigma.xz.col(top) * N.z;
  const Surf sNz = sigma.xz.col(top) * N.x + sigma.zz.col(top) * N.z;
  const Surf phi_expl = prev.phi + dt_ * rhs.k;
  const Surf tx = (dT_ * (phi_expl * N.x).matrix()).array();
  const Surf tz = (dT_ * (phi_expl * N.z).matrix()).array();
  for (int i = 0; i < nx; ++i) {
    b[ix.u(0, i, top)] = rhs.g.x[i] - sNx[i] + params_.alpha * tx[i];
    b[ix.u(1, i, top)] = rhs.g.z[i] - sNz[i] + params_.alpha * tz[i];
  }

  const Scal ac = ops::to_center(mesh_, rhs.a_div);
  for (int jc = 0; jc < nz - 1; ++jc)
    for (int i = 0; i < nx; ++i) b[ix.q(i, jc)] = ac(i, jc);

  return b;
}

StokesSolution StokesOperator::solve_step(const StokesSolution &prev, const StokesRHS &rhs,
                                          const Sym2F &sigma) const {
  const int nx = mesh_.nx, nz = mesh_.nz;
  Indexer ix(mesh_);
  Eigen::VectorXd b = assemble_rhs(prev, rhs, sigma);
  Eigen::VectorXd x = lu_->solve(b);
  const double rel = (A_ * x - b).norm() / std::max(b.norm(), 1.0);
  if (!x.allFinite() || rel > std::max(lin_tol_, 1e-12) * 1e2)
    throw std::runtime_error("stokes: linear solver breakdown, relative residual " +
                             std::to_string(rel));

  StokesSolution sol = StokesSolution::zero(mesh_);
  for (int j = 1; j < nz; ++j)
    for (int i = 0; i < nx; ++i) {
      sol.u.x(i, j) = x[ix.u(0, i, j)];
      sol.u.z(i, j) = x[ix.u(1, i, j)];
    }
  for (int jc = 0; jc < nz - 1; ++jc)
    for (int i = 0; i < nx; ++i) sol.q_center(i, jc) = x[ix.q(i, jc)];
  sol.q = ops::center_to_node(mesh_, sol.q_center);

  const int top = nz - 1;
  Surf w = mesh_.surf.N.x * (dT_ * sol.u.x.col(top).matrix()).array() +
           mesh_.surf.N.z * (dT_ * sol.u.z.col(top).matrix()).array();
  sol.phi = prev.phi + dt_ * (w + rhs.k);
  return sol;
}

StokesResiduals StokesOperator::residual_report(const StokesSolution &sol,
                                                const StokesSolution &prev,
                                                const StokesRHS &rhs,
                                                const Sym2F &sigma) const {
  const int nz = mesh_.nz;
  StokesResiduals r;

  Vec2F mom = momentum_apply(mesh_, params_, dt_, sol.u, prev.u, sol.q_center, sigma);
  double num = 0.0, den = 0.0;
  for (int j = 1; j < nz - 1; ++j)
    for (int i = 0; i < mesh_.nx; ++i) {
      const double target_x = rhs.f.x(i, j), target_z = rhs.f.z(i, j);
      num += std::pow(mom.x(i, j) - target_x, 2) + std::pow(mom.z(i, j) - target_z, 2);
      den += target_x * target_x + target_z * target_z;
    }
  r.momentum = std::sqrt(num) / std::max(std::sqrt(den), 1.0);

  Scal div = continuity_apply(mesh_, sol.u) - ops::to_center(mesh_, rhs.a_div);
  r.divergence = std::sqrt((div * div).sum()) /
                 std::max(std::sqrt((ops::to_center(mesh_, rhs.a_div)).square().sum()), 1.0);

  SurfVec2 tr = traction_apply(mesh_, params_, sol.u, sol.q_center, sigma, sol.phi);
  const Surf rx = tr.x - rhs.g.x, rz = tr.z - rhs.g.z;
  r.traction = std::sqrt((rx * rx + rz * rz).sum()) /
               std::max(std::sqrt((rhs.g.x * rhs.g.x + rhs.g.z * rhs.g.z).sum()), 1.0);

  Surf kin = kinematic_apply(mesh_, sol.u, sol.phi, prev.phi, dt_) - rhs.k;
  r.kinematic = std::sqrt((kin * kin).sum()) /
                std::max(std::sqrt((rhs.k * rhs.k).sum()), 1.0);
  return r;
}

StokesSolution solve_step(const StokesSolution &prev, const StokesRHS &rhs,
                          const Sym2F &sigma, double dt, const DimensionlessParams &params,
                          const Mesh &mesh) {
  StokesOperator op(mesh, params, dt);
  return op.solve_step(prev, rhs, sigma);
}

} // namespace vefs
