#include "vefs/dft.hpp"

#include <cmath>

namespace vefs::dft {

Eigen::VectorXcd forward(const Eigen::ArrayXd &f) {
  const int n = static_cast<int>(f.size());
  Eigen::VectorXcd c(n);
  const double w = -2.0 * M_PI / n;
  for (int m = 0; m < n; ++m) {
    std::complex<double> acc(0.0, 0.0);
    for (int i = 0; i < n; ++i)
      acc += f[i] * std::complex<double>(std::cos(w * m * i), std::sin(w * m * i));
    c[m] = acc;
  }
  return c;
}

Eigen::ArrayXd inverse_real(const Eigen::VectorXcd &c) {
  const int n = static_cast<int>(c.size());
  Eigen::ArrayXd f(n);
  const double w = 2.0 * M_PI / n;
  for (int i = 0; i < n; ++i) {
    std::complex<double> acc(0.0, 0.0);
    for (int m = 0; m < n; ++m)
      acc += c[m] * std::complex<double>(std::cos(w * m * i), std::sin(w * m * i));
    f[i] = acc.real() / n;
  }
  return f;
}

int signed_mode(int m, int n) { return (m <= n / 2) ? m : m - n; }

Eigen::MatrixXd diff_matrix(int n, double L) {
  // Columns are the spectral derivatives of the unit impulses.
  Eigen::MatrixXd D(n, n);
  const double w = 2.0 * M_PI / n;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double d = 0.0;
      for (int m = 0; m < n; ++m) {
        int k = signed_mode(m, n);
        if (2 * m == n) continue; // Nyquist mode: derivative dropped
        double kappa = 2.0 * M_PI * k / L;
        // real part of (i*kappa/n) * exp(2*pi*I*m*(i-j)/n)
        d += -kappa / n * std::sin(w * m * (i - j));
      }
      D(i, j) = d;
    }
  }
  // Constants must differentiate to exactly zero; fold the roundoff of the
  // row sums into the diagonal.
  for (int i = 0; i < n; ++i) D(i, i) -= D.row(i).sum();
  return D;
}

} // namespace vefs::dft
