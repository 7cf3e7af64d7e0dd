#pragma once

#include <Eigen/Dense>
#include <complex>

namespace vefs::dft {

// Forward DFT of a real sequence: c_m = sum_i f_i exp(-2*pi*I*m*i/n), m = 0..n-1.
Eigen::VectorXcd forward(const Eigen::ArrayXd &f);

// Inverse transform (real part), with the 1/n normalization.
Eigen::ArrayXd inverse_real(const Eigen::VectorXcd &c);

// Dense spectral differentiation matrix for a periodic grid of n points over
// period L: exact derivative for trigonometric polynomials up to the Nyquist
// mode (whose derivative is set to zero for even n).
Eigen::MatrixXd diff_matrix(int n, double L);

// Signed integer wavenumber index for DFT bin m of an n-point transform.
int signed_mode(int m, int n);

} // namespace vefs::dft
