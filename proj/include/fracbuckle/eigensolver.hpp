#pragma once

#include <lapacke.h>

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "fem_core.hpp"

// Buckling eigensolver. The critical load is the smallest positive lambda
// with K phi = lambda G phi, K positive definite and G positive
// semidefinite (and typically rank deficient). The pencil is solved in the
// inverted form G phi = mu K phi, whose two LARGEST eigenvalues are
// well-defined for B = K definite; lambda = 1/mu_max and the runner-up
// provides the spectral gap.

namespace fracbuckle {

struct EigenPair {
  double lambda = 0.0;       // smallest positive load factor
  Eigen::VectorXd phi;       // eigenvector (reduced dofs)
  double gap = 0.0;          // (lambda_2 - lambda) / lambda
  double residual = 0.0;     // ||K phi - lambda G phi|| / ||K phi||
};

/// Solve K phi = lambda G phi for the smallest positive lambda.
inline EigenPair generalized_min_eig(const Eigen::MatrixXd& K,
                                     const Eigen::MatrixXd& G) {
  const int n = static_cast<int>(K.rows());
  if (n < 2 || K.cols() != n || G.rows() != n || G.cols() != n)
    throw config_error("generalized_min_eig: need square matrices, n >= 2");

  // G phi = mu K phi, ascending eigenvalues; take the top two.
  Eigen::MatrixXd A = G, B = K;
  std::vector<double> w(n);
  Eigen::MatrixXd Z(n, 2);
  std::vector<lapack_int> ifail(n);
  lapack_int m = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  const lapack_int info = LAPACKE_dsygvx(
      LAPACK_COL_MAJOR, 1, 'V', 'I', 'L', n, A.data(), n, B.data(), n, 0.0,
      0.0, n - 1, n, abstol, &m, w.data(), Z.data(), n, ifail.data());
  if (info > n)
    throw assembly_error(
        "generalized_min_eig: material stiffness not positive definite");
  if (info != 0 || m < 1)
    throw numerical_error("generalized_min_eig: eigensolver did not converge");

  const double mu_max = w[m - 1];
  if (!(mu_max > 0.0))
    throw numerical_error(
        "generalized_min_eig: no positive buckling load (G vanishes on the "
        "admissible space)");

  EigenPair out;
  out.lambda = 1.0 / mu_max;
  out.phi = Z.col(m - 1);
  // mu just below mu_max maps to the next-smallest load factor
  out.gap = (m >= 2 && w[0] > 0.0) ? (1.0 / w[0] - out.lambda) / out.lambda
                                   : std::numeric_limits<double>::infinity();
  const Eigen::VectorXd kphi = K * out.phi;
  out.residual = (kphi - out.lambda * (G * out.phi)).norm() / kphi.norm();
  return out;
}

/// Sampled buckling mode: (coordinate, deflection) pairs normalized to unit
/// peak amplitude with nonnegative central deflection.
using ModeTrace = std::vector<std::array<double, 2>>;

namespace detail {

inline void normalize_trace(ModeTrace& trace) {
  double peak = 0.0;
  for (const auto& s : trace) peak = std::max(peak, std::abs(s[1]));
  if (peak == 0.0) throw numerical_error("extract_mode: vanishing mode shape");
  double sign = trace[trace.size() / 2][1];
  if (std::abs(sign) < 1e-8 * peak)
    for (const auto& s : trace)
      if (std::abs(s[1]) >= 1e-8 * peak) { sign = s[1]; break; }
  const double scale = (sign < 0.0 ? -1.0 : 1.0) / peak;
  for (auto& s : trace) s[1] *= scale;
}

}  // namespace detail

/// Beam mode sampled at n_samples uniform stations along the axis.
inline ModeTrace extract_mode(const Mesh1D& mesh,
                              const Eigen::VectorXd& full_dofs,
                              int n_samples = 65) {
  if (n_samples < 2) throw config_error("extract_mode: need >= 2 samples");
  ModeTrace trace(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const double x = mesh.length * i / (n_samples - 1);
    trace[i] = {x, eval_beam_field(mesh, full_dofs, x)};
  }
  detail::normalize_trace(trace);
  return trace;
}

/// Plate mode sampled along the x1 midline (x2 = b/2).
inline ModeTrace extract_mode(const Mesh2D& mesh,
                              const Eigen::VectorXd& full_dofs,
                              int n_samples = 65) {
  if (n_samples < 2) throw config_error("extract_mode: need >= 2 samples");
  const double ymid = mesh.my.length / 2.0;
  ModeTrace trace(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const double x = mesh.mx.length * i / (n_samples - 1);
    trace[i] = {x, eval_plate_field(mesh, full_dofs, x, ymid)};
  }
  detail::normalize_trace(trace);
  return trace;
}

}  // namespace fracbuckle
