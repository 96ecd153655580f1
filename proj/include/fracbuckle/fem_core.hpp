#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "errors.hpp"

// C1 finite element machinery shared by the beam and plate models: uniform
// meshes, cubic Hermite line elements, their bicubic tensor-product
// counterpart (16-dof rectangle), quadrature, and boundary condition
// reduction of assembled systems.

namespace fracbuckle {

// ---------------------------------------------------------------------------
// meshes

struct Mesh1D {
  double length = 1.0;
  int n_elem = 1;

  Mesh1D() = default;
  Mesh1D(double length_, int n_elem_) : length(length_), n_elem(n_elem_) {
    if (!(length > 0.0)) throw config_error("Mesh1D: length must be positive");
    if (n_elem < 1) throw config_error("Mesh1D: need at least one element");
  }

  double element_size() const { return length / n_elem; }
  int n_nodes() const { return n_elem + 1; }
  // two dofs per node: deflection and slope
  int n_dofs() const { return 2 * n_nodes(); }
  double node_x(int i) const { return length * i / n_elem; }

  /// Element whose closure contains x; points on shared nodes resolve to the
  /// element on the right, the last element owns x = length.
  int element_of(double x) const {
    int e = static_cast<int>(std::floor(x / element_size()));
    return std::clamp(e, 0, n_elem - 1);
  }
};

/// Structured rectangle mesh as a tensor product of two line meshes.
/// Node (i, j) has index j * (mx.n_elem + 1) + i and carries four dofs:
/// w, dw/dx1, dw/dx2, d2w/dx1dx2 (in that order).
struct Mesh2D {
  Mesh1D mx, my;

  Mesh2D() = default;
  Mesh2D(Mesh1D mx_, Mesh1D my_) : mx(mx_), my(my_) {}

  int node(int i, int j) const { return j * mx.n_nodes() + i; }
  int n_nodes() const { return mx.n_nodes() * my.n_nodes(); }
  int n_dofs() const { return 4 * n_nodes(); }
};

// ---------------------------------------------------------------------------
// quadrature

/// 4-point Gauss-Legendre rule on [0, 1]; exact through degree 7.
inline constexpr std::array<double, 4> kGaussU = {
    0.069431844202973712, 0.33000947820757187, 0.66999052179242813,
    0.93056815579702629};
inline constexpr std::array<double, 4> kGaussW = {
    0.17392742256872693, 0.32607257743127307, 0.32607257743127307,
    0.17392742256872693};

// ---------------------------------------------------------------------------
// cubic Hermite basis on one element

/// Monomial coefficients (in the unit coordinate u) of the four Hermite
/// shapes, ordered w_a, w'_a, w_b, w'_b. Slope shapes carry the element
/// length so that dofs are physical slopes.
inline std::array<std::array<double, 4>, 4> hermite_coeff(double le) {
  return {{{1.0, 0.0, -3.0, 2.0},
           {0.0, le, -2.0 * le, le},
           {0.0, 0.0, 3.0, -2.0},
           {0.0, 0.0, -le, le}}};
}

/// d^order/dx^order of the four Hermite shapes at unit coordinate u in an
/// element of length le. order = 0..3.
inline std::array<double, 4> hermite_basis_1d(double u, double le, int order) {
  if (order < 0 || order > 3)
    throw config_error("hermite_basis_1d: derivative order out of range");
  auto coeff = hermite_coeff(le);
  const double scale = std::pow(le, -order);
  std::array<double, 4> out{};
  for (int k = 0; k < 4; ++k) {
    auto c = coeff[k];
    for (int d = 0; d < order; ++d) {
      for (int j = 0; j + 1 < 4; ++j) c[j] = c[j + 1] * (j + 1);
      c[3] = 0.0;
    }
    out[k] = scale * (((c[3] * u + c[2]) * u + c[1]) * u + c[0]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// bicubic tensor-product basis (16-dof conforming rectangle)

/// Local node order for the rectangle: (0,0), (1,0), (1,1), (0,1).
inline constexpr int kRectNodeU[4] = {0, 1, 1, 0};
inline constexpr int kRectNodeV[4] = {0, 0, 1, 1};

/// Mixed partial d^(du_order+dv_order) N / dx1^du_order dx2^dv_order of the
/// 16 shapes at unit coordinates (u, v) in an lx-by-ly element. Shape index
/// is 4 * local_node + type with type = (w, w_{,1}, w_{,2}, w_{,12}).
inline std::array<double, 16> bfs_basis_2d(double u, double v, double lx,
                                           double ly, int du_order,
                                           int dv_order) {
  const auto hx = hermite_basis_1d(u, lx, du_order);
  const auto hy = hermite_basis_1d(v, ly, dv_order);
  std::array<double, 16> out{};
  for (int ln = 0; ln < 4; ++ln)
    for (int t = 0; t < 4; ++t) {
      const int fx = 2 * kRectNodeU[ln] + (t == 1 || t == 3 ? 1 : 0);
      const int fy = 2 * kRectNodeV[ln] + (t == 2 || t == 3 ? 1 : 0);
      out[4 * ln + t] = hx[fx] * hy[fy];
    }
  return out;
}

// ---------------------------------------------------------------------------
// boundary conditions

enum class BcKind { SS, CC, SSSS, CCCC };

inline bool bc_is_plate(BcKind bc) {
  return bc == BcKind::SSSS || bc == BcKind::CCCC;
}

/// Constrained dof indices for a beam: SS pins deflection at both ends, CC
/// pins deflection and slope.
inline std::vector<int> constrained_dofs(const Mesh1D& mesh, BcKind bc) {
  if (bc_is_plate(bc))
    throw config_error("constrained_dofs: plate condition on a beam mesh");
  const int last = mesh.n_nodes() - 1;
  if (bc == BcKind::SS) return {0, 2 * last};
  return {0, 1, 2 * last, 2 * last + 1};
}

/// Constrained dof indices for a plate. SSSS pins w plus the tangential
/// slope on each edge (twist left free); CCCC pins all four dofs on the
/// boundary.
inline std::vector<int> constrained_dofs(const Mesh2D& mesh, BcKind bc) {
  if (!bc_is_plate(bc))
    throw config_error("constrained_dofs: beam condition on a plate mesh");
  std::vector<int> fixed;
  const int nx = mesh.mx.n_nodes(), ny = mesh.my.n_nodes();
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const bool on_x_edge = (i == 0 || i == nx - 1);
      const bool on_y_edge = (j == 0 || j == ny - 1);
      if (!on_x_edge && !on_y_edge) continue;
      const int base = 4 * mesh.node(i, j);
      if (bc == BcKind::CCCC) {
        fixed.insert(fixed.end(), {base, base + 1, base + 2, base + 3});
      } else {
        fixed.push_back(base);
        if (on_x_edge) fixed.push_back(base + 2);  // dw/dx2 along x1 = const
        if (on_y_edge) fixed.push_back(base + 1);  // dw/dx1 along x2 = const
      }
    }
  std::sort(fixed.begin(), fixed.end());
  fixed.erase(std::unique(fixed.begin(), fixed.end()), fixed.end());
  return fixed;
}

// ---------------------------------------------------------------------------
// assembled systems

/// Material and geometric stiffness of one configuration. Beams use G1 only;
/// plates carry one geometric matrix per load direction. After apply_bcs,
/// `keep` maps reduced dof index -> full dof index.
struct StiffnessSystem {
  Eigen::MatrixXd K;
  Eigen::MatrixXd G1;
  Eigen::MatrixXd G2;
  std::vector<int> keep;

  bool reduced() const { return !keep.empty(); }
};

namespace detail {

inline Eigen::MatrixXd take_submatrix(const Eigen::MatrixXd& M,
                                      const std::vector<int>& keep) {
  Eigen::MatrixXd out(keep.size(), keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j)
    for (std::size_t i = 0; i < keep.size(); ++i)
      out(i, j) = M(keep[i], keep[j]);
  return out;
}

}  // namespace detail

/// Complement of the constrained set: the retained dof indices, ascending.
inline std::vector<int> free_dofs(int n_dofs, const std::vector<int>& fixed) {
  std::vector<char> is_fixed(n_dofs, 0);
  for (int d : fixed) {
    if (d < 0 || d >= n_dofs)
      throw config_error("free_dofs: dof index out of range");
    is_fixed[d] = 1;
  }
  std::vector<int> keep;
  keep.reserve(n_dofs);
  for (int d = 0; d < n_dofs; ++d)
    if (!is_fixed[d]) keep.push_back(d);
  if (keep.empty()) throw assembly_error("free_dofs: all dofs constrained");
  return keep;
}

/// Eliminate constrained dofs by row/column deletion and verify the reduced
/// material stiffness is positive definite (rigid modes removed).
inline StiffnessSystem apply_bcs(const StiffnessSystem& sys,
                                 const std::vector<int>& fixed) {
  StiffnessSystem out;
  out.keep = free_dofs(static_cast<int>(sys.K.rows()), fixed);
  out.K = detail::take_submatrix(sys.K, out.keep);
  if (sys.G1.size() > 0) out.G1 = detail::take_submatrix(sys.G1, out.keep);
  if (sys.G2.size() > 0) out.G2 = detail::take_submatrix(sys.G2, out.keep);

  Eigen::LLT<Eigen::MatrixXd> llt(out.K);
  if (llt.info() != Eigen::Success)
    throw assembly_error(
        "apply_bcs: reduced material stiffness is not positive definite");
  return out;
}

/// Expand a reduced dof vector back to full length, zeros on constrained dofs.
inline Eigen::VectorXd scatter_full(const Eigen::VectorXd& reduced,
                                    const std::vector<int>& keep, int n_full) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(n_full);
  for (std::size_t i = 0; i < keep.size(); ++i) full[keep[i]] = reduced[i];
  return full;
}

// ---------------------------------------------------------------------------
// field evaluation (mode shapes, test fields)

/// Evaluate the d-th derivative of the C1 interpolant at x from a full beam
/// dof vector.
inline double eval_beam_field(const Mesh1D& mesh, const Eigen::VectorXd& dofs,
                              double x, int order = 0) {
  const int e = mesh.element_of(x);
  const double le = mesh.element_size();
  const double u = x / le - e;
  const auto N = hermite_basis_1d(u, le, order);
  double val = 0.0;
  for (int k = 0; k < 4; ++k) val += N[k] * dofs[2 * e + k];
  return val;
}

/// Evaluate a mixed partial of the bicubic interpolant at (x, y) from a full
/// plate dof vector.
inline double eval_plate_field(const Mesh2D& mesh, const Eigen::VectorXd& dofs,
                               double x, double y, int dx_order = 0,
                               int dy_order = 0) {
  const int ex = mesh.mx.element_of(x), ey = mesh.my.element_of(y);
  const double lx = mesh.mx.element_size(), ly = mesh.my.element_size();
  const double u = x / lx - ex, v = y / ly - ey;
  const auto N = bfs_basis_2d(u, v, lx, ly, dx_order, dy_order);
  double val = 0.0;
  for (int ln = 0; ln < 4; ++ln) {
    const int node = mesh.node(ex + kRectNodeU[ln], ey + kRectNodeV[ln]);
    for (int t = 0; t < 4; ++t) val += N[4 * ln + t] * dofs[4 * node + t];
  }
  return val;
}

}  // namespace fracbuckle
