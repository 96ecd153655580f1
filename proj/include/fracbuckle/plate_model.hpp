#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "beam_model.hpp"
#include "errors.hpp"
#include "fem_core.hpp"
#include "fractional_kernel.hpp"

// Kirchhoff plate buckling with fractional-order nonlocal kinematics on the
// 16-dof conforming rectangle. With D' = E h^3 / (12 (1 - nu^2)) and
// S = E h^3 / (24 (1 + nu)), the material stiffness is
//
//   K = int D' [ B11^T (B11 + nu B22) + B22^T (B22 + nu B11) ]
//           + S (B12 + B21)^T (B12 + B21)  dA,
//
// and the geometric matrices are G1 = int B1^T B1 dA, G2 = int B2^T B2 dA.
// Rows factorize over the tensor-product basis: B11 couples the fractional
// curvature row along x1 with plain shape values along x2, B12 the fractional
// slope row along x1 with first derivatives along x2, and so on. The load
// case selects G = G1 (uniaxial) or G1 + G2 (biaxial).

namespace fracbuckle {

enum class PlateLoadCase { uniaxial, biaxial };

struct PlateConfig {
  double a = 1.0, b = 1.0;     // side lengths (square by default)
  double slenderness = 100.0;  // a / h
  double modulus = 30.0e6;
  double poisson = 0.3;
  double alpha = 1.0;          // fractional order, (0, 1]
  double lf_ratio = 1.0;       // horizon / a, (0, 1]
  int n_inf = 8;               // elements per horizon length, each direction
  NonlocalityMode mode = NonlocalityMode::full;
  BcKind bc = BcKind::SSSS;
  PlateLoadCase load = PlateLoadCase::uniaxial;

  void validate() const {
    if (!(a > 0.0 && b > 0.0))
      throw config_error("plate: side lengths must be positive");
    if (!(slenderness >= 10.0))
      throw config_error("plate: slenderness below the thin-plate range");
    if (!(modulus > 0.0)) throw config_error("plate: modulus must be positive");
    if (!(poisson > -1.0 && poisson < 0.5))
      throw config_error("plate: poisson ratio out of range");
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw config_error("plate: alpha must lie in (0, 1]");
    if (!(lf_ratio > 0.0 && lf_ratio <= 1.0))
      throw config_error("plate: lf_ratio must lie in (0, 1]");
    if (n_inf < 1) throw config_error("plate: n_inf must be at least 1");
    if (!bc_is_plate(bc)) throw config_error("plate: beam boundary condition");
  }

  double thickness() const { return a / slenderness; }
  double bending_rigidity() const {
    const double h = thickness();
    return modulus * h * h * h / (12.0 * (1.0 - poisson * poisson));
  }
  FracParams frac_params() const { return {alpha, lf_ratio * a}; }
  Mesh2D mesh() const {
    const double l_f = lf_ratio * a;
    const int nx = static_cast<int>(std::lround(n_inf * a / l_f));
    const int ny = static_cast<int>(std::lround(n_inf * b / l_f));
    if (nx < 2 || ny < 2)
      throw config_error("plate: mesh too coarse (n_inf / lf_ratio < 2)");
    return Mesh2D(Mesh1D(a, nx), Mesh1D(b, ny));
  }
};

namespace detail {

/// Scattered row over global plate dofs (tensor product of two factor rows).
struct SpRow {
  std::vector<int> idx;
  std::vector<double> val;
  void clear() {
    idx.clear();
    val.clear();
  }
  int size() const { return static_cast<int>(idx.size()); }
};

/// out = rx (x) ry mapped onto global plate dofs. Factor dof 2*i + t of a
/// line mesh refers to node i, t = 0 value / 1 slope; the pair (tx, ty)
/// selects the plate dof type tx + 2*ty at node (ix, iy).
inline void tensor_row(const WeightRow& rx, const WeightRow& ry,
                       const Mesh2D& mesh, SpRow& out) {
  out.clear();
  for (int ky = 0; ky < ry.size(); ++ky) {
    const int fy = ry.first_dof + ky;
    const int iy = fy / 2, ty = fy % 2;
    const double vy = ry.weights[ky];
    if (vy == 0.0) continue;
    for (int kx = 0; kx < rx.size(); ++kx) {
      const int fx = rx.first_dof + kx;
      out.idx.push_back(4 * mesh.node(fx / 2, iy) + (fx % 2) + 2 * ty);
      out.val.push_back(rx.weights[kx] * vy);
    }
  }
}

/// M += c * row^T row for a row with distinct indices. Grouping the product
/// as c * (v_j * v_i) keeps the matrix bitwise symmetric.
inline void add_outer(Eigen::MatrixXd& M, const SpRow& row, double c) {
  double* data = M.data();
  const Eigen::Index n = M.rows();
  for (int i = 0; i < row.size(); ++i) {
    const double vi = row.val[i];
    if (vi == 0.0) continue;
    double* col = data + n * row.idx[i];
    for (int j = 0; j < row.size(); ++j) col[row.idx[j]] += c * (row.val[j] * vi);
  }
}

/// M += c * (a^T b + b^T a), bitwise symmetric.
inline void add_outer_sym(Eigen::MatrixXd& M, const SpRow& a, const SpRow& b,
                          double c) {
  double* data = M.data();
  const Eigen::Index n = M.rows();
  for (int i = 0; i < a.size(); ++i) {
    const double ci = c * a.val[i];
    if (ci == 0.0) continue;
    for (int j = 0; j < b.size(); ++j) {
      const double v = ci * b.val[j];
      data[n * a.idx[i] + b.idx[j]] += v;
      data[n * b.idx[j] + a.idx[i]] += v;
    }
  }
}

/// Fractional slope/curvature rows of one line mesh cached at every Gauss
/// abscissa: index element * 4 + gauss_point.
struct FracRowCache {
  std::vector<WeightRow> slope, curv;
};

inline FracRowCache build_frac_rows(const Mesh1D& mesh, const FracParams& fp,
                                    HorizonScale scale) {
  FracRowCache cache;
  cache.slope.reserve(mesh.n_elem * 4);
  cache.curv.reserve(mesh.n_elem * 4);
  const double le = mesh.element_size();
  for (int e = 0; e < mesh.n_elem; ++e)
    for (int g = 0; g < 4; ++g) {
      const double x = mesh.node_x(e) + kGaussU[g] * le;
      cache.slope.push_back(frac_derivative_row(mesh, fp, x, 0, scale));
      cache.curv.push_back(frac_derivative_row(mesh, fp, x, 1, scale));
    }
  return cache;
}

}  // namespace detail

/// All assemblies of one (mesh, fractional parameter) pair: integer-order,
/// truncated-scale fractional (full model), and nominal-scale fractional
/// (isolation modes) variants. Members not requested, or fractional at
/// alpha = 1, stay empty; pick_* falls back to the local matrix.
struct PlateMatrixSet {
  Eigen::MatrixXd K_loc, G1_loc, G2_loc;
  Eigen::MatrixXd K_frac, G1_frac, G2_frac;  // truncated scale
  Eigen::MatrixXd K_iso, G1_iso, G2_iso;     // nominal scale

  const Eigen::MatrixXd& pick_K(NonlocalityMode m) const {
    if (m == NonlocalityMode::full && K_frac.size() > 0) return K_frac;
    if (m == NonlocalityMode::material_only && K_iso.size() > 0) return K_iso;
    return K_loc;
  }
  const Eigen::MatrixXd& pick_G1(NonlocalityMode m) const {
    if (m == NonlocalityMode::full && G1_frac.size() > 0) return G1_frac;
    if (m == NonlocalityMode::geometric_only && G1_iso.size() > 0)
      return G1_iso;
    return G1_loc;
  }
  const Eigen::MatrixXd& pick_G2(NonlocalityMode m) const {
    if (m == NonlocalityMode::full && G2_frac.size() > 0) return G2_frac;
    if (m == NonlocalityMode::geometric_only && G2_iso.size() > 0)
      return G2_iso;
    return G2_loc;
  }
};

/// One quadrature sweep over the rectangle mesh assembling the requested
/// variants of the bending and both geometric matrices.
inline PlateMatrixSet assemble_plate_matrices(const Mesh2D& mesh,
                                              const FracParams& fp, double E,
                                              double nu, double h,
                                              VariantWants wants = {}) {
  const int n = mesh.n_dofs();
  const bool want_full = wants.full && fp.alpha < 1.0;
  const bool want_iso = wants.iso && fp.alpha < 1.0;
  const double Dp = E * h * h * h / (12.0 * (1.0 - nu * nu));
  const double S = E * h * h * h / (24.0 * (1.0 + nu));

  PlateMatrixSet set;
  set.K_loc = Eigen::MatrixXd::Zero(n, n);
  set.G1_loc = Eigen::MatrixXd::Zero(n, n);
  set.G2_loc = Eigen::MatrixXd::Zero(n, n);
  if (want_full) {
    set.K_frac = Eigen::MatrixXd::Zero(n, n);
    set.G1_frac = Eigen::MatrixXd::Zero(n, n);
    set.G2_frac = Eigen::MatrixXd::Zero(n, n);
  }
  if (want_iso) {
    set.K_iso = Eigen::MatrixXd::Zero(n, n);
    set.G1_iso = Eigen::MatrixXd::Zero(n, n);
    set.G2_iso = Eigen::MatrixXd::Zero(n, n);
  }

  detail::FracRowCache fx, fy, ix, iy;
  if (want_full) {
    fx = detail::build_frac_rows(mesh.mx, fp, HorizonScale::truncated);
    fy = detail::build_frac_rows(mesh.my, fp, HorizonScale::truncated);
  }
  if (want_iso) {
    ix = detail::build_frac_rows(mesh.mx, fp, HorizonScale::nominal);
    iy = detail::build_frac_rows(mesh.my, fp, HorizonScale::nominal);
  }

  const double lx = mesh.mx.element_size(), ly = mesh.my.element_size();
  detail::SpRow B1, B2, B11, B22, B12, B21;
  for (int ey = 0; ey < mesh.my.n_elem; ++ey)
    for (int gy = 0; gy < 4; ++gy) {
      const double y = mesh.my.node_x(ey) + kGaussU[gy] * ly;
      const WeightRow vy0 = local_derivative_row(mesh.my, y, 0);
      const WeightRow vy1 = local_derivative_row(mesh.my, y, 1);
      const WeightRow vy2 = local_derivative_row(mesh.my, y, 2);
      for (int ex = 0; ex < mesh.mx.n_elem; ++ex)
        for (int gx = 0; gx < 4; ++gx) {
          const double x = mesh.mx.node_x(ex) + kGaussU[gx] * lx;
          const double wq = kGaussW[gx] * lx * kGaussW[gy] * ly;
          const WeightRow vx0 = local_derivative_row(mesh.mx, x, 0);
          const WeightRow vx1 = local_derivative_row(mesh.mx, x, 1);
          const WeightRow vx2 = local_derivative_row(mesh.mx, x, 2);

          // integer-order rows: B12 = B21, so the twist pair contributes
          // 4 S outer(B12)
          detail::tensor_row(vx2, vy0, mesh, B11);
          detail::tensor_row(vx0, vy2, mesh, B22);
          detail::tensor_row(vx1, vy1, mesh, B12);
          detail::tensor_row(vx1, vy0, mesh, B1);
          detail::tensor_row(vx0, vy1, mesh, B2);
          detail::add_outer(set.K_loc, B11, wq * Dp);
          detail::add_outer(set.K_loc, B22, wq * Dp);
          detail::add_outer_sym(set.K_loc, B11, B22, wq * Dp * nu);
          detail::add_outer(set.K_loc, B12, wq * S * 4.0);
          detail::add_outer(set.G1_loc, B1, wq);
          detail::add_outer(set.G2_loc, B2, wq);

          // Fractional rows accumulated onto the requested variant's targets.
          const auto add_fractional = [&](const detail::FracRowCache& cx_,
                                          const detail::FracRowCache& cy_,
                                          Eigen::MatrixXd& K,
                                          Eigen::MatrixXd& G1,
                                          Eigen::MatrixXd& G2) {
            const WeightRow& sx = cx_.slope[ex * 4 + gx];
            const WeightRow& cx = cx_.curv[ex * 4 + gx];
            const WeightRow& sy = cy_.slope[ey * 4 + gy];
            const WeightRow& cy = cy_.curv[ey * 4 + gy];
            detail::tensor_row(cx, vy0, mesh, B11);
            detail::tensor_row(vx0, cy, mesh, B22);
            detail::tensor_row(sx, vy1, mesh, B12);
            detail::tensor_row(vx1, sy, mesh, B21);
            detail::tensor_row(sx, vy0, mesh, B1);
            detail::tensor_row(vx0, sy, mesh, B2);
            detail::add_outer(K, B11, wq * Dp);
            detail::add_outer(K, B22, wq * Dp);
            detail::add_outer_sym(K, B11, B22, wq * Dp * nu);
            // twist pair outer((B12 + B21)) expanded so no accumulation
            // target ever sees duplicate indices; keeps the matrix bitwise
            // symmetric
            detail::add_outer(K, B12, wq * S);
            detail::add_outer(K, B21, wq * S);
            detail::add_outer_sym(K, B12, B21, wq * S);
            detail::add_outer(G1, B1, wq);
            detail::add_outer(G2, B2, wq);
          };
          if (want_full)
            add_fractional(fx, fy, set.K_frac, set.G1_frac, set.G2_frac);
          if (want_iso)
            add_fractional(ix, iy, set.K_iso, set.G1_iso, set.G2_iso);
        }
    }
  return set;
}

/// Geometric matrix for the load case: G1 for uniaxial compression along x1,
/// G1 + G2 for equal biaxial compression.
inline Eigen::MatrixXd combine_geometric(const Eigen::MatrixXd& G1,
                                         const Eigen::MatrixXd& G2,
                                         PlateLoadCase load) {
  if (load == PlateLoadCase::uniaxial) return G1;
  if (G2.size() == 0)
    throw config_error("combine_geometric: biaxial load needs G2");
  return G1 + G2;
}

/// Unreduced stiffness pencil for one plate configuration (K, G1, G2;
/// combine_geometric folds in the load case at solve time).
inline StiffnessSystem assemble_plate(const PlateConfig& cfg) {
  cfg.validate();
  const Mesh2D mesh = cfg.mesh();
  const PlateMatrixSet set =
      assemble_plate_matrices(mesh, cfg.frac_params(), cfg.modulus,
                              cfg.poisson, cfg.thickness(), wants_for(cfg.mode));
  StiffnessSystem sys;
  sys.K = set.pick_K(cfg.mode);
  sys.G1 = set.pick_G1(cfg.mode);
  sys.G2 = set.pick_G2(cfg.mode);
  return sys;
}

/// Critical load normalized by pi^2 D / b^2.
inline double nondim_plate(const PlateConfig& cfg, double load) {
  return load * cfg.b * cfg.b /
         (std::numbers::pi * std::numbers::pi * cfg.bending_rigidity());
}

}  // namespace fracbuckle
