#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "fem_core.hpp"

// Space-fractional derivative machinery. The nonlocal derivative used by the
// structural models is a two-sided Caputo form with horizon-normalized
// prefactors,
//
//   D^a w(x) = 1/2 (1-a) [ l_A^(a-1) I_L + l_B^(a-1) I_R ],
//   I_L = int_{x-l_A}^{x} (x-s)^(-a) w'(s) ds,
//   I_R = int_{x}^{x+l_B} (s-x)^(-a) w'(s) ds,
//
// equivalent to convolving w' with the attenuation kernel returned by
// kernel_weight. Each horizon side carries unit mass 1/2, so D^a annihilates
// constants, maps unit slope to one, and tends to w'(x) as a -> 1. For a
// piecewise-cubic interpolant the convolution is evaluated exactly,
// element by element, through the power-law moments in frac_moments.

namespace fracbuckle {

/// Fractional constitutive parameters: order alpha in (0, 1] (1 = local
/// limit) and horizon length l_f > 0 in physical units.
struct FracParams {
  double alpha = 1.0;
  double l_f = 1.0;
};

/// Prefactor scale convention where the horizon is clipped by the domain
/// boundary. `truncated` scales each side by its clipped length, so every
/// side keeps unit kernel mass 1/2 all the way to the boundary (the
/// self-normalizing form the row invariants below are stated for).
/// `nominal` keeps the unclipped horizon length l_f in both prefactors, so
/// rows near a boundary lose kernel mass together with the clipped window;
/// the published reference solutions for the single-measure isolation
/// studies follow this constant-scale form.
enum class HorizonScale { truncated, nominal };

/// Truncated horizon around a point: kernel support [x - left, x + right].
struct Horizon {
  double left = 0.0;
  double right = 0.0;
};

inline Horizon horizon_at(double x, double length, double l_f) {
  if (!(length > 0.0) || !(l_f > 0.0))
    throw config_error("horizon_at: length and l_f must be positive");
  if (!(x >= 0.0 && x <= length))
    throw config_error("horizon_at: point outside the domain");
  return {std::min(x, l_f), std::min(length - x, l_f)};
}

/// Attenuation weight A(x, xi) of the nonlocal derivative at order alpha in
/// (0, 1). Requires xi inside the horizon of x and xi != x (the kernel is
/// weakly singular there); each side integrates to exactly 1/2.
inline double kernel_weight(double x, double xi, const Horizon& h,
                            double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw config_error("kernel_weight: alpha must lie in (0, 1)");
  const double d = xi - x;
  if (d == 0.0) throw config_error("kernel_weight: xi coincides with x");
  const double side = d < 0.0 ? h.left : h.right;
  if (!(side > 0.0) || std::abs(d) > side)
    throw config_error("kernel_weight: xi outside the horizon");
  return 0.5 * (1.0 - alpha) * std::pow(side, alpha - 1.0) *
         std::pow(std::abs(d), -alpha);
}

namespace detail {

/// (hi^p - lo^p) / p for 0 <= lo <= hi and p > 0, stable as p -> 0 or
/// hi -> lo where the direct difference cancels.
inline double pow_diff_over_p(double lo, double hi, double p) {
  if (lo == 0.0) return std::pow(hi, p) / p;
  return std::pow(lo, p) * std::expm1(p * std::log(hi / lo)) / p;
}

}  // namespace detail

/// Power-law moments of a mesh segment [a, b] against the kernel factor
/// centred at x, which must not lie inside the open segment:
///
///   m_k = int_a^b |x - xi|^(-alpha) (xi - a)^k dxi,  k = 0..3.
///
/// Closed forms: a binomial expansion when the gap between x and the segment
/// is comparable to the segment length (exact down to the weakly singular
/// touching case), switching to a power series in (length/gap) far away,
/// where the binomial form cancels catastrophically.
inline std::array<double, 4> frac_moments(double a, double b, double x,
                                          double alpha) {
  if (!(b > a)) throw config_error("frac_moments: empty segment");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw config_error("frac_moments: alpha must lie in (0, 1)");
  if (x > a && x < b)
    throw config_error("frac_moments: x inside the open segment");

  const double delta = b - a;
  const bool x_left = (x <= a);         // kernel (xi-x)^-a, else (x-xi)^-a
  const double d0 = x_left ? a - x : x - b;  // gap between x and the segment
  std::array<double, 4> m{};

  if (d0 <= 4.0 * delta) {
    // Substituting t = |x - xi| turns each moment into sums of
    // (c^(j+1-a) - d0^(j+1-a)) / (j+1-a) over the binomial expansion of
    // (xi - a)^k; c is the far distance d0 + delta.
    const double c = d0 + delta;
    std::array<double, 4> pd;
    for (int j = 0; j < 4; ++j)
      pd[j] = detail::pow_diff_over_p(d0, c, j + 1 - alpha);
    for (int k = 0; k < 4; ++k) {
      double sum = 0.0;
      double comb = 1.0;
      for (int j = 0; j <= k; ++j) {
        // (xi-a)^k = sum_j C(k,j) (t - d0)^... expanded about the near end
        // (x left) or the far end (x right) of the t-interval.
        const double outer = x_left ? std::pow(-d0, double(k - j))
                                    : std::pow(c, double(k - j)) *
                                          (j % 2 == 0 ? 1.0 : -1.0);
        sum += comb * outer * pd[j];
        comb *= double(k - j) / double(j + 1);
      }
      m[k] = sum;
    }
  } else {
    // Far field: expand the kernel about the constant distance. Terms decay
    // at least as fast as (delta/base)^n <= (1/4)^n; the series is positive
    // when x is right of the segment and alternating when left.
    const double base = x_left ? d0 : d0 + delta;
    const double r = delta / base;
    const double sgn = x_left ? -1.0 : 1.0;
    const double front = std::pow(base, -alpha);
    for (int k = 0; k < 4; ++k) {
      double sum = 0.0;
      double coef = 1.0;  // +/- (alpha)_n / n! * r^n
      const double dk1 = std::pow(delta, double(k + 1));
      for (int n = 0; n < 200; ++n) {
        const double term = coef / double(k + n + 1);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        coef *= sgn * r * (alpha + n) / double(n + 1);
      }
      m[k] = front * dk1 * sum;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// strain-displacement rows

/// One row of a (fractional) strain-displacement operator sampled at a point:
/// weights over the contiguous block of nodal dofs starting at first_dof.
/// Contiguity is inherent -- the horizon covers an unbroken run of elements.
struct WeightRow {
  int first_dof = 0;
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
  int dof(int k) const { return first_dof + k; }

  /// Dot product against a full-length dof vector.
  double apply(const Eigen::VectorXd& dofs) const {
    double s = 0.0;
    for (int k = 0; k < size(); ++k) s += weights[k] * dofs[first_dof + k];
    return s;
  }
};

/// Row of the integer-order operator d^order/dx^order at x: the four Hermite
/// shape derivatives of the element containing x.
inline WeightRow local_derivative_row(const Mesh1D& mesh, double x,
                                      int order) {
  const int e = mesh.element_of(x);
  const double le = mesh.element_size();
  const auto N = hermite_basis_1d(x / le - e, le, order);
  return {2 * e, {N[0], N[1], N[2], N[3]}};
}

namespace detail {

inline void add_scaled(WeightRow& row, const WeightRow& other, double c) {
  for (int k = 0; k < other.size(); ++k)
    row.weights[other.first_dof + k - row.first_dof] += c * other.weights[k];
}

}  // namespace detail

/// Row of the nonlocal operator D^a [ d^base_deriv w / dx^base_deriv ] at x:
/// base_deriv = 0 gives the fractional slope row, base_deriv = 1 the
/// fractional curvature row. At alpha = 1 this returns the integer-order row
/// of order base_deriv + 1 exactly. The per-element convolution integrals are
/// evaluated in closed form via frac_moments, splitting the element that
/// contains x at the kernel singularity. Degenerate horizon sides (x pinned
/// on the domain boundary) follow the convention's own limit: under the
/// truncated scale the side's unit-mass kernel concentrates into half the
/// local row; under the nominal scale the side's mass vanishes with its
/// window and it contributes nothing.
inline WeightRow frac_derivative_row(
    const Mesh1D& mesh, const FracParams& fp, double x, int base_deriv,
    HorizonScale scale = HorizonScale::truncated) {
  if (base_deriv != 0 && base_deriv != 1)
    throw config_error("frac_derivative_row: base_deriv must be 0 or 1");
  if (!(fp.alpha > 0.0 && fp.alpha <= 1.0))
    throw config_error("frac_derivative_row: alpha must lie in (0, 1]");
  const int m = base_deriv + 1;
  if (fp.alpha == 1.0) return local_derivative_row(mesh, x, m);

  const Horizon h = horizon_at(x, mesh.length, fp.l_f);
  const double le = mesh.element_size();
  const double xa = x - h.left, xb = x + h.right;
  const int e_lo = mesh.element_of(xa);
  const int e_hi = mesh.element_of(xb);

  WeightRow row{2 * e_lo, std::vector<double>(2 * (e_hi - e_lo + 2), 0.0)};

  // Contribution of [sa, sb] inside element e, lying entirely on one side of
  // x. The shape functions' m-th derivative is re-expanded in s = xi - sa and
  // integrated against the kernel moments.
  const auto accumulate = [&](double sa, double sb, int e) {
    if (!(sb - sa > 1e-12 * le)) return;  // sliver from horizon/node rounding
    const bool left_side = sb <= x;
    const double scale_len = scale == HorizonScale::nominal
                                 ? fp.l_f
                                 : (left_side ? h.left : h.right);
    const double side_coef =
        0.5 * (1.0 - fp.alpha) * std::pow(scale_len, fp.alpha - 1.0);
    const auto mom = frac_moments(sa, sb, x, fp.alpha);
    const double ua = sa / le - e;
    const auto coeff = hermite_coeff(le);
    for (int k = 0; k < 4; ++k) {
      auto c = coeff[k];
      for (int d = 0; d < m; ++d) {
        for (int j = 0; j + 1 < 4; ++j) c[j] = c[j + 1] * (j + 1);
        c[3] = 0.0;
      }
      // shift u = ua + s/le into a polynomial in s
      double contrib = 0.0;
      for (int p = 0; p + m < 4; ++p) {
        double q = 0.0, comb = 1.0;
        for (int j = p; j + m < 4; ++j) {
          q += comb * c[j] * std::pow(ua, double(j - p));
          comb *= double(j + 1) / double(j + 1 - p);
        }
        contrib += q * std::pow(le, -double(p)) * mom[p];
      }
      row.weights[2 * (e - e_lo) + k] +=
          side_coef * std::pow(le, -double(m)) * contrib;
    }
  };

  for (int e = e_lo; e <= e_hi; ++e) {
    const double lo = std::max(mesh.node_x(e), xa);
    const double hi = std::min(mesh.node_x(e + 1), xb);
    if (lo < x && x < hi) {
      accumulate(lo, x, e);
      accumulate(x, hi, e);
    } else {
      accumulate(lo, hi, e);
    }
  }

  // Degenerate horizon sides only occur for x pinned exactly on the boundary;
  // only the self-normalizing truncated scale concentrates their mass.
  if (scale == HorizonScale::truncated && (h.left == 0.0 || h.right == 0.0))
    detail::add_scaled(row, local_derivative_row(mesh, x, m), 0.5);
  return row;
}

}  // namespace fracbuckle
