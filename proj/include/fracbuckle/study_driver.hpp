#pragma once

#include <atomic>
#include <cstdlib>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "beam_model.hpp"
#include "eigensolver.hpp"
#include "errors.hpp"
#include "plate_model.hpp"

// Parameter-study orchestration. A study is a sweep over (alpha, lf_ratio,
// n_inf, nonlocality mode) cells for one structure and boundary condition.
// Cells that share (alpha, lf_ratio, n_inf) reuse one assembly of the
// fractional/integer matrix set -- the dominant cost for plates -- and
// groups run on a small thread pool sized by FRACBUCKLE_THREADS (0 or unset
// = one worker per hardware thread). Row order and values are deterministic
// and independent of the thread count.

namespace fracbuckle {

enum class StructureKind { beam, plate };

enum class StudyKind { single_case, critical_grid, convergence, parametric, mode_shape };

struct StudySpec {
  StudyKind kind = StudyKind::critical_grid;
  StructureKind structure = StructureKind::beam;
  std::vector<double> alphas{1.0, 0.9, 0.8, 0.7};
  std::vector<double> lf_ratios{0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<int> n_inf{24};
  std::vector<NonlocalityMode> modes{NonlocalityMode::full};
  BcKind bc = BcKind::CC;
  PlateLoadCase load = PlateLoadCase::uniaxial;
  double span = 1.0;
  double slenderness = 100.0;
  double modulus = 30.0e6;
  double poisson = 0.3;
  int n_samples = 65;

  friend bool operator==(const StudySpec&, const StudySpec&) = default;

  void validate() const {
    if (alphas.empty() || lf_ratios.empty() || n_inf.empty() || modes.empty())
      throw config_error("study: empty parameter list");
    for (double a : alphas)
      if (!(a > 0.0 && a <= 1.0))
        throw config_error("study: alpha must lie in (0, 1]");
    for (double r : lf_ratios)
      if (!(r > 0.0 && r <= 1.0))
        throw config_error("study: lf_ratio must lie in (0, 1]");
    for (int n : n_inf)
      if (n < 1) throw config_error("study: n_inf must be at least 1");
    if ((structure == StructureKind::beam) != !bc_is_plate(bc))
      throw config_error("study: boundary condition does not match structure");
    if (!(span > 0.0)) throw config_error("study: span must be positive");
    if (!(slenderness >= 10.0))
      throw config_error("study: slenderness below the slender range");
    if (!(modulus > 0.0)) throw config_error("study: modulus must be positive");
    if (!(poisson > -1.0 && poisson < 0.5))
      throw config_error("study: poisson ratio out of range");
    if (n_samples < 2 || n_samples > 100001)
      throw config_error("study: samples must lie in [2, 100001]");
    if (kind == StudyKind::single_case &&
        alphas.size() * lf_ratios.size() * n_inf.size() * modes.size() != 1)
      throw config_error("study: single case requires exactly one cell");
  }
};

/// One solved cell of a study.
struct StudyRow {
  double alpha = 1.0;
  double lf_ratio = 1.0;
  int n_inf = 0;
  NonlocalityMode mode = NonlocalityMode::full;
  double nondim = 0.0;    // normalized critical load
  double load = 0.0;      // raw critical load
  double gap = 0.0;       // relative distance to the next eigenvalue
  double residual = 0.0;  // eigenpair residual
  int n_dofs = 0;         // free dofs after boundary reduction
  ModeTrace trace;        // mode_shape studies only
};

struct StudyResult {
  StudySpec spec;
  std::vector<StudyRow> rows;
};

// ---------------------------------------------------------------------------
// enum names (shared by config parsing and result emission)

inline const char* to_string(NonlocalityMode m) {
  switch (m) {
    case NonlocalityMode::full: return "full";
    case NonlocalityMode::material_only: return "material";
    case NonlocalityMode::geometric_only: return "geometric";
    case NonlocalityMode::local: return "local";
  }
  return "?";
}

inline const char* to_string(BcKind bc) {
  switch (bc) {
    case BcKind::SS: return "SS";
    case BcKind::CC: return "CC";
    case BcKind::SSSS: return "SSSS";
    case BcKind::CCCC: return "CCCC";
  }
  return "?";
}

inline const char* to_string(PlateLoadCase lc) {
  return lc == PlateLoadCase::uniaxial ? "uniaxial" : "biaxial";
}

inline const char* to_string(StructureKind s) {
  return s == StructureKind::beam ? "beam" : "plate";
}

inline const char* to_string(StudyKind k) {
  switch (k) {
    case StudyKind::single_case: return "single";
    case StudyKind::critical_grid: return "grid";
    case StudyKind::convergence: return "convergence";
    case StudyKind::parametric: return "parametric";
    case StudyKind::mode_shape: return "modes";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// runner

namespace detail {

inline BeamConfig beam_config(const StudySpec& s, double alpha, double lf,
                              int n_inf, NonlocalityMode mode) {
  BeamConfig c;
  c.length = s.span;
  c.slenderness = s.slenderness;
  c.modulus = s.modulus;
  c.alpha = alpha;
  c.lf_ratio = lf;
  c.n_inf = n_inf;
  c.mode = mode;
  c.bc = s.bc;
  return c;
}

inline PlateConfig plate_config(const StudySpec& s, double alpha, double lf,
                                int n_inf, NonlocalityMode mode) {
  PlateConfig c;
  c.a = c.b = s.span;
  c.slenderness = s.slenderness;
  c.modulus = s.modulus;
  c.poisson = s.poisson;
  c.alpha = alpha;
  c.lf_ratio = lf;
  c.n_inf = n_inf;
  c.mode = mode;
  c.bc = s.bc;
  c.load = s.load;
  return c;
}

struct StudyCell {
  std::size_t slot;
  NonlocalityMode mode;
};

struct StudyGroup {
  double alpha, lf_ratio;
  int n_inf;
  std::vector<StudyCell> cells;

  VariantWants wants() const {
    VariantWants w{false, false};
    for (const StudyCell& cell : cells) {
      const VariantWants c = wants_for(cell.mode);
      w.full = w.full || c.full;
      w.iso = w.iso || c.iso;
    }
    return w;
  }
};

inline int env_thread_count() {
  const char* env = std::getenv("FRACBUCKLE_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0 || v > 4096)
    throw config_error("FRACBUCKLE_THREADS must be a small nonnegative integer");
  return static_cast<int>(v);
}

/// Solve every cell of one assembly group into its result slot.
inline void run_group_beam(const StudySpec& spec, const StudyGroup& grp,
                           std::vector<StudyRow>& rows) {
  const BeamConfig base =
      beam_config(spec, grp.alpha, grp.lf_ratio, grp.n_inf, grp.cells[0].mode);
  base.validate();
  const Mesh1D mesh = base.mesh();
  const BeamMatrixSet set = assemble_beam_matrices(
      mesh, base.frac_params(), base.rigidity(), grp.wants());
  const std::vector<int> keep =
      free_dofs(mesh.n_dofs(), constrained_dofs(mesh, spec.bc));
  for (const StudyCell& cell : grp.cells) {
    const Eigen::MatrixXd Kr = detail::take_submatrix(set.pick_K(cell.mode), keep);
    const Eigen::MatrixXd Gr = detail::take_submatrix(set.pick_G(cell.mode), keep);
    const EigenPair eig = generalized_min_eig(Kr, Gr);
    StudyRow& row = rows[cell.slot];
    row.alpha = grp.alpha;
    row.lf_ratio = grp.lf_ratio;
    row.n_inf = grp.n_inf;
    row.mode = cell.mode;
    row.load = eig.lambda;
    row.nondim = nondim_beam(base, eig.lambda);
    row.gap = eig.gap;
    row.residual = eig.residual;
    row.n_dofs = static_cast<int>(keep.size());
    if (spec.kind == StudyKind::mode_shape)
      row.trace = extract_mode(
          mesh, scatter_full(eig.phi, keep, mesh.n_dofs()), spec.n_samples);
  }
}

inline void run_group_plate(const StudySpec& spec, const StudyGroup& grp,
                            std::vector<StudyRow>& rows) {
  const PlateConfig base = plate_config(spec, grp.alpha, grp.lf_ratio,
                                        grp.n_inf, grp.cells[0].mode);
  base.validate();
  const Mesh2D mesh = base.mesh();
  const PlateMatrixSet set = assemble_plate_matrices(
      mesh, base.frac_params(), base.modulus, base.poisson, base.thickness(),
      grp.wants());
  const std::vector<int> keep =
      free_dofs(mesh.n_dofs(), constrained_dofs(mesh, spec.bc));
  for (const StudyCell& cell : grp.cells) {
    const Eigen::MatrixXd Kr = detail::take_submatrix(set.pick_K(cell.mode), keep);
    Eigen::MatrixXd Gr = detail::take_submatrix(set.pick_G1(cell.mode), keep);
    if (spec.load == PlateLoadCase::biaxial)
      Gr += detail::take_submatrix(set.pick_G2(cell.mode), keep);
    const EigenPair eig = generalized_min_eig(Kr, Gr);
    StudyRow& row = rows[cell.slot];
    row.alpha = grp.alpha;
    row.lf_ratio = grp.lf_ratio;
    row.n_inf = grp.n_inf;
    row.mode = cell.mode;
    row.load = eig.lambda;
    row.nondim = nondim_plate(base, eig.lambda);
    row.gap = eig.gap;
    row.residual = eig.residual;
    row.n_dofs = static_cast<int>(keep.size());
    if (spec.kind == StudyKind::mode_shape)
      row.trace = extract_mode(
          mesh, scatter_full(eig.phi, keep, mesh.n_dofs()), spec.n_samples);
  }
}

}  // namespace detail

/// Run a study: every (mode, lf_ratio, n_inf, alpha) cell in canonical row
/// order (that nesting, innermost alpha). A parametric study left at the
/// default mode list expands to the material/geometric isolation pair.
inline StudyResult run_study(StudySpec spec) {
  if (spec.kind == StudyKind::parametric &&
      spec.modes == std::vector<NonlocalityMode>{NonlocalityMode::full})
    spec.modes = {NonlocalityMode::material_only,
                  NonlocalityMode::geometric_only};
  spec.validate();

  StudyResult result;
  result.spec = spec;

  // canonical row order + assembly groups keyed by (alpha, lf, n_inf)
  std::vector<detail::StudyGroup> groups;
  std::map<std::tuple<double, double, int>, std::size_t> group_index;
  std::size_t n_rows = 0;
  for (NonlocalityMode mode : spec.modes)
    for (double lf : spec.lf_ratios)
      for (int ninf : spec.n_inf)
        for (double alpha : spec.alphas) {
          const auto key = std::make_tuple(alpha, lf, ninf);
          auto [it, fresh] = group_index.try_emplace(key, groups.size());
          if (fresh) groups.push_back({alpha, lf, ninf, {}});
          groups[it->second].cells.push_back({n_rows++, mode});
        }
  result.rows.resize(n_rows);

  const auto run_group = [&](const detail::StudyGroup& grp) {
    if (spec.structure == StructureKind::beam)
      detail::run_group_beam(spec, grp, result.rows);
    else
      detail::run_group_plate(spec, grp, result.rows);
  };

  int threads = detail::env_thread_count();
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<int>(threads, static_cast<int>(groups.size()));

  if (threads <= 1) {
    for (const auto& grp : groups) run_group(grp);
    return result;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= groups.size()) return;
      {
        std::scoped_lock lock(error_mutex);
        if (error) return;
      }
      try {
        run_group(groups[i]);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return result;
}

/// Kind-checked entry points.
inline StudyResult run_convergence(StudySpec spec) {
  spec.kind = StudyKind::convergence;
  return run_study(spec);
}
inline StudyResult run_critical_grid(StudySpec spec) {
  spec.kind = StudyKind::critical_grid;
  return run_study(spec);
}
inline StudyResult run_parametric(StudySpec spec) {
  spec.kind = StudyKind::parametric;
  return run_study(spec);
}

}  // namespace fracbuckle
