#include "fracbuckle/study_driver.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <string>

using namespace fracbuckle;

namespace {

/// Scoped override of FRACBUCKLE_THREADS, restored on destruction.
class ThreadsEnv {
 public:
  explicit ThreadsEnv(const char* value) {
    const char* old = std::getenv("FRACBUCKLE_THREADS");
    had_ = old != nullptr;
    if (had_) saved_ = old;
    if (value)
      ::setenv("FRACBUCKLE_THREADS", value, 1);
    else
      ::unsetenv("FRACBUCKLE_THREADS");
  }
  ~ThreadsEnv() {
    if (had_)
      ::setenv("FRACBUCKLE_THREADS", saved_.c_str(), 1);
    else
      ::unsetenv("FRACBUCKLE_THREADS");
  }

 private:
  bool had_ = false;
  std::string saved_;
};

StudySpec small_beam_grid() {
  StudySpec spec;
  spec.kind = StudyKind::critical_grid;
  spec.structure = StructureKind::beam;
  spec.alphas = {1.0, 0.8};
  spec.lf_ratios = {0.5, 1.0};
  spec.n_inf = {6};
  spec.bc = BcKind::CC;
  return spec;
}

}  // namespace

TEST(StudySpec, Validation) {
  StudySpec spec = small_beam_grid();
  spec.alphas.clear();
  EXPECT_THROW(run_study(spec), config_error);

  spec = small_beam_grid();
  spec.bc = BcKind::SSSS;  // plate condition on a beam study
  EXPECT_THROW(run_study(spec), config_error);

  spec = small_beam_grid();
  spec.kind = StudyKind::single_case;  // four cells is not a single case
  EXPECT_THROW(run_study(spec), config_error);
}

TEST(StudyDriver, EnumNames) {
  EXPECT_STREQ(to_string(NonlocalityMode::material_only), "material");
  EXPECT_STREQ(to_string(NonlocalityMode::geometric_only), "geometric");
  EXPECT_STREQ(to_string(BcKind::SSSS), "SSSS");
  EXPECT_STREQ(to_string(PlateLoadCase::biaxial), "biaxial");
  EXPECT_STREQ(to_string(StructureKind::plate), "plate");
  EXPECT_STREQ(to_string(StudyKind::critical_grid), "grid");
  EXPECT_STREQ(to_string(StudyKind::mode_shape), "modes");
}

TEST(StudyDriver, CanonicalRowOrder) {
  const StudyResult res = run_study(small_beam_grid());
  ASSERT_EQ(res.rows.size(), 4u);
  // lf_ratio outer, alpha inner
  EXPECT_DOUBLE_EQ(res.rows[0].lf_ratio, 0.5);
  EXPECT_DOUBLE_EQ(res.rows[0].alpha, 1.0);
  EXPECT_DOUBLE_EQ(res.rows[1].lf_ratio, 0.5);
  EXPECT_DOUBLE_EQ(res.rows[1].alpha, 0.8);
  EXPECT_DOUBLE_EQ(res.rows[2].lf_ratio, 1.0);
  EXPECT_DOUBLE_EQ(res.rows[2].alpha, 1.0);
  EXPECT_DOUBLE_EQ(res.rows[3].lf_ratio, 1.0);
  EXPECT_DOUBLE_EQ(res.rows[3].alpha, 0.8);
  for (const auto& row : res.rows) {
    EXPECT_GT(row.nondim, 0.0);
    EXPECT_GT(row.load, 0.0);
    EXPECT_GT(row.n_dofs, 0);
    EXPECT_LT(row.residual, 1e-8);
    EXPECT_TRUE(row.trace.empty());  // traces only for mode-shape studies
  }
  // both alpha = 1 cells recover the classical clamped load; they do not
  // coincide bitwise because the mesh count tracks the horizon ratio
  EXPECT_NEAR(res.rows[0].nondim, 4.0, 0.01);
  EXPECT_NEAR(res.rows[2].nondim, 4.0, 0.01);
}

TEST(StudyDriver, SingleCaseMatchesGridCell) {
  StudySpec one = small_beam_grid();
  one.kind = StudyKind::single_case;
  one.alphas = {0.8};
  one.lf_ratios = {0.5};
  const StudyResult single = run_study(one);
  ASSERT_EQ(single.rows.size(), 1u);

  const StudyResult grid = run_study(small_beam_grid());
  EXPECT_EQ(single.rows[0].nondim, grid.rows[1].nondim);  // bitwise
  EXPECT_EQ(single.rows[0].load, grid.rows[1].load);
  EXPECT_EQ(single.rows[0].n_dofs, grid.rows[1].n_dofs);
}

TEST(StudyDriver, DeterministicAcrossThreadCounts) {
  StudyResult serial, pooled;
  {
    ThreadsEnv env("1");
    serial = run_study(small_beam_grid());
  }
  {
    ThreadsEnv env("2");
    pooled = run_study(small_beam_grid());
  }
  ASSERT_EQ(serial.rows.size(), pooled.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    EXPECT_EQ(serial.rows[i].nondim, pooled.rows[i].nondim);  // bitwise
    EXPECT_EQ(serial.rows[i].alpha, pooled.rows[i].alpha);
    EXPECT_EQ(serial.rows[i].lf_ratio, pooled.rows[i].lf_ratio);
  }
}

TEST(StudyDriver, RejectsBadThreadsEnv) {
  ThreadsEnv env("many");
  EXPECT_THROW(run_study(small_beam_grid()), config_error);
}

TEST(StudyDriver, ConvergenceOrdersByMeshRate) {
  StudySpec spec = small_beam_grid();
  spec.kind = StudyKind::convergence;
  spec.lf_ratios = {1.0};
  spec.n_inf = {5, 6};
  const StudyResult res = run_study(spec);
  ASSERT_EQ(res.rows.size(), 4u);
  EXPECT_EQ(res.rows[0].n_inf, 5);
  EXPECT_DOUBLE_EQ(res.rows[0].alpha, 1.0);
  EXPECT_EQ(res.rows[1].n_inf, 5);
  EXPECT_DOUBLE_EQ(res.rows[1].alpha, 0.8);
  EXPECT_EQ(res.rows[2].n_inf, 6);
  EXPECT_EQ(res.rows[3].n_inf, 6);
}

TEST(StudyDriver, ParametricDefaultsToIsolationPair) {
  StudySpec spec = small_beam_grid();
  spec.kind = StudyKind::parametric;
  spec.alphas = {0.8};
  spec.lf_ratios = {1.0};
  const StudyResult res = run_study(spec);
  ASSERT_EQ(res.rows.size(), 2u);
  EXPECT_EQ(res.rows[0].mode, NonlocalityMode::material_only);
  EXPECT_EQ(res.rows[1].mode, NonlocalityMode::geometric_only);
  EXPECT_EQ(res.spec.modes.size(), 2u);
  // material isolation softens, geometric isolation stiffens
  EXPECT_LT(res.rows[0].nondim, res.rows[1].nondim);

  // an explicit mode list is honored as-is
  spec.modes = {NonlocalityMode::local};
  const StudyResult local = run_study(spec);
  ASSERT_EQ(local.rows.size(), 1u);
  EXPECT_EQ(local.rows[0].mode, NonlocalityMode::local);
}

TEST(StudyDriver, ModeShapeStudyCarriesTraces) {
  StudySpec spec;
  spec.kind = StudyKind::mode_shape;
  spec.structure = StructureKind::beam;
  spec.alphas = {1.0, 0.7};
  spec.lf_ratios = {0.5};
  spec.n_inf = {6};
  spec.bc = BcKind::SS;
  spec.n_samples = 33;
  const StudyResult res = run_study(spec);
  ASSERT_EQ(res.rows.size(), 2u);
  for (const auto& row : res.rows) {
    ASSERT_EQ(row.trace.size(), 33u);
    EXPECT_DOUBLE_EQ(row.trace.front()[0], 0.0);
    EXPECT_DOUBLE_EQ(row.trace.back()[0], 1.0);
    double peak = 0.0;
    for (const auto& s : row.trace) peak = std::max(peak, std::abs(s[1]));
    EXPECT_NEAR(peak, 1.0, 1e-12);
    EXPECT_GE(row.trace[16][1], 0.0);  // center nonnegative
  }
}

TEST(StudyDriver, PlateStudySmoke) {
  StudySpec spec;
  spec.kind = StudyKind::critical_grid;
  spec.structure = StructureKind::plate;
  spec.alphas = {1.0, 0.9};
  spec.lf_ratios = {1.0};
  spec.n_inf = {3};
  spec.bc = BcKind::SSSS;
  spec.load = PlateLoadCase::uniaxial;
  const StudyResult res = run_study(spec);
  ASSERT_EQ(res.rows.size(), 2u);
  EXPECT_NEAR(res.rows[0].nondim, 4.0, 0.05);  // classical square plate
  // span-wide horizon stiffens the simply supported plate
  EXPECT_GT(res.rows[1].nondim, res.rows[0].nondim);
  EXPECT_LT(res.rows[1].residual, 1e-8);
}
