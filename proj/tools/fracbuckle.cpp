// fracbuckle: critical buckling loads and mode shapes of beams and plates
// with fractional-order nonlocal kinematics.
//
// Subcommands select what to run: `beam` and `plate` sweep the configured
// (alpha, lf_ratio) grid for that structure, `convergence` refines the mesh
// over the configured n_inf list, `parametric` isolates material/geometric
// nonlocality, and `modes` samples buckling mode shapes. A config file
// provides the study definition; individual flags override single values.
// Exit codes: 0 success, 2 invalid input, 3 numerical/assembly failure.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "fracbuckle/config_parse.hpp"
#include "fracbuckle/csv_emit.hpp"
#include "fracbuckle/study_driver.hpp"
#include "fracbuckle/version.hpp"

namespace {

using namespace fracbuckle;

StudySpec default_spec(StructureKind structure) {
  StudySpec s;
  if (structure == StructureKind::plate) {
    s.structure = StructureKind::plate;
    s.bc = BcKind::SSSS;
    s.n_inf = {8};
    s.lf_ratios = {0.4, 0.6, 0.8, 1.0};
  }
  return s;
}

BcKind parse_bc(const std::string& v) {
  if (v == "SS") return BcKind::SS;
  if (v == "CC") return BcKind::CC;
  if (v == "SSSS") return BcKind::SSSS;
  if (v == "CCCC") return BcKind::CCCC;
  throw config_error("--bc must be SS, CC, SSSS or CCCC");
}

NonlocalityMode parse_mode(const std::string& v) {
  if (v == "full") return NonlocalityMode::full;
  if (v == "material") return NonlocalityMode::material_only;
  if (v == "geometric") return NonlocalityMode::geometric_only;
  if (v == "local") return NonlocalityMode::local;
  throw config_error("--mode must be full, material, geometric or local");
}

PlateLoadCase parse_load(const std::string& v) {
  if (v == "uniaxial") return PlateLoadCase::uniaxial;
  if (v == "biaxial") return PlateLoadCase::biaxial;
  throw config_error("--load must be uniaxial or biaxial");
}

void print_rows(const StudyResult& res) {
  std::printf("%-10s %-8s %-6s %-9s %12s %14s %10s %6s\n", "mode", "lf_ratio",
              "n_inf", "alpha", "nondim", "load", "gap", "dofs");
  for (const StudyRow& r : res.rows)
    std::printf("%-10s %-8.3f %-6d %-9.3f %12.4f %14.6e %10.3e %6d\n",
                to_string(r.mode), r.lf_ratio, r.n_inf, r.alpha, r.nondim,
                r.load, r.gap, r.n_dofs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critical buckling loads of fractional-order nonlocal beams and plates"};
  app.set_version_flag("--version", fracbuckle::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  double alpha = 0.0, lf_ratio = 0.0;
  int n_inf = 0;
  std::string bc, load, mode;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "study configuration file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--alpha", alpha, "override: single fractional order in (0, 1]");
    sub->add_option("--lf-ratio", lf_ratio, "override: single horizon/span ratio in (0, 1]");
    sub->add_option("--n-inf", n_inf, "override: elements per horizon length");
    sub->add_option("--bc", bc, "override: SS|CC|SSSS|CCCC");
    sub->add_option("--load", load, "override: uniaxial|biaxial (plates)");
    sub->add_option("--mode", mode, "override: full|material|geometric|local");
    return sub;
  };

  CLI::App* cmd_beam = add_common(app.add_subcommand("beam", "critical-load grid for a beam"));
  CLI::App* cmd_plate = add_common(app.add_subcommand("plate", "critical-load grid for a plate"));
  CLI::App* cmd_conv = add_common(app.add_subcommand("convergence", "mesh refinement sweep"));
  CLI::App* cmd_para = add_common(app.add_subcommand("parametric", "isolated material/geometric nonlocality"));
  CLI::App* cmd_modes = add_common(app.add_subcommand("modes", "buckling mode shape traces"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  using namespace fracbuckle;
  try {
    StudySpec spec;
    if (!config_path.empty()) {
      spec = parse_config_file(config_path);
    } else {
      spec = default_spec(cmd_plate->parsed() ? StructureKind::plate
                                              : StructureKind::beam);
    }

    if (cmd_beam->parsed()) spec.structure = StructureKind::beam;
    if (cmd_plate->parsed()) spec.structure = StructureKind::plate;
    if (cmd_conv->parsed()) spec.kind = StudyKind::convergence;
    if (cmd_para->parsed()) spec.kind = StudyKind::parametric;
    if (cmd_modes->parsed()) spec.kind = StudyKind::mode_shape;

    if (alpha != 0.0) spec.alphas = {alpha};
    if (lf_ratio != 0.0) spec.lf_ratios = {lf_ratio};
    if (n_inf != 0) spec.n_inf = {n_inf};
    if (!bc.empty()) spec.bc = parse_bc(bc);
    if (!load.empty()) spec.load = parse_load(load);
    if (!mode.empty()) spec.modes = {parse_mode(mode)};

    const StudyResult result = run_study(spec);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path out_path =
        std::filesystem::path(out_dir) / table_file_name(result.spec);
    if (result.spec.kind == StudyKind::mode_shape)
      emit_modes(result, out_path);
    else
      emit_table(result, out_path);

    print_rows(result);
    std::printf("wrote %s\n", out_path.string().c_str());
    return 0;
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const assembly_error& e) {
    std::fprintf(stderr, "assembly error: %s\n", e.what());
    return 3;
  } catch (const numerical_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  }
}
