#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "study_driver.hpp"
#include "version.hpp"

// CSV emission of study results. Tables carry one row per parameter key
// (lf_ratio, plus n_inf for convergence sweeps and mode for parametric
// isolation), one display column per alpha rounded to 4 decimals, and one
// full-precision companion column per alpha for lossless reuse. Files are
// written atomically (temp file + rename) so readers never observe partial
// tables.

namespace fracbuckle {

namespace detail {

/// Shortest decimal form that parses back to the same double.
inline std::string format_full(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

inline std::string format_fixed(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline void write_atomic(const std::filesystem::path& path,
                         const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw config_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw config_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

inline void emit_header(std::ostringstream& out, const StudyResult& res) {
  const StudySpec& s = res.spec;
  out << "# fracbuckle " << kVersion << "\n";
  out << "# study = " << to_string(s.kind)
      << ", structure = " << to_string(s.structure)
      << ", bc = " << to_string(s.bc);
  if (s.structure == StructureKind::plate)
    out << ", load = " << to_string(s.load);
  out << "\n";
  out << "# span = " << format_full(s.span)
      << ", slenderness = " << format_full(s.slenderness)
      << ", modulus = " << format_full(s.modulus);
  if (s.structure == StructureKind::plate)
    out << ", poisson = " << format_full(s.poisson);
  out << "\n";
  if (s.n_inf.size() == 1) out << "# n_inf = " << s.n_inf[0] << "\n";
}

}  // namespace detail

/// Canonical output file name, "<study>_<structure>_<bc>.csv".
inline std::string table_file_name(const StudySpec& spec) {
  return std::string(to_string(spec.kind)) + "_" + to_string(spec.structure) +
         "_" + to_string(spec.bc) + ".csv";
}

/// Write a scalar study table (single, grid, convergence, parametric).
inline void emit_table(const StudyResult& res,
                       const std::filesystem::path& path) {
  if (res.rows.empty()) throw config_error("emit_table: empty result");
  const StudySpec& spec = res.spec;
  if (spec.kind == StudyKind::mode_shape)
    throw config_error("emit_table: use emit_modes for mode traces");

  const bool with_mode = spec.kind == StudyKind::parametric || spec.modes.size() > 1;
  const bool with_ninf = spec.kind == StudyKind::convergence || spec.n_inf.size() > 1;
  const std::size_t na = spec.alphas.size();
  if (res.rows.size() % na != 0)
    throw config_error("emit_table: row count does not tile the alpha grid");

  std::ostringstream out;
  detail::emit_header(out, res);
  if (with_mode) out << "mode,";
  out << "lf_ratio";
  if (with_ninf) out << ",n_inf";
  for (double a : spec.alphas) out << ",nd_alpha_" << detail::format_full(a);
  for (double a : spec.alphas)
    out << ",nd_alpha_" << detail::format_full(a) << "_full";
  out << "\n";

  // canonical row order: chunks of |alphas| share one key tuple
  for (std::size_t base = 0; base < res.rows.size(); base += na) {
    const StudyRow& first = res.rows[base];
    for (std::size_t k = 1; k < na; ++k) {
      const StudyRow& r = res.rows[base + k];
      if (r.lf_ratio != first.lf_ratio || r.n_inf != first.n_inf ||
          r.mode != first.mode)
        throw config_error("emit_table: rows out of canonical order");
    }
    if (with_mode) out << to_string(first.mode) << ",";
    out << detail::format_full(first.lf_ratio);
    if (with_ninf) out << "," << first.n_inf;
    for (std::size_t k = 0; k < na; ++k)
      out << "," << detail::format_fixed(res.rows[base + k].nondim);
    for (std::size_t k = 0; k < na; ++k)
      out << "," << detail::format_full(res.rows[base + k].nondim);
    out << "\n";
  }
  detail::write_atomic(path, out.str());
}

/// Write mode traces: column x, one deflection column per case.
inline void emit_modes(const StudyResult& res,
                       const std::filesystem::path& path) {
  if (res.rows.empty()) throw config_error("emit_modes: empty result");
  for (const StudyRow& r : res.rows)
    if (r.trace.empty())
      throw config_error("emit_modes: result carries no mode traces");
  const std::size_t n = res.rows.front().trace.size();
  for (const StudyRow& r : res.rows)
    if (r.trace.size() != n)
      throw config_error("emit_modes: inconsistent trace lengths");

  std::ostringstream out;
  detail::emit_header(out, res);
  out << "x";
  for (const StudyRow& r : res.rows) {
    out << ",w_alpha" << detail::format_full(r.alpha) << "_lf"
        << detail::format_full(r.lf_ratio);
    if (res.spec.n_inf.size() > 1) out << "_ninf" << r.n_inf;
    if (res.spec.modes.size() > 1) out << "_" << to_string(r.mode);
  }
  out << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << detail::format_full(res.rows.front().trace[i][0]);
    for (const StudyRow& r : res.rows)
      out << "," << detail::format_fixed(r.trace[i][1], 9);
    out << "\n";
  }
  detail::write_atomic(path, out.str());
}

}  // namespace fracbuckle
