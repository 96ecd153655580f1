#pragma once

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "study_driver.hpp"

// Study configuration files. INI-style sections with '#'/';' comments:
//
//   [structure]  kind, span, slenderness, modulus, poisson
//   [fractional] alpha, lf_ratio            (scalars or comma lists)
//   [mesh]       n_inf                      (scalar or comma list)
//   [bc]         kind = SS | CC | SSSS | CCCC
//   [study]      kind = single | grid | convergence | parametric | modes,
//                load, modes, samples
//
// Unknown sections or keys, duplicate keys, and trailing junk after numbers
// are hard errors reported as "<source>:<line>: message". emit_config writes
// the canonical form, which parses back to an identical spec.

namespace fracbuckle {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

struct ConfigCursor {
  std::string source;
  int line = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw config_error(source + ":" + std::to_string(line) + ": " + msg);
  }

  double number(std::string_view v) const {
    const std::string s(trim(v));
    if (s.empty()) fail("expected a number");
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) fail("trailing characters after number '" + s + "'");
    return x;
  }

  int integer(std::string_view v) const {
    const std::string s(trim(v));
    if (s.empty()) fail("expected an integer");
    char* end = nullptr;
    const long x = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size()) fail("trailing characters after integer '" + s + "'");
    return static_cast<int>(x);
  }

  template <typename F>
  auto list(std::string_view v, F&& parse_one) const {
    std::vector<decltype(parse_one(v))> out;
    std::size_t start = 0;
    const std::string s(v);
    while (start <= s.size()) {
      std::size_t comma = s.find(',', start);
      if (comma == std::string::npos) comma = s.size();
      out.push_back(parse_one(std::string_view(s).substr(start, comma - start)));
      start = comma + 1;
    }
    return out;
  }
};

inline std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

template <typename T, typename F>
std::string join(const std::vector<T>& values, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += fmt(values[i]);
  }
  return out;
}

}  // namespace detail

/// Parse a study configuration. Throws config_error with "<source>:<line>:"
/// context for malformed input.
inline StudySpec parse_config(std::istream& in,
                              const std::string& source = "<config>") {
  StudySpec spec;
  detail::ConfigCursor cur{source, 0};
  std::string section;
  std::set<std::string> seen;
  bool bc_set = false, n_inf_set = false, lf_set = false;

  std::string raw;
  while (std::getline(in, raw)) {
    ++cur.line;
    std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']') cur.fail("unterminated section header");
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      if (section != "structure" && section != "fractional" &&
          section != "mesh" && section != "bc" && section != "study")
        cur.fail("unknown section [" + section + "]");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) cur.fail("expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (section.empty()) cur.fail("key '" + key + "' before any section");
    if (key.empty()) cur.fail("empty key");
    if (value.empty()) cur.fail("empty value for '" + key + "'");
    if (!seen.insert(section + "." + key).second)
      cur.fail("duplicate key '" + key + "' in [" + section + "]");

    const auto is = [&](const char* s, const char* k) {
      return section == s && key == k;
    };

    if (is("structure", "kind")) {
      if (value == "beam") spec.structure = StructureKind::beam;
      else if (value == "plate") spec.structure = StructureKind::plate;
      else cur.fail("structure kind must be 'beam' or 'plate'");
    } else if (is("structure", "span")) {
      spec.span = cur.number(value);
    } else if (is("structure", "slenderness")) {
      spec.slenderness = cur.number(value);
    } else if (is("structure", "modulus")) {
      spec.modulus = cur.number(value);
    } else if (is("structure", "poisson")) {
      spec.poisson = cur.number(value);
    } else if (is("fractional", "alpha")) {
      spec.alphas = cur.list(value, [&](std::string_view v) { return cur.number(v); });
    } else if (is("fractional", "lf_ratio")) {
      spec.lf_ratios = cur.list(value, [&](std::string_view v) { return cur.number(v); });
      lf_set = true;
    } else if (is("mesh", "n_inf")) {
      spec.n_inf = cur.list(value, [&](std::string_view v) { return cur.integer(v); });
      n_inf_set = true;
    } else if (is("bc", "kind")) {
      if (value == "SS") spec.bc = BcKind::SS;
      else if (value == "CC") spec.bc = BcKind::CC;
      else if (value == "SSSS") spec.bc = BcKind::SSSS;
      else if (value == "CCCC") spec.bc = BcKind::CCCC;
      else cur.fail("bc kind must be SS, CC, SSSS or CCCC");
      bc_set = true;
    } else if (is("study", "kind")) {
      if (value == "single") spec.kind = StudyKind::single_case;
      else if (value == "grid") spec.kind = StudyKind::critical_grid;
      else if (value == "convergence") spec.kind = StudyKind::convergence;
      else if (value == "parametric") spec.kind = StudyKind::parametric;
      else if (value == "modes") spec.kind = StudyKind::mode_shape;
      else cur.fail("study kind must be single, grid, convergence, parametric or modes");
    } else if (is("study", "load")) {
      if (value == "uniaxial") spec.load = PlateLoadCase::uniaxial;
      else if (value == "biaxial") spec.load = PlateLoadCase::biaxial;
      else cur.fail("load must be 'uniaxial' or 'biaxial'");
    } else if (is("study", "modes")) {
      spec.modes = cur.list(value, [&](std::string_view v) {
        const std::string_view m = detail::trim(v);
        if (m == "full") return NonlocalityMode::full;
        if (m == "material") return NonlocalityMode::material_only;
        if (m == "geometric") return NonlocalityMode::geometric_only;
        if (m == "local") return NonlocalityMode::local;
        cur.fail("mode must be full, material, geometric or local");
      });
    } else if (is("study", "samples")) {
      spec.n_samples = cur.integer(value);
    } else {
      cur.fail("unknown key '" + key + "' in [" + section + "]");
    }
  }

  // structure-aware defaults for keys the file left out
  if (spec.structure == StructureKind::plate) {
    if (!bc_set) spec.bc = BcKind::SSSS;
    if (!n_inf_set) spec.n_inf = {8};
    if (!lf_set) spec.lf_ratios = {0.4, 0.6, 0.8, 1.0};
  }

  spec.validate();
  return spec;
}

inline StudySpec parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path.string() + "'");
  return parse_config(in, path.filename().string());
}

/// Canonical text form; parse_config(emit_config(s)) == s.
inline std::string emit_config(const StudySpec& spec) {
  using detail::format_double;
  std::ostringstream out;
  out << "[structure]\n";
  out << "kind = " << to_string(spec.structure) << "\n";
  out << "span = " << format_double(spec.span) << "\n";
  out << "slenderness = " << format_double(spec.slenderness) << "\n";
  out << "modulus = " << format_double(spec.modulus) << "\n";
  out << "poisson = " << format_double(spec.poisson) << "\n";
  out << "\n[fractional]\n";
  out << "alpha = " << detail::join(spec.alphas, format_double) << "\n";
  out << "lf_ratio = " << detail::join(spec.lf_ratios, format_double) << "\n";
  out << "\n[mesh]\n";
  out << "n_inf = "
      << detail::join(spec.n_inf, [](int v) { return std::to_string(v); })
      << "\n";
  out << "\n[bc]\n";
  out << "kind = " << to_string(spec.bc) << "\n";
  out << "\n[study]\n";
  out << "kind = " << to_string(spec.kind) << "\n";
  out << "load = " << to_string(spec.load) << "\n";
  out << "modes = "
      << detail::join(spec.modes,
                      [](NonlocalityMode m) { return std::string(to_string(m)); })
      << "\n";
  out << "samples = " << spec.n_samples << "\n";
  return out.str();
}

inline StudySpec parse_config(const std::string& text,
                              const std::string& source = "<config>") {
  std::istringstream in(text);
  return parse_config(in, source);
}

}  // namespace fracbuckle
