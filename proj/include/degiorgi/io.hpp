#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "degiorgi/coefficients.hpp"
#include "degiorgi/field.hpp"
#include "degiorgi/level_set.hpp"
#include "degiorgi/report.hpp"

namespace degiorgi::io {

/// Shortest-exact decimal for a double (17 significant digits round-trips
/// bit-exactly).
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

inline Json sidecar(const BallDomain& dom, std::size_t value_count) {
  const int per_axis = 2 * (static_cast<int>(std::ceil(dom.radius() / dom.h())) - 1) + 1;
  Json dims = Json::array();
  for (int d = 0; d < dom.dim(); ++d) dims.push_back(per_axis);
  Json center = Json::array();
  for (int d = 0; d < dom.dim(); ++d) center.push_back(dom.center()[d]);
  return Json{{"n", dom.dim()},   {"dims", dims},
              {"h", dom.h()},     {"center", center},
              {"radius", dom.radius()}, {"value_count", value_count}};
}

inline DomainPtr domain_from_sidecar(const Json& j) {
  Point center{0, 0, 0};
  if (j.contains("center"))
    for (std::size_t d = 0; d < j["center"].size(); ++d) center[d] = j["center"][d];
  return BallDomain::make(j["n"].get<int>(), j["radius"].get<double>(),
                          j["h"].get<double>(), center);
}

/// Field dump: <base>.json sidecar plus <base>.csv, one value per line in
/// mask enumeration order (lexicographic cell indices). Bit-exact at float64.
inline void dump_field(const ScalarField& u, const std::filesystem::path& base) {
  write_json(base.string() + ".json", sidecar(u.domain(), u.size()));
  std::string csv;
  csv.reserve(u.size() * 20);
  for (std::size_t i = 0; i < u.size(); ++i) {
    csv += format_double(u[i]);
    csv += '\n';
  }
  write_text(base.string() + ".csv", csv);
}

inline ScalarField load_field(const std::filesystem::path& base) {
  const Json meta = Json::parse(read_text(base.string() + ".json"));
  DomainPtr dom = domain_from_sidecar(meta);
  std::vector<double> vals;
  vals.reserve(meta["value_count"].get<std::size_t>());
  std::istringstream in(read_text(base.string() + ".csv"));
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) vals.push_back(std::strtod(line.c_str(), nullptr));
  if (vals.size() != meta["value_count"].get<std::size_t>())
    throw std::runtime_error("field dump: value count mismatch");
  return ScalarField(dom, std::move(vals));
}

/// Coefficient dump: same sidecar scheme; one CSV line per active element
/// (lexicographic anchors) with n(n+1)/2 comma-separated entries
/// (xx,yy,xy for n=2; xx,yy,zz,xy,xz,yz for n=3).
inline void dump_coefficients(const CoefficientField& a, const std::filesystem::path& base) {
  Json meta = sidecar(a.domain(), a.entries().size());
  meta["lambda"] = a.lambda();
  meta["Lambda"] = a.Lambda();
  meta["kind"] = a.kind();
  meta["seed"] = a.seed();
  write_json(base.string() + ".json", meta);
  const int dim = a.domain().dim();
  std::string csv;
  for (const SymMat& m : a.entries()) {
    if (dim == 2) {
      csv += format_double(m[0]) + "," + format_double(m[1]) + "," + format_double(m[3]);
    } else {
      csv += format_double(m[0]) + "," + format_double(m[1]) + "," + format_double(m[2]) +
             "," + format_double(m[3]) + "," + format_double(m[4]) + "," +
             format_double(m[5]);
    }
    csv += '\n';
  }
  write_text(base.string() + ".csv", csv);
}

inline CoefficientField load_coefficients(const std::filesystem::path& base) {
  const Json meta = Json::parse(read_text(base.string() + ".json"));
  DomainPtr dom = domain_from_sidecar(meta);
  const int dim = dom->dim();
  std::vector<SymMat> entries;
  std::istringstream in(read_text(base.string() + ".csv"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SymMat m{0, 0, 0, 0, 0, 0};
    const char* p = line.c_str();
    char* end = nullptr;
    double v[6];
    const int count = dim == 2 ? 3 : 6;
    for (int k = 0; k < count; ++k) {
      v[k] = std::strtod(p, &end);
      p = (*end == ',') ? end + 1 : end;
    }
    if (dim == 2) {
      m[0] = v[0]; m[1] = v[1]; m[3] = v[2];
    } else {
      m = {v[0], v[1], v[2], v[3], v[4], v[5]};
    }
    entries.push_back(m);
  }
  return CoefficientField(dom, std::move(entries), meta["lambda"].get<double>(),
                          meta["Lambda"].get<double>(), meta["kind"].get<std::string>(),
                          meta["seed"].get<std::uint64_t>());
}

/// Cell-set dump: sidecar plus CSV of member cell indices.
inline void dump_cellset(const CellSet& s, const std::filesystem::path& base) {
  write_json(base.string() + ".json", sidecar(s.ambient(), s.count()));
  std::string csv;
  const int dim = s.ambient().dim();
  for (const CellIndex& c : s.members()) {
    csv += std::to_string(c[0]) + "," + std::to_string(c[1]);
    if (dim == 3) csv += "," + std::to_string(c[2]);
    csv += '\n';
  }
  write_text(base.string() + ".csv", csv);
}

}  // namespace degiorgi::io
