#pragma once

// Deterministic serialization of scan artifacts: fixed-width float
// formatting, order-stable row emission, FNV-1a config fingerprints, and a
// CSV parser for the round-trip property. No timestamps anywhere: identical
// configuration must produce byte-identical files.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tprabi/model.hpp"
#include "tprabi/scan.hpp"

namespace tprabi {

// 17 significant digits: enough to round-trip any double, fixed width for
// stable diffs.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string fnv_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

constexpr int kSchemaVersion = 1;

// --------------------------------------------------------------------------
// Spectrum tables as CSV.
// --------------------------------------------------------------------------

struct SpectrumRow {
  double kappa = 0.0;
  std::string sector;
  int level_index = 0;
  double E = 0.0;
  double chi = 0.0;
  std::string status;
};

struct ParsedSpectrumCsv {
  std::string config_hash;
  std::vector<SpectrumRow> rows;
};

// One comment line carrying the config fingerprint, one header line, then
// rows ordered by (kappa, sector in the fixed +1,-1,+i,-i order, level).
inline std::string spectrum_csv(const SpectrumTable& t,
                                const std::string& config_hash) {
  std::ostringstream out;
  out << "# config_hash=" << config_hash << " schema_version=" << kSchemaVersion
      << "\n";
  out << "kappa,sector,level_index,E,chi,status\n";
  for (std::size_t p = 0; p < t.grid.size(); ++p) {
    const ModelParams m(t.grid[p], t.mu);
    for (std::size_t si = 0; si < all_parities.size(); ++si) {
      for (int lv = 0; lv < t.levels; ++lv) {
        const double E = t.energies[si][p][static_cast<std::size_t>(lv)];
        const bool ok = std::isfinite(E);
        out << format_double(t.grid[p]) << ',' << parity_name(all_parities[si])
            << ',' << lv << ',' << format_double(E) << ','
            << format_double(ok ? chi_from_energy(E, m) : E) << ','
            << (ok ? "ok" : "failed") << "\n";
      }
    }
  }
  return out.str();
}

// Same table, same row order, as a JSON document.
inline std::string spectrum_json(const SpectrumTable& t,
                                 const std::string& config_hash) {
  std::ostringstream out;
  out << "{\n  \"schema_version\": " << kSchemaVersion
      << ",\n  \"config_hash\": \"" << config_hash
      << "\",\n  \"mu\": " << format_double(t.mu)
      << ",\n  \"truncation\": " << t.truncation
      << ",\n  \"levels\": " << t.levels << ",\n  \"rows\": [";
  bool first = true;
  for (std::size_t p = 0; p < t.grid.size(); ++p) {
    const ModelParams m(t.grid[p], t.mu);
    for (std::size_t si = 0; si < all_parities.size(); ++si) {
      for (int lv = 0; lv < t.levels; ++lv) {
        const double E = t.energies[si][p][static_cast<std::size_t>(lv)];
        const bool ok = std::isfinite(E);
        out << (first ? "\n" : ",\n") << "    {\"kappa\": "
            << format_double(t.grid[p]) << ", \"sector\": \""
            << parity_name(all_parities[si]) << "\", \"level_index\": " << lv
            << ", \"E\": " << (ok ? format_double(E) : "null")
            << ", \"chi\": "
            << (ok ? format_double(chi_from_energy(E, m)) : "null")
            << ", \"status\": \"" << (ok ? "ok" : "failed") << "\"}";
        first = false;
      }
    }
  }
  out << (first ? "]" : "\n  ]") << "\n}\n";
  return out.str();
}

namespace detail {

inline double parse_csv_double(const std::string& field, std::size_t line,
                               const char* name) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("csv parse error at line " + std::to_string(line) +
                             ", field '" + name + "': '" + field + "'");
  }
}

}  // namespace detail

inline ParsedSpectrumCsv parse_spectrum_csv(const std::string& text) {
  std::istringstream in(text);
  ParsedSpectrumCsv out;
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line) || line.rfind("# config_hash=", 0) != 0)
    throw std::runtime_error("csv parse error at line 1: missing config header");
  ++lineno;
  const std::size_t hash_end = line.find(' ', 14);
  out.config_hash = line.substr(14, hash_end == std::string::npos
                                        ? std::string::npos
                                        : hash_end - 14);

  if (!std::getline(in, line) ||
      line != "kappa,sector,level_index,E,chi,status")
    throw std::runtime_error("csv parse error at line 2: bad column header");
  ++lineno;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      f.push_back(line.substr(start, comma == std::string::npos
                                         ? std::string::npos
                                         : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != 6)
      throw std::runtime_error("csv parse error at line " +
                               std::to_string(lineno) + ": expected 6 fields, got " +
                               std::to_string(f.size()));
    SpectrumRow r;
    r.kappa = detail::parse_csv_double(f[0], lineno, "kappa");
    r.sector = f[1];
    r.level_index = static_cast<int>(
        detail::parse_csv_double(f[2], lineno, "level_index"));
    r.E = detail::parse_csv_double(f[3], lineno, "E");
    r.chi = detail::parse_csv_double(f[4], lineno, "chi");
    r.status = f[5];
    out.rows.push_back(std::move(r));
  }
  return out;
}

// --------------------------------------------------------------------------
// Crossing records as JSON or CSV.
// --------------------------------------------------------------------------

inline std::string crossings_json(const std::vector<CrossingRecord>& rs,
                                  const std::string& config_hash,
                                  double refinement_tol) {
  std::ostringstream out;
  out << "{\n  \"schema_version\": " << kSchemaVersion
      << ",\n  \"config_hash\": \"" << config_hash
      << "\",\n  \"refinement_tol\": " << format_double(refinement_tol)
      << ",\n  \"crossings\": [";
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const CrossingRecord& r = rs[i];
    out << (i ? ",\n" : "\n") << "    {\"kappa_star\": "
        << format_double(r.kappa_star)
        << ", \"E_star\": " << format_double(r.E_star)
        << ", \"chi_star\": " << format_double(r.chi_star)
        << ", \"parity_pair\": [\"" << parity_name(r.parity_pair[0]) << "\", \""
        << parity_name(r.parity_pair[1]) << "\"], \"family\": \""
        << family_name(r.family) << "\", \"index\": " << r.index
        << ", \"refinement_tol\": " << format_double(refinement_tol)
        << ", \"diagnostics\": \"" << json_escape(r.diagnostics) << "\"}";
  }
  out << (rs.empty() ? "]" : "\n  ]") << "\n}\n";
  return out.str();
}

inline std::string crossings_csv(const std::vector<CrossingRecord>& rs,
                                 const std::string& config_hash) {
  std::ostringstream out;
  out << "# config_hash=" << config_hash << " schema_version=" << kSchemaVersion
      << "\n";
  out << "kappa_star,E_star,chi_star,parity_1,parity_2,family,index,diagnostics\n";
  for (const CrossingRecord& r : rs) {
    out << format_double(r.kappa_star) << ',' << format_double(r.E_star) << ','
        << format_double(r.chi_star) << ',' << parity_name(r.parity_pair[0])
        << ',' << parity_name(r.parity_pair[1]) << ',' << family_name(r.family)
        << ',' << r.index << ',' << r.diagnostics << "\n";
  }
  return out.str();
}

}  // namespace tprabi
