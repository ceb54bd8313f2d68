// Command-line surface over the library: spectrum scans, crossing searches,
// exact-state construction, and verification replay. All outputs are
// deterministic: fixed float width, fixed ordering, no timestamps; a config
// fingerprint ties every file to the flags that produced it.
//
// Exit codes: 0 success, 2 partial (some grid points failed), 3 verification
// failure, 4 configuration or input error.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tprabi/exact.hpp"
#include "tprabi/io.hpp"
#include "tprabi/judd.hpp"
#include "tprabi/model.hpp"
#include "tprabi/scan.hpp"
#include "tprabi/sector.hpp"
#include "tprabi/verify.hpp"

namespace {

using namespace tprabi;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitPartial = 2;
constexpr int kExitVerifyFail = 3;
constexpr int kExitConfig = 4;

struct RunConfig {
  std::string command;
  double mu = 3.0;
  double kappa_min = 0.05;
  double kappa_max = 0.95;
  int kappa_points = 400;
  int levels = 12;
  int truncation = 240;
  int ell = 1;
  int n = 4;
  std::string family = "transcendental";
  std::string out;
  std::string format;  // empty = per-command default
  std::string in;
  double tol = 1e-8;
  std::string precision = "double";
};

// Canonical flag string hashed into every output file.
std::string config_fingerprint(const RunConfig& c) {
  std::ostringstream s;
  s << "command=" << c.command << ";mu=" << format_double(c.mu)
    << ";kappa_min=" << format_double(c.kappa_min)
    << ";kappa_max=" << format_double(c.kappa_max)
    << ";kappa_points=" << c.kappa_points << ";levels=" << c.levels
    << ";truncation=" << c.truncation << ";ell=" << c.ell << ";n=" << c.n
    << ";family=" << c.family << ";tol=" << format_double(c.tol)
    << ";precision=" << c.precision;
  return fnv_hex(fnv1a64(s.str()));
}

std::vector<double> make_grid(const RunConfig& c) {
  if (!(c.kappa_min > 0.0 && c.kappa_max < 1.0 && c.kappa_min <= c.kappa_max))
    throw std::invalid_argument("kappa grid must lie inside (0,1)");
  if (c.kappa_points < 1) throw std::invalid_argument("kappa-points must be >= 1");
  std::vector<double> g;
  if (c.kappa_points == 1) {
    g.push_back(c.kappa_min);
    return g;
  }
  for (int i = 0; i < c.kappa_points; ++i)
    g.push_back(c.kappa_min +
                (c.kappa_max - c.kappa_min) * i / double(c.kappa_points - 1));
  return g;
}

void write_output(const RunConfig& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + c.out);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + c.out);
}

// ---------------------------------------------------------------------------
// Quadruple-precision sector eigenvalues for --precision extended: the same
// Sturm bisection as the double path, carried out in binary128 on a matrix
// rebuilt from the closed-form entries.
// ---------------------------------------------------------------------------

using quadf = boost::multiprecision::cpp_bin_float_quad;

std::vector<double> sector_eigenvalues_quad(const ModelParams& m, Parity s,
                                            int N, int k) {
  const SectorBasis basis = build_sector_basis(s, N);
  const std::size_t dim = basis.indices.size();
  std::vector<quadf> diag(dim), off(dim > 0 ? dim - 1 : 0);
  const quadf x = (quadf(m.kappa) + 1 / quadf(m.kappa)) / 2;
  for (std::size_t i = 0; i < dim; ++i) {
    diag[i] = 2 * x * basis.indices[i] + quadf(m.mu) * basis.spins[i];
    if (i + 1 < dim)
      off[i] = sqrt(quadf(basis.indices[i] + 1) * quadf(basis.indices[i] + 2));
  }
  auto count_below = [&](const quadf& t) {
    int cnt = 0;
    quadf d = diag[0] - t;
    const quadf floor_ = quadf(1e-60);
    if (d < 0) ++cnt;
    for (std::size_t i = 1; i < dim; ++i) {
      quadf denom = d;
      if (abs(denom) < floor_) denom = denom < 0 ? -floor_ : floor_;
      d = diag[i] - t - off[i - 1] * off[i - 1] / denom;
      if (d < 0) ++cnt;
    }
    return cnt;
  };
  // Gershgorin enclosure.
  quadf lo = diag[0], hi = diag[0];
  for (std::size_t i = 0; i < dim; ++i) {
    quadf r(0);
    if (i > 0) r += abs(off[i - 1]);
    if (i + 1 < dim) r += abs(off[i]);
    lo = (std::min)(lo, diag[i] - r);
    hi = (std::max)(hi, diag[i] + r);
  }
  std::vector<double> out;
  for (int j = 0; j < k && j < static_cast<int>(dim); ++j) {
    quadf a = lo, b = hi;
    for (int it = 0; it < 240 && (b - a) > quadf(1e-28) * (1 + abs(a)); ++it) {
      const quadf mid = (a + b) / 2;
      if (count_below(mid) > j)
        b = mid;
      else
        a = mid;
    }
    out.push_back(((a + b) / 2).convert_to<double>());
  }
  return out;
}

SpectrumTable scan_spectrum_cfg(const RunConfig& c) {
  const std::vector<double> grid = make_grid(c);
  if (c.precision != "extended")
    return scan_spectrum(c.mu, grid, c.levels, c.truncation);
  SpectrumTable t;
  t.grid = grid;
  t.mu = c.mu;
  t.truncation = c.truncation;
  t.levels = c.levels;
  for (std::size_t si = 0; si < all_parities.size(); ++si) {
    for (double kappa : grid) {
      try {
        const ModelParams m(kappa, c.mu);
        t.energies[si].push_back(
            sector_eigenvalues_quad(m, all_parities[si], c.truncation, c.levels));
      } catch (const std::exception& e) {
        t.energies[si].push_back(
            std::vector<double>(static_cast<std::size_t>(c.levels), NAN));
        t.failures.push_back("sector " +
                             std::string(parity_name(all_parities[si])) +
                             " kappa=" + std::to_string(kappa) + ": " + e.what());
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// exact-state document assembly.
// ---------------------------------------------------------------------------

std::string coeff_array(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? ", " : "") + format_double(v[i]);
  return s + "]";
}

struct BranchChecks {
  std::string label;          // branch or parity name
  std::string parity;         // measured parity
  double parity_deviation = 0.0;
  double system_residual = 0.0;
  double fourth_residual = 0.0;
  std::string norm_verdict;
  double sigma_hat = 0.0;
  double norm_sq = 0.0;
  bool pass(double tol) const {
    return system_residual < tol && fourth_residual < tol &&
           parity_deviation < tol && norm_verdict == "convergent";
  }
};

void emit_branch(std::ostringstream& out, const BranchChecks& b,
                 const char* key) {
  out << "        {\"" << key << "\": \"" << b.label << "\", \"parity\": \""
      << b.parity << "\", \"parity_deviation\": "
      << format_double(b.parity_deviation)
      << ", \"system_residual\": " << format_double(b.system_residual)
      << ", \"fourth_order_residual\": " << format_double(b.fourth_residual)
      << ", \"norm_verdict\": \"" << b.norm_verdict
      << "\", \"sigma_hat\": " << format_double(b.sigma_hat)
      << ", \"norm_sq\": " << format_double(b.norm_sq) << "}";
}

BranchChecks run_checks(const std::string& label,
                        const StateEvaluator& evaluator,
                        const StateValues& values, const ModelParams& m,
                        double energy,
                        const std::pair<std::vector<cld>, std::vector<cld>>& taylor) {
  BranchChecks b;
  b.label = label;
  const OdeResidualReport rep = ode_residual(evaluator, m, energy);
  b.system_residual = rep.system.max_residual;
  b.fourth_residual = rep.fourth_order.max_residual;
  const auto [p, dev] = determine_parity(values);
  b.parity = parity_name(p);
  b.parity_deviation = dev;
  const NormReport nr = bargmann_norm(taylor.first, taylor.second);
  b.norm_verdict = norm_verdict_name(nr.verdict);
  b.sigma_hat = nr.sigma_hat;
  b.norm_sq = nr.norm_sq;
  return b;
}

int cmd_exact_state(const RunConfig& c) {
  const std::string hash = config_fingerprint(c);
  std::ostringstream out;
  bool all_verified = true;

  out << "{\n  \"schema_version\": " << kSchemaVersion
      << ",\n  \"config_hash\": \"" << hash << "\",\n  \"family\": \""
      << c.family << "\",\n  \"mu\": " << format_double(c.mu)
      << ",\n  \"tol\": " << format_double(c.tol)
      << ",\n  \"truncation\": " << c.truncation << ",\n  \"precision\": \""
      << c.precision << "\"";

  if (c.family == "transcendental") {
    out << ",\n  \"ell\": " << c.ell;
    const std::vector<KappaRoot> roots = find_kappa_roots(c.ell, c.mu);
    out << ",\n  \"roots\": [";
    for (std::size_t ri = 0; ri < roots.size(); ++ri) {
      const double kappa = roots[ri].kappa;
      const ExactState plus = build_state(c.ell, kappa, c.mu, Branch::plus);
      const ExactState minus = build_state(c.ell, kappa, c.mu, Branch::minus);
      const ADBRepresentation ad = reduce_to_AdB(plus.psi1, kappa);
      const ModelParams m(kappa, c.mu);

      std::vector<BranchChecks> checks;
      for (const ExactState* st : {&plus, &minus}) {
        checks.push_back(run_checks(branch_name(st->psi1.branch),
                                    make_evaluator(*st), make_values(*st), m,
                                    st->energy, state_taylor(*st)));
        all_verified = all_verified && checks.back().pass(c.tol);
      }
      const DegeneracyReport deg =
          degeneracy_count(kappa, c.mu, plus.energy, c.truncation);
      const bool verified = checks[0].pass(c.tol) && checks[1].pass(c.tol) &&
                            deg.count == 2;
      all_verified = all_verified && deg.count == 2;

      out << (ri ? ",\n" : "\n") << "    {\n      \"kappa\": "
          << format_double(kappa)
          << ",\n      \"multiplicity\": " << roots[ri].multiplicity
          << ",\n      \"chi\": " << format_double(plus.chi)
          << ",\n      \"energy\": " << format_double(plus.energy)
          << ",\n      \"null_vector\": " << coeff_array(plus.a)
          << ",\n      \"psi1\": {\"l_start\": " << plus.psi1.l_start
          << ", \"coefficients\": " << coeff_array(plus.psi1.coefficients)
          << "},\n      \"psi2\": {\"l_start\": " << plus.psi2.l_start
          << ", \"coefficients\": " << coeff_array(plus.psi2.coefficients)
          << "},\n      \"reduction\": {\"A\": " << coeff_array(ad.A)
          << ", \"B\": " << coeff_array(ad.B) << ", \"d_branch_for_plus\": \""
          << branch_name(ad.d_branch) << "\"},\n      \"branches\": [\n";
      emit_branch(out, checks[0], "branch");
      out << ",\n";
      emit_branch(out, checks[1], "branch");
      out << "\n      ],\n      \"degeneracy_count\": " << deg.count
          << ",\n      \"verified\": " << (verified ? "true" : "false")
          << "\n    }";
    }
    out << (roots.empty() ? "]" : "\n  ]");
    if (roots.empty())
      out << ",\n  \"note\": \"no determinant roots in (0,1) for this (ell, mu)\"";
  } else {  // judd
    out << ",\n  \"n\": " << c.n;
    const std::vector<JuddState> states = judd_states(c.n, c.mu);
    out << ",\n  \"roots\": [";
    for (std::size_t ri = 0; ri < states.size(); ++ri) {
      const JuddState& st = states[ri];
      const ModelParams m(st.kappa, c.mu);
      const Parity pa = (c.n % 2 == 0) ? Parity::plus_one : Parity::plus_i;
      const Parity pb = (c.n % 2 == 0) ? Parity::minus_one : Parity::minus_i;

      std::vector<BranchChecks> checks;
      for (Parity p : {pa, pb}) {
        checks.push_back(run_checks(parity_name(p), make_evaluator(st, p),
                                    make_values(st, p), m, st.energy,
                                    state_taylor(st, p)));
        all_verified = all_verified && checks.back().pass(c.tol);
      }
      const DegeneracyReport deg =
          degeneracy_count(st.kappa, c.mu, st.energy, c.truncation);
      const bool verified = checks[0].pass(c.tol) && checks[1].pass(c.tol) &&
                            deg.count == 2;
      all_verified = all_verified && deg.count == 2;

      out << (ri ? ",\n" : "\n") << "    {\n      \"kappa\": "
          << format_double(st.kappa)
          << ",\n      \"chi\": " << format_double(c.n / 2.0)
          << ",\n      \"energy\": " << format_double(st.energy)
          << ",\n      \"P\": " << coeff_array(st.P)
          << ",\n      \"Q\": " << coeff_array(st.Q)
          << ",\n      \"projections\": [\n";
      emit_branch(out, checks[0], "sector");
      out << ",\n";
      emit_branch(out, checks[1], "sector");
      out << "\n      ],\n      \"degeneracy_count\": " << deg.count
          << ",\n      \"verified\": " << (verified ? "true" : "false")
          << "\n    }";
    }
    out << (states.empty() ? "]" : "\n  ]");
    if (states.empty())
      out << ",\n  \"note\": \"the closure system is nonsingular on (0,1) for this (n, mu)\"";
  }
  out << "\n}\n";
  write_output(c, out.str());
  return all_verified ? kExitOk : kExitVerifyFail;
}

// ---------------------------------------------------------------------------
// verify: replay the construction and checks from an exact-state file.
// ---------------------------------------------------------------------------

struct CheckLine {
  std::string name;
  double measured = 0.0;
  double allowed = 0.0;
  bool pass = false;
};

void print_check(std::size_t root, const CheckLine& c) {
  std::printf("root %zu  %-24s measured %.3e  allowed %.3e  [%s]\n", root,
              c.name.c_str(), c.measured, c.allowed, c.pass ? "pass" : "FAIL");
}

const json& field(const json& j, const char* name, const std::string& where) {
  auto it = j.find(name);
  if (it == j.end())
    throw std::runtime_error("missing field '" + std::string(name) + "' at " +
                             where);
  return *it;
}

int cmd_verify(const RunConfig& c) {
  if (c.in.empty()) {
    std::cerr << "verify: --in <exact-state file> is required\n";
    return kExitConfig;
  }
  std::ifstream f(c.in, std::ios::binary);
  if (!f) {
    std::cerr << "verify: cannot open " << c.in << "\n";
    return kExitConfig;
  }
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    // e.byte is the offset; report the line it falls on.
    std::ifstream g(c.in, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(g)),
                     std::istreambuf_iterator<char>());
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    std::cerr << "verify: parse error in " << c.in << " at line " << line
              << ": " << e.what() << "\n";
    return kExitConfig;
  }

  bool all_pass = true;
  try {
    const std::string family = field(doc, "family", "top level");
    const double mu = field(doc, "mu", "top level");
    const double file_tol = field(doc, "tol", "top level");
    const double tol = (c.tol != 1e-8) ? c.tol : file_tol;
    const int truncation = field(doc, "truncation", "top level");
    const json& roots = field(doc, "roots", "top level");

    for (std::size_t ri = 0; ri < roots.size(); ++ri) {
      const std::string where = "roots[" + std::to_string(ri) + "]";
      const json& r = roots[ri];
      const double kappa = field(r, "kappa", where);
      std::vector<CheckLine> lines;

      if (family == "transcendental") {
        const int ell = field(doc, "ell", "top level");
        const ExactState plus = build_state(ell, kappa, mu, Branch::plus);
        const ExactState minus = build_state(ell, kappa, mu, Branch::minus);

        // Coefficients must replay to the stored values.
        const json& stored = field(r, "null_vector", where);
        double cdiff = 0.0;
        if (stored.size() != plus.a.size())
          cdiff = 1.0;
        else
          for (std::size_t i = 0; i < plus.a.size(); ++i)
            cdiff = std::max(cdiff,
                             std::abs(double(stored[i]) - plus.a[i]));
        lines.push_back({"coefficients", cdiff, 1e-9, cdiff < 1e-9});

        const ModelParams m(kappa, mu);
        for (const ExactState* st : {&plus, &minus}) {
          const std::string tag =
              std::string("branch ") + branch_name(st->psi1.branch);
          const OdeResidualReport rep =
              ode_residual(make_evaluator(*st), m, st->energy);
          lines.push_back({tag + " system residual", rep.system.max_residual,
                           tol, rep.system.max_residual < tol});
          lines.push_back({tag + " fourth-order residual",
                           rep.fourth_order.max_residual, tol,
                           rep.fourth_order.max_residual < tol});
          const auto [p, dev] = determine_parity(make_values(*st));
          lines.push_back({tag + " parity deviation", dev, tol, dev < tol});
          const auto taylor = state_taylor(*st);
          const NormReport nr = bargmann_norm(taylor.first, taylor.second);
          lines.push_back({tag + " norm convergent",
                           nr.verdict == NormVerdict::convergent ? 0.0 : 1.0,
                           0.5, nr.verdict == NormVerdict::convergent});
        }
        const DegeneracyReport deg =
            degeneracy_count(kappa, mu, plus.energy, truncation);
        lines.push_back({"degeneracy count", double(deg.count), 2.0,
                         deg.count == 2});
      } else {
        const int n = field(doc, "n", "top level");
        const std::vector<JuddState> sts = judd_states(n, mu);
        const JuddState* match = nullptr;
        for (const JuddState& s : sts)
          if (std::abs(s.kappa - kappa) < 1e-8) match = &s;
        if (!match)
          throw std::runtime_error("no state at stored kappa in " + where);

        const json& storedP = field(r, "P", where);
        double cdiff = 0.0;
        if (storedP.size() != match->P.size())
          cdiff = 1.0;
        else
          for (std::size_t i = 0; i < match->P.size(); ++i)
            cdiff = std::max(cdiff,
                             std::abs(double(storedP[i]) - match->P[i]));
        lines.push_back({"coefficients", cdiff, 1e-9, cdiff < 1e-9});

        const ModelParams m(kappa, mu);
        const Parity pa = (n % 2 == 0) ? Parity::plus_one : Parity::plus_i;
        const Parity pb = (n % 2 == 0) ? Parity::minus_one : Parity::minus_i;
        for (Parity p : {pa, pb}) {
          const std::string tag = std::string("sector ") + parity_name(p);
          const OdeResidualReport rep =
              ode_residual(make_evaluator(*match, p), m, match->energy);
          lines.push_back({tag + " system residual", rep.system.max_residual,
                           tol, rep.system.max_residual < tol});
          lines.push_back({tag + " fourth-order residual",
                           rep.fourth_order.max_residual, tol,
                           rep.fourth_order.max_residual < tol});
          const auto [pm, dev] = determine_parity(make_values(*match, p));
          lines.push_back({tag + " parity deviation", dev, tol,
                           dev < tol && pm == p});
          const auto taylor = state_taylor(*match, p);
          const NormReport nr = bargmann_norm(taylor.first, taylor.second);
          lines.push_back({tag + " norm convergent",
                           nr.verdict == NormVerdict::convergent ? 0.0 : 1.0,
                           0.5, nr.verdict == NormVerdict::convergent});
        }
        const DegeneracyReport deg =
            degeneracy_count(kappa, mu, match->energy, truncation);
        lines.push_back({"degeneracy count", double(deg.count), 2.0,
                         deg.count == 2});
      }

      for (const CheckLine& l : lines) {
        print_check(ri, l);
        all_pass = all_pass && l.pass;
      }
    }
  } catch (const json::exception& e) {
    std::cerr << "verify: malformed input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "verify: " << e.what() << "\n";
    return kExitConfig;
  }

  std::printf("verify: %s\n", all_pass ? "all checks passed" : "CHECKS FAILED");
  return all_pass ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"two-photon Rabi model: spectra, crossings, exact states"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--mu", cfg.mu, "spin coupling mu >= 0");
    sub->add_option("--truncation", cfg.truncation, "Fock cutoff N");
    sub->add_option("--tol", cfg.tol, "verification tolerance");
    sub->add_option("--out", cfg.out, "output path (default: stdout)");
    sub->add_option("--format", cfg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--precision", cfg.precision, "double or extended")
        ->check(CLI::IsMember({"double", "extended"}));
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--kappa-min", cfg.kappa_min, "grid start, in (0,1)");
    sub->add_option("--kappa-max", cfg.kappa_max, "grid end, in (0,1)");
    sub->add_option("--kappa-points", cfg.kappa_points, "grid size");
    sub->add_option("--levels", cfg.levels, "levels per sector");
  };

  CLI::App* sp = app.add_subcommand("spectrum", "per-sector levels on a kappa grid");
  add_common(sp);
  add_grid(sp);
  CLI::App* cr = app.add_subcommand("crossings", "locate level crossings");
  add_common(cr);
  add_grid(cr);
  CLI::App* ex = app.add_subcommand("exact-state",
                                    "construct and check degenerate states");
  add_common(ex);
  ex->add_option("--ell", cfg.ell, "quarter-lattice window index (>= 1)");
  ex->add_option("--n", cfg.n, "half-integer lattice index (>= 2)");
  ex->add_option("--family", cfg.family, "transcendental or judd")
      ->check(CLI::IsMember({"transcendental", "judd"}));
  CLI::App* ve = app.add_subcommand("verify", "replay checks from a state file");
  add_common(ve);
  ve->add_option("--in", cfg.in, "exact-state JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sp->parsed()) {
      cfg.command = "spectrum";
      const SpectrumTable t = scan_spectrum_cfg(cfg);
      const std::string hash = config_fingerprint(cfg);
      if (cfg.format == "json")
        write_output(cfg, spectrum_json(t, hash));
      else
        write_output(cfg, spectrum_csv(t, hash));
      for (const std::string& s : t.failures) std::cerr << "warning: " << s << "\n";
      return t.failures.empty() ? kExitOk : kExitPartial;
    }
    if (cr->parsed()) {
      cfg.command = "crossings";
      const SpectrumTable t = scan_spectrum_cfg(cfg);
      const std::vector<CrossingRecord> rs = find_crossings(t);
      const std::string hash = config_fingerprint(cfg);
      if (cfg.format == "csv")
        write_output(cfg, crossings_csv(rs, hash));
      else
        write_output(cfg, crossings_json(rs, hash, 1e-10));
      for (const std::string& s : t.failures) std::cerr << "warning: " << s << "\n";
      return t.failures.empty() ? kExitOk : kExitPartial;
    }
    if (ex->parsed()) {
      cfg.command = "exact-state";
      if (cfg.format == "csv") {
        std::cerr << "exact-state: only json output is supported\n";
        return kExitConfig;
      }
      return cmd_exact_state(cfg);
    }
    cfg.command = "verify";
    return cmd_verify(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerifyFail;
  }
}
