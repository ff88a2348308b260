#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "sqf/arith.hpp"
#include "sqf/cover.hpp"
#include "sqf/cubic.hpp"
#include "sqf/lattice.hpp"
#include "sqf/sieve.hpp"
#include "sqf/squarefull.hpp"
#include "verify_suite.hpp"

using json = nlohmann::ordered_json;
using namespace sqf;

namespace {

constexpr const char* kVersion = "sqfull 0.1.0";
constexpr u64 kHardCap = 1ull << 60;
constexpr u64 kScanCap = 1ull << 40;

struct Common {
  u64 seed = 42;
  int threads = 1;
  std::string format;  // per-command default when empty
  std::string out;
};

std::ostream& open_sink(const Common& c, std::ofstream& file) {
  if (c.out.empty()) return std::cout;
  file.open(c.out, std::ios::binary);
  if (!file) {
    std::cerr << "cannot open output file " << c.out << "\n";
    std::exit(1);
  }
  return file;
}

void csv_header(std::ostream& os, const Common& c, const std::string& command,
                const std::vector<std::pair<std::string, std::string>>& cfg) {
  os << "# " << kVersion << "\n# command = " << command << "\n";
  for (auto& [k, v] : cfg) os << "# " << k << " = " << v << "\n";
}

json meta_block(const Common& c, const std::string& command,
                const std::vector<std::pair<std::string, std::string>>& cfg) {
  json m;
  m["version"] = kVersion;
  m["command"] = command;
  for (auto& [k, v] : cfg) m[k] = v;
  (void)c;
  return m;
}

void refuse_if_oversized(u64 B, u64 cap, const std::string& why) {
  if (B > kHardCap) {
    std::cerr << "refusing: B exceeds the 2^60 overflow cap\n";
    std::exit(2);
  }
  if (B > cap) {
    std::cerr << "refusing: " << why << "\n";
    std::exit(2);
  }
}

bool parse_coeffs(const std::string& s, CoeffTriple& a) {
  std::stringstream ss(s);
  i64 v[3];
  char comma;
  for (int i = 0; i < 3; ++i) {
    if (!(ss >> v[i])) return false;
    if (i < 2 && !(ss >> comma)) return false;
  }
  a = {v[0], v[1], v[2]};
  return true;
}

int default_threads() {
  if (const char* env = std::getenv("SQFULL_THREADS")) {
    int t = std::atoi(env);
    if (t >= 1 && t <= 256) return t;
  }
  return 1;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << v;
  return os.str();
}

int cmd_count(const Common& c, u64 B, bool primitive, bool unordered, bool table,
              bool witnesses) {
  refuse_if_oversized(B, kScanCap, "the pair scan above 2^40 is impractical");
  std::ofstream file;
  std::ostream& os = open_sink(c, file);
  std::vector<std::pair<std::string, std::string>> cfg = {
      {"b", std::to_string(B)},
      {"primitive", primitive ? "1" : "0"},
      {"threads", std::to_string(c.threads)}};
  if (c.format == "json") {
    json doc;
    doc["meta"] = meta_block(c, "count", cfg);
    auto r = count_solutions(B, primitive, witnesses, c.threads);
    doc["count"] = r.count;
    doc["count_per_sqrtB"] = r.count / std::sqrt(static_cast<double>(B));
    if (unordered) doc["unordered"] = unordered_count(B, primitive, c.threads);
    if (witnesses) {
      json w = json::array();
      for (auto& t : r.witnesses) w.push_back({t.u, t.v, t.w});
      doc["witnesses"] = w;
    }
    os << doc.dump(2) << "\n";
    return 0;
  }
  csv_header(os, c, "count", cfg);
  std::vector<u64> thresholds;
  if (table) {
    for (u64 t = 16; t < B; t *= 4) thresholds.push_back(t);
  }
  thresholds.push_back(B);
  auto counts = count_solutions_table(thresholds, primitive, c.threads);
  os << "B," << (primitive ? "n_prim" : "n") << ","
     << (primitive ? "n_prim/sqrt(B)" : "n/sqrt(B)");
  if (unordered) os << ",unordered";
  os << "\n";
  for (size_t i = 0; i < thresholds.size(); ++i) {
    os << thresholds[i] << "," << counts[i] << ","
       << fmt_double(counts[i] / std::sqrt(static_cast<double>(thresholds[i])));
    if (unordered) os << "," << unordered_count(thresholds[i], primitive, c.threads);
    os << "\n";
  }
  return 0;
}

int cmd_normalized(const Common& c, u64 B, const CoeffTriple& a, bool witnesses, u64 ymax) {
  refuse_if_oversized(B, 1ull << 34, "the normalized scan above 2^34 is impractical");
  std::ofstream file;
  std::ostream& os = open_sink(c, file);
  std::vector<std::pair<std::string, std::string>> cfg = {
      {"b", std::to_string(B)},
      {"coeffs", std::to_string(a.a1) + "," + std::to_string(a.a2) + "," + std::to_string(a.a3)}};
  auto r = count_normalized(B, a, witnesses || ymax > 0);
  json doc;
  doc["meta"] = meta_block(c, "normalized", cfg);
  doc["count"] = r.count;
  if (witnesses) {
    json w = json::array();
    for (auto& s : r.witnesses)
      w.push_back({{"x", {s.x1, s.x2, s.x3}}, {"y", {s.y1, s.y2, s.y3}}});
    doc["witnesses"] = w;
  }
  if (ymax > 0) {
    // partial sums toward the local-density constant
    json tbl = json::array();
    double acc = 0;
    for (u64 y1 = 1; y1 <= ymax; ++y1)
      for (u64 y2 = 1; y2 <= ymax; ++y2)
        for (u64 y3 = 1; y3 <= ymax; ++y3) {
          try {
            auto est = estimate_c_local(y1, y2, y3, a, B);
            if (est.count == 0) continue;
            acc += est.value;
            tbl.push_back({{"y", {y1, y2, y3}}, {"count", est.count}, {"value", est.value}});
          } catch (const std::domain_error&) {
          }
        }
    doc["c_local"] = tbl;
    doc["c_partial_sum"] = acc;
  }
  os << doc.dump(2) << "\n";
  return 0;
}

int cmd_boxes(const Common& c, u64 B, const CoeffTriple& a) {
  refuse_if_oversized(B, 1ull << 34, "the box sweep above 2^34 is impractical");
  std::ofstream file;
  std::ostream& os = open_sink(c, file);
  csv_header(os, c, "boxes",
             {{"b", std::to_string(B)},
              {"coeffs", std::to_string(a.a1) + "," + std::to_string(a.a2) + "," +
                             std::to_string(a.a3)}});
  auto r = count_normalized(B, a, true);
  std::map<std::array<u64, 6>, u64> bins;
  for (auto& s : r.witnesses) {
    auto b = box_of(s);
    bins[{b.X1, b.X2, b.X3, b.Y1, b.Y2, b.Y3}]++;
  }
  double lo_x = std::pow(B, 0.2 - 1.0 / 60), hi_x = std::pow(B, 0.2 + 1.0 / 60);
  double lo_y = std::pow(B, 0.2 - 1.0 / 90), hi_y = std::pow(B, 0.2 + 1.0 / 90);
  os << "X1,X2,X3,Y1,Y2,Y3,n0,bound_yyy,ratio_yyy,bound_xxy,ratio_xxy,critical\n";
  for (auto& [k, n0] : bins) {
    double yyy = static_cast<double>(k[3]) * k[4] * k[5] +
                 std::cbrt(static_cast<double>(k[0]) * k[1] * k[2]);
    double xxy = std::min({static_cast<double>(k[0]) * k[1] * k[5],
                           static_cast<double>(k[0]) * k[2] * k[4],
                           static_cast<double>(k[1]) * k[2] * k[3]}) +
                 std::pow(B, 6.0 / 11);
    bool crit = true;
    for (int i = 0; i < 3; ++i) {
      if (k[i] < lo_x || k[i] > hi_x) crit = false;
      if (k[3 + i] < lo_y || k[3 + i] > hi_y) crit = false;
    }
    os << k[0] << "," << k[1] << "," << k[2] << "," << k[3] << "," << k[4] << "," << k[5] << ","
       << n0 << "," << fmt_double(yyy) << "," << fmt_double(n0 / yyy) << "," << fmt_double(xxy)
       << "," << fmt_double(n0 / xxy) << "," << (crit ? 1 : 0) << "\n";
  }
  os << "# total_boxes = " << bins.size() << "\n# total_solutions = " << r.count << "\n";
  return 0;
}

int cmd_cover(const Common& c, u64 B, const CoeffTriple& a, u64 q, u64 kappa,
              const std::string& box_str, bool verify_solutions) {
  std::ofstream file;
  std::ostream& os = open_sink(c, file);
  json doc;
  doc["meta"] = meta_block(
      c, "cover",
      {{"b", std::to_string(B)},
       {"coeffs",
        std::to_string(a.a1) + "," + std::to_string(a.a2) + "," + std::to_string(a.a3)}});
  if (verify_solutions) {
    refuse_if_oversized(B, 1ull << 24, "coverage verification above 2^24 is impractical");
    auto r = count_normalized(B, a, true);
    u64 checked = 0, covered = 0;
    for (auto& s : r.witnesses) {
      if (s.y3 == 1) continue;
      auto cls = kappa_of(s);
      Point4 p{static_cast<i128>(s.x1), static_cast<i128>(s.x2), static_cast<i128>(s.y1),
               static_cast<i128>(s.y2)};
      auto res = extract_cover(*cls, a, box_of(s), p);
      ++checked;
      if (cover_contains(res, p, cls->q)) ++covered;
    }
    doc["checked"] = checked;
    doc["covered"] = covered;
    doc["all_covered"] = checked == covered;
    os << doc.dump(2) << "\n";
    return checked == covered ? 0 : 1;
  }
  u64 bx[6];
  {
    std::stringstream ss(box_str);
    char comma;
    for (int i = 0; i < 6; ++i) {
      if (!(ss >> bx[i])) {
        std::cerr << "bad --box, expected X1,X2,X3,Y1,Y2,Y3\n";
        return 2;
      }
      if (i < 5) ss >> comma;
    }
  }
  DyadicBox box{bx[0], bx[1], bx[2], bx[3], bx[4], bx[5]};
  if (!box.admissible(B, a)) {
    std::cerr << "box violates the admissibility bound\n";
    return 2;
  }
  CongruenceClass cls{q, kappa};
  auto res = extract_cover(cls, a, box);
  doc["q"] = q;
  doc["kappa"] = kappa;
  doc["lambda_det"] = res.lambda_det.str();
  doc["t0"] = res.t0.str();
  doc["t_count"] = res.t_count;
  doc["s0_items"] = res.s0.size();
  doc["lattices"] = res.lattices.size();
  json ls = json::array();
  size_t cap = std::min<size_t>(res.lattices.size(), 200);
  for (size_t i = 0; i < cap; ++i) {
    auto& cl = res.lattices[i];
    json g = json::array();
    for (int j = 0; j < 2; ++j)
      g.push_back({to_string(cl.gens[j][0]), to_string(cl.gens[j][1]), to_string(cl.gens[j][2]),
                   to_string(cl.gens[j][3])});
    json qc = json::array();
    for (auto& cf : cl.quintic) qc.push_back(to_string(cf));
    ls.push_back({{"gens", g}, {"h", to_string(cl.h)}, {"quintic", qc}});
  }
  doc["lattice_sample"] = ls;
  os << doc.dump(2) << "\n";
  return 0;
}

int cmd_sieve(const Common& c, const std::string& form_str, u64 prime_bound, u64 U, u64 V) {
  std::ofstream file;
  std::ostream& os = open_sink(c, file);
  BinaryForm F;
  {
    std::stringstream ss(form_str);
    char comma;
    i64 v;
    while (ss >> v) {
      F.c.push_back(v);
      ss >> comma;
    }
  }
  if (F.c.size() < 4 || F.c.size() % 2 != 0) {
    std::cerr << "form must have odd degree >= 3 (even coefficient count)\n";
    return 2;
  }
  csv_header(os, c, "sieve",
             {{"form", form_str},
              {"prime_bound", std::to_string(prime_bound)},
              {"U", std::to_string(U)},
              {"V", std::to_string(V)}});
  os << "p,max_ratio,envelope\n";
  int D = F.degree();
  for (auto& row : weil_report(F, prime_bound))
    os << row.p << "," << fmt_double(row.max_ratio) << "," << (D + 1) << "\n";
  if (U > 0 && V > 0) {
    os << "# mu0(" << U << "," << V << ") = " << mu0_count(F, U, V) << "\n";
  }
  return 0;
}

int cmd_cubic(const Common& c, u64 B, const CoeffTriple& abc) {
  refuse_if_oversized(B, 1ull << 16, "the cubic point scan above 2^16 is impractical");
  std::ofstream file;
  std::ostream& os = open_sink(c, file);
  auto r = rho_count(B, abc.a1, abc.a2, abc.a3, B <= 500);
  json doc;
  doc["meta"] = meta_block(
      c, "cubic",
      {{"b", std::to_string(B)},
       {"coeffs",
        std::to_string(abc.a1) + "," + std::to_string(abc.a2) + "," + std::to_string(abc.a3)}});
  doc["count"] = r.count;
  if (!r.points.empty()) {
    json pts = json::array();
    for (auto& p : r.points) pts.push_back({p.x, p.y, p.z});
    doc["points"] = pts;
  }
  i64 M = jacobian_m(abc.a1, abc.a2, abc.a3);
  doc["jacobian_m"] = M;
  auto rb = rank_upper_bound(static_cast<u64>(M < 0 ? -M : M));
  doc["rank_bound"] = {{"M", rb.M},
                       {"omega", rb.omega_M},
                       {"tau3_18M", rb.tau3_18M},
                       {"bound", rb.bound}};
  os << doc.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kVersion) + " - square-full additive triple workbench"};
  app.set_config("--config", "", "flat key = value configuration file");
  app.fallthrough();  // global options may follow the subcommand

  Common common;
  common.threads = default_threads();
  app.add_option("--seed", common.seed, "seed for randomized suites");
  app.add_option("--threads", common.threads, "worker threads for the pair scan");
  app.add_option("--format", common.format, "output format: csv or json")
      ->check(CLI::IsMember({"", "csv", "json"}));
  app.add_option("--out", common.out, "output file (default stdout)");
  app.require_subcommand(1);

  u64 B = 1000;
  std::string coeff_str = "1,1,-1";
  bool primitive = false, unordered = false, table = false, witnesses = false;

  auto* sc_count = app.add_subcommand("count", "count square-full triples u+v=w up to B");
  sc_count->add_option("--b", B, "bound on w");
  sc_count->add_flag("--primitive", primitive, "require gcd(u,v,w)=1");
  sc_count->add_flag("--unordered", unordered, "also report unordered counts");
  sc_count->add_flag("--table", table, "emit a growth table over dyadic bounds");
  sc_count->add_flag("--witnesses", witnesses, "list triples (json format)");

  auto* sc_norm = app.add_subcommand("normalized", "count solutions of the coefficient form");
  u64 ymax = 0;
  sc_norm->add_option("--b", B, "range bound");
  sc_norm->add_option("--coeffs", coeff_str, "a1,a2,a3");
  sc_norm->add_flag("--witnesses", witnesses, "list solutions");
  sc_norm->add_option("--c-table", ymax, "emit local-density terms for y_i <= value");

  auto* sc_boxes = app.add_subcommand("boxes", "dyadic box decomposition of the solutions");
  sc_boxes->add_option("--b", B, "range bound");
  sc_boxes->add_option("--coeffs", coeff_str, "a1,a2,a3");

  auto* sc_cover = app.add_subcommand("cover", "covering lattices for a congruence class");
  u64 q = 5, kappa = 3;
  std::string box_str = "2,16,1,1,1,8";
  bool verify_solutions = false;
  sc_cover->add_option("--b", B, "range bound");
  sc_cover->add_option("--coeffs", coeff_str, "a1,a2,a3");
  sc_cover->add_option("--q", q, "modulus (y3)");
  sc_cover->add_option("--kappa", kappa, "class representative");
  sc_cover->add_option("--box", box_str, "X1,X2,X3,Y1,Y2,Y3");
  sc_cover->add_flag("--verify-solutions", verify_solutions,
                     "check coverage over all solutions with q > 1");

  auto* sc_sieve = app.add_subcommand("sieve", "character-sum and square-value reports");
  std::string form_str = "1,0,0,1";
  u64 prime_bound = 50, U = 0, V = 0;
  sc_sieve->add_option("--form", form_str, "form coefficients, leading first");
  sc_sieve->add_option("--prime-bound", prime_bound, "largest auxiliary prime");
  sc_sieve->add_option("--u", U, "box half-width in x");
  sc_sieve->add_option("--v", V, "box half-width in y");

  auto* sc_cubic = app.add_subcommand("cubic", "coprime points on a diagonal cubic");
  sc_cubic->add_option("--b", B, "height bound");
  sc_cubic->add_option("--coeffs", coeff_str, "a,b,c");

  auto* sc_verify = app.add_subcommand("verify", "run the randomized invariant suites");

  CLI11_PARSE(app, argc, argv);

  CoeffTriple a{};
  if (!parse_coeffs(coeff_str, a)) {
    std::cerr << "bad --coeffs, expected three comma-separated integers\n";
    return 2;
  }

  try {
    if (sc_count->parsed()) return cmd_count(common, B, primitive, unordered, table, witnesses);
    if (sc_norm->parsed()) return cmd_normalized(common, B, a, witnesses, ymax);
    if (sc_boxes->parsed()) return cmd_boxes(common, B, a);
    if (sc_cover->parsed()) return cmd_cover(common, B, a, q, kappa, box_str, verify_solutions);
    if (sc_sieve->parsed()) return cmd_sieve(common, form_str, prime_bound, U, V);
    if (sc_cubic->parsed()) return cmd_cubic(common, B, a);
    if (sc_verify->parsed()) {
      std::ofstream file;
      std::ostream& os = open_sink(common, file);
      return run_verify_suite(common.seed, common.threads, os);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
