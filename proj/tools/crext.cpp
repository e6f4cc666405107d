// crext: analyze polynomially-defined generic submanifolds of C^N.
//   analyze  - Hormander numbers, pluriharmonicity, sector-condition verdicts
//   disc     - attach analytic discs, Hopf scan, optional sweep / F^gamma table
//   compare  - sector vs Boggess-Pitts thresholds, barriers, and cones
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "crx/bishop.hpp"
#include "crx/cones.hpp"
#include "crx/hormander.hpp"
#include "crx/manifold.hpp"
#include "crx/sector.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace crx;

constexpr const char* kToolVersion = "0.1.0";

struct CommonFlags {
  std::string json_path;
  std::string csv_dir;
  double tol = 1e-11;
  int grid = 2048;
  int max_grid = 8192;
  unsigned seed = 0;
};

void add_common(CLI::App* cmd, CommonFlags& c) {
  cmd->add_option("--json", c.json_path, "write the report to this file instead of stdout");
  cmd->add_option("--csv-dir", c.csv_dir, "directory for CSV artifacts");
  cmd->add_option("--tol", c.tol, "Picard iteration tolerance")->capture_default_str();
  cmd->add_option("--grid", c.grid, "circle grid size (power of two >= 64)")
      ->capture_default_str();
  cmd->add_option("--max-grid", c.max_grid, "aliasing-refinement grid cap")
      ->capture_default_str();
  cmd->add_option("--seed", c.seed, "seed for randomized property checks")
      ->capture_default_str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_hex(const std::string& s) {
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

json input_echo(const std::string& path, const std::string& text, const ManifoldModel& m) {
  json j;
  j["path"] = path;
  j["fnv1a64"] = fnv1a_hex(text);
  j["l"] = m.l;
  j["n"] = m.n;
  j["blocks"] = m.weights.block_sizes;
  j["weights"] = m.weights.weights;
  return j;
}

json vec_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

void emit(const json& report, const CommonFlags& c) {
  std::string text = report.dump(2) + "\n";
  if (c.json_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(c.json_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + c.json_path);
    out << text;
  }
}

std::ofstream open_csv(const CommonFlags& c, const std::string& name) {
  std::filesystem::create_directories(c.csv_dir);
  std::filesystem::path p = std::filesystem::path(c.csv_dir) / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + p.string());
  return out;
}

json report_skeleton(const char* analysis, const CommonFlags& c) {
  json r;
  r["tool"] = "crext";
  r["version"] = kToolVersion;
  r["analysis"] = analysis;
  r["options"] = {{"tol", c.tol},   {"grid", c.grid}, {"max_grid", c.max_grid},
                  {"seed", c.seed}, {"csv_dir", c.csv_dir}};
  return r;
}

// deterministic xi samples on the unit sphere of a block's R^{size}
std::vector<Eigen::VectorXd> xi_samples(int size) {
  std::vector<Eigen::VectorXd> out;
  if (size == 1) {
    for (double s : {1.0, -1.0}) {
      Eigen::VectorXd xi(1);
      xi << s;
      out.push_back(xi);
    }
  } else if (size == 2) {
    for (int k = 0; k < 16; ++k) {
      double a = 2.0 * M_PI * k / 16;
      Eigen::VectorXd xi(2);
      xi << std::cos(a), std::sin(a);
      out.push_back(xi);
    }
  } else {
    for (int j = 0; j < size; ++j)
      for (double s : {1.0, -1.0}) {
        Eigen::VectorXd xi = Eigen::VectorXd::Zero(size);
        xi(j) = s;
        out.push_back(xi);
      }
  }
  return out;
}

int run_analyze(const std::string& path, int cap, const CommonFlags& c) {
  std::string text = read_file(path);
  ManifoldModel m = parse_manifold(text);

  json r = report_skeleton("analyze", c);
  r["options"]["cap"] = cap;
  r["input"] = input_echo(path, text, m);

  FiltrationReport fr = filtration(m, cap);
  json jf;
  jf["cap"] = fr.cap;
  jf["rank_tolerance"] = 1e-9;
  jf["dims"] = fr.dims;
  jf["hormander_numbers"] = json::array();
  for (auto [mi, li] : fr.hormander_numbers) jf["hormander_numbers"].push_back({mi, li});
  jf["finite_type"] = fr.finite_type;
  if (!fr.message.empty()) jf["message"] = fr.message;
  r["filtration"] = jf;

  // pluriharmonicity of the leading part of each block on each w-line
  json jp = json::array();
  int nblocks = int(m.weights.block_sizes.size());
  for (int wdir = 0; wdir < m.n; ++wdir) {
    LineRestriction line = restrict_to_line(m, wdir);
    for (int b = 0; b < nblocks; ++b) {
      json entry;
      entry["w_direction"] = wdir;
      entry["block"] = b;
      entry["weight"] = is_infinite(m.weights.weights[b])
                            ? json("infinity")
                            : json(m.weights.weights[b]);
      try {
        std::vector<Poly> lead = lowest_weight_part(line.model, b);
        json comps = json::array();
        for (const auto& g : lead) {
          PluriharmonicResult pr = pluriharmonic_test(g, line);
          comps.push_back(pr.is_pluriharmonic);
        }
        entry["pluriharmonic"] = comps;
        entry["svd_tolerance"] = 1e-9;
      } catch (const ManifoldError& e) {
        entry["status"] = e.what();
      }
      jp.push_back(entry);
    }
  }
  r["pluriharmonicity"] = jp;

  // sector-condition verdicts over a deterministic xi grid per block
  json js = json::array();
  for (int wdir = 0; wdir < m.n; ++wdir)
    for (int b = 0; b < nblocks; ++b) {
      if (is_infinite(m.weights.weights[b])) continue;
      for (const auto& xi : xi_samples(m.weights.block_sizes[b])) {
        json entry;
        entry["w_direction"] = wdir;
        entry["block"] = b;
        entry["xi"] = vec_json(xi);
        try {
          try {
            SectorConditionResult sc = sector_condition_leading(m, b, xi, wdir);
            entry["variant"] = "leading";
            entry["holds"] = sc.holds;
            entry["best_width"] = sc.best_sector.width;
            entry["required_width"] = sc.required_width;
          } catch (const SectorError&) {
            // x-dependent or mixed-direction leading part: constrained check
            SectorConditionResult sc = sector_condition_constrained(m, b, xi, 0.5, wdir);
            entry["variant"] = "constrained";
            entry["constraint_c"] = 0.5;
            entry["holds"] = sc.holds;
            entry["best_width"] = sc.best_sector.width;
            entry["required_width"] = sc.required_width;
          }
        } catch (const ManifoldError& e) {
          // e.g. a block whose restriction to this line vanishes identically
          entry["status"] = e.what();
        }
        js.push_back(entry);
      }
    }
  r["sector"] = js;

  emit(r, c);
  return 0;
}

struct DiscFlags {
  int direction = 0;
  std::vector<double> xi;
  double alpha = -1.0;  // <0: module default (midpoint of (1/m, 1/(m-1)))
  std::vector<double> eta_grid = {0.05, 0.1, 0.15, 0.2};
  int partial_sum = 0;
  int order = 0;  // 0: lowest weight among blocks with nonzero xi
  std::string profile = "linear";
  bool no_sweep = false;
  bool fgamma = false;
  double gamma = 0.7;
};

int run_disc(const std::string& path, DiscFlags& f, const CommonFlags& c) {
  std::string text = read_file(path);
  ManifoldModel m = parse_manifold(text);
  if (f.direction < 0 || f.direction >= m.n)
    throw ManifoldError("direction index out of range");

  Eigen::VectorXd xi = Eigen::VectorXd::Zero(m.l);
  if (f.xi.empty()) {
    xi(0) = 1.0;
  } else {
    if (int(f.xi.size()) != m.l) throw ManifoldError("xi must have l components");
    for (int j = 0; j < m.l; ++j) xi(j) = f.xi[j];
  }

  if (f.order == 0) {
    int best = kInfiniteWeight;
    for (int j = 0; j < m.l; ++j)
      if (xi(j) != 0.0) best = std::min(best, m.weights.weight_of_var(j));
    if (is_infinite(best)) throw ManifoldError("xi pairs only with infinite-weight blocks");
    f.order = best;
  }
  if (f.alpha < 0.0)
    f.alpha = f.order > 1 ? 0.5 * (1.0 / f.order + 1.0 / (f.order - 1)) : 0.75;

  // CR profile: w_1 = eta * profile(theta)
  std::function<Complex(double)> profile;
  if (f.partial_sum > 0) {
    f.profile = "partial-sum";
    std::vector<double> b = binomial_tail_coeffs(f.alpha, f.partial_sum);
    Complex s1 = partial_sum_eval(b, Complex(1.0, 0.0));
    profile = [b, s1](double t) {
      return Complex(0, 1) * (partial_sum_eval(b, std::polar(1.0, t)) - s1);
    };
  } else if (f.profile == "singular") {
    profile = nullptr;  // hopf_scan default i (1 - tau)^alpha
  } else if (f.profile == "linear") {
    profile = [](double t) { return 1.0 - std::polar(1.0, t); };
  } else {
    throw ManifoldError("unknown profile: " + f.profile);
  }

  BishopOptions opts;
  opts.tol = c.tol;
  opts.max_N = c.max_grid;

  json r = report_skeleton("disc", c);
  r["options"]["direction"] = f.direction;
  r["options"]["xi"] = vec_json(xi);
  r["options"]["alpha"] = f.alpha;
  r["options"]["eta_grid"] = f.eta_grid;
  r["options"]["partial_sum"] = f.partial_sum;
  r["options"]["order"] = f.order;
  r["options"]["profile"] = f.profile;
  r["input"] = input_echo(path, text, m);

  HopfScanResult hs =
      hopf_scan(m, xi, f.alpha, f.eta_grid, f.order, opts, profile, f.direction, c.grid);
  json jh;
  jh["etas"] = hs.etas;
  jh["pairings"] = hs.pairings;
  jh["eta_exponent"] = f.order;
  jh["eta_coefficient"] = hs.eta_coefficient;
  jh["fit_residual"] = hs.fit_residual;
  jh["fit_residual_tolerance"] = 0.2;
  jh["sign_ok"] = hs.sign_ok;
  jh["v_prime"] = vec_json(hs.direction);
  jh["feedback_c"] = hs.feedback_c;
  r["hopf"] = jh;

  // re-solve at the largest eta for the CSV artifact and the sweep
  double eta = f.eta_grid.back();
  CircleGrid g(c.grid);
  std::vector<BoundaryFn> w;
  for (int j = 0; j < m.n; ++j) {
    if (j == f.direction) {
      if (profile)
        w.push_back(BoundaryFn::from_sampler(
            g, [profile, eta](double t) { return eta * profile(t); }));
      else
        w.push_back(cr_component_singular(f.alpha, eta, g));
    } else {
      w.push_back(BoundaryFn::constant(g, Complex(0)));
    }
  }
  DiscSolution d = solve_bishop(m, std::move(w), Eigen::VectorXd::Zero(m.l), opts);
  json jd;
  jd["eta"] = eta;
  jd["iterations"] = d.iterations;
  jd["residual"] = d.residual;
  jd["grid"] = d.grid().N;
  r["disc"] = jd;
  if (!c.csv_dir.empty()) {
    auto out = open_csv(c, "disc_boundary.csv");
    write_disc_csv(out, m, d, opts);
    r["disc"]["csv"] = "disc_boundary.csv";
  }

  if (!f.no_sweep) {
    json js;
    try {
      SweepResult sw = sweep_attached_family(m, d, 1e-3, 1e-2, opts);
      js["tangent_rank"] = sw.tangent_rank;
      js["expected_rank"] = 2 * m.n + m.l + 1;  // dim M + 1
      js["gained_direction"] = vec_json(sw.gained_direction);
      js["angular_error"] = sw.angular_error;
      js["rank_tolerance"] = 1e-6;
    } catch (const BishopError& e) {
      std::string msg = e.what();
      if (msg.find("no transversal gain") == std::string::npos) throw;
      js["note"] = "no transversal gain";
    }
    r["sweep"] = js;
  }

  if (f.fgamma) {
    json jt = json::array();
    for (const auto& e : fgamma_report(f.alpha, f.gamma, {8, 16, 32, 64, 128}, g)) {
      jt.push_back({{"N", e.N},
                    {"sup_error", e.sup_error},
                    {"fgamma_error", e.fgamma_error},
                    {"c5_bound_ok", e.c5_bound_ok},
                    {"sn_at_one", e.sn_at_one}});
    }
    r["fgamma"] = {{"alpha", f.alpha}, {"gamma", f.gamma}, {"table", jt}};
  }

  emit(r, c);
  return 0;
}

int run_compare(int k, int p, std::vector<double> a_range, const CommonFlags& c) {
  Thresholds t = thresholds(k, p);  // validates (k, p), throws SectorError on bad input
  if (a_range.empty()) a_range = {1.0, std::sqrt(2.0), 1.8, 2.0, 3.0};

  json r = report_skeleton("compare", c);
  r["options"]["k"] = k;
  r["options"]["p"] = p;
  r["options"]["a_range"] = a_range;
  r["thresholds"] = {{"bp_coef", t.bp_coef}, {"sector_coef", t.sector_coef}, {"q", t.q}};

  json notes = json::array();
  if (k == 6 && p == 4)
    notes.push_back(
        "for (k,p)=(6,4) the coefficient formulas give a2/a1 = 3; the ratio "
        "3/sqrt(3) quoted in some discussions of this case appears to be a typo");
  r["notes"] = notes;

  json table = json::array();
  for (double a : a_range) {
    json row;
    row["a"] = a;
    row["bp_extends"] = a > t.bp_coef;
    row["sector_extends"] = a > t.sector_coef;
    if (k % p == 0 && a <= t.sector_coef + 1e-12) {
      Barrier b = barrier_construct(k, p, a);
      row["barrier"] = {{"b", b.b}, {"min_value", b.min_value}, {"tolerance", 1e-10}};
    } else {
      row["barrier"] = nullptr;
    }
    if (a > 0) {
      HalfspaceCones hc = halfspace_cones(k, p, a);
      row["cones"] = {{"a1", hc.a1},
                      {"a2", hc.a2},
                      {"bp", cone_to_json(hc.bp)},
                      {"sector", cone_to_json(hc.sector)},
                      {"bp_in_sector", cone_contains(hc.sector, hc.bp)},
                      {"bp_opens_below_axis", opens_below_axis(hc.bp)},
                      {"sector_opens_below_axis", opens_below_axis(hc.sector)}};
    } else {
      row["cones"] = nullptr;
    }
    table.push_back(row);
  }
  r["table"] = table;

  if (!c.csv_dir.empty()) {
    // g(theta) = 1 + a cos(p theta) per a, gnuplot-ready
    auto out = open_csv(c, "compare_g_curves.csv");
    out << "# g(theta) = 1 + a cos(" << p << " theta), k=" << k << "\n";
    out << "theta";
    for (double a : a_range) out << ",a=" << a;
    out << "\n";
    out.precision(17);
    const int S = 512;
    for (int i = 0; i <= S; ++i) {
      double th = -M_PI + 2.0 * M_PI * i / S;
      out << th;
      for (double a : a_range) out << "," << 1.0 + a * std::cos(p * th);
      out << "\n";
    }
    r["csv"] = "compare_g_curves.csv";
    emit(r, c);
    return 0;
  }
  emit(r, c);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CR-extension analyses for polynomial generic submanifolds"};
  app.require_subcommand(1);

  CommonFlags c;
  std::string spec_path;
  int cap = 6;
  DiscFlags df;
  int k = 4, p = 2;
  std::vector<double> a_range;

  CLI::App* analyze = app.add_subcommand("analyze", "filtration, pluriharmonicity, sector");
  analyze->add_option("spec", spec_path, "manifold spec file")->required();
  analyze->add_option("--cap", cap, "bracket-length cap for the filtration")
      ->capture_default_str();
  add_common(analyze, c);

  CLI::App* disc = app.add_subcommand("disc", "attach discs and run the Hopf scan");
  disc->add_option("spec", spec_path, "manifold spec file")->required();
  disc->add_option("--direction", df.direction, "CR component index")->capture_default_str();
  disc->add_option("--xi", df.xi, "pairing covector (l components)");
  disc->add_option("--alpha", df.alpha, "singular-profile exponent in (0,1)");
  disc->add_option("--eta-grid", df.eta_grid, "disc size ladder")->capture_default_str();
  disc->add_option("--partial-sum", df.partial_sum, "use the N-term partial-sum profile");
  disc->add_option("--order", df.order, "eta-fit exponent (default: block weight)");
  disc->add_option("--profile", df.profile, "linear | singular | partial-sum")
      ->capture_default_str();
  disc->add_flag("--no-sweep", df.no_sweep, "skip the attached-family sweep");
  disc->add_flag("--fgamma", df.fgamma, "include the F^gamma convergence table");
  disc->add_option("--gamma", df.gamma, "Holder exponent for --fgamma")->capture_default_str();
  add_common(disc, c);

  CLI::App* compare = app.add_subcommand("compare", "thresholds, barriers, and cones");
  compare->add_option("--k", k, "model degree (even, >= 4)")->capture_default_str();
  compare->add_option("--p", p, "perturbation frequency (even)")->capture_default_str();
  compare->add_option("--a-range", a_range, "amplitudes to tabulate");
  add_common(compare, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cout << json{{"error", e.what()}}.dump() << "\n";
    return 2;
  }

  try {
    if (analyze->parsed()) return run_analyze(spec_path, cap, c);
    if (disc->parsed()) {
      if (df.alpha >= 0.0 && df.partial_sum == 0 && df.profile == "linear")
        df.profile = "singular";
      return run_disc(spec_path, df, c);
    }
    return run_compare(k, p, a_range, c);
  } catch (const BishopError& e) {
    std::cout << json{{"error", e.what()}, {"kind", "non-convergence"}}.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cout << json{{"error", e.what()}, {"kind", "input"}}.dump() << "\n";
    return 2;
  }
}
