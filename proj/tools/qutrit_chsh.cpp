#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qchsh/analytic.hpp"
#include "qchsh/correlation.hpp"
#include "qchsh/experiments.hpp"
#include "qchsh/optimizer.hpp"
#include "qchsh/qstate.hpp"
#include "qchsh/report.hpp"

using namespace qchsh;
using nlohmann::ordered_json;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kBadState = 3,
  kBadOutput = 4,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { Csv, Json, Plain };

struct Common {
  std::string output;
  std::string format = "plain";
};

struct StateArgs {
  std::string raw;
  std::optional<double> a1;
  std::optional<double> epsilon;
};

struct OptimizerArgs {
  int restarts = OptimizerConfig{}.restarts;
  int max_iterations = OptimizerConfig{}.max_iterations;
  double tolerance = OptimizerConfig{}.gradient_tolerance;
  std::uint64_t seed = OptimizerConfig{}.step_seed;

  OptimizerConfig config() const {
    OptimizerConfig c;
    c.restarts = restarts;
    c.max_iterations = max_iterations;
    c.gradient_tolerance = tolerance;
    c.step_seed = seed;
    c.validate();
    return c;
  }
};

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  return Format::Plain;
}

void add_common(CLI::App* sub, Common& c, const std::string& default_format) {
  c.format = default_format;
  sub->add_option("-o,--output", c.output, "Write to this file instead of stdout");
  sub->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"csv", "json", "plain"}))
      ->capture_default_str();
}

void add_state(CLI::App* sub, StateArgs& s) {
  auto* raw = sub->add_option("--state", s.raw, "Coefficients a1,a2,a3 with a1^2+a2^2+a3^2 = 3");
  auto* a1 = sub->add_option("--a1", s.a1, "a1 in [-sqrt3, sqrt3]; a2, a3 follow from --epsilon");
  auto* eps = sub->add_option("--epsilon", s.epsilon, "Share of 3 - a1^2 carried by a2^2")
                  ->check(CLI::Range(0.0, 1.0));
  raw->excludes(a1)->excludes(eps);
  a1->needs(eps);
  eps->needs(a1);
}

void add_optimizer(CLI::App* sub, OptimizerArgs& o) {
  sub->add_option("--restarts", o.restarts, "Random restarts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--max-iterations", o.max_iterations, "Iteration cap per restart")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--tolerance", o.tolerance, "Gradient-norm stopping tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--seed", o.seed, "Seed for restart starting points")->capture_default_str();
}

double parse_real(const std::string& token) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != token.size()) throw UsageError("--state: '" + token + "' is not a number");
  return v;
}

PureState resolve_state(const StateArgs& s) {
  if (!s.raw.empty()) {
    std::vector<double> a;
    std::stringstream in(s.raw);
    std::string token;
    while (std::getline(in, token, ',')) a.push_back(parse_real(token));
    if (a.size() != 3 || s.raw.back() == ',') {
      throw UsageError("--state expects three comma-separated numbers, got '" + s.raw + "'");
    }
    try {
      return PureState(a[0], a[1], a[2]);
    } catch (const std::invalid_argument& e) {
      throw StateError(e.what());
    }
  }
  if (s.a1 && s.epsilon) {
    try {
      return PureState::from_a1_epsilon(*s.a1, *s.epsilon);
    } catch (const std::invalid_argument& e) {
      throw StateError(e.what());
    }
  }
  throw UsageError("a state is required: pass --state a1,a2,a3 or --a1 X --epsilon E");
}

// Scalar reports: one key per line. Arrays expand to key.1, key.2, ...
void flatten(const ordered_json& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i + 1), out);
  } else if (j.is_null()) {
    out.emplace_back(prefix, "");
  } else if (j.is_boolean()) {
    out.emplace_back(prefix, j.get<bool>() ? "true" : "false");
  } else if (j.is_number_float()) {
    out.emplace_back(prefix, format_number(j.get<double>()));
  } else if (j.is_number()) {
    out.emplace_back(prefix, j.dump());
  } else {
    out.emplace_back(prefix, j.get<std::string>());
  }
}

std::string render_record(const ordered_json& j, Format f) {
  if (f == Format::Json) return j.dump(2) + "\n";
  std::vector<std::pair<std::string, std::string>> kv;
  flatten(j, "", kv);
  std::ostringstream o;
  if (f == Format::Csv) {
    o << "field,value\n";
    for (const auto& [k, v] : kv) o << k << ',' << v << '\n';
  } else {
    for (const auto& [k, v] : kv) o << k << '=' << v << '\n';
  }
  return o.str();
}

std::string fixed5(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5f", x);
  return buf;
}

// The file is opened before any work so a bad path fails fast.
class Sink {
 public:
  explicit Sink(const std::string& path) : path_(path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw OutputError("cannot open output file '" + path + "' for writing");
    }
  }
  void write(const std::string& text) {
    std::ostream& out = path_.empty() ? std::cout : static_cast<std::ostream&>(file_);
    out << text;
    out.flush();
    if (!out) throw OutputError("failed writing to '" + (path_.empty() ? "stdout" : path_) + "'");
  }

 private:
  std::string path_;
  std::ofstream file_;
};

ordered_json state_json(const PureState& s) {
  return ordered_json::array({rounded(s.a1()), rounded(s.a2()), rounded(s.a3())});
}

// ---------------------------------------------------------------------------

int run_smax(const StateArgs& sa, const Common& c) {
  const PureState state = resolve_state(sa);
  Sink sink(c.output);
  const ViolationReport r = s_max_analytic(state);
  const Format f = parse_format(c.format);
  if (f == Format::Plain) {
    std::string head = "S_max=" + fixed5(r.s_max) + " branch=" + std::string(to_string(r.branch));
    head += r.f_thr ? " F_thr=" + fixed5(*r.f_thr) : " F_thr=none";
    sink.write(head + "\n" + render_record(report_json(r), f));
  } else {
    ordered_json j{{"state", state_json(state)}};
    j.update(report_json(r));
    sink.write(render_record(j, f));
  }
  return kOk;
}

int run_smin(const StateArgs& sa, const Common& c) {
  const PureState state = resolve_state(sa);
  Sink sink(c.output);
  const double v = s_min_analytic(state);
  const Format f = parse_format(c.format);
  const ordered_json j{{"state", state_json(state)}, {"s_min", rounded(v)}};
  sink.write(f == Format::Plain ? "S_min=" + fixed5(v) + "\n" + render_record(j, f) : render_record(j, f));
  return kOk;
}

int run_optimize(const StateArgs& sa, const OptimizerArgs& oa, const std::string& direction,
                 const Common& c) {
  const PureState state = resolve_state(sa);
  const OptimizerConfig cfg = oa.config();
  Sink sink(c.output);
  const bool maximize = direction == "max";
  const OptimizationResult r = maximize ? maximize_s(state, cfg) : minimize_s(state, cfg);
  const double analytic = maximize ? s_max_analytic(state).s_max : s_min_analytic(state);
  ordered_json j{{"state", state_json(state)}, {"direction", direction}, {"seed", oa.seed}};
  j.update(optimization_json(r));
  j["analytic"] = rounded(analytic);
  sink.write(render_record(j, parse_format(c.format)));
  return kOk;
}

int run_lhv(const Common& c) {
  Sink sink(c.output);
  const LhvExtrema e = lhv_extrema();
  const Format f = parse_format(c.format);
  if (f == Format::Plain) {
    sink.write("max=" + format_number(e.max_s) + " min=" + format_number(e.min_s) + "\n");
  } else {
    const ordered_json j{{"strategies", lhv_strategies().size()},
                         {"max", rounded(e.max_s)},
                         {"min", rounded(e.min_s)}};
    sink.write(render_record(j, f));
  }
  return kOk;
}

int run_sweep(const SweepSpec& spec, const OptimizerArgs& oa, const Common& c) {
  spec.validate();
  const OptimizerConfig cfg = oa.config();
  Sink sink(c.output);
  const auto rows = sweep_fig1(spec, cfg);
  if (parse_format(c.format) == Format::Json) {
    sink.write(sweep_json(rows).dump(2) + "\n");
  } else {
    std::ostringstream o;
    write_sweep_csv(o, rows);
    sink.write(o.str());
  }
  return kOk;
}

int run_region(int a1_steps, int eps_steps, bool boundary, int scan_points, const Common& c) {
  Sink sink(c.output);
  const bool json = parse_format(c.format) == Format::Json;
  std::ostringstream o;
  if (boundary) {
    const auto pts = violation_boundary(eps_steps, scan_points);
    if (json) {
      o << boundary_json(pts).dump(2) << '\n';
    } else {
      write_boundary_csv(o, pts);
    }
  } else {
    const auto cells = violation_region(a1_steps, eps_steps);
    if (json) {
      o << region_json(cells).dump(2) << '\n';
    } else {
      write_region_csv(o, cells);
    }
  }
  sink.write(o.str());
  return kOk;
}

int run_section4(const OptimizerArgs& oa, const Common& c) {
  const OptimizerConfig cfg = oa.config();
  Sink sink(c.output);
  const Section4Comparison s = section4_comparison(cfg);
  const Format f = parse_format(c.format);
  std::string text = render_record(section4_json(s), f);
  if (f == Format::Plain) {
    text = "tritter S_max=" + fixed5(s.tritter_s_max) + " x-basis S_max=" + fixed5(s.custom_basis_s_max) +
           "\n" + text;
  }
  sink.write(text);
  return kOk;
}

// ---------------------------------------------------------------------------

struct Check {
  std::string name;
  std::function<std::string()> run;  // empty string on success
};

std::string expect_near(const char* what, double got, double want, double tol) {
  if (std::abs(got - want) <= tol) return {};
  return std::string(what) + ": got " + format_number(got) + ", expected " + format_number(want) +
         " +/- " + format_number(tol);
}

int run_selftest(const Common& c) {
  Sink sink(c.output);
  const std::vector<Check> checks = {
      {"tritter unitarity and basis completeness",
       [] {
         std::mt19937_64 rng(101);
         std::uniform_real_distribution<double> u(0.0, kTwoPi);
         double worst = 0.0;
         for (int t = 0; t < 500; ++t) {
           const PhaseTriple p{{u(rng), u(rng), u(rng)}};
           const MeasurementBasis b = tritter_basis(p);
           worst = std::max({worst, build_tritter(p).unitarity_defect(), b.completeness_defect()});
         }
         return expect_near("defect", worst, 0.0, kAlgebraTol);
       }},
      {"joint distribution normalization",
       [] {
         std::mt19937_64 rng(102);
         std::uniform_real_distribution<double> u(0.0, kTwoPi);
         std::normal_distribution<double> g;
         double worst = 0.0;
         for (int t = 0; t < 500; ++t) {
           const PureState s = PureState::normalized_from(g(rng), g(rng), g(rng));
           const auto p = joint_distribution(s, tritter_basis(PhaseTriple{{u(rng), u(rng), u(rng)}}),
                                             tritter_basis(PhaseTriple{{u(rng), u(rng), u(rng)}}));
           double sum = 0.0;
           for (const auto& row : p)
             for (double x : row) sum += x;
           worst = std::max(worst, std::abs(sum - 1.0));
         }
         return expect_near("|sum P - 1|", worst, 0.0, kPipelineTol);
       }},
      {"S from probabilities equals the T-decomposition, Q equals its closed form",
       [] {
         std::mt19937_64 rng(103);
         std::uniform_real_distribution<double> u(-kTwoPi, kTwoPi);
         std::normal_distribution<double> g;
         double worst_s = 0.0, worst_q = 0.0;
         for (int t = 0; t < 500; ++t) {
           const PureState s = PureState::normalized_from(g(rng), g(rng), g(rng));
           Angles x{};
           for (double& v : x) v = u(rng);
           const SettingsConfig cfg = SettingsConfig::from_array(x);
           worst_s = std::max(worst_s, std::abs(s_value(s, cfg) - s_via_t(s, cfg)));
           worst_q = std::max(worst_q, std::abs(correlation_q(s, cfg.a1, cfg.b2) -
                                                correlation_q_closed_form(s, cfg.a1, cfg.b2)));
         }
         const std::string a = expect_near("S deviation", worst_s, 0.0, 1e-10);
         return a.empty() ? expect_near("Q deviation", worst_q, 0.0, 1e-10) : a;
       }},
      {"closed-form reference values",
       [] {
         const ViolationReport r = s_max_analytic(PureState(1, 1, 1));
         std::string e = expect_near("S_max(1,1,1)", r.s_max, 2.0 / 9.0 * (6.0 + 4.0 * std::sqrt(3.0)), 1e-12);
         if (e.empty()) e = expect_near("F_thr(1,1,1)", r.f_thr.value_or(0.0), 0.30385, 5e-6);
         if (e.empty()) e = expect_near("optimum", global_optimum().value, 2.91485, 5e-6);
         if (e.empty()) e = expect_near("S_min(1,1,1)", r.s_min, -4.0, 1e-12);
         return e;
       }},
      {"optimizer reaches the closed form",
       [] {
         OptimizerConfig cfg;
         cfg.restarts = 16;
         const PureState s(1, 1, 1);
         const std::string e = expect_near("max", maximize_s(s, cfg).best_s, s_max_analytic(s).s_max, 1e-4);
         return e.empty() ? expect_near("min", minimize_s(s, cfg).best_s, -4.0, 1e-4) : e;
       }},
      {"local deterministic strategies give max 2, min -4",
       [] {
         const LhvExtrema e = lhv_extrema();
         if (lhv_strategies().size() != 81) return std::string("expected 81 strategies");
         if (e.max_s != 2.0 || e.min_s != -4.0) {
           return "got max=" + format_number(e.max_s) + " min=" + format_number(e.min_s);
         }
         return std::string();
       }},
      {"x-basis comparison state",
       [] {
         const Section4Comparison s = section4_comparison();
         std::string e = expect_near("tritter S_max", s.tritter_s_max, 1.964, 5e-4);
         if (e.empty()) e = expect_near("x-basis S_max", s.custom_basis_s_max, 2.0132, 5e-4);
         if (e.empty() && !(s.custom_basis_s_max > 2.0 && 2.0 > s.tritter_s_max)) e = "ordering violated";
         return e;
       }},
  };

  std::ostringstream o;
  int failed = 0;
  for (const Check& ch : checks) {
    std::string why;
    try {
      why = ch.run();
    } catch (const std::exception& ex) {
      why = std::string("exception: ") + ex.what();
    }
    if (why.empty()) {
      o << "PASS " << ch.name << '\n';
    } else {
      ++failed;
      o << "FAIL " << ch.name << ": " << why << '\n';
    }
  }
  o << (failed == 0 ? "selftest passed" : "selftest FAILED (" + std::to_string(failed) + ")") << '\n';
  sink.write(o.str());
  return failed == 0 ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-qutrit CHSH-type inequality: closed forms, numerical optimization and sweeps"};
  app.require_subcommand(1);

  Common common;
  StateArgs state;
  OptimizerArgs opt;
  SweepSpec sweep;
  std::string mode = "analytic";
  std::string direction = "max";
  int region_a1 = 200, region_eps = 100, scan_points = 2001;
  bool boundary = false;

  auto* smax = app.add_subcommand("smax", "Closed-form maximum of S for a state");
  add_state(smax, state);
  add_common(smax, common, "plain");

  auto* smin = app.add_subcommand("smin", "Closed-form minimum of S for a state");
  add_state(smin, state);
  add_common(smin, common, "plain");

  auto* optimize = app.add_subcommand("optimize", "Multi-start numerical optimization of S");
  add_state(optimize, state);
  add_optimizer(optimize, opt);
  optimize->add_option("--direction", direction, "max or min")
      ->check(CLI::IsMember({"max", "min"}))
      ->capture_default_str();
  add_common(optimize, common, "plain");

  auto* lhv = app.add_subcommand("lhv", "Extremes of S over local deterministic strategies");
  add_common(lhv, common, "plain");

  auto* fig1 = app.add_subcommand("sweep-fig1", "S_max and S_min along a1 at fixed epsilon");
  fig1->add_option("--a1-min", sweep.a1_min, "Lower end of the a1 grid");
  fig1->add_option("--a1-max", sweep.a1_max, "Upper end of the a1 grid");
  fig1->add_option("--steps", sweep.a1_steps, "Grid points")->check(CLI::PositiveNumber)->capture_default_str();
  fig1->add_option("--epsilon", sweep.epsilon, "Fixed epsilon")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  fig1->add_option("--mode", mode, "Which columns to compute")
      ->check(CLI::IsMember({"analytic", "numeric", "both"}))
      ->capture_default_str();
  add_optimizer(fig1, opt);
  add_common(fig1, common, "csv");

  auto* fig2 = app.add_subcommand("region-fig2", "Violation region in the (a1, epsilon) plane");
  fig2->add_option("--a1-steps", region_a1, "Grid points in a1")->check(CLI::Range(2, 1 << 20))->capture_default_str();
  fig2->add_option("--eps-steps", region_eps, "Grid points in epsilon")->check(CLI::Range(2, 1 << 20))->capture_default_str();
  fig2->add_flag("--boundary", boundary, "Emit the S_max = 2 boundary instead of the grid");
  fig2->add_option("--scan-points", scan_points, "a1 scan resolution before bisection")
      ->check(CLI::Range(2, 1 << 24))
      ->capture_default_str();
  add_common(fig2, common, "csv");

  auto* section4 = app.add_subcommand("section4", "Tritter versus x-basis input for a1 = 1.56, epsilon = 0.5");
  add_optimizer(section4, opt);
  add_common(section4, common, "plain");

  auto* selftest = app.add_subcommand("selftest", "Cross-check all modules against independent references");
  add_common(selftest, common, "plain");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: malformed arguments: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*smax) return run_smax(state, common);
    if (*smin) return run_smin(state, common);
    if (*optimize) return run_optimize(state, opt, direction, common);
    if (*lhv) return run_lhv(common);
    if (*fig1) {
      sweep.mode = mode == "numeric" ? SweepMode::Numeric : mode == "both" ? SweepMode::Both : SweepMode::Analytic;
      return run_sweep(sweep, opt, common);
    }
    if (*fig2) return run_region(region_a1, region_eps, boundary, scan_points, common);
    if (*section4) return run_section4(opt, common);
    if (*selftest) return run_selftest(common);
  } catch (const UsageError& e) {
    std::cerr << "error: malformed arguments: " << e.what() << "\n";
    return kUsage;
  } catch (const StateError& e) {
    std::cerr << "error: invalid state coefficients: " << e.what() << "\n";
    return kBadState;
  } catch (const OutputError& e) {
    std::cerr << "error: unwritable output: " << e.what() << "\n";
    return kBadOutput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: malformed arguments: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
