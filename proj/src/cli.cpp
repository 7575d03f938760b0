#include "qit/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <variant>

#include "qit/errors.hpp"
#include "qit/format.hpp"
#include "qit/laws.hpp"
#include "qit/markov.hpp"
#include "qit/maxent.hpp"
#include "qit/measures.hpp"
#include "qit/prob.hpp"
#include "qit/smb.hpp"

namespace qit::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";
constexpr double kSlackTolerance = 1e-9;

// Bad input file or literal. Maps to exit 2 like ArgumentError.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Options shared by every subcommand plus the per-subcommand ones; unused
// fields keep their defaults.
struct RunConfig {
  std::string subcommand;
  std::string dist;
  std::string ref;
  std::string chain;
  std::string kind = "q";
  double q = std::nan("");
  std::string q_range;
  std::string law = "all";
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::size_t steps = 50;
  std::size_t n = 0;
  std::size_t k = 1;
  std::size_t trajectories = 100;
  std::string levels;
  double mean = std::nan("");
  double tol = 1e-10;
  std::size_t max_iters = 200;
  std::size_t verify_trials = 1000;
  std::size_t sweep = 0;
  std::string sweep_out;
  std::string format;
  std::string out;
  bool deterministic = false;
};

Json num(double x) {
  if (std::isfinite(x)) return Json(x == 0.0 ? 0.0 : x);
  return Json(format_sig10(x));
}

Json num_array(std::span<const double> xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json meta(const RunConfig& cfg) {
  Json m;
  m["tool"] = "qit";
  m["version"] = kVersion;
  m["subcommand"] = cfg.subcommand;
  if (!cfg.deterministic) m["timestamp"] = timestamp_utc();
  return m;
}

// ---- input parsing ----

bool looks_inline(const std::string& s) {
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{' || c == '[';
  }
  return false;
}

Json load_json(const std::string& arg, const char* what) {
  std::string text;
  std::string source;
  if (looks_inline(arg)) {
    text = arg;
    source = std::string(what) + " (inline)";
  } else {
    std::ifstream in(arg, std::ios::binary);
    if (!in) throw InputError(std::string(what) + ": cannot open '" + arg + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    source = std::string(what) + " '" + arg + "'";
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(source + ": malformed JSON: " + e.what());
  }
}

std::vector<double> number_array(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of numbers");
  std::vector<double> xs;
  xs.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw InputError(where + ": expected an array of numbers");
    xs.push_back(v.get<double>());
  }
  return xs;
}

// Flattens a rectangular nested array, recording its shape.
void flatten(const Json& j, std::size_t depth, std::vector<std::size_t>& shape,
             std::vector<double>& data) {
  if (j.is_number()) {
    if (depth != shape.size()) throw InputError("table: ragged nesting");
    data.push_back(j.get<double>());
    return;
  }
  if (!j.is_array() || j.empty()) throw InputError("table: expected nested non-empty arrays of numbers");
  if (depth == shape.size()) {
    if (!data.empty()) throw InputError("table: ragged nesting");
    shape.push_back(j.size());
  } else if (depth > shape.size() || shape[depth] != j.size()) {
    throw InputError("table: rows must all have the same length");
  }
  for (const auto& v : j) flatten(v, depth + 1, shape, data);
}

using Dist = std::variant<ProbVec, JointTable>;

Dist parse_dist(const Json& j) {
  if (!j.is_object()) throw InputError("distribution: expected a JSON object");
  if (j.contains("p")) {
    std::vector<std::string> labels;
    if (j.contains("labels")) {
      for (const auto& l : j.at("labels")) {
        if (!l.is_string()) throw InputError("distribution: labels must be strings");
        labels.push_back(l.get<std::string>());
      }
    }
    return ProbVec(number_array(j.at("p"), "distribution \"p\""), std::move(labels));
  }
  if (j.contains("table")) {
    std::vector<std::size_t> shape;
    std::vector<double> data;
    flatten(j.at("table"), 0, shape, data);
    return JointTable(std::move(shape), std::move(data));
  }
  throw InputError("distribution: expected a \"p\" or \"table\" key");
}

MarkovChain parse_chain(const Json& j) {
  if (!j.is_object() || !j.contains("transition")) {
    throw InputError("chain: expected an object with a \"transition\" matrix");
  }
  const Json& t = j.at("transition");
  if (!t.is_array() || t.empty()) throw InputError("chain: \"transition\" must be a non-empty matrix");
  std::vector<std::vector<double>> rows;
  for (const auto& row : t) rows.push_back(number_array(row, "chain \"transition\" row"));
  ProbVec initial = j.contains("initial") ? ProbVec(number_array(j.at("initial"), "chain \"initial\""))
                                          : ProbVec::uniform(rows.size());
  return MarkovChain(std::move(rows), std::move(initial));
}

double parse_real(const std::string& s, const std::string& what) {
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(x)) {
    throw ArgumentError(what + ": not a finite number: '" + s + "'");
  }
  return x;
}

std::pair<double, double> parse_q_range(const std::string& s) {
  const auto colon = s.find(':', 1);
  if (colon == std::string::npos) throw ArgumentError("--q-range: expected a:b, got '" + s + "'");
  const double a = parse_real(s.substr(0, colon), "--q-range");
  const double b = parse_real(s.substr(colon + 1), "--q-range");
  if (a > b) throw ArgumentError("--q-range: lower end exceeds upper end");
  return {a, b};
}

std::vector<double> parse_levels(const std::string& s) {
  std::vector<double> levels;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    levels.push_back(parse_real(s.substr(start, comma - start), "--levels"));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return levels;
}

QParam require_q(const RunConfig& cfg) {
  if (std::isnan(cfg.q)) throw ArgumentError("--q is required");
  return QParam(cfg.q);
}

// ---- output ----

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("--out: cannot write '" + cfg.out + "'");
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json chain_json(const MarkovChain& c) {
  Json t = Json::array();
  for (const auto& row : c.rows()) t.push_back(num_array(row));
  Json j;
  j["transition"] = t;
  j["initial"] = num_array(c.initial().values());
  return j;
}

// ---- subcommands ----

int cmd_entropy(const RunConfig& cfg, std::ostream& out) {
  const QParam q = require_q(cfg);
  const Dist d = parse_dist(load_json(cfg.dist, "--dist"));
  double h = 0.0;
  if (const auto* p = std::get_if<ProbVec>(&d)) {
    h = cfg.kind == "tsallis" ? tsallis_entropy(*p, q).value : q_entropy(*p, q).value;
  } else {
    const auto& t = std::get<JointTable>(d);
    h = cfg.kind == "tsallis" ? tsallis_entropy(ProbVec(t.data()), q).value : q_entropy_joint(t, q).value;
  }
  const char* name = cfg.kind == "tsallis" ? "S_q" : "H_q";
  if (cfg.format == "json") {
    Json j;
    j["meta"] = meta(cfg);
    j["q"] = q.value();
    j[name] = num(h);
    emit(cfg, dump(j), out);
  } else if (cfg.format == "csv") {
    emit(cfg, std::string("q,") + name + "\n" + format_sig10(q.value()) + "," + format_sig10(h) + "\n", out);
  } else {
    emit(cfg, format_sig10(h) + "\n", out);
  }
  return kExitOk;
}

int cmd_measures(const RunConfig& cfg, std::ostream& out) {
  const QParam q = require_q(cfg);
  const Dist d = parse_dist(load_json(cfg.dist, "--dist"));
  std::optional<Dist> ref;
  if (!cfg.ref.empty()) ref = parse_dist(load_json(cfg.ref, "--ref"));

  std::vector<std::pair<std::string, double>> values;
  std::vector<double> flat_p;
  if (const auto* p = std::get_if<ProbVec>(&d)) {
    flat_p = p->vector();
    values.emplace_back("H_q", q_entropy(*p, q).value);
    values.emplace_back("S_q", tsallis_entropy(*p, q).value);
    if (q.value() <= 2.0) values.emplace_back("H_q_max", q_entropy_max(p->size(), q));
  } else {
    const auto& t = std::get<JointTable>(d);
    flat_p = t.data();
    const char* axis_names[] = {"X", "Y", "Z"};
    auto axis = [&](std::size_t a) { return a < 3 ? std::string(axis_names[a]) : "X" + std::to_string(a + 1); };
    std::string all;
    for (std::size_t a = 0; a < t.rank(); ++a) all += (a ? "," : "") + axis(a);
    values.emplace_back("H_q(" + all + ")", q_entropy_joint(t, q).value);
    for (std::size_t a = 0; a < t.rank(); ++a) {
      values.emplace_back("H_q(" + axis(a) + ")", q_entropy(t.marginal(a), q).value);
    }
    if (t.rank() == 2) {
      values.emplace_back("H_q(Y|X)", q_entropy_conditional(t, 0, q).value);
      values.emplace_back("H_q(X|Y)", q_entropy_conditional(t, 1, q).value);
      values.emplace_back("I_q(X;Y)", mutual_q_information(t, q).value);
    } else if (t.rank() == 3) {
      const std::size_t xy[] = {0, 1};
      const std::size_t z[] = {2};
      values.emplace_back("H_q(X,Y|Z)", conditional_q_entropy(t, xy, z, q));
      values.emplace_back("I_q(X;Y|Z)", conditional_mutual_q_information(t, q).value);
    }
  }
  if (ref) {
    const std::vector<double> flat_r =
        std::holds_alternative<ProbVec>(*ref) ? std::get<ProbVec>(*ref).vector() : std::get<JointTable>(*ref).data();
    const bool same_kind = ref->index() == d.index() &&
                           (std::holds_alternative<ProbVec>(d) ||
                            std::get<JointTable>(d).shape() == std::get<JointTable>(*ref).shape());
    if (!same_kind || flat_r.size() != flat_p.size()) {
      throw ArgumentError("--ref: shape does not match --dist");
    }
    values.emplace_back("D_q", relative_q_entropy(flat_p, flat_r, q));
  }

  if (cfg.format == "csv") {
    std::string text = "measure,value\n";
    for (const auto& [name, v] : values) text += "\"" + name + "\"," + format_sig10(v) + "\n";
    emit(cfg, text, out);
  } else {
    Json j;
    j["meta"] = meta(cfg);
    j["q"] = q.value();
    Json m;
    for (const auto& [name, v] : values) m[name] = num(v);
    j["measures"] = m;
    emit(cfg, dump(j), out);
  }
  return kExitOk;
}

int cmd_fuzz(const RunConfig& cfg, std::ostream& out) {
  std::vector<LawId> laws;
  if (cfg.law == "all") {
    for (const auto& info : all_laws()) laws.push_back(info.id);
  } else {
    const auto id = parse_law(cfg.law);
    if (!id) throw ArgumentError("--law: unknown law '" + cfg.law + "'");
    laws.push_back(*id);
  }
  std::optional<std::pair<double, double>> range;
  if (!cfg.q_range.empty()) range = parse_q_range(cfg.q_range);
  if (!std::isnan(cfg.q)) {
    if (range) throw ArgumentError("--q and --q-range are mutually exclusive");
    range = std::pair{QParam(cfg.q).value(), cfg.q};
  }

  std::vector<SlackReport> reports;
  std::vector<std::string> skipped;
  for (LawId id : laws) {
    const LawInfo& info = law_info(id);
    const double lo = range ? range->first : info.campaign.lo;
    const double hi = range ? range->second : info.campaign.hi;
    try {
      reports.push_back(fuzz(id, cfg.trials, lo, hi, cfg.seed, cfg.workers));
    } catch (const ArgumentError&) {
      // A range outside one law's validity only skips it in an "all" campaign.
      if (laws.size() == 1) throw;
      skipped.emplace_back(info.name);
    }
  }

  std::size_t violations = 0;
  for (const auto& r : reports) violations += r.violations;

  if (cfg.format == "csv") {
    std::string text = slack_report_csv_header() + "\n";
    for (const auto& r : reports) text += slack_report_csv_row(r) + "\n";
    emit(cfg, text, out);
  } else {
    Json j;
    j["meta"] = meta(cfg);
    j["seed"] = cfg.seed;
    j["trials"] = cfg.trials;
    Json rs = Json::array();
    for (const auto& r : reports) {
      const LawInfo& info = law_info(r.law);
      Json o;
      o["law"] = std::string(info.name);
      o["kind"] = info.kind == LawKind::kIdentity ? "identity" : "inequality";
      o["trials"] = r.trials;
      o["min_slack"] = num(r.min_slack);
      o["mean_slack"] = num(r.mean_slack);
      o["violations"] = r.violations;
      o["tolerance"] = r.tolerance;
      o["q_lo"] = r.q_lo;
      o["q_hi"] = r.q_hi;
      o["q_min"] = r.q_min;
      o["q_max"] = r.q_max;
      o["seed"] = r.seed;
      o["passed"] = r.passed();
      rs.push_back(o);
    }
    j["reports"] = rs;
    j["skipped"] = skipped;
    j["violations"] = violations;
    emit(cfg, dump(j), out);
  }
  return violations > 0 ? kExitVerification : kExitOk;
}

int cmd_markov(const RunConfig& cfg, std::ostream& out) {
  const QParam q = require_q(cfg);
  const MarkovChain c = parse_chain(load_json(cfg.chain, "--chain"));
  const SecondLawReport report = second_law_report(c, q, cfg.steps);
  bool failed = false;
  for (const auto& row : report.rows) failed = failed || (report.applicable && !(row.slack >= -kSlackTolerance));

  if (cfg.format == "csv") {
    std::string text = "step,H_q,delta_H,T_q,lhs,slack\n";
    for (const auto& r : report.rows) {
      text += std::to_string(r.step) + "," + format_sig10(r.h_q) + "," + format_sig10(r.delta_h) + "," +
              format_sig10(r.t_q) + "," + format_sig10(r.lhs) + "," + format_sig10(r.slack) + "\n";
    }
    emit(cfg, text, out);
  } else {
    Json j;
    j["meta"] = meta(cfg);
    const Json cj = chain_json(c);
    j["transition"] = cj["transition"];
    j["initial"] = cj["initial"];
    j["q"] = q.value();
    j["doubly_stochastic"] = c.is_doubly_stochastic();
    j["irreducible"] = c.is_irreducible();
    try {
      j["stationary"] = num_array(stationary(c).distribution.values());
    } catch (const ConvergenceError&) {
      j["stationary"] = nullptr;
    }
    j["applicable"] = report.applicable;
    j["bracket"] = 1.0 + q.deformation() * ln_q(static_cast<double>(c.states()), q);
    Json rows = Json::array();
    for (const auto& r : report.rows) {
      Json o;
      o["step"] = r.step;
      o["H_q"] = num(r.h_q);
      o["delta_H"] = num(r.delta_h);
      o["T_q"] = num(r.t_q);
      o["T_q_statement"] = num(r.t_q_statement);
      o["lhs"] = num(r.lhs);
      o["slack"] = num(r.slack);
      o["relative_drop"] = num(r.relative_drop);
      rows.push_back(o);
    }
    j["rows"] = rows;
    if (cfg.n > 0) {
      const EntropyRates rates = entropy_rate_approximants(c, cfg.n, q);
      Json e;
      e["n"] = cfg.n;
      e["block_rate"] = num(rates.block_rate);
      e["cond_rate"] = num(rates.cond_rate);
      e["conditional_terms"] = num_array(rates.conditional_terms);
      j["entropy_rates"] = e;
    }
    j["passed"] = !failed;
    emit(cfg, dump(j), out);
  }
  return failed ? kExitVerification : kExitOk;
}

int cmd_maxent(const RunConfig& cfg, std::ostream& out) {
  if (cfg.levels.empty()) throw ArgumentError("--levels is required");
  if (std::isnan(cfg.mean)) throw ArgumentError("--mean is required");
  const MaxEntProblem problem{parse_levels(cfg.levels), cfg.mean, require_q(cfg)};
  const MaxEntSolution sol = solve(problem, cfg.tol, cfg.max_iters);
  std::optional<OptimalityReport> opt;
  if (cfg.verify_trials > 0) {
    Rng rng(cfg.seed);
    opt = verify_optimality(sol, problem, cfg.verify_trials, rng);
  }
  const bool failed = opt && !(opt->min_gap >= -kSlackTolerance);

  if (cfg.sweep > 0) {
    if (cfg.sweep_out.empty()) throw ArgumentError("--sweep needs --sweep-out");
    const auto [lo_it, hi_it] = std::minmax_element(problem.levels.begin(), problem.levels.end());
    std::string text = "mean,lambda,mu,H_q,iterations\n";
    for (std::size_t i = 0; i < cfg.sweep; ++i) {
      const double e = *lo_it + (*hi_it - *lo_it) * static_cast<double>(i + 1) / static_cast<double>(cfg.sweep + 1);
      const MaxEntSolution s = solve({problem.levels, e, problem.q}, cfg.tol, cfg.max_iters);
      text += format_sig10(e) + "," + format_sig10(s.lambda) + "," + format_sig10(s.mu) + "," +
              format_sig10(q_entropy(s.p, problem.q).value) + "," + std::to_string(s.iterations) + "\n";
    }
    std::ofstream f(cfg.sweep_out, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("--sweep-out: cannot write '" + cfg.sweep_out + "'");
    f << text;
  }

  if (cfg.format == "csv") {
    std::string text = "level,p\n";
    for (std::size_t i = 0; i < sol.p.size(); ++i) {
      text += format_sig10(problem.levels[i]) + "," + format_sig10(sol.p[i]) + "\n";
    }
    emit(cfg, text, out);
  } else {
    Json j;
    j["meta"] = meta(cfg);
    j["levels"] = num_array(problem.levels);
    j["mean"] = problem.target_mean;
    j["q"] = problem.q.value();
    j["p"] = num_array(sol.p.values());
    j["lambda"] = num(sol.lambda);
    j["mu"] = num(sol.mu);
    j["residuals"] = {{"normalization", num(sol.normalization_residual)}, {"mean", num(sol.mean_residual)}};
    j["iterations"] = sol.iterations;
    j["degenerate"] = sol.degenerate;
    j["H_q"] = num(q_entropy(sol.p, problem.q).value);
    if (opt) {
      Json o;
      o["samples"] = opt->samples;
      o["seed"] = cfg.seed;
      o["min_gap"] = num(opt->min_gap);
      o["min_formula"] = num(opt->min_formula);
      o["max_formula_deviation"] = num(opt->max_formula_deviation);
      o["sign_mismatches"] = opt->sign_mismatches;
      j["optimality"] = o;
    }
    j["passed"] = !failed;
    emit(cfg, dump(j), out);
  }
  return failed ? kExitVerification : kExitOk;
}

int cmd_smb(const RunConfig& cfg, std::ostream& out) {
  const QParam q = require_q(cfg);
  const MarkovChain c = parse_chain(load_json(cfg.chain, "--chain"));
  if (cfg.n == 0) throw ArgumentError("--n must be >= 1");
  const SmbCurve curve = smb_probe(c, q, cfg.n, cfg.k, cfg.trajectories, cfg.seed, cfg.workers);
  const bool failed = curve.bound_violations > 0;

  if (cfg.format == "csv") {
    std::string text = smb_csv_header() + "\n";
    for (const auto& r : curve.records) text += smb_csv_row(r, curve) + "\n";
    emit(cfg, text, out);
  } else {
    Json j;
    j["meta"] = meta(cfg);
    const Json cj = chain_json(c);
    j["transition"] = cj["transition"];
    j["initial"] = cj["initial"];
    j["q"] = curve.q;
    j["k"] = curve.k;
    j["trajectories"] = curve.trajectories;
    j["seed"] = curve.seed;
    j["h_q_k"] = num(curve.h_q_k);
    j["h_q_inf"] = num(curve.h_q_inf);
    j["bound_violations"] = curve.bound_violations;
    j["flags"] = {{"q_outside_convergence_range", curve.flags.q_outside_convergence_range},
                  {"t3_not_vanishing", curve.flags.t3_not_vanishing},
                  {"c1_violated", curve.flags.c1_violated},
                  {"c2_violated", curve.flags.c2_violated},
                  {"ratio_unbounded", curve.flags.ratio_unbounded}};
    Json rows = Json::array();
    for (const auto& r : curve.records) {
      Json o;
      o["n"] = r.n;
      o["block_mean"] = num(r.block_mean);
      o["block_sd"] = num(r.block_sd);
      o["block_min"] = num(r.block_min);
      o["block_max"] = num(r.block_max);
      o["pk_mean"] = num(r.pk_mean);
      o["t3_over_n_mean"] = num(r.t3_over_n_mean);
      o["cond_c1_rate"] = num(r.cond_c1_rate);
      o["cond_c2_rate"] = num(r.cond_c2_rate);
      o["ratio1_mean"] = num(r.ratio1_mean);
      o["ratio2_mean"] = num(r.ratio2_mean);
      rows.push_back(o);
    }
    j["records"] = rows;
    emit(cfg, dump(j), out);
  }
  return failed ? kExitVerification : kExitOk;
}

void add_io(CLI::App* sub, RunConfig& cfg, bool text_default = false) {
  std::vector<std::string> formats{"json", "csv"};
  if (text_default) formats.insert(formats.begin(), "text");
  sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember(formats));
  sub->add_option("--out", cfg.out, "Write the report here instead of standard output");
  sub->add_flag("--deterministic", cfg.deterministic, "Omit the timestamp from report metadata");
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"q-deformed information measures, law fuzzing, Markov and MaxEnt analysis", "qit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto* entropy = app.add_subcommand("entropy", "H_q (or S_q) of a distribution or joint table");
  entropy->add_option("--dist", cfg.dist, "JSON literal or file: {\"p\":[...]} or {\"table\":[[...]]}")->required();
  entropy->add_option("--q", cfg.q, "Entropic index")->required();
  entropy->add_option("--kind", cfg.kind, "q (modified form) or tsallis")->check(CLI::IsMember({"q", "tsallis"}));
  add_io(entropy, cfg, true);

  auto* measures = app.add_subcommand("measures", "All applicable measures of a distribution or table");
  measures->add_option("--dist", cfg.dist, "JSON literal or file")->required();
  measures->add_option("--ref", cfg.ref, "Reference distribution for D_q");
  measures->add_option("--q", cfg.q, "Entropic index")->required();
  add_io(measures, cfg);

  auto* fuzzc = app.add_subcommand("fuzz", "Randomized law verification");
  fuzzc->add_option("--law", cfg.law, "Law name or 'all'");
  fuzzc->add_option("--trials", cfg.trials, "Instances per law")->check(CLI::PositiveNumber);
  fuzzc->add_option("--q-range", cfg.q_range, "Sampling interval a:b (clipped to each law's validity)");
  fuzzc->add_option("--q", cfg.q, "Single entropic index");
  fuzzc->add_option("--seed", cfg.seed, "Master seed (QIT_SEED overrides)");
  fuzzc->add_option("--workers", cfg.workers, "Worker threads")->check(CLI::PositiveNumber);
  add_io(fuzzc, cfg);

  auto* markov = app.add_subcommand("markov", "Second-law report and entropy-rate approximants");
  markov->add_option("--chain", cfg.chain, "JSON literal or file: {\"transition\":[[...]],\"initial\":[...]}")
      ->required();
  markov->add_option("--q", cfg.q, "Entropic index in [0, 1)")->required();
  markov->add_option("--steps", cfg.steps, "Evolution steps");
  markov->add_option("--n", cfg.n, "Horizon for block/conditional entropy rates (0 skips)");
  add_io(markov, cfg);

  auto* maxent = app.add_subcommand("maxent", "Maximum q-entropy distribution under a mean constraint");
  maxent->add_option("--levels", cfg.levels, "Comma-separated energy levels")->required();
  maxent->add_option("--mean", cfg.mean, "Target mean")->required();
  maxent->add_option("--q", cfg.q, "Entropic index below 2")->required();
  maxent->add_option("--tol", cfg.tol, "Residual tolerance");
  maxent->add_option("--max-iters", cfg.max_iters, "Newton iteration cap");
  maxent->add_option("--verify", cfg.verify_trials, "Feasible samples for the optimality check (0 skips)");
  maxent->add_option("--seed", cfg.seed, "Seed for the optimality samples (QIT_SEED overrides)");
  maxent->add_option("--sweep", cfg.sweep, "Number of interior target means to sweep");
  maxent->add_option("--sweep-out", cfg.sweep_out, "CSV file for the sweep");
  add_io(maxent, cfg);

  auto* smb = app.add_subcommand("smb", "Block-probability probe on sampled trajectories");
  smb->add_option("--chain", cfg.chain, "JSON literal or file")->required();
  smb->add_option("--q", cfg.q, "Entropic index")->required();
  smb->add_option("--n", cfg.n, "Longest block length")->required();
  smb->add_option("--k", cfg.k, "Markov approximation order");
  smb->add_option("--trajectories", cfg.trajectories, "Sampled trajectories")->check(CLI::PositiveNumber);
  smb->add_option("--seed", cfg.seed, "Master seed (QIT_SEED overrides)");
  smb->add_option("--workers", cfg.workers, "Worker threads")->check(CLI::PositiveNumber);
  add_io(smb, cfg);

  std::vector<const char*> raw;
  raw.reserve(argv.size());
  for (const auto& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  if (cfg.format.empty()) cfg.format = cfg.subcommand == "entropy" ? "text" : "json";

  try {
    if (const char* env = std::getenv("QIT_SEED"); env != nullptr && *env != '\0') {
      char* end = nullptr;
      errno = 0;
      const unsigned long long s = std::strtoull(env, &end, 10);
      if (*end != '\0' || errno == ERANGE || *env == '-') {
        throw ArgumentError(std::string("QIT_SEED: not an unsigned 64-bit integer: '") + env + "'");
      }
      cfg.seed = s;
    }
    if (cfg.subcommand == "entropy") return cmd_entropy(cfg, out);
    if (cfg.subcommand == "measures") return cmd_measures(cfg, out);
    if (cfg.subcommand == "fuzz") return cmd_fuzz(cfg, out);
    if (cfg.subcommand == "markov") return cmd_markov(cfg, out);
    if (cfg.subcommand == "maxent") return cmd_maxent(cfg, out);
    return cmd_smb(cfg, out);
  } catch (const std::exception& e) {
    err << "qit " << cfg.subcommand << ": error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace qit::cli
