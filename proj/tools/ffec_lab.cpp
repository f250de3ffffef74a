// ffec-lab: runs one named experiment from a flat key = value config and
// writes <out>/<experiment>.csv, optional JSON, and manifest.json.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ffec/ffec.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kAssert = 1, kConfig = 2, kInternal = 3 };

struct Failure {
  int exit;
  std::string status;
  std::string message;
};

int exit_for(ffec_status s) {
  switch (s) {
    case FFEC_METHOD_DISAGREEMENT:
      return kAssert;
    case FFEC_NOT_PRIME:
    case FFEC_FORBIDDEN_CHARACTERISTIC:
    case FFEC_EVEN_CHARACTERISTIC:
    case FFEC_NO_IRREDUCIBLE_FOUND:
    case FFEC_CONSTANT_MODULUS:
    case FFEC_NO_CUBE_ROOTS_OF_UNITY:
    case FFEC_ZERO_POLYNOMIAL:
    case FFEC_NON_MINIMAL_MODEL:
    case FFEC_ISOTRIVIAL_CURVE:
    case FFEC_NOT_MORDELL_CURVE:
    case FFEC_SIGN_SPLIT_UNDEFINED:
    case FFEC_POLICY_REQUIRED:
    case FFEC_PARSE_ERROR:
    case FFEC_UNSUPPORTED_FEATURE:
    case FFEC_BAD_POLYNOMIAL_LITERAL:
    case FFEC_INVALID_ARGUMENT:
    case FFEC_TOO_LARGE:
      return kConfig;
    default:
      return kInternal;
  }
}

void check(ffec_status s) {
  if (s != FFEC_OK) throw Failure{exit_for(s), ffec_status_name(s), ffec_last_error()};
}

[[noreturn]] void config_error(const std::string& status, const std::string& msg) {
  throw Failure{kConfig, status, msg};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using FieldH = std::unique_ptr<ffec_field, Deleter<ffec_field, ffec_field_free>>;
using CurveH = std::unique_ptr<ffec_curve, Deleter<ffec_curve, ffec_curve_free>>;
using PolicyH = std::unique_ptr<ffec_policy, Deleter<ffec_policy, ffec_policy_free>>;
using FamilyH = std::unique_ptr<ffec_family, Deleter<ffec_family, ffec_family_free>>;
using LpolyH = std::unique_ptr<ffec_lpoly, Deleter<ffec_lpoly, ffec_lpoly_free>>;
using IdsH = std::unique_ptr<ffec_identities, Deleter<ffec_identities, ffec_identities_free>>;

std::string take(char* s) {
  std::string r = s ? s : "";
  ffec_string_free(s);
  return r;
}

// ---- config ----

const std::set<std::string> kExperiments = {"identities", "sizes",      "trace-avg", "one-level",
                                            "lambda-moments", "conjecture", "dump-lpoly"};

const std::map<std::string, std::string> kDefaults = {
    {"m", "1"},
    {"A", "0"},
    {"family", "quad"},
    {"N", "3"},
    {"sign", "all"},
    {"variant", "F"},
    {"n_max", "6"},
    {"alpha", "0.9"},
    {"test_function", "fejer"},
    {"sigma", "1"},
    {"max_prime_degree", "8"},
    {"bad_prime_policy", "Tame"},
    {"method", "both"},
    {"eigen_members", "50"},
    {"dev", "true"},
    {"identity_degree", "2"},
    {"twists", "20"},
    {"seed", "1"},
    {"m_max", "5"},
    {"sym", "1"},
    {"out", "ffec-out"},
};
const std::set<std::string> kOptional = {"mordell_B", "ratio_prime", "jobs"};
const std::set<std::string> kRequired = {"p", "B", "experiment"};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool known_key(const std::string& k) {
  return kDefaults.count(k) || kOptional.count(k) || kRequired.count(k) || k.rfind("local_factor.", 0) == 0;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  if (!text.empty() && trim(text).front() == '{') {
    // a manifest: re-run from its echoed config
    json j;
    try {
      j = json::parse(text);
    } catch (const std::exception& e) {
      config_error("ParseError", std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) config_error("ParseError", "manifest has no config");
    for (auto& [k, v] : j["config"].items()) {
      if (!v.is_string()) config_error("ParseError", "config value for '" + k + "' is not a string");
      kv[k] = v.get<std::string>();
    }
    return kv;
  }
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(lineno);
    if (eq == std::string::npos) config_error("ParseError", where + ": expected key = value");
    const std::string k = trim(line.substr(0, eq));
    std::string v = trim(line.substr(eq + 1));
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    if (k.empty()) config_error("ParseError", where + ": empty key");
    if (kv.count(k)) config_error("ParseError", where + ": duplicate key '" + k + "'");
    kv[k] = v;
  }
  return kv;
}

struct Config {
  std::map<std::string, std::string> kv;

  const std::string& get(const std::string& k) const { return kv.at(k); }
  bool has(const std::string& k) const { return kv.count(k) > 0; }

  long long integer(const std::string& k, long long lo, long long hi) const {
    const std::string& s = get(k);
    size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (...) {
      pos = 0;
    }
    if (pos != s.size() || s.empty()) config_error("ParseError", k + " = '" + s + "' is not an integer");
    if (v < lo || v > hi)
      config_error("InvalidArgument", k + " = " + s + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }
  double real(const std::string& k) const {
    const std::string& s = get(k);
    size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(s, &pos);
    } catch (...) {
      pos = 0;
    }
    if (pos != s.size() || s.empty() || !std::isfinite(v)) config_error("ParseError", k + " = '" + s + "' is not a number");
    return v;
  }
  bool boolean(const std::string& k) const {
    const std::string& s = get(k);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    config_error("ParseError", k + " = '" + s + "' is not a boolean");
  }
  // "3", "3,4,5" or "3..5"
  std::vector<int> int_list(const std::string& k, int lo, int hi) const {
    const std::string s = get(k);
    std::vector<int> out;
    auto one = [&](const std::string& t) {
      size_t pos = 0;
      int v = 0;
      try {
        v = std::stoi(trim(t), &pos);
      } catch (...) {
        pos = 0;
      }
      if (pos != trim(t).size() || trim(t).empty()) config_error("ParseError", k + " = '" + s + "' is not an integer list");
      if (v < lo || v > hi) config_error("InvalidArgument", k + " has " + std::to_string(v) + " outside [" +
                                                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return v;
    };
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
      const int a = one(s.substr(0, dots)), b = one(s.substr(dots + 2));
      if (b < a) config_error("InvalidArgument", k + " range is empty");
      for (int v = a; v <= b; ++v) out.push_back(v);
      return out;
    }
    std::stringstream ss(s);
    std::string t;
    while (std::getline(ss, t, ',')) out.push_back(one(t));
    if (out.empty()) config_error("ParseError", k + " is empty");
    return out;
  }
};

bool is_cubic_run(const Config& c) {
  const std::string& e = c.get("experiment");
  if (e == "lambda-moments" || e == "conjecture") return true;
  if (e == "sizes" || e == "trace-avg" || e == "one-level") return c.get("family") == "cubic";
  return false;
}

// Fills defaults and checks everything that does not need the library.
Config normalize(std::map<std::string, std::string> kv, int jobs_override) {
  for (const auto& [k, v] : kv)
    if (!known_key(k)) config_error("ParseError", "unknown key '" + k + "'");
  for (const auto& k : kRequired)
    if (!kv.count(k)) config_error("ParseError", "missing required key '" + k + "'");
  if (kv.at("experiment") == "conjecture" && !kv.count("family")) kv["family"] = "cubic";
  for (const auto& [k, v] : kDefaults) kv.emplace(k, v);
  if (jobs_override > 0) kv["jobs"] = std::to_string(jobs_override);
  if (!kv.count("jobs")) kv["jobs"] = std::to_string(std::max(1u, std::thread::hardware_concurrency()));

  Config c{kv};
  if (!kExperiments.count(c.get("experiment"))) config_error("ParseError", "unknown experiment '" + c.get("experiment") + "'");
  const long long p = c.integer("p", 2, 1 << 20);
  c.integer("m", 1, 10);
  if (p == 2 || p == 3) config_error("UnsupportedFeature", "characteristic " + std::to_string(p) + " is not supported");
  const std::string fam = c.get("family");
  if (fam != "quad" && fam != "cubic") config_error("ParseError", "family must be quad or cubic");
  if (c.get("experiment") == "conjecture" && fam != "cubic")
    config_error("InvalidArgument", "the conjecture probe runs on cubic families");
  c.int_list("N", 1, 24);
  c.integer("n_max", 1, 16);
  const double alpha = c.real("alpha");
  if (!(alpha > 0 && alpha <= 1)) config_error("InvalidArgument", "alpha must be in (0, 1]");
  if (c.real("sigma") <= 0) config_error("InvalidArgument", "sigma must be positive");
  const std::string tf = c.get("test_function");
  if (tf != "fejer" && tf != "gaussian") config_error("ParseError", "test_function must be fejer or gaussian");
  c.integer("max_prime_degree", 1, 16);
  c.integer("eigen_members", 0, 1ll << 40);
  c.boolean("dev");
  c.integer("identity_degree", 1, 4);
  c.integer("twists", 0, 100000);
  c.integer("seed", 0, std::numeric_limits<long long>::max());
  c.integer("m_max", 1, 8);
  c.integer("sym", 1, 4);
  c.integer("jobs", 1, 1024);
  const std::string m = c.get("method");
  if (m != "lpoly" && m != "primesum" && m != "both") config_error("ParseError", "method must be lpoly, primesum or both");
  return c;
}

// ---- output helpers ----

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", x);
  return b;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string r = "\"";
  for (char ch : s) {
    if (ch == '"') r += '"';
    r += ch;
  }
  return r + "\"";
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) { row(header); }
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != cols_) throw Failure{kInternal, "Internal", "csv row width mismatch"};
    for (size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + csv_field(cells[i]);
    text_ += "\n";
  }
  const std::string& text() const { return text_; }

 private:
  size_t cols_;
  std::string text_;
};

struct Output {
  std::string name;
  std::string data;
};

struct Run {
  Config cfg;
  FieldH field;
  ffec_field_info finfo{};
  CurveH curve;
  ffec_curve_info cinfo{};
  PolicyH policy;
  int jobs = 1;
  std::vector<std::string> warnings;
  std::vector<std::string> assertion_failures;
  std::vector<Output> outputs;

  void progress(const std::string& s) const { std::cerr << "ffec-lab: " << cfg.get("experiment") << ": " << s << "\n"; }

  void note_policy(const std::string& what) {
    std::string places;
    const size_t n = ffec_curve_bad_place_count(curve.get());
    for (size_t i = 0; i < n; ++i) {
      ffec_place pl;
      check(ffec_curve_bad_place(curve.get(), i, &pl));
      if (pl.type == 2) places += (places.empty() ? "" : "; ") + std::string(pl.P);
    }
    if (!places.empty())
      warnings.push_back(what + " used bad_prime_policy = " + ffec_policy_kind(policy.get()) +
                         " at additive places: " + places);
  }

  FamilyH family(int N) const {
    ffec_family* f = nullptr;
    if (cfg.get("family") == "cubic")
      check(ffec_cubic_family_new(curve.get(), N, cfg.get("variant").c_str(), jobs, &f));
    else
      check(ffec_quad_family_new(curve.get(), N, cfg.get("sign").c_str(), jobs, &f));
    return FamilyH(f);
  }

  // Family id and size, or false (with a warning) when it is empty.
  bool family_info(ffec_family* f, int N, ffec_family_info& info) {
    const ffec_status s = ffec_family_get_info(f, &info);
    if (s == FFEC_EMPTY_FAMILY) {
      warnings.push_back("family at N = " + std::to_string(N) + " is empty; skipped");
      return false;
    }
    check(s);
    return true;
  }

  ffec_test_function test_function() const {
    ffec_test_function t;
    t.kind = cfg.get("test_function") == "fejer" ? FFEC_FEJER : FFEC_TRUNCATED_GAUSSIAN;
    t.alpha = cfg.real("alpha");
    t.sigma = cfg.real("sigma");
    return t;
  }
};

std::string rational_cell(const ffec_rational& r) { return std::string(r.num) + "/" + r.den; }

// ---- experiments ----

void run_identities(Run& r) {
  CurveH Et;
  if (r.finfo.has_mu3) {
    if (r.cfg.has("mordell_B")) {
      ffec_curve* c = nullptr;
      check(ffec_curve_new(r.field.get(), "0", r.cfg.get("mordell_B").c_str(), &c));
      Et.reset(c);
    } else if (!r.cinfo.is_mordell) {
      r.warnings.push_back("cubic identities skipped: the curve is not a Mordell curve and mordell_B is unset");
    }
  } else {
    r.warnings.push_back("cubic identities skipped: q = " + std::to_string(r.finfo.q) + " has no cube roots of unity");
  }
  const ffec_curve* et = Et ? Et.get() : (r.finfo.has_mu3 && r.cinfo.is_mordell ? r.curve.get() : nullptr);
  // a Mordell base curve doubles as the cubic curve
  ffec_identities* ids = nullptr;
  check(ffec_identities_run(r.curve.get(), et, (int)r.cfg.integer("identity_degree", 1, 4),
                            (int)r.cfg.integer("twists", 0, 100000),
                            (uint64_t)r.cfg.integer("seed", 0, std::numeric_limits<long long>::max()), r.policy.get(),
                            &ids));
  IdsH h(ids);
  r.note_policy("sym^2 identities");
  Csv csv({"identity", "pass", "checked", "detail"});
  for (size_t i = 0; i < ffec_identities_count(ids); ++i) {
    ffec_identity x;
    check(ffec_identities_get(ids, i, &x));
    csv.row({x.name, x.pass ? "pass" : "fail", std::to_string(x.checked), x.detail});
    if (!x.pass) r.assertion_failures.push_back(std::string("identity failed: ") + x.name);
  }
  r.outputs.push_back({"identities.csv", csv.text()});
}

void run_sizes(Run& r) {
  Csv csv({"family", "N", "exact", "series", "predicted", "abs_err", "rel_err", "ratio_P", "ratio_exact", "ratio",
           "ratio_predicted", "ratio_deviation", "formula"});
  for (int N : r.cfg.int_list("N", 1, 24)) {
    FamilyH f = r.family(N);
    ffec_size_report s;
    check(ffec_family_size_report(f.get(), &s));
    if (s.has_series && s.series != s.exact)
      r.assertion_failures.push_back("N = " + std::to_string(N) + ": enumeration " + std::to_string(s.exact) +
                                     " differs from series coefficient " + std::to_string(s.series));
    ffec_ratio q{};
    const char* P = r.cfg.has("ratio_prime") ? r.cfg.get("ratio_prime").c_str() : nullptr;
    const ffec_status st = ffec_family_coprime_ratio(f.get(), P, &q);
    std::vector<std::string> ratio(5, "");
    if (st == FFEC_EMPTY_FAMILY) {
      r.warnings.push_back("family at N = " + std::to_string(N) + " is empty; no coprime ratio");
    } else {
      check(st);
      ratio = {q.P, rational_cell(q.empirical), num(q.empirical.value), num(q.predicted), num(q.deviation)};
    }
    const std::string id = r.cfg.get("family") == "cubic" ? r.cfg.get("variant") + std::to_string(N)
                                                           : "H" + std::to_string(N) + "^" + r.cfg.get("sign");
    csv.row({id, std::to_string(N), std::to_string(s.exact), s.has_series ? std::to_string(s.series) : "",
             num(s.predicted), num(s.abs_err), num(s.rel_err), ratio[0], ratio[1], ratio[2], ratio[3], ratio[4],
             s.formula});
    r.progress("N = " + std::to_string(N) + " done");
  }
  r.outputs.push_back({"sizes.csv", csv.text()});
}

void run_trace_avg(Run& r) {
  const bool cubic = r.cfg.get("family") == "cubic";
  std::vector<std::string> head = {"family", "N", "n", "size", "method", "value_exact", "value", "lpoly", "primesum",
                                   "main_term", "residual"};
  const std::vector<std::string> extra =
      cubic ? std::vector<std::string>{"M", "S", "E", "M0", "S0", "D1", "D2", "mse"}
            : std::vector<std::string>{"eta", "sym2", "Dn", "good", "bad", "mp", "inf"};
  head.insert(head.end(), extra.begin(), extra.end());
  Csv csv(head);
  const std::string method = r.cfg.get("method");
  const int n_max = (int)r.cfg.integer("n_max", 1, 16);
  for (int N : r.cfg.int_list("N", 1, 24)) {
    FamilyH f = r.family(N);
    ffec_family_info info;
    if (!r.family_info(f.get(), N, info)) continue;
    for (int n = 1; n <= n_max; ++n) {
      ffec_trace_avg t;
      check(ffec_trace_average(f.get(), n, method.c_str(), r.policy.get(), &t));
      std::vector<std::string> row = {info.id,
                                      std::to_string(N),
                                      std::to_string(n),
                                      std::to_string(t.size),
                                      method,
                                      rational_cell(t.value),
                                      num(t.value.value),
                                      t.has_lpoly ? num(t.lpoly.value) : "",
                                      t.has_primesum ? num(t.primesum.value) : "",
                                      num(t.main_term),
                                      num(t.residual)};
      const std::vector<double> tail = cubic ? std::vector<double>{t.M, t.S, t.E, t.M0, t.S0, t.D1, t.D2, t.mse}
                                             : std::vector<double>{(double)t.eta, t.sym2, t.Dn, t.good, t.bad, t.mp, t.inf};
      for (double x : tail) row.push_back(num(x));
      csv.row(row);
    }
    r.progress(std::string(info.id) + " done");
  }
  if (!cubic) r.note_policy("main terms");
  r.outputs.push_back({"trace-avg.csv", csv.text()});
}

void run_one_level(Run& r) {
  const bool cubic = r.cfg.get("family") == "cubic";
  const bool with_dev = !cubic && r.cfg.boolean("dev");
  const ffec_test_function tf = r.test_function();
  Csv csv({"family", "N", "members", "degenerate", "nn", "test_function", "alpha", "sigma", "trace_side",
           "eigen_members", "eigen_trace_side", "eigen_side", "max_gap", "max_symmetry_err", "rmt", "residual",
           "rmt_base_plus_2N", "dev", "dev_over_N", "dev_tail_bound"});
  json trend = json::array();
  for (int N : r.cfg.int_list("N", 1, 24)) {
    FamilyH f = r.family(N);
    ffec_family_info info;
    if (!r.family_info(f.get(), N, info)) continue;
    ffec_one_level_report o;
    check(ffec_one_level_density(f.get(), &tf, (size_t)r.cfg.integer("eigen_members", 0, 1ll << 40), with_dev,
                                 (int)r.cfg.integer("max_prime_degree", 1, 16), r.policy.get(), &o));
    const double shifted = ffec_rmt_baseline(r.cinfo.n_frak + 2 * N, &tf);
    csv.row({info.id, std::to_string(N), std::to_string(o.members), std::to_string(o.degenerate),
             std::to_string(o.nn), r.cfg.get("test_function"), num(tf.alpha), num(tf.sigma), num(o.trace_side),
             std::to_string(o.eigen_members), num(o.eigen_trace_side), num(o.eigen_side), num(o.max_gap),
             num(o.max_symmetry_err), num(o.rmt), num(o.residual), num(shifted), o.has_dev ? num(o.dev) : "",
             o.has_dev ? num(o.dev_over_N) : "", o.has_dev ? num(o.dev_tail_bound) : ""});
    if (o.max_gap > 1e-8)
      r.assertion_failures.push_back(std::string(info.id) + ": trace and eigenangle sides differ by " + num(o.max_gap));
    trend.push_back({{"N", N}, {"abs_residual", std::fabs(o.residual)}});
    r.progress(std::string(info.id) + " done");
  }
  bool decreasing = trend.size() >= 2;
  for (size_t i = 1; i < trend.size(); ++i)
    decreasing = decreasing && trend[i]["abs_residual"].get<double>() < trend[i - 1]["abs_residual"].get<double>();
  if (with_dev) r.note_policy("dev term");
  r.outputs.push_back({"one-level.csv", csv.text()});
  json j = {{"trend", trend}, {"abs_residual_decreasing", decreasing}};
  r.outputs.push_back({"one-level.json", j.dump(2) + "\n"});
}

void run_lambda_moments(Run& r) {
  const int m_max = (int)r.cfg.integer("m_max", 1, 8);
  Csv csv({"m", "value_exact", "value", "deviation", "primes", "scaled_deviation"});
  std::vector<ffec_moment> rows;
  for (int m = 1; m <= m_max; ++m) {
    ffec_moment x;
    check(ffec_lambda_moment(r.curve.get(), m, &x));
    rows.push_back(x);
    csv.row({std::to_string(m), rational_cell(x.value), num(x.value.value), num(x.deviation),
             std::to_string(x.primes), num(std::fabs(x.deviation) * std::pow((double)r.finfo.q, m / 3.0))});
    r.progress("m = " + std::to_string(m) + " done");
  }
  const double C = ffec_moment_envelope(r.finfo.q, rows.data(), rows.size());
  r.outputs.push_back({"lambda-moments.csv", csv.text()});
  json j = {{"q", r.finfo.q}, {"m_max", m_max}, {"fitted_C", C}};
  r.outputs.push_back({"lambda-moments.json", j.dump(2) + "\n"});
}

void run_conjecture(Run& r) {
  Csv csv({"family", "N", "n", "lhs_exact", "lhs", "rhs", "gap", "scaled_gap", "sym3", "tr1"});
  const int n_max = (int)r.cfg.integer("n_max", 1, 16);
  for (int N : r.cfg.int_list("N", 1, 24)) {
    FamilyH f = r.family(N);
    ffec_family_info info;
    if (!r.family_info(f.get(), N, info)) continue;
    for (int n = 1; n <= n_max; ++n) {
      ffec_conjecture_row x;
      check(ffec_conjecture_probe(f.get(), n, &x));
      csv.row({info.id, std::to_string(N), std::to_string(n), rational_cell(x.lhs), num(x.lhs.value), num(x.rhs),
               num(x.gap), num(x.scaled_gap), num(x.sym3), num(x.tr1)});
    }
    r.progress(std::string(info.id) + " done");
  }
  r.outputs.push_back({"conjecture.csv", csv.text()});
}

double round12(double x) {
  char b[40];
  std::snprintf(b, sizeof b, "%.12g", x);
  return std::strtod(b, nullptr);
}

void run_dump_lpoly(Run& r) {
  const int m = (int)r.cfg.integer("sym", 1, 4);
  const int mpd = (int)r.cfg.integer("max_prime_degree", 1, 16);
  ffec_lpoly* l = nullptr;
  if (m == 1)
    check(ffec_lpoly_new(r.curve.get(), mpd, &l));
  else
    check(ffec_sym_lpoly_new(r.curve.get(), m, r.policy.get(), mpd, &l));
  LpolyH h(l);
  if (m >= 2) r.note_policy("sym^" + std::to_string(m));
  ffec_lpoly_info info;
  check(ffec_lpoly_get_info(l, &info));
  Csv csv({"j", "coefficient"});
  json coeffs = json::array();
  for (int j = 0; j <= info.degree; ++j) {
    char* s = nullptr;
    check(ffec_lpoly_coeff(l, j, &s));
    const std::string c = take(s);
    coeffs.push_back(c);
    csv.row({std::to_string(j), c});
  }
  size_t count = 0;
  check(ffec_lpoly_zeros(l, nullptr, nullptr, 0, &count));
  std::vector<double> re(count), im(count);
  check(ffec_lpoly_zeros(l, re.data(), im.data(), count, &count));
  json roots = json::array();
  for (size_t i = 0; i < count; ++i) roots.push_back({{"re", round12(re[i])}, {"im", round12(im[i])}});
  json j = {{"q", r.finfo.q},
            {"A", r.cfg.get("A")},
            {"B", r.cfg.get("B")},
            {"n_frak", r.cinfo.n_frak},
            {"sym", m},
            {"degree", info.degree},
            {"coefficients", coeffs},
            {"epsilon", info.eps},
            {"verified", (bool)info.verified},
            {"rh", (bool)info.rh},
            {"roots", roots}};
  if (!info.rh) r.assertion_failures.push_back("zeros off the critical circle");
  if (m == 1 && info.degree != r.cinfo.n_frak)
    r.assertion_failures.push_back("L-degree " + std::to_string(info.degree) + " differs from conductor degree " +
                                   std::to_string(r.cinfo.n_frak));
  r.outputs.push_back({"dump-lpoly.csv", csv.text()});
  r.outputs.push_back({"dump-lpoly.json", j.dump(2) + "\n"});
}

// ---- driver ----

void setup(Run& r) {
  const Config& c = r.cfg;
  ffec_field* f = nullptr;
  check(ffec_field_new((int)c.integer("p", 2, 1 << 20), (int)c.integer("m", 1, 10), &f));
  r.field.reset(f);
  check(ffec_field_get_info(f, &r.finfo));
  if (is_cubic_run(c)) {
    if (!r.finfo.has_mu3)
      config_error("UnsupportedFeature", "cubic experiments need q = 1 mod 3; q = " + std::to_string(r.finfo.q));
    if (c.get("A") != "0") config_error("NotMordellCurve", "cubic experiments need A = 0");
  }
  ffec_curve* e = nullptr;
  check(ffec_curve_new(f, c.get("A").c_str(), c.get("B").c_str(), &e));
  r.curve.reset(e);
  check(ffec_curve_get_info(e, &r.cinfo));
  if (r.cinfo.inf_type == 1)
    r.warnings.push_back("multiplicative reduction at infinity: conductor exponent 1 assumed there");
  ffec_policy* p = nullptr;
  check(ffec_policy_new(c.get("bad_prime_policy").c_str(), &p));
  r.policy.reset(p);
  for (const auto& [k, v] : c.kv) {
    if (k.rfind("local_factor.", 0) != 0) continue;
    std::vector<int64_t> fs;
    std::stringstream ss(v);
    std::string t;
    while (std::getline(ss, t, ',')) {
      try {
        fs.push_back(std::stoll(trim(t)));
      } catch (...) {
        config_error("ParseError", k + " is not an integer list");
      }
    }
    check(ffec_policy_set_factor(p, k.substr(13).c_str(), fs.data(), fs.size()));
  }
  r.jobs = (int)c.integer("jobs", 1, 1024);
}

void dispatch(Run& r) {
  const std::string& e = r.cfg.get("experiment");
  if (e == "identities") run_identities(r);
  else if (e == "sizes") run_sizes(r);
  else if (e == "trace-avg") run_trace_avg(r);
  else if (e == "one-level") run_one_level(r);
  else if (e == "lambda-moments") run_lambda_moments(r);
  else if (e == "conjecture") run_conjecture(r);
  else run_dump_lpoly(r);
}

void write_file(const fs::path& p, const std::string& data) {
  std::ofstream o(p, std::ios::binary);
  o << data;
  if (!o) throw Failure{kInternal, "Internal", "cannot write " + p.string()};
}

json manifest(const Run& r, int code, double wall) {
  json cfg = json::object();
  for (const auto& [k, v] : r.cfg.kv) cfg[k] = v;
  json j;
  j["tool"] = "ffec-lab";
  j["version"] = ffec_version();
  j["config"] = cfg;
  if (r.field) {
    char* mod = nullptr;
    std::vector<int> mc;
    if (ffec_field_modulus(r.field.get(), &mod) == FFEC_OK) {
      std::stringstream ss(take(mod));
      std::string t;
      while (std::getline(ss, t, ',')) mc.push_back(std::stoi(t));
    }
    j["field"] = {{"p", r.finfo.p},
                  {"m", r.finfo.m},
                  {"q", r.finfo.q},
                  {"modulus", mc},
                  {"g", r.finfo.g},
                  {"omega", r.finfo.has_mu3 ? json(r.finfo.omega) : json(nullptr)},
                  {"omega_rule", "g^((q-1)/3)"}};
  }
  if (r.curve) {
    char* d = nullptr;
    std::string delta = ffec_curve_delta(r.curve.get(), &d) == FFEC_OK ? take(d) : "";
    j["curve"] = {{"A", r.cfg.get("A")}, {"B", r.cfg.get("B")}, {"Delta", delta}, {"n_frak", r.cinfo.n_frak}};
  }
  j["bad_prime_policy"] = r.policy ? ffec_policy_kind(r.policy.get()) : r.cfg.kv.count("bad_prime_policy") ? r.cfg.kv.at("bad_prime_policy") : "";
  j["warnings"] = r.warnings;
  json outs = json::array();
  for (const auto& o : r.outputs) outs.push_back(o.name);
  j["outputs"] = outs;
  j["assertion_failures"] = r.assertion_failures;
  j["exit_code"] = code;
  j["wall_time_s"] = wall;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on L-functions of elliptic curves over F_q(T)"};
  std::string config_path, out_dir;
  int jobs = 0;
  app.add_option("config", config_path, "key = value config file, or a manifest.json to re-run")->required();
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--jobs", jobs, "worker threads (overrides the config)")->check(CLI::Range(1, 1024));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  const auto t0 = std::chrono::steady_clock::now();
  Run r;
  int code = kOk;
  Failure failure{kOk, "", ""};
  fs::path out;
  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) config_error("ParseError", "cannot read " + config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    auto kv = parse_config_text(buf.str());
    // settle the output directory first so config errors still leave error.json
    if (!out_dir.empty()) kv["out"] = out_dir;
    out = kv.count("out") ? kv.at("out") : "ffec-out";
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
      const fs::path bad = out;
      out.clear();
      config_error("InvalidArgument", "cannot create " + bad.string() + ": " + ec.message());
    }
    r.cfg = normalize(std::move(kv), jobs);
    setup(r);
    dispatch(r);
    for (const auto& o : r.outputs) write_file(out / o.name, o.data);
    if (!r.assertion_failures.empty()) code = kAssert;
  } catch (const Failure& f) {
    failure = f;
    code = f.exit;
  } catch (const std::exception& e) {
    failure = {kInternal, "Internal", e.what()};
    code = kInternal;
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& a : r.assertion_failures) std::cerr << "ffec-lab: assertion failed: " << a << "\n";
  if (code != kOk && !failure.status.empty()) std::cerr << "ffec-lab: error: " << failure.message << "\n";
  if (!out.empty()) {
    try {
      json m = manifest(r, code, wall);
      if (!failure.status.empty()) {
        json err = {{"status", failure.status}, {"message", failure.message}, {"exit_code", code}};
        m["error"] = err;
        write_file(out / "error.json", err.dump(2) + "\n");
      }
      write_file(out / "manifest.json", m.dump(2) + "\n");
    } catch (const std::exception& e) {
      std::cerr << "ffec-lab: cannot write manifest: " << e.what() << "\n";
      if (code == kOk) code = kInternal;
    } catch (const Failure& f) {
      std::cerr << "ffec-lab: " << f.message << "\n";
      if (code == kOk) code = kInternal;
    }
  }
  return code;
}
