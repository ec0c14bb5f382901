#include <cmath>
#include <regex>

#include "wgl/errors.hpp"
#include "wgl/experiments.hpp"

namespace wgl {

namespace {

using nlohmann::json;

double to_number(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("bad number \"" + s + "\"");
  }
}

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

cplx complex_from_json(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) return parse_complex(j.get<std::string>());
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_object() && j.contains("re") && j.contains("im") && j["re"].is_number() && j["im"].is_number())
    return {j["re"].get<double>(), j["im"].get<double>()};
  throw ValidationError(std::string(what) + " must be a number, [re, im], {re, im} or a string like \"1+1i\"");
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

std::vector<double> grid_from_json(const json& j, const char* what) {
  if (j.is_string()) return parse_grid(j.get<std::string>());
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array or a grid string");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw ValidationError(std::string(what) + " entries must be numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void check_decreasing(const std::vector<double>& g, const char* what) {
  if (g.empty()) throw ValidationError(std::string(what) + " is empty");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] > 0.0 && g[i] <= 1.0)) throw ValidationError(std::string(what) + " entries must lie in (0, 1]");
    if (i > 0 && !(g[i] < g[i - 1])) throw ValidationError(std::string(what) + " must be strictly decreasing");
  }
}

const char* kind_name(SweepKind k) {
  switch (k) {
    case SweepKind::Coupling: return "coupling";
    case SweepKind::Residual: return "residual";
    case SweepKind::GraphLimit: return "graph-limit";
    case SweepKind::Oracle: return "oracle";
  }
  return "";
}

}  // namespace

double DeltaRule::apply(double epsilon) const {
  return kind == Kind::Power ? std::pow(epsilon, value) : value * epsilon;
}

cplx parse_complex(const std::string& text) {
  std::string t;
  for (char c : text)
    if (c != ' ') t += c;
  static const std::regex re(
      R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?(?:([+-])((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?[ij])?$)");
  static const std::regex im_only(R"(^([+-]?(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)[ij]$)");
  if (auto comma = t.find(','); comma != std::string::npos) {
    if (t.find(',', comma + 1) != std::string::npos || comma == 0 || comma + 1 == t.size())
      throw ValidationError("cannot parse complex number \"" + text + "\"");
    return {to_number(t.substr(0, comma)), to_number(t.substr(comma + 1))};
  }
  std::smatch m;
  if (std::regex_match(t, m, im_only)) {
    std::string s = m[1].str();
    double v = (s.empty() || s == "+") ? 1.0 : s == "-" ? -1.0 : to_number(s);
    return {0.0, v};
  }
  if (!t.empty() && std::regex_match(t, m, re)) {
    double re_part = m[1].matched ? to_number(m[1].str()) : 0.0;
    double im_part = 0.0;
    if (m[2].matched) {
      double mag = m[3].matched ? to_number(m[3].str()) : 1.0;
      im_part = m[2].str() == "-" ? -mag : mag;
    }
    return {re_part, im_part};
  }
  throw ValidationError("cannot parse complex number \"" + text + "\"");
}

std::vector<double> parse_grid(const std::string& text) {
  std::string t = trim(text);
  if (t.rfind("pow2:", 0) == 0) {
    auto rest = t.substr(5);
    auto c = rest.find(':');
    if (c == std::string::npos) throw ValidationError("pow2 grid needs pow2:a:b");
    double a = to_number(rest.substr(0, c)), b = to_number(rest.substr(c + 1));
    if (a != std::floor(a) || b != std::floor(b) || b < a)
      throw ValidationError("pow2:a:b needs integers a <= b");
    std::vector<double> g;
    for (int k = static_cast<int>(a); k <= static_cast<int>(b); ++k) g.push_back(std::ldexp(1.0, -k));
    return g;
  }
  std::vector<double> g;
  std::size_t pos = 0;
  while (pos <= t.size()) {
    auto c = t.find(',', pos);
    auto item = trim(t.substr(pos, c == std::string::npos ? std::string::npos : c - pos));
    if (!item.empty()) g.push_back(to_number(item));
    if (c == std::string::npos) break;
    pos = c + 1;
  }
  return g;
}

DeltaRule parse_delta_rule(const std::string& text) {
  std::string t = trim(text);
  auto sep = t.find_first_of(": =");
  if (sep == std::string::npos) throw ValidationError("delta rule must be \"power:a\" or \"fixed-ratio:r\"");
  std::string head = t.substr(0, sep);
  double v = to_number(trim(t.substr(sep + 1)));
  DeltaRule r;
  if (head == "power")
    r.kind = DeltaRule::Kind::Power;
  else if (head == "fixed-ratio" || head == "ratio")
    r.kind = DeltaRule::Kind::FixedRatio;
  else
    throw ValidationError("unknown delta rule \"" + head + "\"");
  r.value = v;
  return r;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.n < 1) throw ValidationError("n must be >= 1");
  if (cfg.z.imag() == 0.0 && cfg.z.real() >= 0.0) throw ValidationError("z must lie off [0, inf)");
  if (cfg.delta_rule.kind == DeltaRule::Kind::Power && !(cfg.delta_rule.value >= 1.0))
    throw ValidationError("delta rule power a must be >= 1");
  if (cfg.delta_rule.kind == DeltaRule::Kind::FixedRatio &&
      !(cfg.delta_rule.value > 0.0 && cfg.delta_rule.value <= 1.0))
    throw ValidationError("delta rule ratio r must lie in (0, 1]");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0)) throw ValidationError("epsilon must lie in (0, 1]");
  if (cfg.quadrature.order < 4) throw ValidationError("quadrature order must be >= 4");
  if (cfg.quadrature.s_panels < 1 || cfg.quadrature.u_panels < 1)
    throw ValidationError("quadrature panel counts must be positive");
  if (!(cfg.zero_tolerance > 0.0)) throw ValidationError("zero_tolerance must be positive");
  if (cfg.window.kind == WindowPolicy::Kind::DropLeading && cfg.window.drop < 0)
    throw ValidationError("window drop count must be >= 0");
  if (cfg.threads < 0) throw ValidationError("threads must be >= 0");
  if (cfg.kind == SweepKind::Oracle) {
    if (!(cfg.oracle.h_s > 0.0 && cfg.oracle.h_s <= 0.5)) throw ValidationError("oracle h_s must lie in (0, 0.5]");
    if (cfg.oracle.u_cells < 2 || cfg.n >= cfg.oracle.u_cells)
      throw ValidationError("oracle u_cells must exceed n");
    return;
  }
  if (cfg.variable == SweepVariable::Epsilon) {
    check_decreasing(cfg.eps_grid, "eps_grid");
  } else {
    check_decreasing(cfg.delta_grid, "delta_grid");
    if (cfg.delta_grid.front() > cfg.epsilon) throw ValidationError("delta_grid entries must not exceed epsilon");
  }
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "kind", "profile", "z", "n", "sweep", "eps_grid", "delta_rule", "epsilon", "delta_grid", "p", "f1",
      "f2", "quadrature", "window", "zero_tolerance", "oracle", "output", "seed", "threads",
      "profile_spec", "schema_version"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError("unknown config key \"" + key + "\"");

  ExperimentConfig c;
  auto get_int = [&](const json& o, const char* key, int fallback) {
    if (!o.contains(key)) return fallback;
    if (!o[key].is_number_integer()) throw ValidationError(std::string("\"") + key + "\" must be an integer");
    return o[key].get<int>();
  };
  auto get_num = [&](const json& o, const char* key, double fallback) {
    if (!o.contains(key)) return fallback;
    if (!o[key].is_number()) throw ValidationError(std::string("\"") + key + "\" must be a number");
    return o[key].get<double>();
  };

  if (j.contains("kind")) {
    if (!j["kind"].is_string()) throw ValidationError("\"kind\" must be a string");
    auto k = j["kind"].get<std::string>();
    if (k == "coupling") c.kind = SweepKind::Coupling;
    else if (k == "residual") c.kind = SweepKind::Residual;
    else if (k == "graph-limit") c.kind = SweepKind::GraphLimit;
    else if (k == "oracle") c.kind = SweepKind::Oracle;
    else throw ValidationError("unknown kind \"" + k + "\"");
  }
  if (j.contains("profile")) c.profile_spec = j["profile"];
  if (c.profile_spec.is_string())
    c.profile = parse_profile(c.profile_spec.get<std::string>());
  else
    c.profile = profile_from_json(c.profile_spec);
  // an echoed config carries the resolved profile plus the original spelling
  if (j.contains("profile_spec") && j.contains("profile")) c.profile_spec = j["profile_spec"];
  if (j.contains("z")) c.z = complex_from_json(j["z"], "z");
  c.n = get_int(j, "n", c.n);
  if (j.contains("sweep")) {
    if (!j["sweep"].is_string()) throw ValidationError("\"sweep\" must be a string");
    auto v = j["sweep"].get<std::string>();
    if (v == "epsilon") c.variable = SweepVariable::Epsilon;
    else if (v == "delta") c.variable = SweepVariable::Delta;
    else throw ValidationError("\"sweep\" must be \"epsilon\" or \"delta\"");
  }
  if (j.contains("eps_grid")) c.eps_grid = grid_from_json(j["eps_grid"], "eps_grid");
  if (j.contains("delta_grid")) c.delta_grid = grid_from_json(j["delta_grid"], "delta_grid");
  if (j.contains("delta_rule")) {
    const auto& d = j["delta_rule"];
    if (d.is_string()) {
      c.delta_rule = parse_delta_rule(d.get<std::string>());
    } else if (d.is_object() && d.contains("kind") && d["kind"].is_string()) {
      c.delta_rule = parse_delta_rule(d["kind"].get<std::string>() + ":" +
                                      std::to_string(get_num(d, "value", 1.5)));
      c.delta_rule.value = get_num(d, "value", 1.5);
    } else {
      throw ValidationError("\"delta_rule\" must be a string or {kind, value}");
    }
  }
  c.epsilon = get_num(j, "epsilon", c.epsilon);
  if (j.contains("p") && !j["p"].is_null()) {
    if (!j["p"].is_array() || j["p"].size() != 2) throw ValidationError("\"p\" must have two entries");
    c.p = Vec2{{complex_from_json(j["p"][0], "p"), complex_from_json(j["p"][1], "p")}};
  }
  if (j.contains("f1")) c.f1 = SourceFunction::from_json(j["f1"]);
  if (j.contains("f2")) c.f2 = SourceFunction::from_json(j["f2"]);
  if (j.contains("quadrature")) {
    const auto& q = j["quadrature"];
    if (!q.is_object()) throw ValidationError("\"quadrature\" must be an object");
    c.quadrature.s_panels = get_int(q, "s_panels", c.quadrature.s_panels);
    c.quadrature.u_panels = get_int(q, "u_panels", c.quadrature.u_panels);
    c.quadrature.order = get_int(q, "order", c.quadrature.order);
  }
  if (j.contains("window")) {
    const auto& w = j["window"];
    if (!w.is_object() || !w.contains("kind") || !w["kind"].is_string())
      throw ValidationError("\"window\" must be {\"kind\": \"auto\"|\"drop\", ...}");
    auto k = w["kind"].get<std::string>();
    if (k == "auto") c.window.kind = WindowPolicy::Kind::Auto;
    else if (k == "drop") {
      c.window.kind = WindowPolicy::Kind::DropLeading;
      c.window.drop = get_int(w, "count", 0);
    } else throw ValidationError("window kind must be \"auto\" or \"drop\"");
  }
  c.zero_tolerance = get_num(j, "zero_tolerance", c.zero_tolerance);
  if (j.contains("oracle")) {
    const auto& o = j["oracle"];
    if (!o.is_object()) throw ValidationError("\"oracle\" must be an object");
    c.oracle.h_s = get_num(o, "h_s", c.oracle.h_s);
    c.oracle.u_cells = get_int(o, "u_cells", c.oracle.u_cells);
    if (o.contains("refine")) {
      if (!o["refine"].is_boolean()) throw ValidationError("\"oracle.refine\" must be a boolean");
      c.oracle.refine = o["refine"].get<bool>();
    }
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    if (!o.is_object()) throw ValidationError("\"output\" must be an object");
    if (o.contains("csv")) c.csv_path = o["csv"].is_null() ? "" : o["csv"].get<std::string>();
    if (o.contains("json")) c.json_path = o["json"].is_null() ? "" : o["json"].get<std::string>();
    if (c.csv_path == "-") c.csv_path.clear();  // "-" is stdout
    if (c.json_path == "-") c.json_path.clear();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0) throw ValidationError("\"seed\" must be a non-negative integer");
    c.seed = j["seed"].get<unsigned>();
  }
  c.threads = get_int(j, "threads", c.threads);
  validate(c);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["kind"] = kind_name(c.kind);
  j["profile"] = to_json(c.profile);
  j["profile_spec"] = c.profile_spec;
  j["z"] = complex_to_json(c.z);
  j["n"] = c.n;
  j["sweep"] = c.variable == SweepVariable::Epsilon ? "epsilon" : "delta";
  j["eps_grid"] = c.eps_grid;
  j["delta_rule"] = {{"kind", c.delta_rule.kind == DeltaRule::Kind::Power ? "power" : "fixed-ratio"},
                     {"value", c.delta_rule.value}};
  j["epsilon"] = c.epsilon;
  j["delta_grid"] = c.delta_grid;
  j["p"] = c.p ? json::array({complex_to_json((*c.p)[0]), complex_to_json((*c.p)[1])}) : json(nullptr);
  j["f1"] = c.f1.to_json();
  j["f2"] = c.f2.to_json();
  j["quadrature"] = {{"s_panels", c.quadrature.s_panels}, {"u_panels", c.quadrature.u_panels},
                     {"order", c.quadrature.order}};
  j["window"] = c.window.kind == WindowPolicy::Kind::Auto ? json{{"kind", "auto"}}
                                                          : json{{"kind", "drop"}, {"count", c.window.drop}};
  j["zero_tolerance"] = c.zero_tolerance;
  j["oracle"] = {{"h_s", c.oracle.h_s}, {"u_cells", c.oracle.u_cells}, {"refine", c.oracle.refine}};
  j["output"] = {{"csv", c.csv_path}, {"json", c.json_path}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j;
}

}  // namespace wgl
