#include "claimsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "claimsim/error.hpp"
#include "util.hpp"

namespace claimsim {

namespace {

namespace pt = boost::property_tree;
using json = nlohmann::ordered_json;

const std::map<std::string, std::vector<std::string>>& schema() {
  static const std::map<std::string, std::vector<std::string>> s = {
      {"experiment",
       {"regime", "replications", "horizons", "seed", "stationary", "burnin",
        "oracle_replications", "lambda_grid", "pilot_clusters", "empirical_tail_samples",
        "exploratory", "keep_raw", "threads"}},
      {"model", {"mechanism", "nu", "include_immigrant_claims", "node_cap"}},
      {"marks", {"coordinates"}},
      {"claim", {"type", "index", "value", "slope", "intercept"}},
      {"cluster",
       {"count", "wait", "count_link_index", "count_link_scale", "wait_link_index",
        "wait_link_scale"}},
      {"hawkes", {"delay", "kappa", "kappa_index", "kappa_scale"}},
      {"subordinator", {"jump", "wait", "s_grid", "ratio_s"}},
      {"tolerances",
       {"ks", "laplace", "quantile_ratio", "significance", "uncorrected_ks", "growth_ratio"}},
  };
  return s;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string suggestion(const std::string& word, const std::vector<std::string>& options) {
  std::string best;
  std::size_t best_d = 3;
  for (const auto& o : options) {
    const auto d = edit_distance(word, o);
    if (d < best_d) {
      best_d = d;
      best = o;
    }
  }
  return best.empty() ? "" : " (did you mean '" + best + "'?)";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

/// Splits on commas outside parentheses.
std::vector<std::string> split_top(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double to_number(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size())
    fail(ErrorKind::Config, what + ": expected a number, got '" + text + "'");
  return v;
}

class Reader {
 public:
  explicit Reader(pt::ptree tree) : tree_(std::move(tree)) { check_keys(); }

  bool has_section(const std::string& s) const { return tree_.get_child_optional(s).has_value(); }

  std::optional<std::string> raw(const std::string& path) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.'))) {
      const auto comment = v->find_first_of(";#");
      return trim(v->substr(0, comment));
    }
    return std::nullopt;
  }

  double number(const std::string& path, double dflt) const {
    auto v = raw(path);
    return v ? to_number(*v, path) : dflt;
  }

  std::uint64_t integer(const std::string& path, std::uint64_t dflt) const {
    auto v = raw(path);
    if (!v) return dflt;
    const double d = to_number(*v, path);
    if (!(d >= 0 && d <= 9007199254740992.0 && std::floor(d) == d))
      fail(ErrorKind::Config, path + ": expected a nonnegative integer, got '" + *v + "'");
    return static_cast<std::uint64_t>(d);
  }

  std::uint64_t u64(const std::string& path, std::uint64_t dflt) const {
    auto v = raw(path);
    if (!v) return dflt;
    std::size_t used = 0;
    std::uint64_t x = 0;
    try {
      if (!v->empty() && (*v)[0] != '-') x = std::stoull(*v, &used, 0);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v->size())
      fail(ErrorKind::Config, path + ": expected an unsigned 64-bit integer, got '" + *v + "'");
    return x;
  }

  bool boolean(const std::string& path, bool dflt) const {
    auto v = raw(path);
    if (!v) return dflt;
    const auto s = lower(*v);
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    fail(ErrorKind::Config, path + ": expected true or false, got '" + *v + "'");
  }

  std::vector<double> numbers(const std::string& path, std::vector<double> dflt) const {
    auto v = raw(path);
    if (!v) return dflt;
    std::vector<double> out;
    for (const auto& item : split_top(*v)) out.push_back(to_number(item, path));
    return out;
  }

  ScalarLaw law(const std::string& path, ScalarLaw dflt) const {
    auto v = raw(path);
    if (!v) return dflt;
    try {
      return parse_law(*v);
    } catch (const Error& e) {
      throw Error(e.kind(), path + ": " + e.what());
    }
  }

 private:
  void check_keys() const {
    const auto& s = schema();
    std::vector<std::string> sections;
    for (const auto& [name, keys] : s) sections.push_back(name);
    for (const auto& [name, child] : tree_) {
      if (child.empty()) fail(ErrorKind::Config, name + ": key outside of any section");
      auto it = s.find(name);
      if (it == s.end())
        fail(ErrorKind::Config, name + ": unknown section" + suggestion(name, sections));
      for (const auto& [key, value] : child) {
        const auto& keys = it->second;
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
          fail(ErrorKind::Config, name + "." + key + ": unknown key" + suggestion(key, keys));
      }
    }
  }

  pt::ptree tree_;
};

std::optional<MarkLink> link(const Reader& r, const std::string& prefix) {
  const auto index = r.raw("cluster." + prefix + "_index");
  const auto scale = r.raw("cluster." + prefix + "_scale");
  if (!index) {
    if (scale)
      fail(ErrorKind::Config, "cluster." + prefix + "_scale: needs cluster." + prefix + "_index");
    return std::nullopt;
  }
  return MarkLink{static_cast<std::size_t>(r.integer("cluster." + prefix + "_index", 0)),
                  r.number("cluster." + prefix + "_scale", 1.0)};
}

ModelSpec read_model(const Reader& r) {
  ModelSpec spec;
  spec.nu = r.number("model.nu", 1.0);
  spec.include_immigrant_claims = r.boolean("model.include_immigrant_claims", true);
  spec.node_cap = r.integer("model.node_cap", kDefaultNodeCap);

  if (auto coords = r.raw("marks.coordinates")) {
    spec.marks.coordinates.clear();
    for (const auto& item : split_top(*coords)) {
      try {
        spec.marks.coordinates.push_back(parse_law(item));
      } catch (const Error& e) {
        throw Error(e.kind(), std::string("marks.coordinates: ") + e.what());
      }
    }
  }

  const std::string type = lower(r.raw("claim.type").value_or("projection"));
  auto unused = [&](const std::string& key) {
    if (r.raw("claim." + key))
      fail(ErrorKind::Config, "claim." + key + ": not used by claim type " + type);
  };
  if (type == "projection") {
    unused("value");
    unused("slope");
    unused("intercept");
    spec.claim = claim::Projection{static_cast<std::size_t>(r.integer("claim.index", 0))};
  } else if (type == "constant") {
    unused("index");
    unused("slope");
    unused("intercept");
    if (!r.raw("claim.value")) fail(ErrorKind::Config, "claim.value: required for type constant");
    spec.claim = claim::Constant{r.number("claim.value", 0)};
  } else if (type == "affine") {
    unused("value");
    spec.claim = claim::Affine{static_cast<std::size_t>(r.integer("claim.index", 0)),
                               r.number("claim.slope", 1.0), r.number("claim.intercept", 0.0)};
  } else {
    fail(ErrorKind::Config, "claim.type: unknown claim type '" + type +
                                "' (expected projection, constant or affine)");
  }

  const std::string mech = lower(r.raw("model.mechanism").value_or("hawkes"));
  if (mech == "hawkes") {
    if (r.has_section("cluster"))
      fail(ErrorKind::Config, "cluster: section only applies to mixed_binomial and renewal");
    Hawkes h;
    if (auto d = r.raw("hawkes.delay")) {
      std::string text = lower(*d);
      text.erase(0, text.find_first_not_of(" \t"));
      if (text.rfind("lomax", 0) == 0) text.replace(0, 5, "pareto");
      ScalarLaw l;
      try {
        l = parse_law(text);
      } catch (const Error& e) {
        fail(e.kind(), "hawkes.delay: " + std::string(e.what()));
      }
      if (auto* e = std::get_if<law::Exponential>(&l)) {
        h.fertility.shape = shape::Exponential{e->rate};
      } else if (auto* p = std::get_if<law::Pareto>(&l)) {
        h.fertility.shape = shape::Lomax{p->alpha, p->scale};
      } else {
        fail(ErrorKind::Config,
             "hawkes.delay: expected exponential(rate) or lomax(alpha, scale), got '" + *d + "'");
      }
    }
    const bool has_const = r.raw("hawkes.kappa").has_value();
    const bool has_prop = r.raw("hawkes.kappa_index").has_value();
    if (has_const && has_prop)
      fail(ErrorKind::Config, "hawkes.kappa_index: conflicts with hawkes.kappa");
    if (!has_prop && r.raw("hawkes.kappa_scale"))
      fail(ErrorKind::Config, "hawkes.kappa_scale: needs hawkes.kappa_index");
    if (has_prop) {
      h.fertility.kappa =
          fertility::Proportional{static_cast<std::size_t>(r.integer("hawkes.kappa_index", 0)),
                                  r.number("hawkes.kappa_scale", 1.0)};
    } else {
      h.fertility.kappa = fertility::Constant{r.number("hawkes.kappa", 0.0)};
    }
    spec.mechanism = h;
  } else if (mech == "mixed_binomial" || mech == "renewal") {
    if (r.has_section("hawkes"))
      fail(ErrorKind::Config, "hawkes: section only applies to mechanism = hawkes");
    const ScalarLaw count = r.law("cluster.count", law::Poisson{1});
    const ScalarLaw wait = r.law("cluster.wait", law::Exponential{1});
    if (mech == "renewal") {
      spec.mechanism = Renewal{count, wait, link(r, "count_link"), link(r, "wait_link")};
    } else {
      spec.mechanism = MixedBinomial{count, wait, link(r, "count_link"), link(r, "wait_link")};
    }
  } else {
    fail(ErrorKind::Config, "model.mechanism: unknown mechanism '" + mech + "'" +
                                suggestion(mech, {"hawkes", "mixed_binomial", "renewal"}));
  }

  try {
    validate(spec);
  } catch (const Error& e) {
    std::string where = "model";
    if (e.kind() == ErrorKind::Supercritical)
      where = r.raw("hawkes.kappa_index") ? "hawkes.kappa_scale" : "hawkes.kappa";
    throw Error(e.kind(), where + ": " + e.what());
  }
  return spec;
}

ExperimentConfig read_config(const Reader& r) {
  ExperimentConfig c;
  c.regime = [&] {
    auto v = r.raw("experiment.regime");
    if (!v) fail(ErrorKind::Config, "experiment.regime: required");
    try {
      return parse_regime(*v);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string("experiment.regime: ") + e.what());
    }
  }();
  c.spec = read_model(r);

  std::vector<double> horizons{500.0, 2000.0};
  if (c.regime == Regime::Counterexample) horizons = {1e3, 1e4, 1e5};
  if (c.regime == Regime::Subordinator) horizons = {1e4};
  c.horizons = r.numbers("experiment.horizons", horizons);
  c.replications = r.integer("experiment.replications", 10000);
  c.master_seed = r.u64("experiment.seed", 1);
  c.stationary = r.boolean("experiment.stationary", false);
  c.burnin = r.number("experiment.burnin", 0.0);
  c.oracle_replications = r.integer("experiment.oracle_replications", 0);
  c.lambda_grid = r.numbers("experiment.lambda_grid", c.lambda_grid);
  c.pilot_clusters = r.integer("experiment.pilot_clusters", c.pilot_clusters);
  c.empirical_tail_samples =
      r.integer("experiment.empirical_tail_samples", c.empirical_tail_samples);
  c.exploratory = r.boolean("experiment.exploratory", false);
  c.keep_raw = r.boolean("experiment.keep_raw", false);
  c.threads = static_cast<unsigned>(r.integer("experiment.threads", 1));

  c.subordinator.y = r.law("subordinator.jump", c.subordinator.y);
  c.subordinator.w = r.law("subordinator.wait", c.subordinator.w);
  c.subordinator.s_grid = r.numbers("subordinator.s_grid", c.subordinator.s_grid);
  c.subordinator.ratio_s = r.number("subordinator.ratio_s", c.subordinator.ratio_s);

  c.tol.ks = r.number("tolerances.ks", c.tol.ks);
  c.tol.laplace = r.number("tolerances.laplace", c.tol.laplace);
  c.tol.quantile_ratio = r.number("tolerances.quantile_ratio", c.tol.quantile_ratio);
  c.tol.significance = r.number("tolerances.significance", c.tol.significance);
  c.tol.uncorrected_ks = r.number("tolerances.uncorrected_ks", c.tol.uncorrected_ks);
  c.tol.growth_ratio = r.number("tolerances.growth_ratio", c.tol.growth_ratio);

  try {
    validate(c);
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("experiment: ") + e.what());
  }
  return c;
}

ExperimentConfig parse_stream(std::istream& is, const std::string& origin) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::Config,
         origin + ":" + std::to_string(e.line()) + ": malformed config: " + e.message());
  }
  return read_config(Reader(std::move(tree)));
}

json link_json(const std::optional<MarkLink>& l) {
  if (!l) return nullptr;
  return json{{"index", l->index}, {"scale", l->scale}};
}

}  // namespace

ScalarLaw parse_law(const std::string& text) {
  const std::string s = trim(text);
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')')
    fail(ErrorKind::Config, "expected a law like name(p1, p2), got '" + text + "'");
  const std::string name = lower(trim(s.substr(0, open)));
  std::vector<double> p;
  const std::string inner = trim(s.substr(open + 1, s.size() - open - 2));
  if (!inner.empty())
    for (const auto& item : split_top(inner)) p.push_back(to_number(item, "law " + name));
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (p.size() < lo || p.size() > hi)
      fail(ErrorKind::Config, "law " + name + " takes " + std::to_string(lo) +
                                  (hi > lo ? " or " + std::to_string(hi) : "") +
                                  " parameters, got " + std::to_string(p.size()));
  };
  ScalarLaw law;
  if (name == "constant") {
    arity(1, 1);
    law = law::Constant{p[0]};
  } else if (name == "exponential") {
    arity(1, 1);
    law = law::Exponential{p[0]};
  } else if (name == "lomax") {
    fail(ErrorKind::Config, "lomax is a delay shape only (hawkes.delay); use pareto for scalar laws");
  } else if (name == "pareto") {
    arity(1, 2);
    law = law::Pareto{p[0], p.size() > 1 ? p[1] : 1.0};
  } else if (name == "lognormal") {
    arity(2, 2);
    law = law::LogNormal{p[0], p[1]};
  } else if (name == "poisson") {
    arity(1, 1);
    law = law::Poisson{p[0]};
  } else if (name == "geometric") {
    arity(1, 1);
    law = law::Geometric{p[0]};
  } else if (name == "borel") {
    arity(1, 1);
    law = law::Borel{p[0]};
  } else {
    fail(ErrorKind::Config,
         "unknown law '" + name + "'" +
             suggestion(name, {"constant", "exponential", "pareto", "lognormal",
                               "poisson", "geometric", "borel"}));
  }
  validate(law);
  return law;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, path + ": cannot open config file");
  return parse_stream(in, path);
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_stream(in, "<text>");
}

json to_json(const ModelSpec& spec) {
  json j;
  j["nu"] = spec.nu;
  json marks = json::array();
  for (const auto& l : spec.marks.coordinates) marks.push_back(to_string(l));
  j["marks"] = marks;
  j["claim"] = to_string(spec.claim);
  json m;
  m["name"] = mechanism_name(spec.mechanism);
  std::visit(detail::overloaded{
                 [&](const MixedBinomial& b) {
                   m["count"] = to_string(b.count);
                   m["wait"] = to_string(b.wait);
                   m["count_link"] = link_json(b.count_link);
                   m["wait_link"] = link_json(b.wait_link);
                 },
                 [&](const Renewal& b) {
                   m["count"] = to_string(b.count);
                   m["wait"] = to_string(b.wait);
                   m["count_link"] = link_json(b.count_link);
                   m["wait_link"] = link_json(b.wait_link);
                 },
                 [&](const Hawkes& h) {
                   m["delay"] = to_string(h.fertility.shape);
                   std::visit(detail::overloaded{
                                  [&](const fertility::Constant& k) { m["kappa"] = k.kappa; },
                                  [&](const fertility::Proportional& k) {
                                    m["kappa"] = json{{"index", k.index}, {"scale", k.scale}};
                                  },
                              },
                              h.fertility.kappa);
                 },
             },
             spec.mechanism);
  j["mechanism"] = m;
  j["include_immigrant_claims"] = spec.include_immigrant_claims;
  j["node_cap"] = spec.node_cap;
  return j;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["regime"] = to_string(c.regime);
  j["model"] = to_json(c.spec);
  j["horizons"] = c.horizons;
  j["replications"] = c.replications;
  j["seed"] = c.master_seed;
  j["stationary"] = c.stationary;
  j["burnin"] = c.burnin;
  j["oracle_replications"] = c.oracle_replications;
  j["lambda_grid"] = c.lambda_grid;
  j["pilot_clusters"] = c.pilot_clusters;
  j["empirical_tail_samples"] = c.empirical_tail_samples;
  j["subordinator"] = {{"jump", to_string(c.subordinator.y)},
                       {"wait", to_string(c.subordinator.w)},
                       {"s_grid", c.subordinator.s_grid},
                       {"ratio_s", c.subordinator.ratio_s}};
  j["tolerances"] = {{"ks", c.tol.ks},
                     {"laplace", c.tol.laplace},
                     {"quantile_ratio", c.tol.quantile_ratio},
                     {"significance", c.tol.significance},
                     {"uncorrected_ks", c.tol.uncorrected_ks},
                     {"growth_ratio", c.tol.growth_ratio}};
  j["exploratory"] = c.exploratory;
  j["keep_raw"] = c.keep_raw;
  j["threads"] = c.threads;
  return j;
}

}  // namespace claimsim
