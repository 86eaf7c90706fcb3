#include "ncfree/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ncfree/dsl.hpp"

namespace ncfree {

namespace {

enum class Type { integer, real, boolean, string, list };

const std::map<std::string, Type>& schema() {
  static const std::map<std::string, Type> s = {
      {"experiment.kind", Type::string},         {"experiment.seed", Type::integer},
      {"experiment.id", Type::integer},          {"experiment.workers", Type::integer},
      {"experiment.quadrature_order", Type::integer},
      {"observable.expr", Type::string},         {"observable.d", Type::integer},
      {"observable.q", Type::integer},           {"observable.f_list", Type::list},
      {"observable.P_list", Type::list},
      {"ensemble.class", Type::string},          {"ensemble.offdiag_law", Type::string},
      {"ensemble.diag_law", Type::string},       {"ensemble.diag_variance", Type::real},
      {"ensemble.symmetry", Type::string},
      {"grid.N_list", Type::list},               {"grid.y_list", Type::list},
      {"grid.t_list", Type::list},               {"grid.samples", Type::integer},
      {"surrogate.N_surrogate", Type::integer},  {"surrogate.samples", Type::integer},
      {"surrogate.method", Type::string},
      {"vectors.x", Type::string},               {"vectors.y", Type::string},
      {"verdict.slope_target", Type::real},      {"verdict.slope_tolerance", Type::real},
      {"thermalization.C", Type::string},        {"thermalization.B", Type::string},
      {"thermalization.tail_t_list", Type::list}, {"thermalization.t_check", Type::real},
      {"thermalization.tail_factor", Type::real}, {"thermalization.seed_repeats", Type::integer},
      {"freeness.beta", Type::real},             {"freeness.max_pattern", Type::integer},
      {"freeness.degenerate_level", Type::real}, {"freeness.ratio", Type::real},
  };
  return s;
}

bool is_matrix_key(const std::string& key) {
  if (key.rfind("matrices.A", 0) != 0 || key.size() <= 10) return false;
  for (std::size_t k = 10; k < key.size(); ++k)
    if (key[k] < '0' || key[k] > '9') return false;
  return true;
}

class ValueParser {
 public:
  ValueParser(std::string_view s, std::string where) : s_(s), where_(std::move(where)) {}

  ConfigValue run() {
    ConfigValue v = value();
    ws();
    if (p_ != s_.size()) fail("trailing characters");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(where_ + ": " + msg); }
  void ws() {
    while (p_ < s_.size() && (s_[p_] == ' ' || s_[p_] == '\t')) ++p_;
  }

  ConfigValue value() {
    ws();
    if (p_ >= s_.size()) fail("missing value");
    const char c = s_[p_];
    if (c == '[') {
      ++p_;
      ConfigValue::List items;
      ws();
      if (p_ < s_.size() && s_[p_] == ']') {
        ++p_;
        return {items};
      }
      for (;;) {
        items.push_back(value());
        ws();
        if (p_ < s_.size() && s_[p_] == ',') {
          ++p_;
          continue;
        }
        if (p_ < s_.size() && s_[p_] == ']') {
          ++p_;
          return {items};
        }
        fail("expected ',' or ']' in list");
      }
    }
    if (c == '"') {
      ++p_;
      std::string out;
      while (p_ < s_.size() && s_[p_] != '"') {
        if (s_[p_] == '\\' && p_ + 1 < s_.size()) ++p_;
        out += s_[p_++];
      }
      if (p_ >= s_.size()) fail("unterminated string");
      ++p_;
      return {out};
    }
    if (s_.substr(p_, 4) == "true") {
      p_ += 4;
      return {true};
    }
    if (s_.substr(p_, 5) == "false") {
      p_ += 5;
      return {false};
    }
    std::size_t end = p_;
    while (end < s_.size() && std::string_view("+-.0123456789eE").find(s_[end]) != std::string_view::npos) ++end;
    const std::string_view tok = s_.substr(p_, end - p_);
    if (tok.empty()) fail("unrecognised value");
    long long iv = 0;
    auto ri = std::from_chars(tok.data() + (tok[0] == '+' ? 1 : 0), tok.data() + tok.size(), iv);
    if (ri.ec == std::errc{} && ri.ptr == tok.data() + tok.size()) {
      p_ = end;
      return {iv};
    }
    double dv = 0.0;
    auto rd = std::from_chars(tok.data() + (tok[0] == '+' ? 1 : 0), tok.data() + tok.size(), dv);
    if (rd.ec != std::errc{} || rd.ptr != tok.data() + tok.size()) fail("malformed number '" + std::string(tok) + "'");
    p_ = end;
    return {dv};
  }

  std::string_view s_;
  std::string where_;
  std::size_t p_ = 0;
};

void check_type(const std::string& key, const ConfigValue& v, Type t) {
  const bool ok = [&] {
    switch (t) {
      case Type::integer:
        return std::holds_alternative<long long>(v.v);
      case Type::real:
        return std::holds_alternative<long long>(v.v) || std::holds_alternative<double>(v.v);
      case Type::boolean:
        return std::holds_alternative<bool>(v.v);
      case Type::string:
        return std::holds_alternative<std::string>(v.v);
      case Type::list:
        return v.is_list();
    }
    return false;
  }();
  if (!ok) throw ConfigError(key + ": wrong value type");
}

double as_double(const std::string& key, const ConfigValue& v) {
  if (const auto* i = std::get_if<long long>(&v.v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v.v)) return *d;
  throw ConfigError(key + ": expected a number");
}

FourierSum fourier_from(const std::string& key, const ConfigValue& v) {
  if (const auto* s = std::get_if<std::string>(&v.v)) {
    if (*s == "id") return FourierSum::identity_function();
    throw ConfigError(key + ": expected \"id\" or a list of [re, im, y] triples");
  }
  if (!v.is_list()) throw ConfigError(key + ": expected \"id\" or a list of [re, im, y] triples");
  std::vector<FourierAtom> atoms;
  for (const auto& t : std::get<ConfigValue::List>(v.v)) {
    if (!t.is_list() || std::get<ConfigValue::List>(t.v).size() != 3) throw ConfigError(key + ": atoms are [re, im, y] triples");
    const auto& l = std::get<ConfigValue::List>(t.v);
    atoms.push_back({cplx{as_double(key, l[0]), as_double(key, l[1])}, as_double(key, l[2])});
  }
  return FourierSum::from_atoms(std::move(atoms));
}

}  // namespace

std::string ConfigValue::to_text() const {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, long long>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return "\"" + x + "\"";
        } else {
          std::string s = "[";
          for (std::size_t k = 0; k < x.size(); ++k) s += (k ? ", " : "") + x[k].to_text();
          return s + "]";
        }
      },
      v);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

RunConfig RunConfig::parse(std::string_view text, const std::string& source) {
  RunConfig cfg;
  cfg.text_ = std::string(text);
  cfg.hash_ = fnv1a(text);
  std::string section;
  std::istringstream is(cfg.text_);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    std::size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos || line[a] == '#') continue;
    std::size_t b = line.find_last_not_of(" \t\r");
    std::string body = line.substr(a, b - a + 1);
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + ": malformed section header");
      section = body.substr(1, body.size() - 2);
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    std::string key = body.substr(0, eq);
    key.erase(key.find_last_not_of(" \t") + 1);
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (section.empty()) throw ConfigError(where + ": key '" + key + "' outside any section");
    const std::string full = section + "." + key;
    if (cfg.values_.count(full)) throw ConfigError(where + ": duplicate key " + full);
    cfg.values_[full] = ValueParser(std::string_view(body).substr(eq + 1), where + " (" + full + ")").run();
  }
  return cfg;
}

void RunConfig::set(const std::string& key, ConfigValue v) { values_[key] = std::move(v); }

void RunConfig::set_default(const std::string& key, ConfigValue v) {
  if (!has(key)) values_[key] = std::move(v);
}

const ConfigValue& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key " + key);
  return it->second;
}

long long RunConfig::get_int(const std::string& key) const {
  const auto& v = get(key);
  if (const auto* i = std::get_if<long long>(&v.v)) return *i;
  throw ConfigError(key + ": expected an integer");
}

double RunConfig::get_double(const std::string& key) const { return as_double(key, get(key)); }

bool RunConfig::get_bool(const std::string& key) const {
  const auto& v = get(key);
  if (const auto* b = std::get_if<bool>(&v.v)) return *b;
  throw ConfigError(key + ": expected a boolean");
}

std::string RunConfig::get_string(const std::string& key) const {
  const auto& v = get(key);
  if (const auto* s = std::get_if<std::string>(&v.v)) return *s;
  throw ConfigError(key + ": expected a string");
}

std::vector<long long> RunConfig::get_int_list(const std::string& key) const {
  const auto& v = get(key);
  if (!v.is_list()) throw ConfigError(key + ": expected a list");
  std::vector<long long> out;
  for (const auto& x : std::get<ConfigValue::List>(v.v)) {
    const auto* i = std::get_if<long long>(&x.v);
    if (i == nullptr) throw ConfigError(key + ": expected a list of integers");
    out.push_back(*i);
  }
  return out;
}

std::vector<double> RunConfig::get_double_list(const std::string& key) const {
  const auto& v = get(key);
  if (!v.is_list()) throw ConfigError(key + ": expected a list");
  std::vector<double> out;
  for (const auto& x : std::get<ConfigValue::List>(v.v)) out.push_back(as_double(key, x));
  return out;
}

std::vector<std::string> RunConfig::get_string_list(const std::string& key) const {
  const auto& v = get(key);
  if (!v.is_list()) throw ConfigError(key + ": expected a list");
  std::vector<std::string> out;
  for (const auto& x : std::get<ConfigValue::List>(v.v)) {
    const auto* s = std::get_if<std::string>(&x.v);
    if (s == nullptr) throw ConfigError(key + ": expected a list of strings");
    out.push_back(*s);
  }
  return out;
}

RunConfig validate_config(RunConfig cfg) {
  for (const auto& [key, v] : cfg.values()) {
    if (is_matrix_key(key)) {
      check_type(key, v, Type::string);
      continue;
    }
    auto it = schema().find(key);
    if (it == schema().end()) throw ConfigError("unknown key " + key);
    check_type(key, v, it->second);
  }
  cfg.set_default("experiment.seed", {1LL});
  cfg.set_default("experiment.id", {0LL});
  cfg.set_default("experiment.workers", {1LL});
  cfg.set_default("experiment.quadrature_order", {21LL});
  cfg.set_default("grid.samples", {200LL});
  cfg.set_default("grid.y_list", {ConfigValue::List{ConfigValue{1LL}}});
  cfg.set_default("ensemble.class", {std::string("gue")});
  cfg.set_default("surrogate.N_surrogate", {256LL});
  cfg.set_default("surrogate.samples", {200LL});
  cfg.set_default("surrogate.method", {std::string("monte_carlo")});
  cfg.set_default("vectors.x", {std::string("flat")});
  cfg.set_default("vectors.y", {std::string("flat")});
  cfg.set_default("verdict.slope_target", {-1.0});
  cfg.set_default("verdict.slope_tolerance", {0.25});
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return validate_config(RunConfig::parse(ss.str(), path));
}

ExperimentConfig experiment_config(const RunConfig& rc) {
  ExperimentConfig cfg;
  const std::string kind = rc.has("experiment.kind") ? rc.get_string("experiment.kind") : "";
  cfg.seed = static_cast<std::uint64_t>(rc.get_int("experiment.seed"));
  cfg.experiment_id = static_cast<std::uint32_t>(rc.get_int("experiment.id"));
  cfg.workers = static_cast<unsigned>(std::max(1LL, rc.get_int("experiment.workers")));
  cfg.quadrature_order = static_cast<int>(rc.get_int("experiment.quadrature_order"));
  cfg.N_list.clear();
  for (long long n : rc.get_int_list("grid.N_list")) cfg.N_list.push_back(static_cast<int>(n));
  cfg.y_list = rc.get_double_list("grid.y_list");
  if (rc.has("grid.t_list")) cfg.t_list = rc.get_double_list("grid.t_list");
  cfg.samples = static_cast<long>(rc.get_int("grid.samples"));

  const std::string cls = rc.get_string("ensemble.class");
  if (cls == "gue") {
    cfg.ensemble = EnsembleTemplate::gue();
  } else if (cls == "goe") {
    cfg.ensemble = EnsembleTemplate::goe();
  } else if (cls == "wigner") {
    cfg.ensemble.cls = EnsembleClass::wigner;
    const std::string sym = rc.has("ensemble.symmetry") ? rc.get_string("ensemble.symmetry") : "symmetric";
    if (sym != "symmetric" && sym != "hermitian") throw ConfigError("ensemble.symmetry: expected symmetric or hermitian");
    cfg.ensemble.symmetry = sym == "hermitian" ? Symmetry::hermitian : Symmetry::symmetric;
    cfg.ensemble.offdiag = EntryLaw::from_name(rc.has("ensemble.offdiag_law") ? rc.get_string("ensemble.offdiag_law") : "gaussian");
    cfg.ensemble.diag = EntryLaw::from_name(rc.has("ensemble.diag_law") ? rc.get_string("ensemble.diag_law") : cfg.ensemble.offdiag.name());
    cfg.ensemble.diag_variance = rc.has("ensemble.diag_variance") ? rc.get_double("ensemble.diag_variance")
                                 : cfg.ensemble.symmetry == Symmetry::symmetric ? 2.0 : 1.0;
  } else {
    throw ConfigError("ensemble.class: expected gue, goe or wigner");
  }

  cfg.N_surrogate = static_cast<int>(rc.get_int("surrogate.N_surrogate"));
  cfg.surrogate_samples = static_cast<long>(rc.get_int("surrogate.samples"));
  const std::string method = rc.get_string("surrogate.method");
  if (method == "monte_carlo") {
    cfg.surrogate_method = SurrogateMethod::monte_carlo;
  } else if (method == "schwinger_dyson") {
    cfg.surrogate_method = SurrogateMethod::schwinger_dyson;
  } else {
    throw ConfigError("surrogate.method: expected monte_carlo or schwinger_dyson");
  }

  for (int j = 1;; ++j) {
    const std::string key = "matrices.A" + std::to_string(j);
    if (!rc.has(key)) break;
    cfg.A_specs.push_back(rc.get_string(key));
  }
  for (const auto& [key, v] : rc.values())
    if (is_matrix_key(key) && std::stoul(key.substr(10)) > cfg.A_specs.size())
      throw ConfigError(key + ": matrices must be numbered A1, A2, ... without gaps");

  const int q_default = static_cast<int>(cfg.A_specs.size());
  const int d = rc.has("observable.d") ? static_cast<int>(rc.get_int("observable.d")) : 1;
  const int q = rc.has("observable.q") ? static_cast<int>(rc.get_int("observable.q")) : q_default;
  if (rc.has("observable.f_list") || rc.has("observable.P_list")) {
    const auto& fl = std::get<ConfigValue::List>(rc.get("observable.f_list").v);
    const auto Pl = rc.get_string_list("observable.P_list");
    std::vector<FourierSum> f;
    std::vector<NcExpr> P;
    for (const auto& v : fl) f.push_back(fourier_from("observable.f_list", v));
    for (const auto& s : Pl) P.push_back(parse(s, d, q));
    cfg.observable = product_form(f, P);
    cfg.observable_text = to_text(cfg.observable);
  } else {
    cfg.observable_text = rc.get_string("observable.expr");
    cfg.observable = parse(cfg.observable_text, d, q);
  }

  cfg.x_spec = rc.get_string("vectors.x");
  cfg.y_spec = rc.get_string("vectors.y");
  cfg.slope_target = rc.get_double("verdict.slope_target");
  cfg.slope_tolerance = rc.get_double("verdict.slope_tolerance");

  if (rc.has("thermalization.C")) cfg.C_spec = rc.get_string("thermalization.C");
  if (rc.has("thermalization.B")) cfg.B_spec = rc.get_string("thermalization.B");
  if (rc.has("thermalization.tail_t_list")) cfg.tail_t_list = rc.get_double_list("thermalization.tail_t_list");
  if (rc.has("thermalization.t_check")) cfg.t_check = rc.get_double("thermalization.t_check");
  if (rc.has("thermalization.tail_factor")) cfg.tail_factor = rc.get_double("thermalization.tail_factor");
  if (rc.has("thermalization.seed_repeats")) cfg.seed_repeats = static_cast<int>(rc.get_int("thermalization.seed_repeats"));
  if (rc.has("freeness.beta")) cfg.beta = rc.get_double("freeness.beta");
  if (rc.has("freeness.max_pattern")) cfg.max_pattern = static_cast<int>(rc.get_int("freeness.max_pattern"));
  if (rc.has("freeness.degenerate_level")) cfg.degenerate_level = rc.get_double("freeness.degenerate_level");
  if (rc.has("freeness.ratio")) cfg.freeness_ratio = rc.get_double("freeness.ratio");

  if (kind == "thermalize" && cfg.t_list.empty()) throw ConfigError("missing required key grid.t_list");
  if (kind == "thermalize" && cfg.tail_t_list.empty()) throw ConfigError("missing required key thermalization.tail_t_list");
  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

}  // namespace ncfree
