#include "singsys/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace singsys {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  std::ostringstream os;
  os << "line " << line << ": " << msg;
  throw Error(ErrorKind::ParseError, os.str());
}

bool to_number(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> words;
  for (std::string w; is >> w;) words.push_back(w);
  return words;
}

}  // namespace

Mesh DomainSpec::build() const {
  return dimension == 1 ? build_interval(ax, bx, n) : build_box(ax, bx, ay, by, n, n);
}

std::string DomainSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (dimension == 1)
    os << "interval " << ax << " " << bx;
  else
    os << "box " << ax << " " << bx << " " << ay << " " << by;
  return os.str();
}

DomainSpec parse_domain(const std::string& text) {
  const auto words = split_words(text);
  DomainSpec d;
  auto num = [&](std::size_t i) {
    double v = 0.0;
    if (!to_number(words[i], v)) throw Error(ErrorKind::ParseError, "bad number '" + words[i] + "' in domain");
    return v;
  };
  if (words.size() == 3 && words[0] == "interval") {
    d.dimension = 1;
    d.ax = num(1);
    d.bx = num(2);
  } else if (words.size() == 5 && words[0] == "box") {
    d.dimension = 2;
    d.ax = num(1);
    d.bx = num(2);
    d.ay = num(3);
    d.by = num(4);
  } else {
    throw Error(ErrorKind::ParseError, "domain must be 'interval a b' or 'box ax bx ay by'");
  }
  return d;
}

void RunConfig::refresh_builder() {
  const BuilderConfig def = BuilderConfig::defaults(params, domain.build());
  if (!has_delta_strip) builder.delta_strip = def.delta_strip;
  if (!has_theta1) builder.theta1 = def.theta1;
  if (!has_theta2) builder.theta2 = def.theta2;
  if (!has_delta_exp) builder.delta_exp = def.delta_exp;
  if (!has_margin) builder.margin = def.margin;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, int> seen;  // key -> line
  std::map<std::string, std::function<void(const std::string&, int)>> setters;

  auto real = [](double& target) {
    return [&target](const std::string& v, int line) {
      if (!to_number(v, target)) parse_fail(line, "expected a number, got '" + v + "'");
    };
  };
  auto flagged = [&real](double& target, bool& flag) {
    return [setter = real(target), &flag](const std::string& v, int line) {
      setter(v, line);
      flag = true;
    };
  };
  auto integer = [](auto& target, long lo) {
    return [&target, lo](const std::string& v, int line) {
      long x = 0;
      const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
      if (ec != std::errc() || ptr != v.data() + v.size()) parse_fail(line, "expected an integer, got '" + v + "'");
      if (x < lo) parse_fail(line, "value " + v + " is below the minimum " + std::to_string(lo));
      target = static_cast<std::decay_t<decltype(target)>>(x);
    };
  };

  setters["p"] = real(cfg.params.p);
  setters["q"] = real(cfg.params.q);
  setters["alpha1"] = real(cfg.params.alpha1);
  setters["alpha2"] = real(cfg.params.alpha2);
  setters["beta1"] = real(cfg.params.beta1);
  setters["beta2"] = real(cfg.params.beta2);
  setters["lambda"] = real(cfg.params.lambda);
  setters["domain"] = [&cfg](const std::string& v, int line) {
    try {
      const Eigen::Index n = cfg.domain.n;
      cfg.domain = parse_domain(v);
      cfg.domain.n = n;
    } catch (const Error& e) {
      parse_fail(line, e.what());
    }
  };
  setters["n"] = integer(cfg.domain.n, 3);
  setters["delta_strip"] = flagged(cfg.builder.delta_strip, cfg.has_delta_strip);
  setters["theta1"] = flagged(cfg.builder.theta1, cfg.has_theta1);
  setters["theta2"] = flagged(cfg.builder.theta2, cfg.has_theta2);
  setters["delta_exp"] = flagged(cfg.builder.delta_exp, cfg.has_delta_exp);
  setters["margin"] = flagged(cfg.builder.margin, cfg.has_margin);
  setters["tol_inner"] = real(cfg.solve.tolerance);
  setters["tol_outer"] = real(cfg.system.tol_outer);
  setters["max_outer"] = integer(cfg.system.max_outer, 1);
  setters["C"] = real(cfg.builder.C);
  setters["C_cap"] = real(cfg.builder.C_cap);

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) parse_fail(line, "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) parse_fail(line, "unknown key '" + key + "'");
    if (value.empty()) parse_fail(line, "missing value for '" + key + "'");
    if (const auto s = seen.find(key); s != seen.end())
      parse_fail(line, "duplicate key '" + key + "' (first set on line " + std::to_string(s->second) + ")");
    seen[key] = line;
    it->second(value, line);
  }

  for (const char* key : {"p", "q", "alpha1", "alpha2", "beta1", "beta2", "lambda"})
    if (!seen.count(key)) parse_fail(line + 1, std::string("missing required key '") + key + "'");

  cfg.params.validate();
  if (!(cfg.solve.tolerance > 0.0)) throw Error(ErrorKind::InvalidConfig, "tol_inner must be positive");
  if (!(cfg.system.tol_outer > 0.0)) throw Error(ErrorKind::InvalidConfig, "tol_outer must be positive");
  if (!(cfg.domain.bx > cfg.domain.ax) || (cfg.domain.dimension == 2 && !(cfg.domain.by > cfg.domain.ay)))
    throw Error(ErrorKind::InvalidMesh, "domain bounds must be increasing");
  cfg.refresh_builder();
  cfg.builder.validate(cfg.params);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

}  // namespace singsys
