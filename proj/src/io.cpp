#include "singsys/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace singsys {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string field_csv(const Mesh& m, const Field& f) {
  if (f.size() != m.size()) throw Error(ErrorKind::InvalidParameter, "field size does not match mesh");
  std::string out = m.dimension() == 1 ? "x,value\n" : "x,y,value\n";
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    out += format_number(m.coord(k, 0));
    if (m.dimension() == 2) out += "," + format_number(m.coord(k, 1));
    out += "," + format_number(f[k]) + "\n";
  }
  return out;
}

Field read_field_csv(const std::string& text, const Mesh& m) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "empty field file");
  const int cols = m.dimension() + 1;
  Field f(m.size());
  Eigen::Index k = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (k >= m.size()) throw Error(ErrorKind::ParseError, "field file has more rows than mesh nodes");
    std::vector<double> vals;
    std::istringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (static_cast<int>(vals.size()) != cols)
      throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                             std::to_string(cols) + " columns");
    for (int a = 0; a < m.dimension(); ++a) {
      if (std::abs(vals[a] - m.coord(k, a)) > 1e-12 * (1.0 + std::abs(m.coord(k, a))))
        throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": node coordinate does not match the mesh");
    }
    f[k++] = vals.back();
  }
  if (k != m.size()) throw Error(ErrorKind::ParseError, "field file has fewer rows than mesh nodes");
  return f;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = "iteration,sup_change,residual_u,residual_v,safeguard\n";
  for (const auto& r : trace) {
    out += std::to_string(r.iteration) + "," + format_number(r.change) + "," +
           format_number(r.residual_u) + "," + format_number(r.residual_v) + "," +
           format_number(r.safeguard) + "\n";
  }
  return out;
}

namespace {

void dump(const Json& j, int indent, std::string& out) {
  const std::string pad(indent * 2, ' ');
  const std::string inner((indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, val] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(key).dump() + ": ";
        dump(val, indent + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump(j[i], indent + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_number(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump(j, 0, out);
  out += "\n";
  return out;
}

Json to_json(const Certificate& c) {
  Json j;
  j["residual_u"] = c.residual_u;
  j["residual_v"] = c.residual_v;
  j["min_u"] = c.min_u;
  j["min_v"] = c.min_v;
  j["sandwich_margin"] = c.sandwich_margin;
  j["r_low_u"] = c.r_low_u;
  j["r_high_u"] = c.r_high_u;
  j["r_low_v"] = c.r_low_v;
  j["r_high_v"] = c.r_high_v;
  j["hardy_u"] = c.hardy_u;
  j["hardy_v"] = c.hardy_v;
  j["gamma_hat"] = c.gamma_hat ? Json(*c.gamma_hat) : Json(nullptr);
  Json passes = Json::object();
  for (const auto& [k, v] : c.passes) passes[k] = v;
  passes["all"] = c.passed();
  j["passes"] = passes;
  return j;
}

Json to_json(const ProblemParams& pp) {
  return Json{{"p", pp.p},           {"q", pp.q},         {"alpha1", pp.alpha1},
              {"alpha2", pp.alpha2}, {"beta1", pp.beta1}, {"beta2", pp.beta2},
              {"lambda", pp.lambda}};
}

Json to_json(const BuilderConfig& cfg) {
  return Json{{"C", cfg.C},           {"delta_strip", cfg.delta_strip}, {"theta1", cfg.theta1},
              {"theta2", cfg.theta2}, {"delta_exp", cfg.delta_exp},     {"margin", cfg.margin},
              {"C_cap", cfg.C_cap}};
}

Json to_json(const BarrierConstants& k) {
  return Json{{"l", k.l},   {"mu", k.mu}, {"rho", k.rho}, {"R", k.R},   {"R_tilde", k.R_tilde},
              {"c1", k.c1}, {"c2", k.c2}, {"c3", k.c3},   {"c4", k.c4}, {"c0", k.c0},
              {"c", k.c},   {"c0_prime", k.c0_prime},     {"c_prime", k.c_prime}};
}

Json to_json(const CheckReport& r) {
  Json arr = Json::array();
  for (const auto& e : r.entries) {
    arr.push_back(Json{{"name", e.name},
                       {"worst_margin", e.worst_margin},
                       {"worst_node", e.worst_node},
                       {"checked", e.checked},
                       {"slack", e.slack},
                       {"diagnostic", e.diagnostic},
                       {"passed", e.passed()}});
  }
  return arr;
}

Json to_json(const std::vector<TuneStep>& history) {
  Json arr = Json::array();
  for (const auto& s : history) {
    arr.push_back(Json{{"C", s.C},
                       {"passed", s.passed},
                       {"worst_margin", s.worst_margin},
                       {"failed_check", s.failed_check}});
  }
  return arr;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace singsys
