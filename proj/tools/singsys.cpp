#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "singsys/pipeline.hpp"

using namespace singsys;

namespace {

struct Overrides {
  std::optional<long> n;
  std::optional<double> tol;
};

// --n replaces the mesh resolution, --tol the outer (Picard) tolerance.
RunConfig load_with_overrides(const std::string& path, const std::string& out, const Overrides& o) {
  RunConfig cfg = load_config(path);
  cfg.out_dir = out;
  if (o.n) {
    if (*o.n < 3) throw Error(ErrorKind::InvalidMesh, "--n must be at least 3");
    cfg.domain.n = *o.n;
    cfg.refresh_builder();
    cfg.builder.validate(cfg.params);
  }
  if (o.tol) {
    if (!(*o.tol > 0.0)) throw Error(ErrorKind::InvalidConfig, "--tol must be positive");
    cfg.system.tol_outer = *o.tol;
  }
  return cfg;
}

Field parse_rhs(const std::string& spec, const Mesh& m) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  Field g = Field::Zero(m.size());
  if (kind == "const") {
    const double c = std::stod(args);
    for (Eigen::Index k : m.interior_nodes()) g[k] = c;
    return g;
  }
  if (kind == "power-of-distance") {
    const auto comma = args.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::ParseError, "power-of-distance needs 'k,alpha'");
    const double c = std::stod(args.substr(0, comma));
    const double a = std::stod(args.substr(comma + 1));
    const Field d = distance_field(m);
    for (Eigen::Index k : m.interior_nodes()) g[k] = c * std::pow(d[k], a);
    return g;
  }
  throw Error(ErrorKind::ParseError, "unknown --rhs '" + spec + "' (use const:c or power-of-distance:k,alpha)");
}

void write_single(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  Artifacts art;
  art.add(p.filename().string(), contents);
  art.write(p.has_parent_path() ? p.parent_path().string() : ".");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positive solutions of singular p-Laplacian systems"};
  app.require_subcommand(1);

  std::string config, out, in_dir, domain = "interval 0 1", rhs = "const:1";
  double p = 2.0, tol = 1e-8;
  long n = 129;
  Overrides ov;

  auto* eigen = app.add_subcommand("eigen", "first Dirichlet eigenpair of -Delta_p");
  eigen->add_option("--p", p, "operator exponent")->required();
  eigen->add_option("--n", n, "nodes per axis");
  eigen->add_option("--tol", tol, "eigenvalue tolerance");
  eigen->add_option("--domain", domain, "'interval a b' or 'box ax bx ay by'");
  eigen->add_option("--out", out, "CSV file for phi")->required();

  auto* scalar = app.add_subcommand("solve-scalar", "-Delta_p u = g with zero boundary values");
  scalar->add_option("--p", p, "operator exponent")->required();
  scalar->add_option("--rhs", rhs, "const:c or power-of-distance:k,alpha");
  scalar->add_option("--n", n, "nodes per axis");
  scalar->add_option("--tol", tol, "relative Newton tolerance");
  scalar->add_option("--domain", domain, "'interval a b' or 'box ax bx ay by'");
  scalar->add_option("--out", out, "CSV file for u")->required();

  auto add_config_options = [&](CLI::App* sub, const std::string& default_out) {
    sub->add_option("--config", config, "problem config file")->required();
    sub->add_option("--out", out, "output directory")->default_str(default_out);
    sub->add_option("--n", ov.n, "override nodes per axis");
    sub->add_option("--tol", ov.tol, "override the outer tolerance");
  };
  auto* barriers = app.add_subcommand("build-barriers", "tune C and write the barrier fields");
  add_config_options(barriers, "barriers");
  auto* solve = app.add_subcommand("solve", "full pipeline: eigen, barriers, Picard, certificate");
  add_config_options(solve, "sol");
  auto* cert = app.add_subcommand("certify", "certify u.csv, v.csv of a previous solve");
  add_config_options(cert, "sol");
  cert->add_option("--in", in_dir, "directory holding u.csv and v.csv (default: --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (eigen->parsed()) {
      DomainSpec dom = parse_domain(domain);
      dom.n = n;
      const Mesh m = dom.build();
      const EigenPair ep = first_eigenpair(m, p, tol);
      write_single(out, field_csv(m, ep.phi));
      std::cout << "lambda_1 = " << format_number(ep.lambda) << "\n";
      return kExitOk;
    }
    if (scalar->parsed()) {
      DomainSpec dom = parse_domain(domain);
      dom.n = n;
      const Mesh m = dom.build();
      SolveOptions opts;
      opts.tolerance = tol;
      const Field u = solve_dirichlet(m, p, parse_rhs(rhs, m), opts);
      write_single(out, field_csv(m, u));
      std::cout << "max u = " << format_number(u.maxCoeff()) << "\n";
      return kExitOk;
    }
    if (out.empty()) out = solve->parsed() || cert->parsed() ? "sol" : "barriers";
    const RunConfig cfg = load_with_overrides(config, out, ov);
    if (barriers->parsed()) return run_build_barriers(cfg, std::cerr);
    if (solve->parsed()) return run_pipeline(cfg, std::cerr);
    return run_certify(cfg, in_dir.empty() ? out : in_dir, std::cerr);
  } catch (const Error& e) {
    std::cerr << "singsys: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "singsys: " << e.what() << "\n";
    return kExitUsage;
  }
}
