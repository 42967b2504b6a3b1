#include "singsys/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

namespace singsys {

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::TuningFailure:
    case ErrorKind::BarrierFailure:
      return kExitTuning;
    case ErrorKind::Nonconvergence:
    case ErrorKind::SolverFailure:
    case ErrorKind::DomainError:
      return kExitNonconvergence;
    default:
      return kExitUsage;
  }
}

void Artifacts::add(std::string name, std::string contents) {
  files.emplace_back(std::move(name), std::move(contents));
}

void Artifacts::write(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& [name, contents] : files) {
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidParameter, "cannot write '" + path.string() + "'");
    out << contents;
  }
}

Json barrier_report(const BarrierSet& bs, const ProblemParams& pp, const DomainSpec& dom) {
  Json j;
  j["params"] = to_json(pp);
  j["domain"] = dom.describe();
  j["n"] = dom.n;
  j["C"] = bs.config.C;
  j["config"] = to_json(bs.config);
  j["eigen"] = Json{{"lambda_p", bs.phi_p.lambda},
                    {"lambda_q", bs.phi_q.lambda},
                    {"lambda_p_dilated", bs.phit_p.lambda},
                    {"lambda_q_dilated", bs.phit_q.lambda}};
  j["constants"] = to_json(bs.constants);
  j["checks"] = Json{{"sub", to_json(bs.sub_report)},
                     {"super", to_json(bs.super_report)},
                     {"order", to_json(bs.order_report)}};
  j["tuning_history"] = to_json(bs.history);
  j["notes"] = Json::array(
      {"super_second is checked with the second-equation right-hand side "
       "u_high^alpha2 + lambda v_high^beta2; the printed chain for the second supersolution "
       "inequality repeats the first-equation terms lambda u_high^alpha1 + v_high^beta1"});
  return j;
}

namespace {

Json tuning_failure_report(const TuningFailure& e, const RunConfig& cfg) {
  Json j;
  j["params"] = to_json(cfg.params);
  j["domain"] = cfg.domain.describe();
  j["n"] = cfg.domain.n;
  j["status"] = "tuning-failure";
  j["message"] = e.what();
  j["config"] = to_json(cfg.builder);
  j["tuning_history"] = to_json(e.history());
  j["last_checks"] = to_json(e.last_report());
  return j;
}

void report_error(std::ostream& log, const Error& e) {
  log << "singsys: " << to_string(e.kind()) << ": " << e.what() << "\n";
}

}  // namespace

std::optional<double> estimate_gamma(const RunConfig& cfg, const Field& u_fine) {
  const Eigen::Index n = cfg.domain.n;
  if ((n - 1) % 4 != 0 || (n - 1) / 4 < 8) return std::nullopt;
  std::vector<std::pair<Mesh, Field>> levels;
  try {
    for (Eigen::Index div : {4, 2}) {
      RunConfig coarse = cfg;
      coarse.domain.n = (n - 1) / div + 1;
      const Mesh m = coarse.domain.build();
      const BarrierSet bs = auto_tune_C(m, coarse.params, coarse.builder, coarse.solve);
      SystemOptions sys = coarse.system;
      sys.observer = nullptr;
      levels.emplace_back(m, solve_system(bs, coarse.params, coarse.solve, sys).u);
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  levels.emplace_back(cfg.domain.build(), u_fine);
  return holder_exponent_estimate(levels);
}

int run_pipeline(const RunConfig& cfg, std::ostream& log) {
  Artifacts art;
  int code = kExitOk;
  try {
    const Mesh m = cfg.domain.build();
    const BarrierBasis basis = prepare_basis(m, cfg.params, cfg.builder, cfg.solve);
    art.add("phi.csv", field_csv(m, basis.phi_p.phi));
    log << "lambda_1 (p = " << cfg.params.p << ") = " << format_number(basis.phi_p.lambda) << "\n";

    BarrierSet bs;
    try {
      bs = auto_tune_C(basis, cfg.params, cfg.builder, cfg.solve);
    } catch (const TuningFailure& e) {
      report_error(log, e);
      art.add("report.json", dump_json(tuning_failure_report(e, cfg)));
      art.write(cfg.out_dir);
      return kExitTuning;
    }
    log << "tuned C = " << format_number(bs.config.C) << "\n";
    Json report = barrier_report(bs, cfg.params, cfg.domain);

    SystemSolution sol;
    try {
      sol = solve_system(bs, cfg.params, cfg.solve, cfg.system);
    } catch (const NonconvergenceFailure& e) {
      report_error(log, e);
      report["status"] = "nonconvergence";
      report["message"] = e.what();
      art.add("trace.csv", trace_csv(e.trace()));
      art.add("report.json", dump_json(report));
      art.write(cfg.out_dir);
      return kExitNonconvergence;
    }
    log << "Picard converged in " << sol.trace.size() << " iterations\n";

    const Certificate cert = certify_solution(sol.u, sol.v, bs, cfg.params, CertifyOptions{},
                                              estimate_gamma(cfg, sol.u));
    code = cert.passed() ? kExitOk : kExitCertificate;
    report["status"] = cert.passed() ? "certified" : "certificate-failure";
    report["safeguard_active"] = sol.safeguard_active;

    art.add("u.csv", field_csv(m, sol.u));
    art.add("v.csv", field_csv(m, sol.v));
    art.add("trace.csv", trace_csv(sol.trace));
    art.add("certificate.json", dump_json(to_json(cert)));
    art.add("report.json", dump_json(report));
    if (!cert.passed()) log << "singsys: certificate failed\n";
  } catch (const Error& e) {
    report_error(log, e);
    code = exit_code_for(e);
    if (code == kExitUsage) return code;  // nothing written on usage errors
  }
  art.write(cfg.out_dir);
  return code;
}

int run_build_barriers(const RunConfig& cfg, std::ostream& log) {
  try {
    const Mesh m = cfg.domain.build();
    BarrierSet bs;
    try {
      bs = auto_tune_C(m, cfg.params, cfg.builder, cfg.solve);
    } catch (const TuningFailure& e) {
      report_error(log, e);
      Artifacts art;
      art.add("report.json", dump_json(tuning_failure_report(e, cfg)));
      art.write(cfg.out_dir);
      return kExitTuning;
    }
    Artifacts art;
    art.add("u_low.csv", field_csv(m, bs.u_low));
    art.add("v_low.csv", field_csv(m, bs.v_low));
    art.add("u_high.csv", field_csv(m, bs.u_high));
    art.add("v_high.csv", field_csv(m, bs.v_high));
    art.add("report.json", dump_json(barrier_report(bs, cfg.params, cfg.domain)));
    art.write(cfg.out_dir);
    log << "tuned C = " << format_number(bs.config.C) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    report_error(log, e);
    return exit_code_for(e);
  }
}

int run_certify(const RunConfig& cfg, const std::string& in_dir, std::ostream& log) {
  namespace fs = std::filesystem;
  try {
    const Mesh m = cfg.domain.build();
    const Field u = read_field_csv(read_file((fs::path(in_dir) / "u.csv").string()), m);
    const Field v = read_field_csv(read_file((fs::path(in_dir) / "v.csv").string()), m);
    const BarrierSet bs = auto_tune_C(m, cfg.params, cfg.builder, cfg.solve);
    const Certificate cert = certify_solution(u, v, bs, cfg.params, CertifyOptions{}, estimate_gamma(cfg, u));
    Artifacts art;
    art.add("certificate.json", dump_json(to_json(cert)));
    art.write(cfg.out_dir);
    if (!cert.passed()) {
      log << "singsys: certificate failed\n";
      return kExitCertificate;
    }
    return kExitOk;
  } catch (const Error& e) {
    report_error(log, e);
    return exit_code_for(e);
  }
}

}  // namespace singsys
