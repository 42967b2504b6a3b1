#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "singsys/config.hpp"
#include "singsys/io.hpp"

namespace singsys {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitTuning = 2,
  kExitNonconvergence = 3,
  kExitCertificate = 4,
};

/// Maps an error to the exit code of the stage contract.
int exit_code_for(const Error& e);

/// Files produced by a run, written together at the end so that a failed
/// configuration leaves nothing behind.
struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents

  void add(std::string name, std::string contents);
  void write(const std::string& dir) const;
};

/// Barrier report: tuned config, constants, check margins, tuning history.
Json barrier_report(const BarrierSet& bs, const ProblemParams& pp, const DomainSpec& dom);

/// Hoelder proxy from the fine solution and two coarser solves (n -> n/2,
/// n/4 spacings). Empty when the coarse levels cannot be formed or solved.
std::optional<double> estimate_gamma(const RunConfig& cfg, const Field& u_fine);

/// eigen -> auto-tune -> solve -> certify. Writes u.csv, v.csv, trace.csv,
/// certificate.json, report.json, phi.csv into cfg.out_dir.
int run_pipeline(const RunConfig& cfg, std::ostream& log);

/// Tunes the barriers and writes u_low.csv, v_low.csv, u_high.csv,
/// v_high.csv and report.json.
int run_build_barriers(const RunConfig& cfg, std::ostream& log);

/// Certifies u.csv, v.csv found in in_dir against freshly tuned barriers and
/// writes certificate.json.
int run_certify(const RunConfig& cfg, const std::string& in_dir, std::ostream& log);

}  // namespace singsys
