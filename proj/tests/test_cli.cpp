#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "singsys/config.hpp"
#include "singsys/io.hpp"

using namespace singsys;
namespace fs = std::filesystem;

namespace {

const char* kReference = R"(# symmetric lambda = 1 problem
p = 2
q = 2
alpha1 = -0.5
alpha2 = 1.5
beta1 = 1.5
beta2 = -0.5
lambda = 1
domain = interval 0 1
n = 129
C = 1.025
delta_exp = -250
margin = 0.125
)";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("singsys_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

int run(const std::string& args) {
  const std::string cmd = std::string(SINGSYS_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::set<std::string> listing(const fs::path& dir) {
  std::set<std::string> names;
  if (!fs::exists(dir)) return names;
  for (const auto& e : fs::directory_iterator(dir)) names.insert(e.path().filename().string());
  return names;
}

ErrorKind kind_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::ParseError;
}

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig cfg = parse_config(kReference);
  CHECK(cfg.params.lambda == 1.0);
  CHECK(cfg.domain.n == 129);
  CHECK(cfg.builder.C == 1.025);
  CHECK(cfg.builder.margin == 0.125);
  CHECK(cfg.builder.delta_strip == doctest::Approx(0.1));  // default
  CHECK(cfg.has_margin);
  CHECK_FALSE(cfg.has_delta_strip);

  const RunConfig box = parse_config(replace(kReference, "interval 0 1", "box 0 1 0 2"));
  CHECK(box.domain.dimension == 2);
  CHECK(box.domain.by == 2.0);

  CHECK(kind_of(replace(kReference, "alpha1 = -0.5", "alpha1 = 0.2")) == ErrorKind::HypothesisViolation);
  CHECK(message_of(replace(kReference, "alpha1 = -0.5", "alpha1 = 0.2")).find("h1") != std::string::npos);
  CHECK(message_of(replace(kReference, "alpha2 = 1.5", "alpha2 = 0.5")).find("h2") != std::string::npos);

  const std::string unknown = message_of(replace(kReference, "n = 129", "nodes = 129"));
  CHECK(unknown.find("line 10") != std::string::npos);
  CHECK(unknown.find("nodes") != std::string::npos);
  CHECK(message_of(std::string(kReference) + "p = 3\n").find("duplicate") != std::string::npos);
  CHECK(message_of(replace(kReference, "\nlambda = 1\n", "\n")).find("lambda") != std::string::npos);
  CHECK(kind_of(replace(kReference, "p = 2", "p = two")) == ErrorKind::ParseError);
  CHECK(kind_of(replace(kReference, "interval 0 1", "disc 0 1")) == ErrorKind::ParseError);
  CHECK(kind_of(replace(kReference, "n = 129", "n = 2")) == ErrorKind::ParseError);
  CHECK(kind_of(replace(kReference, "C = 1.025", "C = 0.5")) == ErrorKind::InvalidConfig);
}

TEST_CASE("number formatting and JSON output") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(2.0) == "2");
  Json j;
  j["a"] = 1.0 / 3.0;
  j["b"] = std::nan("");
  j["c"] = Json::array({1, 2});
  j["d"] = "x";
  const std::string out = dump_json(j);
  CHECK(out.find("\"a\": 0.33333333333333331") != std::string::npos);
  CHECK(out.find("\"b\": null") != std::string::npos);
  CHECK(Json::parse(out)["c"][1] == 2);
  CHECK(out.find("\"a\"") < out.find("\"d\""));  // insertion order
}

TEST_CASE("field CSV round trip") {
  const Mesh m = build_box(0, 1, 0, 2, 5, 7);
  Field f(m.size());
  for (Eigen::Index k = 0; k < m.size(); ++k) f[k] = std::sin(1.0 + k) / 3.0;
  const std::string text = field_csv(m, f);
  CHECK(text.rfind("x,y,value\n", 0) == 0);
  const Field g = read_field_csv(text, m);
  CHECK((f - g).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(read_field_csv(text, build_box(0, 1, 0, 1, 5, 7)), Error);
  CHECK_THROWS_AS(read_field_csv("x,value\n0,1\n", build_interval(0, 1, 3)), Error);
}

TEST_CASE("singsys solve writes six files deterministically") {
  const fs::path dir = scratch("solve");
  write(dir / "ref.cfg", kReference);
  REQUIRE(run("solve --config " + (dir / "ref.cfg").string() + " --out " + (dir / "a").string()) == 0);
  CHECK(listing(dir / "a") == std::set<std::string>{"u.csv", "v.csv", "trace.csv", "certificate.json",
                                                    "report.json", "phi.csv"});
  REQUIRE(run("solve --config " + (dir / "ref.cfg").string() + " --out " + (dir / "b").string()) == 0);
  for (const char* f : {"u.csv", "certificate.json", "report.json"})
    CHECK(read_file((dir / "a" / f).string()) == read_file((dir / "b" / f).string()));

  const Json cert = Json::parse(read_file((dir / "a" / "certificate.json").string()));
  CHECK(cert["passes"]["all"] == true);
  const Json report = Json::parse(read_file((dir / "a" / "report.json").string()));
  CHECK(report["status"] == "certified");

  // Re-certifying the written solution succeeds.
  CHECK(run("certify --config " + (dir / "ref.cfg").string() + " --in " + (dir / "a").string() +
            " --out " + (dir / "c").string()) == 0);
  CHECK(listing(dir / "c") == std::set<std::string>{"certificate.json"});
}

TEST_CASE("singsys exit codes") {
  const fs::path dir = scratch("codes");
  write(dir / "bad.cfg", replace(kReference, "\nlambda = 1", "\nlambda: 1"));
  CHECK(run("solve --config " + (dir / "bad.cfg").string() + " --out " + (dir / "bad").string()) == 1);
  CHECK_FALSE(fs::exists(dir / "bad"));

  write(dir / "h1.cfg", replace(kReference, "beta2 = -0.5", "beta2 = -1.5"));
  CHECK(run("solve --config " + (dir / "h1.cfg").string() + " --out " + (dir / "h1").string()) == 1);
  CHECK_FALSE(fs::exists(dir / "h1"));
  CHECK(run("solve --bogus") == 1);
  CHECK(run("solve --config " + (dir / "missing.cfg").string()) == 1);

  write(dir / "wide.cfg", std::string(kReference) + "delta_strip = 0.49\n");
  CHECK(run("solve --config " + (dir / "wide.cfg").string() + " --out " + (dir / "wide").string()) == 2);
  CHECK(listing(dir / "wide") == std::set<std::string>{"report.json", "phi.csv"});

  write(dir / "slow.cfg", std::string(kReference) + "max_outer = 1\n");
  CHECK(run("solve --config " + (dir / "slow.cfg").string() + " --out " + (dir / "slow").string()) == 3);
  CHECK(listing(dir / "slow") == std::set<std::string>{"report.json", "phi.csv", "trace.csv"});
}

TEST_CASE("singsys helper subcommands") {
  const fs::path dir = scratch("helpers");
  CHECK(run("eigen --p 2 --n 65 --out " + (dir / "phi.csv").string()) == 0);
  CHECK(fs::exists(dir / "phi.csv"));
  CHECK(run("solve-scalar --p 3 --rhs const:1 --n 65 --out " + (dir / "u.csv").string()) == 0);
  const Field u = read_field_csv(read_file((dir / "u.csv").string()), build_interval(0, 1, 65));
  CHECK(u.maxCoeff() == doctest::Approx(2.0 / 3.0 * std::pow(0.5, 1.5)).epsilon(1e-2));
  CHECK(run("solve-scalar --p 2 --rhs cubic:1 --out " + (dir / "x.csv").string()) == 1);

  write(dir / "ref.cfg", kReference);
  CHECK(run("build-barriers --config " + (dir / "ref.cfg").string() + " --n 65 --out " +
            (dir / "bar").string()) == 0);
  CHECK(listing(dir / "bar") ==
        std::set<std::string>{"u_low.csv", "v_low.csv", "u_high.csv", "v_high.csv", "report.json"});
  fs::remove_all(dir.parent_path());
}
