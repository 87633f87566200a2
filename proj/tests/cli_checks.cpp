// Black-box checks of the command line tool: exit codes, emitted files and
// cross-thread determinism. Usage: cli_checks <path-to-cli>.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "skewdiff/io.hpp"

namespace fs = std::filesystem;
using namespace skewdiff;

namespace {

int g_failures = 0;
std::string g_cli;
fs::path g_dir;

int run(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " >" + (g_dir / "out.txt").string() + " 2>" +
                          (g_dir / "err.txt").string();
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void expect(bool ok, const std::string& what) {
  if (!ok) ++g_failures;
  std::printf("%s: %s\n", ok ? "ok" : "FAIL", what.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_checks <cli-binary>\n");
    return 2;
  }
  g_cli = argv[1];
  g_dir = fs::temp_directory_path() / "skewdiff-cli-checks";
  fs::remove_all(g_dir);
  fs::create_directories(g_dir);

  const auto path_of = [&](const char* name) { return (g_dir / name).string(); };
  save_json(path_of("brownian.json"), config_to_json(fixtures::brownian()));
  save_json(path_of("skew07.json"), config_to_json(fixtures::skew(0.7)));
  save_json(path_of("bessel05.json"), config_to_json(fixtures::bessel(0.5)));
  save_json(path_of("bessel15.json"), config_to_json(fixtures::bessel(1.5)));
  save_json(path_of("counterexample.json"), config_to_json(fixtures::counterexample()));
  save_json(path_of("gd.json"), config_to_json(fixtures::geometric_decay()));
  save_json(path_of("layered.json"), layers_to_json(fixtures::layered()));
  std::ofstream(g_dir / "garbled.json") << "{oops";

  // Conclusive classification: exit 0 plus report and manifest.
  const auto out1 = (g_dir / "o1").string();
  expect(run("classify " + path_of("brownian.json") + " --out " + out1) == 0,
         "classify conclusive exits 0");
  const json rep = load_json_file(out1 + "/report.json");
  expect(rep.at("verdicts").at("recurrent") == "true", "report verdict recorded");
  const json man = load_json_file(out1 + "/manifest.json");
  expect(man.at("command") == "classify", "manifest written beside the report");

  // Inconclusive classification: exit 2.
  expect(run("classify " + path_of("bessel05.json") + " --out " + (g_dir / "o2").string()) == 2,
         "classify inconclusive exits 2");
  expect(run("classify " + path_of("brownian.json") + " --n0 3") != 0,
         "n0 outside {1,2,5} is rejected");

  // Validation failures: exit 1.
  expect(run("classify " + path_of("garbled.json")) == 1, "malformed input exits 1");
  expect(run("classify " + path_of("missing.json")) == 1, "missing file exits 1");

  // No scale function: exit 3.
  expect(run("scale " + path_of("bessel15.json") + " --out " + (g_dir / "o3").string()) == 3,
         "scale without variation conditions exits 3");
  expect(slurp(g_dir / "err.txt").find("no scale function") != std::string::npos,
         "scale refusal names the reason");

  // Scale queries write CSV tables.
  const auto out4 = (g_dir / "o4").string();
  expect(run("scale " + path_of("skew07.json") + " --table 0.5 2.5 4 --hitting 1.0 0.5 2.5" +
             " --invariant --out " + out4) == 0,
         "scale queries exit 0");
  expect(slurp(out4 + "/scale.csv").rfind("x,h,h_prime\n", 0) == 0, "scale.csv layout");
  expect(slurp(out4 + "/hitting.csv").find("0.25") != std::string::npos,
         "hitting.csv carries (h(x)-h(a))/(h(b)-h(a))");
  expect(slurp(g_dir / "out.txt").find("invariant") != std::string::npos,
         "infinite-mass media report no invariant law");

  // Explosive media: refused without the censoring flag, exit 4.
  const auto out5 = (g_dir / "o5").string();
  expect(run("simulate " + path_of("counterexample.json") +
             " --seed 5 --paths 20 --t 2 --x-max 1000 --out " + out5) == 4,
         "explosive simulation refused with exit 4");
  expect(slurp(g_dir / "err.txt").find("refused") != std::string::npos,
         "refusal message emitted");
  expect(run("simulate " + path_of("counterexample.json") +
             " --seed 5 --paths 20 --t 2 --x-max 1000 --allow-explosive --out " + out5) == 0,
         "censoring acknowledged exits 0");
  expect(fs::exists(out5 + "/paths.csv") && fs::exists(out5 + "/manifest.json"),
         "simulation emits paths.csv and manifest.json");

  // Seed is mandatory on simulation commands.
  expect(run("simulate " + path_of("brownian.json") + " --paths 5") != 0,
         "missing --seed is rejected");
  expect(run("mc hit " + path_of("brownian.json") + " --x 1 --a 0.5 --b 2.5 --paths 50") != 0,
         "missing --seed rejected on estimators");

  // Estimator: JSON estimate with the analytic target.
  const auto out6 = (g_dir / "o6").string();
  expect(run("mc hit " + path_of("skew07.json") +
             " --x 1.0 --a 0.5 --b 2.5 --paths 400 --seed 11 --threads 4 --out " + out6) == 0,
         "mc hit exits 0");
  const json est = load_json_file(out6 + "/estimate.json");
  expect(std::abs(est.at("analytic_target").get<double>() - 0.25) < 1e-12,
         "estimate.json records the analytic target");
  expect(est.contains("std_error") && est.contains("n_effective"), "estimate.json layout");

  // Determinism: byte-identical paths.csv across thread counts.
  std::string bytes1;
  bool det = true;
  for (int threads : {1, 4, 8}) {
    const auto outd = (g_dir / ("od" + std::to_string(threads))).string();
    const int code = run("simulate " + path_of("gd.json") +
                         " --scheme exact --seed 99 --paths 32 --t 0.5 --dt 0.001" +
                         " --full --stride 10 --threads " + std::to_string(threads) +
                         " --out " + outd);
    det = det && code == 0;
    const std::string b = slurp(outd + "/paths.csv");
    if (threads == 1) {
      bytes1 = b;
      det = det && !b.empty();
    } else {
      det = det && b == bytes1;
    }
  }
  expect(det, "paths.csv byte-identical at threads 1/4/8");

  // Layered commands.
  const auto out7 = (g_dir / "o7").string();
  expect(run("layered classify " + path_of("layered.json") + " --out " + out7) == 0,
         "layered classify exits 0");
  const json lrep = load_json_file(out7 + "/layered_report.json");
  expect(lrep.at("verdicts").at("positive_recurrent") == "true",
         "layered report verdicts recorded");
  const auto out8 = (g_dir / "o8").string();
  expect(run("layered dispersion " + path_of("layered.json") +
             " --seed 12 --paths 200 --t 0.5 --stride 100 --out " + out8) == 0,
         "layered dispersion exits 0");
  expect(slurp(out8 + "/dispersion.csv").rfind("t,mean,var,se_mean,se_var\n", 0) == 0,
         "dispersion.csv layout");
  const auto out9 = (g_dir / "o9").string();
  expect(run("layered simulate " + path_of("layered.json") +
             " --seed 13 --paths 3 --t 0.05 --stride 10 --out " + out9) == 0,
         "layered simulate exits 0");
  expect(slurp(out9 + "/joint_paths.csv").rfind("path_id,t,x,y,censored\n", 0) == 0,
         "joint_paths.csv layout");

  std::printf("%s: %d checks failed\n", g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures);
  return g_failures == 0 ? 0 : 1;
}
