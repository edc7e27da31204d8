#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path work = fs::temp_directory_path() / "aggrestab_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(AGGRESTAB_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config(const std::string& name, const std::string& body) {
  fs::create_directories(work);
  const fs::path p = work / name;
  std::ofstream(p) << body;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("exit codes") {
  fs::remove_all(work);
  const std::string out = (work / "out").string();
  CHECK(run("validate-kernel --config " + config("green.cfg", "grid.n=128\n") + " --out " + out) == 0);
  CHECK(run("validate-kernel --config " +
            config("gauss.cfg", "grid.n=128\nkernel.type=gaussian\nanalysis.assumptions=mass_neutral\n") +
            " --out " + out) == 2);
  CHECK(run("analyze --config " + config("bad.cfg", "grid.n=12x\n")) == 64);
  CHECK(run("analyze --config " + (work / "missing.cfg").string()) == 74);
  CHECK(run("analyze") == 64);
  CHECK(run("") == 64);
  CHECK(run("launch --config x") == 64);
  CHECK(run("analyze --config " + config("g2.cfg", "grid.n=64\n") + " --jobs 0") == 64);
  CHECK(run("threshold --config " + config("zero.cfg", "grid.n=64\nkernel.type=zero\n") + " --out " + out) == 2);
  CHECK(run("mild-solve --config " +
            config("sing.cfg", "grid.n=64\nkernel.type=power_law\nkernel.alpha=0.5\nkernel.delta=0\n") + " --out " +
            out) == 5);
  CHECK(run("mild-solve --config " +
            config("force.cfg",
                   "grid.n=64\nsim.initial=constant_plus_mode:1,0.5,1\nanalysis.mild_T=1\n"
                   "analysis.mild_iterations=3\nanalysis.mild_tol=1e-300\n") +
            " --out " + out) == 4);
  CHECK(slurp(work / "out" / "picard.csv").find("3,") != std::string::npos);
  CHECK(run("simulate --config " +
            config("cfl.cfg", "grid.n=64\nsim.initial=constant_plus_mode:1,0.5,1\nsim.dt=0.5\n") + " --out " + out) ==
        3);
  CHECK(run("simulate --config " + config("dir.cfg", "grid.n=16\nsim.t_end=0.001\n") + " --out /proc/forbidden") ==
        74);
}

TEST_CASE("output directory from the config and seed override") {
  const fs::path dir = work / "from_config";
  CHECK(run("analyze --config " + config("od.cfg", "grid.n=32\noutput.dir=" + dir.string() + "\n")) == 0);
  CHECK(fs::exists(dir / "stability_report.csv"));

  const std::string cfg = config("seed.cfg", "grid.n=32\nsim.initial=constant_plus_mode:1,0.1,1\nsim.t_end=0.01\n");
  CHECK(run("simulate --config " + cfg + " --out " + (work / "s1").string()) == 0);
  CHECK(run("simulate --config " + cfg + " --out " + (work / "s2").string()) == 0);
  CHECK(slurp(work / "s1" / "trajectory.csv") == slurp(work / "s2" / "trajectory.csv"));
  CHECK(std::system(("AGGRESTAB_SEED=nope " + std::string(AGGRESTAB_CLI) + " analyze --config " + cfg +
                     " --out " + (work / "s3").string() + " >/dev/null 2>&1")
                        .c_str()) != 0);
  fs::remove_all(work);
}
