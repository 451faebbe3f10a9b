#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "oracles.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const auto log = oracle::scratch_dir("cli_out");
  const std::string cmd = std::string(ROOTMLE_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  std::filesystem::remove(log);
  return r;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("fixtures and interval MLE") {
    const Run list = run("fixtures list");
    CHECK(list.code == 0);
    CHECK(list.out.find("study8") != std::string::npos);
    const Run mle = run("mle --fixture study3");
    CHECK(mle.code == 0);
    CHECK(mle.out.find("0.814904") != std::string::npos);
  }

  TEST_CASE("root subcommand") {
    const Run r = run("root --fixture study3 -T 6");
    CHECK(r.code == 0);
    CHECK(r.out.find("no real roots") != std::string::npos);
  }

  TEST_CASE("search, interrupt, resume, analyze") {
    const auto dir = oracle::scratch_dir("cli_store");
    const std::string store = "--store " + dir.string();
    CHECK(run("grid-search --fixture study4 -T 2 --grid-denominators 4,4,4 -q --max-new 5 " + store).code == 0);
    CHECK(run("grid-search --resume " + store + " -q").code == 0);
    const auto plot = oracle::scratch_dir("cli_plot");
    const Run a = run("analyze " + store + " --fixture study4 --emit rank,fig5 --out " + plot.string());
    CHECK(a.code == 0);
    CHECK(std::filesystem::exists(plot));
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(plot);
  }

  TEST_CASE("errors map to exit codes") {
    CHECK(run("analyze --store /nonexistent/rootmle_store").code == 2);
    CHECK(run("mle --fixture nosuch").code == 2);
    CHECK(run("grid-search --bogus-flag").code == 2);
    CHECK(run("").code != 0);
  }
}
