#include <cstdio>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace {

const std::string kCli = VARICHECK_CLI_PATH;
const std::string kFixtures = VARICHECK_FIXTURES_DIR;

struct CliRun {
  int exit_code = -1;
  std::string output;
};

CliRun run(const std::string& args) {
  CliRun result;
  std::string cmd = kCli + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof buf, pipe))
    result.output.append(buf, got);
  int status = pclose(pipe);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  return result;
}

}  // namespace

TEST_CASE("exit 0: classical checks pass on an extremal") {
  CliRun r = run("analyze " + kFixtures + "/ex5_3.toml --classical");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("Satisfied") != std::string::npos);
}

TEST_CASE("exit 2: violated necessary condition with witness") {
  CliRun r = run("analyze " + kFixtures +
                 "/ex5_1.toml --theorem 4.2 --lambda 0.5 --eta 2 --interval 0 1");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("Violated") != std::string::npos);
  CHECK(r.output.find("-24") != std::string::npos);
}

TEST_CASE("exit 3: all requested checks inapplicable") {
  CliRun r = run("analyze " + kFixtures +
                 "/ex5_4.toml --theorem 4.3 --eta 1,1 --interval 0 1");
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("NotApplicable") != std::string::npos);
}

TEST_CASE("exit 1: usage and IO errors") {
  CHECK(run("analyze /does/not/exist.toml --classical").exit_code == 1);
  CHECK(run("analyze " + kFixtures + "/ex5_3.toml").exit_code == 1);
  CHECK(run("analyze " + kFixtures + "/ex5_3.toml --theorem 4.2 --eta 1").exit_code ==
        1);  // missing --interval
}

TEST_CASE("strong point condition via the CLI") {
  CliRun r = run("analyze " + kFixtures +
                 "/ex5_3.toml --theorem 3.3 --theta 1 --side - --eta 1");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("3.3(ii)") != std::string::npos);
  CHECK(r.output.find("(3.20)") != std::string::npos);

  CliRun na = run("analyze " + kFixtures +
                  "/ex5_3.toml --theorem 3.3 --theta 0.2 --side + --eta 1 --part i");
  CHECK(na.exit_code == 3);  // Legendre form 6(1-t) is nonzero at 0.2
  CHECK(na.output.find("3.3(i)") != std::string::npos);
}

TEST_CASE("oracle subcommand emits the coefficient table") {
  CliRun r = run("oracle " + kFixtures +
                 "/ex5_3.toml --prop 2.2 --theta 0.5 --lambda 0.5 --xi 1 --side +");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("proposition 2.2") != std::string::npos);
  CHECK(r.output.find("pass") != std::string::npos);
}

TEST_CASE("json output is stable across identical invocations") {
  std::string args = "analyze " + kFixtures +
                     "/ex5_1.toml --theorem 4.2 --mode weak --lambda 0.5 --eta 2 "
                     "--interval 0 1 --delta 1 --grid 9 --lambda-grid 9 --json";
  CliRun a = run(args);
  CliRun b = run(args);
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
  auto parsed = nlohmann::json::parse(a.output);
  CHECK(parsed["schema"] == "varicheck-report/1");
  CHECK(parsed["checks"][0]["mode"] == "weak");
}
