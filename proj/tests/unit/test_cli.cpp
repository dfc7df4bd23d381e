#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("cmfact_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  fs::path out = scratch() / "stdout.txt";
  std::string cmd = std::string(CMFACT_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  return r;
}

}  // namespace

TEST_CASE("exit statuses") {
  CHECK(run("classical-gz --d1 -43 --d2 -163").status == 0);
  CHECK(run("classical-gz --d1 -43 --d2 -67").status == 2);
  CHECK(run("no-such-command").status == 64);
  CHECK(run("classical-gz --frobnicate").status == 64);
  CHECK(run("classical-gz --precision 0").status == 64);
  CHECK(run("classical-gz --d2 -9").status == 64);
  CHECK(run("").status == 64);
  CHECK(run("--help").status == 0);
}

TEST_CASE("classical-gz prints the factored product") {
  Run r = run("classical-gz --d1 -43 --d2 -163");
  CHECK(r.out.find("2^38 * 3^12 * 5^6 * 7^6 * 37^2 * 433^2") != std::string::npos);
}

TEST_CASE("shimura-rhs support") {
  Run r = run("shimura-rhs --d1 -43 --d2 -163 --p 2 --q 3");
  CHECK(r.status == 0);
  CHECK(r.out.find("2^2 * 29^2 * 257^2 * 277^2 / 73^2 * 137^2 * 241^2") != std::string::npos);
}

TEST_CASE("report files are byte-for-byte reproducible") {
  fs::path a = scratch() / "a.json", b = scratch() / "b.json";
  CHECK(run("identity-check --workers 1 --report " + a.string()).status == 0);
  CHECK(run("identity-check --workers 3 --report " + b.string()).status == 0);
  std::string ja = slurp(a);
  CHECK(ja == slurp(b));
  CHECK(ja.find("\"schemaVersion\": \"1.0\"") != std::string::npos);
}

TEST_CASE("config file supplies defaults and flags win") {
  fs::path cfg = scratch() / "run.toml";
  std::ofstream(cfg) << "precision = 8\nd2 = -67\n";
  Run r = run("identity-check --json --config " + cfg.string() + " --d2 -163");
  CHECK(r.status == 0);
  CHECK(r.out.find("\"d2\": -163") != std::string::npos);
  CHECK(r.out.find("\"precision\": 8") != std::string::npos);
}
