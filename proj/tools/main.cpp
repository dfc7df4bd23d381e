#include "harness.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

using namespace cmfact;
using namespace cmfact::harness;

int main(int argc, char** argv) {
  CLI::App app{"Verification harness for CM value factorizations over real quadratic fields"};
  app.set_config("--config", "", "TOML or INI file with default flag values; command-line flags win");

  std::string command_text;
  RunConfig cfg;
  int n_max = 0;
  std::string report;
  bool json_stdout = false;

  app.add_option("command", command_text,
                 "classical-gz | shimura-rhs | theta-lhs | identity-check | census | selftest")
      ->required();
  app.add_option("--d1", cfg.d1, "First fundamental discriminant (negative)")->capture_default_str();
  app.add_option("--d2", cfg.d2, "Second fundamental discriminant (negative)")->capture_default_str();
  app.add_option("--p", cfg.p, "Split prime for the p-adic side")->capture_default_str();
  app.add_option("--q", cfg.q, "Prime ramified in the definite quaternion algebra")->capture_default_str();
  app.add_option("--precision", cfg.precision, "p-adic working precision K")->capture_default_str();
  app.add_option("--n-max", n_max, "Number of trace levels (default 5 for p = 2, else 3)");
  app.add_option("--report", report, "Write the JSON report to this path");
  app.add_option("--seed", cfg.seed, "Seed for randomized self-test cases")->capture_default_str();
  app.add_option("--workers", cfg.workers, "Worker threads, 0 for one per core")->capture_default_str();
  app.add_flag("--timing", cfg.timing, "Include wall-clock time in the JSON report");
  app.add_flag("--json", json_stdout, "Print the JSON report instead of the table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageExit;
  }

  auto command = parse_command(command_text);
  if (!command) {
    std::cerr << "unknown command: " << command_text << "\n" << app.help();
    return kUsageExit;
  }
  if (app.count("--n-max")) cfg.n_max = n_max;
  if (!report.empty()) cfg.report_path = report;

  VerificationReport result;
  try {
    result = execute(*command, cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(Verdict::Inconclusive);
  }

  if (cfg.report_path) {
    std::ofstream out(*cfg.report_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << *cfg.report_path << "\n";
      return kUsageExit;
    }
    out << result.to_json();
  }
  std::cout << (json_stdout ? result.to_json() : result.to_table());
  return exit_code(result.verdict);
}
