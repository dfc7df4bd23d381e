#pragma once

#include "cmfact/eisenstein.hpp"
#include "cmfact/factored.hpp"
#include "cmfact/quaternion.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cmfact::harness {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";

enum class Command { ClassicalGz, ShimuraRhs, ThetaLhs, IdentityCheck, Census, Selftest };

std::optional<Command> parse_command(std::string_view name);
std::string command_name(Command c);

struct RunConfig {
  std::int64_t d1 = -43;
  std::int64_t d2 = -163;
  std::int64_t p = 2;
  std::int64_t q = 3;
  int precision = 12;
  std::optional<int> n_max;  // default depends on p
  std::optional<std::string> report_path;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0: one per core
  bool timing = false;   // wall-clock in the JSON document breaks byte-for-byte reproducibility

  int resolved_n_max() const;
};

// Bad parameters: mapped to the usage exit status.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct VerificationReport {
  Command command = Command::Selftest;
  RunConfig config;
  Json document;
  Verdict verdict = Verdict::Fail;
  std::vector<std::pair<std::string, std::string>> rows;  // human-readable rendering
  double seconds = 0;

  std::string to_json() const;
  std::string to_table() const;
};

struct OrientedSetup {
  Setup setup;
  std::int64_t canonical_root_q = 0;
  std::optional<ReflexLabels> census;  // absent when q has no quaternion table entry
  std::string note;
};

// make_setup followed by relabelling q1 to the reflex prime found by the det_F census.
OrientedSetup orient(const RunConfig& config);

VerificationReport execute(Command command, const RunConfig& config);

int exit_code(Verdict v);
inline constexpr int kUsageExit = 64;

Json padic_json(const PAdic& x);
Json factored_json(const FactoredRational& r);
Json sum_report_json(const SumReport& r);

}  // namespace cmfact::harness
