#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oscctl_cli/config.hpp"

namespace oscctl::cli {

/// Exit codes of the tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitMonitor = 1;
inline constexpr int kExitUsage = 2;

/// One line of `verify`. A discrepancy pair records a literal formula expected to
/// disagree with the oracle next to the guarded implementation expected to agree.
struct VerifyItem {
  std::string name;
  bool passed = false;
  std::string detail;
  bool literal = false;  ///< the literal formula; passed == false is the documented outcome
};

std::vector<VerifyItem> run_verify(const RunConfig& config);
/// True when every guarded item passes and every literal item fails.
bool verify_as_documented(const std::vector<VerifyItem>& items);

/// Exact matrices of the canonical construction for an even state dimension.
nlohmann::json tables_json(const RunConfig& config);
std::string tables_text(const nlohmann::json& tables);

/// Dispatches the configured command, writes artifacts under output_dir and
/// returns the exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace oscctl::cli
