#pragma once

#include <cstdint>
#include <string>

namespace safexec {

// Risk classification used in feedback reports. The category set follows the
// feedback prompt's list, completed with the CWE names from the benchmark
// table; Completed outcomes map to NoRisk.
enum class RiskCategory : uint8_t {
  ToolNotAllowed,
  ToolError,
  CodeInjection,
  InfiniteLoop,
  UnsafeReflection,
  Deserialization,
  ResourceExhaustion,
  OutOfBoundsWrite,
  TypeConfusion,
  Deadlock,
  FileAccess,
  UntrustedInclusion,
  ResourceLeak,
  OperationalError,
  NoRisk,
};

// Identifier-style name, e.g. "CodeInjection"; used in JSON.
const char* risk_category_name(RiskCategory category);
// Human-readable name, e.g. "Code Injection"; used in rendered text.
const char* risk_category_display(RiskCategory category);
bool risk_category_from_name(const std::string& name, RiskCategory& out);

}  // namespace safexec
