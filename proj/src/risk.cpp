#include "safexec/risk.hpp"

namespace safexec {

namespace {

struct CategoryNames {
  const char* id;
  const char* display;
};

const CategoryNames kNames[] = {
    {"ToolNotAllowed", "Tool Not Allowed"},
    {"ToolError", "Tool Error"},
    {"CodeInjection", "Code Injection"},
    {"InfiniteLoop", "Infinite Loop"},
    {"UnsafeReflection", "Unsafe Reflection"},
    {"Deserialization", "Deserialization"},
    {"ResourceExhaustion", "Resource Exhaustion"},
    {"OutOfBoundsWrite", "Out-of-bounds Write"},
    {"TypeConfusion", "Type Confusion"},
    {"Deadlock", "Deadlock"},
    {"FileAccess", "File Access"},
    {"UntrustedInclusion", "Untrusted Inclusion"},
    {"ResourceLeak", "Resource Leak"},
    {"OperationalError", "Operational Error"},
    {"None", "None"},
};

}  // namespace

const char* risk_category_name(RiskCategory category) {
  return kNames[static_cast<size_t>(category)].id;
}

const char* risk_category_display(RiskCategory category) {
  return kNames[static_cast<size_t>(category)].display;
}

bool risk_category_from_name(const std::string& name, RiskCategory& out) {
  for (size_t i = 0; i < std::size(kNames); ++i) {
    if (name == kNames[i].id) {
      out = static_cast<RiskCategory>(i);
      return true;
    }
  }
  return false;
}

}  // namespace safexec
