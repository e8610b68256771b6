#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "safexec/ast.hpp"

namespace safexec {

enum class TypeTag : uint8_t { Int, Float, Bool, String, List, Dict, Any };

const char* type_tag_name(TypeTag tag);
bool type_tag_from_name(const std::string& name, TypeTag& out);

struct ToolParam {
  std::string name;
  TypeTag type{TypeTag::Any};
};

struct ToolSpec {
  std::string name;
  std::vector<ToolParam> params;
  size_t required_count{0};
  int64_t timeout_ms{1000};
  int max_retries{0};
  int64_t backoff_base_ms{100};
  std::string description;
};

struct ResourceLimits {
  int64_t wall_clock_timeout_ms{2000};
  uint64_t max_total_steps{5'000'000};
  uint64_t max_loop_iterations{1'000'000};
  int max_nested_loop_depth{4};
  int max_stack_depth{64};
  uint64_t max_collection_size{1'000'000};
  uint64_t max_int_magnitude{4300};  // decimal digits
  uint64_t max_tool_calls{0};        // 0 disables tool calling entirely
};

struct PolicyConfig {
  std::set<NodeKind> allowed_node_kinds;
  std::set<std::string> allowed_builtins;
  std::set<std::string> allowed_imports;
  bool allowed_dunder_access{false};
  std::vector<ToolSpec> tools;
  ResourceLimits limits;
  std::string policy_id{"unnamed-policy"};

  const ToolSpec* find_tool(const std::string& name) const;
  bool kind_allowed(NodeKind kind) const { return allowed_node_kinds.count(kind) > 0; }
};

struct PolicyError {
  std::string message;
};

struct PolicyLoadResult {
  std::optional<PolicyConfig> policy;
  std::vector<PolicyError> errors;
  bool ok() const { return policy.has_value(); }
};

// Builtins and importable modules the engine actually implements. Policies
// naming anything outside these sets fail to load, which keeps the
// validator's static guarantees in line with what the executor can run.
const std::set<std::string>& engine_supported_builtins();
const std::set<std::string>& engine_supported_imports();

// Loads and fully validates a policy document, reporting every problem.
PolicyLoadResult load_policy(const std::string& text);
PolicyLoadResult load_policy_file(const std::string& path);

std::vector<PolicyError> validate_policy(const PolicyConfig& policy);

// Canonical, deterministic serialization; round-trips through load_policy.
std::string serialize_policy(const PolicyConfig& policy);

// The bundled evaluation policy ("eval-default").
PolicyConfig default_eval_policy();

}  // namespace safexec
