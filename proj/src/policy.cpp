#include "safexec/policy.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace safexec {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* const kTypeTagNames[] = {"int", "float", "bool", "string", "list", "dict", "any"};

const char* const kPolicyKeys[] = {
    "allowed_node_kinds", "allowed_builtins", "allowed_imports", "allowed_dunder_access",
    "tools",              "limits",           "policy_id",
};

const char* const kLimitKeys[] = {
    "wall_clock_timeout", "max_total_steps",     "max_loop_iterations", "max_nested_loop_depth",
    "max_stack_depth",    "max_collection_size", "max_int_magnitude",   "max_tool_calls",
};

const char* const kToolKeys[] = {
    "name", "params", "required_count", "timeout", "max_retries", "backoff_base", "description",
};

template <size_t N>
bool known_key(const std::string& key, const char* const (&keys)[N]) {
  for (const char* known : keys) {
    if (key == known) return true;
  }
  return false;
}

struct Loader {
  std::vector<PolicyError> errors;

  void error(std::string message) { errors.push_back({std::move(message)}); }

  std::set<std::string> stringSet(const ordered_json& value, const std::string& where) {
    std::set<std::string> out;
    if (!value.is_array()) {
      error(where + " must be an array of strings");
      return out;
    }
    for (const auto& item : value) {
      if (!item.is_string()) {
        error(where + " entries must be strings");
        continue;
      }
      out.insert(item.get<std::string>());
    }
    return out;
  }

  ToolSpec toolSpec(const ordered_json& value, size_t index) {
    ToolSpec spec;
    std::string where = "tools[" + std::to_string(index) + "]";
    if (!value.is_object()) {
      error(where + " must be an object");
      return spec;
    }
    for (const auto& [key, _] : value.items()) {
      if (!known_key(key, kToolKeys)) error(where + ": unknown key '" + key + "'");
    }
    if (!value.contains("name") || !value["name"].is_string() ||
        value["name"].get<std::string>().empty()) {
      error(where + ": 'name' must be a non-empty string");
    } else {
      spec.name = value["name"].get<std::string>();
      where = "tool '" + spec.name + "'";
    }
    bool params_given = value.contains("params");
    if (params_given) {
      if (!value["params"].is_array()) {
        error(where + ": 'params' must be an array");
      } else {
        for (const auto& p : value["params"]) {
          ToolParam param;
          if (p.is_object() && p.contains("name") && p["name"].is_string() &&
              p.contains("type") && p["type"].is_string()) {
            param.name = p["name"].get<std::string>();
            if (!type_tag_from_name(p["type"].get<std::string>(), param.type)) {
              error(where + ": unknown param type '" + p["type"].get<std::string>() + "'");
            }
          } else {
            error(where + ": each param must be {\"name\": ..., \"type\": ...}");
          }
          for (const ToolParam& existing : spec.params) {
            if (existing.name == param.name) {
              error(where + ": duplicate param name '" + param.name + "'");
            }
          }
          spec.params.push_back(std::move(param));
        }
      }
    }
    spec.required_count = spec.params.size();
    if (value.contains("required_count")) {
      if (!value["required_count"].is_number_unsigned()) {
        error(where + ": 'required_count' must be a non-negative integer");
      } else {
        spec.required_count = value["required_count"].get<size_t>();
      }
    }
    if (value.contains("timeout")) {
      if (!value["timeout"].is_number_integer() || value["timeout"].get<int64_t>() <= 0) {
        error(where + ": 'timeout' must be a positive integer (ms)");
      } else {
        spec.timeout_ms = value["timeout"].get<int64_t>();
      }
    }
    if (value.contains("max_retries")) {
      if (!value["max_retries"].is_number_integer() || value["max_retries"].get<int64_t>() < 0) {
        error(where + ": 'max_retries' must be >= 0");
      } else {
        spec.max_retries = value["max_retries"].get<int>();
      }
    }
    if (value.contains("backoff_base")) {
      if (!value["backoff_base"].is_number_integer() ||
          value["backoff_base"].get<int64_t>() <= 0) {
        error(where + ": 'backoff_base' must be a positive integer (ms)");
      } else {
        spec.backoff_base_ms = value["backoff_base"].get<int64_t>();
      }
    }
    if (value.contains("description")) {
      if (!value["description"].is_string()) {
        error(where + ": 'description' must be a string");
      } else {
        spec.description = value["description"].get<std::string>();
      }
    }
    if (spec.required_count > spec.params.size()) {
      error(where + ": required_count exceeds the number of params");
    }
    return spec;
  }

  void limits(const ordered_json& value, ResourceLimits& out) {
    if (!value.is_object()) {
      error("limits must be an object");
      return;
    }
    for (const auto& [key, _] : value.items()) {
      if (!known_key(key, kLimitKeys)) error("limits: unknown key '" + key + "'");
    }
    auto positive = [&](const char* key, auto& field, bool allow_zero) {
      if (!value.contains(key)) return;
      const auto& v = value[key];
      if (!v.is_number_integer() || v.get<int64_t>() < 0 ||
          (!allow_zero && v.get<int64_t>() == 0)) {
        error(std::string("limits.") + key + " must be positive");
        return;
      }
      field = static_cast<std::decay_t<decltype(field)>>(v.get<int64_t>());
    };
    positive("wall_clock_timeout", out.wall_clock_timeout_ms, false);
    positive("max_total_steps", out.max_total_steps, false);
    positive("max_loop_iterations", out.max_loop_iterations, false);
    positive("max_nested_loop_depth", out.max_nested_loop_depth, false);
    positive("max_stack_depth", out.max_stack_depth, false);
    positive("max_collection_size", out.max_collection_size, false);
    positive("max_int_magnitude", out.max_int_magnitude, false);
    // max_tool_calls = 0 means tool calling is disabled.
    positive("max_tool_calls", out.max_tool_calls, true);
  }
};

}  // namespace

const char* type_tag_name(TypeTag tag) { return kTypeTagNames[static_cast<size_t>(tag)]; }

bool type_tag_from_name(const std::string& name, TypeTag& out) {
  for (size_t i = 0; i < std::size(kTypeTagNames); ++i) {
    if (name == kTypeTagNames[i]) {
      out = static_cast<TypeTag>(i);
      return true;
    }
  }
  return false;
}

const ToolSpec* PolicyConfig::find_tool(const std::string& name) const {
  for (const ToolSpec& tool : tools) {
    if (tool.name == name) return &tool;
  }
  return nullptr;
}

const std::set<std::string>& engine_supported_builtins() {
  static const std::set<std::string> kBuiltins = {
      "print", "len",  "range", "abs",  "min",  "max",   "sum",  "sorted", "enumerate", "zip",
      "int",   "float", "str",  "bool", "list", "dict",  "set",  "tuple",  "round",  "isinstance",
  };
  return kBuiltins;
}

const std::set<std::string>& engine_supported_imports() {
  static const std::set<std::string> kImports = {"math", "string"};
  return kImports;
}

std::vector<PolicyError> validate_policy(const PolicyConfig& policy) {
  std::vector<PolicyError> errors;
  auto error = [&](std::string message) { errors.push_back({std::move(message)}); };

  if (!policy.kind_allowed(NodeKind::Module)) {
    error("allowed_node_kinds must contain Module");
  }
  for (const std::string& builtin : policy.allowed_builtins) {
    if (!engine_supported_builtins().count(builtin)) {
      error("allowed_builtins: '" + builtin + "' is not a supported builtin");
    }
  }
  for (const std::string& module : policy.allowed_imports) {
    if (!engine_supported_imports().count(module)) {
      error("allowed_imports: '" + module + "' is not a supported module");
    }
  }
  std::set<std::string> tool_names;
  for (const ToolSpec& tool : policy.tools) {
    if (!tool_names.insert(tool.name).second) {
      error("duplicate tool '" + tool.name + "'");
    }
    if (policy.allowed_builtins.count(tool.name)) {
      error("tool '" + tool.name + "' collides with an allowed builtin");
    }
    if (tool.required_count > tool.params.size()) {
      error("tool '" + tool.name + "': required_count exceeds the number of params");
    }
    if (tool.timeout_ms <= 0) error("tool '" + tool.name + "': timeout must be positive");
    if (tool.max_retries < 0) error("tool '" + tool.name + "': max_retries must be >= 0");
    if (tool.backoff_base_ms <= 0) {
      error("tool '" + tool.name + "': backoff_base must be positive");
    }
  }
  const ResourceLimits& lim = policy.limits;
  if (lim.wall_clock_timeout_ms < 1) error("limits.wall_clock_timeout must be >= 1 ms");
  if (lim.max_total_steps == 0) error("limits.max_total_steps must be positive");
  if (lim.max_loop_iterations == 0) error("limits.max_loop_iterations must be positive");
  if (lim.max_nested_loop_depth <= 0) error("limits.max_nested_loop_depth must be positive");
  if (lim.max_stack_depth <= 0) error("limits.max_stack_depth must be positive");
  if (lim.max_collection_size == 0) error("limits.max_collection_size must be positive");
  if (lim.max_int_magnitude == 0) error("limits.max_int_magnitude must be positive");
  return errors;
}

PolicyLoadResult load_policy(const std::string& text) {
  Loader loader;
  ordered_json doc = ordered_json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    loader.error("policy document is not a JSON object");
    return {std::nullopt, std::move(loader.errors)};
  }

  PolicyConfig policy = default_eval_policy();
  policy.policy_id = "unnamed-policy";

  for (const auto& [key, _] : doc.items()) {
    if (!known_key(key, kPolicyKeys)) loader.error("unknown key '" + key + "'");
  }
  if (doc.contains("allowed_node_kinds")) {
    policy.allowed_node_kinds.clear();
    for (const std::string& name : loader.stringSet(doc["allowed_node_kinds"],
                                                    "allowed_node_kinds")) {
      NodeKind kind;
      if (!kind_from_name(name, kind)) {
        loader.error("allowed_node_kinds: unknown node kind '" + name + "'");
      } else {
        policy.allowed_node_kinds.insert(kind);
      }
    }
  }
  if (doc.contains("allowed_builtins")) {
    policy.allowed_builtins = loader.stringSet(doc["allowed_builtins"], "allowed_builtins");
  }
  if (doc.contains("allowed_imports")) {
    policy.allowed_imports = loader.stringSet(doc["allowed_imports"], "allowed_imports");
  }
  if (doc.contains("allowed_dunder_access")) {
    if (!doc["allowed_dunder_access"].is_boolean()) {
      loader.error("allowed_dunder_access must be a boolean");
    } else {
      policy.allowed_dunder_access = doc["allowed_dunder_access"].get<bool>();
    }
  }
  if (doc.contains("tools")) {
    policy.tools.clear();
    if (!doc["tools"].is_array()) {
      loader.error("tools must be an array");
    } else {
      size_t index = 0;
      for (const auto& tool : doc["tools"]) {
        policy.tools.push_back(loader.toolSpec(tool, index++));
      }
    }
  }
  if (doc.contains("limits")) {
    loader.limits(doc["limits"], policy.limits);
  }
  if (doc.contains("policy_id")) {
    if (!doc["policy_id"].is_string()) {
      loader.error("policy_id must be a string");
    } else {
      policy.policy_id = doc["policy_id"].get<std::string>();
    }
  }

  for (PolicyError& err : validate_policy(policy)) {
    loader.errors.push_back(std::move(err));
  }
  if (!loader.errors.empty()) {
    return {std::nullopt, std::move(loader.errors)};
  }
  return {std::move(policy), {}};
}

PolicyLoadResult load_policy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return {std::nullopt, {{"cannot open policy file: " + path}}};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_policy(buf.str());
}

std::string serialize_policy(const PolicyConfig& policy) {
  ordered_json out;
  out["policy_id"] = policy.policy_id;

  std::vector<std::string> kinds;
  for (NodeKind kind : policy.allowed_node_kinds) kinds.push_back(kind_name(kind));
  std::sort(kinds.begin(), kinds.end());
  out["allowed_node_kinds"] = kinds;

  out["allowed_builtins"] = policy.allowed_builtins;   // std::set: already sorted
  out["allowed_imports"] = policy.allowed_imports;
  out["allowed_dunder_access"] = policy.allowed_dunder_access;

  std::vector<const ToolSpec*> tools;
  for (const ToolSpec& tool : policy.tools) tools.push_back(&tool);
  std::sort(tools.begin(), tools.end(),
            [](const ToolSpec* a, const ToolSpec* b) { return a->name < b->name; });
  ordered_json tools_json = ordered_json::array();
  for (const ToolSpec* tool : tools) {
    ordered_json t;
    t["name"] = tool->name;
    ordered_json params = ordered_json::array();
    for (const ToolParam& param : tool->params) {
      ordered_json p;
      p["name"] = param.name;
      p["type"] = type_tag_name(param.type);
      params.push_back(p);
    }
    t["params"] = params;
    t["required_count"] = tool->required_count;
    t["timeout"] = tool->timeout_ms;
    t["max_retries"] = tool->max_retries;
    t["backoff_base"] = tool->backoff_base_ms;
    t["description"] = tool->description;
    tools_json.push_back(t);
  }
  out["tools"] = tools_json;

  ordered_json limits;
  limits["wall_clock_timeout"] = policy.limits.wall_clock_timeout_ms;
  limits["max_total_steps"] = policy.limits.max_total_steps;
  limits["max_loop_iterations"] = policy.limits.max_loop_iterations;
  limits["max_nested_loop_depth"] = policy.limits.max_nested_loop_depth;
  limits["max_stack_depth"] = policy.limits.max_stack_depth;
  limits["max_collection_size"] = policy.limits.max_collection_size;
  limits["max_int_magnitude"] = policy.limits.max_int_magnitude;
  limits["max_tool_calls"] = policy.limits.max_tool_calls;
  out["limits"] = limits;

  return out.dump(2) + "\n";
}

PolicyConfig default_eval_policy() {
  PolicyConfig policy;
  for (int i = 0; i < kNodeKindCount; ++i) {
    policy.allowed_node_kinds.insert(static_cast<NodeKind>(i));
  }
  policy.allowed_builtins = engine_supported_builtins();
  policy.allowed_imports = engine_supported_imports();
  policy.allowed_dunder_access = false;
  policy.tools.clear();
  policy.limits = ResourceLimits{};  // defaults mirror the evaluation config
  policy.policy_id = "eval-default";
  return policy;
}

}  // namespace safexec
