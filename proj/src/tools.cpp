#include "safexec/tools.hpp"

#include <nlohmann/json.hpp>

namespace safexec {

namespace {

bool tag_matches(TypeTag tag, const Value& value) {
  switch (tag) {
    case TypeTag::Any: return true;
    case TypeTag::Int: return value.is_int() || value.is_bool();
    case TypeTag::Float: return value.is_float() || value.is_int() || value.is_bool();
    case TypeTag::Bool: return value.is_bool();
    case TypeTag::String: return value.is_str();
    case TypeTag::List: return value.is_list() || value.is_tuple();
    case TypeTag::Dict: return value.is_dict();
  }
  return false;
}

}  // namespace

const char* attempt_outcome_name(AttemptOutcome outcome) {
  switch (outcome) {
    case AttemptOutcome::Ok: return "ok";
    case AttemptOutcome::Timeout: return "timeout";
    case AttemptOutcome::Error: return "error";
  }
  return "?";
}

void CallableTransport::bind(const std::string& name, ToolHandler handler) {
  handlers_[name] = std::move(handler);
}

AttemptResult CallableTransport::attempt(const ToolSpec& spec, const std::vector<Value>& args,
                                         int64_t timeout_ms) {
  AttemptResult result;
  auto it = handlers_.find(spec.name);
  int64_t start = clock_.now_ms();
  if (it == handlers_.end()) {
    result.outcome = AttemptOutcome::Error;
    result.error = "no handler bound for tool '" + spec.name + "'";
    result.elapsed_ms = 0;
    return result;
  }
  try {
    Value value = it->second(args);
    result.elapsed_ms = static_cast<double>(clock_.now_ms() - start);
    if (result.elapsed_ms > static_cast<double>(timeout_ms)) {
      result.outcome = AttemptOutcome::Timeout;
    } else {
      result.outcome = AttemptOutcome::Ok;
      result.value = std::move(value);
    }
  } catch (const std::exception& e) {
    result.elapsed_ms = static_cast<double>(clock_.now_ms() - start);
    result.outcome = AttemptOutcome::Error;
    result.error = e.what();
  }
  return result;
}

std::vector<ScriptedTransport::Step> ScriptedTransport::parse_fixture(
    const std::string& json_text) {
  std::vector<Step> steps;
  auto doc = nlohmann::json::parse(json_text);
  for (const auto& item : doc) {
    Step step;
    std::string outcome = item.value("outcome", "error");
    if (outcome == "ok") {
      step.outcome = AttemptOutcome::Ok;
    } else if (outcome == "timeout") {
      step.outcome = AttemptOutcome::Timeout;
    } else {
      step.outcome = AttemptOutcome::Error;
    }
    if (item.contains("value")) {
      const auto& v = item["value"];
      if (v.is_string()) step.value = Value::str(v.get<std::string>());
      else if (v.is_boolean()) step.value = Value::boolean(v.get<bool>());
      else if (v.is_number_integer()) step.value = Value::integer(long(v.get<int64_t>()));
      else if (v.is_number_float()) step.value = Value::floating(v.get<double>());
    }
    if (item.contains("error")) step.error = item["error"].get<std::string>();
    step.delay_ms = item.value("delay_ms", int64_t{0});
    steps.push_back(std::move(step));
  }
  return steps;
}

AttemptResult ScriptedTransport::attempt(const ToolSpec& spec, const std::vector<Value>& args,
                                         int64_t timeout_ms) {
  (void)spec;
  (void)args;
  AttemptResult result;
  if (next_ >= steps_.size()) {
    result.outcome = AttemptOutcome::Error;
    result.error = "scripted transport exhausted";
    return result;
  }
  const Step& step = steps_[next_++];
  int64_t delay = std::min<int64_t>(step.delay_ms, timeout_ms + 1);
  if (step.delay_ms > 0) clock_.sleep_ms(delay);
  result.elapsed_ms = static_cast<double>(delay);
  if (step.delay_ms > timeout_ms) {
    result.outcome = AttemptOutcome::Timeout;
    return result;
  }
  result.outcome = step.outcome;
  result.value = step.value;
  result.error = step.error;
  return result;
}

namespace {

nlohmann::json value_to_json(const Value& value) {
  if (value.is_none()) return nullptr;
  if (value.is_bool()) return value.as_bool();
  if (value.is_int()) {
    const mpz_class& z = value.as_int();
    if (z.fits_slong_p()) return z.get_si();
    return z.get_str();  // huge ints degrade to decimal strings
  }
  if (value.is_float()) return value.as_float();
  if (value.is_str()) return value.as_str();
  if (value.is_list() || value.is_tuple()) {
    nlohmann::json arr = nlohmann::json::array();
    const auto& items = value.is_list() ? value.as_list()->items : value.as_tuple()->items;
    for (const Value& item : items) arr.push_back(value_to_json(item));
    return arr;
  }
  if (value.is_dict()) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [key, val] : value.as_dict()->entries) {
      if (!key.is_str()) throw std::runtime_error("only string dict keys cross the tool boundary");
      obj[key.as_str()] = value_to_json(val);
    }
    return obj;
  }
  throw std::runtime_error("value of type '" + value.type_name() +
                           "' cannot cross the tool boundary");
}

Value json_to_value(const nlohmann::json& j) {
  if (j.is_null()) return Value::none();
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number_integer()) return Value::integer(long(j.get<int64_t>()));
  if (j.is_number_float()) return Value::floating(j.get<double>());
  if (j.is_string()) return Value::str(j.get<std::string>());
  if (j.is_array()) {
    auto list = std::make_shared<ListObj>();
    for (const auto& item : j) list->items.push_back(json_to_value(item));
    return Value::list(std::move(list));
  }
  if (j.is_object()) {
    auto dict = std::make_shared<DictObj>();
    for (const auto& [key, val] : j.items()) {
      Value key_v = Value::str(key);
      size_t h;
      value_hash(key_v, h);
      dict->index[h].push_back(dict->entries.size());
      dict->entries.emplace_back(std::move(key_v), json_to_value(val));
    }
    return Value::dict(std::move(dict));
  }
  throw std::runtime_error("unsupported JSON shape for a tool value");
}

}  // namespace

std::string value_to_json_text(const Value& value) { return value_to_json(value).dump(); }

Value value_from_json_text(const std::string& text) {
  return json_to_value(nlohmann::json::parse(text));
}

std::optional<ArgError> check_args(const ToolSpec& spec, const std::vector<Value>& args) {
  if (args.size() < spec.required_count) {
    return ArgError{"missing required argument" +
                        std::string(spec.required_count - args.size() > 1 ? "s" : "") + ": tool '" +
                        spec.name + "' requires " + std::to_string(spec.required_count),
                    spec.params.empty() ? "" : spec.params[args.size()].name};
  }
  if (args.size() > spec.params.size()) {
    return ArgError{"too many arguments: tool '" + spec.name + "' accepts at most " +
                        std::to_string(spec.params.size()),
                    ""};
  }
  for (size_t i = 0; i < args.size(); ++i) {
    if (!tag_matches(spec.params[i].type, args[i])) {
      return ArgError{"argument '" + spec.params[i].name + "' of tool '" + spec.name +
                          "' expects type '" + type_tag_name(spec.params[i].type) + "', got '" +
                          args[i].type_name() + "'",
                      spec.params[i].name};
    }
  }
  return std::nullopt;
}

bool ToolRegistry::register_tool(const ToolSpec& spec) {
  if (specs_.count(spec.name)) return false;
  specs_.emplace(spec.name, spec);
  return true;
}

bool ToolRegistry::register_tool(const ToolSpec& spec, ToolHandler handler) {
  if (!register_tool(spec)) return false;
  auto* callable = dynamic_cast<CallableTransport*>(transport_.get());
  if (callable == nullptr) {
    auto fresh = std::make_shared<CallableTransport>();
    callable = fresh.get();
    transport_ = fresh;
  }
  callable->bind(spec.name, std::move(handler));
  return true;
}

const ToolSpec* ToolRegistry::find(const std::string& name) const {
  auto it = specs_.find(name);
  return it == specs_.end() ? nullptr : &it->second;
}

std::string ToolRegistry::render_arg(const ToolSpec& spec, size_t index,
                                     const Value& value) const {
  if (index < spec.params.size()) {
    const std::string& param = spec.params[index].name;
    for (const std::string& pattern : redaction_patterns_) {
      if (param.find(pattern) != std::string::npos) return "<redacted>";
    }
  }
  return render_snapshot(value);
}

ToolInvokeResult ToolRegistry::invoke(const ToolSpec& spec, const std::vector<Value>& args,
                                      Clock& clock, int64_t deadline_ms,
                                      bool& deadline_hit) const {
  ToolInvokeResult result;
  deadline_hit = false;
  result.record.tool = spec.name;
  for (size_t i = 0; i < args.size(); ++i) {
    result.record.args_rendered.push_back(render_arg(spec, i, args[i]));
  }

  if (transport_ == nullptr) {
    result.error = "no transport configured for tool '" + spec.name + "'";
    result.record.final_rendered = result.error;
    return result;
  }

  const int total_attempts = spec.max_retries + 1;
  for (int attempt = 1; attempt <= total_attempts; ++attempt) {
    if (clock.now_ms() >= deadline_ms) {
      deadline_hit = true;
      result.error = "execution deadline passed during tool call";
      result.record.final_rendered = result.error;
      return result;
    }
    if (attempt > 1) {
      // Delay before retry k is backoff_base * 2^(k-1), no jitter.
      int64_t delay = spec.backoff_base_ms << (attempt - 2);
      int64_t remaining = deadline_ms - clock.now_ms();
      clock.sleep_ms(std::min(delay, std::max<int64_t>(remaining, 0)));
      if (clock.now_ms() >= deadline_ms) {
        deadline_hit = true;
        result.error = "execution deadline passed during tool retry backoff";
        result.record.final_rendered = result.error;
        return result;
      }
      result.record.backoff_delays_ms.push_back(delay);
    }
    AttemptResult attempt_result = transport_->attempt(spec, args, spec.timeout_ms);
    result.record.per_attempt.push_back({attempt_result.elapsed_ms, attempt_result.outcome});
    result.record.attempts = attempt;
    if (attempt_result.outcome == AttemptOutcome::Ok) {
      result.ok = true;
      result.value = std::move(attempt_result.value);
      result.record.ok = true;
      result.record.final_rendered = render_snapshot(result.value);
      return result;
    }
    result.error = attempt_result.outcome == AttemptOutcome::Timeout
                       ? "tool '" + spec.name + "' timed out after " +
                             std::to_string(spec.timeout_ms) + " ms"
                       : "tool '" + spec.name + "' failed: " + attempt_result.error;
  }
  result.error += " (maximum retries reached after " + std::to_string(total_attempts) +
                  " attempt" + (total_attempts > 1 ? "s" : "") + ")";
  result.record.final_rendered = result.error;
  return result;
}

}  // namespace safexec
