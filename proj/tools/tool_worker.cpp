// Sibling worker for the out-of-process tool transport. Reads one JSON
// request {tool, args, timeout_ms} on stdin, answers one JSON response
// {outcome, value|error} on stdout. Ships the same deterministic demo
// handlers as the in-process registry, plus sleepy_service for exercising
// real timeouts.

#include <chrono>
#include <iostream>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

int main() {
  std::string line;
  std::getline(std::cin, line);
  nlohmann::json response;
  auto request = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (request.is_discarded() || !request.is_object()) {
    response["outcome"] = "error";
    response["error"] = "malformed request";
    std::cout << response.dump() << std::endl;
    return 1;
  }

  std::string tool = request.value("tool", "");
  nlohmann::json args = request.value("args", nlohmann::json::array());

  if (tool == "search_wikipedia") {
    std::string query = !args.empty() && args[0].is_string() ? args[0].get<std::string>() : "";
    response["outcome"] = "ok";
    response["value"] = "Stub article summary for '" + query + "'";
  } else if (tool == "add_to_db") {
    response["outcome"] = "ok";
    response["value"] = true;
  } else if (tool == "flaky_service") {
    response["outcome"] = "error";
    response["error"] = "simulated backend outage";
  } else if (tool == "sleepy_service") {
    int64_t sleep_ms = !args.empty() && args[0].is_number() ? args[0].get<int64_t>() : 1000;
    std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));
    response["outcome"] = "ok";
    response["value"] = nullptr;
  } else {
    response["outcome"] = "ok";
    response["value"] = nullptr;
  }
  std::cout << response.dump() << std::endl;
  return 0;
}
