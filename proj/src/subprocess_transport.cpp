#include "safexec/subprocess_transport.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>

#include <nlohmann/json.hpp>

namespace safexec {

namespace {

int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

AttemptResult SubprocessTransport::attempt(const ToolSpec& spec, const std::vector<Value>& args,
                                           int64_t timeout_ms) {
  AttemptResult result;
  int64_t start = now_ms();

  nlohmann::json request;
  request["tool"] = spec.name;
  nlohmann::json arg_array = nlohmann::json::array();
  for (const Value& arg : args) {
    arg_array.push_back(nlohmann::json::parse(value_to_json_text(arg)));
  }
  request["args"] = arg_array;
  request["timeout_ms"] = timeout_ms;
  std::string request_text = request.dump() + "\n";

  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0) {
    result.error = "pipe() failed";
    return result;
  }
  pid_t pid = fork();
  if (pid < 0) {
    result.error = "fork() failed";
    return result;
  }
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl(worker_path_.c_str(), worker_path_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);

  ssize_t written = write(to_child[1], request_text.data(), request_text.size());
  close(to_child[1]);
  if (written != static_cast<ssize_t>(request_text.size())) {
    kill(pid, SIGKILL);
    waitpid(pid, nullptr, 0);
    close(from_child[0]);
    result.error = "failed to write request to worker";
    return result;
  }

  std::string response;
  bool timed_out = false;
  while (true) {
    int64_t remaining = timeout_ms - (now_ms() - start);
    if (remaining <= 0) {
      timed_out = true;
      break;
    }
    struct pollfd pfd{from_child[0], POLLIN, 0};
    int ready = poll(&pfd, 1, static_cast<int>(remaining));
    if (ready <= 0) {
      timed_out = ready == 0;
      break;
    }
    char buf[4096];
    ssize_t n = read(from_child[0], buf, sizeof(buf));
    if (n <= 0) break;  // EOF: worker finished writing
    response.append(buf, static_cast<size_t>(n));
  }
  close(from_child[0]);

  if (timed_out) {
    kill(pid, SIGKILL);
    waitpid(pid, nullptr, 0);
    result.outcome = AttemptOutcome::Timeout;
    result.elapsed_ms = static_cast<double>(now_ms() - start);
    return result;
  }
  int status = 0;
  waitpid(pid, &status, 0);
  result.elapsed_ms = static_cast<double>(now_ms() - start);

  auto doc = nlohmann::json::parse(response, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    result.error = "worker produced no parseable response (exit " + std::to_string(status) + ")";
    return result;
  }
  std::string outcome = doc.value("outcome", "error");
  if (outcome == "ok") {
    result.outcome = AttemptOutcome::Ok;
    result.value = value_from_json_text(doc["value"].dump());
  } else if (outcome == "timeout") {
    result.outcome = AttemptOutcome::Timeout;
  } else {
    result.outcome = AttemptOutcome::Error;
    result.error = doc.value("error", "worker error");
  }
  return result;
}

}  // namespace safexec
