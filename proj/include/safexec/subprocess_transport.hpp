#pragma once

#include "safexec/tools.hpp"

namespace safexec {

// Reference out-of-process transport: each attempt execs a worker process,
// writes one JSON request {tool, args, timeout_ms} on its stdin and reads
// one JSON response {outcome, value|error}. The per-attempt timeout is
// enforced preemptively: an overrunning worker is killed. This is the
// isolation boundary for tool handlers that cannot be trusted to honor a
// cooperative deadline.
class SubprocessTransport : public ToolTransport {
 public:
  explicit SubprocessTransport(std::string worker_path)
      : worker_path_(std::move(worker_path)) {}

  AttemptResult attempt(const ToolSpec& spec, const std::vector<Value>& args,
                        int64_t timeout_ms) override;

 private:
  std::string worker_path_;
};

}  // namespace safexec
