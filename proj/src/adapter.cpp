#include "linetrust/adapter.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <mutex>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "linetrust/error.hpp"

extern char** environ;

namespace linetrust {

namespace {

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

ProcessStream::ProcessStream(const std::string& command) {
  ignore_sigpipe();
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0) throw Error(ErrorKind::Adapter, "pipe() failed");
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw Error(ErrorKind::Adapter, "pipe() failed");
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
  posix_spawn_file_actions_addclose(&actions, out_pipe[0]);

  const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
  pid_t pid = 0;
  int rc = posix_spawn(&pid, "/bin/sh", &actions, nullptr, const_cast<char**>(argv), environ);
  posix_spawn_file_actions_destroy(&actions);
  close(in_pipe[0]);
  close(out_pipe[1]);
  if (rc != 0) {
    close(in_pipe[1]);
    close(out_pipe[0]);
    throw Error(ErrorKind::Adapter, "cannot start adapter: " + std::string(std::strerror(rc)));
  }
  fcntl(in_pipe[1], F_SETFD, FD_CLOEXEC);
  fcntl(out_pipe[0], F_SETFD, FD_CLOEXEC);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ProcessStream::~ProcessStream() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    kill(pid_, SIGTERM);
    int status = 0;
    waitpid(pid_, &status, 0);
  }
}

void ProcessStream::write_line(const std::string& line) {
  std::string data = line + "\n";
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw AdapterError("adapter closed its input: " + std::string(std::strerror(errno)), "");
    }
    off += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> ProcessStream::read_line(std::chrono::milliseconds timeout) {
  auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return std::nullopt;
    pollfd pfd{from_child_, POLLIN, 0};
    int rc = poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc < 0 && errno == EINTR) continue;
    if (rc <= 0) return std::nullopt;
    char chunk[4096];
    ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return std::nullopt;
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

AdapterClassifier::AdapterClassifier(std::string name, std::string endpoint, double threshold,
                                     std::chrono::milliseconds timeout)
    : name_(std::move(name)),
      endpoint_(std::move(endpoint)),
      threshold_(threshold),
      timeout_(timeout) {
  if (endpoint_.rfind("exec:", 0) != 0) {
    throw Error(ErrorKind::Adapter, "unsupported adapter endpoint '" + endpoint_ +
                                        "' (expected exec:<command>)");
  }
}

AdapterClassifier::AdapterClassifier(std::string name, std::unique_ptr<ByteStream> stream,
                                     double threshold, std::chrono::milliseconds timeout)
    : name_(std::move(name)),
      endpoint_("stream:"),
      threshold_(threshold),
      timeout_(timeout),
      stream_(std::move(stream)) {}

double AdapterClassifier::score(std::string_view normalized_line) const {
  std::lock_guard lock(mu_);
  if (!stream_) stream_ = std::make_unique<ProcessStream>(endpoint_.substr(5));
  const std::uint64_t id = next_id_++;
  stream_->write_line(Json{{"id", id}, {"text", std::string(normalized_line)}}.dump());
  auto reply = stream_->read_line(timeout_);
  if (!reply) {
    // A stuck adapter cannot be trusted with the next request either.
    if (endpoint_ != "stream:") stream_.reset();
    throw AdapterError("adapter '" + name_ + "' did not answer within " +
                           std::to_string(timeout_.count()) + " ms",
                       "");
  }
  Json doc = Json::parse(*reply, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("id") ||
      !doc.contains("score") || !doc["score"].is_number()) {
    throw AdapterError("adapter '" + name_ + "' sent a malformed response", *reply);
  }
  if (!doc["id"].is_number_unsigned() || doc["id"].get<std::uint64_t>() != id) {
    throw AdapterError("adapter '" + name_ + "' answered the wrong request", *reply);
  }
  double s = doc["score"].get<double>();
  if (!(s >= 0.0 && s <= 1.0)) {
    throw AdapterError("adapter '" + name_ + "' returned a score outside [0,1]", *reply);
  }
  return s;
}

Json AdapterClassifier::to_json() const {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "adapter";
  doc["view"] = name_;
  doc["endpoint"] = endpoint_;
  doc["threshold"] = threshold_;
  return doc;
}

}  // namespace linetrust
