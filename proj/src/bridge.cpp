#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <json.hpp>

#include "nasbo/benchmarks.hpp"

namespace nasbo {

using nlohmann::json;

BridgeClient::BridgeClient(const std::string& command, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (pipe(in_pipe) != 0) throw BridgeError(BridgeError::Kind::unavailable, "bridge unavailable: pipe failed");
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw BridgeError(BridgeError::Kind::unavailable, "bridge unavailable: pipe failed");
  }
  pid_ = fork();
  if (pid_ < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
    throw BridgeError(BridgeError::Kind::unavailable, "bridge unavailable: fork failed");
  }
  if (pid_ == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  fcntl(from_child_, F_SETFD, FD_CLOEXEC);
  // A dead child must surface as an error, not as SIGPIPE.
  signal(SIGPIPE, SIG_IGN);

  try {
    const std::string raw = round_trip(json{{"op", "hello"}}.dump());
    json reply;
    try {
      reply = json::parse(raw);
    } catch (const json::exception&) {
      throw BridgeError(BridgeError::Kind::protocol, "bridge protocol error: malformed handshake", raw);
    }
    if (!reply.is_object() || !reply.contains("benchmark") || !reply["benchmark"].is_string()) {
      throw BridgeError(BridgeError::Kind::protocol, "bridge protocol error: bad handshake", raw);
    }
    info_.benchmark = reply["benchmark"].get<std::string>();
    info_.version = reply.value("version", std::string{});
  } catch (...) {
    shutdown();
    throw;
  }
}

BridgeClient::~BridgeClient() { shutdown(); }

void BridgeClient::shutdown() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    // Closing stdin asks the bridge to exit; give it a moment, then kill.
    for (int i = 0; i < 50; ++i) {
      if (waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        return;
      }
      usleep(10000);
    }
    kill(pid_, SIGKILL);
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

void BridgeClient::write_line(const std::string& line) {
  std::string data = line + "\n";
  std::size_t written = 0;
  while (written < data.size()) {
    const ssize_t n = write(to_child_, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BridgeError(BridgeError::Kind::unavailable, "bridge unavailable: write failed");
    }
    written += static_cast<std::size_t>(n);
  }
}

std::string BridgeClient::read_line() {
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw BridgeError(BridgeError::Kind::unavailable, "bridge unavailable: timeout");
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) throw BridgeError(BridgeError::Kind::unavailable, "bridge unavailable: timeout");
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw BridgeError(BridgeError::Kind::unavailable, "bridge unavailable: process exited");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::string BridgeClient::round_trip(const std::string& line) {
  if (to_child_ < 0) throw BridgeError(BridgeError::Kind::unavailable, "bridge unavailable: not running");
  write_line(line);
  return read_line();
}

double BridgeClient::evaluate(const Architecture& arch) {
  std::lock_guard lock(mutex_);
  const std::int64_t id = next_id_++;
  const std::string raw = round_trip(json{{"id", id}, {"op", "evaluate"}, {"arch", arch.to_string()}}.dump());
  json reply;
  try {
    reply = json::parse(raw);
  } catch (const json::exception&) {
    throw BridgeError(BridgeError::Kind::protocol, "bridge protocol error: malformed response", raw);
  }
  if (!reply.is_object() || !reply.contains("id") || !reply["id"].is_number_integer() ||
      reply["id"].get<std::int64_t>() != id) {
    throw BridgeError(BridgeError::Kind::protocol, "bridge protocol error: response id mismatch", raw);
  }
  if (reply.contains("error")) {
    throw BridgeError(BridgeError::Kind::remote, "bridge error: " + reply["error"].dump(), raw);
  }
  if (!reply.contains("accuracy") || !reply["accuracy"].is_number()) {
    throw BridgeError(BridgeError::Kind::protocol, "bridge protocol error: missing accuracy", raw);
  }
  return reply["accuracy"].get<double>();
}

}  // namespace nasbo
