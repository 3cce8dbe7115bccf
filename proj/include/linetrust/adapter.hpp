#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "linetrust/classifier.hpp"

namespace linetrust {

// Line-oriented duplex channel to an external scorer.
class ByteStream {
public:
  virtual ~ByteStream() = default;

  virtual void write_line(const std::string& line) = 0;
  // nullopt on timeout or end of stream.
  virtual std::optional<std::string> read_line(std::chrono::milliseconds timeout) = 0;
};

// Child process started with /bin/sh -c, talking over its stdin/stdout.
class ProcessStream final : public ByteStream {
public:
  explicit ProcessStream(const std::string& command);
  ~ProcessStream() override;

  ProcessStream(const ProcessStream&) = delete;
  ProcessStream& operator=(const ProcessStream&) = delete;

  void write_line(const std::string& line) override;
  std::optional<std::string> read_line(std::chrono::milliseconds timeout) override;

private:
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

inline constexpr std::chrono::milliseconds kAdapterTimeout{5000};

// Scores lines through an external process speaking one JSON object per
// line: request {"id": n, "text": "..."}, response {"id": n, "score": s}.
// Endpoints have the form "exec:<shell command>".
class AdapterClassifier final : public LineClassifier {
public:
  AdapterClassifier(std::string name, std::string endpoint, double threshold = 0.5,
                    std::chrono::milliseconds timeout = kAdapterTimeout);
  // Test hook: talk over an already-open stream.
  AdapterClassifier(std::string name, std::unique_ptr<ByteStream> stream,
                    double threshold = 0.5,
                    std::chrono::milliseconds timeout = kAdapterTimeout);

  double score(std::string_view normalized_line) const override;
  double threshold() const override { return threshold_; }
  std::string name() const override { return name_; }
  const std::string& endpoint() const noexcept { return endpoint_; }

  Json to_json() const;

private:
  std::string name_;
  std::string endpoint_;
  double threshold_;
  std::chrono::milliseconds timeout_;
  mutable std::mutex mu_;
  mutable std::unique_ptr<ByteStream> stream_;
  mutable std::uint64_t next_id_ = 1;
};

}  // namespace linetrust
