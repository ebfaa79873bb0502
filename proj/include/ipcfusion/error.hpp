#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ipcfusion {

enum class ErrorKind {
  MalformedIpc,
  LevelUnavailable,
  UnreadableSource,
  EmptySpec,
  EmptyCorpus,
  LevelOrderViolation,
  InsufficientData,
  DegenerateSeries,
  AllZeroActuals,
  SinkWriteFailure,
  InvalidArgument,
  InvalidConfig,
};

std::string_view to_string(ErrorKind kind);

/// Domain error raised by every module. The kind lets callers branch without
/// parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// An Error annotated with the pipeline stage that raised it
/// ("ingest", "graph", "lifecycle", ...).
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), cause.what()), stage_(std::move(stage)) {}
  StageError(std::string stage, ErrorKind kind, const std::string& message)
      : Error(kind, message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace ipcfusion
