#pragma once

#include <stdexcept>
#include <string>

namespace overlayx {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wrong channel count, non-binary input where a binary image is required, ...
class ImageFormatError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class CodecError : public Error {
 public:
  using Error::Error;
};

// The external codec tool (ffmpeg or a stand-in) could not be started.
class AdapterUnavailable : public Error {
 public:
  using Error::Error;
};

// An external adapter ran but failed. `stderr_excerpt` holds the tail of its
// diagnostic output.
class AdapterError : public Error {
 public:
  AdapterError(const std::string& what, std::string stderr_excerpt)
      : Error(stderr_excerpt.empty() ? what : what + ": " + stderr_excerpt),
        stderr_excerpt_(std::move(stderr_excerpt)) {}

  const std::string& stderr_excerpt() const noexcept { return stderr_excerpt_; }

 private:
  std::string stderr_excerpt_;
};

// Detector or recognizer backend failure.
class BackendError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage failed on a particular frame.
class StageError : public Error {
 public:
  StageError(std::string stage, long frame_index, const std::string& detail)
      : Error("stage '" + stage + "' failed" +
              (frame_index >= 0 ? " on frame " + std::to_string(frame_index)
                                : std::string()) +
              ": " + detail),
        stage_(std::move(stage)),
        frame_index_(frame_index) {}

  const std::string& stage() const noexcept { return stage_; }
  long frame_index() const noexcept { return frame_index_; }

 private:
  std::string stage_;
  long frame_index_;
};

}  // namespace overlayx
