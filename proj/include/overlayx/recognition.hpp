#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "overlayx/charset.hpp"
#include "overlayx/detection.hpp"
#include "overlayx/image.hpp"

namespace overlayx::recognition {

inline constexpr int kModelHeight = 32;

// A single-word crop, normalized to the recognizer's input height.
struct WordImage {
  Image image;
  detection::TextBox source_box;
  std::uint32_t frame_index = 0;
};

struct Recognition {
  std::string text;  // lowercase, charset-restricted
  double confidence = 0.0;

  bool operator==(const Recognition&) const = default;
};

// Whatever a backend produced, before case folding and charset restriction.
struct RawTranscription {
  std::string text;
  std::optional<double> confidence;
};

// Recognizer contract: one transcription per input word, same order. Same
// concurrency rules as detection::DetectorBackend.
class RecognizerBackend {
 public:
  virtual ~RecognizerBackend() = default;
  virtual std::vector<RawTranscription> transcribe(std::span<const WordImage> words) = 0;
  virtual bool single_flight() const { return false; }
  virtual int model_height() const { return kModelHeight; }
  virtual std::string name() const = 0;
};

// Scales to `target_h` rows, width round(w * target_h / h) (at least 1).
Image normalize_height(const Image& img, int target_h = kModelHeight);

// Lowercases, drops symbols outside `charset`, clamps confidence to [0, 1]
// (1.0 when the backend gave none).
Recognition finalize(const RawTranscription& raw, const Charset& charset = Charset::standard());

// Throws InvalidArgument when the word is not at the backend's model height,
// BackendError (with the backend's diagnostics) when the backend fails. An
// empty transcription is a normal result.
Recognition recognize(const WordImage& word, RecognizerBackend& backend,
                      const Charset& charset = Charset::standard());
std::vector<Recognition> recognize_batch(std::span<const WordImage> words, RecognizerBackend& backend,
                                         const Charset& charset = Charset::standard());

// Subprocess adapter. The command starts once per batch; it reads one crop
// PNG path per line on stdin and answers one JSON object {text, confidence}
// per line on stdout.
class ExternalRecognizer final : public RecognizerBackend {
 public:
  explicit ExternalRecognizer(std::vector<std::string> command, bool single_flight = false,
                              int model_height = kModelHeight);
  std::vector<RawTranscription> transcribe(std::span<const WordImage> words) override;
  bool single_flight() const override { return single_flight_; }
  int model_height() const override { return model_height_; }
  std::string name() const override { return "external"; }

  static std::vector<RawTranscription> parse_output(std::string_view stdout_text, std::size_t expected);

 private:
  std::vector<std::string> command_;
  bool single_flight_;
  int model_height_;
};

}  // namespace overlayx::recognition
