#include "overlayx/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "overlayx/codec.hpp"
#include "overlayx/error.hpp"
#include "overlayx/imaging.hpp"
#include "overlayx/subprocess.hpp"

namespace overlayx::recognition {

Image normalize_height(const Image& img, int target_h) {
  if (img.empty()) throw InvalidArgument("normalize_height: empty image");
  if (target_h <= 0) throw InvalidArgument("normalize_height: target height must be >= 1");
  if (img.height() == target_h) return img;
  const double scaled = static_cast<double>(img.width()) * target_h / img.height();
  const int width = std::max(1, static_cast<int>(std::floor(scaled + 0.5)));
  return imaging::resize_antialias(img, width, target_h);
}

Recognition finalize(const RawTranscription& raw, const Charset& charset) {
  Recognition r;
  r.text = charset.restrict(raw.text);
  double c = raw.confidence.value_or(1.0);
  if (!std::isfinite(c)) c = 0.0;
  r.confidence = std::clamp(c, 0.0, 1.0);
  return r;
}

std::vector<Recognition> recognize_batch(std::span<const WordImage> words, RecognizerBackend& backend,
                                         const Charset& charset) {
  for (const auto& w : words) {
    if (w.image.height() != backend.model_height()) {
      throw InvalidArgument("word image height " + std::to_string(w.image.height()) +
                            " does not match model height " + std::to_string(backend.model_height()));
    }
  }
  std::vector<RawTranscription> raw;
  try {
    raw = backend.transcribe(words);
  } catch (const BackendError&) {
    throw;
  } catch (const std::exception& e) {
    throw BackendError(backend.name() + " recognizer failed: " + e.what());
  }
  if (raw.size() != words.size()) {
    throw BackendError(backend.name() + " recognizer returned " + std::to_string(raw.size()) +
                       " results for " + std::to_string(words.size()) + " words");
  }
  std::vector<Recognition> out;
  out.reserve(raw.size());
  for (const auto& r : raw) out.push_back(finalize(r, charset));
  return out;
}

Recognition recognize(const WordImage& word, RecognizerBackend& backend, const Charset& charset) {
  return recognize_batch(std::span<const WordImage>(&word, 1), backend, charset).front();
}

ExternalRecognizer::ExternalRecognizer(std::vector<std::string> command, bool single_flight,
                                       int model_height)
    : command_(std::move(command)), single_flight_(single_flight), model_height_(model_height) {
  if (command_.empty()) throw InvalidArgument("external recognizer needs a command");
  if (model_height_ <= 0) throw InvalidArgument("model height must be positive");
}

std::vector<RawTranscription> ExternalRecognizer::parse_output(std::string_view stdout_text,
                                                               std::size_t expected) {
  std::vector<RawTranscription> out;
  std::size_t start = 0;
  while (start < stdout_text.size()) {
    std::size_t end = stdout_text.find('\n', start);
    if (end == std::string_view::npos) end = stdout_text.size();
    const std::string_view line = stdout_text.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    RawTranscription r;
    try {
      const auto j = nlohmann::json::parse(line);
      r.text = j.at("text").get<std::string>();
      if (j.contains("confidence") && !j["confidence"].is_null()) {
        r.confidence = j["confidence"].get<double>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw BackendError("recognizer adapter printed an invalid line '" + std::string(line) +
                         "': " + e.what());
    }
    out.push_back(std::move(r));
  }
  if (out.size() != expected) {
    throw BackendError("recognizer adapter answered " + std::to_string(out.size()) +
                       " lines for " + std::to_string(expected) + " inputs");
  }
  return out;
}

std::vector<RawTranscription> ExternalRecognizer::transcribe(std::span<const WordImage> words) {
  if (words.empty()) return {};
  proc::TempDir dir("overlayx-rec");
  std::string request;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto path = dir.path() / ("word_" + std::to_string(i) + ".png");
    codec::write_image(path, words[i].image);
    request += path.string();
    request += '\n';
  }
  proc::Result res;
  try {
    res = proc::run(command_, request);
  } catch (const AdapterUnavailable& e) {
    throw BackendError(std::string("recognizer adapter unavailable: ") + e.what());
  }
  if (res.exit_code != 0) {
    throw BackendError("recognizer adapter exited with status " + std::to_string(res.exit_code) +
                       ": " + proc::tail(res.err));
  }
  return parse_output(res.out, words.size());
}

}  // namespace overlayx::recognition
