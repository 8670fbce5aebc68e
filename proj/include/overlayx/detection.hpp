#pragma once

#include <span>
#include <string>
#include <vector>

#include "overlayx/image.hpp"

namespace overlayx::detection {

// Word bounding box with a text-presence score in [0, 1].
struct TextBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  double score = 0.0;

  Rect rect() const { return {x, y, w, h}; }
  bool operator==(const TextBox&) const = default;
};

double iou(const TextBox& a, const TextBox& b);

// Detector contract. Implementations either tolerate concurrent detect()
// calls or return true from single_flight(), in which case the pipeline
// serializes them.
class DetectorBackend {
 public:
  virtual ~DetectorBackend() = default;
  virtual std::vector<TextBox> detect(const Image& frame) = 0;
  virtual bool single_flight() const { return false; }
  virtual std::string name() const = 0;
};

inline constexpr double kDefaultNmsIou = 0.45;
inline constexpr int kDefaultMinBoxHeight = 20;
// Horizontal gap, as a fraction of the median glyph height, below which the
// built-in detector joins two glyphs into one word.
inline constexpr double kWordGapFactor = 0.6;

// Greedy NMS: visit boxes by descending score (then ascending x, y, w, h)
// and keep a box iff its IoU with every kept box is below `iou_threshold`.
// Output keeps that visiting order. Throws InvalidArgument unless
// 0 < iou_threshold <= 1.
std::vector<TextBox> nms(std::span<const TextBox> boxes, double iou_threshold = kDefaultNmsIou);

// Drops boxes shorter than min_height and boxes narrower than they are tall.
std::vector<TextBox> filter_boxes(std::span<const TextBox> boxes,
                                  int min_height = kDefaultMinBoxHeight);

// Reference detector: Otsu-binarizes the frame if it is not binary already,
// labels connected components of the minority (ink) class, joins i-dots and
// similar stacked parts into glyphs, and glyphs into words while the
// horizontal gap stays under kWordGapFactor x median glyph height. Score is
// the ink density of the box.
std::vector<TextBox> builtin_detect(const Image& frame);

// Row bands (boxes overlapping vertically by >= 50% of the shorter one) top to
// bottom, left to right inside a band.
std::vector<TextBox> reading_order(std::span<const TextBox> boxes);

// One crop per box, in reading order.
std::vector<Image> crop_words(const Image& frame, std::span<const TextBox> boxes);

class BuiltinDetector final : public DetectorBackend {
 public:
  std::vector<TextBox> detect(const Image& frame) override { return builtin_detect(frame); }
  std::string name() const override { return "builtin"; }
};

// Subprocess adapter. For each frame the command runs with the frame PNG
// path substituted for an "{image}" argument (or appended when there is
// none) and must print one JSON object {x, y, w, h, score} per line. Boxes
// are clipped to the frame; a non-zero exit or malformed output raises
// BackendError.
class ExternalDetector final : public DetectorBackend {
 public:
  explicit ExternalDetector(std::vector<std::string> command, bool single_flight = false);
  std::vector<TextBox> detect(const Image& frame) override;
  bool single_flight() const override { return single_flight_; }
  std::string name() const override { return "external"; }

  // Parses adapter stdout; exposed for tests.
  static std::vector<TextBox> parse_output(std::string_view stdout_text, int frame_w, int frame_h);

 private:
  std::vector<std::string> command_;
  bool single_flight_;
};

}  // namespace overlayx::detection
