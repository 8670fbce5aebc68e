#include "overlayx/detection.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <numeric>
#include <opencv2/imgproc.hpp>

#include "cv_bridge.hpp"
#include "overlayx/codec.hpp"
#include "overlayx/error.hpp"
#include "overlayx/imaging.hpp"
#include "overlayx/subprocess.hpp"

namespace overlayx::detection {

double iou(const TextBox& a, const TextBox& b) {
  const long inter = intersect(a.rect(), b.rect()).area();
  const long uni = a.rect().area() + b.rect().area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

namespace {

bool priority_before(const TextBox& a, const TextBox& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  if (a.w != b.w) return a.w < b.w;
  return a.h < b.h;
}

}  // namespace

std::vector<TextBox> nms(std::span<const TextBox> boxes, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw InvalidArgument("NMS IoU threshold must lie in (0, 1]");
  }
  std::vector<TextBox> order(boxes.begin(), boxes.end());
  std::stable_sort(order.begin(), order.end(), priority_before);
  std::vector<TextBox> kept;
  for (const auto& box : order) {
    const bool clear = std::all_of(kept.begin(), kept.end(), [&](const TextBox& k) {
      return iou(box, k) < iou_threshold;
    });
    if (clear) kept.push_back(box);
  }
  return kept;
}

std::vector<TextBox> filter_boxes(std::span<const TextBox> boxes, int min_height) {
  std::vector<TextBox> out;
  for (const auto& b : boxes) {
    if (b.h >= min_height && b.w >= b.h) out.push_back(b);
  }
  return out;
}

namespace {

struct Blob {
  Rect r;
  long ink = 0;
};

bool overlaps_vertically(const Rect& a, const Rect& b) {
  return std::min(a.bottom(), b.bottom()) > std::max(a.y, b.y);
}

int horizontal_gap(const Rect& a, const Rect& b) {
  return std::max(a.x, b.x) - std::min(a.right(), b.right());
}

// Stacks parts that share columns (i-dots, colons, '!', '?') into one glyph.
// `parts` must be sorted by x.
std::vector<Blob> merge_stacked(const std::vector<Blob>& parts) {
  std::vector<std::size_t> parent(parts.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Rect& a = parts[i].r;
    for (std::size_t j = i + 1; j < parts.size() && parts[j].r.x < a.right(); ++j) {
      const Rect& b = parts[j].r;
      const int shared = std::min(a.right(), b.right()) - std::max(a.x, b.x);
      const int vgap = std::max(a.y, b.y) - std::min(a.bottom(), b.bottom());
      const int tall = std::max(a.h, b.h);
      // Only a small part (dot, bar) stacks onto a larger one, so glyphs of
      // neighbouring text lines stay apart.
      if (shared * 2 >= std::min(a.w, b.w) && vgap * 2 <= tall && std::min(a.h, b.h) * 2 <= tall) {
        parent[find(j)] = find(i);
      }
    }
  }
  std::vector<Blob> merged;
  std::vector<long> slot(parts.size(), -1);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::size_t root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<long>(merged.size());
      merged.push_back(parts[i]);
    } else {
      Blob& m = merged[static_cast<std::size_t>(slot[root])];
      m.r = unite(m.r, parts[i].r);
      m.ink += parts[i].ink;
    }
  }
  return merged;
}

}  // namespace

std::vector<TextBox> builtin_detect(const Image& frame) {
  Image gray = frame.channels() == 3 ? imaging::to_grayscale(frame) : frame;
  const Image binary = is_binary(gray) ? gray : imaging::binarize(gray, imaging::otsu_threshold(gray));

  const long total = static_cast<long>(binary.size());
  const long bright = std::count(binary.data().begin(), binary.data().end(), std::uint8_t{255});
  const std::uint8_t ink_value = bright * 2 <= total ? 255 : 0;
  if (bright == 0 || bright == total) return {};

  cv::Mat mask = cvb::to_mat(binary);
  if (ink_value == 0) mask = 255 - mask;
  cv::Mat labels, stats, centroids;
  const int n = cv::connectedComponentsWithStats(mask, labels, stats, centroids, 8, CV_32S);

  std::vector<Blob> parts;
  for (int i = 1; i < n; ++i) {
    const int area = stats.at<int>(i, cv::CC_STAT_AREA);
    if (area < 3) continue;
    parts.push_back({{stats.at<int>(i, cv::CC_STAT_LEFT), stats.at<int>(i, cv::CC_STAT_TOP),
                      stats.at<int>(i, cv::CC_STAT_WIDTH), stats.at<int>(i, cv::CC_STAT_HEIGHT)},
                     area});
  }
  if (parts.empty()) return {};
  std::sort(parts.begin(), parts.end(), [](const Blob& a, const Blob& b) {
    return a.r.x != b.r.x ? a.r.x < b.r.x : a.r.y < b.r.y;
  });
  std::vector<Blob> glyphs = merge_stacked(parts);
  std::sort(glyphs.begin(), glyphs.end(), [](const Blob& a, const Blob& b) {
    return a.r.x != b.r.x ? a.r.x < b.r.x : a.r.y < b.r.y;
  });

  std::vector<int> heights;
  for (const auto& g : glyphs) heights.push_back(g.r.h);
  std::nth_element(heights.begin(), heights.begin() + static_cast<long>(heights.size() / 2), heights.end());
  const double max_gap = kWordGapFactor * heights[heights.size() / 2];

  // Left to right, each glyph joins the open word it overlaps vertically the
  // most, provided the horizontal gap is small enough.
  std::vector<Blob> words;
  for (const auto& g : glyphs) {
    long best = -1;
    int best_overlap = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      const Rect& w = words[i].r;
      if (!overlaps_vertically(w, g.r) || horizontal_gap(w, g.r) >= max_gap) continue;
      const int overlap = std::min(w.bottom(), g.r.bottom()) - std::max(w.y, g.r.y);
      if (best < 0 || overlap > best_overlap) {
        best = static_cast<long>(i);
        best_overlap = overlap;
      }
    }
    if (best < 0) {
      words.push_back(g);
    } else {
      words[best].r = unite(words[best].r, g.r);
      words[best].ink += g.ink;
    }
  }

  std::vector<TextBox> boxes;
  for (const auto& w : words) {
    boxes.push_back({w.r.x, w.r.y, w.r.w, w.r.h,
                     std::clamp(static_cast<double>(w.ink) / static_cast<double>(w.r.area()), 0.0, 1.0)});
  }
  return reading_order(boxes);
}

std::vector<TextBox> reading_order(std::span<const TextBox> boxes) {
  std::vector<TextBox> sorted(boxes.begin(), boxes.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const TextBox& a, const TextBox& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  std::vector<std::vector<TextBox>> bands;
  for (const auto& box : sorted) {
    bool placed = false;
    for (auto& band : bands) {
      const TextBox& anchor = band.front();
      const int overlap = std::min(anchor.y + anchor.h, box.y + box.h) - std::max(anchor.y, box.y);
      if (overlap * 2 >= std::min(anchor.h, box.h)) {
        band.push_back(box);
        placed = true;
        break;
      }
    }
    if (!placed) bands.push_back({box});
  }
  std::vector<TextBox> out;
  for (auto& band : bands) {
    std::stable_sort(band.begin(), band.end(),
                     [](const TextBox& a, const TextBox& b) { return a.x < b.x; });
    out.insert(out.end(), band.begin(), band.end());
  }
  return out;
}

std::vector<Image> crop_words(const Image& frame, std::span<const TextBox> boxes) {
  std::vector<Image> crops;
  for (const auto& b : reading_order(boxes)) crops.push_back(crop(frame, b.rect()));
  return crops;
}

ExternalDetector::ExternalDetector(std::vector<std::string> command, bool single_flight)
    : command_(std::move(command)), single_flight_(single_flight) {
  if (command_.empty()) throw InvalidArgument("external detector needs a command");
}

std::vector<TextBox> ExternalDetector::parse_output(std::string_view stdout_text, int frame_w,
                                                    int frame_h) {
  std::vector<TextBox> boxes;
  std::size_t start = 0;
  while (start < stdout_text.size()) {
    std::size_t end = stdout_text.find('\n', start);
    if (end == std::string_view::npos) end = stdout_text.size();
    const std::string_view line = stdout_text.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    TextBox box;
    try {
      const auto j = nlohmann::json::parse(line);
      box.x = j.at("x").get<int>();
      box.y = j.at("y").get<int>();
      box.w = j.at("w").get<int>();
      box.h = j.at("h").get<int>();
      box.score = j.value("score", 1.0);
    } catch (const nlohmann::json::exception& e) {
      throw BackendError("detector adapter printed an invalid box line '" + std::string(line) +
                         "': " + e.what());
    }
    const Rect clipped = intersect(box.rect(), {0, 0, frame_w, frame_h});
    if (clipped.w <= 0 || clipped.h <= 0) continue;
    boxes.push_back({clipped.x, clipped.y, clipped.w, clipped.h, std::clamp(box.score, 0.0, 1.0)});
  }
  return boxes;
}

std::vector<TextBox> ExternalDetector::detect(const Image& frame) {
  proc::TempDir dir("overlayx-det");
  const auto png = dir.path() / "frame.png";
  codec::write_image(png, frame);

  std::vector<std::string> argv = command_;
  bool substituted = false;
  for (auto& a : argv) {
    if (a == "{image}") {
      a = png.string();
      substituted = true;
    }
  }
  if (!substituted) argv.push_back(png.string());

  proc::Result res;
  try {
    res = proc::run(argv);
  } catch (const AdapterUnavailable& e) {
    throw BackendError(std::string("detector adapter unavailable: ") + e.what());
  }
  if (res.exit_code != 0) {
    throw BackendError("detector adapter exited with status " + std::to_string(res.exit_code) +
                       ": " + proc::tail(res.err));
  }
  return parse_output(res.out, frame.width(), frame.height());
}

}  // namespace overlayx::detection
