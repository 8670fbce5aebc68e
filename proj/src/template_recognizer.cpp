#include "overlayx/template_recognizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "overlayx/error.hpp"
#include "overlayx/imaging.hpp"

namespace overlayx::recognition {

namespace {

using Shape = std::array<float, kGlyphGrid * kGlyphGrid>;

// Cost weights: geometry terms are in em, the shape term is a mean absolute
// difference in [0, 1].
constexpr double kPositionWeight = 1.5;
constexpr double kWidthWeight = 1.0;
constexpr double kAspectWeight = 0.35;
constexpr double kPerGlyphPenalty = 0.04;
constexpr int kMaxPiecesPerGlyph = 4;

Shape shape_of(const std::vector<std::uint8_t>& ink, int stride, const Rect& box) {
  Image tight(box.w, box.h, 1);
  for (int y = 0; y < box.h; ++y) {
    for (int x = 0; x < box.w; ++x) {
      tight.at(x, y) = ink[static_cast<std::size_t>(box.y + y) * stride + box.x + x] ? 255 : 0;
    }
  }
  const Image grid = imaging::resize_antialias(tight, kGlyphGrid, kGlyphGrid);
  Shape s{};
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = grid.data()[i] / 255.0f;
  return s;
}

double shape_distance(const Shape& a, const Shape& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::fabs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

std::vector<double> distinct_lines(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || x - out.back() > 0.03) out.push_back(x);
  }
  return out;
}

// Tight box of ink within columns [x0, x1).
Rect ink_box(const std::vector<std::uint8_t>& ink, int w, int h, int x0, int x1) {
  int top = h, bottom = -1, left = x1, right = x0 - 1;
  for (int y = 0; y < h; ++y) {
    for (int x = x0; x < x1; ++x) {
      if (ink[static_cast<std::size_t>(y) * w + x]) {
        top = std::min(top, y);
        bottom = std::max(bottom, y);
        left = std::min(left, x);
        right = std::max(right, x);
      }
    }
  }
  if (bottom < 0) return {x0, 0, 0, 0};
  return {left, top, right - left + 1, bottom - top + 1};
}

// Pixels that belong to one piece: a column slice of a cluster of
// connected components.
struct Piece {
  int cluster;
  int x0, x1;  // [x0, x1)
};

struct Span {
  int cluster;
  int first_piece;  // index into the cluster's pieces
  int last_piece;   // inclusive
  Rect box;
  std::vector<double> shape_cost;  // per atlas glyph
};

struct Segmentation {
  int w = 0, h = 0;
  int ytop = 0;
  double word_h = 0.0;
  std::vector<int> label;                      // piece id per pixel, -1 for background
  std::vector<std::vector<Piece>> clusters;    // pieces of each cluster in x order
  std::vector<std::vector<int>> piece_ids;     // global piece id per cluster piece
};

std::vector<int> label_components(const std::vector<std::uint8_t>& ink, int w, int h, int& count) {
  std::vector<int> comp(ink.size(), -1);
  std::vector<int> stack;
  count = 0;
  for (std::size_t i = 0; i < ink.size(); ++i) {
    if (!ink[i] || comp[i] >= 0) continue;
    comp[i] = count;
    stack.push_back(static_cast<int>(i));
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      const int px = p % w, py = p / w;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = px + dx, ny = py + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
          if (ink[q] && comp[q] < 0) {
            comp[q] = count;
            stack.push_back(static_cast<int>(q));
          }
        }
      }
    }
    ++count;
  }
  return comp;
}

Segmentation segment(const std::vector<std::uint8_t>& ink, int w, int h) {
  Segmentation seg;
  seg.w = w;
  seg.h = h;
  seg.label.assign(ink.size(), -1);
  int ncomp = 0;
  const std::vector<int> comp = label_components(ink, w, h, ncomp);
  if (ncomp == 0) return seg;

  std::vector<int> cx0(ncomp, w), cx1(ncomp, -1);
  int ytop = h, ybot = -1;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int c = comp[static_cast<std::size_t>(y) * w + x];
      if (c < 0) continue;
      cx0[c] = std::min(cx0[c], x);
      cx1[c] = std::max(cx1[c], x + 1);
      ytop = std::min(ytop, y);
      ybot = std::max(ybot, y);
    }
  }
  seg.ytop = ytop;
  seg.word_h = ybot - ytop + 1;

  // Stacked parts (dots, accents) share most of their columns with the
  // component beneath them.
  std::vector<int> parent(ncomp);
  for (int i = 0; i < ncomp; ++i) parent[i] = i;
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int a = 0; a < ncomp; ++a) {
    for (int b = a + 1; b < ncomp; ++b) {
      const int overlap = std::min(cx1[a], cx1[b]) - std::max(cx0[a], cx0[b]);
      const int narrow = std::min(cx1[a] - cx0[a], cx1[b] - cx0[b]);
      if (overlap * 2 >= narrow) parent[find(a)] = find(b);
    }
  }
  std::vector<int> cluster_of_root(ncomp, -1);
  std::vector<std::pair<int, int>> cluster_range;  // [x0, x1)
  std::vector<int> comp_cluster(ncomp);
  {
    // Number clusters left to right so the output order is stable.
    std::vector<int> order(ncomp);
    for (int i = 0; i < ncomp; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return cx0[a] != cx0[b] ? cx0[a] < cx0[b] : a < b; });
    for (int c : order) {
      const int r = find(c);
      if (cluster_of_root[r] < 0) {
        cluster_of_root[r] = static_cast<int>(cluster_range.size());
        cluster_range.emplace_back(cx0[c], cx1[c]);
      }
      auto& range = cluster_range[cluster_of_root[r]];
      range.first = std::min(range.first, cx0[c]);
      range.second = std::max(range.second, cx1[c]);
      comp_cluster[c] = cluster_of_root[r];
    }
  }

  // Touching glyphs are split at low projection valleys of the cluster.
  const int cut_max = std::max(1, static_cast<int>(std::lround(0.15 * seg.word_h)));
  int next_piece = 0;
  seg.clusters.resize(cluster_range.size());
  seg.piece_ids.resize(cluster_range.size());
  for (std::size_t k = 0; k < cluster_range.size(); ++k) {
    const auto [x0, x1] = cluster_range[k];
    std::vector<int> proj(x1 - x0, 0);
    for (int y = 0; y < h; ++y) {
      for (int x = x0; x < x1; ++x) {
        const int c = comp[static_cast<std::size_t>(y) * w + x];
        if (c >= 0 && comp_cluster[c] == static_cast<int>(k)) ++proj[x - x0];
      }
    }
    const int n = x1 - x0;
    std::vector<int> cuts;
    for (int c = 1; c < n - 1;) {
      int q = c;
      while (q + 1 < n - 1 && proj[q + 1] == proj[c]) ++q;
      if (proj[c] <= cut_max && proj[c - 1] > proj[c] && proj[q + 1] > proj[c]) cuts.push_back(x0 + (c + q + 1) / 2);
      c = q + 1;
    }
    int start = x0;
    for (int c : cuts) {
      if (c > start) seg.clusters[k].push_back({static_cast<int>(k), start, c});
      start = c;
    }
    seg.clusters[k].push_back({static_cast<int>(k), start, x1});
    for (const Piece& p : seg.clusters[k]) {
      for (int y = 0; y < h; ++y) {
        for (int x = p.x0; x < p.x1; ++x) {
          const std::size_t i = static_cast<std::size_t>(y) * w + x;
          if (comp[i] >= 0 && comp_cluster[comp[i]] == static_cast<int>(k)) seg.label[i] = next_piece;
        }
      }
      seg.piece_ids[k].push_back(next_piece++);
    }
  }
  return seg;
}

// Tight box and shape of the pixels labelled [lo, hi].
bool span_geometry(const Segmentation& seg, int lo, int hi, Rect& box, Shape& shape) {
  int top = seg.h, bottom = -1, left = seg.w, right = -1;
  for (int y = 0; y < seg.h; ++y) {
    for (int x = 0; x < seg.w; ++x) {
      const int l = seg.label[static_cast<std::size_t>(y) * seg.w + x];
      if (l >= lo && l <= hi) {
        top = std::min(top, y);
        bottom = std::max(bottom, y);
        left = std::min(left, x);
        right = std::max(right, x);
      }
    }
  }
  if (bottom < 0) return false;
  box = {left, top, right - left + 1, bottom - top + 1};
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(seg.w) * seg.h, 0);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = seg.label[i] >= lo && seg.label[i] <= hi;
  shape = shape_of(mask, seg.w, box);
  return true;
}

struct Explanation {
  double cost = std::numeric_limits<double>::infinity();
  std::size_t glyphs = 0;
  double mean_cost() const { return glyphs ? cost / static_cast<double>(glyphs) : cost; }
  Recognition result;
};

// Best reading of one ink mask over every font and line hypothesis.
Explanation explain(const std::vector<std::uint8_t>& ink, int w, int h, const GlyphAtlas& atlas) {
  const Segmentation seg = segment(ink, w, h);
  if (seg.clusters.empty()) return {};
  const auto& glyphs = atlas.glyphs();

  std::vector<Span> spans;
  std::vector<std::vector<std::vector<std::size_t>>> spans_ending(seg.clusters.size());
  for (std::size_t k = 0; k < seg.clusters.size(); ++k) {
    const int n = static_cast<int>(seg.clusters[k].size());
    spans_ending[k].resize(n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n && j < i + kMaxPiecesPerGlyph; ++j) {
        Span s{static_cast<int>(k), i, j, {}, {}};
        Shape shape;
        if (!span_geometry(seg, seg.piece_ids[k][i], seg.piece_ids[k][j], s.box, shape)) continue;
        s.shape_cost.reserve(glyphs.size());
        for (const auto& g : glyphs) s.shape_cost.push_back(shape_distance(shape, g.shape));
        spans_ending[k][j].push_back(spans.size());
        spans.push_back(std::move(s));
      }
    }
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  Explanation best;
  std::vector<std::pair<std::size_t, std::size_t>> best_path;  // (span, glyph)

  for (std::size_t f = 0; f < atlas.font_count(); ++f) {
    std::vector<std::size_t> font_glyphs;
    for (std::size_t g = 0; g < glyphs.size(); ++g) {
      if (glyphs[g].font_id == f) font_glyphs.push_back(g);
    }
    for (double top : atlas.top_lines(f)) {
      for (double bottom : atlas.bottom_lines(f)) {
        if (top - bottom < 0.1) continue;
        const double scale = seg.word_h / (top - bottom);  // px per em
        const double baseline = seg.ytop + top * scale;

        // Best glyph per span under this hypothesis.
        std::vector<double> span_cost(spans.size(), kInf);
        std::vector<std::size_t> span_glyph(spans.size(), 0);
        for (std::size_t si = 0; si < spans.size(); ++si) {
          const Span& s = spans[si];
          const double o_top = (baseline - s.box.y) / scale;
          const double o_bottom = (baseline - s.box.bottom()) / scale;
          const double o_width = s.box.w / scale;
          const double o_aspect = static_cast<double>(s.box.w) / s.box.h;
          for (std::size_t g : font_glyphs) {
            const GlyphTemplate& tg = glyphs[g];
            const double cost = s.shape_cost[g] +
                                kPositionWeight * (std::fabs(o_top - tg.top) + std::fabs(o_bottom - tg.bottom)) +
                                kWidthWeight * std::fabs(o_width - tg.width) +
                                kAspectWeight * std::fabs(std::log(o_aspect / tg.aspect));
            if (cost < span_cost[si]) {
              span_cost[si] = cost;
              span_glyph[si] = g;
            }
          }
        }

        // Clusters are independent given the hypothesis.
        double total = 0.0;
        std::vector<std::pair<std::size_t, std::size_t>> path;
        for (std::size_t k = 0; k < seg.clusters.size() && total < best.cost; ++k) {
          const std::size_t n = seg.clusters[k].size();
          std::vector<double> dp(n + 1, kInf);
          std::vector<std::size_t> via(n + 1, 0);
          dp[0] = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t si : spans_ending[k][j]) {
              const double prev = dp[spans[si].first_piece];
              if (prev == kInf) continue;
              const double c = prev + span_cost[si] + kPerGlyphPenalty;
              if (c < dp[j + 1]) {
                dp[j + 1] = c;
                via[j + 1] = si;
              }
            }
          }
          total += dp[n];
          if (dp[n] == kInf) break;
          for (std::size_t j = n; j > 0;) {
            const std::size_t si = via[j];
            path.emplace_back(si, span_glyph[si]);
            j = static_cast<std::size_t>(spans[si].first_piece);
          }
        }
        if (total < best.cost) {
          best.cost = total;
          best_path = std::move(path);
        }
      }
    }
  }
  if (best_path.empty()) return best;
  best.glyphs = best_path.size();

  std::sort(best_path.begin(), best_path.end(), [&](const auto& a, const auto& b) {
    const Rect& ra = spans[a.first].box;
    const Rect& rb = spans[b.first].box;
    const int ca = 2 * ra.x + ra.w, cb = 2 * rb.x + rb.w;
    return ca != cb ? ca < cb : a.first < b.first;
  });
  double similarity = 0.0;
  for (const auto& [si, g] : best_path) {
    best.result.text += glyphs[g].symbol;
    similarity += 1.0 - spans[si].shape_cost[g];
  }
  best.result.confidence = std::clamp(similarity / static_cast<double>(best_path.size()), 0.0, 1.0);
  return best;
}

}  // namespace

GlyphAtlas GlyphAtlas::build(const fonts::FontSet& fonts, const Charset& charset, int reference_size) {
  if (fonts.size() == 0) throw InvalidArgument("glyph atlas needs at least one font");
  std::vector<std::string> symbols;
  for (char c : charset.symbols()) symbols.emplace_back(1, c);
  for (const char* lig : {"fi", "fl", "ff", "ffi", "ffl"}) {
    const std::string s(lig);
    if (std::all_of(s.begin(), s.end(), [&](char c) { return charset.contains(c); })) symbols.push_back(s);
  }

  GlyphAtlas atlas;
  atlas.tops_.resize(fonts.size());
  atlas.bottoms_.resize(fonts.size());
  const double ref = reference_size;
  for (std::size_t f = 0; f < fonts.size(); ++f) {
    std::vector<double> tops, bottoms;
    for (const auto& sym : symbols) {
      const fonts::TextMask m = fonts.render(f, sym, reference_size);
      const int w = m.coverage.width();
      const int h = m.coverage.height();
      std::vector<std::uint8_t> ink(static_cast<std::size_t>(w) * h);
      for (std::size_t i = 0; i < ink.size(); ++i) ink[i] = m.coverage.data()[i] >= 128 ? 1 : 0;
      const Rect box = ink_box(ink, w, h, 0, w);
      if (box.w == 0) continue;
      GlyphTemplate g;
      g.symbol = sym;
      g.font_id = static_cast<std::uint32_t>(f);
      g.shape = shape_of(ink, w, box);
      g.top = (m.baseline - box.y) / ref;
      g.bottom = (m.baseline - box.bottom()) / ref;
      g.width = box.w / ref;
      g.aspect = static_cast<double>(box.w) / box.h;
      if (sym.size() == 1) {
        tops.push_back(g.top);
        bottoms.push_back(g.bottom);
      }
      atlas.glyphs_.push_back(std::move(g));
    }
    atlas.tops_[f] = distinct_lines(tops);
    atlas.bottoms_[f] = distinct_lines(bottoms);
  }
  return atlas;
}

Recognition template_recognize(const WordImage& word, const GlyphAtlas& atlas) {
  if (word.image.empty()) return {};
  const Image gray = word.image.channels() == 3 ? imaging::to_grayscale(word.image) : word.image;
  const int w = gray.width();
  const int h = gray.height();
  const std::uint8_t t = imaging::otsu_threshold(gray);

  // Polarity. Crops with a margin have background-only top and bottom rows.
  // Tight crops are the bounding box of their ink, so the ink reaches every
  // side (give or take faint antialiasing the threshold dropped). Failing
  // both, the reading with the lower cost per glyph wins.
  std::vector<std::uint8_t> bright(static_cast<std::size_t>(w) * h);
  std::vector<std::uint8_t> dark(bright.size());
  long bright_total = 0;
  for (std::size_t i = 0; i < bright.size(); ++i) {
    bright[i] = gray.data()[i] > t;
    dark[i] = !bright[i];
    bright_total += bright[i];
  }
  const long total = static_cast<long>(bright.size());
  if (bright_total == 0 || bright_total == total) return {};
  long edge_bright = 0;
  for (int x = 0; x < w; ++x) edge_bright += bright[x] + bright[static_cast<std::size_t>(h - 1) * w + x];
  const double bright_share = static_cast<double>(edge_bright) / (2.0 * w);
  if (bright_share >= 0.8) return explain(dark, w, h, atlas).result;
  if (bright_share <= 0.2) return explain(bright, w, h, atlas).result;

  const int margin = std::max(1, h / 16);
  auto touches_all_sides = [&](bool want_bright) {
    bool top = false, bottom = false, left = false, right = false;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (bright[static_cast<std::size_t>(y) * w + x] != want_bright) continue;
        top |= y < margin;
        bottom |= y >= h - margin;
        left |= x < margin;
        right |= x >= w - margin;
      }
    }
    return top && bottom && left && right;
  };
  const bool dark_tight = touches_all_sides(false);
  const bool bright_tight = touches_all_sides(true);
  if (dark_tight != bright_tight) return explain(dark_tight ? dark : bright, w, h, atlas).result;
  const Explanation as_dark = explain(dark, w, h, atlas);
  const Explanation as_bright = explain(bright, w, h, atlas);
  return (as_bright.mean_cost() < as_dark.mean_cost() ? as_bright : as_dark).result;
}

std::vector<RawTranscription> TemplateRecognizer::transcribe(std::span<const WordImage> words) {
  std::vector<RawTranscription> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    const Recognition r = template_recognize(w, *atlas_);
    out.push_back({r.text, r.confidence});
  }
  return out;
}

}  // namespace overlayx::recognition
