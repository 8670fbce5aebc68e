#include "overlayx/synthgen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "overlayx/charset.hpp"
#include "overlayx/codec.hpp"
#include "overlayx/error.hpp"
#include "overlayx/imaging.hpp"

namespace overlayx::synth {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

int luma(int r, int g, int b) { return (299 * r + 587 * g + 114 * b + 500) / 1000; }

std::uint8_t clamp_u8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

std::array<double, 3> random_color(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, 255);
  return {static_cast<double>(d(rng)), static_cast<double>(d(rng)), static_cast<double>(d(rng))};
}

Image gradient(std::mt19937_64& rng, int w, int h) {
  const auto a = random_color(rng);
  const auto b = random_color(rng);
  const double angle = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
  const double dx = std::cos(angle), dy = std::sin(angle);
  const double span = std::fabs(dx) * w + std::fabs(dy) * h;
  const double x0 = dx < 0 ? w : 0, y0 = dy < 0 ? h : 0;
  Image img(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double t = ((x - x0) * dx + (y - y0) * dy) / span;
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = clamp_u8(a[c] + (b[c] - a[c]) * t);
    }
  }
  return img;
}

Image value_noise(std::mt19937_64& rng, int w, int h) {
  std::uniform_int_distribution<int> cells_d(3, 12);
  const int gx = cells_d(rng), gy = std::max(2, gx * h / w);
  const auto base = random_color(rng);
  std::uniform_real_distribution<double> jitter(-60.0, 60.0);
  std::vector<std::array<double, 3>> grid(static_cast<std::size_t>(gx + 1) * (gy + 1));
  for (auto& g : grid) {
    for (int c = 0; c < 3; ++c) g[c] = base[c] + jitter(rng);
  }
  std::uniform_int_distribution<int> grain(-6, 6);
  Image img(w, h, 3);
  for (int y = 0; y < h; ++y) {
    const double fy = static_cast<double>(y) * gy / h;
    const int iy = std::min(static_cast<int>(fy), gy - 1);
    const double ty = fy - iy;
    for (int x = 0; x < w; ++x) {
      const double fx = static_cast<double>(x) * gx / w;
      const int ix = std::min(static_cast<int>(fx), gx - 1);
      const double tx = fx - ix;
      const auto& g00 = grid[static_cast<std::size_t>(iy) * (gx + 1) + ix];
      const auto& g01 = grid[static_cast<std::size_t>(iy) * (gx + 1) + ix + 1];
      const auto& g10 = grid[static_cast<std::size_t>(iy + 1) * (gx + 1) + ix];
      const auto& g11 = grid[static_cast<std::size_t>(iy + 1) * (gx + 1) + ix + 1];
      const int n = grain(rng);
      for (int c = 0; c < 3; ++c) {
        const double top = g00[c] + (g01[c] - g00[c]) * tx;
        const double bot = g10[c] + (g11[c] - g10[c]) * tx;
        img.at(x, y, c) = clamp_u8(top + (bot - top) * ty + n);
      }
    }
  }
  return img;
}

Image stripes(std::mt19937_64& rng, int w, int h) {
  const auto a = random_color(rng);
  auto b = a;
  std::uniform_real_distribution<double> shift(-45.0, 45.0);
  for (auto& v : b) v += shift(rng);
  const double period = std::uniform_real_distribution<double>(12.0, 80.0)(rng);
  const double angle = std::uniform_real_distribution<double>(0.0, std::numbers::pi)(rng);
  const double dx = std::cos(angle), dy = std::sin(angle);
  Image img(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double t = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * (x * dx + y * dy) / period);
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = clamp_u8(a[c] + (b[c] - a[c]) * t);
    }
  }
  return img;
}

Image blobs(std::mt19937_64& rng, int w, int h) {
  Image img = gradient(rng, w, h);
  std::uniform_int_distribution<int> count_d(3, 8);
  std::uniform_real_distribution<double> px(0.0, w), py(0.0, h), radius(20.0, 120.0), weight(0.3, 0.8);
  const int n = count_d(rng);
  for (int k = 0; k < n; ++k) {
    const double cx = px(rng), cy = py(rng), r = radius(rng), wgt = weight(rng);
    const auto col = random_color(rng);
    const int x0 = std::max(0, static_cast<int>(cx - 3 * r)), x1 = std::min(w, static_cast<int>(cx + 3 * r) + 1);
    const int y0 = std::max(0, static_cast<int>(cy - 3 * r)), y1 = std::min(h, static_cast<int>(cy + 3 * r) + 1);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        const double d2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2.0 * r * r);
        const double a = wgt * std::exp(-d2);
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = clamp_u8(img.at(x, y, c) * (1.0 - a) + col[c] * a);
      }
    }
  }
  return img;
}

std::uint8_t coverage_at(const fonts::TextMask& m, int x, int y) {
  if (x < 0 || y < 0 || x >= m.coverage.width() || y >= m.coverage.height()) return 0;
  return m.coverage.at(x, y);
}

std::uint8_t blend(std::uint8_t bg, std::uint8_t fg, std::uint8_t a) {
  return static_cast<std::uint8_t>((bg * (255 - a) + fg * a + 127) / 255);
}

double mean_luma(const Image& img, const Rect& r) {
  long sum = 0;
  for (int y = r.y; y < r.bottom(); ++y) {
    for (int x = r.x; x < r.right(); ++x) sum += luma(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
  }
  return static_cast<double>(sum) / static_cast<double>(r.area());
}

}  // namespace

WordList build_wordlist(std::span<const std::string> transcript_texts, std::string_view freq_text) {
  const Charset& cs = Charset::standard();
  std::set<std::string> words;
  auto keep = [&](std::string_view raw) {
    std::string w = cs.clean_token(raw);
    if (w.size() >= 3) words.insert(std::move(w));
  };
  for (const auto& text : transcript_texts) {
    for (auto tok : split_ws(text)) keep(tok);
  }
  std::istringstream lines{std::string(freq_text)};
  std::string line;
  while (std::getline(lines, line)) {
    for (auto tok : split_ws(line)) {
      if (std::any_of(tok.begin(), tok.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); })) {
        keep(tok);
        break;
      }
    }
  }
  if (words.empty()) throw InvalidArgument("word list is empty after filtering");
  WordList out(words.begin(), words.end());
  for (char d = '0'; d <= '9'; ++d) out.emplace_back(1, d);
  for (char c : cs.symbols()) {
    if (Charset::is_mark(c)) out.emplace_back(1, c);
  }
  return out;
}

WordList build_wordlist(std::span<const fs::path> transcripts, const fs::path& freq_list) {
  std::vector<std::string> texts;
  for (const auto& p : transcripts) texts.push_back(read_text(p));
  const std::string freq = freq_list.empty() ? std::string() : read_text(freq_list);
  return build_wordlist(texts, freq);
}

BackgroundPool BackgroundPool::procedural(std::size_t count, std::uint64_t seed, int width, int height) {
  if (width <= 0 || height <= 0) throw InvalidArgument("background size must be positive");
  BackgroundPool pool;
  for (std::size_t i = 0; i < count; ++i) {
    std::mt19937_64 rng(sample_seed(seed, i));
    switch (i % 4) {
      case 0: pool.add(gradient(rng, width, height)); break;
      case 1: pool.add(value_noise(rng, width, height)); break;
      case 2: pool.add(stripes(rng, width, height)); break;
      default: pool.add(blobs(rng, width, height)); break;
    }
  }
  return pool;
}

BackgroundPool BackgroundPool::load_dir(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw InvalidArgument("background directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string ext = e.path().extension().string();
    if (e.is_regular_file() && (ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".PNG" || ext == ".JPG")) {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  BackgroundPool pool;
  for (const auto& f : files) {
    Image img;
    try {
      img = codec::read_image(f);
    } catch (const CodecError& e) {
      throw InvalidArgument("background " + f.string() + ": " + e.what());
    }
    if (img.channels() == 1) {
      Image rgb(img.width(), img.height(), 3);
      for (std::size_t i = 0; i < img.size(); ++i) {
        for (int c = 0; c < 3; ++c) rgb.data()[i * 3 + c] = img.data()[i];
      }
      img = std::move(rgb);
    }
    pool.add(std::move(img));
  }
  return pool;
}

BackgroundPool BackgroundPool::solid(std::span<const std::array<std::uint8_t, 3>> colors, int width, int height) {
  BackgroundPool pool;
  for (const auto& col : colors) {
    Image img(width, height, 3);
    for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] = col[i % 3];
    pool.add(std::move(img));
  }
  return pool;
}

void BackgroundPool::add(Image rgb) {
  if (rgb.channels() != 3 || rgb.empty()) throw ImageFormatError("backgrounds must be non-empty RGB images");
  images_.push_back(std::move(rgb));
}

Rect crop_extent(const fonts::TextMask& mask) {
  const int mx = static_cast<int>(std::ceil(0.1 * mask.ink.w));
  const int my = static_cast<int>(std::ceil(0.1 * mask.ink.h));
  return {mask.ink.x - mx, mask.ink.y - my, mask.ink.w + 2 * mx, mask.ink.h + 2 * my};
}

SampleSpec sample_spec(std::string_view word, const Assets& assets, std::uint64_t spec_seed, int min_size,
                       int max_size, int max_retries) {
  if (assets.fonts.size() == 0) throw InvalidArgument("no fonts");
  if (assets.backgrounds.empty()) throw InvalidArgument("no backgrounds");
  if (min_size < 1 || max_size < min_size) throw InvalidArgument("bad font size range");
  std::mt19937_64 rng(spec_seed);
  std::uniform_int_distribution<std::uint32_t> font_d(0, static_cast<std::uint32_t>(assets.fonts.size() - 1));
  std::uniform_int_distribution<int> size_d(min_size, max_size);
  std::uniform_int_distribution<std::uint32_t> bg_d(0, static_cast<std::uint32_t>(assets.backgrounds.size() - 1));
  std::uniform_int_distribution<int> channel(0, 255);

  for (int attempt = 0; attempt < max_retries; ++attempt) {
    SampleSpec s;
    s.word = std::string(word);
    s.seed = spec_seed;
    s.font_id = font_d(rng);
    s.size = size_d(rng);
    s.background_id = bg_d(rng);
    const fonts::TextMask mask = assets.fonts.render(s.font_id, word, s.size);
    if (mask.ink.w == 0) throw InvalidArgument("word '" + std::string(word) + "' renders no ink");
    const Rect ext = crop_extent(mask);
    const Image& bg = assets.backgrounds.at(s.background_id);
    if (ext.w > bg.width() || ext.h > bg.height()) continue;
    s.crop_x = std::uniform_int_distribution<int>(0, bg.width() - ext.w)(rng);
    s.crop_y = std::uniform_int_distribution<int>(0, bg.height() - ext.h)(rng);
    const double bg_luma = mean_luma(bg, {s.crop_x, s.crop_y, ext.w, ext.h});
    bool found = false;
    for (int k = 0; k < 64 && !found; ++k) {
      const int r = channel(rng), g = channel(rng), b = channel(rng);
      if (std::fabs(luma(r, g, b) - bg_luma) >= kMinLumaContrast) {
        s.color = {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
        found = true;
      }
    }
    if (!found) {
      const std::uint8_t v = bg_luma < 128.0 ? 255 : 0;
      s.color = {v, v, v};
    }
    return s;
  }
  throw InvalidArgument("word '" + std::string(word) + "' does not fit any background after " +
                        std::to_string(max_retries) + " attempts");
}

Image render_word_crop(const SampleSpec& spec, const Assets& assets) {
  if (spec.font_id >= assets.fonts.size()) throw InvalidArgument("font id out of range");
  if (spec.background_id >= assets.backgrounds.size()) throw InvalidArgument("background id out of range");
  const fonts::TextMask mask = assets.fonts.render(spec.font_id, spec.word, spec.size);
  const Rect ext = crop_extent(mask);
  const Image& bg = assets.backgrounds.at(spec.background_id);
  const Rect region{spec.crop_x, spec.crop_y, ext.w, ext.h};
  if (region.x < 0 || region.y < 0 || region.right() > bg.width() || region.bottom() > bg.height()) {
    throw InvalidArgument("crop offset puts the sample outside its background");
  }
  Image out = crop(bg, region);
  for (int y = 0; y < ext.h; ++y) {
    for (int x = 0; x < ext.w; ++x) {
      const std::uint8_t a = coverage_at(mask, ext.x + x, ext.y + y);
      if (a == 0) continue;
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = blend(out.at(x, y, c), spec.color[c], a);
    }
  }
  return out;
}

Image render_sample(const SampleSpec& spec, const Assets& assets) {
  return imaging::resize_antialias(render_word_crop(spec, assets), kSampleWidth, kSampleHeight);
}

nlohmann::json to_json(const SampleSpec& s) {
  return {{"word", s.word},
          {"font_id", s.font_id},
          {"size", s.size},
          {"color", {s.color[0], s.color[1], s.color[2]}},
          {"background_id", s.background_id},
          {"crop_offset", {s.crop_x, s.crop_y}},
          {"seed", s.seed}};
}

SampleSpec spec_from_json(const nlohmann::json& j) {
  SampleSpec s;
  s.word = j.at("word").get<std::string>();
  s.font_id = j.at("font_id").get<std::uint32_t>();
  s.size = j.at("size").get<int>();
  for (int c = 0; c < 3; ++c) s.color[c] = j.at("color").at(c).get<std::uint8_t>();
  s.background_id = j.at("background_id").get<std::uint32_t>();
  s.crop_x = j.at("crop_offset").at(0).get<int>();
  s.crop_y = j.at("crop_offset").at(1).get<int>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

std::uint64_t sample_seed(std::uint64_t master, std::uint64_t sample_index) {
  std::uint64_t z = master + (sample_index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<ManifestEntry> generate_dataset(const WordList& words, const Assets& assets,
                                            std::uint32_t samples_per_word, std::uint64_t seed,
                                            const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const std::size_t total = words.size() * samples_per_word;
  std::vector<ManifestEntry> entries(total);
  if (total > 0) fs::create_directories(out_dir / "images");

  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t i = 0; i < total; ++i) {
    try {
      const std::string& word = words[i / samples_per_word];
      ManifestEntry& e = entries[i];
      e.spec = sample_spec(word, assets, sample_seed(seed, i));
      e.label = word;
      char name[32];
      std::snprintf(name, sizeof name, "images/%06zu.jpg", i);
      e.path = name;
      codec::write_bytes(out_dir / e.path, codec::encode_jpeg(render_sample(e.spec, assets)));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::ofstream manifest(out_dir / "manifest.jsonl", std::ios::binary | std::ios::trunc);
  if (!manifest) throw InvalidArgument("cannot write manifest in " + out_dir.string());
  for (const auto& e : entries) {
    manifest << nlohmann::json{{"path", e.path}, {"label", e.label}, {"spec", to_json(e.spec)}}.dump() << '\n';
  }
  return entries;
}

FrameFixture generate_frame_fixture(std::span<const PlacedWord> layout, const fonts::FontSet& fonts,
                                    const FrameStyle& style, std::uint64_t seed) {
  if (style.width <= 0 || style.height <= 0) throw InvalidArgument("frame size must be positive");
  if (style.font_id >= fonts.size()) throw InvalidArgument("font id out of range");
  FrameFixture fx;
  fx.frame = Image(style.width, style.height, 3);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> noise(-style.noise, style.noise);
  for (int y = 0; y < style.height; ++y) {
    for (int x = 0; x < style.width; ++x) {
      const int n = style.noise > 0 ? noise(rng) : 0;
      for (int c = 0; c < 3; ++c) fx.frame.at(x, y, c) = clamp_u8(style.background[c] + n);
    }
  }

  const int ascent = fonts.ascent(style.font_id, style.size);
  for (const auto& word : layout) {
    const fonts::TextMask mask = fonts.render(style.font_id, word.text, style.size);
    if (mask.ink.w == 0) continue;
    const int dx = word.x - mask.origin_x;
    const int dy = word.y + ascent - mask.baseline;
    const Rect box{mask.ink.x + dx, mask.ink.y + dy, mask.ink.w, mask.ink.h};
    if (box.x < 0 || box.y < 0 || box.right() > style.width || box.bottom() > style.height) {
      throw InvalidArgument("word '" + word.text + "' does not fit in the frame");
    }
    for (const auto& other : fx.boxes) {
      if (intersect(other.box, box).area() > 0) {
        throw InvalidArgument("words '" + other.text + "' and '" + word.text + "' overlap");
      }
    }
    for (int y = mask.ink.y; y < mask.ink.bottom(); ++y) {
      for (int x = mask.ink.x; x < mask.ink.right(); ++x) {
        const std::uint8_t a = mask.coverage.at(x, y);
        if (a == 0) continue;
        for (int c = 0; c < 3; ++c) {
          std::uint8_t& px = fx.frame.at(x + dx, y + dy, c);
          px = blend(px, style.text[c], a);
        }
      }
    }
    fx.boxes.push_back({box, word.text});
  }
  return fx;
}

std::vector<PlacedWord> layout_line(std::span<const std::string> words, const fonts::FontSet& fonts,
                                    const FrameStyle& style, int x, int y, double gap_em) {
  std::vector<PlacedWord> out;
  const int gap = static_cast<int>(std::lround(gap_em * style.size));
  for (const auto& w : words) {
    out.push_back({w, x, y});
    x += fonts.advance(style.font_id, w, style.size) + gap;
  }
  return out;
}

std::vector<PlacedWord> layout_caption(std::span<const std::string> lines, const fonts::FontSet& fonts,
                                       const FrameStyle& style, int x, int y, double line_gap_em, double word_gap_em) {
  std::vector<PlacedWord> out;
  const int step = static_cast<int>(std::lround((1.0 + line_gap_em) * style.size));
  for (const auto& line : lines) {
    std::vector<std::string> words;
    for (auto w : split_ws(line)) words.emplace_back(w);
    for (auto& p : layout_line(words, fonts, style, x, y, word_gap_em)) out.push_back(std::move(p));
    y += step;
  }
  return out;
}

}  // namespace overlayx::synth
