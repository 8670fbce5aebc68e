#include "fixtures.hpp"

#include <cstdio>

#include "overlayx/codec.hpp"
#include "overlayx/synthgen.hpp"

namespace overlayx::testing {

namespace {

const std::vector<std::vector<std::string>> kCaptions = {
    {"breaking news", "storm hits the coast"},
    {"we have many options", "what would you choose?"},
    {"officials said today:", "schools stay closed"},
    {"don't miss this!", "it's happening now"},
    {"the quick brown fox", "jumps over the lazy dog"},
    {"election results", "coming in 2018"},
    {"watch until the end", "you won't believe it"},
    {"people love dogs", "and cats, too"},
    {"military parade", "in the capital city"},
    {"thanks for watching", "share with friends"},
};

}  // namespace

CaptionSet caption_frames(const fonts::FontSet& fonts) {
  CaptionSet set;
  for (std::size_t i = 0; i < kCaptions.size(); ++i) {
    synth::FrameStyle style;
    style.width = 960;
    style.font_id = static_cast<std::uint32_t>(i % fonts.size());
    if (i % 2 == 1) {
      style.background = {235, 235, 225};
      style.text = {20, 20, 40};
    }
    const auto layout = synth::layout_caption(kCaptions[i], fonts, style, 24, 60);
    auto fx = synth::generate_frame_fixture(layout, fonts, style, i);
    const auto idx = static_cast<std::uint32_t>(i);
    set.frames.push_back({std::move(fx.frame), static_cast<double>(i), idx});
    set.truth[idx] = {idx, std::move(fx.boxes)};
    set.texts.push_back(kCaptions[i][0] + " " + kCaptions[i][1]);
  }
  return set;
}

std::vector<frames::KeyFrame> frames_for_captions(const std::vector<std::string>& captions,
                                                  const fonts::FontSet& fonts) {
  std::vector<frames::KeyFrame> out;
  synth::FrameStyle style;
  style.width = 960;
  style.height = 160;
  for (std::size_t i = 0; i < captions.size(); ++i) {
    const std::vector<std::string> lines{captions[i]};
    const auto layout = synth::layout_caption(lines, fonts, style, 24, 40);
    auto fx = synth::generate_frame_fixture(layout, fonts, style, i);
    out.push_back({std::move(fx.frame), static_cast<double>(i), static_cast<std::uint32_t>(i)});
  }
  return out;
}

void write_frames(const std::vector<frames::KeyFrame>& frames, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.png", i);
    codec::write_image(dir / name, frames[i].image);
  }
}

std::filesystem::path adapters_dir() { return OVERLAYX_TEST_ADAPTERS_DIR; }

}  // namespace overlayx::testing
