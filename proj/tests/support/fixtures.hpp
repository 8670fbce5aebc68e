#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "overlayx/fonts.hpp"
#include "overlayx/frames.hpp"
#include "overlayx/pipeline.hpp"

namespace overlayx::testing {

// Ten caption frames cycling through the bundled fonts at size 48, light
// text on dark and dark text on light, with exact ground truth.
struct CaptionSet {
  std::vector<frames::KeyFrame> frames;
  pipeline::GroundTruth truth;
  std::vector<std::string> texts;  // frame text, lines joined by a space
};

CaptionSet caption_frames(const fonts::FontSet& fonts);

// One frame per caption (font 0, size 48), timestamps 0, 1, 2, ...
std::vector<frames::KeyFrame> frames_for_captions(const std::vector<std::string>& captions,
                                                  const fonts::FontSet& fonts);

// Writes frames as frame_000.png, frame_001.png, ... under `dir`.
void write_frames(const std::vector<frames::KeyFrame>& frames, const std::filesystem::path& dir);

std::filesystem::path adapters_dir();

}  // namespace overlayx::testing
