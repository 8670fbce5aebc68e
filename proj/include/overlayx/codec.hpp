#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "overlayx/image.hpp"

namespace overlayx::codec {

inline constexpr int kDefaultJpegQuality = 90;

// Decodes PNG/JPEG bytes. Grayscale sources stay 1-channel, everything else
// becomes RGB. Throws CodecError.
Image decode(std::span<const std::uint8_t> bytes);
Image read_image(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const Image& img);
std::vector<std::uint8_t> encode_jpeg(const Image& img, int quality = kDefaultJpegQuality);

// Format picked from the extension (.png, .jpg, .jpeg).
void write_image(const std::filesystem::path& path, const Image& img,
                 int jpeg_quality = kDefaultJpegQuality);

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace overlayx::codec
