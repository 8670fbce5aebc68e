#include "overlayx/codec.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "cv_bridge.hpp"
#include "overlayx/error.hpp"

namespace overlayx::codec {

Image decode(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw CodecError("cannot decode an empty buffer");
  const cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1,
                    const_cast<std::uint8_t*>(bytes.data()));
  cv::Mat mat;
  try {
    mat = cv::imdecode(buf, cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw CodecError(std::string("decode failed: ") + e.what());
  }
  if (mat.empty()) throw CodecError("unrecognized or corrupt image data");
  if (mat.depth() != CV_8U) {
    cv::Mat converted;
    mat.convertTo(converted, CV_8U, mat.depth() == CV_16U ? 1.0 / 257.0 : 1.0);
    mat = converted;
  }
  switch (mat.channels()) {
    case 1:
      break;
    case 3:
      cv::cvtColor(mat, mat, cv::COLOR_BGR2RGB);
      break;
    case 4:
      cv::cvtColor(mat, mat, cv::COLOR_BGRA2RGB);
      break;
    default:
      throw CodecError("unsupported channel count " + std::to_string(mat.channels()));
  }
  return cvb::to_image(mat);
}

Image read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CodecError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return decode(bytes);
  } catch (const CodecError& e) {
    throw CodecError(path.string() + ": " + e.what());
  }
}

namespace {

std::vector<std::uint8_t> encode(const Image& img, const char* ext, const std::vector<int>& params) {
  if (img.empty()) throw CodecError("cannot encode an empty image");
  cv::Mat mat = cvb::to_mat(img);
  if (img.channels() == 3) cv::cvtColor(mat, mat, cv::COLOR_RGB2BGR);
  std::vector<std::uint8_t> out;
  if (!cv::imencode(ext, mat, out, params)) {
    throw CodecError(std::string("failed to encode ") + ext);
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& img) {
  return encode(img, ".png", {cv::IMWRITE_PNG_COMPRESSION, 3});
}

std::vector<std::uint8_t> encode_jpeg(const Image& img, int quality) {
  if (quality < 1 || quality > 100) throw InvalidArgument("JPEG quality must be in [1, 100]");
  return encode(img, ".jpg", {cv::IMWRITE_JPEG_QUALITY, quality});
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CodecError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CodecError("short write to " + path.string());
}

void write_image(const std::filesystem::path& path, const Image& img, int jpeg_quality) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (ext == ".png") {
    write_bytes(path, encode_png(img));
  } else if (ext == ".jpg" || ext == ".jpeg") {
    write_bytes(path, encode_jpeg(img, jpeg_quality));
  } else {
    throw CodecError("unsupported image extension '" + ext + "' for " + path.string());
  }
}

}  // namespace overlayx::codec
