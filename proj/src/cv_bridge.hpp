#pragma once

// Conversions between overlayx::Image and cv::Mat (8-bit, 1 or 3 channels).
// Channel order is passed through untouched.

#include <opencv2/core.hpp>

#include "overlayx/image.hpp"

namespace overlayx::cvb {

inline cv::Mat to_mat(const Image& img) {
  cv::Mat mat(img.height(), img.width(), img.channels() == 3 ? CV_8UC3 : CV_8UC1);
  std::copy(img.data().begin(), img.data().end(), mat.data);
  return mat;
}

inline Image to_image(const cv::Mat& mat) {
  const cv::Mat cont = mat.isContinuous() ? mat : mat.clone();
  const std::size_t n = cont.total() * cont.elemSize();
  return Image(cont.cols, cont.rows, cont.channels(),
               std::vector<std::uint8_t>(cont.data, cont.data + n));
}

}  // namespace overlayx::cvb
