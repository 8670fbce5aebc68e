// Serial reference kernels against their OpenMP counterparts on a 1280x720
// frame. Set OMP_NUM_THREADS to vary the parallel side.
#include <benchmark/benchmark.h>

#include <random>

#include "overlayx/imaging.hpp"

using namespace overlayx;

namespace {

const Image& frame_rgb() {
  static const Image img = [] {
    Image out(1280, 720, 3);
    std::mt19937 rng(1);
    for (auto& p : out.data()) p = static_cast<std::uint8_t>(rng());
    return out;
  }();
  return img;
}

const Image& frame_gray() {
  static const Image img = imaging::serial::to_grayscale(frame_rgb());
  return img;
}

const Image& frame_binary() {
  static const Image img = imaging::serial::binarize(frame_gray(), 127);
  return img;
}

template <auto Fn>
void unary_rgb(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(Fn(frame_rgb()));
  state.SetItemsProcessed(state.iterations() * 1280 * 720);
}

template <auto Fn>
void unary_gray(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(Fn(frame_gray()));
  state.SetItemsProcessed(state.iterations() * 1280 * 720);
}

template <auto Fn>
void unary_binary(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(Fn(frame_binary()));
  state.SetItemsProcessed(state.iterations() * 1280 * 720);
}

template <auto Fn>
void resize(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(Fn(frame_rgb(), 640, 360));
  state.SetItemsProcessed(state.iterations() * 1280 * 720);
}

}  // namespace

BENCHMARK(unary_rgb<imaging::serial::to_grayscale>)->Name("grayscale/serial");
BENCHMARK(unary_rgb<imaging::to_grayscale>)->Name("grayscale/openmp");
BENCHMARK(unary_rgb<imaging::serial::max_rgb_filter>)->Name("max_rgb/serial");
BENCHMARK(unary_rgb<imaging::max_rgb_filter>)->Name("max_rgb/openmp");
BENCHMARK(unary_gray<imaging::serial::otsu_threshold>)->Name("otsu/serial");
BENCHMARK(unary_gray<imaging::otsu_threshold>)->Name("otsu/openmp");
BENCHMARK(unary_gray<imaging::serial::gaussian_blur_5x5>)->Name("blur5x5/serial");
BENCHMARK(unary_gray<imaging::gaussian_blur_5x5>)->Name("blur5x5/openmp");
BENCHMARK(unary_binary<imaging::serial::morphological_open>)->Name("open3x3/serial");
BENCHMARK(unary_binary<imaging::morphological_open>)->Name("open3x3/openmp");
BENCHMARK(resize<imaging::serial::resize_antialias>)->Name("resize_half/serial");
BENCHMARK(resize<imaging::resize_antialias>)->Name("resize_half/openmp");

BENCHMARK_MAIN();
