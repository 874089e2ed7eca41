#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rsca::cli {

/// 8-bit interleaved RGB.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(std::size_t w, std::size_t h) : width(w), height(h), rgb(w * h * 3, 0) {}
  std::uint8_t* pixel(std::size_t x, std::size_t y) { return &rgb[(y * width + x) * 3]; }
  const std::uint8_t* pixel(std::size_t x, std::size_t y) const { return &rgb[(y * width + x) * 3]; }
};

/// PNG (any colour type, converted to RGB) or binary / ASCII PPM.
Image read_image(const std::filesystem::path& path);
/// Format follows the extension: .png or .ppm.
void write_image(const Image& img, const std::filesystem::path& path);

std::string encode_png(const Image& img);
Image decode_png(const std::string& bytes);
std::string encode_ppm(const Image& img);
Image decode_ppm(const std::string& bytes);

}  // namespace rsca::cli
