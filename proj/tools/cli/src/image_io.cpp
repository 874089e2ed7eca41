#include "rsca_cli/image_io.hpp"

#include <png.h>

#include <cctype>
#include <sstream>

#include "rsca/errors.hpp"
#include "rsca/formats.hpp"
#include "rsca_cli/fsutil.hpp"

namespace rsca::cli {

std::string encode_png(const Image& img) {
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(img.width);
  desc.height = static_cast<png_uint_32>(img.height);
  desc.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&desc, nullptr, &size, 0, img.rgb.data(), 0, nullptr)) {
    throw FormatError(std::string("PNG encode: ") + desc.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&desc, out.data(), &size, 0, img.rgb.data(), 0, nullptr)) {
    throw FormatError(std::string("PNG encode: ") + desc.message);
  }
  out.resize(size);
  return out;
}

Image decode_png(const std::string& bytes) {
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&desc, bytes.data(), bytes.size())) {
    throw FormatError(std::string("PNG decode: ") + desc.message);
  }
  desc.format = PNG_FORMAT_RGB;
  Image img(desc.width, desc.height);
  if (!png_image_finish_read(&desc, nullptr, img.rgb.data(), 0, nullptr)) {
    png_image_free(&desc);
    throw FormatError(std::string("PNG decode: ") + desc.message);
  }
  return img;
}

std::string encode_ppm(const Image& img) {
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.rgb.data()), img.rgb.size());
  return out;
}

namespace {

// Next whitespace-separated header token, skipping '#' comments.
std::string ppm_token(const std::string& s, std::size_t& pos) {
  for (;;) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos < s.size() && s[pos] == '#') {
      while (pos < s.size() && s[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  const std::size_t start = pos;
  while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (start == pos) throw FormatError("PPM: truncated header");
  return s.substr(start, pos - start);
}

std::size_t ppm_number(const std::string& s, std::size_t& pos) {
  const std::string tok = ppm_token(s, pos);
  for (char c : tok) {
    if (!std::isdigit(static_cast<unsigned char>(c))) throw FormatError("PPM: bad header field '" + tok + "'");
  }
  return std::stoul(tok);
}

}  // namespace

Image decode_ppm(const std::string& bytes) {
  std::size_t pos = 0;
  const std::string magic = ppm_token(bytes, pos);
  if (magic != "P6" && magic != "P3") throw FormatError("PPM: unsupported magic '" + magic + "'");
  const std::size_t w = ppm_number(bytes, pos);
  const std::size_t h = ppm_number(bytes, pos);
  const std::size_t maxval = ppm_number(bytes, pos);
  if (w == 0 || h == 0) throw FormatError("PPM: empty image");
  if (maxval == 0 || maxval > 255) throw FormatError("PPM: only 8-bit images are supported");
  Image img(w, h);
  auto rescale = [maxval](std::size_t v) { return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval); };
  if (magic == "P6") {
    ++pos;  // single whitespace byte after maxval
    if (bytes.size() < pos + img.rgb.size()) throw FormatError("PPM: truncated pixel data");
    for (std::size_t i = 0; i < img.rgb.size(); ++i) img.rgb[i] = rescale(static_cast<unsigned char>(bytes[pos + i]));
  } else {
    for (auto& v : img.rgb) v = rescale(ppm_number(bytes, pos));
  }
  return img;
}

Image read_image(const std::filesystem::path& path) {
  const std::string bytes = read_text_file(path);
  if (bytes.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0) {
    return decode_png(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P') return decode_ppm(bytes);
  throw FormatError("unrecognised image format: " + path.string());
}

void write_image(const Image& img, const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".png") {
    write_file_atomic(path, encode_png(img));
  } else if (ext == ".ppm") {
    write_file_atomic(path, encode_ppm(img));
  } else {
    throw ParameterError("output image must be .png or .ppm: " + path.string());
  }
}

}  // namespace rsca::cli
