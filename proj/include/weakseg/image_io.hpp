#pragma once

#include <png.h>
#include <cstdio>
#include <jpeglib.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <filesystem>
#include <string>

#include "weakseg/binary_io.hpp"
#include "weakseg/image.hpp"

namespace weakseg {

namespace detail {

inline ColorImage decode_png(const Bytes& bytes, const std::string& name) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
    throw Error(ErrorKind::Format, name + ": " + img.message);
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    throw Error(ErrorKind::Format, name + ": " + msg);
  }
  ColorImage out{static_cast<int>(img.width), static_cast<int>(img.height), channels, {}};
  out.data.resize(buf.size());
  std::transform(buf.begin(), buf.end(), out.data.begin(), [](png_byte b) { return b / 255.0f; });
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

inline ColorImage decode_jpeg(const Bytes& bytes, const std::string& name) {
  jpeg_decompress_struct cinfo{};
  JpegErrorManager err{};
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  std::vector<unsigned char> buf;
  int width = 0, height = 0, channels = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error(ErrorKind::Format, name + ": " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  channels = cinfo.output_components;
  buf.resize(static_cast<std::size_t>(width) * height * channels);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = buf.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * channels;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  ColorImage out{width, height, channels, std::vector<float>(buf.size())};
  std::transform(buf.begin(), buf.end(), out.data.begin(), [](unsigned char b) { return b / 255.0f; });
  return out;
}

inline std::uint8_t to_byte(float v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

inline Bytes encode_png(int width, int height, int channels, const std::vector<png_byte>& pixels) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(width);
  img.height = static_cast<png_uint_32>(height);
  img.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, pixels.data(), 0, nullptr))
    throw Error(ErrorKind::Io, std::string("png encode: ") + img.message);
  Bytes out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, pixels.data(), 0, nullptr))
    throw Error(ErrorKind::Io, std::string("png encode: ") + img.message);
  out.resize(size);
  return out;
}

}  // namespace detail

/// Reads an 8-bit PNG or JPEG (detected from the file signature). Gray inputs
/// yield one channel, everything else three; values are scaled to [0,1].
inline ColorImage load_image(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return detail::decode_png(bytes, path.string());
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF)
    return detail::decode_jpeg(bytes, path.string());
  throw Error(ErrorKind::Format, path.string() + ": not a PNG or JPEG file");
}

inline Raster load_gray(const std::filesystem::path& path) { return as_grayscale(load_image(path)); }

/// Any nonzero channel marks a crack pixel.
inline BinaryMask load_mask(const std::filesystem::path& path) {
  const ColorImage img = load_image(path);
  BinaryMask out(img.width, img.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    bool on = false;
    for (int c = 0; c < img.channels; ++c) on = on || img.data[i * img.channels + c] > 0.0f;
    out[i] = on ? 1 : 0;
  }
  return out;
}

/// 8-bit gray PNG of value * 255.
template <typename Tag>
void save_png(const Image<float, Tag>& img, const std::filesystem::path& path) {
  std::vector<png_byte> px(img.size());
  std::transform(img.data().begin(), img.data().end(), px.begin(), detail::to_byte);
  write_file_atomic(path, detail::encode_png(img.width(), img.height(), 1, px));
}

inline void save_png(const BinaryMask& mask, const std::filesystem::path& path) {
  std::vector<png_byte> px(mask.size());
  std::transform(mask.data().begin(), mask.data().end(), px.begin(),
                 [](std::uint8_t v) { return static_cast<png_byte>(v ? 255 : 0); });
  write_file_atomic(path, detail::encode_png(mask.width(), mask.height(), 1, px));
}

inline void save_png(const ColorImage& img, const std::filesystem::path& path) {
  if (img.channels != 1 && img.channels != 3) throw Error(ErrorKind::Shape, "PNG output needs 1 or 3 channels");
  std::vector<png_byte> px(img.data.size());
  std::transform(img.data.begin(), img.data.end(), px.begin(), detail::to_byte);
  write_file_atomic(path, detail::encode_png(img.width, img.height, img.channels, px));
}

/// Blends red into the image in proportion to the confidence.
inline ColorImage red_overlay(const ColorImage& image, const ScoreMap& confidence, float alpha = 0.7f) {
  if (image.width != confidence.width() || image.height != confidence.height())
    throw Error(ErrorKind::Shape, "overlay: image and map differ in size");
  ColorImage out{image.width, image.height, 3, std::vector<float>(confidence.size() * 3)};
  for (std::size_t i = 0; i < confidence.size(); ++i) {
    const float a = alpha * confidence[i];
    for (int c = 0; c < 3; ++c) {
      const float base = image.data[i * image.channels + (image.channels == 3 ? c : 0)];
      const float target = c == 0 ? 1.0f : 0.0f;
      out.data[i * 3 + c] = (1.0f - a) * base + a * target;
    }
  }
  return out;
}

}  // namespace weakseg
