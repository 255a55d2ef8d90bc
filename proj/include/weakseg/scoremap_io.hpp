#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "weakseg/binary_io.hpp"
#include "weakseg/image.hpp"

namespace weakseg {

// .smap layout: "SMAP", u8 version, u32 width, u32 height, width*height f32,
// all little-endian, row-major.
inline constexpr std::string_view kSmapMagic = "SMAP";
inline constexpr std::uint8_t kSmapVersion = 1;
inline constexpr std::size_t kSmapHeaderBytes = 13;

template <typename Tag>
Bytes encode_smap(const Image<float, Tag>& m) {
  ByteWriter w;
  w.raw(kSmapMagic);
  w.u8(kSmapVersion);
  w.u32(static_cast<std::uint32_t>(m.width()));
  w.u32(static_cast<std::uint32_t>(m.height()));
  for (float v : m.data()) w.f32(v);
  return w.bytes();
}

/// Decodes without range checks beyond rejecting non-finite values.
inline ScoreMap decode_smap(const Bytes& bytes) {
  ByteReader r(bytes);
  if (r.raw(4) != kSmapMagic) throw Error(ErrorKind::Format, "bad .smap magic");
  if (r.u8() != kSmapVersion) throw Error(ErrorKind::Format, "unsupported .smap version");
  const std::uint32_t w = r.u32();
  const std::uint32_t h = r.u32();
  const std::uint64_t n = static_cast<std::uint64_t>(w) * h;
  if (w > (1u << 30) || h > (1u << 30) || r.remaining() != n * 4)
    throw Error(ErrorKind::Format, "payload size does not match .smap header");
  std::vector<float> data(static_cast<std::size_t>(n));
  for (auto& v : data) {
    v = r.f32();
    if (!std::isfinite(v)) throw Error(ErrorKind::Data, "non-finite value in .smap");
  }
  return ScoreMap(static_cast<int>(w), static_cast<int>(h), std::move(data));
}

inline void save_scoremap(const ScoreMap& m, const std::filesystem::path& path) {
  require_unit_range(m, "save_scoremap");
  write_file_atomic(path, encode_smap(m));
}

/// Loads a map and requires every value to lie in [0,1].
inline ScoreMap load_scoremap(const std::filesystem::path& path) {
  ScoreMap m = decode_smap(read_file(path));
  require_unit_range(m, "load_scoremap");
  return m;
}

}  // namespace weakseg
