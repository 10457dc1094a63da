#include "gloc/data/clip_io.hpp"

#include <cstring>
#include <fstream>

#include "gloc/common/errors.hpp"

namespace gloc::data {

namespace {

constexpr char kMagic[4] = {'G', 'L', 'O', 'C'};

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is, const std::string& what) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw DataError("clip file truncated while reading " + what);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f32(std::ostream& os, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  write_u32(os, bits);
}

float read_f32(std::istream& is, const std::string& what) {
  const std::uint32_t bits = read_u32(is, what);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

void write_str(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_str(std::istream& is, const std::string& what) {
  const std::uint32_t n = read_u32(is, what);
  if (n > (1u << 20)) throw DataError("clip file: unreasonable " + what);
  std::string s(n, '\0');
  if (n > 0 && !is.read(s.data(), n))
    throw DataError("clip file truncated while reading " + what);
  return s;
}

}  // namespace

void save_stream(const StreamFile& sf, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open for writing: " + path);
  os.write(kMagic, 4);
  write_u32(os, kClipFormatVersion);
  write_u32(os, static_cast<std::uint32_t>(sf.kind));
  write_f32(os, static_cast<float>(sf.frame_rate));
  write_u32(os, static_cast<std::uint32_t>(sf.data.cols()));
  write_u32(os, sf.dim_a);
  write_u32(os, sf.dim_b);
  write_str(os, sf.label);
  write_str(os, sf.id);
  for (Eigen::Index c = 0; c < sf.data.cols(); ++c)
    for (Eigen::Index r = 0; r < sf.data.rows(); ++r)
      write_f32(os, static_cast<float>(sf.data(r, c)));
  if (!os) throw DataError("write failed: " + path);
}

StreamFile load_stream(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("bad format: '" + path + "' is not a GLOC stream");
  const std::uint32_t version = read_u32(is, "version");
  if (version != kClipFormatVersion)
    throw DataError("clip file version mismatch: file has " +
                    std::to_string(version) + ", expected " +
                    std::to_string(kClipFormatVersion));
  StreamFile sf;
  const std::uint32_t kind = read_u32(is, "kind");
  if (kind > 1) throw DataError("clip file: unknown stream kind");
  sf.kind = static_cast<StreamKind>(kind);
  sf.frame_rate = read_f32(is, "frame rate");
  const std::uint32_t frames = read_u32(is, "frame count");
  sf.dim_a = read_u32(is, "dim_a");
  sf.dim_b = read_u32(is, "dim_b");
  sf.label = read_str(is, "label");
  sf.id = read_str(is, "id");

  std::uint64_t rows;
  if (sf.kind == StreamKind::Clip)
    rows = 6 + 2ull * sf.dim_a + 2ull * sf.dim_b;
  else
    rows = sf.dim_a;
  if (rows == 0 || rows > (1u << 16))
    throw DataError("clip file: inconsistent dimensions");
  sf.data.resize(static_cast<Eigen::Index>(rows), frames);
  for (std::uint32_t c = 0; c < frames; ++c)
    for (std::uint64_t r = 0; r < rows; ++r)
      sf.data(static_cast<Eigen::Index>(r), c) = read_f32(is, "frame data");
  return sf;
}

void save_clip(const MotionClip& clip, const std::string& path) {
  StreamFile sf;
  sf.kind = StreamKind::Clip;
  sf.frame_rate = clip.frame_rate;
  sf.dim_a = static_cast<std::uint32_t>(clip.joint_count);
  sf.dim_b = static_cast<std::uint32_t>(clip.keypoint_count);
  sf.label = clip.label;
  sf.id = clip.id;
  sf.data = clip.frames;
  save_stream(sf, path);
}

MotionClip load_clip(const std::string& path) {
  StreamFile sf = load_stream(path);
  if (sf.kind != StreamKind::Clip)
    throw DataError("expected a clip stream in '" + path + "'");
  MotionClip clip;
  clip.frame_rate = sf.frame_rate;
  clip.joint_count = static_cast<int>(sf.dim_a);
  clip.keypoint_count = static_cast<int>(sf.dim_b);
  clip.label = sf.label;
  clip.id = sf.id;
  clip.frames = sf.data;
  if (clip.frame_count() < 2)
    throw DataError("clip '" + path + "' has fewer than 2 frames");
  return clip;
}

}  // namespace gloc::data
