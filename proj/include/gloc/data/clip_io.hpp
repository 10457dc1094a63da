#pragma once

#include "gloc/data/clip.hpp"

namespace gloc::data {

// Container file (magic "GLOC", version 1): a plain-text-prefixed binary
// stream holding either a motion clip or a latent-token sequence.
// Layout: magic[4] | version u32 | kind u32 | frame_rate f32 |
// frame_count u32 | dim_a u32 | dim_b u32 | label (u32 + utf8) |
// id (u32 + utf8) | float32 data, column-major (frame by frame).
// For clips dim_a = joint count and dim_b = keypoint count; for latents
// dim_a = token width and dim_b = temporal stride.
enum class StreamKind : std::uint32_t { Clip = 0, Latent = 1 };

constexpr std::uint32_t kClipFormatVersion = 1;

void save_clip(const MotionClip& clip, const std::string& path);
MotionClip load_clip(const std::string& path);

// Raw stream access used by the latent container.
struct StreamFile {
  StreamKind kind = StreamKind::Clip;
  double frame_rate = 0.0;
  std::uint32_t dim_a = 0;
  std::uint32_t dim_b = 0;
  std::string label;
  std::string id;
  Eigen::MatrixXd data;  // channels x frames
};

void save_stream(const StreamFile& sf, const std::string& path);
StreamFile load_stream(const std::string& path);

}  // namespace gloc::data
