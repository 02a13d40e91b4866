#pragma once

#include <string>

#include "signet/clip.hpp"

namespace signet {

// Clip container (binary, little-endian), bit-exact layout:
//   magic "SGNF" | version u16 | T,H,W,C u32 | fps num u32 | fps den u32 |
//   dtype u8 (0 = u8 samples in [0,255]) | dup_flags T bytes | row-major payload
ClipTensor read_clip(const std::string& path);
void write_clip(const std::string& path, const ClipTensor& clip);

}  // namespace signet
