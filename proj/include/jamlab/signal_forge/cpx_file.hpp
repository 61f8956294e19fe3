#pragma once

#include <filesystem>

#include "jamlab/signal_forge/types.hpp"

namespace jamlab::signal_forge {

// .cpx layout (little-endian):
//   bytes 0..3   magic "CPXS"
//   bytes 4..7   u32 sample count
//   bytes 8..11  f32 sample rate (Hz) stored as its u32 bit pattern
//   bytes 12..15 reserved, zero
//   then count * (f32 I, f32 Q)
inline constexpr std::size_t kCpxHeaderBytes = 16;

void write_cpx(const std::filesystem::path& path, const ComplexSeries& x);
ComplexSeries read_cpx(const std::filesystem::path& path);

}  // namespace jamlab::signal_forge
