#include "jamlab/signal_forge/cpx_file.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "jamlab/common/error.hpp"

namespace jamlab::signal_forge {
namespace {

static_assert(std::endian::native == std::endian::little, "cpx I/O assumes a little-endian host");

void put_u32(std::vector<char>& buf, std::uint32_t v) {
  char bytes[4];
  std::memcpy(bytes, &v, 4);
  buf.insert(buf.end(), bytes, bytes + 4);
}

std::uint32_t get_u32(const char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

}  // namespace

void write_cpx(const std::filesystem::path& path, const ComplexSeries& x) {
  std::vector<char> buf;
  buf.reserve(kCpxHeaderBytes + x.size() * 8);
  buf.insert(buf.end(), {'C', 'P', 'X', 'S'});
  put_u32(buf, std::uint32_t(x.size()));
  put_u32(buf, std::bit_cast<std::uint32_t>(float(x.sample_rate_hz)));
  put_u32(buf, 0);
  for (const auto& v : x.samples) {
    put_u32(buf, std::bit_cast<std::uint32_t>(float(v.real())));
    put_u32(buf, std::bit_cast<std::uint32_t>(float(v.imag())));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(bool(out), ErrorKind::io, "cannot open " + path.string() + " for writing");
  out.write(buf.data(), std::streamsize(buf.size()));
  require(bool(out), ErrorKind::io, "write failed for " + path.string());
}

ComplexSeries read_cpx(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(bool(in), ErrorKind::io, "cannot open " + path.string());
  std::array<char, kCpxHeaderBytes> header{};
  in.read(header.data(), header.size());
  require(in.gcount() == std::streamsize(header.size()) && std::memcmp(header.data(), "CPXS", 4) == 0,
          ErrorKind::io, path.string() + " is not a CPXS file");
  const std::uint32_t count = get_u32(header.data() + 4);
  ComplexSeries x;
  x.sample_rate_hz = std::bit_cast<float>(get_u32(header.data() + 8));
  std::vector<char> body(std::size_t(count) * 8);
  in.read(body.data(), std::streamsize(body.size()));
  require(in.gcount() == std::streamsize(body.size()), ErrorKind::io, path.string() + " is truncated");
  x.samples.resize(count);
  for (std::size_t n = 0; n < count; ++n) {
    const float re = std::bit_cast<float>(get_u32(body.data() + 8 * n));
    const float im = std::bit_cast<float>(get_u32(body.data() + 8 * n + 4));
    x.samples[n] = cplx(re, im);
  }
  return x;
}

}  // namespace jamlab::signal_forge
