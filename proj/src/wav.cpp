// SPDX-License-Identifier: Apache-2.0
#include "avs/wav.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

namespace avs {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

// KSDATAFORMAT_SUBTYPE_IEEE_FLOAT without the leading format tag.
constexpr std::array<std::uint8_t, 14> kGuidTail{0x00, 0x00, 0x00, 0x00, 0x10, 0x00, 0x80,
                                                 0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71};

class ByteWriter {
 public:
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void tag(const char* t) { bytes_.insert(bytes_.end(), t, t + 4); }
  void raw(const std::uint8_t* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  void put(std::uint32_t v, int n) {
    for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::vector<char> bytes_;
};

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}
std::uint16_t read_u16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | p[1] << 8); }

}  // namespace

void write_wav(const std::filesystem::path& path, const MultiSignal& channels, double sample_rate) {
  if (channels.empty()) throw InvalidInput("no channels to write");
  const std::size_t length = channels.front().size();
  for (const auto& ch : channels)
    if (ch.size() != length) throw InvalidInput("channels differ in length");
  const auto nch = static_cast<std::uint16_t>(channels.size());
  const bool extensible = nch > 2;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(length * nch * 4);
  const std::uint32_t fmt_bytes = extensible ? 40 : 16;
  const auto rate = static_cast<std::uint32_t>(sample_rate);

  ByteWriter w;
  w.tag("RIFF");
  w.u32(4 + 8 + fmt_bytes + 8 + data_bytes);
  w.tag("WAVE");
  w.tag("fmt ");
  w.u32(fmt_bytes);
  w.u16(extensible ? kFormatExtensible : kFormatFloat);
  w.u16(nch);
  w.u32(rate);
  w.u32(rate * nch * 4);
  w.u16(static_cast<std::uint16_t>(nch * 4));
  w.u16(32);
  if (extensible) {
    w.u16(22);
    w.u16(32);
    w.u32(0);  // no speaker mapping
    w.u16(kFormatFloat);
    w.raw(kGuidTail.data(), kGuidTail.size());
  }
  w.tag("data");
  w.u32(data_bytes);
  for (std::size_t n = 0; n < length; ++n)
    for (const auto& ch : channels) w.u32(std::bit_cast<std::uint32_t>(static_cast<float>(ch[n])));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto malformed = [&](const std::string& why) { return IoError("'" + path.string() + "': " + why); };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw malformed("not a RIFF/WAVE file");

  std::uint16_t format = 0, nch = 0, bits = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::size_t size = read_u32(chunk + 4);
    if (pos + 8 + size > bytes.size()) throw malformed("truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw malformed("short fmt chunk");
      format = read_u16(chunk + 8);
      nch = read_u16(chunk + 10);
      rate = read_u32(chunk + 12);
      bits = read_u16(chunk + 22);
      if (format == kFormatExtensible) {
        if (size < 40) throw malformed("short extensible fmt chunk");
        format = read_u16(chunk + 32);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = size;
    }
    pos += 8 + size + (size & 1);
  }
  if (nch == 0 || data == nullptr) throw malformed("missing fmt or data chunk");
  const bool supported = (format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32)) ||
                         (format == kFormatFloat && (bits == 32 || bits == 64));
  if (!supported) throw malformed("unsupported sample format");

  const std::size_t width = bits / 8;
  const std::size_t frames = data_size / (width * nch);
  WavData out{static_cast<double>(rate), MultiSignal(nch, RVector(frames))};
  for (std::size_t n = 0; n < frames; ++n) {
    for (std::size_t c = 0; c < nch; ++c) {
      const std::uint8_t* p = data + (n * nch + c) * width;
      double v = 0.0;
      if (format == kFormatFloat && bits == 32) {
        v = std::bit_cast<float>(read_u32(p));
      } else if (format == kFormatFloat) {
        v = std::bit_cast<double>(static_cast<std::uint64_t>(read_u32(p)) |
                                  static_cast<std::uint64_t>(read_u32(p + 4)) << 32);
      } else if (bits == 16) {
        v = static_cast<std::int16_t>(read_u16(p)) / 32768.0;
      } else if (bits == 24) {
        const std::int32_t s = static_cast<std::int32_t>(static_cast<std::uint32_t>(p[0]) << 8 |
                                                         static_cast<std::uint32_t>(p[1]) << 16 |
                                                         static_cast<std::uint32_t>(p[2]) << 24) >>
                               8;
        v = s / 8388608.0;
      } else {
        v = static_cast<std::int32_t>(read_u32(p)) / 2147483648.0;
      }
      out.channels[c][n] = v;
    }
  }
  return out;
}

}  // namespace avs
