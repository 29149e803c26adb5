#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vgrid::proto {

// Framed little-endian messages over a byte stream:
//   magic "Z4DPROTO" (8 bytes), u32 version, u32 payload length, payload.
// Payload starts with a fixed header (u32 kind, u32 clip length, u32 H, u32 W,
// u32 C, f64 sigma, u32 condition slot) followed by raw f32 tensors in
// row-major clip x H x W x C order. A denoise request carries x_t, the
// condition frame, the warped frames, and the mask (as f32 0/1); a reply
// mirrors the header with one or two tensors (conditional, optional
// unconditional).

inline constexpr char kMagic[8] = {'Z', '4', 'D', 'P', 'R', 'O', 'T', 'O'};
inline constexpr uint32_t kVersion = 1;

enum class MessageKind : uint32_t {
  Hello = 0,
  DenoiseRequest = 1,
  DenoiseReply = 2,
  Shutdown = 3,
};

struct MessageHeader {
  MessageKind kind = MessageKind::Hello;
  uint32_t clip_length = 0;
  uint32_t height = 0;
  uint32_t width = 0;
  uint32_t channels = 0;
  double sigma = 0.0;
  uint32_t condition_slot = 0;
};

struct Message {
  uint32_t version = kVersion;
  MessageHeader header;
  std::vector<float> tensors;  // concatenated, layout per header dims
  std::vector<uint8_t> extra;  // trailing bytes (hello descriptor)
};

// Hello payload trailing the header: u32 has_unconditional, u32 max clip
// length, u32 name length, name bytes.
struct HelloInfo {
  bool has_unconditional = false;
  uint32_t max_clip_length = 0;
  std::string name;
};

std::vector<uint8_t> encode(const Message& message);
HelloInfo decode_hello(const Message& message);
std::vector<uint8_t> encode_hello_extra(const HelloInfo& info);

// Blocking framed reads/writes on file descriptors. read_message returns
// false on clean end-of-stream before any byte of a frame; a timeout or a
// truncated frame throws. timeout_ms <= 0 waits forever.
bool read_message(int fd, Message& out, int timeout_ms);
void write_message(int fd, const Message& message);

}  // namespace vgrid::proto
