#include "vgrid/proto.hpp"

#include <poll.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

namespace vgrid::proto {

namespace {

constexpr size_t kHeaderBytes = 4 * 5 + 8 + 4;  // five u32, f64 sigma, u32 slot

void put_u32(std::vector<uint8_t>& buf, uint32_t v) {
  buf.push_back(static_cast<uint8_t>(v));
  buf.push_back(static_cast<uint8_t>(v >> 8));
  buf.push_back(static_cast<uint8_t>(v >> 16));
  buf.push_back(static_cast<uint8_t>(v >> 24));
}

void put_f64(std::vector<uint8_t>& buf, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<uint8_t>(bits >> (8 * i)));
}

uint32_t get_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

double get_f64(const uint8_t* p) {
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(p[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

void read_exact(int fd, uint8_t* dst, size_t len, int timeout_ms, bool& clean_eof_at_start) {
  size_t got = 0;
  while (got < len) {
    if (timeout_ms > 0) {
      pollfd pfd{fd, POLLIN, 0};
      int rc = ::poll(&pfd, 1, timeout_ms);
      if (rc == 0) throw std::runtime_error("protocol: read timed out");
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error(std::string("protocol: poll failed: ") + std::strerror(errno));
      }
    }
    ssize_t n = ::read(fd, dst + got, len - got);
    if (n == 0) {
      if (got == 0 && clean_eof_at_start) {
        clean_eof_at_start = true;
        return;
      }
      throw std::runtime_error("protocol: stream ended mid-frame");
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error(std::string("protocol: read failed: ") + std::strerror(errno));
    }
    clean_eof_at_start = false;
    got += static_cast<size_t>(n);
  }
  clean_eof_at_start = false;
}

}  // namespace

std::vector<uint8_t> encode(const Message& message) {
  std::vector<uint8_t> payload;
  payload.reserve(kHeaderBytes + message.tensors.size() * 4 + message.extra.size());
  put_u32(payload, static_cast<uint32_t>(message.header.kind));
  put_u32(payload, message.header.clip_length);
  put_u32(payload, message.header.height);
  put_u32(payload, message.header.width);
  put_u32(payload, message.header.channels);
  put_f64(payload, message.header.sigma);
  put_u32(payload, message.header.condition_slot);
  for (float v : message.tensors) {
    uint32_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    put_u32(payload, bits);
  }
  payload.insert(payload.end(), message.extra.begin(), message.extra.end());

  std::vector<uint8_t> frame;
  frame.reserve(16 + payload.size());
  frame.insert(frame.end(), kMagic, kMagic + 8);
  put_u32(frame, message.version);
  put_u32(frame, static_cast<uint32_t>(payload.size()));
  frame.insert(frame.end(), payload.begin(), payload.end());
  return frame;
}

std::vector<uint8_t> encode_hello_extra(const HelloInfo& info) {
  std::vector<uint8_t> extra;
  put_u32(extra, info.has_unconditional ? 1u : 0u);
  put_u32(extra, info.max_clip_length);
  put_u32(extra, static_cast<uint32_t>(info.name.size()));
  extra.insert(extra.end(), info.name.begin(), info.name.end());
  return extra;
}

HelloInfo decode_hello(const Message& message) {
  if (message.header.kind != MessageKind::Hello) {
    throw std::runtime_error("protocol: expected a hello message");
  }
  const auto& e = message.extra;
  if (e.size() < 12) throw std::runtime_error("protocol: malformed hello payload");
  HelloInfo info;
  info.has_unconditional = get_u32(e.data()) != 0;
  info.max_clip_length = get_u32(e.data() + 4);
  uint32_t name_len = get_u32(e.data() + 8);
  if (e.size() < 12 + name_len) throw std::runtime_error("protocol: malformed hello name");
  info.name.assign(e.begin() + 12, e.begin() + 12 + name_len);
  return info;
}

bool read_message(int fd, Message& out, int timeout_ms) {
  uint8_t head[16];
  bool clean_eof = true;
  read_exact(fd, head, sizeof(head), timeout_ms, clean_eof);
  if (clean_eof) return false;
  if (std::memcmp(head, kMagic, 8) != 0) throw std::runtime_error("protocol: bad magic");
  out.version = get_u32(head + 8);
  uint32_t payload_len = get_u32(head + 12);
  if (payload_len < kHeaderBytes) throw std::runtime_error("protocol: payload too short");
  if (payload_len > (1u << 30)) throw std::runtime_error("protocol: payload too large");

  std::vector<uint8_t> payload(payload_len);
  bool no_eof = false;
  read_exact(fd, payload.data(), payload.size(), timeout_ms, no_eof);

  const uint8_t* p = payload.data();
  out.header.kind = static_cast<MessageKind>(get_u32(p));
  out.header.clip_length = get_u32(p + 4);
  out.header.height = get_u32(p + 8);
  out.header.width = get_u32(p + 12);
  out.header.channels = get_u32(p + 16);
  out.header.sigma = get_f64(p + 20);
  out.header.condition_slot = get_u32(p + 28);

  size_t rest = payload_len - kHeaderBytes;
  out.tensors.clear();
  out.extra.clear();
  if (out.header.kind == MessageKind::Hello) {
    out.extra.assign(payload.begin() + kHeaderBytes, payload.end());
  } else {
    if (rest % 4 != 0) throw std::runtime_error("protocol: tensor bytes not a multiple of 4");
    out.tensors.resize(rest / 4);
    for (size_t i = 0; i < out.tensors.size(); ++i) {
      uint32_t bits = get_u32(p + kHeaderBytes + i * 4);
      std::memcpy(&out.tensors[i], &bits, sizeof(float));
    }
  }
  return true;
}

void write_message(int fd, const Message& message) {
  std::vector<uint8_t> frame = encode(message);
  size_t sent = 0;
  while (sent < frame.size()) {
    ssize_t n = ::write(fd, frame.data() + sent, frame.size() - sent);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error(std::string("protocol: write failed: ") + std::strerror(errno));
    }
    sent += static_cast<size_t>(n);
  }
}

}  // namespace vgrid::proto
