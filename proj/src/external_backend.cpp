#include "vgrid/external_backend.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstring>
#include <stdexcept>

#include "vgrid/proto.hpp"

namespace vgrid {

namespace {

std::string describe(const proto::MessageHeader& h) {
  return "clip=" + std::to_string(h.clip_length) + " " + std::to_string(h.height) + "x" +
         std::to_string(h.width) + "x" + std::to_string(h.channels) +
         " sigma=" + std::to_string(h.sigma) + " slot=" + std::to_string(h.condition_slot);
}

}  // namespace

ExternalProcessDenoiser::ExternalProcessDenoiser(ExternalBackendOptions options)
    : options_(std::move(options)) {
  if (options_.command.empty()) {
    throw std::invalid_argument("external backend: empty command line");
  }
  spawn();
}

ExternalProcessDenoiser::~ExternalProcessDenoiser() { shutdown(); }

void ExternalProcessDenoiser::spawn() {
  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
    throw std::runtime_error("external backend: pipe() failed");
  }
  pid_t pid = ::fork();
  if (pid < 0) throw std::runtime_error("external backend: fork() failed");
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    std::vector<char*> argv;
    for (const std::string& a : options_.command) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    ::execvp(argv[0], argv.data());
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  child_stdin_ = to_child[1];
  child_stdout_ = from_child[0];
  child_pid_ = pid;

  const int timeout_ms = static_cast<int>(options_.timeout_seconds * 1000.0);
  proto::Message hello;
  if (!proto::read_message(child_stdout_, hello, timeout_ms)) {
    shutdown();
    throw std::runtime_error("external backend: child closed the stream before the handshake");
  }
  if (hello.version != proto::kVersion) {
    shutdown();
    throw std::runtime_error("external backend: protocol version mismatch (child advertises v" +
                             std::to_string(hello.version) + ", engine speaks v" +
                             std::to_string(proto::kVersion) + ")");
  }
  proto::HelloInfo info = proto::decode_hello(hello);
  descriptor_.name = "external:" + info.name;
  descriptor_.concurrent_safe = false;
  descriptor_.has_unconditional = info.has_unconditional;
  descriptor_.max_clip_length = static_cast<int>(info.max_clip_length);
}

void ExternalProcessDenoiser::shutdown() noexcept {
  if (child_stdin_ >= 0) {
    proto::Message bye;
    bye.header.kind = proto::MessageKind::Shutdown;
    try {
      proto::write_message(child_stdin_, bye);
    } catch (...) {
    }
    ::close(child_stdin_);
    child_stdin_ = -1;
  }
  if (child_stdout_ >= 0) {
    ::close(child_stdout_);
    child_stdout_ = -1;
  }
  if (child_pid_ > 0) {
    int status = 0;
    ::waitpid(child_pid_, &status, 0);
    child_pid_ = -1;
  }
}

BackendDescriptor ExternalProcessDenoiser::descriptor() const { return descriptor_; }

DenoiseOutput ExternalProcessDenoiser::denoise(const std::vector<Frame>& x_t, double sigma,
                                               const Condition& condition, const ClipContext& ctx) {
  check_clip(x_t, sigma);
  if (child_pid_ < 0) throw std::runtime_error("external backend: child is not running");

  const Frame& shape = x_t.front();
  const size_t frame_elems = shape.size();
  const int length = static_cast<int>(x_t.size());

  proto::Message request;
  request.header.kind = proto::MessageKind::DenoiseRequest;
  request.header.clip_length = static_cast<uint32_t>(length);
  request.header.height = static_cast<uint32_t>(shape.height);
  request.header.width = static_cast<uint32_t>(shape.width);
  request.header.channels = static_cast<uint32_t>(shape.channels);
  request.header.sigma = sigma;
  request.header.condition_slot = 0;
  for (size_t s = 0; s < ctx.cells.size(); ++s) {
    if (ctx.cells[s] == condition.anchor) {
      request.header.condition_slot = static_cast<uint32_t>(s);
      break;
    }
  }

  request.tensors.reserve(frame_elems * (2 * length + 1));
  for (const Frame& f : x_t) {
    request.tensors.insert(request.tensors.end(), f.data.begin(), f.data.end());
  }
  request.tensors.insert(request.tensors.end(), condition.frame.data.begin(),
                         condition.frame.data.end());
  const bool have_guidance =
      ctx.guidance != nullptr && static_cast<int>(ctx.guidance->size()) == length;
  for (int s = 0; s < length; ++s) {
    if (have_guidance) {
      const Frame& w = (*ctx.guidance)[s].frame;
      request.tensors.insert(request.tensors.end(), w.data.begin(), w.data.end());
    } else {
      request.tensors.insert(request.tensors.end(), frame_elems, 0.0f);
    }
  }
  for (int s = 0; s < length; ++s) {
    if (have_guidance) {
      const OcclusionMask& m = (*ctx.guidance)[s].mask;
      for (int y = 0; y < shape.height; ++y) {
        for (int x = 0; x < shape.width; ++x) {
          float bit = m.at(y, x) ? 1.0f : 0.0f;
          for (int c = 0; c < shape.channels; ++c) request.tensors.push_back(bit);
        }
      }
    } else {
      request.tensors.insert(request.tensors.end(), frame_elems, 1.0f);
    }
  }

  const int timeout_ms = static_cast<int>(options_.timeout_seconds * 1000.0);
  proto::Message reply;
  try {
    proto::write_message(child_stdin_, request);
    if (!proto::read_message(child_stdout_, reply, timeout_ms)) {
      throw std::runtime_error("child exited mid-stream");
    }
  } catch (const std::exception& e) {
    throw std::runtime_error("external backend transport error (" + describe(request.header) +
                             "): " + e.what());
  }
  if (reply.version != proto::kVersion) {
    throw std::runtime_error("external backend: reply version mismatch");
  }
  if (reply.header.kind != proto::MessageKind::DenoiseReply) {
    throw std::runtime_error("external backend: unexpected reply kind");
  }
  const size_t clip_elems = frame_elems * static_cast<size_t>(length);
  size_t n_tensors = reply.tensors.size() / clip_elems;
  if (clip_elems == 0 || reply.tensors.size() % clip_elems != 0 ||
      (n_tensors != 1 && n_tensors != 2)) {
    throw std::runtime_error("external backend: reply tensor size mismatch (" +
                             describe(request.header) + ")");
  }

  auto unpack = [&](size_t offset) {
    std::vector<Frame> frames;
    frames.reserve(length);
    for (int s = 0; s < length; ++s) {
      Frame f(shape.height, shape.width, shape.channels);
      std::memcpy(f.data.data(), reply.tensors.data() + offset + s * frame_elems,
                  frame_elems * sizeof(float));
      frames.push_back(std::move(f));
    }
    return frames;
  };

  DenoiseOutput out;
  out.conditional = unpack(0);
  if (n_tensors == 2) out.unconditional = unpack(clip_elems);
  return out;
}

}  // namespace vgrid
