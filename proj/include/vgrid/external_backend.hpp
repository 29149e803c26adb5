#pragma once

#include <string>
#include <vector>

#include "vgrid/denoiser.hpp"

namespace vgrid {

struct ExternalBackendOptions {
  std::vector<std::string> command;
  double timeout_seconds = 300.0;
};

// Bridges denoise calls to a child process over its standard streams, one
// framed request/response exchange per call (see proto.hpp). The child must
// open the conversation with a version-1 hello; anything else is rejected.
// Serial-only: one in-flight request.
class ExternalProcessDenoiser : public DenoiserBackend {
 public:
  explicit ExternalProcessDenoiser(ExternalBackendOptions options);
  ~ExternalProcessDenoiser() override;

  ExternalProcessDenoiser(const ExternalProcessDenoiser&) = delete;
  ExternalProcessDenoiser& operator=(const ExternalProcessDenoiser&) = delete;

  BackendDescriptor descriptor() const override;
  DenoiseOutput denoise(const std::vector<Frame>& x_t, double sigma, const Condition& condition,
                        const ClipContext& ctx) override;

 private:
  void spawn();
  void shutdown() noexcept;

  ExternalBackendOptions options_;
  BackendDescriptor descriptor_;
  int child_stdin_ = -1;
  int child_stdout_ = -1;
  pid_t child_pid_ = -1;
};

}  // namespace vgrid
