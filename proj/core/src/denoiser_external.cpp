#include <sstream>

#include "pnp/denoiser.hpp"
#include "pnp/image_io.hpp"
#include "subprocess.hpp"

namespace pnp {

Image external_denoise(const std::vector<std::string>& command, const Image& z,
                       double timeout_sec) {
  if (command.empty()) throw ConfigError("external denoiser command is empty");
  z.validate();

  auto result = detail::run_subprocess(command, encode_imgf64(z), timeout_sec);
  if (result.timed_out)
    throw Error("external denoiser timed out after " + std::to_string(timeout_sec) +
                "s and was killed: " + command[0]);
  if (result.exit_code != 0) {
    std::ostringstream msg;
    msg << "external denoiser '" << command[0] << "' exited with code "
        << result.exit_code;
    if (!result.stderr_text.empty()) msg << "; stderr: " << result.stderr_text;
    throw Error(msg.str());
  }

  Image out;
  try {
    out = decode_imgf64(result.stdout_bytes.data(), result.stdout_bytes.size());
  } catch (const std::exception& e) {
    throw Error(std::string("external denoiser produced malformed output: ") +
                e.what());
  }
  if (!out.same_shape(z))
    throw Error("external denoiser changed image dimensions");
  return out;
}

namespace {

class ExternalDenoiser final : public Denoiser {
 public:
  ExternalDenoiser(std::vector<std::string> command, double timeout_sec)
      : command_(std::move(command)), timeout_sec_(timeout_sec) {
    if (command_.empty()) throw ConfigError("external denoiser command is empty");
    if (!(timeout_sec_ > 0.0)) throw ConfigError("external denoiser timeout must be > 0");
  }

  Image denoise(const Image& z) const override {
    return external_denoise(command_, z, timeout_sec_);
  }

  std::string describe() const override { return "external(" + command_[0] + ")"; }

 private:
  std::vector<std::string> command_;
  double timeout_sec_;
};

}  // namespace

DenoiserPtr make_external_denoiser(std::vector<std::string> command,
                                   double timeout_sec) {
  return std::make_shared<ExternalDenoiser>(std::move(command), timeout_sec);
}

}  // namespace pnp
