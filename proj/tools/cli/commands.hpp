#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace mmsync::cli {

enum class Command { campaign, estimate, crlb, regularity };

enum ExitCode : int {
    kSuccess = 0,
    kInputError = 2,
    kNumericalError = 3,
};

struct RunSpec {
    Command command = Command::campaign;
    std::optional<std::filesystem::path> config_path;
    std::filesystem::path output_dir = ".";
    bool plot = false;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> fft_size;
    std::optional<std::uint64_t> seed;
};

/// Parses argv and dispatches. Never throws; returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_campaign(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_estimate(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_crlb(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_regularity(const RunSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace mmsync::cli
