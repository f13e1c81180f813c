#pragma once

#include <filesystem>
#include <vector>

#include "mmsync/montecarlo.hpp"

namespace mmsync::cli {

/// Writes the bias and variance-vs-CRLB figures for a campaign and returns
/// the paths written.
std::vector<std::filesystem::path> write_campaign_figures(const McReport& report,
                                                          const std::filesystem::path& dir);

}  // namespace mmsync::cli
