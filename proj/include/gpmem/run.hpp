#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "gpmem/config.hpp"
#include "gpmem/error.hpp"

namespace gpmem {

struct RunOptions {
  /// Replaces the config's output directory when set.
  std::optional<std::filesystem::path> out_dir;
  /// Reserved; every method is deterministic.
  std::optional<long> seed;
  /// Progress messages go here when set.
  std::ostream* log = nullptr;
};

/// Exit status for a failure: 2 for numerical categories, 1 otherwise.
int exit_status(ErrorCode code) noexcept;

/// Runs the configured command, writes its CSV files, summary.txt and
/// manifest.json into the output directory, and returns the exit status:
/// 0 on success, 2 when the numerics fail or the report is negative (an
/// inadmissible kernel, a probe that sees the wave early), 1 on usage errors.
/// Library errors are caught and reported in the manifest.
int run(const RunConfig& config, const RunOptions& options = {});

}  // namespace gpmem
