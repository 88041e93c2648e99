#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace oscdet {

enum ExitCode : int { kSuccess = 0, kPartialFailure = 1, kInvalidConfig = 2 };

/// Parses the command line (argv[0] is the program name) and runs the
/// selected subcommand.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

// Each command assumes `cfg` already validated and `cfg.out` created.
int cmd_prepare_data(const RunConfig& cfg);
int cmd_rank_channels(const RunConfig& cfg);
int cmd_detect(const RunConfig& cfg);
int cmd_evaluate(const RunConfig& cfg);

/// Image id for a file: its path relative to `root` without the extension.
std::string image_id_for(const std::string& path, const std::string& root);

/// Locates the image file of an annotation id under `root`, trying the id
/// as given and then common image extensions. Empty when nothing exists.
std::string find_image(const std::string& root, const std::string& image_id);

}  // namespace oscdet
