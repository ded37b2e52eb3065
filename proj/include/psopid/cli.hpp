#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace psopid::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// psopid <simulate|tune-zn|tune-pso|identify|compare|report>
///        [--config FILE] [--seed N] [--out DIR]
int cli_main(int argc, char** argv);
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace psopid::cli
