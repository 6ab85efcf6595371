#pragma once

#include <spdlog/spdlog.h>

namespace jpcp {

/// Shared stderr logger. Verbosity comes from the JPCP_LOG environment
/// variable (trace, debug, info, warn, error, off); default is warn.
spdlog::logger& log();

}  // namespace jpcp
