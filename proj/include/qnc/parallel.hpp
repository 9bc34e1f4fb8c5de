#pragma once

namespace qnc {

/// Selects the OpenMP kernel or the serial reference it is tested against.
enum class Execution { serial, parallel };

/// Threads OpenMP will use for a parallel region (1 without OpenMP).
int max_threads();

}  // namespace qnc
