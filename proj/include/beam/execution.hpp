#pragma once

namespace beam {

/// Whether per-candidate kernels fan out over OpenMP threads.
enum class Execution { serial, parallel };

/// Threads OpenMP will use for parallel kernels (1 when built without OpenMP).
int max_threads();

}  // namespace beam
