#pragma once

namespace aoi {

enum class Execution { Serial, Parallel };

/// Caps OpenMP worker threads; n <= 0 leaves the runtime default.
void set_thread_limit(int n);
int max_threads();

}  // namespace aoi
