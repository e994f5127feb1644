#pragma once

namespace hyswitch {

/// Kernels with a data-parallel loop come in two flavors. Serial is the
/// reference path; both produce identical results for the same seed.
enum class Execution { Serial, Parallel };

/// Worker threads used by Execution::Parallel. HYSWITCH_THREADS overrides
/// the OpenMP default; 1 when built without OpenMP.
int thread_count();

} // namespace hyswitch
