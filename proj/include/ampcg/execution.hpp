#pragma once

namespace ampcg {

/// Selects the OpenMP kernel or its serial reference. Both produce identical
/// output; results are written to indexed slots and merged in input order.
enum class Execution { Serial, Parallel };

}  // namespace ampcg
