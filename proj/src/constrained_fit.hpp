#pragma once

#include "ampcg/estimation.hpp"

namespace ampcg::detail {

/// Penalty-method refinement of an unconstrained fit toward equal error
/// variances. Minimises  -loglik + lambda * sum_j (log sigma_jj - mean log sigma)^2
/// over the free coefficients and concentration entries, escalating lambda by
/// cfg.penalty_schedule up to cfg.penalty_cap.
FitResult refine_equal_variances(const Observations& obs, FitResult start, const FitConfig& cfg);

}  // namespace ampcg::detail
