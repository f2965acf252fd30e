#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rsgarch/types.hpp"

namespace rsgarch::simulate {

/// First month stamped on simulated series.
inline constexpr YearMonth kSimulationStart{1900, 1};

/// Lower-triangular L with L L' = h; diagonal entries floored at 1e-12.
struct Chol2 {
    double l11, l21, l22;
};
[[nodiscard]] Chol2 cholesky(const Cov2& h) noexcept;

/// Draws from the single-regime model; H_0 = h0 and the pre-sample innovation is zero.
/// n must be at least ExcessReturnSeries::kMinLength.
[[nodiscard]] ExcessReturnSeries simulate_single(const BekkParams& params, std::size_t n, const Cov2& h0,
                                                 std::uint64_t seed);

/// Unconditional covariance when every element recursion is stable, CC' otherwise.
[[nodiscard]] Cov2 default_h0(const BekkParams& b);

struct RsSimulation {
    ExcessReturnSeries series;
    /// Realized state per period, 1 or 2.
    std::vector<int> states;
};

/// Draws from the two-state model. Each period's recursion uses the realized state's
/// lagged covariance and innovation. The first state is drawn from the stationary
/// distribution unless `initial_state` is given.
[[nodiscard]] RsSimulation simulate_rs(const RsModelParams& params, std::size_t n, const Cov2& h0,
                                       std::uint64_t seed, std::optional<int> initial_state = std::nullopt);

}  // namespace rsgarch::simulate
