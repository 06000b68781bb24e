#pragma once

#include <array>
#include <cstddef>

#include "smcreg/executor.hpp"
#include "smcreg/geometry.hpp"
#include "smcreg/metrics.hpp"

namespace smcreg {

/// Grid centered on the identity. Axis order (rx, ry, rz, tx, ty, tz);
/// axis d has 2 * half_steps[d] + 1 nodes spaced step[d] apart (degrees for
/// rotations, mm for translations).
struct GridSpec {
  std::array<int, 6> half_steps{4, 4, 4, 4, 4, 4};
  std::array<double, 6> step{2.0, 2.0, 2.0, 2.5, 2.5, 2.5};

  static GridSpec uniform(const std::array<int, 6>& half_steps, double step_t_mm, double step_r_deg);

  /// Throws BadConfig.
  void validate() const;
  std::size_t node_count() const noexcept;
  /// Node parameters; the last axis (tz) varies fastest.
  RigidParams node(std::size_t index) const noexcept;
};

struct ExhaustiveResult {
  RigidParams best;
  double value = 0.0;
  std::size_t best_index = 0;
  std::size_t evaluations = 0;
  std::size_t degenerate = 0;
};

/// Scores every node; the maximum NCC wins, ties go to the lowest index.
ExhaustiveResult register_exhaustive(const Volume3& target, const Volume3& source, const GridSpec& grid,
                                     Executor& exec, NccRegion region = NccRegion::Full);

}  // namespace smcreg
