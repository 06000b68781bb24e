#include "smcreg/exhaustive.hpp"

#include <atomic>
#include <cmath>
#include <vector>

#include "smcreg/error.hpp"

namespace smcreg {

GridSpec GridSpec::uniform(const std::array<int, 6>& half_steps, double step_t_mm, double step_r_deg) {
  GridSpec g;
  g.half_steps = half_steps;
  g.step = {step_r_deg, step_r_deg, step_r_deg, step_t_mm, step_t_mm, step_t_mm};
  return g;
}

void GridSpec::validate() const {
  for (std::size_t d = 0; d < 6; ++d) {
    if (half_steps[d] < 0) throw Error(ErrorKind::BadConfig, "grid step counts must be >= 0");
    if (half_steps[d] > 0 && (!(step[d] > 0.0) || !std::isfinite(step[d])))
      throw Error(ErrorKind::BadConfig, "grid step sizes must be positive");
  }
  double nodes = 1.0;
  for (int m : half_steps) nodes *= 2.0 * m + 1.0;
  if (nodes > 1e9) throw Error(ErrorKind::BadConfig, "grid has too many nodes");
}

std::size_t GridSpec::node_count() const noexcept {
  std::size_t n = 1;
  for (int m : half_steps) n *= static_cast<std::size_t>(2 * m + 1);
  return n;
}

RigidParams GridSpec::node(std::size_t index) const noexcept {
  std::array<double, 6> x{};
  for (std::size_t d = 6; d-- > 0;) {
    const std::size_t width = static_cast<std::size_t>(2 * half_steps[d] + 1);
    const auto a = static_cast<long long>(index % width);
    index /= width;
    const double v = static_cast<double>(a - half_steps[d]) * step[d];
    x[d] = d < 3 ? deg_to_rad(v) : v;
  }
  return RigidParams::from_array(x);
}

ExhaustiveResult register_exhaustive(const Volume3& target, const Volume3& source, const GridSpec& grid,
                                     Executor& exec, NccRegion region) {
  grid.validate();
  const NccEvaluator eval(target, source, region);
  const RotationCenter center{target.center()};
  const std::size_t n = grid.node_count();
  std::vector<double> values(n, 0.0);
  std::vector<unsigned char> degenerate(n, 0);
  std::atomic<std::size_t> evaluations{0};
  exec.parallel_for(n, [&](std::size_t i) {
    const auto r = eval(to_matrix(grid.node(i), center));
    values[i] = r.value;
    degenerate[i] = r.degenerate;
    evaluations.fetch_add(1, std::memory_order_relaxed);
  });

  ExhaustiveResult out;
  out.evaluations = evaluations.load();
  out.value = values[0];
  for (std::size_t i = 0; i < n; ++i) {
    out.degenerate += degenerate[i];
    if (values[i] > out.value) {
      out.value = values[i];
      out.best_index = i;
    }
  }
  out.best = grid.node(out.best_index);
  return out;
}

}  // namespace smcreg
