#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "smcreg/executor.hpp"
#include "smcreg/geometry.hpp"
#include "smcreg/metrics.hpp"
#include "smcreg/rng.hpp"

namespace smcreg {

enum class RegistrationMode { Image, Mask };
enum class EstimateMode { WeightedMean, BestParticle };

std::string_view to_string(RegistrationMode m) noexcept;
std::string_view to_string(EstimateMode m) noexcept;
RegistrationMode parse_mode(std::string_view s);
EstimateMode parse_estimate(std::string_view s);

/// Particle-filter settings. Limits and noise are in mm and degrees.
struct SmcConfig {
  std::size_t n_particles = 256;
  std::size_t n_iterations = 50;
  double t_limit = 20.0;
  double r_limit = 15.0;
  double sigma0_t = 2.0;
  double sigma0_r = 2.0;
  double anneal_gamma = 0.95;
  double beta = 100.0;
  double ess_fraction = 0.5;
  std::uint64_t seed = 1;
  RegistrationMode mode = RegistrationMode::Image;
  EstimateMode estimate = EstimateMode::WeightedMean;
  NccRegion ncc_region = NccRegion::Full;

  /// Throws BadConfig.
  void validate() const;
};

struct Particle {
  RigidParams state;
  double weight = 0.0;
  double measurement = 0.0;
};

struct ParticleSet {
  std::vector<Particle> particles;
  std::size_t iteration = 0;
  std::uint64_t rng_seed = 0;
  /// Highest-measurement particle seen so far (elitist record).
  std::optional<Particle> best;

  std::size_t size() const noexcept { return particles.size(); }
  double weight_sum() const noexcept;
};

/// Uniform draws in the limit box, uniform weights. Throws BadConfig.
ParticleSet init_particles(const SmcConfig& cfg);

/// Gaussian random walk with per-axis sigma0 * gamma^iteration, clamped to
/// twice the limits. Draws depend only on (seed, iteration, particle index).
ParticleSet predict(const ParticleSet& ps, const SmcConfig& cfg);

/// Scores every particle with `eval`; degenerate overlaps score 0 and are
/// counted in `degenerate` when given. Updates the elitist record.
ParticleSet measure(ParticleSet ps, const NccEvaluator& eval, const RotationCenter& center, Executor& exec,
                    std::size_t* degenerate = nullptr);
ParticleSet measure(ParticleSet ps, const Volume3& target, const Volume3& source, const SmcConfig& cfg,
                    Executor& exec, std::size_t* degenerate = nullptr);

/// w <- w * exp(beta * z), renormalized. Falls back to uniform weights when
/// the normalizer underflows; `reset` reports that.
ParticleSet update_weights(ParticleSet ps, const SmcConfig& cfg, bool* reset = nullptr);

/// 1 / sum(w^2).
double ess(const ParticleSet& ps) noexcept;

/// Systematic resampling counts for `n_out` draws with offset u in [0, 1)
/// expressed in units of 1/n_out.
std::vector<std::size_t> systematic_counts(std::span<const double> weights, std::size_t n_out, double u);

/// Systematic resampling using one uniform draw from `rng`.
ParticleSet resample_systematic(const ParticleSet& ps, rng::Stream& rng);
ParticleSet resample_systematic(const ParticleSet& ps, double u);

RigidParams estimate(const ParticleSet& ps, const SmcConfig& cfg);

struct IterationRecord {
  std::size_t iteration = 0;
  RigidParams estimate;
  double mean_measurement = 0.0;
  double max_measurement = 0.0;
  double best_measurement = 0.0;
  double ess = 0.0;
  bool resampled = false;
  std::size_t degenerate = 0;
  bool weights_reset = false;
  std::optional<double> dsc;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

using SmcTrace = std::vector<IterationRecord>;

/// Optional masks used only to report the estimate's DSC per iteration.
struct TraceMasks {
  const BinaryMask* target = nullptr;
  const BinaryMask* source = nullptr;
};

struct SmcResult {
  RigidParams estimate;
  Particle best;
  SmcTrace trace;
};

/// Full predict/measure/update/resample/estimate loop. The returned
/// transform maps target space into source space about the target's center.
SmcResult register_smc(const Volume3& target, const Volume3& source, const SmcConfig& cfg, Executor& exec,
                       const TraceMasks& masks = {});

/// Throws BadConfig if the inputs do not suit the mode (binary for masks,
/// z-normalized for images).
void check_inputs(const Volume3& target, const Volume3& source, RegistrationMode mode);

}  // namespace smcreg
