#include "smcreg/smc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "smcreg/error.hpp"

namespace smcreg {

std::string_view to_string(RegistrationMode m) noexcept { return m == RegistrationMode::Image ? "image" : "mask"; }

std::string_view to_string(EstimateMode m) noexcept {
  return m == EstimateMode::WeightedMean ? "weighted_mean" : "best_particle";
}

RegistrationMode parse_mode(std::string_view s) {
  if (s == "image") return RegistrationMode::Image;
  if (s == "mask") return RegistrationMode::Mask;
  throw Error(ErrorKind::BadConfig, "mode must be image|mask, got '" + std::string(s) + "'");
}

EstimateMode parse_estimate(std::string_view s) {
  if (s == "weighted_mean") return EstimateMode::WeightedMean;
  if (s == "best_particle") return EstimateMode::BestParticle;
  throw Error(ErrorKind::BadConfig, "estimate must be weighted_mean|best_particle, got '" + std::string(s) + "'");
}

void SmcConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::BadConfig, what); };
  if (n_particles < 1) fail("n_particles must be >= 1");
  if (n_iterations < 1) fail("n_iterations must be >= 1");
  if (!(t_limit > 0.0) || !std::isfinite(t_limit)) fail("t_limit must be positive");
  if (!(r_limit > 0.0) || !std::isfinite(r_limit)) fail("r_limit must be positive");
  if (!(sigma0_t >= 0.0) || !(sigma0_r >= 0.0)) fail("noise sigmas must be >= 0");
  if (!(anneal_gamma > 0.0 && anneal_gamma <= 1.0)) fail("anneal_gamma must be in (0, 1]");
  if (!(beta >= 0.0) || !std::isfinite(beta)) fail("beta must be >= 0");
  if (!(ess_fraction > 0.0 && ess_fraction <= 1.0)) fail("ess_fraction must be in (0, 1]");
  if (n_particles > std::numeric_limits<std::uint32_t>::max()) fail("too many particles");
}

double ParticleSet::weight_sum() const noexcept {
  double s = 0.0;
  for (const auto& p : particles) s += p.weight;
  return s;
}

namespace {

/// Per-axis limits in internal units, ordered (rx, ry, rz, tx, ty, tz).
std::array<double, 6> limits(const SmcConfig& cfg) {
  const double r = deg_to_rad(cfg.r_limit);
  return {r, r, r, cfg.t_limit, cfg.t_limit, cfg.t_limit};
}

std::array<double, 6> sigmas(const SmcConfig& cfg, std::size_t iteration) {
  const double decay = std::pow(cfg.anneal_gamma, static_cast<double>(iteration));
  const double r = deg_to_rad(cfg.sigma0_r) * decay;
  const double t = cfg.sigma0_t * decay;
  return {r, r, r, t, t, t};
}

}  // namespace

ParticleSet init_particles(const SmcConfig& cfg) {
  cfg.validate();
  const auto lim = limits(cfg);
  ParticleSet ps;
  ps.rng_seed = cfg.seed;
  ps.particles.resize(cfg.n_particles);
  const double w = 1.0 / static_cast<double>(cfg.n_particles);
  for (std::size_t i = 0; i < cfg.n_particles; ++i) {
    rng::Stream s(cfg.seed, rng::Purpose::Init, static_cast<std::uint32_t>(i), 0);
    std::array<double, 6> x{};
    for (std::size_t d = 0; d < 6; ++d) x[d] = (2.0 * s.uniform() - 1.0) * lim[d];
    ps.particles[i] = {RigidParams::from_array(x), w, 0.0};
  }
  return ps;
}

ParticleSet predict(const ParticleSet& ps, const SmcConfig& cfg) {
  const auto lim = limits(cfg);
  const auto sd = sigmas(cfg, ps.iteration);
  ParticleSet out = ps;
  for (std::size_t i = 0; i < out.particles.size(); ++i) {
    rng::Stream s(ps.rng_seed, rng::Purpose::Predict, static_cast<std::uint32_t>(i),
                  static_cast<std::uint32_t>(ps.iteration));
    auto x = out.particles[i].state.as_array();
    for (std::size_t d = 0; d < 6; ++d) {
      const double noise = s.normal();
      if (sd[d] == 0.0) continue;
      x[d] = std::clamp(x[d] + sd[d] * noise, -2.0 * lim[d], 2.0 * lim[d]);
    }
    out.particles[i].state = RigidParams::from_array(x);
  }
  return out;
}

ParticleSet measure(ParticleSet ps, const NccEvaluator& eval, const RotationCenter& center, Executor& exec,
                    std::size_t* degenerate) {
  std::vector<unsigned char> flags(ps.size(), 0);
  exec.parallel_for(ps.size(), [&](std::size_t i) {
    const auto r = eval(to_matrix(ps.particles[i].state, center));
    ps.particles[i].measurement = r.value;
    flags[i] = r.degenerate;
  });
  std::size_t bad = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    bad += flags[i];
    const Particle& p = ps.particles[i];
    if (!ps.best || p.measurement > ps.best->measurement) ps.best = p;
  }
  if (degenerate) *degenerate = bad;
  return ps;
}

ParticleSet measure(ParticleSet ps, const Volume3& target, const Volume3& source, const SmcConfig& cfg,
                    Executor& exec, std::size_t* degenerate) {
  const NccEvaluator eval(target, source, cfg.ncc_region);
  return measure(std::move(ps), eval, RotationCenter{target.center()}, exec, degenerate);
}

ParticleSet update_weights(ParticleSet ps, const SmcConfig& cfg, bool* reset) {
  double zmax = -std::numeric_limits<double>::infinity();
  for (const auto& p : ps.particles) zmax = std::max(zmax, p.measurement);
  double sum = 0.0;
  for (auto& p : ps.particles) {
    p.weight *= std::exp(cfg.beta * (p.measurement - zmax));
    sum += p.weight;
  }
  const bool underflow = !(sum > 0.0) || !std::isfinite(sum);
  const double n = static_cast<double>(ps.size());
  for (auto& p : ps.particles) p.weight = underflow ? 1.0 / n : p.weight / sum;
  if (reset) *reset = underflow;
  return ps;
}

double ess(const ParticleSet& ps) noexcept {
  double s = 0.0;
  for (const auto& p : ps.particles) s += p.weight * p.weight;
  return 1.0 / s;
}

std::vector<std::size_t> systematic_counts(std::span<const double> weights, std::size_t n_out, double u) {
  if (weights.empty() || n_out == 0) throw Error(ErrorKind::BadConfig, "systematic resampling needs weights");
  if (!(u >= 0.0 && u < 1.0)) throw Error(ErrorKind::BadConfig, "offset must be in [0, 1)");
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw Error(ErrorKind::BadConfig, "weights sum to zero");

  // Positions u + m (m = 0..n_out-1) against the cumulative weights scaled
  // to n_out; selections up to bin i = ceil(C_i - u).
  const double n = static_cast<double>(n_out);
  std::vector<std::size_t> counts(weights.size(), 0);
  double cum = 0.0;
  std::size_t taken = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    const double edge = i + 1 == weights.size() ? n : cum / total * n;
    const double upto = std::clamp(std::ceil(edge - u), 0.0, n);
    const std::size_t upto_n = std::max(taken, static_cast<std::size_t>(upto));
    counts[i] = upto_n - taken;
    taken = upto_n;
  }
  return counts;
}

ParticleSet resample_systematic(const ParticleSet& ps, double u) {
  std::vector<double> w(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) w[i] = ps.particles[i].weight;
  const auto counts = systematic_counts(w, ps.size(), u);
  ParticleSet out;
  out.iteration = ps.iteration;
  out.rng_seed = ps.rng_seed;
  out.best = ps.best;
  out.particles.reserve(ps.size());
  const double uniform = 1.0 / static_cast<double>(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t c = 0; c < counts[i]; ++c) {
      Particle p = ps.particles[i];
      p.weight = uniform;
      out.particles.push_back(p);
    }
  }
  return out;
}

ParticleSet resample_systematic(const ParticleSet& ps, rng::Stream& rng) { return resample_systematic(ps, rng.uniform()); }

RigidParams estimate(const ParticleSet& ps, const SmcConfig& cfg) {
  if (cfg.estimate == EstimateMode::BestParticle && ps.best) return ps.best->state;
  // Limits keep angles far from +-pi, so a linear mean is adequate.
  std::array<double, 6> acc{};
  for (const auto& p : ps.particles) {
    const auto x = p.state.as_array();
    for (std::size_t d = 0; d < 6; ++d) acc[d] += p.weight * x[d];
  }
  return RigidParams::from_array(acc);
}

void check_inputs(const Volume3& target, const Volume3& source, RegistrationMode mode) {
  if (mode == RegistrationMode::Mask) {
    for (const Volume3* v : {&target, &source})
      for (float x : v->values())
        if (x != 0.0f && x != 1.0f) throw Error(ErrorKind::BadConfig, "mask mode requires binary inputs");
    return;
  }
  for (const Volume3* v : {&target, &source}) {
    double mean = 0.0, sq = 0.0;
    for (float x : v->values()) {
      mean += x;
      sq += static_cast<double>(x) * x;
    }
    const double n = static_cast<double>(v->size());
    mean /= n;
    const double sd = std::sqrt(std::max(0.0, sq / n - mean * mean));
    if (std::abs(mean) > 1e-3 || std::abs(sd - 1.0) > 1e-3)
      throw Error(ErrorKind::BadConfig, "image mode requires z-normalized inputs");
  }
}

SmcResult register_smc(const Volume3& target, const Volume3& source, const SmcConfig& cfg, Executor& exec,
                       const TraceMasks& masks) {
  cfg.validate();
  check_inputs(target, source, cfg.mode);
  const RotationCenter center{target.center()};
  const NccEvaluator eval(target, source, cfg.ncc_region);
  const double n = static_cast<double>(cfg.n_particles);

  SmcResult result;
  ParticleSet ps = init_particles(cfg);
  for (std::size_t k = 0; k < cfg.n_iterations; ++k) {
    ps.iteration = k;
    IterationRecord rec;
    rec.iteration = k;
    ps = predict(ps, cfg);
    ps = measure(std::move(ps), eval, center, exec, &rec.degenerate);
    ps = update_weights(std::move(ps), cfg, &rec.weights_reset);

    double sum = 0.0, mx = 0.0;
    for (const auto& p : ps.particles) {
      sum += p.measurement;
      mx = std::max(mx, p.measurement);
    }
    rec.mean_measurement = sum / n;
    rec.max_measurement = mx;
    rec.best_measurement = ps.best->measurement;
    rec.ess = ess(ps);
    if (rec.ess < cfg.ess_fraction * n) {
      rng::Stream s(cfg.seed, rng::Purpose::Resample, 0, static_cast<std::uint32_t>(k));
      ps = resample_systematic(ps, s);
      rec.resampled = true;
    }
    rec.estimate = estimate(ps, cfg);
    if (masks.target && masks.source)
      rec.dsc = dice_under_transform(*masks.source, *masks.target, to_matrix(rec.estimate, center)).value();
    result.trace.push_back(rec);
  }
  result.estimate = estimate(ps, cfg);
  result.best = *ps.best;
  return result;
}

}  // namespace smcreg
