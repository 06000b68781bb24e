#include "smcreg/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "smcreg/error.hpp"

namespace smcreg {

namespace {

const BinaryMask* mask_for(const MaskList& masks, std::size_t frame, const Sequence4& seq) {
  if (masks.empty()) return nullptr;
  if (masks.size() == seq.size()) return &masks[frame];
  if (masks.size() == 1) return frame == seq.ed_index ? &masks.front() : nullptr;
  throw Error(ErrorKind::GeometryMismatch, "mask count " + std::to_string(masks.size()) +
                                               " matches neither the frame count nor a single ED mask");
}

void check_masks(const MaskList& masks, const Sequence4& seq) {
  for (const auto& m : masks) {
    if (!m.volume().same_geometry(seq.frames.front()))
      throw Error(ErrorKind::GeometryMismatch, "mask grid differs from its image grid");
  }
  (void)mask_for(masks, 0, seq);
}

Sequence4 normalized(const Sequence4& s) {
  Sequence4 out = s;
  for (auto& f : out.frames) f = normalize_zscore(f);
  return out;
}

struct EdEstimate {
  RigidParams params;
  std::optional<double> measurement;
  std::vector<TraceEntry> trace;
  nlohmann::json config;
};

using EdEstimator = std::function<EdEstimate(const Volume3& target, const Volume3& source, const TraceMasks&)>;

RegistrationReport run_sequence(const Sequence4& target, const Sequence4& source, const MaskList& masks_t,
                                const MaskList& masks_s, RegistrationMode mode, NccRegion region,
                                const EdEstimator& estimator, Sequence4* registered) {
  const auto t0 = std::chrono::steady_clock::now();
  target.validate();
  source.validate();
  if (target.size() != source.size())
    throw Error(ErrorKind::GeometryMismatch, "target has " + std::to_string(target.size()) + " frames, source " +
                                                 std::to_string(source.size()));
  check_masks(masks_t, target);
  check_masks(masks_s, source);

  const Sequence4 tn = normalized(target);
  const Sequence4 sn = normalized(source);
  const BinaryMask* ed_mt = mask_for(masks_t, target.ed_index, target);
  const BinaryMask* ed_ms = mask_for(masks_s, source.ed_index, source);

  EdEstimate est;
  const TraceMasks trace_masks{ed_mt, ed_ms};
  if (mode == RegistrationMode::Mask) {
    if (!ed_mt || !ed_ms) throw Error(ErrorKind::MissingMasks, "mask mode needs target and source ED masks");
    est = estimator(ed_mt->volume(), ed_ms->volume(), trace_masks);
  } else {
    est = estimator(tn.ed_frame(), sn.ed_frame(), trace_masks);
  }

  const RotationCenter center{target.ed_frame().center()};
  const HomogeneousMatrix m = to_matrix(est.params, center);
  const HomogeneousMatrix id = HomogeneousMatrix::identity();

  RegistrationReport r;
  r.mode = mode;
  r.config = est.config;
  r.transform = TransformMmDeg::from(est.params);
  r.final_measurement = est.measurement;
  r.trace = std::move(est.trace);
  if (registered) {
    registered->frames.clear();
    registered->frame_rate = source.frame_rate;
    registered->ed_index = target.ed_index;
  }
  for (std::size_t f = 0; f < target.size(); ++f) {
    FrameScore score;
    score.frame = f;
    const NccEvaluator eval(tn.frames[f], sn.frames[f], region);
    const auto before = eval(id);
    const auto after = eval(m);
    if (!before.degenerate) score.ncc_before = before.value;
    if (!after.degenerate) score.ncc_after = after.value;
    const BinaryMask* mt = mask_for(masks_t, f, target);
    const BinaryMask* ms = mask_for(masks_s, f, source);
    if (mt && ms) {
      score.dsc_before = dice_under_transform(*ms, *mt, id).value();
      score.dsc_after = dice_under_transform(*ms, *mt, m).value();
    }
    r.frames.push_back(score);
    if (registered) registered->frames.push_back(resample(source.frames[f], target.frames[f], m));
  }
  r.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

RegistrationReport register_sequence(const Sequence4& target, const Sequence4& source, const MaskList& masks_t,
                                     const MaskList& masks_s, const SmcConfig& cfg, Executor& exec,
                                     Sequence4* registered) {
  cfg.validate();
  auto estimator = [&](const Volume3& t, const Volume3& s, const TraceMasks& tm) {
    const SmcResult res = register_smc(t, s, cfg, exec, tm);
    return EdEstimate{res.estimate, res.best.measurement, to_trace_entries(res.trace), config_to_json(cfg)};
  };
  RegistrationReport r = run_sequence(target, source, masks_t, masks_s, cfg.mode, cfg.ncc_region, estimator, registered);
  r.method = "smc";
  return r;
}

RegistrationReport register_sequence_exhaustive(const Sequence4& target, const Sequence4& source,
                                                const MaskList& masks_t, const MaskList& masks_s,
                                                const GridSpec& grid, RegistrationMode mode, NccRegion region,
                                                Executor& exec, Sequence4* registered) {
  grid.validate();
  auto estimator = [&](const Volume3& t, const Volume3& s, const TraceMasks&) {
    check_inputs(t, s, mode);
    const ExhaustiveResult res = register_exhaustive(t, s, grid, exec, region);
    nlohmann::json cfg = {{"half_steps", grid.half_steps},
                          {"step", grid.step},
                          {"nodes", grid.node_count()},
                          {"evaluations", res.evaluations},
                          {"mode", std::string(to_string(mode))},
                          {"ncc_region", std::string(to_string(region))}};
    return EdEstimate{res.best, res.value, {}, cfg};
  };
  RegistrationReport r = run_sequence(target, source, masks_t, masks_s, mode, region, estimator, registered);
  r.method = "exhaustive";
  return r;
}

double quantile_linear(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<PercentileRow> percentile_summary(std::span<const RegistrationReport> reports) {
  struct Pair {
    double diff, final_dsc;
    const std::string* label;
  };
  std::vector<Pair> pairs;
  for (const auto& r : reports) {
    const auto d = r.mean_dsc_difference();
    const auto f = r.mean_dsc_after();
    if (d && f) pairs.push_back({*d, *f, &r.label});
  }
  if (pairs.empty()) throw Error(ErrorKind::EmptyInput, "no reports carry DSC values");
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.diff < b.diff; });
  std::vector<double> diffs;
  for (const auto& p : pairs) diffs.push_back(p.diff);

  const std::pair<const char*, double> stats[] = {{"min", 0.0}, {"q1", 0.25}, {"q2", 0.5}, {"q3", 0.75}, {"max", 1.0}};
  std::vector<PercentileRow> rows;
  for (const auto& [name, p] : stats) {
    const double q = quantile_linear(diffs, p);
    const Pair* nearest = &pairs.front();
    for (const auto& pr : pairs)
      if (std::abs(pr.diff - q) < std::abs(nearest->diff - q)) nearest = &pr;
    rows.push_back({name, q, nearest->final_dsc, *nearest->label});
  }
  return rows;
}

std::string percentile_csv(const std::vector<PercentileRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "statistic,diff,final,pair\n";
  for (const auto& r : rows) os << r.statistic << ',' << r.diff << ',' << r.final_dsc << ',' << r.label << '\n';
  return os.str();
}

}  // namespace smcreg
