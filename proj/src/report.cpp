#include "smcreg/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "smcreg/error.hpp"

namespace smcreg {

using nlohmann::json;

TransformMmDeg TransformMmDeg::from(const RigidParams& p) noexcept {
  return {p.tx, p.ty, p.tz, rad_to_deg(p.rx), rad_to_deg(p.ry), rad_to_deg(p.rz)};
}

RigidParams TransformMmDeg::to_params() const noexcept { return RigidParams::from_mm_deg(tx, ty, tz, rx, ry, rz); }

std::optional<Summary> summarize(const std::vector<std::optional<double>>& values) {
  Summary s;
  for (const auto& v : values) {
    if (!v) continue;
    s.mean += *v;
    ++s.count;
  }
  if (s.count == 0) return std::nullopt;
  s.mean /= static_cast<double>(s.count);
  double ss = 0.0;
  for (const auto& v : values)
    if (v) ss += (*v - s.mean) * (*v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(s.count));
  return s;
}

std::vector<std::optional<double>> RegistrationReport::column(std::optional<double> FrameScore::*field) const {
  std::vector<std::optional<double>> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.*field);
  return out;
}

std::optional<double> RegistrationReport::mean_dsc_difference() const {
  std::vector<std::optional<double>> diffs;
  for (const auto& f : frames)
    if (f.dsc_before && f.dsc_after) diffs.push_back(*f.dsc_after - *f.dsc_before);
  const auto s = summarize(diffs);
  return s ? std::optional<double>(s->mean) : std::nullopt;
}

std::optional<double> RegistrationReport::mean_dsc_after() const {
  const auto s = summarize(column(&FrameScore::dsc_after));
  return s ? std::optional<double>(s->mean) : std::nullopt;
}

std::vector<TraceEntry> to_trace_entries(const SmcTrace& trace) {
  std::vector<TraceEntry> out;
  out.reserve(trace.size());
  for (const auto& r : trace) {
    out.push_back({r.iteration, TransformMmDeg::from(r.estimate), r.mean_measurement, r.max_measurement,
                   r.best_measurement, r.ess, r.resampled, r.degenerate, r.dsc});
  }
  return out;
}

json config_to_json(const SmcConfig& c) {
  return {{"particles", c.n_particles},
          {"iterations", c.n_iterations},
          {"t_limit_mm", c.t_limit},
          {"r_limit_deg", c.r_limit},
          {"sigma_t_mm", c.sigma0_t},
          {"sigma_r_deg", c.sigma0_r},
          {"gamma", c.anneal_gamma},
          {"beta", c.beta},
          {"ess_fraction", c.ess_fraction},
          {"seed", c.seed},
          {"mode", std::string(to_string(c.mode))},
          {"estimate", std::string(to_string(c.estimate))},
          {"ncc_region", std::string(to_string(c.ncc_region))}};
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

json transform_json(const TransformMmDeg& t) {
  return {{"tx_mm", t.tx}, {"ty_mm", t.ty}, {"tz_mm", t.tz}, {"rx_deg", t.rx}, {"ry_deg", t.ry}, {"rz_deg", t.rz}};
}

TransformMmDeg transform_from(const json& j) {
  return {j.at("tx_mm").get<double>(),  j.at("ty_mm").get<double>(),  j.at("tz_mm").get<double>(),
          j.at("rx_deg").get<double>(), j.at("ry_deg").get<double>(), j.at("rz_deg").get<double>()};
}

json summary_json(const std::optional<Summary>& s) {
  if (!s) return nullptr;
  return {{"mean", s->mean}, {"std", s->std}, {"count", s->count}};
}

}  // namespace

json to_json(const RegistrationReport& r) {
  json frames = json::array();
  for (const auto& f : r.frames) {
    frames.push_back({{"frame", f.frame},
                      {"ncc_before", opt(f.ncc_before)},
                      {"ncc_after", opt(f.ncc_after)},
                      {"dsc_before", opt(f.dsc_before)},
                      {"dsc_after", opt(f.dsc_after)}});
  }
  json trace = json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"iteration", t.iteration},
                     {"estimate", transform_json(t.estimate)},
                     {"mean_measurement", t.mean_measurement},
                     {"max_measurement", t.max_measurement},
                     {"best_measurement", t.best_measurement},
                     {"ess", t.ess},
                     {"resampled", t.resampled},
                     {"degenerate", t.degenerate},
                     {"dsc", opt(t.dsc)}});
  }
  json aggregates = {
      {"ncc_before", summary_json(summarize(r.column(&FrameScore::ncc_before)))},
      {"ncc_after", summary_json(summarize(r.column(&FrameScore::ncc_after)))},
      {"dsc_before", summary_json(summarize(r.column(&FrameScore::dsc_before)))},
      {"dsc_after", summary_json(summarize(r.column(&FrameScore::dsc_after)))},
  };
  return {{"schema", RegistrationReport::kSchema},
          {"label", r.label},
          {"method", r.method},
          {"mode", std::string(to_string(r.mode))},
          {"config", r.config},
          {"transform", transform_json(r.transform)},
          {"final_measurement", opt(r.final_measurement)},
          {"frames", frames},
          {"aggregates", aggregates},
          {"trace", trace},
          {"wall_s", r.wall_s}};
}

RegistrationReport report_from_json(const json& j) {
  try {
    if (j.at("schema").get<int>() != RegistrationReport::kSchema)
      throw Error(ErrorKind::CorruptHeader, "unsupported report schema");
    RegistrationReport r;
    r.label = j.value("label", std::string());
    r.method = j.at("method").get<std::string>();
    r.mode = parse_mode(j.at("mode").get<std::string>());
    r.config = j.at("config");
    r.transform = transform_from(j.at("transform"));
    r.final_measurement = get_opt(j, "final_measurement");
    for (const auto& f : j.at("frames")) {
      r.frames.push_back({f.at("frame").get<std::size_t>(), get_opt(f, "ncc_before"), get_opt(f, "ncc_after"),
                          get_opt(f, "dsc_before"), get_opt(f, "dsc_after")});
    }
    for (const auto& t : j.at("trace")) {
      r.trace.push_back({t.at("iteration").get<std::size_t>(), transform_from(t.at("estimate")),
                         t.at("mean_measurement").get<double>(), t.at("max_measurement").get<double>(),
                         t.at("best_measurement").get<double>(), t.at("ess").get<double>(),
                         t.at("resampled").get<bool>(), t.at("degenerate").get<std::size_t>(), get_opt(t, "dsc")});
    }
    r.wall_s = j.at("wall_s").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::CorruptHeader, std::string("malformed report: ") + e.what());
  }
}

void write_report(const RegistrationReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path + " for writing");
  out << to_json(r).dump(2) << "\n";
  if (!out) throw Error(ErrorKind::IoFailure, "write failed: " + path);
}

RegistrationReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::CorruptHeader, path + ": " + e.what());
  }
  return report_from_json(j);
}

std::string report_csv(const RegistrationReport& r) {
  std::ostringstream os;
  os.precision(17);
  auto cell = [&](const std::optional<double>& v) {
    if (v) os << *v;
  };
  os << "frame,ncc_before,ncc_after,dsc_before,dsc_after\n";
  for (const auto& f : r.frames) {
    os << f.frame << ',';
    cell(f.ncc_before);
    os << ',';
    cell(f.ncc_after);
    os << ',';
    cell(f.dsc_before);
    os << ',';
    cell(f.dsc_after);
    os << '\n';
  }
  return os.str();
}

}  // namespace smcreg
