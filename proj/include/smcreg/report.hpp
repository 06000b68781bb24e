#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smcreg/smc.hpp"

namespace smcreg {

/// Rigid transform in external units (mm, degrees).
struct TransformMmDeg {
  double tx = 0.0, ty = 0.0, tz = 0.0;
  double rx = 0.0, ry = 0.0, rz = 0.0;

  static TransformMmDeg from(const RigidParams& p) noexcept;
  RigidParams to_params() const noexcept;

  friend bool operator==(const TransformMmDeg&, const TransformMmDeg&) = default;
};

struct FrameScore {
  std::size_t frame = 0;
  std::optional<double> ncc_before;
  std::optional<double> ncc_after;
  std::optional<double> dsc_before;
  std::optional<double> dsc_after;

  friend bool operator==(const FrameScore&, const FrameScore&) = default;
};

struct TraceEntry {
  std::size_t iteration = 0;
  TransformMmDeg estimate;
  double mean_measurement = 0.0;
  double max_measurement = 0.0;
  double best_measurement = 0.0;
  double ess = 0.0;
  bool resampled = false;
  std::size_t degenerate = 0;
  std::optional<double> dsc;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t count = 0;

  friend bool operator==(const Summary&, const Summary&) = default;
};

/// Mean and population std over the values that are present.
std::optional<Summary> summarize(const std::vector<std::optional<double>>& values);

struct RegistrationReport {
  static constexpr int kSchema = 1;

  std::string label;
  std::string method;  // "smc" or "exhaustive"
  RegistrationMode mode = RegistrationMode::Image;
  nlohmann::json config = nlohmann::json::object();
  TransformMmDeg transform;
  std::optional<double> final_measurement;
  std::vector<FrameScore> frames;
  std::vector<TraceEntry> trace;
  double wall_s = 0.0;

  std::vector<std::optional<double>> column(std::optional<double> FrameScore::*field) const;
  /// Mean over frames of (dsc_after - dsc_before); nullopt without DSC.
  std::optional<double> mean_dsc_difference() const;
  std::optional<double> mean_dsc_after() const;

  friend bool operator==(const RegistrationReport&, const RegistrationReport&) = default;
};

std::vector<TraceEntry> to_trace_entries(const SmcTrace& trace);
nlohmann::json config_to_json(const SmcConfig& cfg);

nlohmann::json to_json(const RegistrationReport& r);
/// Throws CorruptHeader on schema violations.
RegistrationReport report_from_json(const nlohmann::json& j);

void write_report(const RegistrationReport& r, const std::string& path);
RegistrationReport read_report(const std::string& path);

/// Per-frame CSV flattening of a report.
std::string report_csv(const RegistrationReport& r);

}  // namespace smcreg
