#pragma once

#include <span>
#include <string>
#include <vector>

#include "smcreg/exhaustive.hpp"
#include "smcreg/report.hpp"
#include "smcreg/smc.hpp"

namespace smcreg {

/// Masks per frame: either one per frame or a single mask for the ED frame.
/// Frames without a mask get null DSC entries.
using MaskList = std::vector<BinaryMask>;

/// Estimates one transform on the ED pair (images or masks, per cfg.mode),
/// applies it to every source frame, and scores NCC/DSC before and after.
/// When `registered` is given it receives the warped source frames.
/// Throws GeometryMismatch, MissingMasks, BadConfig, ConstantVolume.
RegistrationReport register_sequence(const Sequence4& target, const Sequence4& source, const MaskList& masks_t,
                                     const MaskList& masks_s, const SmcConfig& cfg, Executor& exec,
                                     Sequence4* registered = nullptr);

/// Same propagation, with the grid-search baseline estimating the ED transform.
RegistrationReport register_sequence_exhaustive(const Sequence4& target, const Sequence4& source,
                                                const MaskList& masks_t, const MaskList& masks_s,
                                                const GridSpec& grid, RegistrationMode mode, NccRegion region,
                                                Executor& exec, Sequence4* registered = nullptr);

/// Linear interpolation between closest ranks: h = (n - 1) p.
double quantile_linear(std::vector<double> values, double p);

struct PercentileRow {
  std::string statistic;  // min, q1, q2, q3, max
  double diff = 0.0;      // mean DSC difference at this quantile
  double final_dsc = 0.0; // mean after-DSC of the pair nearest that quantile
  std::string label;      // that pair's label
};

/// Min/Q1/median/Q3/max of per-pair mean DSC differences. Reports without
/// DSC are ignored; throws EmptyInput when none remain.
std::vector<PercentileRow> percentile_summary(std::span<const RegistrationReport> reports);
std::string percentile_csv(const std::vector<PercentileRow>& rows);

}  // namespace smcreg
