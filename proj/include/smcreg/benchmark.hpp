#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "smcreg/smc.hpp"

namespace smcreg {

/// One ED pair ready for register_smc (already normalized or binary).
struct BenchCase {
  std::string id;
  Volume3 target;
  Volume3 source;
  SmcConfig config;
};

/// Loads a directory written by the `phantom` subcommand. Image mode uses
/// the z-normalized ED frames, mask mode the ED masks.
BenchCase load_bench_case(const std::filesystem::path& dir, const SmcConfig& cfg);

struct BenchRun {
  std::size_t repeat = 0;
  double wall_s = 0.0;
};

struct BenchResult {
  std::string case_id;
  unsigned workers = 1;
  double wall_s = 0.0;           // median over repeats
  double per_iteration_s = 0.0;  // wall_s / iterations
  double speedup = 1.0;          // median t(1) / median t(workers)
  std::string checksum;
  std::vector<BenchRun> runs;
};

/// 64-bit FNV-1a over the IEEE bytes of (rx, ry, rz, tx, ty, tz), as hex.
std::string estimate_checksum(const RigidParams& p);

/// For each worker count: one discarded warm-up run, then `repeats` timed
/// runs. All checksums must agree before any timing is returned
/// (ChecksumMismatch otherwise). A 1-worker baseline is always measured.
std::vector<BenchResult> run_bench(const BenchCase& c, const std::vector<unsigned>& worker_counts,
                                   std::size_t repeats);

/// case,workers,repeat,wall_s,speedup,checksum; one row per repeat plus a
/// "median" row per worker count.
std::string bench_csv(const std::vector<BenchResult>& results);

}  // namespace smcreg
