#include "smcreg/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <map>
#include <sstream>

#include "smcreg/error.hpp"
#include "smcreg/volume_io.hpp"

namespace smcreg {

namespace {

Volume3 ed_of(const std::filesystem::path& p) {
  Sequence4 s = read_sequence(p);
  s.validate();
  return s.ed_frame();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

BenchCase load_bench_case(const std::filesystem::path& dir, const SmcConfig& cfg) {
  cfg.validate();
  if (!std::filesystem::is_directory(dir))
    throw Error(ErrorKind::IoFailure, "bench case is not a directory: " + dir.string());
  BenchCase c;
  c.id = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
  c.config = cfg;
  if (cfg.mode == RegistrationMode::Mask) {
    const auto mt = read_masks(dir / "target_masks.nii");
    const auto ms = read_masks(dir / "source_masks.nii");
    if (mt.empty() || ms.empty()) throw Error(ErrorKind::MissingMasks, "bench case has no masks");
    c.target = mt.front().volume();
    c.source = ms.front().volume();
  } else {
    c.target = normalize_zscore(ed_of(dir / "target.nii"));
    c.source = normalize_zscore(ed_of(dir / "source.nii"));
  }
  return c;
}

std::string estimate_checksum(const RigidParams& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : p.as_array()) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

std::vector<BenchResult> run_bench(const BenchCase& c, const std::vector<unsigned>& worker_counts,
                                   std::size_t repeats) {
  if (repeats < 1) throw Error(ErrorKind::BadConfig, "repeats must be >= 1");
  if (worker_counts.empty()) throw Error(ErrorKind::BadConfig, "no worker counts given");
  for (unsigned w : worker_counts)
    if (w < 1) throw Error(ErrorKind::BadConfig, "worker counts must be >= 1");
  c.config.validate();

  std::vector<unsigned> counts = worker_counts;
  if (std::find(counts.begin(), counts.end(), 1u) == counts.end()) counts.insert(counts.begin(), 1u);

  std::map<unsigned, std::vector<double>> times;
  std::string reference;
  auto check = [&](const RigidParams& p, unsigned w) {
    const std::string sum = estimate_checksum(p);
    if (reference.empty()) reference = sum;
    if (sum != reference)
      throw Error(ErrorKind::ChecksumMismatch, "checksum " + sum + " with " + std::to_string(w) +
                                                   " workers differs from " + reference);
  };

  for (unsigned w : counts) {
    if (times.count(w)) continue;
    Executor exec(w);
    check(register_smc(c.target, c.source, c.config, exec).estimate, w);  // warm-up
    auto& t = times[w];
    for (std::size_t r = 0; r < repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const SmcResult res = register_smc(c.target, c.source, c.config, exec);
      t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      check(res.estimate, w);
    }
  }

  const double base = median(times.at(1));
  std::vector<BenchResult> out;
  for (unsigned w : worker_counts) {
    if (std::any_of(out.begin(), out.end(), [&](const BenchResult& b) { return b.workers == w; })) continue;
    BenchResult b;
    b.case_id = c.id;
    b.workers = w;
    b.wall_s = median(times.at(w));
    b.per_iteration_s = b.wall_s / static_cast<double>(c.config.n_iterations);
    b.speedup = base / b.wall_s;
    b.checksum = reference;
    for (std::size_t r = 0; r < repeats; ++r) b.runs.push_back({r, times.at(w)[r]});
    out.push_back(std::move(b));
  }
  return out;
}

std::string bench_csv(const std::vector<BenchResult>& results) {
  std::ostringstream os;
  os.precision(9);
  os << "case,workers,repeat,wall_s,speedup,checksum\n";
  for (const auto& b : results) {
    const double base = b.wall_s * b.speedup;
    for (const auto& r : b.runs)
      os << b.case_id << ',' << b.workers << ',' << r.repeat << ',' << r.wall_s << ',' << base / r.wall_s << ','
         << b.checksum << '\n';
    os << b.case_id << ',' << b.workers << ",median," << b.wall_s << ',' << b.speedup << ',' << b.checksum << '\n';
  }
  return os.str();
}

}  // namespace smcreg
