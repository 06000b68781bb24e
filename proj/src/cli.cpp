#include "smcreg/cli.hpp"

#include <glob.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "smcreg/benchmark.hpp"
#include "smcreg/error.hpp"
#include "smcreg/kernels.hpp"
#include "smcreg/phantom.hpp"
#include "smcreg/pipeline.hpp"
#include "smcreg/volume_io.hpp"

namespace smcreg {

namespace {

namespace fs = std::filesystem;

std::vector<double> split_numbers(const std::string& s, std::size_t expect, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::BadConfig, flag + ": not a number: '" + item + "'");
    }
  }
  if (expect && out.size() != expect)
    throw Error(ErrorKind::BadConfig, flag + ": expected " + std::to_string(expect) + " values, got " +
                                          std::to_string(out.size()));
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error(ErrorKind::IoFailure, "write failed: " + path.string());
}

void set_ed(Sequence4& s, std::size_t ed, const std::string& what) {
  if (ed >= s.size())
    throw Error(ErrorKind::BadConfig, "--ed-index " + std::to_string(ed) + " out of range for " + what + " (" +
                                          std::to_string(s.size()) + " frames)");
  s.ed_index = ed;
}

struct PairArgs {
  std::string target, source, target_masks, source_masks;
  std::size_t ed_index = 0;
  std::string out, out_volume, out_csv, label;
  unsigned workers = 1;

  void add(CLI::App* app) {
    app->add_option("--target", target, "Target volume or sequence (.nii, .raw/.json)")->required();
    app->add_option("--source", source, "Source volume or sequence")->required();
    app->add_option("--target-masks", target_masks, "Target masks (one per frame, or ED only)");
    app->add_option("--source-masks", source_masks, "Source masks");
    app->add_option("--ed-index", ed_index, "ED frame index")->capture_default_str();
    app->add_option("--workers", workers, "Worker threads (0 = all cores)")->capture_default_str();
    app->add_option("--out", out, "Report JSON")->required();
    app->add_option("--out-csv", out_csv, "Per-frame CSV");
    app->add_option("--out-volume", out_volume, "Registered source sequence");
    app->add_option("--label", label, "Pair label stored in the report");
  }

  struct Loaded {
    Sequence4 target, source;
    MaskList masks_t, masks_s;
  };

  Loaded load() const {
    Loaded l;
    l.target = read_sequence(target);
    l.source = read_sequence(source);
    set_ed(l.target, ed_index, target);
    set_ed(l.source, ed_index, source);
    if (!target_masks.empty()) l.masks_t = read_masks(target_masks);
    if (!source_masks.empty()) l.masks_s = read_masks(source_masks);
    return l;
  }

  void save(RegistrationReport& r, const Sequence4& registered, std::ostream& out) const {
    r.label = label.empty() ? fs::path(source).filename().string() : label;
    write_report(r, this->out);
    if (!out_csv.empty()) write_text(out_csv, report_csv(r));
    if (!out_volume.empty()) write_volume(registered, out_volume);
    const auto& t = r.transform;
    out << r.method << ' ' << r.label << ": t=(" << t.tx << ", " << t.ty << ", " << t.tz << ") mm r=(" << t.rx
        << ", " << t.ry << ", " << t.rz << ") deg";
    if (auto d = r.mean_dsc_after()) out << " dsc=" << *d;
    out << '\n';
  }
};

struct SmcArgs {
  SmcConfig cfg;
  std::string mode = "image", estimate = "weighted_mean", region = "full";

  void add(CLI::App* app) {
    app->add_option("--mode", mode, "image|mask")->capture_default_str();
    app->add_option("--particles", cfg.n_particles, "Particle count")->capture_default_str();
    app->add_option("--iterations", cfg.n_iterations, "Filter iterations")->capture_default_str();
    app->add_option("--t-limit", cfg.t_limit, "Translation box half-width (mm)")->capture_default_str();
    app->add_option("--r-limit", cfg.r_limit, "Rotation box half-width (deg)")->capture_default_str();
    app->add_option("--sigma-t", cfg.sigma0_t, "Initial translation noise (mm)")->capture_default_str();
    app->add_option("--sigma-r", cfg.sigma0_r, "Initial rotation noise (deg)")->capture_default_str();
    app->add_option("--gamma", cfg.anneal_gamma, "Noise annealing factor")->capture_default_str();
    app->add_option("--beta", cfg.beta, "Likelihood sharpness")->capture_default_str();
    app->add_option("--ess-frac", cfg.ess_fraction, "Resample when ESS < frac * N")->capture_default_str();
    app->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    app->add_option("--estimate", estimate, "weighted_mean|best_particle")->capture_default_str();
    app->add_option("--ncc-region", region, "full|overlap")->capture_default_str();
  }

  SmcConfig resolve() const {
    SmcConfig c = cfg;
    c.mode = parse_mode(mode);
    c.estimate = parse_estimate(estimate);
    c.ncc_region = parse_ncc_region(region);
    c.validate();
    return c;
  }
};

std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<std::string> out;
  if (rc == 0)
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  globfree(&g);
  if (rc != 0 && rc != GLOB_NOMATCH) throw Error(ErrorKind::IoFailure, "glob failed: " + pattern);
  std::sort(out.begin(), out.end());
  return out;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::BadConfig:
      return 1;
    case ErrorKind::InvariantFailure:
    case ErrorKind::ChecksumMismatch:
      return 3;
    default:
      return 2;
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rigid 3D registration with a particle-filter optimizer", "smcreg"};
  app.require_subcommand(1);
  std::string isa = "auto";
  app.add_option("--isa", isa, "Warp kernel: auto|scalar|avx2")->capture_default_str();

  auto* reg = app.add_subcommand("register", "Register a source sequence to a target with SMC");
  PairArgs reg_pair;
  SmcArgs reg_smc;
  reg_pair.add(reg);
  reg_smc.add(reg);

  auto* ex = app.add_subcommand("exhaustive", "Register with the grid-search baseline");
  PairArgs ex_pair;
  std::string ex_steps = "4,4,4,4,4,4", ex_mode = "image", ex_region = "full";
  double step_t = 2.5, step_r = 2.0;
  ex_pair.add(ex);
  ex->add_option("--steps", ex_steps, "Half-steps per axis: tx,ty,tz,rx,ry,rz")->capture_default_str();
  ex->add_option("--step-t", step_t, "Translation step (mm)")->capture_default_str();
  ex->add_option("--step-r", step_r, "Rotation step (deg)")->capture_default_str();
  ex->add_option("--mode", ex_mode, "image|mask")->capture_default_str();
  ex->add_option("--ncc-region", ex_region, "full|overlap")->capture_default_str();

  auto* ph = app.add_subcommand("phantom", "Write a synthetic target/source case with known truth");
  PhantomSpec spec;
  std::string dims = "64,64,64", spacing = "1,1,1", truth = "0,0,0,0,0,0", out_dir;
  double crop = 0.0;
  ph->add_option("--dims", dims, "X,Y,Z")->capture_default_str();
  ph->add_option("--spacing", spacing, "SX,SY,SZ (mm)")->capture_default_str();
  ph->add_option("--frames", spec.frames, "Frames in the cycle")->capture_default_str();
  ph->add_option("--amplitude", spec.amplitude, "Contraction amplitude")->capture_default_str();
  ph->add_option("--speckle", spec.speckle, "Log-normal speckle sigma")->capture_default_str();
  ph->add_option("--truth", truth, "tx,ty,tz,rx,ry,rz (mm, deg)")->capture_default_str();
  ph->add_option("--crop", crop, "Fraction of the source +x face to blank")->capture_default_str();
  ph->add_option("--seed", spec.seed, "Speckle seed")->capture_default_str();
  ph->add_option("--out-dir", out_dir, "Output directory")->required();

  auto* bench = app.add_subcommand("bench", "Time SMC registration across worker counts");
  std::string bench_case, bench_workers = "1,2,4,8", bench_out;
  std::size_t repeats = 3;
  SmcArgs bench_smc;
  bench->add_option("--case", bench_case, "Directory written by `phantom`")->required();
  bench->add_option("--workers", bench_workers, "Comma-separated worker counts")->capture_default_str();
  bench->add_option("--repeats", repeats, "Timed runs per worker count")->capture_default_str();
  bench->add_option("--out", bench_out, "CSV output")->required();
  bench_smc.add(bench);

  auto* sum = app.add_subcommand("summarize", "Percentile table over report files");
  std::string reports_glob, sum_out;
  sum->add_option("--reports", reports_glob, "Glob of report JSON files")->required();
  sum->add_option("--out", sum_out, "CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (isa == "scalar")
      kernels::force_isa(kernels::Isa::Scalar);
    else if (isa == "avx2")
      kernels::force_isa(kernels::Isa::Avx2);
    else if (isa != "auto")
      throw Error(ErrorKind::BadConfig, "--isa: unknown kernel '" + isa + "'");

    if (reg->parsed()) {
      const SmcConfig cfg = reg_smc.resolve();
      auto in = reg_pair.load();
      Executor exec(reg_pair.workers);
      Sequence4 registered;
      RegistrationReport r = register_sequence(in.target, in.source, in.masks_t, in.masks_s, cfg, exec,
                                               reg_pair.out_volume.empty() ? nullptr : &registered);
      reg_pair.save(r, registered, out);
    } else if (ex->parsed()) {
      const auto hs = split_numbers(ex_steps, 6, "--steps");
      std::array<int, 6> half{};
      // CLI order is tx,ty,tz,rx,ry,rz; the grid stores rotations first.
      const int order[6] = {3, 4, 5, 0, 1, 2};
      for (int i = 0; i < 6; ++i) {
        if (hs[i] < 0 || hs[i] != static_cast<int>(hs[i]))
          throw Error(ErrorKind::BadConfig, "--steps: half-steps must be non-negative integers");
        half[order[i]] = static_cast<int>(hs[i]);
      }
      const GridSpec grid = GridSpec::uniform(half, step_t, step_r);
      grid.validate();
      const auto mode = parse_mode(ex_mode);
      const auto region = parse_ncc_region(ex_region);
      auto in = ex_pair.load();
      Executor exec(ex_pair.workers);
      Sequence4 registered;
      RegistrationReport r = register_sequence_exhaustive(in.target, in.source, in.masks_t, in.masks_s, grid, mode,
                                                          region, exec,
                                                          ex_pair.out_volume.empty() ? nullptr : &registered);
      ex_pair.save(r, registered, out);
    } else if (ph->parsed()) {
      const auto d = split_numbers(dims, 3, "--dims");
      for (double v : d)
        if (v < 1 || v != static_cast<std::size_t>(v)) throw Error(ErrorKind::BadConfig, "--dims: need positive integers");
      spec.dims = {static_cast<std::size_t>(d[0]), static_cast<std::size_t>(d[1]), static_cast<std::size_t>(d[2])};
      const auto sp = split_numbers(spacing, 3, "--spacing");
      spec.spacing = {sp[0], sp[1], sp[2]};
      const auto t = split_numbers(truth, 6, "--truth");
      const RigidParams truth_p = RigidParams::from_mm_deg(t[0], t[1], t[2], t[3], t[4], t[5]);
      spec.validate();
      if (!(crop >= 0.0 && crop < 1.0)) throw Error(ErrorKind::BadConfig, "--crop must be in [0, 1)");

      const Phantom p = make_phantom(spec);
      const RegistrationCase c = make_pair(p.sequence, p.masks, truth_p, crop);
      const fs::path dir(out_dir);
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
      write_volume(c.target, dir / "target.nii");
      write_volume(c.source, dir / "source.nii");
      write_masks(c.target_masks, dir / "target_masks.nii");
      write_masks(c.source_masks, dir / "source_masks.nii");
      const nlohmann::json meta = {
          {"dims", spec.dims},         {"spacing", spec.spacing}, {"frames", spec.frames},
          {"amplitude", spec.amplitude}, {"speckle", spec.speckle}, {"seed", spec.seed},
          {"crop", crop},
          {"truth", {{"tx", t[0]}, {"ty", t[1]}, {"tz", t[2]}, {"rx", t[3]}, {"ry", t[4]}, {"rz", t[5]}}}};
      write_text(dir / "case.json", meta.dump(2) + "\n");
      out << "wrote " << dir.string() << '\n';
    } else if (bench->parsed()) {
      std::vector<unsigned> counts;
      for (double w : split_numbers(bench_workers, 0, "--workers")) {
        if (w < 1 || w != static_cast<unsigned>(w)) throw Error(ErrorKind::BadConfig, "--workers: need integers >= 1");
        counts.push_back(static_cast<unsigned>(w));
      }
      const BenchCase c = load_bench_case(bench_case, bench_smc.resolve());
      const auto results = run_bench(c, counts, repeats);
      write_text(bench_out, bench_csv(results));
      for (const auto& b : results)
        out << b.case_id << " workers=" << b.workers << " median=" << b.wall_s << "s speedup=" << b.speedup
            << " checksum=" << b.checksum << '\n';
    } else if (sum->parsed()) {
      const auto files = expand_glob(reports_glob);
      if (files.empty()) throw Error(ErrorKind::EmptyInput, "no reports match " + reports_glob);
      std::vector<RegistrationReport> reports;
      for (const auto& f : files) reports.push_back(read_report(f));
      const auto rows = percentile_summary(reports);
      write_text(sum_out, percentile_csv(rows));
      out << percentile_csv(rows);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace smcreg
