#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tempdir.hpp"
#include "smcreg/phantom.hpp"
#include "smcreg/pipeline.hpp"

using namespace smcreg;

namespace {

PhantomSpec small(std::size_t frames) {
  PhantomSpec s;
  s.dims = {24, 24, 24};
  s.outer_axes = {7, 8, 10};
  s.inner_axes = {4, 5, 7};
  s.frames = frames;
  return s;
}

SmcConfig quick() {
  SmcConfig c;
  c.n_particles = 64;
  c.n_iterations = 12;
  c.t_limit = 4;
  c.r_limit = 4;
  return c;
}

RegistrationReport report_with_dsc(double diff, double after, const std::string& label) {
  RegistrationReport r;
  r.label = label;
  r.method = "smc";
  r.frames.push_back({0, 0.5, 0.6, after - diff, after});
  return r;
}

}  // namespace

TEST_CASE("quantile rule") {
  CHECK(quantile_linear({0.1, 0.2, 0.3, 0.4}, 0.25) == doctest::Approx(0.175));
  CHECK(quantile_linear({0.5, 0.1, 0.3, 0.2, 0.4}, 0.5) == doctest::Approx(0.3));
  CHECK(quantile_linear({0.1, 0.2, 0.3, 0.4, 0.5}, 0.0) == doctest::Approx(0.1));
  CHECK(quantile_linear({0.1, 0.2, 0.3, 0.4, 0.5}, 1.0) == doctest::Approx(0.5));
  CHECK(quantile_linear({7.0}, 0.75) == 7.0);
  CHECK(kind_of([] { quantile_linear({}, 0.5); }) == ErrorKind::EmptyInput);
}

TEST_CASE("percentile summary") {
  std::vector<RegistrationReport> reports;
  const double diffs[] = {0.3, 0.1, 0.5, 0.2, 0.4};
  for (int i = 0; i < 5; ++i) reports.push_back(report_with_dsc(diffs[i], 0.9 - 0.01 * i, "p" + std::to_string(i)));
  reports.push_back(RegistrationReport{});  // no DSC: ignored
  const auto rows = percentile_summary(reports);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].statistic == "min");
  CHECK(rows[0].diff == doctest::Approx(0.1));
  CHECK(rows[0].label == "p1");
  CHECK(rows[0].final_dsc == doctest::Approx(0.89));
  CHECK(rows[2].diff == doctest::Approx(0.3));
  CHECK(rows[2].label == "p0");
  CHECK(rows[4].diff == doctest::Approx(0.5));
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].diff <= rows[i].diff);

  const std::vector<RegistrationReport> one{report_with_dsc(0.25, 0.8, "only")};
  for (const auto& r : percentile_summary(one)) CHECK(r.diff == doctest::Approx(0.25));
  CHECK(kind_of([] { percentile_summary(std::vector<RegistrationReport>{RegistrationReport{}}); }) ==
        ErrorKind::EmptyInput);
  CHECK(percentile_csv(rows).rfind("statistic,diff,final,pair\n", 0) == 0);
}

TEST_CASE("identity truth leaves DSC unchanged on every frame") {
  const Phantom p = make_phantom(small(3));
  const RegistrationCase c = make_pair(p.sequence, p.masks, RigidParams{}, 0.0);
  SmcConfig cfg = quick();
  cfg.mode = RegistrationMode::Mask;
  cfg.n_particles = 128;
  cfg.n_iterations = 40;
  Executor ex(2);
  const RegistrationReport r = register_sequence(c.target, c.source, c.target_masks, c.source_masks, cfg, ex);
  REQUIRE(r.frames.size() == 3);
  for (const auto& f : r.frames) {
    REQUIRE(f.dsc_before);
    REQUIRE(f.dsc_after);
    CHECK(std::abs(*f.dsc_after - *f.dsc_before) < 0.01);
  }
  CHECK(r.method == "smc");
  CHECK(r.trace.size() == cfg.n_iterations);
}

TEST_CASE("image mode without masks reports null DSC") {
  const Phantom p = make_phantom(small(2));
  const RegistrationCase c = make_pair(p.sequence, p.masks, RigidParams::from_mm_deg(1, 0, 0, 0, 0, 0), 0.0);
  Executor ex(1);
  Sequence4 registered;
  const RegistrationReport r = register_sequence(c.target, c.source, {}, {}, quick(), ex, &registered);
  REQUIRE(r.frames.size() == 2);
  for (const auto& f : r.frames) {
    CHECK(f.ncc_before.has_value());
    CHECK(f.ncc_after.has_value());
    CHECK_FALSE(f.dsc_before.has_value());
    CHECK_FALSE(f.dsc_after.has_value());
  }
  CHECK(registered.size() == 2);
  CHECK(registered.frames[0].same_geometry(c.target.frames[0]));
  const auto j = to_json(r);
  CHECK(j["frames"][0]["dsc_after"].is_null());
  CHECK(j["aggregates"]["dsc_after"].is_null());
}

TEST_CASE("ED-only masks score only the ED frame") {
  const Phantom p = make_phantom(small(3));
  const RegistrationCase c = make_pair(p.sequence, p.masks, RigidParams{}, 0.0);
  SmcConfig cfg = quick();
  cfg.mode = RegistrationMode::Mask;
  Executor ex(1);
  const RegistrationReport r =
      register_sequence(c.target, c.source, {c.target_masks[0]}, {c.source_masks[0]}, cfg, ex);
  CHECK(r.frames[0].dsc_after.has_value());
  CHECK_FALSE(r.frames[1].dsc_after.has_value());
  CHECK_FALSE(r.frames[2].dsc_after.has_value());
}

TEST_CASE("sequence errors") {
  const Phantom p = make_phantom(small(2));
  const RegistrationCase c = make_pair(p.sequence, p.masks, RigidParams{}, 0.0);
  SmcConfig cfg = quick();
  Executor ex(1);
  cfg.mode = RegistrationMode::Mask;
  CHECK(kind_of([&] { register_sequence(c.target, c.source, {}, {}, cfg, ex); }) == ErrorKind::MissingMasks);
  cfg.mode = RegistrationMode::Image;
  Sequence4 shorter = c.source;
  shorter.frames.pop_back();
  CHECK(kind_of([&] { register_sequence(c.target, shorter, {}, {}, cfg, ex); }) == ErrorKind::GeometryMismatch);
  const MaskList wrong_grid{BinaryMask(Volume3({5, 5, 5}))};
  CHECK(kind_of([&] { register_sequence(c.target, c.source, wrong_grid, {}, cfg, ex); }) ==
        ErrorKind::GeometryMismatch);
  const MaskList three(3, c.target_masks[0]);
  CHECK(kind_of([&] { register_sequence(c.target, c.source, three, {}, cfg, ex); }) == ErrorKind::GeometryMismatch);
}

TEST_CASE("exhaustive propagation") {
  const Phantom p = make_phantom(small(2));
  const RegistrationCase c = make_pair(p.sequence, p.masks, RigidParams::from_mm_deg(2, 0, 0, 0, 0, 0), 0.0);
  GridSpec g;
  g.half_steps = {0, 0, 0, 2, 0, 0};
  g.step = {1, 1, 1, 1, 1, 1};
  Executor ex(2);
  const RegistrationReport r = register_sequence_exhaustive(c.target, c.source, c.target_masks, c.source_masks, g,
                                                            RegistrationMode::Mask, NccRegion::Full, ex);
  CHECK(r.method == "exhaustive");
  CHECK(r.transform.tx == 2.0);
  CHECK(r.config["nodes"] == 5);
  for (const auto& f : r.frames) CHECK(*f.dsc_after > *f.dsc_before);
}

TEST_CASE("report round trip and aggregates") {
  const Phantom p = make_phantom(small(3));
  const RegistrationCase c = make_pair(p.sequence, p.masks, RigidParams::from_mm_deg(1, -1, 0, 2, 0, 0), 0.0);
  Executor ex(1);
  RegistrationReport r = register_sequence(c.target, c.source, c.target_masks, c.source_masks, quick(), ex);
  r.label = "pair-7";
  TempDir tmp;
  write_report(r, (tmp.path / "r.json").string());
  const RegistrationReport back = read_report((tmp.path / "r.json").string());
  CHECK(back == r);

  const auto j = to_json(r);
  CHECK(j["schema"] == 1);
  double sum = 0;
  for (const auto& f : r.frames) sum += *f.dsc_after;
  const double mean = sum / 3;
  double var = 0;
  for (const auto& f : r.frames) var += (*f.dsc_after - mean) * (*f.dsc_after - mean);
  CHECK(std::abs(j["aggregates"]["dsc_after"]["mean"].get<double>() - mean) < 1e-12);
  CHECK(std::abs(j["aggregates"]["dsc_after"]["std"].get<double>() - std::sqrt(var / 3)) < 1e-12);
  CHECK(j["aggregates"]["dsc_after"]["count"] == 3);

  const std::string csv = report_csv(r);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("malformed reports are rejected") {
  CHECK(kind_of([] { report_from_json(nlohmann::json{{"schema", 2}}); }) == ErrorKind::CorruptHeader);
  CHECK(kind_of([] { report_from_json(nlohmann::json{{"schema", 1}}); }) == ErrorKind::CorruptHeader);
  TempDir tmp;
  std::ofstream(tmp.path / "bad.json") << "{not json";
  CHECK(kind_of([&] { read_report((tmp.path / "bad.json").string()); }) == ErrorKind::CorruptHeader);
}
