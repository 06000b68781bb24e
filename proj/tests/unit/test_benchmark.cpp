#include <doctest.h>

#include "tempdir.hpp"
#include "smcreg/benchmark.hpp"
#include "smcreg/phantom.hpp"

using namespace smcreg;

namespace {

BenchCase tiny_case() {
  PhantomSpec spec;
  spec.dims = {20, 20, 20};
  spec.outer_axes = {6, 7, 8};
  spec.inner_axes = {3, 4, 5};
  const Phantom p = make_phantom(spec);
  const RegistrationCase c = make_pair(p.sequence, p.masks, RigidParams::from_mm_deg(1, 1, 0, 0, 0, 2), 0.0);
  BenchCase b;
  b.id = "tiny";
  b.target = normalize_zscore(c.target.frames[0]);
  b.source = normalize_zscore(c.source.frames[0]);
  b.config.n_particles = 24;
  b.config.n_iterations = 4;
  return b;
}

}  // namespace

TEST_CASE("single worker count gives unit speedup") {
  const auto r = run_bench(tiny_case(), {1}, 3);
  REQUIRE(r.size() == 1);
  CHECK(r[0].speedup == 1.0);
  CHECK(r[0].runs.size() == 3);
  CHECK(r[0].wall_s > 0.0);
  CHECK(r[0].per_iteration_s == doctest::Approx(r[0].wall_s / 4));
}

TEST_CASE("checksums agree across worker counts") {
  const auto r = run_bench(tiny_case(), {2, 3}, 1);
  REQUIRE(r.size() == 2);
  CHECK(r[0].workers == 2);
  CHECK(r[0].checksum == r[1].checksum);
  CHECK(r[0].checksum.size() == 16);
}

TEST_CASE("checksum is sensitive to every parameter") {
  const RigidParams base = RigidParams::from_mm_deg(1, 2, 3, 4, 5, 6);
  auto arr = base.as_array();
  for (std::size_t d = 0; d < 6; ++d) {
    auto a = arr;
    a[d] = std::nextafter(a[d], 1e9);
    CHECK(estimate_checksum(RigidParams::from_array(a)) != estimate_checksum(base));
  }
  CHECK(estimate_checksum(RigidParams{}) == "a09d945a1cd8d6e5");  // FNV-1a of 48 zero bytes
}

TEST_CASE("bench argument checks") {
  CHECK(kind_of([] { run_bench(tiny_case(), {1}, 0); }) == ErrorKind::BadConfig);
  CHECK(kind_of([] { run_bench(tiny_case(), {}, 1); }) == ErrorKind::BadConfig);
  CHECK(kind_of([] { run_bench(tiny_case(), {0}, 1); }) == ErrorKind::BadConfig);
  TempDir tmp;
  CHECK(kind_of([&] { load_bench_case(tmp.path / "nope", SmcConfig{}); }) == ErrorKind::IoFailure);
}

TEST_CASE("bench csv layout") {
  BenchResult b;
  b.case_id = "c";
  b.workers = 2;
  b.wall_s = 2.0;
  b.speedup = 1.5;
  b.checksum = "00ff";
  b.runs = {{0, 2.0}, {1, 3.0}};
  const std::string csv = bench_csv({b});
  CHECK(csv == "case,workers,repeat,wall_s,speedup,checksum\nc,2,0,2,1.5,00ff\nc,2,1,3,1,00ff\nc,2,median,2,1.5,00ff\n");
}
