#include <gtest/gtest.h>

#include <cmath>

#include "respan/instance_gen.hpp"

using namespace respan;

namespace {

double corr(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

GenSpec small_spec() {
  auto s = GenSpec::with_default_techs();
  s.n_buses = 4;
  s.horizon = 48;
  s.seed = 11;
  return s;
}

}  // namespace

TEST(Generate, DeterministicPerSeed) {
  auto s = small_spec();
  EXPECT_EQ(generate(s), generate(s));
  auto t = s;
  t.seed = 12;
  EXPECT_NE(generate(s), generate(t));
}

TEST(Generate, ShapeAndValidity) {
  auto s = small_spec();
  for (auto topo : {Topology::Ring, Topology::Star, Topology::Tree}) {
    s.topology = topo;
    auto inst = generate(s);
    EXPECT_TRUE(validate_instance(inst).empty()) << to_string(topo);
    EXPECT_EQ(inst.buses.size(), 4u);
    EXPECT_EQ(inst.horizon(), 48u);
    // per bus: 2 W_on, 1 W_off, 2 PV_u, 1 PV_d
    EXPECT_EQ(inst.sites.size(), 24u);
    EXPECT_EQ(inst.lines.size(), topo == Topology::Ring ? 4u : 3u);
    EXPECT_EQ(inst.generators.size(), 4u);
    EXPECT_EQ(inst.storages.size(), 4u);
    EXPECT_NEAR(inst.params.omega, 48.0 / 8760.0, 1e-15);
  }
}

TEST(Generate, LineKindFollowsLength) {
  auto s = small_spec();
  s.extra_edges = 2;
  s.dc_threshold_km = 500.0;
  auto inst = generate(s);
  EXPECT_EQ(inst.lines.size(), 6u);
  for (const auto& l : inst.lines) {
    EXPECT_GT(l.length_km, 0.0) << l.id;
    EXPECT_EQ(l.kind == LineKind::DC, l.length_km > s.dc_threshold_km) << l.id;
    EXPECT_NE(l.from_bus, l.to_bus);
  }
}

TEST(Generate, SolarIsDarkAtNight) {
  auto inst = generate(small_spec());
  for (const auto& site : inst.sites) {
    if (site.tech.rfind("PV", 0) != 0) continue;
    for (std::size_t t = 0; t < inst.horizon(); ++t) {
      const auto h = t % 24;
      if (h <= 6 || h >= 18) EXPECT_EQ(site.cf[t], 0.0) << site.id << " t=" << t;
    }
  }
  EXPECT_EQ(solar_shape(0.0), 0.0);
  EXPECT_NEAR(solar_shape(12.0), 1.0, 1e-12);
  EXPECT_EQ(solar_shape(20.0), 0.0);
}

TEST(WindSeries, NearbyPointsAreMoreCorrelated) {
  // ~50 km apart versus ~1500 km apart
  std::vector<std::pair<double, double>> pts{{50.0, 5.0}, {50.45, 5.0}, {50.0, 26.0}};
  auto w = wind_series(pts, 1000, 400.0, 0.9, 3);
  ASSERT_EQ(w.size(), 3u);
  const double near = corr(w[0], w[1]);
  const double far = corr(w[0], w[2]);
  EXPECT_GT(near, 0.7);
  EXPECT_LT(far, 0.4);
  for (const auto& s : w)
    for (double v : s) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
}

TEST(Spec, DegenerateSpecsAreRejected) {
  auto s = small_spec();
  s.horizon = 12;
  EXPECT_THROW(validate_spec(s), SpecError);
  s = small_spec();
  s.n_buses = 0;
  EXPECT_THROW(validate_spec(s), SpecError);
  s = small_spec();
  s.line_kappa0 = {50.0, 10.0};
  EXPECT_THROW(validate_spec(s), SpecError);
  s = small_spec();
  s.correlation_length_km = 0.0;
  EXPECT_THROW(generate(s), SpecError);
  EXPECT_THROW(topology_from_string("mesh"), SpecError);
  EXPECT_EQ(topology_from_string("star"), Topology::Star);
}
