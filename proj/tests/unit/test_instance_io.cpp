#include <gtest/gtest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "respan/instance_gen.hpp"
#include "respan/instance_io.hpp"

using namespace respan;
using namespace respan::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("respan_io_" + name);
  fs::remove_all(p);
  return p;
}

const char* kFiles[] = {"buses.csv", "lines.csv", "sites.csv", "cf.csv", "demand.csv",
                        "gens.csv",  "storage.csv", "params.json"};

}  // namespace

TEST(InstanceIo, RoundTripIsByteIdentical) {
  auto spec = GenSpec::with_default_techs();
  spec.horizon = 36;
  spec.extra_edges = 1;
  const auto inst = generate(spec);
  auto a = scratch("rt_a"), b = scratch("rt_b");
  write_instance(inst, a);
  const auto back = read_instance(a);
  EXPECT_EQ(back, inst);
  write_instance(back, b);
  for (const char* f : kFiles) EXPECT_EQ(read_text_file(a / f), read_text_file(b / f)) << f;
}

TEST(InstanceIo, HandBuiltInstanceSurvives) {
  auto inst = small_system(5);
  inst.sites[0].cf[2] = 0.1 + 0.2;  // not representable in short decimal form
  auto dir = scratch("hand");
  write_instance(inst, dir);
  EXPECT_EQ(read_instance(dir), inst);
}

TEST(InstanceIo, OptionalFilesMayBeAbsent) {
  auto inst = one_bus(3, {0.1, 0.2, 0.3}, 5.0, 1.0);
  auto dir = scratch("optional");
  write_instance(inst, dir);
  fs::remove(dir / "gens.csv");
  fs::remove(dir / "storage.csv");
  EXPECT_EQ(read_instance(dir), inst);
}

TEST(InstanceIo, WideColumnsMayBeReordered) {
  auto inst = small_system(3);
  auto dir = scratch("reorder");
  write_instance(inst, dir);
  write_text_file(dir / "demand.csv", "t,N2,N1\n0,1,2\n1,3,4\n2,5,6\n");
  auto back = read_instance(dir);
  EXPECT_EQ(back.demands[0].bus, "N1");
  EXPECT_EQ(back.demands[0].lambda, (std::vector<double>{2, 4, 6}));
}

class Malformed : public ::testing::TestWithParam<std::pair<const char*, const char*>> {};

TEST_P(Malformed, IsAFormatError) {
  auto inst = small_system(3);
  auto dir = scratch(std::string("bad_") + std::to_string(std::hash<std::string>{}(GetParam().second)));
  write_instance(inst, dir);
  write_text_file(dir / GetParam().first, GetParam().second);
  EXPECT_THROW(read_instance(dir), FormatError);
}

INSTANTIATE_TEST_SUITE_P(
    Files, Malformed,
    ::testing::Values(std::make_pair("buses.csv", "id,label\nN1,x\n"),
                      std::make_pair("buses.csv", "id,name\nN1\n"),
                      std::make_pair("demand.csv", "t,N1,N2\n0,1,abc\n1,1,1\n2,1,1\n"),
                      std::make_pair("demand.csv", "t,N1,N9\n0,1,1\n1,1,1\n2,1,1\n"),
                      std::make_pair("demand.csv", "t,N1,N1\n0,1,1\n1,1,1\n2,1,1\n"),
                      std::make_pair("demand.csv", "t,N1,N2\n0,1,1\n1,1,1\n"),
                      std::make_pair("demand.csv", "t,N1,N2\n0,1,1\n2,1,1\n1,1,1\n"),
                      std::make_pair("cf.csv", "t,S1,S2\n0,0,0\n1,0,0\n2,0,0\n"),
                      std::make_pair("params.json", "{\"horizon_len\": 3,"),
                      std::make_pair("lines.csv", "")));

TEST(InstanceIo, MissingDirectoryIsAnIoError) {
  EXPECT_THROW(read_instance(scratch("nowhere")), IoError);
  EXPECT_THROW(read_text_file(scratch("nofile") / "x.csv"), IoError);
}

TEST(GenSpecJson, KeysOverrideDefaults) {
  auto s = gen_spec_from_json(R"({"seed": 5, "n_buses": 6, "topology": "tree", "horizon": 72})");
  EXPECT_EQ(s.seed, 5u);
  EXPECT_EQ(s.n_buses, 6u);
  EXPECT_EQ(s.topology, Topology::Tree);
  EXPECT_EQ(s.horizon, 72u);
  EXPECT_EQ(s.techs.size(), 4u);
  auto t = gen_spec_from_json(R"({"techs": {"W_on": {"per_bus": 3, "kappa_max": [10, 20], "zeta": [1, 2]}}})");
  ASSERT_EQ(t.techs.size(), 1u);
  EXPECT_EQ(t.techs.at("W_on").per_bus, 3u);
}

TEST(GenSpecJson, BadSpecsAreRejected) {
  EXPECT_THROW(gen_spec_from_json(R"({"n_busses": 3})"), SpecError);
  EXPECT_THROW(gen_spec_from_json(R"({"horizon": 5})"), SpecError);
  EXPECT_THROW(gen_spec_from_json(R"({"topology": "mesh"})"), SpecError);
  EXPECT_ANY_THROW(gen_spec_from_json("{"));
}
