#include "fixtures.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include "nsmhd/errors.hpp"
#include "nsmhd/io.hpp"

using namespace nsmhd;
namespace fs = std::filesystem;

namespace {

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / ("nsmhd_test_io_" + name); }

bool same_bits(const VectorField& a, const VectorField& b) {
  if (a.dim() != b.dim()) return false;
  for (int i = 0; i < a.dim(); ++i)
    if (a.comps[i].size() != b.comps[i].size() ||
        std::memcmp(a.comps[i].data(), b.comps[i].data(), sizeof(double) * a.comps[i].size()) != 0)
      return false;
  return true;
}

}  // namespace

TEST_CASE("checkpoint round trip is bit-exact") {
  for (auto spec : {GridSpec{2, 8, 9}, GridSpec{3, 4, 9}}) {
    SimConfig c;
    c.grid = spec;
    c.zeta_v = 0.3;
    auto g = build_grid(c);
    FieldState s = initial_condition(g, c);
    s.t = 1.0 / 3.0;
    const auto path = tmp("ck.bin").string();
    write_checkpoint(path, s, {0.01, 0.3, -0.2, Variant::viscous});
    const Checkpoint ck = read_checkpoint(path);
    CHECK(ck.state.t == s.t);
    CHECK(ck.meta.epsilon == 0.01);
    CHECK(ck.meta.zeta_v == 0.3);
    CHECK(ck.meta.zeta_H == -0.2);
    CHECK(ck.meta.variant == Variant::viscous);
    CHECK(ck.state.v.grid->spec() == spec);
    CHECK(same_bits(ck.state.v, s.v));
    CHECK(same_bits(ck.state.H, s.H));
    fs::remove(path);
  }
}

TEST_CASE("checkpoint layout: magic, header length, row-major payload") {
  SimConfig c;
  c.grid = {2, 4, 9};
  auto g = build_grid(c);
  FieldState s{0.0, VectorField(g), VectorField(g)};
  s.v.comps[0] = sample(*g, [](double x, double, double z) { return 10 * x + z; });
  const auto path = tmp("layout.bin").string();
  write_checkpoint(path, s, {});
  std::ifstream in(path, std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  CHECK(std::string(magic, 8) == "MHDCHK01");
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 8);
  std::string header(len, '\0');
  in.read(header.data(), std::streamsize(len));
  CHECK(header.find("\"version\":1") != std::string::npos);
  double first[10];
  in.read(reinterpret_cast<char*>(first), sizeof first);
  // iz fastest within each (ix) column
  CHECK(first[0] == 0.0);
  CHECK(first[8] == 1.0);
  CHECK(first[9] == doctest::Approx(10 * g->dx()));
  fs::remove(path);
}

TEST_CASE("corrupt or missing checkpoints are io errors") {
  CHECK_THROWS_AS(read_checkpoint("/nonexistent/ck.bin"), IoError);
  const auto path = tmp("bad.bin").string();
  std::ofstream(path, std::ios::binary) << "NOTACHECKPOINT";
  CHECK_THROWS_AS(read_checkpoint(path), IoError);

  SimConfig c;
  c.grid = {2, 4, 9};
  auto g = build_grid(c);
  write_checkpoint(path, FieldState{0.0, VectorField(g), VectorField(g)}, {});
  const auto size = fs::file_size(path);
  fs::resize_file(path, size - 8);
  CHECK_THROWS_AS(read_checkpoint(path), IoError);
  fs::remove(path);
}

TEST_CASE("run record JSON round trip is bit-exact") {
  SimConfig c;
  c.grid = {2, 8, 17};
  c.zeta_v = c.zeta_H = 0.5;
  c.t_end = 0.01;
  c.norm_every = 2;
  const RunRecord r = run(c);
  const std::string text = record_to_json(r);
  const RunRecord back = record_from_json(text);
  CHECK(record_to_json(back) == text);
  CHECK(back.energy == r.energy);
  CHECK(back.nm == r.nm);
  CHECK(back.config.zeta_v == 0.5);
  CHECK(back.steps == r.steps);

  const auto path = tmp("rec.json").string();
  write_record(path, r);
  CHECK(record_to_json(read_record(path)) == text);
  fs::remove(path);
  CHECK_THROWS_AS(record_from_json("{\"format\": \"other\"}"), IoError);
  CHECK_THROWS_AS(record_from_json("not json"), IoError);
}

TEST_CASE("doubles format to the shortest exact form") {
  for (double d : {0.1, 1.0 / 3.0, 6.25e-4, -1e-300, 5e-324, 1e308, 0.0}) CHECK(parse_double(format_double(d)) == d);
  CHECK(std::isnan(parse_double(format_double(std::nan("")))));
  CHECK(std::isinf(parse_double(format_double(-INFINITY))));
  CHECK_THROWS_AS(parse_double("1.5x"), IoError);
}

TEST_CASE("CSV round trip with quoting") {
  CsvTable t;
  t.header = {"norm", "value", "note"};
  t.rows = {{"W1,4", format_double(0.1), "say \"hi\""}, {"L2", format_double(1.0 / 3.0), ""}};
  const std::string text = to_csv(t);
  CHECK(text.rfind("norm,value,note\n\"W1,4\",0.1,\"say \"\"hi\"\"\"\n", 0) == 0);
  const CsvTable back = parse_csv(text);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.column("value") == 1);
  CHECK_THROWS_AS(back.column("missing"), IoError);
  CHECK_THROWS_AS(parse_csv("a,b\n1\n"), IoError);
  CHECK_THROWS_AS(parse_csv("a\n\"open\n"), IoError);

  const auto path = tmp("t.csv").string();
  write_csv(path, t);
  CHECK(read_csv(path).rows == t.rows);
  fs::remove(path);
  CHECK_THROWS_AS(read_csv("/nonexistent/t.csv"), IoError);
}
