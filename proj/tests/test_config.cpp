#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "nsmhd/config.hpp"
#include "nsmhd/errors.hpp"

using namespace nsmhd;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("defaults validate") {
  SimConfig c;
  CHECK_NOTHROW(validate(c));
  CHECK(c.variant == Variant::viscous);
  CHECK(c.ic_name == "random-smooth");
}

TEST_CASE("key = value text with comments") {
  const SimConfig c = parse_config(
      "# channel run\n"
      "epsilon = 0.005\n"
      "zeta = 0.5   # both fields\n"
      "zeta_H = 0.25\n"
      "dt = 2.5e-4\n"
      "t_end = 0.5\n"
      "dim = 3\n"
      "n_tangential = 16\n"
      "n_normal = 33\n"
      "ic = taylor-green-channel\n"
      "ic.k = 2\n"
      "seed = 11\n"
      "record_every = 4\n"
      "norm_every = 2\n"
      "norm_order = 3\n"
      "checkpoint_times = 0.25, 0.5\n"
      "checkpoint_dir = out/ck\n");
  CHECK(c.epsilon == 0.005);
  CHECK(c.zeta_v == 0.5);
  CHECK(c.zeta_H == 0.25);
  CHECK(c.dt == 2.5e-4);
  CHECK(c.grid.dim == 3);
  CHECK(c.grid.n_tangential == 16);
  CHECK(c.grid.n_normal == 33);
  CHECK(c.ic_name == "taylor-green-channel");
  CHECK(c.ic_param("k", 1) == 2);
  CHECK(c.ic_param("seed", 7) == 11);
  CHECK(c.ic_param("missing", -1) == -1);
  CHECK(c.record_every == 4);
  CHECK(c.norm_every == 2);
  CHECK(c.norm_order == 3);
  CHECK(c.checkpoint_times == std::vector<double>{0.25, 0.5});
  CHECK(c.checkpoint_dir == "out/ck");
}

TEST_CASE("text round trip is exact") {
  SimConfig c;
  c.epsilon = 1.0 / 3.0;
  c.zeta_v = -0.1;
  c.zeta_H = 0.7;
  c.dt = 1e-3 / 7.0;
  c.ic_params["amplitude"] = 0.1;
  c.checkpoint_times = {0.1, 0.3};
  c.checkpoint_dir = "ck";
  const SimConfig d = parse_config(to_text(c));
  CHECK(d.epsilon == c.epsilon);
  CHECK(d.zeta_v == c.zeta_v);
  CHECK(d.zeta_H == c.zeta_H);
  CHECK(d.dt == c.dt);
  CHECK(d.ic_params == c.ic_params);
  CHECK(d.checkpoint_times == c.checkpoint_times);
  CHECK(to_text(d) == to_text(c));
}

TEST_CASE("ideal variant defaults epsilon to zero") {
  CHECK(parse_config("variant = ideal\n").epsilon == 0.0);
  CHECK(error_of("variant = ideal\nepsilon = 0.1\n").find("epsilon") != std::string::npos);
  CHECK(error_of("epsilon = 0\n").find("epsilon") != std::string::npos);
}

TEST_CASE("invalid values name the field") {
  CHECK(error_of("epsilon = 2\n").find("epsilon") != std::string::npos);
  CHECK(error_of("zeta = 1.5\n").find("zeta_v") != std::string::npos);
  CHECK(error_of("dt = 0\n").find("dt") != std::string::npos);
  CHECK(error_of("t_end = -1\n").find("t_end") != std::string::npos);
  CHECK(error_of("n_normal = 4\n").find("n_normal") != std::string::npos);
  CHECK(error_of("n_tangential = 9\n").find("n_tangential") != std::string::npos);
  CHECK(error_of("norm_order = 5\n").find("norm_order") != std::string::npos);
  CHECK(error_of("record_every = 0\n").find("record_every") != std::string::npos);
  CHECK(error_of("dt = fast\n").find("dt") != std::string::npos);
  CHECK(error_of("dim = 2.5\n").find("dim") != std::string::npos);
  CHECK(error_of("variant = magic\n").find("variant") != std::string::npos);
  CHECK(error_of("colour = blue\n").find("colour") != std::string::npos);
  CHECK(error_of("no equals sign\n").find("line 1") != std::string::npos);
}

TEST_CASE("missing config file is an io error") {
  CHECK_THROWS_AS(load_config("/nonexistent/nsmhd.cfg"), IoError);
}

TEST_CASE("load from file") {
  const std::string path = "test_config_tmp.cfg";
  std::ofstream(path) << "epsilon = 0.02\nn_normal = 17\n";
  const SimConfig c = load_config(path);
  CHECK(c.epsilon == 0.02);
  CHECK(build_grid(c)->nz() == 17);
  std::remove(path.c_str());
}
