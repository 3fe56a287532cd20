#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "prism/config.hpp"

using namespace prism;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  auto path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << text;
  return path;
}

}  // namespace

TEST_CASE("empty config yields the documented defaults") {
  auto path = write_temp("prism_cfg_empty.txt", "# nothing here\n\n");
  ExperimentConfig cfg = parse_config(path);
  CHECK(cfg.prism.delta == doctest::Approx(0.1));
  CHECK(cfg.prism.beta == doctest::Approx(0.5));
  CHECK(cfg.prism.alpha == doctest::Approx(0.5));
  CHECK(cfg.prism.strides.coarse == 20);
  CHECK(cfg.prism.strides.fine == 2);
  CHECK(cfg.prism.t_max == 500);
  CHECK(cfg.env == "braking");
  CHECK_NOTHROW(cfg.validate());
  std::filesystem::remove(path);
}

TEST_CASE("file values, comments and lists are parsed") {
  auto path = write_temp("prism_cfg_full.txt",
                         "env = cartpole   # inline comment\n"
                         "seed = 99\n"
                         "prism.beta = 0.25\n"
                         "prism.hidden = 32, 16\n"
                         "eval.alphas = 0.4,0.5,0.6\n"
                         "train.weighting = none\n"
                         "dr.axis = friction\n"
                         "dr.lo = 1.3\n"
                         "dr.hi = 2.0\n");
  ExperimentConfig cfg = parse_config(path);
  CHECK(cfg.env == "cartpole");
  CHECK(cfg.seed == 99);
  CHECK(cfg.prism.beta == doctest::Approx(0.25));
  CHECK(cfg.prism.hidden == std::vector<int>{32, 16});
  CHECK(cfg.alphas == std::vector<double>{0.4, 0.5, 0.6});
  CHECK(cfg.prism.train.weighting == ClassWeighting::None);
  CHECK(cfg.prism.dr.axis == DrAxis::Friction);
  CHECK(cfg.prism.dr.hi == doctest::Approx(2.0));
  std::filesystem::remove(path);
}

TEST_CASE("unknown keys are rejected with the key name in the diagnostic") {
  auto path = write_temp("prism_cfg_bad.txt", "prism.gamma = 3\n");
  try {
    parse_config(path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("prism.gamma") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("malformed lines and values are rejected") {
  auto path = write_temp("prism_cfg_malformed.txt", "prism.beta 0.5\n");
  CHECK_THROWS_AS(parse_config(path), ConfigError);
  std::filesystem::remove(path);

  ExperimentConfig cfg;
  CHECK_THROWS_AS(apply_key(cfg, "prism.beta", "abc"), ConfigError);
  CHECK_THROWS_AS(apply_key(cfg, "prism.n0", "1.5"), ConfigError);
  CHECK_THROWS_AS(apply_key(cfg, "env", "quadrotor"), ConfigError);
  CHECK_THROWS_AS(apply_key(cfg, "train.weighting", "balanced"), ConfigError);
  CHECK_THROWS_AS(apply_key(cfg, "dr.axis", "mass"), ConfigError);
  CHECK_THROWS_AS(parse_config("/nonexistent/prism.cfg"), ConfigError);
}

TEST_CASE("out-of-range values fail validation, not parsing") {
  ExperimentConfig cfg;
  apply_key(cfg, "prism.beta", "1.0");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ExperimentConfig{};
  apply_key(cfg, "prism.alpha", "1.5");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ExperimentConfig{};
  apply_key(cfg, "env.sigma", "-0.1");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("flag-style overrides take precedence over file values") {
  auto path = write_temp("prism_cfg_prec.txt", "prism.beta = 0.25\nseed = 1\n");
  ExperimentConfig cfg = parse_config(path);
  apply_key(cfg, "prism.beta", "0.75");  // flags are applied after the file
  CHECK(cfg.prism.beta == doctest::Approx(0.75));
  CHECK(cfg.seed == 1);
  std::filesystem::remove(path);
}

TEST_CASE("fingerprint is stable and sensitive") {
  ExperimentConfig a, b;
  CHECK(config_fingerprint(a) == config_fingerprint(b));
  apply_key(b, "prism.beta", "0.51");
  CHECK(config_fingerprint(a) != config_fingerprint(b));
}

TEST_CASE("resolved snapshot round-trips through the parser") {
  ExperimentConfig cfg;
  apply_key(cfg, "env", "cartpole");
  apply_key(cfg, "prism.beta", "0.3");
  apply_key(cfg, "prism.hidden", "24,12");
  apply_key(cfg, "dr.axis", "gain");
  auto path = write_temp("prism_cfg_rt.txt", resolved_text(cfg));
  ExperimentConfig back = parse_config(path);
  CHECK(config_fingerprint(back) == config_fingerprint(cfg));
  CHECK(resolved_text(back) == resolved_text(cfg));
  std::filesystem::remove(path);
}
