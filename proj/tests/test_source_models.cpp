#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "support/oracles.hpp"
#include "zdsec/errors.hpp"
#include "zdsec/model_io.hpp"
#include "zdsec/numerics.hpp"
#include "zdsec/source_model.hpp"

using namespace zdsec;

TEST_CASE("source model validates its pmf") {
  SourceModel m({0.4, 0.3, 0.2, 0.1});
  REQUIRE(m.alphabet_size() == 4);
  REQUIRE(m.p(0) == 0.4);
  REQUIRE_THROWS_AS(SourceModel({}), ConfigError);
  REQUIRE_THROWS_AS(SourceModel({0.5, -0.1, 0.6}), ConfigError);
  REQUIRE_THROWS_AS(SourceModel({0.5, 0.4}), ConfigError);
  REQUIRE_NOTHROW(SourceModel({1.0}));
  REQUIRE_NOTHROW(SourceModel({0.5, 0.5, 0.0}));  // zero mass is allowed
}

TEST_CASE("entropy matches closed forms") {
  REQUIRE(entropy(SourceModel({0.5, 0.25, 0.25})) == 1.5);
  REQUIRE(entropy(SourceModel({0.25, 0.25, 0.25, 0.25})) == 2.0);
  REQUIRE_THAT(entropy(SourceModel({0.75, 0.25})),
               Catch::Matchers::WithinAbs(0.8112781244591328, 1e-14));
  REQUIRE(binary_entropy(0.5) == 1.0);
  REQUIRE(binary_entropy(0.0) == 0.0);
  REQUIRE_THAT(binary_entropy(0.1),
               Catch::Matchers::WithinAbs(0.4689955935892812, 1e-14));
}

TEST_CASE("entropy is maximized exactly by the uniform law") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t k = 2 + static_cast<std::size_t>(rng() % 5);
    std::vector<double> p = oracles::random_pmf(rng, k);
    double h = entropy_bits(p);
    REQUIRE(h <= std::log2(static_cast<double>(k)) + 1e-12);
    bool uniform = true;
    for (double v : p) uniform = uniform && std::fabs(v - p[0]) < 1e-15;
    if (!uniform) REQUIRE(h < std::log2(static_cast<double>(k)) - 1e-12);
  }
}

TEST_CASE("conditional entropy from a joint law") {
  // X uniform on four symbols, Y indicates the half X falls in.
  ProbMatrix joint = {{0.25, 0.0}, {0.25, 0.0}, {0.0, 0.25}, {0.0, 0.25}};
  REQUIRE_THAT(conditional_entropy(joint),
               Catch::Matchers::WithinAbs(1.0, 1e-14));
  // Independent Y carries nothing: H(X|Y) = H(X).
  ProbMatrix ind = {{0.2, 0.2}, {0.05, 0.05}, {0.25, 0.25}};
  REQUIRE_THAT(conditional_entropy(ind),
               Catch::Matchers::WithinAbs(entropy_bits({0.4, 0.1, 0.5}), 1e-12));
  REQUIRE_THROWS_AS(conditional_entropy(ProbMatrix{{0.5}, {0.2, 0.3}}),
                    std::invalid_argument);
}

TEST_CASE("joint source model marginals and degradation") {
  JointSourceModel jm(SourceModel({0.75, 0.25}), {{0.9, 0.1}, {0.1, 0.9}},
                      {{0.8, 0.2}, {0.2, 0.8}});
  REQUIRE(jm.x_size() == 2);
  REQUIRE(jm.y_size() == 2);
  REQUIRE(jm.w_size() == 2);
  KahanSum total;
  for (const auto& row : jm.joint_xy())
    for (double v : row) total.add(v);
  REQUIRE_THAT(total.value(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  // W is a further-degraded view of Y, so it can only lose information.
  REQUIRE(jm.entropy_x_given_y() <= jm.entropy_x_given_w() + 1e-12);
  REQUIRE(jm.entropy_x_given_w() <= entropy(jm.x_model()) + 1e-12);
}

TEST_CASE("omitted public view behaves as a constant") {
  JointSourceModel jm(SourceModel({0.6, 0.4}), {{0.7, 0.3}, {0.2, 0.8}});
  REQUIRE(jm.w_size() == 1);
  REQUIRE_THAT(jm.entropy_x_given_w(),
               Catch::Matchers::WithinAbs(entropy(jm.x_model()), 1e-12));
}

TEST_CASE("sampling is deterministic per seed and matches the law") {
  SourceModel m({0.4, 0.3, 0.2, 0.1});
  auto a = sample(m, 2000, 42);
  auto b = sample(m, 2000, 42);
  REQUIRE(a == b);
  REQUIRE(sample(m, 2000, 43) != a);
  auto big = sample(m, 100000, 7);
  std::vector<double> freq(4, 0.0);
  for (int x : big) freq[static_cast<std::size_t>(x)] += 1.0 / 100000.0;
  for (std::size_t x = 0; x < 4; ++x) {
    double sigma = std::sqrt(m.p(x) * (1 - m.p(x)) / 100000.0);
    REQUIRE(std::fabs(freq[x] - m.p(x)) < 5 * sigma + 1e-9);
  }
}

TEST_CASE("channel sampling follows the row of its input") {
  ProbMatrix ch = {{0.9, 0.1}, {0.1, 0.9}};
  std::vector<int> xs(50000, 0);
  for (std::size_t i = 25000; i < xs.size(); ++i) xs[i] = 1;
  auto ys = sample_channel(ch, xs, 5);
  REQUIRE(ys == sample_channel(ch, xs, 5));
  double flips = 0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (ys[i] != xs[i]) flips += 1.0;
  REQUIRE(std::fabs(flips / 50000.0 - 0.1) < 0.01);
}

namespace {

std::filesystem::path write_temp(const std::string& name,
                                 const std::string& text) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream out(p);
  out << text;
  return p;
}

}  // namespace

TEST_CASE("model files load and validate") {
  auto good = write_temp("zdsec_pmf_ok.json", R"({"pmf": [0.75, 0.25]})");
  SourceModel m = load_source_model(good.string());
  REQUIRE(m.alphabet_size() == 2);
  REQUIRE(m.p(0) == 0.75);

  auto joint = write_temp("zdsec_joint_ok.json",
                          R"({"pmf": [0.75, 0.25],
                              "py_given_x": [[0.9, 0.1], [0.1, 0.9]],
                              "pw_given_y": [[0.8, 0.2], [0.2, 0.8]]})");
  JointSourceModel jm = load_joint_model(joint.string());
  REQUIRE(jm.y_size() == 2);
  REQUIRE(jm.w_size() == 2);

  auto dist = write_temp("zdsec_dist_ok.json", R"({"matrix": [[0,1],[1,0]]})");
  DistortionMatrix d = load_distortion(dist.string());
  REQUIRE(d[0][1] == 1.0);
  auto bare = write_temp("zdsec_dist_bare.json", R"([[0,1],[1,0]])");
  REQUIRE(load_distortion(bare.string()) == d);
}

TEST_CASE("malformed model files raise config errors") {
  REQUIRE_THROWS_AS(load_source_model("/nonexistent/zdsec.json"), ConfigError);
  auto bad_sum = write_temp("zdsec_pmf_bad.json", R"({"pmf": [0.5, 0.4]})");
  REQUIRE_THROWS_AS(load_source_model(bad_sum.string()), ConfigError);
  auto not_json = write_temp("zdsec_pmf_syntax.json", "{pmf: oops");
  REQUIRE_THROWS_AS(load_source_model(not_json.string()), ConfigError);
  auto wrong_shape = write_temp("zdsec_joint_bad.json",
                                R"({"pmf": [0.5, 0.5],
                                    "py_given_x": [[0.9, 0.1]]})");
  REQUIRE_THROWS_AS(load_joint_model(wrong_shape.string()), ConfigError);
  auto neg = write_temp("zdsec_dist_neg.json", R"([[0,-1],[1,0]])");
  REQUIRE_THROWS_AS(load_distortion(neg.string()), ConfigError);
  auto ragged = write_temp("zdsec_dist_ragged.json", R"([[0,1],[1]])");
  REQUIRE_THROWS_AS(load_distortion(ragged.string()), ConfigError);
}
