#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "saddle/problem.hpp"

namespace saddle {
namespace {

namespace fs = std::filesystem;

const std::string kDir = SADDLE_PROBLEMS_DIR;

std::string expect_parse_error(const std::string& text) {
  try {
    parse_problem_text(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ParseError for: " << text;
  return {};
}

const char* kBilinear = R"({
  "objective": {"kind": "bilinear", "M": [[1]]},
  "domain_x": {"kind": "box", "lower": [-1], "upper": [1]},
  "domain_y": {"kind": "box", "lower": [-1], "upper": [1]}
})";

TEST(ParseProblem, MinimalBilinear) {
  const auto p = parse_problem_text(kBilinear);
  EXPECT_EQ(p.objective.kind, "bilinear");
  EXPECT_EQ(p.objective.a, Vector{0.0});
  EXPECT_EQ(p.objective.c, 0.0);
  ASSERT_TRUE(p.domain_y);
  EXPECT_EQ(p.domain_x, Domain::box({-1}, {1}));
  EXPECT_FALSE(p.options.resolution);
  const Objective f = build_objective(p.objective);
  EXPECT_EQ(evaluate(f, Vector{0.5}, Vector{-2}), -1.0);
}

TEST(ParseProblem, QuadraticGame) {
  const auto p = parse_problem_text(R"({
    "objective": {"kind": "quadratic", "S": [[2, 0], [0, 0]], "A": [[1], [0]], "g": "linear", "g_coef": [3]},
    "domain_x": {"kind": "ball", "center": [0], "radius": 2}
  })");
  EXPECT_TRUE(p.is_quadratic());
  const auto game = build_quadratic_game(p);
  EXPECT_EQ(game.dim_x(), 1u);
  EXPECT_EQ(game.dim_y(), 2u);
  // 1/2 y^T S y - y^T A x - 3 x at x = 1, y = (1, 5): 1 - 1 - 3
  EXPECT_DOUBLE_EQ(evaluate(game.objective(), Vector{1}, Vector{1, 5}), -3.0);
}

TEST(ParseProblem, StrictErrors) {
  EXPECT_NE(expect_parse_error("{").find("malformed JSON"), std::string::npos);
  EXPECT_NE(expect_parse_error("[]").find("problem"), std::string::npos);
  EXPECT_NE(expect_parse_error(R"({"objective": {"kind": "bilinear", "M": [[1]]},
    "domain_x": {"kind": "box", "lower": [-1], "upper": [1]},
    "domain_y": {"kind": "box", "lower": [-1], "upper": [1]}, "extra": 1})")
                .find("extra"),
            std::string::npos);
  EXPECT_NE(expect_parse_error(R"({"objective": {"kind": "bilinear", "M": [[1]]},
    "domain_x": {"kind": "box", "lower": [-1], "upper": [1], "centre": [0]},
    "domain_y": {"kind": "box", "lower": [-1], "upper": [1]}})")
                .find("domain_x.centre"),
            std::string::npos);
  // Dimension mismatch between M and domain_y.
  EXPECT_NE(expect_parse_error(R"({"objective": {"kind": "bilinear", "M": [[1, 2]]},
    "domain_x": {"kind": "box", "lower": [-1], "upper": [1]},
    "domain_y": {"kind": "box", "lower": [-1], "upper": [1]}})")
                .find("objective.M"),
            std::string::npos);
  // Quadratic games must omit domain_y.
  expect_parse_error(R"({"objective": {"kind": "quadratic", "S": [[1]], "A": [[1]]},
    "domain_x": {"kind": "box", "lower": [-1], "upper": [1]},
    "domain_y": {"kind": "box", "lower": [-1], "upper": [1]}})");
  // Bilinear games need domain_y.
  expect_parse_error(R"({"objective": {"kind": "bilinear", "M": [[1]]},
    "domain_x": {"kind": "box", "lower": [-1], "upper": [1]}})");
  // Unknown objective and domain kinds, wrong types.
  expect_parse_error(R"({"objective": {"kind": "cubic"}, "domain_x": {"kind": "box", "lower": [-1], "upper": [1]}})");
  expect_parse_error(R"({"objective": {"kind": "bilinear", "M": [[1]]},
    "domain_x": {"kind": "torus"}, "domain_y": {"kind": "box", "lower": [-1], "upper": [1]}})");
  expect_parse_error(R"({"objective": {"kind": "bilinear", "M": [["1"]]},
    "domain_x": {"kind": "box", "lower": [-1], "upper": [1]},
    "domain_y": {"kind": "box", "lower": [-1], "upper": [1]}})");
  // Invalid domain parameters surface as parse errors with the field path.
  EXPECT_NE(expect_parse_error(R"({"objective": {"kind": "bilinear", "M": [[1]]},
    "domain_x": {"kind": "ball", "center": [0], "radius": -1},
    "domain_y": {"kind": "box", "lower": [-1], "upper": [1]}})")
                .find("domain_x"),
            std::string::npos);
  // Linear g needs one coefficient per x coordinate.
  expect_parse_error(R"({"objective": {"kind": "quadratic", "S": [[1]], "A": [[1, 0]], "g": "linear", "g_coef": [1]},
    "domain_x": {"kind": "box", "lower": [-1, -1], "upper": [1, 1]}})");
}

TEST(ParseProblem, OptionsValidation) {
  const std::string head = R"({"objective": {"kind": "bilinear", "M": [[1]]},
    "domain_x": {"kind": "box", "lower": [-1], "upper": [1]},
    "domain_y": {"kind": "box", "lower": [-1], "upper": [1]}, "options": )";
  EXPECT_NE(expect_parse_error(head + R"({"convexity_samples": 10}})").find("seed"), std::string::npos);
  expect_parse_error(head + R"({"resolution": 0}})");
  expect_parse_error(head + R"({"seed": -3}})");
  expect_parse_error(head + R"({"solver": {"step": 1}}})");
  const auto p = parse_problem_text(head + R"({"convexity_samples": 10, "seed": 4, "tol": 1e-4,
    "solver": {"max_iters": 7}}})");
  EXPECT_EQ(*p.options.seed, 4u);
  EXPECT_EQ(*p.options.convexity_samples, 10);
  EXPECT_EQ(*p.options.tol, 1e-4);
  EXPECT_EQ(p.options.solver->max_iters, 7);
  EXPECT_EQ(p.options.solver->step0, SolverOptions{}.step0);
}

TEST(LoadProblem, MissingFile) { EXPECT_THROW(load_problem(kDir + "/does_not_exist.json"), ParseError); }

TEST(RoundTrip, EveryFixture) {
  int parsed = 0;
  for (const auto& entry : fs::directory_iterator(kDir)) {
    if (entry.path().extension() != ".json") continue;
    ProblemFile p;
    try {
      p = load_problem(entry.path().string());
    } catch (const ParseError&) {
      continue;  // deliberately broken fixtures
    }
    const ProblemFile again = parse_problem(serialize_problem(p));
    EXPECT_EQ(again, p) << entry.path();
    EXPECT_EQ(serialize_problem(again).dump(), serialize_problem(p).dump()) << entry.path();
    ++parsed;
  }
  EXPECT_GE(parsed, 6);
}

TEST(RoundTrip, BrokenFixturesAreRejected) {
  EXPECT_THROW(load_problem(kDir + "/malformed.json"), ParseError);
  EXPECT_THROW(load_problem(kDir + "/unknown_field.json"), ParseError);
}

}  // namespace
}  // namespace saddle
