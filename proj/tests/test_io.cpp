#include <cmath>
#include <filesystem>

#include "support.hpp"
#include "dl3/io.hpp"

namespace dl3 {
namespace {

namespace fs = std::filesystem;

Errc spec_error(const std::string& text) { return test::error_code_of([&] { io::parse_spec(text); }); }

TEST(IoFormat, RoundTripDigits) {
  EXPECT_EQ(io::fmt(0.1), "0.10000000000000001");
  EXPECT_EQ(io::fmt(-2), "-2");
  test::Rng rng(71);
  for (int i = 0; i < 1000; ++i) {
    double v = rng.uniform(-1e6, 1e6) * std::pow(10.0, rng.integer(-20, 20));
    EXPECT_EQ(std::stod(io::fmt(v)), v);
  }
}

TEST(IoJson, StableLayout) {
  io::Json j{{"b", 1.5}, {"a", io::Json::array({1, 2})}, {"c", io::Json{{"re", 0.1}, {"du", nullptr}}}};
  EXPECT_EQ(io::to_json_text(j),
            "{\n  \"b\": 1.5,\n  \"a\": [1, 2],\n  \"c\": {\n    \"re\": 0.10000000000000001,\n    \"du\": null\n  }\n}\n");
  EXPECT_EQ(io::to_json_text(io::Json{{"x", std::nan("")}}), "{\n  \"x\": null\n}\n");
}

TEST(IoTable, CsvRoundTrip) {
  std::vector<double> t = uniform_grid({0, 1}, 9);
  std::vector<DualVec3> pts;
  test::Rng rng(72);
  for (std::size_t i = 0; i < t.size(); ++i) pts.push_back(rng.dvec(-3, 3));
  std::string text = io::table_csv(t, pts);
  SampledTable back = io::read_table_csv(text);
  ASSERT_EQ(back.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_TRUE(test::VecNear(back.points()[i], pts[i], 0));
  EXPECT_EQ(io::table_csv(back), text);
}

TEST(IoTable, Errors) {
  EXPECT_EQ(test::error_code_of([] { io::read_table_csv(""); }), Errc::Input);
  EXPECT_EQ(test::error_code_of([] { io::read_table_csv("t,x,y\n"); }), Errc::Input);
  EXPECT_EQ(test::error_code_of([] { io::read_table_csv("t,x1,x2,x3,x1d,x2d,x3d\n0,1,2\n"); }), Errc::Input);
  EXPECT_EQ(test::error_code_of([] { io::read_table_csv("t,x1,x2,x3,x1d,x2d,x3d\n0,1,2,3,4,5,abc\n"); }),
            Errc::Input);
}

TEST(IoFrenet, HeaderHasOneColumnPerValue) {
  std::string h = io::frenet_csv_header();
  EXPECT_EQ(std::count(h.begin(), h.end(), ','), 3 + 24 + 4 - 1);
  EXPECT_EQ(h.substr(0, 20), "t,s_re,s_du,px_re,py");
}

TEST(IoSpec, Builtin) {
  io::SpecFile f = io::parse_spec(R"j({"source": "builtin", "family": "timelike_hyperbolic_helix",
      "params": {"a": 2, "b": 1}, "range": [0, 2], "samples": 64})j");
  EXPECT_EQ(f.source, "builtin");
  EXPECT_EQ(f.spec.samples, 64u);
  EXPECT_EQ(f.spec.range, (Range{0, 2}));
  EXPECT_NEAR(frenet_general(f.spec, 1.0).tau.re, 1.0 / 3.0, 1e-12);
}

TEST(IoSpec, ExpressionsAndInvariants) {
  io::SpecFile e = io::parse_spec(R"j({"source": "expressions", "range": [0, 1], "samples": 16,
      "components": {"x1": "2*sinh(s)", "x2": "2*cosh(s)", "x3": "s", "x1d": "0", "x2d": "0", "x3d": "0.1*s"}})j");
  EXPECT_TRUE(std::holds_alternative<Expressions>(e.spec.source));
  io::SpecFile p = io::parse_spec(R"j({"source": "invariants", "range": [0, 2], "samples": 101,
      "Q": "1 + 0.25*s", "lambda": {"re": -0.5, "du": 0}})j");
  ASSERT_TRUE(p.lambda.has_value());
  EXPECT_EQ(*p.lambda, DualScalar(-0.5, 0));
  EXPECT_FALSE(p.P.has_value());
}

TEST(IoSpec, ValidationErrors) {
  EXPECT_EQ(spec_error("{\"source\": "), Errc::Parse);
  EXPECT_EQ(spec_error("[]"), Errc::Validation);
  EXPECT_EQ(spec_error(R"j({"source": "nurbs", "range": [0, 1], "samples": 16})j"), Errc::Validation);
  EXPECT_EQ(spec_error(R"j({"source": "builtin", "family": "timelike_line", "params": {}, "range": [1, 0],
      "samples": 16})j"), Errc::Validation);
  EXPECT_EQ(spec_error(R"j({"source": "builtin", "family": "timelike_line", "params": {}, "range": [0, 1],
      "samples": 4})j"), Errc::Validation);
  EXPECT_EQ(spec_error(R"j({"source": "builtin", "family": "timelike_line", "params": {}, "range": [0, 1],
      "samples": 16, "extra": 1})j"), Errc::Validation);
  EXPECT_EQ(spec_error(R"j({"source": "invariants", "range": [0, 1], "samples": 16, "Q": "1"})j"), Errc::Validation);
  EXPECT_EQ(spec_error(R"j({"source": "invariants", "range": [0, 1], "samples": 16, "Q": "1", "P": "1",
      "lambda": {"re": 1, "du": 0}})j"), Errc::Validation);
  EXPECT_EQ(spec_error(R"j({"source": "invariants", "range": [0, 1], "samples": 16, "Q": "1 +", "P": "1"})j"),
            Errc::Parse);
  EXPECT_EQ(spec_error(R"j({"source": "table", "range": [0, 1], "samples": 16, "table_path": "/nonexistent.csv"})j"),
            Errc::Io);
}

TEST(IoSpec, TablePathIsRelativeToSpec) {
  fs::path dir = fs::temp_directory_path() / "dl3_io_test";
  fs::create_directories(dir);
  std::vector<double> t = uniform_grid({0, 1}, 9);
  std::vector<DualVec3> pts;
  for (double x : t) pts.push_back(make_dual({x, 0.5 * x, 0}));
  io::write_file_atomic(dir / "line.csv", io::table_csv(t, pts));
  io::write_file_atomic(dir / "spec.json",
                        R"j({"source": "table", "table_path": "line.csv", "range": [0, 1], "samples": 9})j");
  EXPECT_FALSE(fs::exists(dir / "spec.json.tmp"));
  io::SpecFile f = io::load_spec(dir / "spec.json");
  EXPECT_TRUE(std::holds_alternative<SampledTable>(f.spec.source));
  io::write_file_atomic(dir / "wide.json",
                        R"j({"source": "table", "table_path": "line.csv", "range": [0, 2], "samples": 9})j");
  EXPECT_EQ(test::error_code_of([&] { io::load_spec(dir / "wide.json"); }), Errc::Validation);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace dl3
