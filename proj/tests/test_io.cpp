#include <gtest/gtest.h>

#include "mmeval/error.hpp"
#include "mmeval/io.hpp"

using namespace mmeval;
using io::json;

namespace {

const char* kInstance = R"({
  "field": {"p": 2, "a": 2, "modulus": [1, 1, 1]},
  "poly": {"n": 2, "d": 2, "coeffs": [[0,0], [0,0], [0,0], [1,0]]},
  "points": [[[0,1], [1,1]], [[1,0], [1,0]]]
})";

}  // namespace

TEST(Io, InstanceRoundTrip) {
  const auto inst = io::parse_instance(io::parse_json(kInstance, "inline"));
  EXPECT_EQ(inst.base->order(), 4u);
  EXPECT_EQ(inst.f.n, 2u);
  EXPECT_EQ(inst.points.size(), 2u);
  const auto again = io::parse_instance(io::instance_to_json(inst));
  EXPECT_EQ(again.f, inst.f);
  EXPECT_EQ(again.points, inst.points);
  EXPECT_EQ(io::element_to_json(*inst.base, inst.points[0][0]), json::parse("[0,1]"));
}

TEST(Io, SyntaxErrorReportsLine) {
  try {
    io::parse_json("{\n  \"a\": 1,\n  oops\n}", "file.json");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("file.json:3:"), std::string::npos) << e.what();
  }
}

TEST(Io, FieldDiagnostics) {
  auto expect_parse = [](const std::string& text, const std::string& needle) {
    try {
      io::parse_instance(json::parse(text));
      FAIL() << "no error for " << text;
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_parse(R"({"poly": {}, "points": []})", "missing field 'field'");
  expect_parse(R"({"field": {"p": 2, "a": 1, "modulus": [0, 1]}, "poly": {"n": 1, "d": 2, "coeffs": [[0]]},
                  "points": []})",
               "poly.coeffs: expected d^n = 2");
  expect_parse(R"({"field": {"p": 2, "a": 1, "modulus": [0, 1]}, "poly": {"n": 1, "d": 1, "coeffs": [[2]]},
                  "points": []})",
               "digit not below p");
  expect_parse(R"({"field": {"p": 2, "a": 1, "modulus": [0, 1]}, "poly": {"n": 1, "d": 1, "coeffs": [[1]]},
                  "points": [[[0], [1]]]})",
               "points[0]: expected 1 coordinates");
}

TEST(Io, ReducibleModulusIsParameterError) {
  const auto j = json::parse(R"({"p": 2, "a": 2, "modulus": [1, 0, 1]})");
  try {
    io::parse_field(j);
    FAIL();
  } catch (const ParamError& e) {
    EXPECT_NE(std::string(e.what()).find("irreducibility certificate"), std::string::npos);
  }
}

TEST(Io, PointText) {
  auto F = ff::BaseField::canonical(3, 2);
  EXPECT_EQ(io::parse_element_text(*F, "1,2").c[0], F->from_digits(std::vector<ff::Digit>{1, 2}));
  EXPECT_THROW(io::parse_element_text(*F, "1,x"), ParseError);
  EXPECT_THROW(io::parse_element_text(*F, "1"), ParseError);
}

TEST(Io, MatricesAndSplit) {
  const auto j = json::parse(R"({"field": {"p": 2, "a": 1, "modulus": [0, 1]}, "t": 1,
    "factors": [{"L": {"rows": 2, "cols": 2, "entries": [[1],[0],[1],[0]]},
                 "S": {"rows": 2, "cols": 2, "entries": [[0],[0],[0],[1]]}}]})");
  const auto split = io::parse_split(j);
  EXPECT_EQ(split.t, 1u);
  ASSERT_EQ(split.factors.size(), 1u);
  EXPECT_EQ(split.factors[0].L.rank(), 1u);
  EXPECT_EQ(io::matrix_to_json(*split.field, split.factors[0].S)["entries"][3], json::parse("[1]"));
}
