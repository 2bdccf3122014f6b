#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "verilocal/io.hpp"

using namespace verilocal;
using namespace verilocal::testing;
using verilocal::io::Json;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "nothing thrown";
  return ErrorCode::InvalidModel;
}

}  // namespace

TEST(Rationals, ParseForms) {
  EXPECT_EQ(parse_rational("3/4"), make_rational(3, 4));
  EXPECT_EQ(parse_rational("-6/8"), make_rational(-3, 4));
  EXPECT_EQ(parse_rational("+2/3"), make_rational(2, 3));
  EXPECT_EQ(parse_rational("5"), 5);
  EXPECT_EQ(parse_rational("-12"), -12);
  EXPECT_EQ(parse_rational("123456789012345678901234567890/3"),
            Rational(mpz_class("41152263004115226300411522630")));
  for (const char* bad : {"0.5", "1/0", "a", "1/-2", "", "/3", "3/", "1/2/3", "--1"}) {
    EXPECT_EQ(code_of([&] { parse_rational(bad); }), ErrorCode::Parse) << bad;
  }
}

TEST(Rationals, ParseDecimal) {
  EXPECT_EQ(parse_decimal("0.125"), make_rational(1, 8));
  EXPECT_EQ(parse_decimal("-1.5"), make_rational(-3, 2));
  EXPECT_EQ(parse_decimal(".2"), make_rational(1, 5));
  EXPECT_EQ(parse_decimal("2"), 2);
  EXPECT_EQ(parse_decimal("1/3"), make_rational(1, 3));
  EXPECT_THROW(parse_decimal("1."), Error);
  EXPECT_THROW(parse_decimal("1.2.3"), Error);
  EXPECT_THROW(parse_decimal("x.5"), Error);
}

TEST(Rationals, AlwaysExplicitDenominator) {
  EXPECT_EQ(to_string(Rational(3)), "3/1");
  EXPECT_EQ(to_string(Rational(0)), "0/1");
  EXPECT_EQ(to_string(make_rational(-2, 4)), "-1/2");
}

TEST(Rationals, RoundTrip) {
  std::mt19937_64 rng(51);
  for (int k = 0; k < 200; ++k) {
    const auto r = make_rational(std::uniform_int_distribution<long>(-1000, 1000)(rng),
                                 std::uniform_int_distribution<long>(1, 1000)(rng));
    EXPECT_EQ(parse_rational(to_string(r)), r);
  }
}

TEST(GraphJson, ParsesGraphEpsilonAndSupport) {
  const auto j = Json::parse(R"({
    "num_nodes": 3,
    "edges": [{"i": 1, "j": 2}, {"i": 2, "j": 3}, {"i": 1, "j": 3}],
    "epsilon": [["0/1"], [0], ["1/2"]],
    "support": [{"edge": 3, "sign": "+"}]
  })");
  const auto doc = io::graph_from_json(j);
  EXPECT_EQ(doc.graph, triangle());
  ASSERT_TRUE(doc.epsilon.has_value());
  EXPECT_EQ((*doc.epsilon)[2][0], make_rational(1, 2));
  ASSERT_TRUE(doc.support.has_value());
  ASSERT_EQ(doc.support->size(), 1u);
  EXPECT_EQ(doc.support->entries[0].edge, 2u);
  EXPECT_EQ(doc.support->entries[0].sign, Sign::Plus);
}

TEST(GraphJson, SupportOnlyDocument) {
  const auto doc = io::graph_from_json(Json::parse(R"({"support": [{"edge": 1, "sign": "-"}]})"));
  EXPECT_EQ(doc.graph.num_nodes, 0);
  ASSERT_TRUE(doc.support.has_value());
  EXPECT_EQ(doc.support->entries[0].sign, Sign::Minus);
}

TEST(GraphJson, ShapeErrors) {
  auto parse = [](const char* text) { return [text] { io::graph_from_json(Json::parse(text)); }; };
  EXPECT_EQ(code_of(parse(R"([1, 2])")), ErrorCode::Parse);
  EXPECT_EQ(code_of(parse(R"({"edges": []})")), ErrorCode::Parse);
  EXPECT_EQ(code_of(parse(R"({"num_nodes": "3", "edges": []})")), ErrorCode::Parse);
  EXPECT_EQ(code_of(parse(R"({"num_nodes": 2, "edges": [[1, 2]]})")), ErrorCode::Parse);
  EXPECT_EQ(code_of(parse(R"({"num_nodes": 2, "edges": [], "epsilon": [0.5]})")), ErrorCode::Parse);
  EXPECT_EQ(code_of(parse(R"({"num_nodes": 2, "edges": [], "epsilon": [[0.5]]})")), ErrorCode::Parse);
  EXPECT_EQ(code_of(parse(R"({"support": [{"edge": 0, "sign": "+"}]})")), ErrorCode::BadSupport);
  EXPECT_EQ(code_of(parse(R"({"support": [{"edge": 1, "sign": "x"}]})")), ErrorCode::Parse);
  EXPECT_EQ(code_of(parse(R"({"support": [{"edge": "1", "sign": "+"}]})")), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { io::parse_json_text("{", "inline"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { io::read_file("/nonexistent/graph.json"); }), ErrorCode::Parse);
}

TEST(GraphJson, InstanceRoundTrip) {
  std::mt19937_64 rng(52);
  for (int round = 0; round < 50; ++round) {
    const auto g = random_connected_graph(rng, 2, 7);
    const auto inst = realize_scaled(g, random_support(rng, g.num_edges()), rng);
    const auto text = io::instance_to_json(inst).dump();
    const auto doc = io::graph_from_json(Json::parse(text));
    EXPECT_EQ(doc.graph, g);
    ASSERT_TRUE(doc.epsilon.has_value());
    EXPECT_EQ(*doc.epsilon, inst.epsilon);
    EXPECT_EQ(text.find('.'), std::string::npos);
  }
}

TEST(GraphJson, SupportRoundTrip) {
  std::mt19937_64 rng(53);
  for (int round = 0; round < 50; ++round) {
    const auto s = random_support(rng, 12);
    const auto back = io::support_from_json(io::support_to_json(s));
    EXPECT_EQ(back.entries, s.entries);
  }
  EXPECT_EQ(io::support_to_json({{{2, Sign::Plus}}}).dump(), R"([{"edge":3,"sign":"+"}])");
}

TEST(Reports, CornerReportShape) {
  CornerSet cs;
  cs.graph = two_node();
  cs.corners.push_back(Corner{ints({0, 1}), ints({0}), {}});
  cs.optimal_cost = 0;
  cs.origin_cost = 1;
  cs.classification = classify(cs);
  ComponentReport comps{{Component{{1}, {}}}};
  EXPECT_EQ(io::corner_report_json(cs, comps).dump(),
            R"({"classification":"NonVerifiable","optimal_cost":"0/1",)"
            R"("corners":[{"x":["0/1","1/1"],"edge_costs":["0/1"]}],"components":[[1]]})");
}

TEST(Reports, CensusFormats) {
  SupportCensus c{{{0, 1, 1, 1}, {1, 2, 0, 0}}};
  EXPECT_EQ(io::census_csv(c), "k,total,verifiable,uniquely_verifiable\n0,1,1,1\n1,2,0,0\n");
  EXPECT_EQ(io::census_json(c).dump(),
            R"([{"k":0,"total":1,"verifiable":1,"uniquely_verifiable":1},)"
            R"({"k":1,"total":2,"verifiable":0,"uniquely_verifiable":0}])");
  EXPECT_EQ(io::polynomial_json(polynomial_from(c)).dump(), R"({"coeffs":[1,0]})");
}

TEST(Reports, CurveCsv) {
  const std::vector<io::CurvePoint> pts{{Rational(0), 1.0}, {make_rational(1, 2), 0.5}, {Rational(1), 0.0}};
  EXPECT_EQ(io::curve_csv(pts), "p,p_ver\n0,1\n0.5,0.5\n1,0\n");
  EXPECT_EQ(io::decimal(1.0 / 3.0), "0.333333333333");
}

TEST(Digest, Fnv1a64KnownValues) {
  EXPECT_EQ(io::fnv1a64(""), "cbf29ce484222325");
  EXPECT_EQ(io::fnv1a64("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(io::fnv1a64("foobar"), "85944171f73967e8");
}
