// Tests for the report types and the deterministic JSON serialization:
// shortest round-trip number formatting, non-finite handling, string
// escaping, writer structure, and LemmaReport field order.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "khinchin/report.hpp"

using namespace khinchin::report;

TEST_CASE("json_number: shortest representation that round-trips",
          "[report]") {
  for (double x : {0.1, 1.0 / 3.0, 0.7071067811865476, 1e300, 5e-324, 1.0,
                   -2.5, 1e6, 3.141592653589793, 123456789.0,
                   2.4664203456655597e-16}) {
    const std::string s = json_number(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
    // Shortest: if 15 digits round-trip, 17 digits must not be used.
    char short15[40];
    std::snprintf(short15, sizeof short15, "%.15g", x);
    if (std::strtod(short15, nullptr) == x) CHECK(s == short15);
  }

  // Negative zero survives.
  const std::string nz = json_number(-0.0);
  CHECK(std::signbit(std::strtod(nz.c_str(), nullptr)));

  // Non-finite values become strings (JSON numbers cannot hold them).
  CHECK(json_number(std::numeric_limits<double>::quiet_NaN()) == "\"nan\"");
  CHECK(json_number(std::numeric_limits<double>::infinity()) == "\"inf\"");
  CHECK(json_number(-std::numeric_limits<double>::infinity()) == "\"-inf\"");
}

TEST_CASE("json_string: escaping and UTF-8 passthrough", "[report]") {
  CHECK(json_string("plain") == "\"plain\"");
  CHECK(json_string("a\"b") == "\"a\\\"b\"");
  CHECK(json_string("a\\b") == "\"a\\\\b\"");
  CHECK(json_string("line\nbreak") == "\"line\\nbreak\"");
  CHECK(json_string("tab\there") == "\"tab\\there\"");
  CHECK(json_string(std::string(1, '\x01')) == "\"\\u0001\"");
  CHECK(json_string("1/\xE2\x88\x9A2") == "\"1/\xE2\x88\x9A2\"");
}

TEST_CASE("JsonWriter: structure, commas, pretty form", "[report]") {
  JsonWriter w;
  w.begin_object();
  w.key("a").value(1);
  w.key("b").begin_array();
  w.value(true);
  w.value("x");
  w.end_array();
  w.end_object();
  CHECK(w.str() ==
        "{\n  \"a\": 1,\n  \"b\": [\n    true,\n    \"x\"\n  ]\n}");

  JsonWriter e;
  e.begin_object();
  e.key("empty").begin_array();
  e.end_array();
  e.end_object();
  CHECK(e.str() == "{\n  \"empty\": []\n}");
}

TEST_CASE("LemmaReport: verdict strings, lookup, JSON emission", "[report]") {
  CHECK(std::string(to_string(Verdict::pass)) == "pass");
  CHECK(std::string(to_string(Verdict::fail)) == "fail");
  CHECK(std::string(to_string(Verdict::rejected)) == "rejected");

  LemmaReport r;
  r.lemma_id = "Psi-unif";
  r.inputs = "dist=rademacher";
  r.computed = {{"value", 0.5, 1e-9}, {"w2", 0.0, 0.0}};
  r.paper_bound = std::numeric_limits<double>::quiet_NaN();
  r.margin = 1e-3;
  r.verdict = Verdict::pass;
  r.notes = "note with \"quotes\"";

  CHECK(r.passed());
  CHECK(r.quantity("value") == 0.5);
  CHECK(std::isnan(r.quantity("missing")));

  JsonWriter w;
  write_json(w, r);
  const std::string& js = w.str();
  CHECK(js.find("\"lemma_id\": \"Psi-unif\"") != std::string::npos);
  CHECK(js.find("\"paper_bound\": \"nan\"") != std::string::npos);
  CHECK(js.find("\"verdict\": \"pass\"") != std::string::npos);
  CHECK(js.find("\\\"quotes\\\"") != std::string::npos);
  // Field order is fixed: lemma_id before computed before verdict.
  CHECK(js.find("\"lemma_id\"") < js.find("\"computed\""));
  CHECK(js.find("\"computed\"") < js.find("\"verdict\""));

  // A second emission of the same report is byte-identical.
  JsonWriter w2;
  write_json(w2, r);
  CHECK(w.str() == w2.str());
}
