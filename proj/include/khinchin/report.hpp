#pragma once

// Machine-readable verdicts. Every lemma/inequality check in the library
// returns a LemmaReport: the computed quantities with their uncertainty
// envelopes, the bound being tested, and the margin after uncertainty
// widening. verdict == pass if and only if margin >= 0.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

namespace khinchin::report {

struct Quantity {
  std::string name;
  double value = 0.0;
  double uncertainty = 0.0;
};

enum class Verdict { pass, fail, rejected };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "rejected";
  }
}

struct LemmaReport {
  std::string lemma_id;
  std::string inputs;  // echo of the configuration that produced the check
  std::vector<Quantity> computed;
  double paper_bound = 0.0;
  double margin = 0.0;  // >= 0 passes; already widened by uncertainties
  Verdict verdict = Verdict::fail;
  std::string notes;

  bool passed() const { return verdict == Verdict::pass; }

  // Look up a computed quantity by name; returns NaN if absent.
  double quantity(const std::string& name) const {
    for (const auto& q : computed)
      if (q.name == name) return q.value;
    return std::numeric_limits<double>::quiet_NaN();
  }
};

// ---------------------------------------------------------------------------
// JSON serialization.  Deterministic by construction: fixed key order,
// shortest round-trip number formatting, and non-finite values mapped to the
// strings "nan"/"inf"/"-inf" (JSON numbers cannot represent them).

// Shortest decimal representation that parses back to the same double.
inline std::string json_number(double x) {
  if (x != x) return "\"nan\"";
  if (x == std::numeric_limits<double>::infinity()) return "\"inf\"";
  if (x == -std::numeric_limits<double>::infinity()) return "\"-inf\"";
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  // %g never emits a decimal point for integral values; that is still a
  // valid JSON number, so the text is used as-is.
  return buf;
}

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char esc[8];
          std::snprintf(esc, sizeof esc, "\\u%04x", c);
          out += esc;
        } else {
          out += static_cast<char>(c);  // UTF-8 passthrough
        }
    }
  }
  out += '"';
  return out;
}

// Streaming writer that tracks nesting and comma placement and pretty-prints
// with two-space indentation, one key per line (so volatile fields such as
// timestamps occupy exactly one line and can be filtered out when comparing
// reports byte for byte).
class JsonWriter {
 public:
  JsonWriter& begin_object() { return open('{'); }
  JsonWriter& end_object() { return close('}'); }
  JsonWriter& begin_array() { return open('['); }
  JsonWriter& end_array() { return close(']'); }

  JsonWriter& key(const std::string& k) {
    separate();
    buf_ += json_string(k);
    buf_ += ": ";
    pending_value_ = true;
    return *this;
  }

  JsonWriter& value(double x) { return raw(json_number(x)); }
  JsonWriter& value(int x) { return raw(std::to_string(x)); }
  JsonWriter& value(unsigned long x) { return raw(std::to_string(x)); }
  JsonWriter& value(unsigned long long x) { return raw(std::to_string(x)); }
  JsonWriter& value(bool b) { return raw(b ? "true" : "false"); }
  JsonWriter& value(const std::string& s) { return raw(json_string(s)); }
  JsonWriter& value(const char* s) { return raw(json_string(s)); }

  const std::string& str() const { return buf_; }

 private:
  std::string buf_;
  std::vector<bool> first_;  // per nesting level: no element emitted yet
  bool pending_value_ = false;

  JsonWriter& raw(const std::string& text) {
    separate();
    buf_ += text;
    return *this;
  }

  JsonWriter& open(char c) {
    separate();
    buf_ += c;
    first_.push_back(true);
    return *this;
  }

  JsonWriter& close(char c) {
    const bool empty = first_.empty() || first_.back();
    if (!first_.empty()) first_.pop_back();
    if (!empty) {
      buf_ += '\n';
      indent();
    }
    buf_ += c;
    return *this;
  }

  void separate() {
    if (pending_value_) {  // value right after its key: stay on the line
      pending_value_ = false;
      return;
    }
    if (first_.empty()) return;
    if (!first_.back()) buf_ += ',';
    first_.back() = false;
    buf_ += '\n';
    indent();
  }

  void indent() { buf_.append(2 * first_.size(), ' '); }
};

inline void write_json(JsonWriter& w, const Quantity& q) {
  w.begin_object();
  w.key("name").value(q.name);
  w.key("value").value(q.value);
  w.key("uncertainty").value(q.uncertainty);
  w.end_object();
}

inline void write_json(JsonWriter& w, const LemmaReport& r) {
  w.begin_object();
  w.key("lemma_id").value(r.lemma_id);
  w.key("inputs").value(r.inputs);
  w.key("computed").begin_array();
  for (const auto& q : r.computed) write_json(w, q);
  w.end_array();
  w.key("paper_bound").value(r.paper_bound);
  w.key("margin").value(r.margin);
  w.key("verdict").value(to_string(r.verdict));
  w.key("notes").value(r.notes);
  w.end_object();
}

}  // namespace khinchin::report
