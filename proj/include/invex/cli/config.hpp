#pragma once

/*
 * Run configuration. The file format is sectioned key/value text:
 *
 *   [model]
 *   a  = [1, 1, 1]          # three positive reals, likewise b and c
 *   x0 = 10
 *
 *   [sampling]
 *   seed  = 42
 *   count = 100
 *   z_box = [[1.1, 11], [1.1, 11], [1.1, 11]]
 *   e_box = [[0.2, 5], [0.2, 5], [0.2, 5]]
 *
 *   [tolerances]
 *   pd     = 1e-4           # relative PD tolerance for FD Hessians
 *   fd     = 1e-4           # FD identity residual tolerance
 *   solver = 1e-10          # steady-state residual tolerance
 *
 * '#' starts a comment. Every key is optional; unknown sections or keys are
 * rejected with the offending line number.
 */

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "invex/errors.hpp"
#include "invex/pathway.hpp"
#include "invex/sampling.hpp"

namespace invex::cli {

struct Config {
  pathway::PathwayModel model = pathway::PathwayModel::canonical();
  std::uint64_t seed = 0;
  int count = 100;
  std::optional<std::vector<Interval>> z_box;
  std::optional<std::vector<Interval>> e_box;
  double pd = 1e-4;
  double fd = 1e-4;
  double solver = 1e-10;

  std::vector<Interval> z_box_or_default() const {
    if (z_box) return *z_box;
    return pathway::z_sampler(model, seed, count).box;
  }
  std::vector<Interval> e_box_or_default() const {
    if (e_box) return *e_box;
    return std::vector<Interval>(3, Interval{0.2, 5.0});
  }
};

namespace detail {

// A parsed value: a number or a (possibly nested) list.
struct Value {
  std::optional<double> number;
  std::vector<Value> items;
  bool is_list = false;
};

class ValueParser {
public:
  ValueParser(std::string_view text, int line, std::string field)
      : text_(text), line_(line), field_(std::move(field)) {}

  Value parse() {
    Value v = value();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing characters");
    return v;
  }

private:
  [[noreturn]] void fail(const std::string& why) const {
    throw config_error("line " + std::to_string(line_) + ": " + field_ + ": " + why, line_, field_);
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  Value value() {
    skip_ws();
    if (pos_ >= text_.size()) fail("missing value");
    if (text_[pos_] == '[') return list();
    return number();
  }
  Value list() {
    Value v;
    v.is_list = true;
    ++pos_;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return v;
    }
    for (;;) {
      v.items.push_back(value());
      skip_ws();
      if (pos_ >= text_.size()) fail("unterminated list");
      if (text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (text_[pos_] == ']') {
        ++pos_;
        return v;
      }
      fail("expected ',' or ']' in list");
    }
  }
  Value number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    const std::string token(text_.substr(start, pos_ - start));
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(token, &used);
    } catch (const std::exception&) {
      fail("'" + token + "' is not a number");
    }
    if (used != token.size() || !std::isfinite(d)) fail("'" + token + "' is not a finite number");
    Value v;
    v.number = d;
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  std::string field_;
};

struct Entry {
  Value value;
  int line = 0;
};

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] inline void bad(const std::string& field, int line, const std::string& why) {
  throw config_error("line " + std::to_string(line) + ": " + field + ": " + why, line, field);
}

inline double positive_real(const std::string& field, const Entry& en) {
  if (!en.value.number) bad(field, en.line, "expected a number");
  if (!(*en.value.number > 0.0)) bad(field, en.line, "must be positive");
  return *en.value.number;
}

inline pathway::Triple positive_triple(const std::string& field, const Entry& en) {
  if (!en.value.is_list || en.value.items.size() != 3) {
    bad(field, en.line, "expected an array of 3 positive reals, got " +
                            (en.value.is_list ? std::to_string(en.value.items.size()) + " entries" : "a scalar"));
  }
  pathway::Triple t{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& it = en.value.items[i];
    if (!it.number || !(*it.number > 0.0)) bad(field, en.line, "entries must be positive reals");
    t[i] = *it.number;
  }
  return t;
}

inline std::vector<Interval> box(const std::string& field, const Entry& en) {
  if (!en.value.is_list || en.value.items.size() != 3) {
    bad(field, en.line, "expected 3 [lo, hi] pairs");
  }
  std::vector<Interval> out;
  for (const auto& p : en.value.items) {
    if (!p.is_list || p.items.size() != 2 || !p.items[0].number || !p.items[1].number) {
      bad(field, en.line, "each entry must be a [lo, hi] pair of numbers");
    }
    const Interval iv{*p.items[0].number, *p.items[1].number};
    if (!(iv.lo < iv.hi)) bad(field, en.line, "each pair must satisfy lo < hi");
    out.push_back(iv);
  }
  return out;
}

inline std::int64_t integer(const std::string& field, const Entry& en) {
  if (!en.value.number || std::floor(*en.value.number) != *en.value.number ||
      std::abs(*en.value.number) > 9.0e15) {
    bad(field, en.line, "expected an integer");
  }
  return static_cast<std::int64_t>(*en.value.number);
}

}  // namespace detail

inline Config parse_config(std::string_view text) {
  using detail::Entry;
  static const std::map<std::string, std::vector<std::string>> kSchema = {
      {"model", {"a", "b", "c", "x0"}},
      {"sampling", {"seed", "count", "z_box", "e_box"}},
      {"tolerances", {"pd", "fd", "solver"}},
  };

  std::map<std::string, Entry> entries;  // "section.key"
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      if (!kSchema.contains(section)) detail::bad(section, line_no, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) detail::bad(section.empty() ? "?" : section, line_no, "expected key = value");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    if (section.empty()) detail::bad(key, line_no, "key outside of any section");
    const std::string field = section + "." + key;
    const auto& keys = kSchema.at(section);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) detail::bad(field, line_no, "unknown key");
    if (entries.contains(field)) detail::bad(field, line_no, "duplicate key");
    detail::ValueParser vp(std::string_view(line).substr(eq + 1), line_no, field);
    entries[field] = Entry{vp.parse(), line_no};
  }

  Config cfg;
  auto get = [&](const std::string& f) -> const Entry* {
    const auto it = entries.find(f);
    return it == entries.end() ? nullptr : &it->second;
  };
  if (const auto* e = get("model.a")) cfg.model.a = detail::positive_triple("model.a", *e);
  if (const auto* e = get("model.b")) cfg.model.b = detail::positive_triple("model.b", *e);
  if (const auto* e = get("model.c")) cfg.model.c = detail::positive_triple("model.c", *e);
  if (const auto* e = get("model.x0")) cfg.model.x0 = detail::positive_real("model.x0", *e);
  if (const auto* e = get("sampling.seed")) {
    const auto s = detail::integer("sampling.seed", *e);
    if (s < 0) detail::bad("sampling.seed", e->line, "must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (const auto* e = get("sampling.count")) {
    const auto n = detail::integer("sampling.count", *e);
    if (n <= 0 || n > 10'000'000) detail::bad("sampling.count", e->line, "must be a positive integer");
    cfg.count = static_cast<int>(n);
  }
  if (const auto* e = get("sampling.z_box")) cfg.z_box = detail::box("sampling.z_box", *e);
  if (const auto* e = get("sampling.e_box")) {
    cfg.e_box = detail::box("sampling.e_box", *e);
    for (const auto& iv : *cfg.e_box) {
      if (!(iv.lo > 0.0)) detail::bad("sampling.e_box", e->line, "enzyme levels must be positive");
    }
  }
  if (cfg.z_box) {
    for (std::size_t i = 0; i < 3; ++i) {
      if (!((*cfg.z_box)[i].lo >= cfg.model.a[i])) {
        detail::bad("sampling.z_box", get("sampling.z_box")->line, "box must lie in z_i > a_i");
      }
    }
  }
  if (const auto* e = get("tolerances.pd")) cfg.pd = detail::positive_real("tolerances.pd", *e);
  if (const auto* e = get("tolerances.fd")) cfg.fd = detail::positive_real("tolerances.fd", *e);
  if (const auto* e = get("tolerances.solver")) cfg.solver = detail::positive_real("tolerances.solver", *e);
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("cannot open config file '" + path + "'", 0, "config");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace invex::cli
