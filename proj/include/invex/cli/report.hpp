#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>

#include <openssl/evp.h>

#include "json.hpp"

#include "invex/cli/config.hpp"
#include "invex/smooth_map.hpp"

namespace invex::cli {

using json = nlohmann::json;

namespace detail {

inline void write_number(std::string& out, double d) {
  if (!std::isfinite(d)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  out += buf;
}

inline void write_canonical(std::string& out, const json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {  // std::map backing: keys sorted
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(k).dump();
        out += indent < 0 ? ":" : ": ";
        write_canonical(out, v, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        write_canonical(out, v, indent, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float:
      write_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// JSON with sorted keys and every float printed with 17 significant digits.
inline std::string dump_canonical(const json& j, int indent = 2) {
  std::string out;
  detail::write_canonical(out, j, indent, 0);
  return out;
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw error("SHA-256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

inline json to_json(const Vector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json to_json(const Matrix& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) a.push_back(to_json(Vector(m.row(i).transpose())));
  return a;
}

inline json to_json(const std::vector<Interval>& box) {
  json a = json::array();
  for (const auto& iv : box) a.push_back({iv.lo, iv.hi});
  return a;
}

/// Fully resolved configuration; the digest is taken over its canonical form,
/// so comments and layout of the file do not matter.
inline json to_json(const Config& c) {
  json j;
  j["model"] = {{"a", c.model.a}, {"b", c.model.b}, {"c", c.model.c}, {"x0", c.model.x0}};
  j["sampling"] = {{"seed", c.seed},
                   {"count", c.count},
                   {"z_box", to_json(c.z_box_or_default())},
                   {"e_box", to_json(c.e_box_or_default())}};
  j["tolerances"] = {{"pd", c.pd}, {"fd", c.fd}, {"solver", c.solver}};
  return j;
}

inline std::string config_digest(const Config& c) { return sha256_hex(dump_canonical(to_json(c), -1)); }

/// Accumulates named wall-clock stage durations in seconds.
class StageTimer {
public:
  template <typename F>
  decltype(auto) time(const std::string& stage, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Record {
      StageTimer& self;
      const std::string& stage;
      std::chrono::steady_clock::time_point t0;
      ~Record() {
        self.timings_[stage] =
            self.timings_.value(stage, 0.0) +
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
    } rec{*this, stage, t0};
    return f();
  }
  const json& timings() const { return timings_; }

private:
  json timings_ = json::object();
};

}  // namespace invex::cli
