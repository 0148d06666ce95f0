#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpurity/channel.hpp"

namespace qpurity {

// Parse failure in a channel spec string or file, with the byte offset of
// the offending position.
struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (position " + std::to_string(pos) + ")"),
        position(pos) {}
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline long long parse_int_at(const std::string& s, std::size_t pos) {
  long long v = 0;
  const auto [ptr, ec] =
      std::from_chars(s.data() + pos, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("expected integer in '" + s + "'",
                     static_cast<std::size_t>(ptr - s.data()));
  return v;
}

inline double parse_double_at(const std::string& s, std::size_t pos) {
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(s.data() + pos, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("expected number in '" + s + "'",
                     static_cast<std::size_t>(ptr - s.data()));
  return v;
}

inline void expect_key(const std::string& s, std::size_t pos,
                       const std::string& key) {
  if (s.compare(pos, key.size(), key) != 0)
    throw ParseError("expected '" + key + "' in '" + s + "'", pos);
}

}  // namespace detail

// Channel file schema: {"name": text, "dim_in": n, "dim_out": n,
// "kraus": [{"re": [[...]], "im": [[...]]}, ...]} with row-major 2-D arrays.
inline Channel channel_from_json(const nlohmann::json& j,
                                 const std::string& fallback_label) {
  if (!j.is_object()) throw ParseError("channel file: expected a JSON object", 0);
  for (const char* key : {"dim_in", "dim_out", "kraus"})
    if (!j.contains(key))
      throw ParseError(std::string("channel file: missing field '") + key + "'",
                       0);
  const int din = j.at("dim_in").get<int>();
  const int dout = j.at("dim_out").get<int>();
  if (din < 1 || dout < 1)
    throw ParseError("channel file: dimensions must be >= 1", 0);
  const auto& karr = j.at("kraus");
  if (!karr.is_array() || karr.empty())
    throw ParseError("channel file: 'kraus' must be a nonempty array", 0);
  std::vector<ComplexMatrix> kraus;
  for (const auto& kj : karr) {
    if (!kj.is_object() || !kj.contains("re") || !kj.contains("im"))
      throw ParseError("channel file: each Kraus entry needs 're' and 'im'", 0);
    const auto& re = kj.at("re");
    const auto& im = kj.at("im");
    if (!re.is_array() || static_cast<int>(re.size()) != dout ||
        !im.is_array() || static_cast<int>(im.size()) != dout)
      throw ParseError("channel file: Kraus arrays must have dim_out rows", 0);
    ComplexMatrix a(dout, din);
    for (int r = 0; r < dout; ++r) {
      const auto& re_row = re.at(r);
      const auto& im_row = im.at(r);
      if (static_cast<int>(re_row.size()) != din ||
          static_cast<int>(im_row.size()) != din)
        throw ParseError("channel file: Kraus rows must have dim_in columns", 0);
      for (int c = 0; c < din; ++c)
        a(r, c) = std::complex<double>(re_row.at(c).get<double>(),
                                       im_row.at(c).get<double>());
    }
    kraus.push_back(std::move(a));
  }
  const std::string label =
      j.contains("name") ? j.at("name").get<std::string>() : fallback_label;
  return Channel(std::move(kraus), label);
}

inline nlohmann::ordered_json channel_to_json(const Channel& phi) {
  nlohmann::ordered_json j;
  j["name"] = phi.label();
  j["dim_in"] = phi.dim_in();
  j["dim_out"] = phi.dim_out();
  j["kraus"] = nlohmann::ordered_json::array();
  for (const auto& a : phi.kraus()) {
    nlohmann::ordered_json re = nlohmann::ordered_json::array();
    nlohmann::ordered_json im = nlohmann::ordered_json::array();
    for (int r = 0; r < a.rows(); ++r) {
      nlohmann::ordered_json re_row = nlohmann::ordered_json::array();
      nlohmann::ordered_json im_row = nlohmann::ordered_json::array();
      for (int c = 0; c < a.cols(); ++c) {
        re_row.push_back(a(r, c).real());
        im_row.push_back(a(r, c).imag());
      }
      re.push_back(std::move(re_row));
      im.push_back(std::move(im_row));
    }
    j["kraus"].push_back({{"re", std::move(re)}, {"im", std::move(im)}});
  }
  return j;
}

inline Channel load_channel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open channel file '" + path + "'", 0);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("channel file '" + path + "': " + e.what(),
                     static_cast<std::size_t>(e.byte));
  }
  return channel_from_json(j, path);
}

inline void save_channel_file(const Channel& phi, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write channel file '" + path + "'");
  out << channel_to_json(phi).dump(2) << "\n";
}

// Builtin spec strings:
//   identity:d=<n>
//   depolarizing:d=<n>,p=<x>
//   weaknoise:base=<spec>,eps=<x>
//   tensor:<spec>;<spec>[;<spec>...]
// Anything else is treated as a path to a channel file.
inline Channel parse_channel_spec(const std::string& text) {
  const std::string s = detail::trim(text);
  if (s.empty()) throw ParseError("empty channel spec", 0);

  if (s.rfind("identity:", 0) == 0) {
    detail::expect_key(s, 9, "d=");
    const long long d = detail::parse_int_at(s, 11);
    if (d < 1 || d > tol::max_dim)
      throw ParseError("identity: dimension out of range in '" + s + "'", 11);
    return identity_channel(static_cast<int>(d));
  }
  if (s.rfind("depolarizing:", 0) == 0) {
    detail::expect_key(s, 13, "d=");
    const auto comma = s.find(',', 15);
    if (comma == std::string::npos)
      throw ParseError("depolarizing: expected ',p=' in '" + s + "'", 15);
    const std::string dstr = s.substr(15, comma - 15);
    const long long d = detail::parse_int_at(dstr, 0);
    detail::expect_key(s, comma + 1, "p=");
    const double p = detail::parse_double_at(s.substr(comma + 3), 0);
    if (d < 2 || d > tol::max_dim)
      throw ParseError("depolarizing: dimension out of range in '" + s + "'", 15);
    return depolarizing(static_cast<int>(d), p);
  }
  if (s.rfind("weaknoise:", 0) == 0) {
    detail::expect_key(s, 10, "base=");
    const auto eps_pos = s.rfind(",eps=");
    if (eps_pos == std::string::npos || eps_pos < 15)
      throw ParseError("weaknoise: expected ',eps=' in '" + s + "'", 15);
    const std::string base_spec = s.substr(15, eps_pos - 15);
    const double eps = detail::parse_double_at(s.substr(eps_pos + 5), 0);
    return weak_noise(parse_channel_spec(base_spec), eps);
  }
  if (s.rfind("tensor:", 0) == 0) {
    const std::string rest = s.substr(7);
    std::vector<Channel> factors;
    std::size_t start = 0;
    while (start <= rest.size()) {
      auto sep = rest.find(';', start);
      if (sep == std::string::npos) sep = rest.size();
      const std::string part = detail::trim(rest.substr(start, sep - start));
      if (part.empty())
        throw ParseError("tensor: empty factor in '" + s + "'", 7 + start);
      factors.push_back(parse_channel_spec(part));
      start = sep + 1;
      if (sep == rest.size()) break;
    }
    if (factors.size() < 2)
      throw ParseError("tensor: need at least two factors in '" + s + "'", 7);
    return tensor_channel_all(factors);
  }
  return load_channel_file(s);
}

}  // namespace qpurity
