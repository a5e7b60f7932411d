#include "geolab/rational.hpp"

#include <cctype>
#include <sstream>

namespace geolab {

namespace {

bool valid_integer_token(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

Rat parse_rational(const std::string& text) {
  std::string s = strip(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  std::size_t slash = s.find('/');
  if (slash != std::string::npos) {
    std::string ns = strip(s.substr(0, slash));
    std::string ds = strip(s.substr(slash + 1));
    if (!valid_integer_token(ns) || !valid_integer_token(ds))
      throw std::invalid_argument("bad rational literal: " + text);
    Int n(ns), d(ds);
    if (d == 0) throw std::invalid_argument("zero denominator: " + text);
    return Rat(n, d);
  }
  std::size_t dot = s.find('.');
  if (dot != std::string::npos) {
    std::string ip = s.substr(0, dot);
    std::string fp = s.substr(dot + 1);
    if (ip.empty() || ip == "-" || ip == "+") ip += "0";
    if (!valid_integer_token(ip)) throw std::invalid_argument("bad decimal literal: " + text);
    for (char c : fp)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw std::invalid_argument("bad decimal literal: " + text);
    Int scale = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
    Int whole(ip);
    Int frac = fp.empty() ? Int(0) : Int(fp);
    bool neg = !s.empty() && s[0] == '-';
    Int num = whole * scale + (neg ? -frac : frac);
    return Rat(num, scale);
  }
  if (!valid_integer_token(s)) throw std::invalid_argument("bad rational literal: " + text);
  return Rat(Int(s));
}

std::string rational_str(const Rat& q) {
  std::ostringstream os;
  os << rat_num(q);
  if (rat_den(q) != 1) os << "/" << rat_den(q);
  return os.str();
}

VecQ parse_vecq(const std::string& text) {
  VecQ out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, ',')) out.push_back(parse_rational(cur));
  if (out.empty()) throw std::invalid_argument("empty vector literal");
  return out;
}

std::string vecq_str(const VecQ& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += rational_str(v[i]);
  }
  return s;
}

}  // namespace geolab
