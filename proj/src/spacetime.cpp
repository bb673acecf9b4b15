#include "summon/spacetime.hpp"

#include "summon/errors.hpp"
#include "summon/task.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace summon {

namespace {

using boost::multiprecision::cpp_int;

cpp_int parse_integer(std::string_view text, std::string_view whole) {
  if (text.empty()) throw ParseError("empty number in coordinate '" + std::string(whole) + "'");
  std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (start == text.size()) throw ParseError("bad coordinate '" + std::string(whole) + "'");
  for (std::size_t i = start; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') {
      throw ParseError("bad coordinate '" + std::string(whole) + "'");
    }
  }
  cpp_int value(std::string(text.substr(start)));
  return text[0] == '-' ? cpp_int(-value) : value;
}

Rational squared_norm_difference(const SpacetimePoint& a, const SpacetimePoint& b) {
  Rational sum = 0;
  for (std::size_t k = 0; k < a.x.size(); ++k) {
    Rational d = b.x[k].rational() - a.x[k].rational();
    sum += d * d;
  }
  return sum;
}

void require_same_dimension(const SpacetimePoint& a, const SpacetimePoint& b) {
  if (a.dimension() != b.dimension()) {
    throw InvalidArgument("spatial dimension mismatch: " + std::to_string(a.dimension()) +
                          " vs " + std::to_string(b.dimension()));
  }
}

}  // namespace

Coordinate::Coordinate(double value) : value_(value) {}

Coordinate::Coordinate(Rational value)
    : exact_(std::move(value)), value_(static_cast<double>(*exact_)) {}

Coordinate Coordinate::parse(std::string_view text) {
  std::string_view trimmed = text;
  while (!trimmed.empty() && trimmed.front() == ' ') trimmed.remove_prefix(1);
  while (!trimmed.empty() && trimmed.back() == ' ') trimmed.remove_suffix(1);

  if (auto slash = trimmed.find('/'); slash != std::string_view::npos) {
    cpp_int num = parse_integer(trimmed.substr(0, slash), text);
    cpp_int den = parse_integer(trimmed.substr(slash + 1), text);
    if (den == 0) throw ParseError("zero denominator in coordinate '" + std::string(text) + "'");
    return Coordinate(Rational(num, den));
  }
  if (auto dot = trimmed.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = trimmed.substr(0, dot);
    std::string_view frac_part = trimmed.substr(dot + 1);
    bool negative = !int_part.empty() && int_part[0] == '-';
    std::string_view int_digits = int_part;
    if (!int_digits.empty() && (int_digits[0] == '-' || int_digits[0] == '+')) {
      int_digits.remove_prefix(1);
    }
    if (int_digits.empty() && frac_part.empty()) {
      throw ParseError("bad coordinate '" + std::string(text) + "'");
    }
    cpp_int whole = int_digits.empty() ? cpp_int(0) : parse_integer(int_digits, text);
    cpp_int frac = frac_part.empty() ? cpp_int(0) : parse_integer(frac_part, text);
    if (!frac_part.empty() && (frac_part[0] == '-' || frac_part[0] == '+')) {
      throw ParseError("bad coordinate '" + std::string(text) + "'");
    }
    cpp_int scale = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(frac_part.size()));
    Rational magnitude = Rational(whole) + Rational(frac, scale);
    return Coordinate(negative ? Rational(-magnitude) : magnitude);
  }
  return Coordinate(Rational(parse_integer(trimmed, text)));
}

const Rational& Coordinate::rational() const {
  if (!exact_) throw InvalidArgument("coordinate has no exact value");
  return *exact_;
}

std::string Coordinate::to_string() const {
  if (exact_) {
    const auto num = boost::multiprecision::numerator(*exact_);
    const auto den = boost::multiprecision::denominator(*exact_);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
  }
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value_);
  return std::string(buf, end);
}

bool operator==(const Coordinate& a, const Coordinate& b) {
  if (a.exact_ && b.exact_) return *a.exact_ == *b.exact_;
  if (a.exact_ || b.exact_) return false;
  return a.value_ == b.value_;
}

bool SpacetimePoint::is_exact() const {
  return t.is_exact() && std::all_of(x.begin(), x.end(), [](const Coordinate& c) { return c.is_exact(); });
}

bool SpacetimePoint::is_finite() const {
  return std::isfinite(t.value()) &&
         std::all_of(x.begin(), x.end(), [](const Coordinate& c) { return std::isfinite(c.value()); });
}

bool operator==(const SpacetimePoint& a, const SpacetimePoint& b) {
  return a.t == b.t && a.x == b.x;
}

std::string to_string(const SpacetimePoint& p) {
  std::ostringstream out;
  out << "(" << p.t.to_string() << ", [";
  for (std::size_t k = 0; k < p.x.size(); ++k) {
    if (k) out << ", ";
    out << p.x[k].to_string();
  }
  out << "])";
  return out.str();
}

bool causally_precedes(const SpacetimePoint& a, const SpacetimePoint& b, double tolerance) {
  require_same_dimension(a, b);
  if (a.is_exact() && b.is_exact()) {
    Rational dt = b.t.rational() - a.t.rational();
    if (dt < 0) return false;
    return dt * dt >= squared_norm_difference(a, b);
  }
  return causal_margin(a, b) >= -tolerance;
}

double causal_margin(const SpacetimePoint& a, const SpacetimePoint& b) {
  require_same_dimension(a, b);
  double sq = 0.0;
  for (std::size_t k = 0; k < a.x.size(); ++k) {
    double d = b.x[k].value() - a.x[k].value();
    sq += d * d;
  }
  return (b.t.value() - a.t.value()) - std::sqrt(sq);
}

SpacetimePoint boost(const SpacetimePoint& p, double velocity) {
  if (!(std::abs(velocity) < 1.0)) throw InvalidArgument("boost velocity must satisfy |v| < 1");
  if (p.x.empty()) throw InvalidArgument("boost needs at least one spatial axis");
  const double gamma = 1.0 / std::sqrt(1.0 - velocity * velocity);
  const double t = p.t.value();
  const double x = p.x[0].value();
  SpacetimePoint out;
  out.t = Coordinate(gamma * (t - velocity * x));
  out.x.reserve(p.x.size());
  out.x.emplace_back(gamma * (x - velocity * t));
  for (std::size_t k = 1; k < p.x.size(); ++k) out.x.emplace_back(p.x[k].value());
  return out;
}

bool PastInputSet::contains(std::size_t input) const {
  return std::binary_search(members.begin(), members.end(), input);
}

PastInputSet past_input_set(const SummoningTask& task, std::size_t return_index) {
  if (return_index >= task.returns.size()) {
    throw InvalidArgument("return index " + std::to_string(return_index + 1) + " out of range");
  }
  PastInputSet set;
  set.return_indices = {return_index};
  for (std::size_t k = 0; k < task.inputs.size(); ++k) {
    if (task.precedes(task.inputs[k].point, task.returns[return_index])) set.members.push_back(k);
  }
  return set;
}

PastInputSet common_past_input_set(const SummoningTask& task, std::size_t i, std::size_t j) {
  if (i == j) throw InvalidArgument("common past input set needs two distinct return points");
  PastInputSet a = past_input_set(task, i);
  PastInputSet b = past_input_set(task, j);
  PastInputSet set;
  set.return_indices = {i, j};
  std::set_intersection(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
                        std::back_inserter(set.members));
  return set;
}

}  // namespace summon
