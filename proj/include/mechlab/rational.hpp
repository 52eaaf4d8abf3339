#pragma once

// Exact rational scalar used throughout: canonical form (gcd-reduced,
// positive denominator) is maintained by the GMP backend.  No floating
// point is used anywhere in a semantic path; doubles appear only in
// elapsed-time reporting.

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mechlab {

using Rat = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

// Thrown for malformed or invariant-violating input (maps to CLI exit 2).
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an enumeration or solver size cap is exceeded (CLI exit 3).
struct CapError : std::runtime_error {
  explicit CapError(const std::string& what) : std::runtime_error(what) {}
};

// Parses "a" or "a/b" with a, b base-10 integers (optional leading '-' on a),
// b > 0 after sign normalization; rejects everything else.
inline Rat parse_rat(const std::string& text) {
  const auto bad = [&]() -> InputError {
    return InputError("malformed rational '" + text + "' (want \"a\" or \"a/b\")");
  };
  if (text.empty()) throw bad();
  const std::size_t slash = text.find('/');
  const std::string num_part = text.substr(0, slash == std::string::npos ? text.size() : slash);
  const auto is_int = [](const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  if (!is_int(num_part)) throw bad();
  if (slash == std::string::npos) return Rat(BigInt(num_part));
  const std::string den_part = text.substr(slash + 1);
  if (!is_int(den_part) || den_part[0] == '-') throw bad();
  BigInt den(den_part);
  if (den == 0) throw InputError("zero denominator in rational '" + text + "'");
  return Rat(BigInt(num_part)) / Rat(den);  // division canonicalizes
}

// Canonical form: "a" when the denominator is 1, else "a/b".
inline std::string rat_to_string(const Rat& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

// Price in [0, inf]; "inf" marks bundles that are never sold.
// Arithmetic convention: inf + r = inf, and in comparisons an inf on the
// large side wins (so `a + b >= c + d` with inf on the left always holds,
// while inf on the right is only balanced by inf on the left).
class ExtPrice {
 public:
  ExtPrice() : inf_(false), value_(0) {}
  explicit ExtPrice(const Rat& v) : inf_(false), value_(v) {}
  static ExtPrice infinity() {
    ExtPrice p;
    p.inf_ = true;
    return p;
  }

  bool is_inf() const { return inf_; }
  // Finite value; calling this on an infinite price is a logic error.
  const Rat& finite() const {
    if (inf_) throw std::logic_error("ExtPrice::finite() on infinite price");
    return value_;
  }

  friend ExtPrice operator+(const ExtPrice& a, const ExtPrice& b) {
    if (a.inf_ || b.inf_) return infinity();
    return ExtPrice(a.value_ + b.value_);
  }

  friend bool operator==(const ExtPrice& a, const ExtPrice& b) {
    if (a.inf_ || b.inf_) return a.inf_ && b.inf_;
    return a.value_ == b.value_;
  }
  friend bool operator!=(const ExtPrice& a, const ExtPrice& b) { return !(a == b); }
  friend bool operator<(const ExtPrice& a, const ExtPrice& b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator>(const ExtPrice& a, const ExtPrice& b) { return b < a; }
  friend bool operator<=(const ExtPrice& a, const ExtPrice& b) { return !(b < a); }
  friend bool operator>=(const ExtPrice& a, const ExtPrice& b) { return !(a < b); }

  std::string str() const { return inf_ ? "inf" : rat_to_string(value_); }

 private:
  bool inf_;
  Rat value_;
};

// Certified rational upper bounds on natural logarithms, used wherever a
// theorem's constant involves a log: checking `value <= C'*x` with C' >= C
// is implied by the theorem's `value <= C*x`, so these never cause a
// theorem-backed check to fail spuriously.  (Each bound exceeds the true
// value by less than 1e-6.)
inline const Rat& ln2_upper() {
  static const Rat v = Rat(693148) / Rat(1000000);
  return v;
}
inline const Rat& ln3_upper() {
  static const Rat v = Rat(1098613) / Rat(1000000);
  return v;
}
inline const Rat& ln5_upper() {
  static const Rat v = Rat(1609438) / Rat(1000000);
  return v;
}
inline const Rat& ln7_upper() {
  static const Rat v = Rat(1945911) / Rat(1000000);
  return v;
}

// Upper bound on ln(n) for n >= 1 by prime factorization of n.
inline Rat ln_upper(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("ln_upper(0)");
  Rat sum(0);
  const auto take = [&](std::uint64_t p, const Rat& bound) {
    while (n % p == 0) {
      sum += bound;
      n /= p;
    }
  };
  take(2, ln2_upper());
  take(3, ln3_upper());
  take(5, ln5_upper());
  take(7, ln7_upper());
  if (n != 1)
    throw std::invalid_argument("ln_upper: argument has a prime factor > 7");
  return sum;
}

}  // namespace mechlab
