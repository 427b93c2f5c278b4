#include "entromet/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>

#include "entromet/errors.hpp"

namespace entromet {

namespace {

using int128 = __int128;

// Best rational approximation of num/den (den > 0) with denominator bounded
// by max_den, via continued-fraction convergents and the final
// semiconvergent.
Rational best_approximation(int128 num, int128 den, long long max_den) {
  const bool negative = num < 0;
  if (negative) num = -num;

  int128 p_prev = 1, q_prev = 0;  // h_{-1}, k_{-1}
  int128 p = 0, q = 1;            // seeded so first step yields h_0 = a_0
  int128 n = num, d = den;
  while (d != 0) {
    const int128 a = n / d;
    int128 p_next = a * p + p_prev;
    int128 q_next = a * q + q_prev;
    if (q_next > max_den) {
      // Largest semiconvergent still within the bound.
      const int128 t = (max_den - q_prev) / q;
      const int128 sp = t * p + p_prev;
      const int128 sq = t * q + q_prev;
      // Choose between the previous convergent p/q and the semiconvergent
      // sp/sq by exact cross-multiplied distance to num/den.
      const int128 err_conv = (num * q - p * den) * sq >= 0
                                  ? (num * q - p * den) * sq
                                  : -(num * q - p * den) * sq;
      const int128 err_semi = (num * sq - sp * den) * q >= 0
                                  ? (num * sq - sp * den) * q
                                  : -(num * sq - sp * den) * q;
      if (sq > 0 && err_semi < err_conv) {
        p = sp;
        q = sq;
      }
      break;
    }
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    const int128 r = n - a * d;
    n = d;
    d = r;
  }
  long long pn = static_cast<long long>(p);
  long long qn = static_cast<long long>(q);
  if (qn == 0) qn = 1;
  return Rational(negative ? -pn : pn, qn);
}

Rational from_fraction(int128 num, int128 den, long long max_den) {
  if (den == 0) throw ConfigError("rational with zero denominator");
  if (den < 0) {
    den = -den;
    num = -num;
  }
  // Reduce first; only approximate when the exact value does not fit.
  int128 a = num < 0 ? -num : num, b = den;
  while (b != 0) {
    const int128 r = a % b;
    a = b;
    b = r;
  }
  if (a != 0) {
    num /= a;
    den /= a;
  }
  const int128 lim = static_cast<int128>(std::numeric_limits<long long>::max());
  if (den <= max_den && num <= lim && num >= -lim) {
    return Rational(static_cast<long long>(num), static_cast<long long>(den));
  }
  return best_approximation(num, den, max_den);
}

}  // namespace

Rational parse_rational(const std::string& text, long long max_den) {
  if (text.empty()) throw ConfigError("empty number");
  const auto bad = [&] {
    throw ConfigError("cannot parse number '" + text + "'");
  };

  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    errno = 0;
    char* end = nullptr;
    const long long num = std::strtoll(text.c_str(), &end, 10);
    if (errno != 0 || end != text.c_str() + slash) bad();
    const long long den = std::strtoll(text.c_str() + slash + 1, &end, 10);
    if (errno != 0 || *end != '\0' || den == 0) bad();
    return from_fraction(num, den, max_den);
  }

  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  int128 mantissa = 0;
  int digits = 0;       // significant digits accumulated
  int frac_digits = 0;  // digits after the decimal point
  bool in_fraction = false;
  bool any_digit = false;
  long long exponent = 0;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      any_digit = true;
      if (digits < 18) {
        mantissa = mantissa * 10 + (c - '0');
        ++digits;
        if (in_fraction) ++frac_digits;
      } else if (!in_fraction) {
        ++exponent;  // excess integer digits
      }
      // excess fraction digits are dropped (beyond 18 significant digits)
    } else if (c == '.' && !in_fraction) {
      in_fraction = true;
    } else if ((c == 'e' || c == 'E') && any_digit) {
      errno = 0;
      char* end = nullptr;
      exponent += std::strtoll(text.c_str() + i + 1, &end, 10);
      if (errno != 0 || *end != '\0') bad();
      break;
    } else {
      bad();
    }
  }
  if (!any_digit) bad();

  int128 num = negative ? -mantissa : mantissa;
  int128 den = 1;
  long long power = exponent - frac_digits;
  while (power > 0) {
    if (num > static_cast<int128>(1) << 100) bad();  // absurd magnitude
    num *= 10;
    --power;
  }
  while (power < 0) {
    den *= 10;
    ++power;
  }
  return from_fraction(num, den, max_den);
}

Rational rational_from_double(double x, long long max_den) {
  if (!std::isfinite(x)) throw ConfigError("non-finite number");
  // Scale into an exact fraction with ~1e18 precision, then approximate.
  const bool negative = x < 0;
  double ax = std::fabs(x);
  int128 den = 1;
  while (ax < 1e17 && den < static_cast<int128>(1'000'000'000'000'000'000LL)) {
    ax *= 10;
    den *= 10;
  }
  if (ax > 9.2e18) throw ConfigError("number too large for rational");
  int128 num = static_cast<int128>(std::llround(ax));
  if (negative) num = -num;
  return parse_rational(format_rational(best_approximation(num, den, max_den)),
                        max_den);
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) /
         static_cast<double>(r.denominator());
}

std::string format_rational(const Rational& r) {
  long long num = r.numerator();
  long long den = r.denominator();
  if (den == 1) return std::to_string(num);
  // den divides a power of ten iff den = 2^a * 5^b.
  long long d = den;
  int twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) {
    return std::to_string(num) + "/" + std::to_string(den);
  }
  const int k = twos > fives ? twos : fives;
  int128 scaled = static_cast<int128>(num);
  for (int i = 0; i < k; ++i) scaled *= 10;
  scaled /= den;
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string digits;
  if (scaled == 0) digits = "0";
  while (scaled > 0) {
    digits.insert(digits.begin(), static_cast<char>('0' + (int)(scaled % 10)));
    scaled /= 10;
  }
  while (static_cast<int>(digits.size()) <= k) digits.insert(digits.begin(), '0');
  digits.insert(digits.size() - k, ".");
  return (negative ? "-" : "") + digits;
}

std::size_t hash_rational(const Rational& r) {
  const std::size_t h1 = std::hash<long long>{}(r.numerator());
  const std::size_t h2 = std::hash<long long>{}(r.denominator());
  return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
}

}  // namespace entromet
