#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace couponmix {

// Exact rational arithmetic is backed by GMP. Probabilities are carried as
// rationals whenever they were constructed from exact inputs, so identities
// like the partition of unity can be asserted with equality, not tolerance.
using Rational = mpq_class;

// Parses "num/den", an integer, or a plain decimal ("0.25" -> 1/4) exactly.
Rational rational_from_string(const std::string& text);

// Every finite double is a dyadic rational; this conversion is exact.
Rational rational_from_double(double x);

Rational rational_from_int(std::int64_t n);

// "num/den", or just "num" when the denominator is 1.
std::string rational_to_string(const Rational& q);

double rational_to_double(const Rational& q);

// True when the denominator is small enough that exact alternating sums stay
// cheap (the auto evaluation mode keys off this).
bool has_small_denominator(const Rational& q, unsigned long limit = 1000000000UL);

}  // namespace couponmix
