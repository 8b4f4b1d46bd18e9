#include "couponmix/rational.hpp"

#include <cctype>
#include <cstdlib>

#include "couponmix/errors.hpp"

namespace couponmix {

namespace {

bool is_integer_literal(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

}  // namespace

Rational rational_from_string(const std::string& text) {
    std::string s = text;
    // trim
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    if (s.empty()) throw ConfigError("empty rational literal");

    if (auto slash = s.find('/'); slash != std::string::npos) {
        std::string num = s.substr(0, slash);
        std::string den = s.substr(slash + 1);
        if (!is_integer_literal(num) || !is_integer_literal(den))
            throw ConfigError("malformed rational literal '" + text + "'");
        Rational q;
        if (mpq_set_str(q.get_mpq_t(), (num + "/" + den).c_str(), 10) != 0)
            throw ConfigError("malformed rational literal '" + text + "'");
        if (mpz_sgn(mpq_denref(q.get_mpq_t())) == 0)
            throw ConfigError("zero denominator in '" + text + "'");
        q.canonicalize();
        return q;
    }

    if (auto dot = s.find('.'); dot != std::string::npos) {
        std::string head = s.substr(0, dot);
        std::string tail = s.substr(dot + 1);
        if (head.empty() || head == "+" || head == "-") head += "0";
        if (!is_integer_literal(head) || (!tail.empty() && !is_integer_literal(tail)))
            throw ConfigError("malformed decimal literal '" + text + "'");
        Rational q(head);
        if (!tail.empty()) {
            mpz_class scale;
            mpz_ui_pow_ui(scale.get_mpz_t(), 10, tail.size());
            Rational frac(mpz_class(tail), scale);
            frac.canonicalize();
            q += (s[0] == '-') ? -frac : frac;
        }
        return q;
    }

    if (!is_integer_literal(s))
        throw ConfigError("malformed rational literal '" + text + "'");
    return Rational(mpz_class(s));
}

Rational rational_from_double(double x) {
    Rational q;
    mpq_set_d(q.get_mpq_t(), x);
    return q;
}

Rational rational_from_int(std::int64_t n) {
    Rational q;
    mpq_set_si(q.get_mpq_t(), static_cast<long>(n), 1UL);
    return q;
}

std::string rational_to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double rational_to_double(const Rational& q) { return q.get_d(); }

bool has_small_denominator(const Rational& q, unsigned long limit) {
    return mpz_cmp_ui(mpq_denref(q.get_mpq_t()), limit) <= 0;
}

}  // namespace couponmix
