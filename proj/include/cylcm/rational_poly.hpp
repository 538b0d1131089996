#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "cylcm/error.hpp"

namespace cylcm {

using Rational = boost::multiprecision::cpp_rational;

/// Sparse polynomial in V variables with coefficients in K.
///
/// Terms are kept in a std::map keyed by exponent vectors, so the
/// representation is canonical: lexicographic order, no zero coefficients.
template <class K, std::size_t V>
class Poly {
public:
    using Exps = std::array<std::uint16_t, V>;
    using Terms = std::map<Exps, K>;

    Poly() = default;
    Poly(const K& c) {  // NOLINT: constants convert implicitly
        if (c != 0) t_[Exps{}] = c;
    }
    Poly(int c) : Poly(K(c)) {}  // NOLINT

    static Poly var(std::size_t i) {
        Exps e{};
        e[i] = 1;
        Poly p;
        p.t_[e] = K(1);
        return p;
    }
    static Poly term(const K& c, const Exps& e) {
        Poly p;
        if (c != 0) p.t_[e] = c;
        return p;
    }

    const Terms& terms() const { return t_; }
    std::size_t size() const { return t_.size(); }
    bool is_zero() const { return t_.empty(); }

    Poly& operator+=(const Poly& o) {
        for (const auto& [e, c] : o.t_) add(e, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        for (const auto& [e, c] : o.t_) add(e, -c);
        return *this;
    }
    Poly operator-() const {
        Poly p(*this);
        for (auto& [e, c] : p.t_) c = -c;
        return p;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly p;
        for (const auto& [ea, ca] : a.t_)
            for (const auto& [eb, cb] : b.t_) {
                Exps e;
                for (std::size_t i = 0; i < V; ++i) e[i] = ea[i] + eb[i];
                p.add(e, ca * cb);
            }
        return p;
    }
    friend bool operator==(const Poly& a, const Poly& b) { return a.t_ == b.t_; }

    Poly pow(unsigned k) const {
        Poly r(1);
        for (unsigned i = 0; i < k; ++i) r = r * *this;
        return r;
    }

    Poly diff(std::size_t v) const {
        Poly p;
        for (const auto& [e, c] : t_) {
            if (e[v] == 0) continue;
            Exps f = e;
            --f[v];
            p.add(f, c * K(e[v]));
        }
        return p;
    }

    /// Replace variable v by the polynomial q.
    Poly substitute(std::size_t v, const Poly& q) const {
        Poly out;
        std::map<unsigned, Poly> powers;
        for (const auto& [e, c] : t_) {
            Exps f = e;
            unsigned k = f[v];
            f[v] = 0;
            auto it = powers.find(k);
            if (it == powers.end()) it = powers.emplace(k, q.pow(k)).first;
            out += term(c, f) * it->second;
        }
        return out;
    }

    /// Evaluate at a point with entries of any ring T that K converts into.
    template <class T>
    T eval(const std::array<T, V>& x) const {
        T s(0);
        for (const auto& [e, c] : t_) {
            T m = convert<T>(c);
            for (std::size_t i = 0; i < V; ++i)
                for (unsigned k = 0; k < e[i]; ++k) m *= x[i];
            s += m;
        }
        return s;
    }

    /// Multivariate division by a single polynomial in lex order.
    /// For one divisor the remainder vanishes iff the division is exact.
    std::pair<Poly, Poly> divide(const Poly& d) const {
        if (d.is_zero()) fail_pre("polynomial division by zero");
        const auto& [ld, lc] = *d.t_.rbegin();
        Poly q, r, p(*this);
        while (!p.is_zero()) {
            auto [lp, cp] = *p.t_.rbegin();
            bool divides = true;
            for (std::size_t i = 0; i < V; ++i) divides = divides && lp[i] >= ld[i];
            if (divides) {
                Exps e;
                for (std::size_t i = 0; i < V; ++i) e[i] = lp[i] - ld[i];
                Poly t = term(cp / lc, e);
                q += t;
                p -= t * d;
            } else {
                r.add(lp, cp);
                p.t_.erase(lp);
            }
        }
        return {q, r};
    }

    std::string str(const std::array<const char*, V>& names) const {
        if (t_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
            const auto& [e, c] = *it;
            if (!first) os << " + ";
            first = false;
            os << "(" << c << ")";
            for (std::size_t i = 0; i < V; ++i)
                if (e[i]) os << "*" << names[i] << (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
        }
        return os.str();
    }

private:
    template <class T>
    static T convert(const K& c) {
        if constexpr (std::is_same_v<T, K>) return c;
        else return static_cast<T>(c);
    }

    void add(const Exps& e, const K& c) {
        auto it = t_.find(e);
        if (it == t_.end()) {
            if (c != 0) t_.emplace(e, c);
            return;
        }
        it->second += c;
        if (it->second == 0) t_.erase(it);
    }

    Terms t_;
};

namespace detail {

// Base-10 integer; cpp_int alone would read a leading 0 as an octal prefix.
inline boost::multiprecision::cpp_int decimal_int(std::string d) {
    std::size_t lead = (!d.empty() && (d[0] == '-' || d[0] == '+')) ? 1 : 0;
    if (d.size() == lead || d.find_first_not_of("0123456789", lead) != std::string::npos) fail_config("not a decimal integer: '" + d + "'");
    std::size_t nz = d.find_first_not_of('0', lead);
    d.erase(lead, (nz == std::string::npos ? d.size() - 1 : nz) - lead);
    return boost::multiprecision::cpp_int(d);
}

}  // namespace detail

/// Parse "p/q", an integer, or a decimal literal into an exact rational.
inline Rational parse_rational(const std::string& s) {
    try {
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            auto num = detail::decimal_int(s.substr(0, slash)), den = detail::decimal_int(s.substr(slash + 1));
            if (den == 0) fail_config("zero denominator in '" + s + "'");
            return Rational(num, den);
        }
        auto dot = s.find('.');
        if (dot == std::string::npos && s.find_first_of("eE") == std::string::npos)
            return Rational(detail::decimal_int(s));
        if (s.find_first_of("eE") != std::string::npos) fail_config("exponent notation is not exact: '" + s + "'");
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        boost::multiprecision::cpp_int den = 1;
        for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
        return Rational(detail::decimal_int(digits), den);
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        fail_config("not a rational number: '" + s + "'");
    }
}

}  // namespace cylcm
