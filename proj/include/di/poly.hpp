// Multivariate polynomials over an exact field, with pluggable monomial
// orders. Terms are kept sorted descending by the ring's order, so the
// leading term is always terms().front().
#pragma once

#include <di/field.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace di {

enum class OrderKind { degrevlex, lex, deglex };

inline std::string order_name(OrderKind k) {
    switch (k) {
        case OrderKind::degrevlex: return "degrevlex";
        case OrderKind::lex: return "lex";
        case OrderKind::deglex: return "deglex";
    }
    return "?";
}

// Exponent vector; length equals the ring arity.
using Monomial = std::vector<int>;

inline int total_degree(const Monomial& m) {
    return std::accumulate(m.begin(), m.end(), 0);
}

// Strict total multiplicative order with 1 minimal. Returns <0, 0, >0.
inline int monomial_compare(const Monomial& a, const Monomial& b, OrderKind ord) {
    if (a.size() != b.size())
        throw std::invalid_argument("monomial arity mismatch");
    const int da = total_degree(a), db = total_degree(b);
    switch (ord) {
        case OrderKind::degrevlex: {
            if (da != db) return da < db ? -1 : 1;
            // revlex tie-break: last differing exponent, smaller wins
            for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i)
                if (a[i] != b[i]) return a[i] > b[i] ? -1 : 1;
            return 0;
        }
        case OrderKind::deglex:
            if (da != db) return da < db ? -1 : 1;
            [[fallthrough]];
        case OrderKind::lex: {
            for (size_t i = 0; i < a.size(); ++i)
                if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
            return 0;
        }
    }
    return 0;
}

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline bool mono_divides(const Monomial& a, const Monomial& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

inline Monomial mono_div(const Monomial& a, const Monomial& b) {
    Monomial r(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        r[i] = a[i] - b[i];
        if (r[i] < 0) throw std::domain_error("monomial division with remainder");
    }
    return r;
}

inline Monomial mono_lcm(const Monomial& a, const Monomial& b) {
    Monomial r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
    return r;
}

inline bool mono_coprime(const Monomial& a, const Monomial& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > 0 && b[i] > 0) return false;
    return true;
}

// The ambient polynomial ring: variable names, coefficient field, default
// monomial order. Shared immutably by every value built over it.
struct PolyRing {
    std::vector<std::string> vars;
    long characteristic = 0;  // 0 = Q, otherwise an odd prime
    OrderKind order = OrderKind::degrevlex;

    PolyRing(std::vector<std::string> v, long ch = 0,
             OrderKind ord = OrderKind::degrevlex)
        : vars(std::move(v)), characteristic(ch), order(ord) {
        for (size_t i = 0; i < vars.size(); ++i)
            for (size_t j = i + 1; j < vars.size(); ++j)
                if (vars[i] == vars[j])
                    throw std::invalid_argument("duplicate variable name " + vars[i]);
    }

    size_t arity() const { return vars.size(); }

    int var_index(const std::string& name) const {
        for (size_t i = 0; i < vars.size(); ++i)
            if (vars[i] == name) return static_cast<int>(i);
        return -1;
    }
};

using RingPtr = std::shared_ptr<const PolyRing>;

inline RingPtr make_ring(std::vector<std::string> vars, long characteristic = 0,
                         OrderKind ord = OrderKind::degrevlex) {
    return std::make_shared<const PolyRing>(std::move(vars), characteristic, ord);
}

inline bool same_ring(const RingPtr& a, const RingPtr& b) {
    if (a == b) return true;
    return a && b && a->vars == b->vars && a->characteristic == b->characteristic &&
           a->order == b->order;
}

class Polynomial {
public:
    using Term = std::pair<Monomial, Coeff>;

    Polynomial() = default;
    explicit Polynomial(RingPtr ring) : ring_(std::move(ring)) {}

    static Polynomial zero(const RingPtr& ring) { return Polynomial(ring); }

    static Polynomial constant(const RingPtr& ring, const Coeff& c) {
        Polynomial p(ring);
        if (!c.is_zero()) p.terms_.push_back({Monomial(ring->arity(), 0), c});
        return p;
    }

    static Polynomial constant(const RingPtr& ring, long v) {
        return constant(ring, Coeff::from_int(ring->characteristic, v));
    }

    static Polynomial variable(const RingPtr& ring, int idx, int power = 1) {
        Polynomial p(ring);
        Monomial m(ring->arity(), 0);
        m[idx] = power;
        p.terms_.push_back({std::move(m), Coeff::one(ring->characteristic)});
        return p;
    }

    static Polynomial term(const RingPtr& ring, Monomial m, const Coeff& c) {
        Polynomial p(ring);
        if (!c.is_zero()) p.terms_.push_back({std::move(m), c});
        return p;
    }

    const RingPtr& ring() const { return ring_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        return terms_.empty() ||
               (terms_.size() == 1 && total_degree(terms_[0].first) == 0);
    }

    const Monomial& leading_monomial() const {
        require_nonzero();
        return terms_.front().first;
    }
    const Coeff& leading_coeff() const {
        require_nonzero();
        return terms_.front().second;
    }

    int degree() const {
        int d = -1;
        for (auto& t : terms_) d = std::max(d, total_degree(t.first));
        return d;
    }

    Coeff constant_term() const {
        for (auto& t : terms_)
            if (total_degree(t.first) == 0) return t.second;
        return Coeff::zero(ring_->characteristic);
    }

    Polynomial operator-() const {
        Polynomial r(ring_);
        r.terms_.reserve(terms_.size());
        for (auto& t : terms_) r.terms_.push_back({t.first, -t.second});
        return r;
    }

    Polynomial operator+(const Polynomial& o) const {
        check_ring(o);
        Polynomial r(ring_);
        // merge of two descending-sorted term lists
        size_t i = 0, j = 0;
        while (i < terms_.size() || j < o.terms_.size()) {
            if (i == terms_.size()) { r.terms_.push_back(o.terms_[j++]); continue; }
            if (j == o.terms_.size()) { r.terms_.push_back(terms_[i++]); continue; }
            int c = monomial_compare(terms_[i].first, o.terms_[j].first, ring_->order);
            if (c > 0) r.terms_.push_back(terms_[i++]);
            else if (c < 0) r.terms_.push_back(o.terms_[j++]);
            else {
                Coeff s = terms_[i].second + o.terms_[j].second;
                if (!s.is_zero()) r.terms_.push_back({terms_[i].first, s});
                ++i; ++j;
            }
        }
        return r;
    }

    Polynomial operator-(const Polynomial& o) const { return *this + (-o); }

    Polynomial operator*(const Polynomial& o) const {
        check_ring(o);
        std::map<Monomial, Coeff, MonoLess> acc{MonoLess{ring_->order}};
        for (auto& a : terms_)
            for (auto& b : o.terms_) {
                Monomial m = mono_mul(a.first, b.first);
                Coeff c = a.second * b.second;
                auto it = acc.find(m);
                if (it == acc.end()) acc.emplace(std::move(m), c);
                else {
                    it->second = it->second + c;
                    if (it->second.is_zero()) acc.erase(it);
                }
            }
        Polynomial r(ring_);
        r.terms_.reserve(acc.size());
        for (auto it = acc.rbegin(); it != acc.rend(); ++it)
            r.terms_.push_back({it->first, it->second});
        return r;
    }

    Polynomial scaled(const Coeff& c) const {
        Polynomial r(ring_);
        if (c.is_zero()) return r;
        r.terms_.reserve(terms_.size());
        for (auto& t : terms_) r.terms_.push_back({t.first, t.second * c});
        return r;
    }

    Polynomial mono_scaled(const Monomial& m, const Coeff& c) const {
        Polynomial r(ring_);
        if (c.is_zero()) return r;
        r.terms_.reserve(terms_.size());
        for (auto& t : terms_) r.terms_.push_back({mono_mul(t.first, m), t.second * c});
        return r;
    }

    Polynomial derivative(int var) const {
        Polynomial r(ring_);
        std::map<Monomial, Coeff, MonoLess> acc{MonoLess{ring_->order}};
        for (auto& t : terms_) {
            if (t.first[var] == 0) continue;
            Monomial m = t.first;
            Coeff c = t.second * Coeff::from_int(ring_->characteristic, m[var]);
            m[var] -= 1;
            if (!c.is_zero()) acc.emplace(std::move(m), c);
        }
        for (auto it = acc.rbegin(); it != acc.rend(); ++it)
            r.terms_.push_back({it->first, it->second});
        return r;
    }

    // Substitute 0 for every variable in `kill` (given as indices).
    Polynomial kill_variables(const std::vector<int>& kill) const {
        std::vector<char> dead(ring_->arity(), 0);
        for (int v : kill) dead[v] = 1;
        Polynomial r(ring_);
        for (auto& t : terms_) {
            bool survives = true;
            for (size_t i = 0; i < dead.size(); ++i)
                if (dead[i] && t.first[i] > 0) { survives = false; break; }
            if (survives) r.terms_.push_back(t);
        }
        return r;
    }

    // Full evaluation at a point of the coefficient field.
    Coeff eval(const std::vector<Coeff>& point) const {
        Coeff acc = Coeff::zero(ring_->characteristic);
        for (auto& t : terms_) {
            Coeff v = t.second;
            for (size_t i = 0; i < point.size(); ++i)
                for (int e = 0; e < t.first[i]; ++e) v = v * point[i];
            acc = acc + v;
        }
        return acc;
    }

    bool operator==(const Polynomial& o) const {
        if (!same_ring(ring_, o.ring_)) return false;
        if (terms_.size() != o.terms_.size()) return false;
        for (size_t i = 0; i < terms_.size(); ++i)
            if (terms_[i].first != o.terms_[i].first ||
                terms_[i].second != o.terms_[i].second)
                return false;
        return true;
    }
    bool operator!=(const Polynomial& o) const { return !(*this == o); }

    // Canonical text form; parse(str(p)) reproduces the identical term map.
    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto& t : terms_) {
            std::string c = t.second.str();
            bool neg = !c.empty() && c[0] == '-';
            if (first) {
                if (neg) { os << "-"; c = c.substr(1); }
            } else {
                os << (neg ? " - " : " + ");
                if (neg) c = c.substr(1);
            }
            first = false;
            bool has_vars = total_degree(t.first) > 0;
            if (!has_vars || c != "1") {
                os << c;
                if (has_vars) os << "*";
            }
            bool star = false;
            for (size_t i = 0; i < t.first.size(); ++i) {
                if (t.first[i] == 0) continue;
                if (star) os << "*";
                star = true;
                os << ring_->vars[i];
                if (t.first[i] > 1) os << "^" << t.first[i];
            }
        }
        return os.str();
    }

private:
    struct MonoLess {
        OrderKind ord;
        bool operator()(const Monomial& a, const Monomial& b) const {
            return monomial_compare(a, b, ord) < 0;
        }
    };

    void require_nonzero() const {
        if (terms_.empty()) throw std::domain_error("zero polynomial has no leading term");
    }

    void check_ring(const Polynomial& o) const {
        if (!same_ring(ring_, o.ring_))
            throw std::invalid_argument("polynomial ring mismatch");
    }

    RingPtr ring_;
    std::vector<Term> terms_;  // descending by ring order
};

// ---------------------------------------------------------------------------
// Parser for the text syntax `3*x^2*y - 1/2*z + 4`.

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

class PolyParser {
public:
    PolyParser(const std::string& s, RingPtr ring)
        : s_(s), ring_(std::move(ring)) {}

    Polynomial parse() {
        Polynomial p = expr();
        skip_ws();
        if (pos_ != s_.size())
            throw ParseError("trailing input at position " + std::to_string(pos_));
        return p;
    }

private:
    Polynomial expr() {
        Polynomial acc = Polynomial::zero(ring_);
        bool neg = false;
        skip_ws();
        if (peek() == '+' || peek() == '-') neg = get() == '-';
        acc = acc + (neg ? -product() : product());
        while (true) {
            skip_ws();
            char c = peek();
            if (c != '+' && c != '-') break;
            get();
            Polynomial t = product();
            acc = acc + (c == '-' ? -t : t);
        }
        return acc;
    }

    Polynomial product() {
        Polynomial acc = factor();
        while (true) {
            skip_ws();
            if (peek() != '*') break;
            get();
            acc = acc * factor();
        }
        return acc;
    }

    Polynomial factor() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            get();
            Polynomial p = expr();
            skip_ws();
            if (get() != ')') throw ParseError("expected ')'");
            return maybe_power(p);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return maybe_power(number());
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return maybe_power(variable());
        throw ParseError(std::string("unexpected character '") + c + "'");
    }

    Polynomial maybe_power(Polynomial base) {
        skip_ws();
        if (peek() != '^') return base;
        get();
        skip_ws();
        std::string digits;
        while (std::isdigit(static_cast<unsigned char>(peek()))) digits += get();
        if (digits.empty()) throw ParseError("expected exponent");
        int e = std::stoi(digits);
        Polynomial acc = Polynomial::constant(ring_, 1);
        for (int i = 0; i < e; ++i) acc = acc * base;
        return acc;
    }

    Polynomial number() {
        std::string num;
        while (std::isdigit(static_cast<unsigned char>(peek()))) num += get();
        skip_ws();
        if (peek() == '/') {
            size_t save = pos_;
            get();
            skip_ws();
            std::string den;
            while (std::isdigit(static_cast<unsigned char>(peek()))) den += get();
            if (den.empty()) { pos_ = save; }
            else {
                if (ring_->characteristic == 0)
                    return Polynomial::constant(
                        ring_, Coeff::rational(mpq_class(num + "/" + den)));
                Coeff n = parse_int_coeff(num), d = parse_int_coeff(den);
                return Polynomial::constant(ring_, n / d);
            }
        }
        return Polynomial::constant(ring_, parse_int_coeff(num));
    }

    Coeff parse_int_coeff(const std::string& digits) {
        if (ring_->characteristic == 0)
            return Coeff::rational(mpq_class(digits));
        long p = ring_->characteristic;
        long acc = 0;
        for (char c : digits) acc = (acc * 10 + (c - '0')) % p;
        return Coeff::mod_p(p, acc);
    }

    Polynomial variable() {
        std::string name;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
            name += get();
        int idx = ring_->var_index(name);
        if (idx < 0) throw ParseError("unknown variable '" + name + "'");
        return Polynomial::variable(ring_, idx);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    char get() {
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input");
        return s_[pos_++];
    }

    const std::string& s_;
    RingPtr ring_;
    size_t pos_ = 0;
};

}  // namespace detail

inline Polynomial parse_poly(const std::string& text, const RingPtr& ring) {
    return detail::PolyParser(text, ring).parse();
}

}  // namespace di
