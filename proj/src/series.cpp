#include "bnf/series.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bnf
{

int ExponentPair::exponent(Var v) const
{
    switch (v) {
    case Var::x1:
        return alpha[0];
    case Var::x2:
        return alpha[1];
    case Var::y1:
        return beta[0];
    case Var::y2:
        return beta[1];
    }
    return 0;
}

std::strong_ordering operator<=>(const ExponentPair &a, const ExponentPair &b)
{
    if (auto c = a.degree() <=> b.degree(); c != 0) {
        return c;
    }
    if (auto c = a.alpha <=> b.alpha; c != 0) {
        return c;
    }
    return a.beta <=> b.beta;
}

ExponentPair operator+(const ExponentPair &a, const ExponentPair &b)
{
    return {{a.alpha[0] + b.alpha[0], a.alpha[1] + b.alpha[1]}, {a.beta[0] + b.beta[0], a.beta[1] + b.beta[1]}};
}

std::string to_string(const ExponentPair &e)
{
    return "(" + std::to_string(e.alpha[0]) + "," + std::to_string(e.alpha[1]) + ";" + std::to_string(e.beta[0]) + ","
           + std::to_string(e.beta[1]) + ")";
}

ExponentPair exps(int a1, int a2, int b1, int b2)
{
    return {{a1, a2}, {b1, b2}};
}

namespace
{

using Key = std::uint64_t;

Key pack(const ExponentPair &e)
{
    return (static_cast<Key>(e.alpha[0]) << 48) | (static_cast<Key>(e.alpha[1]) << 32)
           | (static_cast<Key>(e.beta[0]) << 16) | static_cast<Key>(e.beta[1]);
}

ExponentPair unpack(Key k)
{
    return {{static_cast<int>((k >> 48) & 0xffff), static_cast<int>((k >> 32) & 0xffff)},
            {static_cast<int>((k >> 16) & 0xffff), static_cast<int>(k & 0xffff)}};
}

void check_exponent_range(const ExponentPair &e)
{
    for (int v : {e.alpha[0], e.alpha[1], e.beta[0], e.beta[1]}) {
        if (v < 0 || v > 0xffff) {
            throw std::out_of_range("exponent out of range in " + to_string(e));
        }
    }
}

ExponentPair from_var(Var v)
{
    ExponentPair e;
    switch (v) {
    case Var::x1:
        e.alpha[0] = 1;
        break;
    case Var::x2:
        e.alpha[1] = 1;
        break;
    case Var::y1:
        e.beta[0] = 1;
        break;
    case Var::y2:
        e.beta[1] = 1;
        break;
    }
    return e;
}

} // namespace

TruncatedSeries::TruncatedSeries(int order) : order_(order) {}

TruncatedSeries TruncatedSeries::monomial(const ExponentPair &e, GaussianRational c, int order)
{
    TruncatedSeries s(order);
    s.set(e, std::move(c));
    return s;
}

TruncatedSeries TruncatedSeries::variable(Var v, int order)
{
    return monomial(from_var(v), GaussianRational(1), order);
}

TruncatedSeries TruncatedSeries::constant(GaussianRational c, int order)
{
    return monomial(ExponentPair{}, std::move(c), order);
}

GaussianRational TruncatedSeries::coeff(const ExponentPair &e) const
{
    auto it = terms_.find(e);
    return it == terms_.end() ? GaussianRational() : it->second;
}

void TruncatedSeries::set(const ExponentPair &e, GaussianRational c)
{
    check_exponent_range(e);
    if (e.degree() > order_) {
        return;
    }
    if (c.is_zero()) {
        terms_.erase(e);
    } else {
        terms_.insert_or_assign(e, std::move(c));
    }
}

void TruncatedSeries::add_to(const ExponentPair &e, const GaussianRational &c)
{
    check_exponent_range(e);
    if (e.degree() > order_ || c.is_zero()) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) {
            terms_.erase(it);
        }
    }
}

TruncatedSeries TruncatedSeries::with_order(int order) const
{
    TruncatedSeries out(order);
    for (const auto &[e, c] : terms_) {
        if (e.degree() > order) {
            break;
        }
        out.terms_.emplace_hint(out.terms_.end(), e, c);
    }
    return out;
}

int TruncatedSeries::min_degree() const
{
    return terms_.empty() ? -1 : terms_.begin()->first.degree();
}

int TruncatedSeries::max_degree() const
{
    return terms_.empty() ? -1 : terms_.rbegin()->first.degree();
}

bool TruncatedSeries::is_real() const
{
    return std::all_of(terms_.begin(), terms_.end(), [](const auto &t) { return t.second.is_real(); });
}

TruncatedSeries TruncatedSeries::conj() const
{
    TruncatedSeries out(order_);
    for (const auto &[e, c] : terms_) {
        out.terms_.emplace_hint(out.terms_.end(), e, c.conj());
    }
    return out;
}

TruncatedSeries &TruncatedSeries::operator+=(const TruncatedSeries &o)
{
    if (o.order_ < order_) {
        *this = with_order(o.order_);
    }
    for (const auto &[e, c] : o.terms_) {
        add_to(e, c);
    }
    return *this;
}

TruncatedSeries &TruncatedSeries::operator-=(const TruncatedSeries &o)
{
    if (o.order_ < order_) {
        *this = with_order(o.order_);
    }
    for (const auto &[e, c] : o.terms_) {
        add_to(e, -c);
    }
    return *this;
}

TruncatedSeries &TruncatedSeries::operator*=(const GaussianRational &c)
{
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto &t : terms_) {
        t.second *= c;
    }
    return *this;
}

TruncatedSeries add(const TruncatedSeries &a, const TruncatedSeries &b)
{
    TruncatedSeries out = a;
    out += b;
    return out;
}

TruncatedSeries sub(const TruncatedSeries &a, const TruncatedSeries &b)
{
    TruncatedSeries out = a;
    out -= b;
    return out;
}

TruncatedSeries scale(const TruncatedSeries &a, const GaussianRational &c)
{
    TruncatedSeries out = a;
    out *= c;
    return out;
}

TruncatedSeries mul(const TruncatedSeries &a, const TruncatedSeries &b)
{
    return mul(a, b, std::min(a.order(), b.order()));
}

TruncatedSeries mul(const TruncatedSeries &a, const TruncatedSeries &b, int order)
{
    TruncatedSeries out(order);
    if (a.empty() || b.empty()) {
        return out;
    }
    const TruncatedSeries &big = a.size() >= b.size() ? a : b;
    const TruncatedSeries &small = a.size() >= b.size() ? b : a;

    // A single term is a shift; no accumulation needed and the graded order
    // of `big` is preserved.
    if (small.size() == 1) {
        const auto &[se, sc] = *small.terms().begin();
        TruncatedSeries::TermMap terms;
        for (const auto &[e, c] : big.terms()) {
            ExponentPair p = e + se;
            if (p.degree() > order) {
                break;
            }
            terms.emplace_hint(terms.end(), p, c * sc);
        }
        for (auto &[e, c] : terms) {
            out.set(e, std::move(c));
        }
        return out;
    }

    std::unordered_map<Key, GaussianRational> acc;
    acc.reserve(big.size() * 2);
    std::vector<std::pair<ExponentPair, const GaussianRational *>> bt;
    bt.reserve(big.size());
    for (const auto &[e, c] : big.terms()) {
        bt.emplace_back(e, &c);
    }
    for (const auto &[se, sc] : small.terms()) {
        const int room = order - se.degree();
        if (room < 0) {
            break;
        }
        for (const auto &[be, bc] : bt) {
            if (be.degree() > room) {
                break;
            }
            ExponentPair p = se + be;
            check_exponent_range(p);
            acc[pack(p)].add_product(sc, *bc);
        }
    }
    for (auto &[k, c] : acc) {
        if (!c.is_zero()) {
            out.set(unpack(k), std::move(c));
        }
    }
    return out;
}

TruncatedSeries partial_derivative(const TruncatedSeries &a, Var v)
{
    TruncatedSeries out(a.order() - 1);
    for (const auto &[e, c] : a.terms()) {
        const int p = e.exponent(v);
        if (p == 0) {
            continue;
        }
        ExponentPair d = e;
        switch (v) {
        case Var::x1:
            --d.alpha[0];
            break;
        case Var::x2:
            --d.alpha[1];
            break;
        case Var::y1:
            --d.beta[0];
            break;
        case Var::y2:
            --d.beta[1];
            break;
        }
        out.set(d, c * GaussianRational(p));
    }
    return out;
}

TruncatedSeries diagonal_projection(const TruncatedSeries &a)
{
    TruncatedSeries out(a.order());
    for (const auto &[e, c] : a.terms()) {
        if (e.is_diagonal()) {
            out.set(e, c);
        }
    }
    return out;
}

TruncatedSeries off_diagonal_part(const TruncatedSeries &a)
{
    TruncatedSeries out(a.order());
    for (const auto &[e, c] : a.terms()) {
        if (!e.is_diagonal()) {
            out.set(e, c);
        }
    }
    return out;
}

TruncatedSeries degree_slice(const TruncatedSeries &a, int d)
{
    TruncatedSeries out(a.order());
    for (const auto &[e, c] : a.terms()) {
        if (e.degree() == d) {
            out.set(e, c);
        } else if (e.degree() > d) {
            break;
        }
    }
    return out;
}

TruncatedSeries poisson_bracket(const TruncatedSeries &a, const TruncatedSeries &b)
{
    const int order = std::min(a.order(), b.order());
    TruncatedSeries out(order);
    for (int j = 0; j < 2; ++j) {
        const Var x = static_cast<Var>(j);
        const Var y = static_cast<Var>(j + 2);
        out += mul(partial_derivative(a, x), partial_derivative(b, y), order);
        out -= mul(partial_derivative(a, y), partial_derivative(b, x), order);
    }
    return out.with_order(order);
}

TruncatedSeries swap_alpha_beta(const TruncatedSeries &a)
{
    TruncatedSeries out(a.order());
    for (const auto &[e, c] : a.terms()) {
        out.set(e.swapped(), c);
    }
    return out;
}

TruncatedSeries compose(const TruncatedSeries &f, const std::array<TruncatedSeries, 4> &subs, int order)
{
    TruncatedSeries out(order);
    if (f.empty()) {
        return out;
    }

    // powers[v][k] = subs[v]^k, built lazily.
    std::array<std::vector<TruncatedSeries>, 4> powers;
    auto power = [&](int v, int k) -> const TruncatedSeries & {
        auto &table = powers[static_cast<std::size_t>(v)];
        if (table.empty()) {
            table.push_back(TruncatedSeries::constant(GaussianRational(1), order));
        }
        while (static_cast<int>(table.size()) <= k) {
            table.push_back(mul(table.back(), subs[static_cast<std::size_t>(v)], order));
        }
        return table[static_cast<std::size_t>(k)];
    };

    // f = sum_{x-exponent} X-part * (sum_{y-exponent} c * Y-part): one large
    // product per distinct x-exponent, the inner sums are linear.
    std::map<MultiIndex, std::vector<std::pair<MultiIndex, const GaussianRational *>>> groups;
    for (const auto &[e, c] : f.terms()) {
        if (e.degree() > order && subs[0].min_degree() > 0 && subs[1].min_degree() > 0 && subs[2].min_degree() > 0
            && subs[3].min_degree() > 0) {
            continue;
        }
        groups[e.alpha].emplace_back(e.beta, &c);
    }
    std::map<MultiIndex, TruncatedSeries> y_parts;
    auto y_part = [&](const MultiIndex &b) -> const TruncatedSeries & {
        auto it = y_parts.find(b);
        if (it == y_parts.end()) {
            it = y_parts.emplace(b, mul(power(2, b[0]), power(3, b[1]), order)).first;
        }
        return it->second;
    };
    for (const auto &[a, items] : groups) {
        TruncatedSeries inner(order);
        for (const auto &[b, c] : items) {
            const TruncatedSeries &yp = y_part(b);
            for (const auto &[e, yc] : yp.terms()) {
                inner.add_to(e, *c * yc);
            }
        }
        if (inner.empty()) {
            continue;
        }
        out += mul(mul(power(0, a[0]), power(1, a[1]), order), inner, order);
    }
    return out;
}

} // namespace bnf
