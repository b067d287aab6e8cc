#include "bnf/canonical_transform.hpp"

#include "bnf/errors.hpp"

#include <algorithm>

namespace bnf
{

namespace
{

constexpr std::array<Var, 4> kVars{Var::x1, Var::x2, Var::y1, Var::y2};

TruncatedSeries var(Var v, int order)
{
    return TruncatedSeries::variable(v, order);
}

} // namespace

GeneratingFunction::GeneratingFunction() : series_(TruncatedSeries(3)) {}

GeneratingFunction::GeneratingFunction(TruncatedSeries series, int min_degree)
    : series_(std::move(series)), min_degree_(min_degree)
{
    if (min_degree_ <= 2) {
        throw InvalidGeneratingFunction("generating function must start at degree >= 3 (got "
                                        + std::to_string(min_degree_) + ")");
    }
    if (!series_.empty() && series_.min_degree() < min_degree_) {
        throw InvalidGeneratingFunction("term " + to_string(series_.terms().begin()->first)
                                        + " lies below the declared minimum degree "
                                        + std::to_string(min_degree_));
    }
}

GeneratingFunction::GeneratingFunction(TruncatedSeries series)
    : GeneratingFunction(series, series.empty() ? 3 : series.min_degree())
{
}

MixedMapSolution solve_mixed_map(const GeneratingFunction &s, int order)
{
    MixedMapSolution sol;
    sol.order = order;
    const std::array<TruncatedSeries, 2> xhat{var(Var::x1, order), var(Var::x2, order)};
    const std::array<TruncatedSeries, 2> yhat{var(Var::y1, order), var(Var::y2, order)};
    sol.x_of = xhat;
    sol.y_of = yhat;
    if (s.series().empty()) {
        return sol;
    }

    const std::array<TruncatedSeries, 2> s_y{partial_derivative(s.series(), Var::y1),
                                             partial_derivative(s.series(), Var::y2)};
    const std::array<TruncatedSeries, 2> s_x{partial_derivative(s.series(), Var::x1),
                                             partial_derivative(s.series(), Var::x2)};

    // Each pass fixes at least one more degree of x; order - d + 2 passes
    // always reach the fixed point.
    const int max_passes = std::max(1, order - s.min_degree() + 2);
    for (int pass = 0; pass < max_passes; ++pass) {
        const std::array<TruncatedSeries, 4> at{sol.x_of[0], sol.x_of[1], yhat[0], yhat[1]};
        std::array<TruncatedSeries, 2> next{xhat[0] + compose(s_y[0], at, order), xhat[1] + compose(s_y[1], at, order)};
        const bool settled = next == sol.x_of;
        sol.x_of = std::move(next);
        if (settled) {
            break;
        }
    }
    const std::array<TruncatedSeries, 4> at{sol.x_of[0], sol.x_of[1], yhat[0], yhat[1]};
    for (int j = 0; j < 2; ++j) {
        sol.y_of[j] = yhat[j] - compose(s_x[j], at, order);
    }
    return sol;
}

std::array<TruncatedSeries, 4> forward_map(const GeneratingFunction &s, int order)
{
    std::array<TruncatedSeries, 4> id{var(Var::x1, order), var(Var::x2, order), var(Var::y1, order),
                                      var(Var::y2, order)};
    if (s.series().empty()) {
        return id;
    }
    const std::array<TruncatedSeries, 2> s_y{partial_derivative(s.series(), Var::y1),
                                             partial_derivative(s.series(), Var::y2)};
    const std::array<TruncatedSeries, 2> s_x{partial_derivative(s.series(), Var::x1),
                                             partial_derivative(s.series(), Var::x2)};
    std::array<TruncatedSeries, 2> yh{id[2], id[3]};
    const int max_passes = std::max(1, order - s.min_degree() + 2);
    for (int pass = 0; pass < max_passes; ++pass) {
        const std::array<TruncatedSeries, 4> at{id[0], id[1], yh[0], yh[1]};
        std::array<TruncatedSeries, 2> next{id[2] + compose(s_x[0], at, order), id[3] + compose(s_x[1], at, order)};
        const bool settled = next == yh;
        yh = std::move(next);
        if (settled) {
            break;
        }
    }
    const std::array<TruncatedSeries, 4> at{id[0], id[1], yh[0], yh[1]};
    return {id[0] - compose(s_y[0], at, order), id[1] - compose(s_y[1], at, order), yh[0], yh[1]};
}

TruncatedSeries pushforward(const TruncatedSeries &h, const GeneratingFunction &s, int order)
{
    if (s.series().empty()) {
        return h.with_order(order);
    }
    const MixedMapSolution sol = solve_mixed_map(s, order);
    return compose(h, sol.coordinates(), order);
}

bool canonical_relations_hold(const std::array<TruncatedSeries, 4> &coords, int order)
{
    const int check = order - 1;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            TruncatedSeries b = poisson_bracket(coords[i].with_order(order), coords[j].with_order(order)).with_order(check);
            // {q_k, p_k} = 1, every other pair commutes.
            if (i < 2 && j == i + 2) {
                b.add_to(ExponentPair{}, GaussianRational(-1));
            }
            if (!b.empty()) {
                return false;
            }
        }
    }
    return true;
}

bool canonicity_check(const GeneratingFunction &s, int order)
{
    return canonical_relations_hold(forward_map(s, order), order);
}

bool canonicity_check(const MixedMapSolution &m)
{
    return canonical_relations_hold(m.coordinates(), m.order);
}

GaussianRational determinant(const LinearSubstitution::Matrix &m)
{
    auto a = m;
    GaussianRational det(1);
    for (std::size_t col = 0; col < 4; ++col) {
        std::size_t pivot = col;
        while (pivot < 4 && a[pivot][col].is_zero()) {
            ++pivot;
        }
        if (pivot == 4) {
            return GaussianRational(0);
        }
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (std::size_t r = col + 1; r < 4; ++r) {
            if (a[r][col].is_zero()) {
                continue;
            }
            const GaussianRational f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < 4; ++c) {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    return det;
}

LinearSubstitution::LinearSubstitution(Matrix m) : m_(std::move(m)), det_(bnf::determinant(m_))
{
    if (det_.is_zero()) {
        throw SingularSubstitution("linear substitution has zero determinant");
    }
}

LinearSubstitution LinearSubstitution::identity()
{
    Matrix m;
    for (std::size_t i = 0; i < 4; ++i) {
        m[i][i] = GaussianRational(1);
    }
    return LinearSubstitution(m);
}

LinearSubstitution LinearSubstitution::complexification()
{
    const GaussianRational one(1);
    const GaussianRational i = GaussianRational::i();
    Matrix m;
    // x_j = ξ_j + iη_j, y_j = ξ_j - iη_j
    for (std::size_t j = 0; j < 2; ++j) {
        m[j][j] = one;
        m[j][j + 2] = i;
        m[j + 2][j] = one;
        m[j + 2][j + 2] = -i;
    }
    return LinearSubstitution(m);
}

TruncatedSeries apply_linear(const TruncatedSeries &h, const LinearSubstitution &l)
{
    const int order = h.order();
    std::array<TruncatedSeries, 4> subs;
    for (std::size_t r = 0; r < 4; ++r) {
        subs[r] = TruncatedSeries(order);
        for (std::size_t c = 0; c < 4; ++c) {
            subs[r] += scale(var(kVars[c], order), l.matrix()[r][c]);
        }
    }
    return compose(h, subs, order);
}

} // namespace bnf
