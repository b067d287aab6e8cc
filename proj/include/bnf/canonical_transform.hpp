#ifndef BNF_CANONICAL_TRANSFORM_HPP
#define BNF_CANONICAL_TRANSFORM_HPP

#include "bnf/series.hpp"

#include <array>
#include <utility>

namespace bnf
{

// S(x, ŷ): alpha holds the powers of x, beta the powers of ŷ. Defines the
// symplectic map (x, y) -> (x̂, ŷ) through
//     x̂_j = x_j - S_{ŷ_j}(x, ŷ),   ŷ_j = y_j + S_{x_j}(x, ŷ).
class GeneratingFunction
{
public:
    // The zero generating function (identity map).
    GeneratingFunction();
    // Throws InvalidGeneratingFunction if min_degree < 3 or a term of
    // degree < min_degree is present.
    GeneratingFunction(TruncatedSeries series, int min_degree);
    // min_degree taken from the lowest term present (3 for the zero series).
    explicit GeneratingFunction(TruncatedSeries series);

    const TruncatedSeries &series() const { return series_; }
    int min_degree() const { return min_degree_; }

private:
    TruncatedSeries series_;
    int min_degree_ = 3;
};

// Old coordinates as series in the new ones: x_j(x̂, ŷ), y_j(x̂, ŷ).
struct MixedMapSolution {
    std::array<TruncatedSeries, 2> x_of;
    std::array<TruncatedSeries, 2> y_of;
    int order = 0;

    // (x1, x2, y1, y2) ready for compose().
    std::array<TruncatedSeries, 4> coordinates() const { return {x_of[0], x_of[1], y_of[0], y_of[1]}; }
};

// Solves x = x̂ + S_ŷ(x, ŷ) by graded fixed-point iteration, then sets
// y = ŷ - S_x(x, ŷ). Exact through `order` provided S is known through
// order + 1.
MixedMapSolution solve_mixed_map(const GeneratingFunction &s, int order);

// The forward map x̂(x, y), ŷ(x, y): iterates ŷ = y + S_x(x, ŷ) and then
// x̂ = x - S_ŷ(x, ŷ).
std::array<TruncatedSeries, 4> forward_map(const GeneratingFunction &s, int order);

// ĥ = h ∘ φ^{-1}: substitutes x(x̂, ŷ), y(x̂, ŷ) into h, through `order`.
TruncatedSeries pushforward(const TruncatedSeries &h, const GeneratingFunction &s, int order);

// Canonical relations {q_i, q_j} = 0, {p_i, p_j} = 0, {q_i, p_j} = δ_ij
// through degree order - 1 for coordinates (q1, q2, p1, p2).
bool canonical_relations_hold(const std::array<TruncatedSeries, 4> &coords, int order);

// Brackets of x̂, ŷ in the original variables.
bool canonicity_check(const GeneratingFunction &s, int order);

// Brackets of x(x̂, ŷ), y(x̂, ŷ) in the new variables.
bool canonicity_check(const MixedMapSolution &m);

// v = M w: row i of the matrix gives old variable i as a linear form in the
// new variables (w1, w2, w3, w4) occupying the (x1, x2, y1, y2) slots.
class LinearSubstitution
{
public:
    using Matrix = std::array<std::array<GaussianRational, 4>, 4>;

    // Throws SingularSubstitution when det(M) == 0.
    explicit LinearSubstitution(Matrix m);

    static LinearSubstitution identity();
    // (x, y) = (ξ + iη, ξ - iη), with ξ in the x-slots and η in the y-slots.
    static LinearSubstitution complexification();

    const Matrix &matrix() const { return m_; }
    const GaussianRational &determinant() const { return det_; }

private:
    Matrix m_;
    GaussianRational det_;
};

GaussianRational determinant(const LinearSubstitution::Matrix &m);

TruncatedSeries apply_linear(const TruncatedSeries &h, const LinearSubstitution &l);

} // namespace bnf

#endif
