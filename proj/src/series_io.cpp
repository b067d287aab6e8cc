#include "bnf/series_io.hpp"

#include "bnf/errors.hpp"

namespace bnf
{

using nlohmann::json;

namespace
{

MultiIndex read_index(const json &j, const char *name)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        throw ParseError(std::string("'") + name + "' must be an array of two integers");
    }
    MultiIndex m{j[0].get<int>(), j[1].get<int>()};
    if (m[0] < 0 || m[1] < 0) {
        throw ParseError(std::string("negative exponent in '") + name + "'");
    }
    return m;
}

Rational read_rational(const json &j, const char *name)
{
    if (!j.is_string()) {
        throw ParseError(std::string("'") + name + "' must be a \"p/q\" string");
    }
    return parse_rational(j.get<std::string>());
}

} // namespace

json exponent_to_json(const ExponentPair &e)
{
    return json{{"alpha", {e.alpha[0], e.alpha[1]}}, {"beta", {e.beta[0], e.beta[1]}}};
}

json gaussian_to_json(const GaussianRational &z)
{
    if (z.is_real()) {
        return to_string(z.re());
    }
    return json{{"re", to_string(z.re())}, {"im", to_string(z.im())}};
}

GaussianRational gaussian_from_json(const json &j)
{
    if (j.is_string()) {
        return GaussianRational(parse_rational(j.get<std::string>()));
    }
    if (j.is_object() && j.contains("re")) {
        Rational re = read_rational(j.at("re"), "re");
        Rational im = j.contains("im") ? read_rational(j.at("im"), "im") : Rational(0);
        return {re, im};
    }
    throw ParseError("expected a rational string or {re, im} object");
}

json series_to_json(const TruncatedSeries &s)
{
    json terms = json::array();
    for (const auto &[e, c] : s.terms()) {
        json t = exponent_to_json(e);
        t["re"] = to_string(c.re());
        t["im"] = to_string(c.im());
        terms.push_back(std::move(t));
    }
    return json{{"order", s.order()}, {"terms", std::move(terms)}};
}

TruncatedSeries series_from_json(const json &j)
{
    if (!j.is_object() || !j.contains("order") || !j.contains("terms")) {
        throw ParseError("series object needs 'order' and 'terms'");
    }
    if (!j.at("order").is_number_integer() || j.at("order").get<int>() < 0) {
        throw ParseError("'order' must be a non-negative integer");
    }
    if (!j.at("terms").is_array()) {
        throw ParseError("'terms' must be an array");
    }
    TruncatedSeries s(j.at("order").get<int>());
    for (const auto &t : j.at("terms")) {
        if (!t.is_object() || !t.contains("alpha") || !t.contains("beta") || !t.contains("re")) {
            throw ParseError("term needs 'alpha', 'beta' and 're'");
        }
        ExponentPair e{read_index(t.at("alpha"), "alpha"), read_index(t.at("beta"), "beta")};
        if (e.degree() > s.order()) {
            throw ParseError("term " + to_string(e) + " exceeds the series order");
        }
        if (s.terms().count(e) != 0) {
            throw ParseError("duplicate term " + to_string(e));
        }
        Rational re = read_rational(t.at("re"), "re");
        Rational im = t.contains("im") ? read_rational(t.at("im"), "im") : Rational(0);
        s.set(e, GaussianRational(re, im));
    }
    return s;
}

std::string dump_canonical(const json &j)
{
    return j.dump(2) + "\n";
}

std::string dump_series(const TruncatedSeries &s)
{
    return dump_canonical(series_to_json(s));
}

TruncatedSeries parse_series(const std::string &text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &err) {
        throw ParseError(std::string("malformed JSON: ") + err.what());
    }
    return series_from_json(j);
}

} // namespace bnf
