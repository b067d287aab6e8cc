#ifndef BNF_SERIES_IO_HPP
#define BNF_SERIES_IO_HPP

#include "bnf/series.hpp"

#include <json.hpp>

#include <string>

namespace bnf
{

// Interchange format:
//   { "order": Ω, "terms": [ { "alpha": [a1,a2], "beta": [b1,b2],
//                              "re": "p/q", "im": "p/q" }, ... ] }
// Terms are written in graded-lex order; readers accept any order.
nlohmann::json series_to_json(const TruncatedSeries &s);
TruncatedSeries series_from_json(const nlohmann::json &j);

std::string dump_series(const TruncatedSeries &s);
TruncatedSeries parse_series(const std::string &text);

nlohmann::json gaussian_to_json(const GaussianRational &z);
GaussianRational gaussian_from_json(const nlohmann::json &j);

nlohmann::json exponent_to_json(const ExponentPair &e);

// Canonical text of a json document: two-space indent, trailing newline.
std::string dump_canonical(const nlohmann::json &j);

} // namespace bnf

#endif
