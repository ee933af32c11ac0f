#pragma once

#include "hitsm/detail/json.hpp"
#include "hitsm/model.hpp"

#include <string>

namespace hitsm {

// Monomials may be strings ("1/2 * e^2") or objects ({"a": "1/2", "b": 2}).
Monomial monomial_from_json(const nlohmann::json& j);
nlohmann::json monomial_to_json(const Monomial& m);  // object form with string fields

// {"num": [...], "den": [...]}; "den" defaults to 1. A bare monomial is accepted too.
ComparableFn cf_from_json(const nlohmann::json& j);
nlohmann::json cf_to_json(const ComparableFn& f);

SemiMarkovModel parse_model(const std::string& text);
SemiMarkovModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const SemiMarkovModel& m);
std::string serialize_model(const SemiMarkovModel& m);

SemiMarkovModel load_model(const std::string& path);  // throws std::ios_base::failure on I/O

bool models_equal(const SemiMarkovModel& a, const SemiMarkovModel& b);

}  // namespace hitsm
