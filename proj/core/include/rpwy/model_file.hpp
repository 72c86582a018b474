#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rpwy/spin_model.hpp"

namespace rpwy {

// Model files are JSON objects:
//
//   {
//     "nuclei": [ {"a": 1.0, "site": "donor"}, {"a": 0.4, "site": "acceptor"} ],
//     "J": 0.0,
//     "kappa_st": 0.5,
//     "k": 1.0
//   }
//
// Every key is optional (defaults: no nuclei, J = 0, kappa_st = 0, k = 1; a nucleus defaults
// to site "donor"). A nucleus may carry "spin", which must be 0.5. Unknown keys are rejected.

RadicalPairModel parse_model(std::string_view text);
RadicalPairModel load_model_file(const std::filesystem::path& path);
std::string format_model(const RadicalPairModel& model);

}  // namespace rpwy
