#pragma once

#include <httplib.h>

#include "tca/service/service.hpp"

namespace tca {

/// Registers the console and ingestion routes. `simulated` enables POST /clock/advance.
/// When the study has an operator token, every request must carry it in X-Operator-Token.
void install_routes(httplib::Server& server, StudyService& service, SimulatedClock* simulated);

}  // namespace tca
