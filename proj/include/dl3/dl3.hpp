#pragma once

/**
 * @file dl3.hpp
 * @brief Umbrella header for the dual Lorentzian geometry library.
 *
 * File formats live in dl3/io.hpp, which additionally needs nlohmann/json
 * (json.hpp) on the include path.
 */

#include "dl3/error.hpp"
#include "dl3/dual.hpp"
#include "dl3/lorentz.hpp"
#include "dl3/dual_lorentz.hpp"
#include "dl3/expr.hpp"
#include "dl3/stencil.hpp"
#include "dl3/parallel.hpp"
#include "dl3/curve.hpp"
#include "dl3/frenet.hpp"
#include "dl3/natural.hpp"
#include "dl3/mannheim.hpp"
