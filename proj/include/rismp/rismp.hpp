#pragma once

// Umbrella header for the rismp library: a physically consistent multiport
// network model of RIS-aided wireless links.

#include "rismp/blocks.hpp"
#include "rismp/convert.hpp"
#include "rismp/errors.hpp"
#include "rismp/optimize.hpp"
#include "rismp/radiator.hpp"
#include "rismp/rng.hpp"
#include "rismp/scenario_io.hpp"
#include "rismp/termination.hpp"
#include "rismp/transfer.hpp"
#include "rismp/warnings.hpp"
#include "rismp/waves.hpp"
