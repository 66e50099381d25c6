#pragma once

// Umbrella header for the solver library. The command-line layer
// (gib/cli.hpp) is separate because it pulls in the JSON and CLI parsers.

#include "gib/encoder.hpp"
#include "gib/errors.hpp"
#include "gib/frontier.hpp"
#include "gib/gaussian_model.hpp"
#include "gib/ib_solver.hpp"
#include "gib/info_measures.hpp"
#include "gib/measure.hpp"
#include "gib/oracle.hpp"
#include "gib/tolerances.hpp"
