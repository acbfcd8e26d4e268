#pragma once

// Umbrella header for the opspec library.

#include "opspec/errors.hpp"
#include "opspec/hilbert.hpp"
#include "opspec/boundary.hpp"
#include "opspec/analytic.hpp"
#include "opspec/discrete.hpp"
#include "opspec/multipoint.hpp"
#include "opspec/config.hpp"
#include "opspec/report.hpp"
