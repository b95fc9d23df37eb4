#pragma once

// Umbrella header for the library (JSON/DOT emission lives in emit.hpp).

#include "ptrunk/arith.hpp"
#include "ptrunk/error.hpp"
#include "ptrunk/parse.hpp"
#include "ptrunk/poincare.hpp"
#include "ptrunk/polynomial.hpp"
#include "ptrunk/series.hpp"
#include "ptrunk/solutions.hpp"
#include "ptrunk/trunk.hpp"
