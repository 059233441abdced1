#pragma once

// Umbrella header: mixed discriminants, matrix-tuple scaling, and certified
// log-scale bounds.

#include "mixdisc/errors.hpp"
#include "mixdisc/matrix.hpp"
#include "mixdisc/linalg.hpp"
#include "mixdisc/rng.hpp"
#include "mixdisc/tuple.hpp"
#include "mixdisc/exact.hpp"
#include "mixdisc/scaling.hpp"
#include "mixdisc/estimator.hpp"
