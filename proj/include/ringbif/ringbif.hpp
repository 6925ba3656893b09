#pragma once

// Umbrella header. serialize.hpp additionally needs the vendored json.hpp.

#include "ringbif/errors.hpp"
#include "ringbif/sums.hpp"
#include "ringbif/system.hpp"
#include "ringbif/potentials.hpp"
#include "ringbif/symmetry.hpp"
#include "ringbif/bifurcation.hpp"
#include "ringbif/continuation.hpp"
#include "ringbif/checks.hpp"
#include "ringbif/serialize.hpp"
