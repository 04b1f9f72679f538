#pragma once
// Umbrella header: the whole library.

#include "gapkit/decompose.hpp"
#include "gapkit/errors.hpp"
#include "gapkit/experiment.hpp"
#include "gapkit/fp.hpp"
#include "gapkit/gap.hpp"
#include "gapkit/instances.hpp"
#include "gapkit/int_math.hpp"
#include "gapkit/int_matrix.hpp"
#include "gapkit/int_poly.hpp"
#include "gapkit/json_io.hpp"
#include "gapkit/matrix_ring.hpp"
#include "gapkit/oracles.hpp"
#include "gapkit/recovery.hpp"
#include "gapkit/rng.hpp"
