#pragma once

// Umbrella header: the full library.

#include "fvqe/core.hpp"
#include "fvqe/encodings.hpp"
#include "fvqe/statevector.hpp"
#include "fvqe/iqp.hpp"
#include "fvqe/classical.hpp"
#include "fvqe/trace.hpp"
#include "fvqe/io.hpp"
#include "fvqe/engine.hpp"
#include "fvqe/baselines.hpp"
#include "fvqe/instance_gen.hpp"
#include "fvqe/harness.hpp"
