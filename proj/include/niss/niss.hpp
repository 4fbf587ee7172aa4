#pragma once

#include "niss/distribution.hpp"
#include "niss/errors.hpp"
#include "niss/feasibility.hpp"
#include "niss/fourier.hpp"
#include "niss/quantum.hpp"
#include "niss/rng.hpp"
#include "niss/serialize.hpp"
#include "niss/sim.hpp"
#include "niss/synthesis.hpp"
