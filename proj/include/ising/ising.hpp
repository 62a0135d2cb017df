#pragma once

// Ising antiferromagnet on random regular graphs: closed-form thresholds and
// bounds, the zero-temperature interpolation functional, pairing-model graph
// machinery, Glauber dynamics, and tree broadcasting.

#include "ising/analytic.hpp"
#include "ising/broadcast.hpp"
#include "ising/dynamics.hpp"
#include "ising/graphs.hpp"
#include "ising/interpolation.hpp"
#include "ising/numeric.hpp"
#include "ising/parallel.hpp"
#include "ising/rng.hpp"
