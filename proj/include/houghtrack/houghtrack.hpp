#pragma once

// Umbrella header for the structured Hough voting line tracker.

#include "houghtrack/baselines.hpp"
#include "houghtrack/bench.hpp"
#include "houghtrack/detector.hpp"
#include "houghtrack/errors.hpp"
#include "houghtrack/features.hpp"
#include "houghtrack/image.hpp"
#include "houghtrack/inference.hpp"
#include "houghtrack/integral.hpp"
#include "houghtrack/io.hpp"
#include "houghtrack/learning.hpp"
#include "houghtrack/line.hpp"
#include "houghtrack/metrics.hpp"
#include "houghtrack/params.hpp"
#include "houghtrack/potentials.hpp"
#include "houghtrack/rng.hpp"
#include "houghtrack/simulation.hpp"
#include "houghtrack/voting.hpp"
