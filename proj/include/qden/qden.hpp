#pragma once

#include "qden/analysis.hpp"
#include "qden/arena.hpp"
#include "qden/contribution.hpp"
#include "qden/errors.hpp"
#include "qden/evolution.hpp"
#include "qden/experiment.hpp"
#include "qden/genome.hpp"
#include "qden/grid_engine.hpp"
#include "qden/metrics.hpp"
#include "qden/plan.hpp"
#include "qden/results.hpp"
#include "qden/rng.hpp"
#include "qden/sampling.hpp"
#include "qden/stats.hpp"
