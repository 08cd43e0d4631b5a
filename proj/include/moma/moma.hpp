#pragma once

#include "moma/errors.hpp"
#include "moma/random.hpp"
#include "moma/genome.hpp"
#include "moma/objectives.hpp"
#include "moma/problem.hpp"
#include "moma/weights.hpp"
#include "moma/moea.hpp"
#include "moma/rank1.hpp"
#include "moma/localsearch.hpp"
#include "moma/problems.hpp"
#include "moma/metrics.hpp"
#include "moma/parallel.hpp"
#include "moma/engine.hpp"
#include "moma/config.hpp"
#include "moma/cli.hpp"
