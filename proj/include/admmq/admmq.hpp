#pragma once

#include "admmq/rng.hpp"
#include "admmq/discrete_sets.hpp"
#include "admmq/objectives.hpp"
#include "admmq/solvers.hpp"
#include "admmq/analysis.hpp"
#include "admmq/experiments.hpp"
