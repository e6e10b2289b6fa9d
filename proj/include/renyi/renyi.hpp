#pragma once

// Gaussian-filtered norms of atomic measures, Renyi partition functions, and
// scale schedules.

#include "renyi/dimension.hpp"
#include "renyi/error.hpp"
#include "renyi/filter.hpp"
#include "renyi/kernel.hpp"
#include "renyi/measure.hpp"
#include "renyi/measure_io.hpp"
#include "renyi/partition.hpp"
#include "renyi/schedule.hpp"
#include "renyi/summation.hpp"
