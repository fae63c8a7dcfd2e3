#pragma once

#include "otkit/barycenter.hpp"
#include "otkit/gaussian_mixture.hpp"
#include "otkit/geometry.hpp"
#include "otkit/lowrank.hpp"
#include "otkit/problems.hpp"
#include "otkit/quadratic.hpp"
#include "otkit/reference.hpp"
#include "otkit/sinkhorn.hpp"
#include "otkit/soft_sort.hpp"
