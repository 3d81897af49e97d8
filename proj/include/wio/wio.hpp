#pragma once

#include <wio/conditions.hpp>
#include <wio/corner.hpp>
#include <wio/errors.hpp>
#include <wio/grid.hpp>
#include <wio/kernels.hpp>
#include <wio/operator.hpp>
#include <wio/spaces.hpp>
#include <wio/sweep.hpp>
