#pragma once

#include "config.hpp"
#include "core_model.hpp"
#include "driver.hpp"
#include "dynamics.hpp"
#include "emit.hpp"
#include "errors.hpp"
#include "exact_spectrum.hpp"
#include "fitting.hpp"
#include "parallel.hpp"
#include "perturbative.hpp"
#include "scan.hpp"
#include "special_fn.hpp"
