#pragma once

// Umbrella header for the library. The CLI lives in fracwave/cli.hpp and is not included here.

#include "fracwave/errors.hpp"
#include "fracwave/quadrature.hpp"
#include "fracwave/specfun.hpp"
#include "fracwave/wright.hpp"
#include "fracwave/kernels.hpp"
#include "fracwave/symbols.hpp"
#include "fracwave/mellin.hpp"
#include "fracwave/green.hpp"
#include "fracwave/oracle.hpp"
#include "fracwave/csv.hpp"
#include "fracwave/validate.hpp"
