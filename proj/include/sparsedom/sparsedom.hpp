#pragma once

#include "sparsedom/base.hpp"
#include "sparsedom/domination.hpp"
#include "sparsedom/dyadic.hpp"
#include "sparsedom/exponents.hpp"
#include "sparsedom/fft.hpp"
#include "sparsedom/grid.hpp"
#include "sparsedom/harness.hpp"
#include "sparsedom/operators.hpp"
#include "sparsedom/sparse.hpp"
#include "sparsedom/special.hpp"
#include "sparsedom/weights.hpp"
