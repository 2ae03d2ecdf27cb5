#pragma once

// Umbrella header: the whole library in dependency order.

#include "panelblas/mat_view.hpp"
#include "panelblas/panel_mat.hpp"
#include "panelblas/micro_kernel.hpp"
#include "panelblas/gemm.hpp"
#include "panelblas/level3.hpp"
#include "panelblas/factor.hpp"
#include "panelblas/blas.hpp"
#include "panelblas/reference.hpp"
#include "panelblas/matgen.hpp"
#include "panelblas/riccati.hpp"
#include "panelblas/bench.hpp"
