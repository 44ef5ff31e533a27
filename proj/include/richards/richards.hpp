/**
 * @file richards.hpp
 * @brief Umbrella header for the steady-state Richards solver library.
 */

#pragma once

#include "richards/assembly.hpp"
#include "richards/benchmarks.hpp"
#include "richards/constitutive.hpp"
#include "richards/continuation.hpp"
#include "richards/flux.hpp"
#include "richards/line_search.hpp"
#include "richards/linalg.hpp"
#include "richards/mesh.hpp"
#include "richards/mesh_io.hpp"
#include "richards/nonlinear.hpp"
#include "richards/output.hpp"
#include "richards/problem.hpp"
#include "richards/sweep.hpp"
