#pragma once

#include "errors.hpp"
#include "grid.hpp"
#include "kernel.hpp"
#include "kernels.hpp"
#include "lineshape.hpp"
#include "mb_solver.hpp"
#include "protocol.hpp"
#include "schmidt.hpp"
#include "special.hpp"
#include "study.hpp"
#include "report.hpp"
