#pragma once

#include "svcalc/cdss.hpp"
#include "svcalc/core_matrix.hpp"
#include "svcalc/function_dsl.hpp"
#include "svcalc/io.hpp"
#include "svcalc/scalar_functions.hpp"
#include "svcalc/svfc.hpp"
#include "svcalc/verifier.hpp"
