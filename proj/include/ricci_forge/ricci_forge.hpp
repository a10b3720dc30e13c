#pragma once

#include "bundlecalc.hpp"
#include "error.hpp"
#include "exprs.hpp"
#include "io.hpp"
#include "lie.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "positivity.hpp"
#include "rational.hpp"
#include "variation.hpp"
#include "warped.hpp"
