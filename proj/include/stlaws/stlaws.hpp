#pragma once

#include "stlaws/errors.hpp"
#include "stlaws/arith.hpp"
#include "stlaws/charsums.hpp"
#include "stlaws/parallel.hpp"
#include "stlaws/curves.hpp"
#include "stlaws/surfaces.hpp"
#include "stlaws/quadrature.hpp"
#include "stlaws/measures.hpp"
#include "stlaws/approx.hpp"
#include "stlaws/census.hpp"
