#pragma once

#include "error.hpp"
#include "rational.hpp"
#include "mindex.hpp"
#include "pseries.hpp"
#include "polynomial.hpp"
#include "parse.hpp"
#include "jacobian.hpp"
#include "cramerops.hpp"
#include "recovery.hpp"
#include "radius.hpp"
#include "io.hpp"
#include "job.hpp"
