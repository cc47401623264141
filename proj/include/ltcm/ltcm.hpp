#pragma once

#include "ltcm/cda.hpp"
#include "ltcm/config.hpp"
#include "ltcm/cycles.hpp"
#include "ltcm/errors.hpp"
#include "ltcm/formula.hpp"
#include "ltcm/fppoly.hpp"
#include "ltcm/integrate.hpp"
#include "ltcm/irreducible.hpp"
#include "ltcm/linalg.hpp"
#include "ltcm/matrix.hpp"
#include "ltcm/orbital.hpp"
#include "ltcm/parallel.hpp"
#include "ltcm/poly.hpp"
#include "ltcm/quadext.hpp"
#include "ltcm/rational.hpp"
#include "ltcm/report.hpp"
#include "ltcm/rng.hpp"
#include "ltcm/scalar.hpp"
#include "ltcm/tower.hpp"
