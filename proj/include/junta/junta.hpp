#pragma once

#include "junta/core.hpp"
#include "junta/oracle.hpp"
#include "junta/designs.hpp"
#include "junta/bcf.hpp"
#include "junta/cache.hpp"
#include "junta/io.hpp"
#include "junta/nonadaptive.hpp"
#include "junta/adaptive.hpp"
#include "junta/bench.hpp"
