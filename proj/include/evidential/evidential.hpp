#pragma once

#include "evidential/approx.hpp"
#include "evidential/bpa.hpp"
#include "evidential/errors.hpp"
#include "evidential/focal_set.hpp"
#include "evidential/io.hpp"
#include "evidential/metrics.hpp"
#include "evidential/random.hpp"
#include "evidential/testbed.hpp"
#include "evidential/version.hpp"
