#pragma once

#include "asplund/errors.hpp"
#include "asplund/image.hpp"
#include "asplund/io.hpp"
#include "asplund/lip.hpp"
#include "asplund/match.hpp"
#include "asplund/metrics.hpp"
#include "asplund/parallel.hpp"
#include "asplund/probe_map.hpp"
#include "asplund/synth.hpp"
