#pragma once

#include "cim/baselines.hpp"
#include "cim/channel.hpp"
#include "cim/codebook.hpp"
#include "cim/filters.hpp"
#include "cim/image.hpp"
#include "cim/metrics.hpp"
#include "cim/modem.hpp"
#include "cim/receiver.hpp"
#include "cim/simkit.hpp"
