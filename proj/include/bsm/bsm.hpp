#pragma once

#include "bsm/error.hpp"
#include "bsm/instance.hpp"
#include "bsm/io.hpp"
#include "bsm/gs.hpp"
#include "bsm/oracle.hpp"
#include "bsm/kernel.hpp"
#include "bsm/fpt.hpp"
#include "bsm/hardness.hpp"
#include "bsm/generate.hpp"
