#pragma once

#include "bdm/errors.hpp"
#include "bdm/field_oracle.hpp"
#include "bdm/gamma.hpp"
#include "bdm/mass.hpp"
#include "bdm/partitions.hpp"
#include "bdm/rational.hpp"
#include "bdm/simulate.hpp"
#include "bdm/state.hpp"
#include "bdm/verify.hpp"
