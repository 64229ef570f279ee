#pragma once

#include "sepbell/errors.hpp"
#include "sepbell/operators.hpp"
#include "sepbell/oracles.hpp"
#include "sepbell/pairings.hpp"
#include "sepbell/serialize.hpp"
#include "sepbell/states.hpp"
#include "sepbell/types.hpp"
#include "sepbell/verify.hpp"
#include "sepbell/witnesses.hpp"
