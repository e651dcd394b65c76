#pragma once

#include "chokepoint/adversary.hpp"
#include "chokepoint/algorithms.hpp"
#include "chokepoint/audit.hpp"
#include "chokepoint/bits.hpp"
#include "chokepoint/formulas.hpp"
#include "chokepoint/instance.hpp"
#include "chokepoint/model.hpp"
#include "chokepoint/search.hpp"
#include "chokepoint/serialize.hpp"
