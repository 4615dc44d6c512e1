#pragma once

#include "mhl/cluster_ops.hpp"
#include "mhl/dot.hpp"
#include "mhl/errors.hpp"
#include "mhl/hypgen.hpp"
#include "mhl/ids.hpp"
#include "mhl/model.hpp"
#include "mhl/oracle.hpp"
#include "mhl/pruning.hpp"
#include "mhl/store.hpp"
#include "mhl/validate.hpp"
#include "mhl/world.hpp"
