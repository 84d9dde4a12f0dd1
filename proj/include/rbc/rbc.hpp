#pragma once

#include "rbc/binomial_tree.hpp"
#include "rbc/collectives.hpp"
#include "rbc/comm.hpp"
#include "rbc/context_id.hpp"
#include "rbc/ctx_create.hpp"
#include "rbc/errors.hpp"
#include "rbc/group.hpp"
#include "rbc/p2p.hpp"
#include "rbc/request.hpp"
#include "rbc/runner.hpp"
#include "rbc/tag_registry.hpp"
#include "rbc/transport.hpp"
#include "rbc/types.hpp"
