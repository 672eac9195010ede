#pragma once

#include "symcert/action.hpp"
#include "symcert/certifier.hpp"
#include "symcert/dataset.hpp"
#include "symcert/errors.hpp"
#include "symcert/group.hpp"
#include "symcert/io.hpp"
#include "symcert/representation.hpp"
#include "symcert/table.hpp"
#include "symcert/world.hpp"
