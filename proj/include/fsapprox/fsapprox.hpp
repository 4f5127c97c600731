#pragma once

// Umbrella header: grammars in, finite-state approximations out.

#include "fsapprox/apsg.hpp"
#include "fsapprox/decompose.hpp"
#include "fsapprox/errors.hpp"
#include "fsapprox/flatten.hpp"
#include "fsapprox/fsa.hpp"
#include "fsapprox/grammar.hpp"
#include "fsapprox/lr0.hpp"
#include "fsapprox/oracle.hpp"
#include "fsapprox/unfold.hpp"
