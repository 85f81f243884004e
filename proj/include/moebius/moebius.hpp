#pragma once

#include "moebius/closure.hpp"
#include "moebius/diophantine.hpp"
#include "moebius/error.hpp"
#include "moebius/expansion.hpp"
#include "moebius/generators.hpp"
#include "moebius/identities.hpp"
#include "moebius/io.hpp"
#include "moebius/ladder.hpp"
#include "moebius/mat2.hpp"
#include "moebius/orbit.hpp"
#include "moebius/projective.hpp"
#include "moebius/scalar.hpp"
#include "moebius/synthesis.hpp"
#include "moebius/systems.hpp"
#include "moebius/wide_float.hpp"
#include "moebius/word.hpp"
