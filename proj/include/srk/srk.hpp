#ifndef SRK_SRK_HPP
#define SRK_SRK_HPP

#include "srk/arch.hpp"
#include "srk/bounds.hpp"
#include "srk/error.hpp"
#include "srk/numeric.hpp"
#include "srk/planner.hpp"
#include "srk/poly.hpp"
#include "srk/seprank.hpp"
#include "srk/verify.hpp"

#endif  // SRK_SRK_HPP
