#pragma once

#include "primefrac/config.hpp"
#include "primefrac/constants.hpp"
#include "primefrac/convergents.hpp"
#include "primefrac/cup.hpp"
#include "primefrac/errors.hpp"
#include "primefrac/expsum.hpp"
#include "primefrac/factor_table.hpp"
#include "primefrac/fixed_real.hpp"
#include "primefrac/gamma_sums.hpp"
#include "primefrac/nt.hpp"
#include "primefrac/params.hpp"
#include "primefrac/rosser.hpp"
