#ifndef PPKM_PPKM_HPP
#define PPKM_PPKM_HPP

#include "ppkm/dataset.hpp"
#include "ppkm/date.hpp"
#include "ppkm/error.hpp"
#include "ppkm/estimation.hpp"
#include "ppkm/model.hpp"
#include "ppkm/policy.hpp"
#include "ppkm/reproduction.hpp"

#endif
