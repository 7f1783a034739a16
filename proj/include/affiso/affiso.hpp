#pragma once

#include "affiso/affine_surface.hpp"
#include "affiso/error.hpp"
#include "affiso/families.hpp"
#include "affiso/functionals.hpp"
#include "affiso/hermite.hpp"
#include "affiso/inequalities.hpp"
#include "affiso/quadrature/integrate.hpp"
