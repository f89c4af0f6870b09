#pragma once

#include "fastrd/core.hpp"
#include "fastrd/sine_transform.hpp"
#include "fastrd/stepper.hpp"
#include "fastrd/filter.hpp"
#include "fastrd/shift.hpp"
#include "fastrd/postprocess.hpp"
#include "fastrd/ddm.hpp"
#include "fastrd/solver1d.hpp"
#include "fastrd/solver2d.hpp"
#include "fastrd/bench.hpp"
#include "fastrd/config.hpp"
#include "fastrd/runner.hpp"
#include "fastrd/selftest.hpp"
