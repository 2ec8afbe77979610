#pragma once

#include "hens/algebra.hpp"
#include "hens/builtins.hpp"
#include "hens/carnot.hpp"
#include "hens/cc_metric.hpp"
#include "hens/classification.hpp"
#include "hens/coadjoint.hpp"
#include "hens/gh.hpp"
#include "hens/io.hpp"
#include "hens/normal_frame.hpp"
#include "hens/profiles.hpp"
