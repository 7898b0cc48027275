#pragma once

#include "fracvol/core.hpp"
#include "fracvol/hypergeometric.hpp"
#include "fracvol/fbm.hpp"
#include "fracvol/rng.hpp"
#include "fracvol/dynamics.hpp"
#include "fracvol/malliavin.hpp"
#include "fracvol/pricing.hpp"
#include "fracvol/config.hpp"
#include "fracvol/verify.hpp"
