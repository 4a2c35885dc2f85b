#pragma once

// Everything except acceptance.hpp and io.hpp (the latter needs nlohmann/json on the include path).

#include "build.hpp"
#include "core.hpp"
#include "delay.hpp"
#include "discretize.hpp"
#include "fft.hpp"
#include "init.hpp"
#include "kernel.hpp"
#include "rng.hpp"
#include "spectral.hpp"
