#pragma once

#include "scer/analysis.hpp"
#include "scer/attack.hpp"
#include "scer/calibration.hpp"
#include "scer/campaign.hpp"
#include "scer/channel.hpp"
#include "scer/config_io.hpp"
#include "scer/csv.hpp"
#include "scer/detector.hpp"
#include "scer/parallel.hpp"
#include "scer/random.hpp"
#include "scer/scenario.hpp"
#include "scer/simulator.hpp"
#include "scer/stats.hpp"
#include "scer/threshold_file.hpp"
#include "scer/waveform.hpp"
