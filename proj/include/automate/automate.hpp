#pragma once

#include "automate/assembly.hpp"
#include "automate/brep.hpp"
#include "automate/brep_io.hpp"
#include "automate/dataset/corpus.hpp"
#include "automate/graph.hpp"
#include "automate/mcf.hpp"
#include "automate/model/sbgcn.hpp"
#include "automate/service/server.hpp"
#include "automate/tessellate.hpp"
#include "automate/train/gradient_oracle.hpp"
#include "automate/train/noisy_oracle.hpp"
#include "automate/train/trainer.hpp"
