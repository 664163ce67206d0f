#pragma once

// Segmentation-free heart-sound classification toolkit: wavelet denoising,
// Shannon-energy peak features plus an acoustic feature bank, PCA reduction,
// SVM and MLP classifiers, PASCAL-style metrics and experiment protocols.

#include "pcgkit/acoustic.hpp"
#include "pcgkit/audio.hpp"
#include "pcgkit/common.hpp"
#include "pcgkit/config.hpp"
#include "pcgkit/denoise.hpp"
#include "pcgkit/envelope.hpp"
#include "pcgkit/experiment.hpp"
#include "pcgkit/features.hpp"
#include "pcgkit/fft.hpp"
#include "pcgkit/fir.hpp"
#include "pcgkit/manifest.hpp"
#include "pcgkit/metrics.hpp"
#include "pcgkit/mlp.hpp"
#include "pcgkit/reduce.hpp"
#include "pcgkit/rng.hpp"
#include "pcgkit/splits.hpp"
#include "pcgkit/svm.hpp"
#include "pcgkit/synth.hpp"
#include "pcgkit/wavelet.hpp"
