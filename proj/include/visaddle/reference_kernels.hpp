#pragma once

// Plain single-threaded twins of the OpenMP sample-mean kernels. They
// accumulate left to right with no chunking, so they double as an
// independent summation-order check in the tests and as the serial side of
// the benchmark comparison.

#include "visaddle/models.hpp"
#include "visaddle/regularization.hpp"

namespace visaddle::reference {

GanLoss gan_loss_and_grads(const Discriminator& D, const Generator& G,
                           const ParameterPoint& w, const SampleSet& samples,
                           Link link);

PenaltyEval sgp_penalty(double gamma, const Discriminator& D, const Generator& G,
                        const ParameterPoint& w, const SampleSet& samples);

Matrix gramian(const Discriminator& D, const Generator& G,
               const ParameterPoint& w, const SampleSet& samples);

}  // namespace visaddle::reference
