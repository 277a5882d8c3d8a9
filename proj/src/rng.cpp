#include "umda/rng.hpp"

#include "umda/error.hpp"

namespace umda {

bool Pcg32::bernoulli(double p) {
  require(p >= 0.0 && p <= 1.0, "bernoulli: probability outside [0, 1]");
  return uniform01() < p;
}

}  // namespace umda
