#include "ddsim/distribution.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace ddsim {

double DistributionVector::total() const {
    return std::accumulate(mass.begin(), mass.end(), 0.0) + deficit;
}

double DistributionVector::mean() const {
    double s = 0.0;
    for (size_t j = 0; j < mass.size(); ++j) s += j * mass[j];
    return s;
}

DistributionVector DistributionVector::point(int k, int K) {
    if (k < 0 || k > K) throw ValidationError("distribution: point mass outside 0..K");
    DistributionVector d;
    d.mass.assign(K + 1, 0.0);
    d.mass[k] = 1.0;
    return d;
}

void DistributionVector::check(double tol) const {
    for (double x : mass)
        if (x < -1e-12) throw ValidationError("distribution: negative mass entry");
    double t = total();
    if (std::fabs(t - 1.0) > tol) {
        std::ostringstream os;
        os << "distribution: mass + deficit = " << t << " deviates from 1";
        throw ValidationError(os.str());
    }
}

}  // namespace ddsim
