#include "metacog/rng.hpp"

#include <numeric>
#include <stdexcept>

namespace metacog {

std::vector<std::int64_t> sample_multinomial(Rng& rng, std::int64_t n, std::span<const double> probs) {
    if (n < 0) throw std::invalid_argument("sample_multinomial: negative trial count");
    std::vector<std::int64_t> out(probs.size(), 0);
    double remaining_mass = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw std::invalid_argument("sample_multinomial: negative probability");
        remaining_mass += p;
    }
    std::int64_t remaining = n;
    // Sequential conditional binomials.
    for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
        if (i + 1 == probs.size() || remaining_mass <= 0.0) {
            out[i] = remaining;
            remaining = 0;
            break;
        }
        double q = probs[i] / remaining_mass;
        if (q >= 1.0) {
            out[i] = remaining;
            remaining = 0;
            break;
        }
        if (q > 0.0) {
            std::binomial_distribution<std::int64_t> dist(remaining, q);
            out[i] = dist(rng);
            remaining -= out[i];
        }
        remaining_mass -= probs[i];
    }
    return out;
}

}  // namespace metacog
