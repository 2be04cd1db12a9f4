#include "rnsift/image.hpp"

#include <algorithm>
#include <cmath>

namespace rnsift {

double Image::min() const {
    return pixels_.empty() ? 0.0 : *std::min_element(pixels_.begin(), pixels_.end());
}

double Image::max() const {
    return pixels_.empty() ? 0.0 : *std::max_element(pixels_.begin(), pixels_.end());
}

Image Image::decimate(int step) const {
    if (step <= 0) throw std::domain_error("decimate: step must be positive");
    const int w = (width_ + step - 1) / step;
    const int h = (height_ + step - 1) / step;
    Image out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.at(x, y) = at(x * step, y * step);
    return out;
}

bool Image::all_finite_nonnegative() const {
    return std::all_of(pixels_.begin(), pixels_.end(),
                       [](double p) { return std::isfinite(p) && p >= 0.0; });
}

} // namespace rnsift
