#include "stereopipe/census.hpp"

#include <stdexcept>

#include "stereopipe/parallel.hpp"

namespace stereopipe {

CensusImage census_transform(const GrayImage& img, int threads) {
    if (img.width < 5 || img.height < 5)
        throw std::invalid_argument("census_transform: image must be at least 5x5");

    const int w = img.width;
    const int h = img.height;
    CensusImage out(w, h);

    auto transform_row = [&](int y) {
        const bool y_interior = y >= 2 && y < h - 2;
        for (int x = 0; x < w; ++x) {
            const std::uint8_t center = img.at(x, y);
            std::uint32_t mask = 0;
            if (y_interior && x >= 2 && x < w - 2) {
                // Interior: no border reads, unrolled window walk.
                const std::uint8_t* p = &img.data[static_cast<std::size_t>(y - 2) * w + (x - 2)];
                int k = 0;
                for (int dy = 0; dy < 5; ++dy, p += w) {
                    for (int dx = 0; dx < 5; ++dx) {
                        if (dy == 2 && dx == 2) continue;
                        if (p[dx] < center) mask |= 1u << k;
                        ++k;
                    }
                }
            } else {
                int k = 0;
                for (int dy = -2; dy <= 2; ++dy) {
                    for (int dx = -2; dx <= 2; ++dx) {
                        if (dy == 0 && dx == 0) continue;
                        int nx = x + dx, ny = y + dy;
                        std::uint8_t v = (nx >= 0 && nx < w && ny >= 0 && ny < h)
                                             ? img.at(nx, ny)
                                             : std::uint8_t{0};
                        if (v < center) mask |= 1u << k;
                        ++k;
                    }
                }
            }
            out.data[static_cast<std::size_t>(y) * w + x] = mask;
        }
    };

    parallel_for(0, h, threads, transform_row);
    return out;
}

}  // namespace stereopipe
