#pragma once

// Uniform-grid spatial index over grains in Poincare ball coordinates, where
// every hyperbolic ball is an exact Euclidean ball: the image of the ball of
// radius r about a center at hyperbolic distance rho along the unit ray uhat
// has diametrical endpoints tanh((rho +- r)/2) uhat.  Cells partition
// [-1,1]^d; each cell lists the grains whose Euclidean disc bounding box
// meets it, and membership queries finish with the exact Minkowski test.

#include "models.hpp"
#include "point.hpp"
#include "process.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace hypbool {

class GrainIndex {
public:
    explicit GrainIndex(const Realization& real) : real_(&real), d_(real.params.d) {
        res_ = d_ == 2 ? 512 : d_ == 3 ? 64 : d_ == 4 ? 24 : 8;
        long cells = 1;
        for (int i = 0; i < d_; ++i) cells *= res_;
        std::vector<std::array<long, 2 * max_dim>> boxes(real.grains.size());
        std::vector<long> count(std::size_t(cells), 0);
        for (std::size_t g = 0; g < real.grains.size(); ++g) {
            boxes[g] = cell_box(real.grains[g]);
            for_each_cell(boxes[g], [&](long cell) { ++count[std::size_t(cell)]; });
        }
        offsets_.assign(std::size_t(cells) + 1, 0);
        for (long c = 0; c < cells; ++c) offsets_[std::size_t(c) + 1] = offsets_[std::size_t(c)] + count[std::size_t(c)];
        entries_.resize(std::size_t(offsets_.back()));
        std::vector<long> cursor(offsets_.begin(), offsets_.end() - 1);
        for (std::size_t g = 0; g < real.grains.size(); ++g)
            for_each_cell(boxes[g], [&](long cell) { entries_[std::size_t(cursor[std::size_t(cell)]++)] = long(g); });
        cosh_radius_.resize(real.grains.size());
        for (std::size_t g = 0; g < real.grains.size(); ++g) cosh_radius_[g] = std::cosh(real.grains[g].radius);
    }

    // Is z inside some grain other than `skip` (pass -1 to test all grains)?
    bool covered(const Point& z, long skip = -1) const {
        long cell = cell_of(z);
        for (long e = offsets_[std::size_t(cell)]; e < offsets_[std::size_t(cell) + 1]; ++e) {
            long g = entries_[std::size_t(e)];
            if (g == skip) continue;
            if (-mink(z, real_->grains[std::size_t(g)].center) <= cosh_radius_[std::size_t(g)]) return true;
        }
        return false;
    }

private:
    long cell_of(const Point& z) const {
        BallCoords y = to_poincare_ball(z);
        long cell = 0;
        for (int i = 0; i < d_; ++i) {
            long c = long((y[i] + 1.0) * 0.5 * res_);
            c = std::clamp(c, 0L, long(res_) - 1);
            cell = cell * res_ + c;
        }
        return cell;
    }

    std::array<long, 2 * max_dim> cell_box(const Grain& grain) const {
        double rho = dist(base_point(d_), grain.center);
        double lo_t = std::tanh(0.5 * (rho - grain.radius));
        double hi_t = std::tanh(0.5 * (rho + grain.radius));
        double mid = 0.5 * (lo_t + hi_t), rad = 0.5 * (hi_t - lo_t) + 1e-12;
        BallCoords y = to_poincare_ball(grain.center);
        double norm = 0.0;
        for (int i = 0; i < d_; ++i) norm += y[i] * y[i];
        norm = std::sqrt(norm);
        std::array<long, 2 * max_dim> box{};
        for (int i = 0; i < d_; ++i) {
            double c = norm > 1e-300 ? y[i] / norm * mid : 0.0;
            long lo = long((c - rad + 1.0) * 0.5 * res_);
            long hi = long((c + rad + 1.0) * 0.5 * res_);
            box[std::size_t(2 * i)] = std::clamp(lo, 0L, long(res_) - 1);
            box[std::size_t(2 * i + 1)] = std::clamp(hi, 0L, long(res_) - 1);
        }
        return box;
    }

    template <class F>
    void for_each_cell(const std::array<long, 2 * max_dim>& box, F&& f) const {
        std::array<long, max_dim> at{};
        for (int i = 0; i < d_; ++i) at[std::size_t(i)] = box[std::size_t(2 * i)];
        for (;;) {
            long cell = 0;
            for (int i = 0; i < d_; ++i) cell = cell * res_ + at[std::size_t(i)];
            f(cell);
            int i = d_ - 1;
            while (i >= 0 && ++at[std::size_t(i)] > box[std::size_t(2 * i + 1)]) {
                at[std::size_t(i)] = box[std::size_t(2 * i)];
                --i;
            }
            if (i < 0) break;
        }
    }

    const Realization* real_;
    int d_;
    int res_;
    std::vector<long> offsets_;
    std::vector<long> entries_;
    std::vector<double> cosh_radius_;
};

}  // namespace hypbool
