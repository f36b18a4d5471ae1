#pragma once

#include "fpm/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fpm {

// Closed-form displacement/stress pair used to impose BCs and measure errors.
// Samplers throw outside the validity region.
struct AnalyticField {
    std::function<Vec2(const Vec2&)> displacement;
    std::function<Eigen::Vector3d(const Vec2&)> stress;   // (s11, s22, s12)

    ExactField exact() const { return {displacement, stress}; }
};

AnalyticField patch_field(double E, double nu);
AnalyticField cantilever_field(double P, double E, double nu, double H, double L);
AnalyticField ring_field(double a, double b, double p, double E, double nu);
AnalyticField hole_field(double a, double p, double E, double nu);
// Tip-local frame: origin at the tip, crack along theta = +-pi.
AnalyticField mode1_field(double KI, double E, double nu, PlaneState state);

// Deterministic PRNG so "random" point sets are reproducible bit for bit.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

std::vector<Vec2> grid_points(const Vec2& lo, const Vec2& hi, int nx, int ny);
// dart-throwing scatter strictly inside the polygon with a minimum spacing
// fraction of the ideal uniform spacing
std::vector<Vec2> scatter_points(const Polygon& poly, int n, std::uint64_t seed,
                                 double min_dist_factor = 0.55);

struct BenchmarkOptions {
    std::string points;            // "NxM" grid or "N" count, benchmark-specific
    std::uint64_t seed = 20240817ULL;
    double nu = -1.0;              // override when >= 0
    double eta = -1.0;             // absolute override when > 0
    double beta_deg = 15.0;        // oblique pre-crack angle from the x1 axis
    bool traction_control = false; // square-hole plate loading mode
};

struct FractureSetup {
    Vec2 tip;
    Vec2 direction;
};

struct Benchmark {
    Model model;
    std::optional<FractureSetup> fracture;
    // named scalar observables (stress concentration factor, corner deflection)
    std::vector<std::pair<std::string, std::function<double(const FieldSolution&)>>> metrics;
};

// Registry: patch, cantilever, ring_quarter, hole_quarter, mode1_square,
// mixed_mode_plate, cook, square_hole_quarter, oblique_crack_plate.
Benchmark build_benchmark(const std::string& name, const BenchmarkOptions& opt);

std::vector<std::string> benchmark_names();

} // namespace fpm
