#pragma once

#include "fpm/assembly.hpp"
#include "fpm/solve.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace fpm {

struct ExtraConstraint {
    int point = -1;
    int comp = 0;
    double value = 0.0;   // scaled by the load factor like every other BC
};

struct CrackEvent {
    int step = 0;
    int segment = -1;
    double value = 0.0;
};

struct CrackState {
    std::vector<std::uint8_t> released;   // per internal segment
    std::vector<CrackEvent> history;

    int n_released() const {
        int n = 0;
        for (auto r : released) n += r != 0;
        return n;
    }
};

// A ready-to-run problem: partition with BCs, material, penalty, optional
// exact field for error reporting, optional pre-existing cracks given as
// polyline pieces (internal segments whose generator pair straddles a piece
// are released before the first solve).
struct Model {
    std::string name;
    Partition partition;
    MaterialModel material;
    double eta = 1.0;
    std::vector<ExtraConstraint> extra_constraints;
    std::optional<ExactField> exact;
    std::vector<std::array<Vec2, 2>> precracks;
    Vec2 body_force{0.0, 0.0};
    double h_char = 0.0;   // characteristic point spacing
};

// Mutable solver state for one model: shapes, cached stiffness blocks, the
// global matrix (patched incrementally on crack releases), crack state.
struct Workspace {
    const Model* model = nullptr;
    ApproxConfig cfg;
    SolverKind solver = SolverKind::Direct;
    std::vector<ShapeSet> shapes;
    AssemblyCache cache;
    GlobalSystem system;
    CrackState crack;

    Workspace(const Model& m, const ApproxConfig& approx,
              SolverKind solve_kind = SolverKind::Direct);

    const Partition& partition() const { return model->partition; }

    // full reassembly honoring the current crack state
    void rebuild();

    std::vector<Constraint> constraints_at(double scale) const;
    FieldSolution solve(double scale = 1.0);
};

// Internal segments whose generator pair straddles the polyline piece.
std::vector<int> segments_on_crack(const Partition& partition,
                                   const std::array<Vec2, 2>& piece);

} // namespace fpm
