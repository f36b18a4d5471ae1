#pragma once

#include "fpm/model.hpp"
#include "fpm/solve.hpp"

#include <optional>
#include <vector>

namespace fpm {

// Local frame with x^1 along the crack (or segment) direction.
struct CrackFrame {
    Vec2 origin;
    Vec2 e1;

    Vec2 e2() const { return Vec2(-e1.y(), e1.x()); }
};

// Rectangular integration contour centered at frame.origin, extending
// half_len along e1 and half_wid along e2.
struct ContourRect {
    CrackFrame frame;
    double half_len = 0.0;
    double half_wid = 0.0;
};

struct SifPair {
    double KI = 0.0;
    double KII = 0.0;
    ContourRect contour;
};

struct BerRecord {
    int segment = -1;
    double value = 0.0;          // penalty_term + flux_term + w_jump_term
    double penalty_term = 0.0;   // -eta/h_e * int [du/dx^1].[u]
    double flux_term = 0.0;      //  int {n.sigma}.[du/dx^1]
    double w_jump_term = 0.0;    // -int [W n^1]; identically zero when x^1
                                 // is aligned with the segment
};

// Crack tips: canonical vertices incident to exactly one released internal
// segment and at least one uncracked one.
std::vector<int> crack_tips(const Partition& partition, const CrackState& crack);

// Releases one internal segment: both faces become traction free, supports of
// points that could see across it are recomputed, and the global matrix is
// patched in place (DoF count never changes). Throws on double release.
// `step` and `value` are recorded in the crack history.
void release_segment(Workspace& ws, int segment, int step = 0, double value = 0.0);

// Average normal traction across an uncracked internal segment
// (the paper's per-segment "hoop stress").
double segment_hoop_traction(const FieldSolution& sol, const Partition& partition,
                             const std::vector<ShapeSet>& shapes,
                             const MaterialModel& material, int segment);

// Among the uncracked internal segments incident to the tip vertex, the one
// with the largest hoop traction (ties: lowest id). Empty when the tip has
// arrested.
std::optional<int> propagate_max_hoop(const FieldSolution& sol, const Partition& partition,
                                      const std::vector<ShapeSet>& shapes,
                                      const MaterialModel& material,
                                      const CrackState& crack, int tip_vertex);

double j_integral(const FieldSolution& sol, const Partition& partition,
                  const std::vector<ShapeSet>& shapes, const MaterialModel& material,
                  const std::vector<std::uint8_t>& released, const ContourRect& contour);

// Mode separation via the interaction integral with the near-tip auxiliary
// fields; K = Ebar/2 * M per mode.
SifPair interaction_integral_sifs(const FieldSolution& sol, const Partition& partition,
                                  const std::vector<ShapeSet>& shapes,
                                  const MaterialModel& material,
                                  const std::vector<std::uint8_t>& released,
                                  const ContourRect& contour);

// Bonding energy rate of one uncracked internal segment, with x^1 along the
// supplied direction. Linear trials only.
BerRecord ber(const FieldSolution& sol, const Partition& partition,
              const std::vector<ShapeSet>& shapes, const MaterialModel& material,
              double eta, int segment, const Vec2& e1);

// Near-tip auxiliary fields in the crack frame (unit stress intensity).
struct AuxState {
    Eigen::Vector3d stress;     // (s11, s22, s12) in the crack frame
    Eigen::Vector3d strain;     // (e11, e22, 2 e12)
    Vec2 du_dx1;                // (du1/dx^1, du2/dx^1)
};
AuxState mode1_aux(double r, double theta, const MaterialModel& material);
AuxState mode2_aux(double r, double theta, const MaterialModel& material);

enum class CriterionKind { MaxHoop, HoopInitiation, BerInitiation };

struct Criterion {
    CriterionKind kind = CriterionKind::MaxHoop;
    double threshold = 1.0;
};

enum class LoadProgramKind { Ramp, Constant };

struct DriveStep {
    int step = 0;
    double scale = 1.0;
    std::vector<CrackEvent> events;
    FieldSolution solution;
};

struct DriveResult {
    std::vector<DriveStep> steps;
    bool disconnected = false;
    std::string message;
};

// Quasi-static stepping: scale loads, solve, evaluate the criterion, release
// (all super-threshold segments for initiation criteria, the per-tip
// maximizer for max-hoop), patch K, repeat. Terminates early with a
// disconnection report when a release sequence makes the system singular.
DriveResult quasi_static_drive(Workspace& ws, const Criterion& criterion, int max_steps,
                               LoadProgramKind program = LoadProgramKind::Ramp);

} // namespace fpm
