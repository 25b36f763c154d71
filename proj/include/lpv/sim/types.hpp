#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lpv/core/error.hpp"
#include "lpv/core/math.hpp"

namespace lpv::sim {

enum class ScenarioId {
    BallCollision,
    BallDrop,
    BlockSlide,
    PendulumOscillation,
    PyramidImpact,
    ClothDrape,
    ClothWaving,
    DropletFall,
    FaucetFlow,
    RiverFlow,
    MovingShadow,
    OrbitShadow,
};
inline constexpr int kScenarioCount = 12;

enum class Domain { RigidBody, Continuum, Fluid, Optical };

enum class ViolationKind {
    OverRestitution,
    InelasticStick,
    Penetration,
    PhantomForce,
    SizeChange,
    ColorChange,
    Teleport,
    TemporalDisorder,
    HoverNoContact,
    ErraticMotion,
    Jitter,
    RodBreak,
    CasterVanish,
    PathDeviation,
    TimeFreeze,
    FrequencyVariation,
    AntiGravity,
    StreamFragmentation,
    MassCreation,
    MassVanish,
    NegativeViscosity,
    PhaseShift,
    SelfAttraction,
    InvisibleBarrier,
    RigidCloth,
    ImpossibleFold,
    ClothShatter,
    ClothTwist180,
    ClothExplode,
    EnergyAmplify,
    EnergyDamp,
    HoleInStack,
    ShadowInvert,
    ShadowVanish,
    ShadowWithoutCaster,
    ShadowShapeMismatch,
    ShadowTeleport,
};
inline constexpr int kViolationKindCount = 37;

const char* to_string(ScenarioId id);
const char* to_string(Domain d);
const char* to_string(ViolationKind k);
ScenarioId scenario_from_string(const std::string& s);
ViolationKind violation_from_string(const std::string& s);
Domain domain_of(ScenarioId id);

struct CameraPose {
    Vec3 position{0, 2, 6};
    Vec3 look_at{0, 1, 0};
    double vfov_deg = 45.0;
    double near_plane = 0.05;
    double far_plane = 100.0;
};

// Everything the renderer needs to keep a variation's look constant.
struct AppearanceParams {
    std::vector<Vec3> object_colors;
    Vec3 ground_color_a{0.55, 0.55, 0.55};
    Vec3 ground_color_b{0.35, 0.35, 0.35};
    double checker_cell = 0.5; // meters
    int checker_id = 0;        // seeds the checker phase
    Vec3 background{0.72, 0.80, 0.90};
    CameraPose camera;
    Vec3 light_dir{-0.4, -0.8, -0.45};
};

struct ScenarioSpec {
    ScenarioId scenario_id = ScenarioId::BallDrop;
    Domain domain = Domain::RigidBody;
    int frame_count = 16;
    double frame_dt = 1.0 / 24.0;
    int substeps = 8;
    std::map<std::string, double> physics; // scenario-specific parameters
    AppearanceParams appearance;

    double phys(const std::string& key) const {
        auto it = physics.find(key);
        if (it == physics.end()) throw ConfigParseError("missing physics param: " + key);
        return it->second;
    }
    double phys_or(const std::string& key, double fallback) const {
        auto it = physics.find(key);
        return it == physics.end() ? fallback : it->second;
    }
};

enum class ShapeType { Sphere, Box };

struct RigidBodyState {
    ShapeType shape = ShapeType::Sphere;
    Vec3 pos;
    Quat orient;
    Vec3 vel;
    Vec3 angvel;
    Vec3 half_extents{0.1, 0.1, 0.1}; // sphere: x is the radius
    double inv_mass = 1.0;            // 0 = static or scripted
    Vec3 color{0.8, 0.3, 0.2};
    bool visible = true;
    bool casts_shadow = true;

    double radius() const { return half_extents.x; }
    double mass() const { return inv_mass > 0 ? 1.0 / inv_mass : 0.0; }
};

struct ClothState {
    int nx = 0, ny = 0;   // grid vertex counts (topology is fixed)
    double rest = 0.05;   // rest edge length along the grid x direction
    double rest_y = 0.05; // rest edge length along the grid y direction
    std::vector<Vec3> pos;
    std::vector<Vec3> vel;
    std::vector<std::uint8_t> fixed;
    Vec3 color{0.9, 0.45, 0.15};

    int idx(int i, int j) const { return j * nx + i; }
};

struct FluidState {
    std::vector<Vec3> pos;
    std::vector<Vec3> vel;
    double radius = 0.03; // render splat radius
    Vec3 color{0.25, 0.45, 0.9};
};

// Explicit shadow placement for the optical violations; absent in any
// valid trajectory (the renderer projects shadows geometrically).
struct ShadowOverride {
    enum class Mode { Vanish, Mirror, Offset, ShapeSwap };
    Mode mode = Mode::Vanish;
    int body_index = 0;
    Vec3 offset;            // Offset: world-space displacement on the ground
    double stretch = 1.0;   // ShapeSwap: aspect distortion
    double rotate = 0.0;    // ShapeSwap: rotation of the shadow footprint
};

struct SceneState {
    double sim_time = 0.0;
    std::vector<RigidBodyState> bodies;
    std::optional<ClothState> cloth;
    std::optional<FluidState> fluid;
    Vec3 light_dir{-0.4, -0.8, -0.45};
    std::optional<CameraPose> camera_override; // orbit scenarios move the camera
    std::optional<ShadowOverride> shadow_override;
};

struct ImpactEvent {
    int frame = 0;
    int body_a = -1;
    int body_b = -1; // -1 means a static plane
    Vec3 normal;
    double pre_rel_normal_speed = 0;  // closing speed (positive)
    double post_rel_normal_speed = 0; // separation speed (positive)
    Vec3 pre_momentum;
    Vec3 post_momentum;
    double pre_kinetic = 0;
    double post_kinetic = 0;
};

struct ViolationTag {
    ViolationKind kind;
    int onset_frame = 0;
    std::map<std::string, double> params;
};

struct SceneTrajectory {
    ScenarioSpec spec;
    std::vector<SceneState> states;
    std::vector<ImpactEvent> events;
    std::optional<ViolationTag> violation;
    std::uint64_t sim_seed = 0; // the seed this trajectory was produced from

    int frame_count() const { return static_cast<int>(states.size()); }
};

struct PairGroupSpec {
    ScenarioId scenario_id = ScenarioId::BallDrop;
    int variation_index = 0;
    std::uint64_t variation_seed = 0;
    int valid_count = 2;
    std::vector<ViolationKind> violation_kinds;
};

// --- enum <-> string tables ---

namespace detail {
inline constexpr const char* kScenarioNames[kScenarioCount] = {
    "BallCollision", "BallDrop",   "BlockSlide", "PendulumOscillation",
    "PyramidImpact", "ClothDrape", "ClothWaving", "DropletFall",
    "FaucetFlow",    "RiverFlow",  "MovingShadow", "OrbitShadow"};

inline constexpr const char* kDomainNames[4] = {"RigidBody", "Continuum", "Fluid", "Optical"};

inline constexpr const char* kViolationNames[kViolationKindCount] = {
    "OverRestitution", "InelasticStick", "Penetration",  "PhantomForce",
    "SizeChange",      "ColorChange",    "Teleport",     "TemporalDisorder",
    "HoverNoContact",  "ErraticMotion",  "Jitter",       "RodBreak",
    "CasterVanish",    "PathDeviation",  "TimeFreeze",   "FrequencyVariation",
    "AntiGravity",     "StreamFragmentation", "MassCreation", "MassVanish",
    "NegativeViscosity", "PhaseShift",   "SelfAttraction", "InvisibleBarrier",
    "RigidCloth",      "ImpossibleFold", "ClothShatter", "ClothTwist180",
    "ClothExplode",    "EnergyAmplify",  "EnergyDamp",   "HoleInStack",
    "ShadowInvert",    "ShadowVanish",   "ShadowWithoutCaster",
    "ShadowShapeMismatch", "ShadowTeleport"};
} // namespace detail

inline const char* to_string(ScenarioId id) {
    return detail::kScenarioNames[static_cast<int>(id)];
}
inline const char* to_string(Domain d) { return detail::kDomainNames[static_cast<int>(d)]; }
inline const char* to_string(ViolationKind k) {
    return detail::kViolationNames[static_cast<int>(k)];
}

inline ScenarioId scenario_from_string(const std::string& s) {
    for (int i = 0; i < kScenarioCount; ++i)
        if (s == detail::kScenarioNames[i]) return static_cast<ScenarioId>(i);
    throw ConfigParseError("unknown scenario: " + s);
}

inline ViolationKind violation_from_string(const std::string& s) {
    for (int i = 0; i < kViolationKindCount; ++i)
        if (s == detail::kViolationNames[i]) return static_cast<ViolationKind>(i);
    throw ConfigParseError("unknown violation kind: " + s);
}

inline Domain domain_of(ScenarioId id) {
    switch (id) {
        case ScenarioId::BallCollision:
        case ScenarioId::BallDrop:
        case ScenarioId::BlockSlide:
        case ScenarioId::PendulumOscillation:
        case ScenarioId::PyramidImpact: return Domain::RigidBody;
        case ScenarioId::ClothDrape:
        case ScenarioId::ClothWaving: return Domain::Continuum;
        case ScenarioId::DropletFall:
        case ScenarioId::FaucetFlow:
        case ScenarioId::RiverFlow: return Domain::Fluid;
        case ScenarioId::MovingShadow:
        case ScenarioId::OrbitShadow: return Domain::Optical;
    }
    return Domain::RigidBody;
}

} // namespace lpv::sim
