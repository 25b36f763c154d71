#pragma once

#include <stdexcept>
#include <string>

namespace lpv {

// Error categories map onto the CLI exit-code contract:
//   usage/config -> 1, data -> 2, numerical -> 3.
enum class ErrorKind { Config = 1, Data = 2, Numerical = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

#define LPV_DEFINE_ERROR(NAME, KIND)                                        \
    class NAME : public Error {                                             \
    public:                                                                 \
        explicit NAME(std::string msg = #NAME)                              \
            : Error(ErrorKind::KIND, std::move(msg)) {}                     \
    }

LPV_DEFINE_ERROR(ConfigParseError, Config);
LPV_DEFINE_ERROR(InvalidScheduleParams, Config);
LPV_DEFINE_ERROR(InvalidArchitecture, Config);
LPV_DEFINE_ERROR(InapplicableViolation, Config);
LPV_DEFINE_ERROR(OnsetOutOfRange, Config);
LPV_DEFINE_ERROR(UnsupportedConditioning, Config);
LPV_DEFINE_ERROR(LengthMismatch, Config);
LPV_DEFINE_ERROR(AllTied, Config);
LPV_DEFINE_ERROR(InsufficientData, Config);
LPV_DEFINE_ERROR(EmptyGroup, Config);
LPV_DEFINE_ERROR(EmptyTrainingSet, Config);
LPV_DEFINE_ERROR(MissingTaxonomyEntry, Config);

LPV_DEFINE_ERROR(IOError, Data);
LPV_DEFINE_ERROR(BadMagic, Data);
LPV_DEFINE_ERROR(TruncatedPayload, Data);
LPV_DEFINE_ERROR(DTypeUnsupported, Data);
LPV_DEFINE_ERROR(CorruptCheckpoint, Data);
LPV_DEFINE_ERROR(VersionMismatch, Data);
LPV_DEFINE_ERROR(SchemaVersionMismatch, Data);
LPV_DEFINE_ERROR(ShapeMismatch, Data);
LPV_DEFINE_ERROR(UnregisteredClip, Data);
LPV_DEFINE_ERROR(ChecksumMismatch, Data);

LPV_DEFINE_ERROR(UnstableSimulation, Numerical);
LPV_DEFINE_ERROR(DivergedTraining, Numerical);
LPV_DEFINE_ERROR(DenoiserFailure, Numerical);
LPV_DEFINE_ERROR(LightParallelToGround, Numerical);

#undef LPV_DEFINE_ERROR

} // namespace lpv
