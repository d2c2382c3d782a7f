#ifndef GNM_ERRORS_HPP
#define GNM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gnm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

#define GNM_DEFINE_ERROR(Name, Base)        \
    class Name : public Base {              \
      public:                               \
        using Base::Base;                   \
    }

GNM_DEFINE_ERROR(InvalidArgument, Error);
GNM_DEFINE_ERROR(DimensionMismatch, InvalidArgument);
GNM_DEFINE_ERROR(UserFunctionFailure, Error);

GNM_DEFINE_ERROR(NotPositiveDefinite, Error);
GNM_DEFINE_ERROR(SingularProposal, NotPositiveDefinite);
GNM_DEFINE_ERROR(NotPSD, InvalidArgument);
GNM_DEFINE_ERROR(InvalidDilation, InvalidArgument);

GNM_DEFINE_ERROR(InitialGuessOutsideDomain, Error);
GNM_DEFINE_ERROR(InvalidPolicy, InvalidArgument);
GNM_DEFINE_ERROR(BurnTooLarge, InvalidArgument);

GNM_DEFINE_ERROR(IOFailure, Error);
GNM_DEFINE_ERROR(CheckpointWriteFailure, IOFailure);
GNM_DEFINE_ERROR(CorruptCheckpoint, Error);

GNM_DEFINE_ERROR(PointOutsideDomain, Error);

GNM_DEFINE_ERROR(EmptyChain, InvalidArgument);
GNM_DEFINE_ERROR(SeriesTooShort, InvalidArgument);
GNM_DEFINE_ERROR(LagTooLarge, InvalidArgument);
GNM_DEFINE_ERROR(NonConvergentWindow, Error);
GNM_DEFINE_ERROR(NonFiniteDensity, Error);

#undef GNM_DEFINE_ERROR

} // namespace gnm

#endif // GNM_ERRORS_HPP
