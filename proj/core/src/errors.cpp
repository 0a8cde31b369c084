#include "trigof/errors.hpp"

namespace trigof {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::domain: return "domain_error";
        case ErrorKind::quadrature: return "quadrature_error";
        case ErrorKind::estimation: return "estimation_error";
        case ErrorKind::degenerate_sample: return "degenerate_sample";
        case ErrorKind::singularity: return "singularity_error";
        case ErrorKind::configuration: return "configuration_error";
        case ErrorKind::sampling: return "sampling_error";
        case ErrorKind::data: return "data_error";
    }
    return "error";
}

Error::Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

}  // namespace trigof
