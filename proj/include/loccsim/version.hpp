#ifndef LOCCSIM_VERSION_HPP
#define LOCCSIM_VERSION_HPP

namespace loccsim {

inline constexpr const char* kVersion = "0.1.0";

// Embedded in every output file so downstream consumers can detect
// incompatible schema changes.
inline constexpr const char* kFormatVersion = "loccsim/1";

} // namespace loccsim

#endif
