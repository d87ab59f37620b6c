// Shared plumbing: shortest round-trip number formatting for all text output,
// and the worker-thread cap read from NLSTRING_THREADS.

#ifndef NLSTRING_IO_HPP
#define NLSTRING_IO_HPP

#include <complex>
#include <string>

namespace nlstring::io {

/// Shortest decimal string that round-trips to the same double.
std::string fmt(double v);
std::string fmt(int v);
std::string fmt(long v);
std::string fmt(long long v);

/// Worker count for parallel loops: NLSTRING_THREADS when set (must be a
/// positive integer), otherwise the hardware concurrency.
int worker_thread_count();

}  // namespace nlstring::io

#endif  // NLSTRING_IO_HPP
