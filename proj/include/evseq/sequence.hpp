#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "evseq/ingest.hpp"

namespace evseq {

using Signature = std::vector<std::string>;

struct EventSequence {
  std::string identifier;
  std::vector<EventRecord> events;  // sorted by start, ties in file order
  Date start_date;                  // UTC date of the first event

  Signature signature() const;
};

// Members point into the caller-owned sequence container the unique
// sequences were extracted from; that container must outlive them.
struct UniqueSequence {
  Signature signature;
  std::vector<const EventSequence*> members;

  std::size_t frequency() const { return members.size(); }
};

struct CoverageSelection {
  std::vector<UniqueSequence> selected;  // frequency-descending
  double coverage_ratio = 0.0;
  double threshold = 0.0;
  std::size_t total_sequences = 0;
  std::size_t total_unique = 0;
};

// One sequence per distinct identifier, in order of first appearance.
std::vector<EventSequence> build_sequences(const EventLog& log);

// Frequency descending, ties by lexicographic signature.
std::vector<UniqueSequence> extract_unique_sequences(const std::vector<EventSequence>& sequences);

// Frequency-descending prefix reaching `threshold` of all sequences, then
// entries below `min_frequency` removed. Throws std::invalid_argument when
// threshold is outside (0, 1] or min_frequency is 0.
CoverageSelection select_by_coverage(const std::vector<UniqueSequence>& uniques, double threshold,
                                     std::size_t min_frequency = 1);

// Lexicographic order over event-type lists.
bool signature_less(const Signature& a, const Signature& b);

std::string signature_label(const Signature& s);

}  // namespace evseq
