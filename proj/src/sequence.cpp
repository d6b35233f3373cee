#include "evseq/sequence.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace evseq {

Signature EventSequence::signature() const {
  Signature s;
  s.reserve(events.size());
  for (const auto& e : events) s.push_back(e.event_type);
  return s;
}

bool signature_less(const Signature& a, const Signature& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::string signature_label(const Signature& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0) out += " > ";
    out += s[i];
  }
  return out;
}

std::vector<EventSequence> build_sequences(const EventLog& log) {
  std::vector<EventSequence> sequences;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& rec : log.records()) {
    auto [it, inserted] = index.try_emplace(rec.identifier, sequences.size());
    if (inserted) {
      sequences.push_back(EventSequence{rec.identifier, {}, {}});
    }
    sequences[it->second].events.push_back(rec);
  }
  for (auto& seq : sequences) {
    std::stable_sort(seq.events.begin(), seq.events.end(),
                     [](const EventRecord& a, const EventRecord& b) { return a.start < b.start; });
    seq.start_date = date_of(seq.events.front().start);
  }
  return sequences;
}

std::vector<UniqueSequence> extract_unique_sequences(const std::vector<EventSequence>& sequences) {
  std::map<Signature, std::vector<const EventSequence*>> groups;
  for (const auto& seq : sequences) groups[seq.signature()].push_back(&seq);

  std::vector<UniqueSequence> out;
  out.reserve(groups.size());
  for (auto& [sig, members] : groups) out.push_back(UniqueSequence{sig, std::move(members)});
  // std::map already yields lexicographic order; the stable sort keeps it for ties.
  std::stable_sort(out.begin(), out.end(), [](const UniqueSequence& a, const UniqueSequence& b) {
    return a.frequency() > b.frequency();
  });
  return out;
}

CoverageSelection select_by_coverage(const std::vector<UniqueSequence>& uniques, double threshold,
                                     std::size_t min_frequency) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("coverage threshold must be in (0, 1]");
  }
  if (min_frequency < 1) throw std::invalid_argument("min_frequency must be >= 1");

  CoverageSelection sel;
  sel.threshold = threshold;
  sel.total_unique = uniques.size();
  for (const auto& u : uniques) sel.total_sequences += u.frequency();
  if (sel.total_sequences == 0) return sel;

  const double total = static_cast<double>(sel.total_sequences);
  std::size_t cumulative = 0;
  std::size_t prefix = 0;
  while (prefix < uniques.size()) {
    cumulative += uniques[prefix].frequency();
    ++prefix;
    if (static_cast<double>(cumulative) / total >= threshold) break;
  }

  std::size_t kept = 0;
  for (std::size_t i = 0; i < prefix; ++i) {
    if (uniques[i].frequency() < min_frequency) continue;
    sel.selected.push_back(uniques[i]);
    kept += uniques[i].frequency();
  }
  sel.coverage_ratio = static_cast<double>(kept) / total;
  return sel;
}

}  // namespace evseq
