#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "iris/errors.hpp"

namespace iris {

enum class ComparisonLabel { Genuine, Imposter };

struct SigSetEntry {
    std::string template_id;
    std::string identity_id;
    std::string path;
};

struct Comparison {
    std::string probe_template_id;
    std::string enrolled_template_id;
    ComparisonLabel declared_label = ComparisonLabel::Genuine;
};

/// Comparison specification: which (probe, enrolled) pairs are declared
/// genuine and which imposter. Declared labels are authoritative and never
/// recomputed from identity ids, even when they look wrong.
struct SigSet {
    std::vector<SigSetEntry> enrollment_entries;
    std::vector<SigSetEntry> probe_entries;
    std::vector<Comparison> comparisons;
};

// Section-based CSV: "[ENROLL]" / "[PROBE]" rows are template,identity,path;
// "[COMPARE]" rows are probe_template,enrolled_template,G|I.
SigSet parse_sigset(const std::string& path);
SigSet parse_sigset_text(const std::string& text, const std::string& origin = "<memory>");
std::string serialize_sigset(const SigSet& sigset);
void save_sigset(const SigSet& sigset, const std::string& path);

std::map<std::pair<std::string, std::string>, ComparisonLabel>
derive_labels(const SigSet& sigset);

} // namespace iris
