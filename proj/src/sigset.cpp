#include "iris/sigset.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace iris {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

void validate(const SigSet& sigset, const std::string& origin) {
    std::set<std::string> enrolled_ids, probe_ids;
    for (const auto& e : sigset.enrollment_entries)
        if (!enrolled_ids.insert(e.template_id).second)
            throw MalformedSigSet(origin + ": duplicate enrollment template " + e.template_id);
    for (const auto& e : sigset.probe_entries)
        if (!probe_ids.insert(e.template_id).second)
            throw MalformedSigSet(origin + ": duplicate probe template " + e.template_id);

    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& c : sigset.comparisons) {
        if (!probe_ids.count(c.probe_template_id))
            throw DanglingReference(origin + ": unknown probe template " + c.probe_template_id);
        if (!enrolled_ids.count(c.enrolled_template_id))
            throw DanglingReference(origin + ": unknown enrolled template " +
                                    c.enrolled_template_id);
        if (!seen.insert({c.probe_template_id, c.enrolled_template_id}).second)
            throw DuplicateComparison(origin + ": duplicate comparison " + c.probe_template_id +
                                      " vs " + c.enrolled_template_id);
    }
}

} // namespace

SigSet parse_sigset_text(const std::string& text, const std::string& origin) {
    SigSet sigset;
    enum class Section { None, Enroll, Probe, Compare } section = Section::None;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line == "[ENROLL]") { section = Section::Enroll; continue; }
        if (line == "[PROBE]") { section = Section::Probe; continue; }
        if (line == "[COMPARE]") { section = Section::Compare; continue; }

        auto where = origin + ":" + std::to_string(line_no);
        auto fields = split_fields(line);
        if (section == Section::None)
            throw MalformedSigSet(where + ": data before a section marker");
        if (fields.size() != 3)
            throw MalformedSigSet(where + ": expected 3 fields, got " +
                                  std::to_string(fields.size()));
        for (const auto& f : fields)
            if (f.empty())
                throw MalformedSigSet(where + ": empty field");

        if (section == Section::Compare) {
            Comparison c;
            c.probe_template_id = fields[0];
            c.enrolled_template_id = fields[1];
            if (fields[2] == "G")
                c.declared_label = ComparisonLabel::Genuine;
            else if (fields[2] == "I")
                c.declared_label = ComparisonLabel::Imposter;
            else
                throw MalformedSigSet(where + ": label must be G or I, got " + fields[2]);
            sigset.comparisons.push_back(std::move(c));
        } else {
            SigSetEntry e{fields[0], fields[1], fields[2]};
            if (section == Section::Enroll)
                sigset.enrollment_entries.push_back(std::move(e));
            else
                sigset.probe_entries.push_back(std::move(e));
        }
    }
    validate(sigset, origin);
    return sigset;
}

SigSet parse_sigset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FileNotFound("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_sigset_text(buf.str(), path);
}

std::string serialize_sigset(const SigSet& sigset) {
    std::string out = "[ENROLL]\n";
    for (const auto& e : sigset.enrollment_entries)
        out += e.template_id + "," + e.identity_id + "," + e.path + "\n";
    out += "[PROBE]\n";
    for (const auto& e : sigset.probe_entries)
        out += e.template_id + "," + e.identity_id + "," + e.path + "\n";
    out += "[COMPARE]\n";
    for (const auto& c : sigset.comparisons)
        out += c.probe_template_id + "," + c.enrolled_template_id + "," +
               (c.declared_label == ComparisonLabel::Genuine ? "G" : "I") + "\n";
    return out;
}

void save_sigset(const SigSet& sigset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path);
    out << serialize_sigset(sigset);
    if (!out)
        throw IoError("write failed for " + path);
}

std::map<std::pair<std::string, std::string>, ComparisonLabel>
derive_labels(const SigSet& sigset) {
    std::map<std::pair<std::string, std::string>, ComparisonLabel> labels;
    for (const auto& c : sigset.comparisons)
        labels[{c.probe_template_id, c.enrolled_template_id}] = c.declared_label;
    return labels;
}

} // namespace iris
