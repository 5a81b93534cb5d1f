#include "rumour/report.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "rumour/error.hpp"

namespace rumour {

namespace {

constexpr const char* kColumns = "run_id,representation,algorithm,fold,seed,config_hash,model_tag";

std::string fixed(double v, int digits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s = buf;
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);  // no "-0.000"
    return s;
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    cells.push_back(std::move(cur));
    return cells;
}

std::string header() {
    std::string h = kColumns;
    for (const auto name : kMetricNames) h += "," + std::string(name);
    return h;
}

std::string pad(const std::string& s, std::size_t width) { return s.size() >= width ? s : s + std::string(width - s.size(), ' '); }

}  // namespace

ReportRow to_row(const RunReport& r, const std::string& fold, const std::string& config_hash) {
    ReportRow row;
    row.run_id = r.run_id;
    row.representation = std::string(to_string(r.representation));
    row.algorithm = std::string(to_string(r.algorithm));
    row.fold = fold;
    row.seed = r.seed;
    row.config_hash = config_hash;
    row.model_tag = r.model_tag;
    row.metrics = r.metrics.values();
    return row;
}

std::vector<ReportRow> to_rows(const CVReport& cv, const std::string& config_hash) {
    std::vector<ReportRow> rows;
    for (std::size_t i = 0; i < cv.per_fold.size(); ++i) rows.push_back(to_row(cv.per_fold[i], std::to_string(i + 1), config_hash));
    ReportRow mean;
    mean.run_id = std::string(to_string(cv.representation)) + "-" + std::string(to_string(cv.config.algorithm)) + "-mean";
    mean.representation = std::string(to_string(cv.representation));
    mean.algorithm = std::string(to_string(cv.config.algorithm));
    mean.fold = "mean";
    mean.seed = cv.seed;
    mean.config_hash = config_hash;
    mean.model_tag = cv.model_tag;
    mean.metrics = cv.mean.values();
    rows.push_back(std::move(mean));
    return rows;
}

std::string report_csv(std::span<const ReportRow> rows) {
    std::ostringstream out;
    out << header() << '\n';
    for (const auto& r : rows) {
        out << csv_cell(r.run_id) << ',' << csv_cell(r.representation) << ',' << csv_cell(r.algorithm) << ','
            << csv_cell(r.fold) << ',' << r.seed << ',' << csv_cell(r.config_hash) << ',' << csv_cell(r.model_tag);
        for (const double v : r.metrics) out << ',' << fixed(v, 6);
        out << '\n';
    }
    return out.str();
}

std::string report_text(std::span<const ReportRow> rows) {
    static constexpr std::array<const char*, 10> short_names = {"Acc",  "Prec", "Recall", "F1", "NR-P",
                                                                "NR-R", "NR-F1", "R-P",   "R-R", "R-F1"};
    std::size_t w_run = 6, w_rep = 14, w_alg = 9, w_fold = 7;
    for (const auto& r : rows) {
        w_run = std::max(w_run, r.run_id.size());
        w_rep = std::max(w_rep, r.representation.size());
        w_alg = std::max(w_alg, r.algorithm.size());
        w_fold = std::max(w_fold, r.fold.size());
    }
    std::ostringstream out;
    out << pad("run_id", w_run) << "  " << pad("representation", w_rep) << "  " << pad("algorithm", w_alg) << "  "
        << pad("fold", w_fold);
    for (const auto* n : short_names) out << "  " << pad(n, 6);
    out << '\n';
    for (const auto& r : rows) {
        out << pad(r.run_id, w_run) << "  " << pad(r.representation, w_rep) << "  " << pad(r.algorithm, w_alg) << "  "
            << pad(r.fold, w_fold);
        for (const double v : r.metrics) out << "  " << pad(fixed(v, 3), 6);
        out << '\n';
    }
    return out.str();
}

std::vector<ReportRow> parse_report_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(source + ": empty report");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header()) throw ParseError(source + ": unexpected report header");
    std::vector<ReportRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        const std::string where = source + ":" + std::to_string(lineno);
        if (cells.size() != 17) throw ParseError(where + ": expected 17 columns");
        ReportRow r;
        r.run_id = cells[0];
        r.representation = cells[1];
        r.algorithm = cells[2];
        r.fold = cells[3];
        try {
            r.seed = std::stoull(cells[4]);
            for (std::size_t i = 0; i < 10; ++i) r.metrics[i] = std::stod(cells[7 + i]);
        } catch (const std::exception&) {
            throw ParseError(where + ": bad number");
        }
        r.config_hash = cells[5];
        r.model_tag = cells[6];
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ReportRow> read_report_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PathError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_report_csv(ss.str(), path.string());
}

Comparison compare_report(std::span<const ReportRow> rows) {
    Comparison c;
    std::map<std::string, const ReportRow*> embedding, features;
    std::vector<std::string> algorithm_order;
    for (const auto& r : rows) {
        if (r.fold != "holdout" && r.fold != "mean") continue;
        if (r.representation != "embedding" && r.representation != "features39") continue;
        auto& slot = r.representation == "embedding" ? embedding : features;
        if (!embedding.count(r.algorithm) && !features.count(r.algorithm)) algorithm_order.push_back(r.algorithm);
        slot.emplace(r.algorithm, &r);
    }
    for (const auto& alg : algorithm_order) {
        if (!embedding.count(alg) || !features.count(alg)) continue;
        const auto& e = *embedding.at(alg);
        const auto& f = *features.at(alg);
        ReportRow d;
        d.run_id = "improvement-" + alg;
        d.representation = "improvement";
        d.algorithm = alg;
        d.fold = e.fold;
        d.seed = e.seed;
        d.config_hash = e.config_hash;
        d.model_tag = e.model_tag;
        for (std::size_t i = 0; i < 10; ++i) d.metrics[i] = e.metrics[i] - f.metrics[i];
        c.improvements.push_back(std::move(d));
    }

    std::vector<ReportRow> all(rows.begin(), rows.end());
    all.insert(all.end(), c.improvements.begin(), c.improvements.end());
    c.csv = report_csv(all);
    c.text = report_text(rows);
    if (!c.improvements.empty()) c.text += "\nImprovement (embedding - features39)\n" + report_text(c.improvements);
    return c;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PathError("cannot write " + path.string());
    out << content;
    if (!out) throw PathError("write failed: " + path.string());
}

}  // namespace rumour
