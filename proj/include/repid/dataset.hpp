#ifndef REPID_DATASET_HPP
#define REPID_DATASET_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "repid/common.hpp"

namespace repid {

enum class FeatureKind { numeric, categorical };

struct FeatureMeta {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
    std::vector<std::string> levels;  // categorical only, ordered, duplicate-free

    bool operator==(const FeatureMeta&) const = default;
};

// Column-typed feature matrix. Categorical columns store level indices as
// doubles (exact for any realistic level count), so every row can be handed
// to a predictor as a plain double vector in dataset column order.
struct Dataset {
    std::vector<FeatureMeta> metas;
    std::vector<std::vector<double>> columns;

    std::size_t n() const { return columns.empty() ? 0 : columns.front().size(); }
    std::size_t p() const { return metas.size(); }

    int feature_index(std::string_view name) const {
        for (std::size_t j = 0; j < metas.size(); ++j)
            if (metas[j].name == name) return static_cast<int>(j);
        return -1;
    }

    // One observation as a dense row in column order.
    std::vector<double> row(std::size_t i) const {
        std::vector<double> r(p());
        for (std::size_t j = 0; j < p(); ++j) r[j] = columns[j][i];
        return r;
    }

    Matrix as_matrix() const {
        Matrix m(n(), p());
        for (std::size_t j = 0; j < p(); ++j)
            for (std::size_t i = 0; i < n(); ++i) m(i, j) = columns[j][i];
        return m;
    }

    void validate() const {
        if (metas.empty()) throw_data("dataset: no features");
        if (columns.size() != metas.size())
            throw_data("dataset: column count does not match metadata");
        const std::size_t rows = columns.front().size();
        if (rows == 0) throw_data("dataset: no observations");
        std::unordered_set<std::string> seen;
        for (std::size_t j = 0; j < metas.size(); ++j) {
            const auto& meta = metas[j];
            if (!seen.insert(meta.name).second)
                throw_data("dataset: duplicate feature name '" + meta.name + "'");
            if (columns[j].size() != rows)
                throw_data("dataset: ragged column '" + meta.name + "'");
            if (meta.kind == FeatureKind::categorical) {
                if (meta.levels.empty())
                    throw_data("dataset: categorical feature '" + meta.name +
                               "' has no levels");
                std::unordered_set<std::string> lv(meta.levels.begin(), meta.levels.end());
                if (lv.size() != meta.levels.size())
                    throw_data("dataset: duplicate level in feature '" + meta.name + "'");
                for (double v : columns[j]) {
                    const double idx = std::floor(v);
                    if (idx != v || idx < 0 ||
                        idx >= static_cast<double>(meta.levels.size()))
                        throw_data("dataset: invalid level index in feature '" +
                                   meta.name + "'");
                }
            } else {
                for (double v : columns[j])
                    if (!std::isfinite(v))
                        throw_data("dataset: non-finite value in feature '" +
                                   meta.name + "'");
            }
        }
    }

    bool operator==(const Dataset&) const = default;
};

namespace detail {

// RFC-4180 record reader: quoted fields, doubled-quote escapes, CRLF or LF.
inline std::vector<std::vector<std::string>> parse_csv_records(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t i = 0;
    auto end_field = [&]() {
        fields.push_back(std::move(cur));
        cur.clear();
        field_started = false;
    };
    auto end_record = [&]() {
        end_field();
        records.push_back(std::move(fields));
        fields.clear();
    };
    while (i < text.size()) {
        const char ch = text[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"' && !field_started && cur.empty()) {
            in_quotes = true;
            field_started = true;
        } else if (ch == ',') {
            end_field();
        } else if (ch == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            end_record();
        } else {
            cur.push_back(ch);
            field_started = true;
        }
        ++i;
    }
    if (in_quotes) throw_data("csv: unterminated quoted field");
    if (!cur.empty() || !fields.empty()) {
        if (!cur.empty() && cur.back() == '\r') cur.pop_back();
        end_record();
    }
    return records;
}

inline std::optional<double> parse_double(std::string_view token) {
    if (token.empty()) return std::nullopt;
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return value;
}

inline bool is_missing_token(std::string_view token) {
    return token.empty() || token == "NA";
}

inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

inline std::string csv_quote(std::string_view field) {
    const bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace detail

// Parses RFC-4180 CSV text with a mandatory header row. Column types are
// inferred: a column where every token parses as a finite number is numeric,
// anything else is categorical with levels in order of first appearance.
// Missing tokens ("" or "NA") and non-finite numbers are load errors.
inline Dataset load_dataset(std::string_view csv_text) {
    auto records = detail::parse_csv_records(csv_text);
    if (records.empty()) throw_data("csv: empty input");
    const auto& header = records.front();
    const std::size_t p = header.size();
    if (p == 0 || (p == 1 && header[0].empty())) throw_data("csv: empty header");
    if (records.size() < 2) throw_data("csv: no data rows");
    const std::size_t n = records.size() - 1;

    for (std::size_t r = 1; r < records.size(); ++r)
        if (records[r].size() != p)
            throw_data("csv: row " + std::to_string(r) + " has " +
                       std::to_string(records[r].size()) + " fields, expected " +
                       std::to_string(p));

    Dataset ds;
    ds.metas.resize(p);
    ds.columns.assign(p, std::vector<double>(n));
    for (std::size_t j = 0; j < p; ++j) {
        ds.metas[j].name = header[j];

        bool numeric = true;
        for (std::size_t r = 1; r <= n && numeric; ++r) {
            const std::string& tok = records[r][j];
            if (detail::is_missing_token(tok)) continue;  // reported below
            if (!detail::parse_double(tok)) numeric = false;
        }

        if (numeric) {
            ds.metas[j].kind = FeatureKind::numeric;
            for (std::size_t r = 1; r <= n; ++r) {
                const std::string& tok = records[r][j];
                if (detail::is_missing_token(tok))
                    throw_data("csv: missing value at row " + std::to_string(r) +
                               ", column '" + header[j] + "'");
                const double v = *detail::parse_double(tok);
                if (!std::isfinite(v))
                    throw_data("csv: non-finite value at row " + std::to_string(r) +
                               ", column '" + header[j] + "'");
                ds.columns[j][r - 1] = v;
            }
        } else {
            ds.metas[j].kind = FeatureKind::categorical;
            auto& levels = ds.metas[j].levels;
            for (std::size_t r = 1; r <= n; ++r) {
                const std::string& tok = records[r][j];
                if (detail::is_missing_token(tok))
                    throw_data("csv: missing value at row " + std::to_string(r) +
                               ", column '" + header[j] + "'");
                auto it = std::find(levels.begin(), levels.end(), tok);
                std::size_t idx;
                if (it == levels.end()) {
                    idx = levels.size();
                    levels.push_back(tok);
                } else {
                    idx = static_cast<std::size_t>(it - levels.begin());
                }
                ds.columns[j][r - 1] = static_cast<double>(idx);
            }
        }
    }
    ds.validate();
    return ds;
}

// Serializes a dataset back to CSV. Numeric values use shortest round-trip
// formatting, so save followed by load reproduces the dataset exactly.
inline std::string save_dataset(const Dataset& ds,
                                const std::vector<double>* targets = nullptr,
                                std::string_view target_name = "y") {
    std::string out;
    for (std::size_t j = 0; j < ds.p(); ++j) {
        if (j) out.push_back(',');
        out += detail::csv_quote(ds.metas[j].name);
    }
    if (targets) {
        out.push_back(',');
        out += detail::csv_quote(target_name);
    }
    out.push_back('\n');
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (std::size_t j = 0; j < ds.p(); ++j) {
            if (j) out.push_back(',');
            if (ds.metas[j].kind == FeatureKind::categorical) {
                const auto idx = static_cast<std::size_t>(ds.columns[j][i]);
                out += detail::csv_quote(ds.metas[j].levels[idx]);
            } else {
                out += detail::format_double(ds.columns[j][i]);
            }
        }
        if (targets) {
            out.push_back(',');
            out += detail::format_double((*targets)[i]);
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace repid

#endif  // REPID_DATASET_HPP
