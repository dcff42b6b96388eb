/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include <mle/error.hpp>
#include <mle/predictor.hpp>
#include <mle/text_util.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace mle::predict {

int sign(SuccessLabel y) {
    return y == SuccessLabel::Successful ? 1 : -1;
}

std::size_t Dataset::positives() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const Row& r) { return r.y == SuccessLabel::Successful; }));
}

std::size_t Dataset::negatives() const {
    return rows.size() - positives();
}

FeatureTable parse_feature_table(const std::string& text, const std::string& name) {
    FeatureTable t;
    std::set<std::string> seen;
    const auto lines = text::split(text, '\n');
    bool header = true;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const auto line = text::trim(lines[ln]);
        if (line.empty()) continue;
        const auto cells = text::split(line, ',');
        if (header) {
            if (cells.empty() || text::trim(cells[0]) != "session_id") {
                throw MalformedStream(name, ln + 1, "first column must be session_id");
            }
            for (std::size_t c = 1; c < cells.size(); ++c) t.feature_names.emplace_back(text::trim(cells[c]));
            header = false;
            continue;
        }
        if (cells.size() != t.feature_names.size() + 1) {
            throw MalformedStream(name, ln + 1, "expected " + std::to_string(t.feature_names.size() + 1) + " cells");
        }
        std::string id(text::trim(cells[0]));
        if (id.empty()) throw MalformedStream(name, ln + 1, "empty session_id");
        if (!seen.insert(id).second) throw MalformedStream(name, ln + 1, "duplicate session_id " + id);
        std::vector<std::optional<double>> row;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            const auto cell = text::trim(cells[c]);
            if (cell == text::kAbsent) {
                row.emplace_back();
                continue;
            }
            const auto v = text::parse_double(cell);
            if (!v || !std::isfinite(*v)) throw MalformedStream(name, ln + 1, "bad number '" + std::string(cell) + "'");
            row.emplace_back(*v);
        }
        t.session_ids.push_back(std::move(id));
        t.values.push_back(std::move(row));
    }
    if (header) throw MalformedStream(name, 1, "missing header");
    return t;
}

FeatureTable read_feature_table(const std::filesystem::path& path) {
    return parse_feature_table(text::read_file(path), path.string());
}

std::string format_feature_table(const FeatureTable& table) {
    std::string out = "session_id";
    for (const auto& n : table.feature_names) out += "," + n;
    out += "\n";
    for (std::size_t r = 0; r < table.session_ids.size(); ++r) {
        out += table.session_ids[r];
        for (const auto& v : table.values[r]) {
            out += ",";
            out += v ? text::format_double(*v) : std::string(text::kAbsent);
        }
        out += "\n";
    }
    return out;
}

std::map<std::string, SuccessLabel> parse_labels(const std::string& text, const std::string& name) {
    std::map<std::string, SuccessLabel> out;
    const auto lines = text::split(text, '\n');
    bool header = true;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const auto line = text::trim(lines[ln]);
        if (line.empty()) continue;
        const auto cells = text::split(line, ',');
        if (header) {
            if (cells.size() != 2 || text::trim(cells[0]) != "session_id" || text::trim(cells[1]) != "success") {
                throw MalformedStream(name, ln + 1, "header must be session_id,success");
            }
            header = false;
            continue;
        }
        if (cells.size() != 2) throw MalformedStream(name, ln + 1, "expected 2 cells");
        const auto v = text::trim(cells[1]);
        SuccessLabel y;
        if (v == "1" || v == "successful") {
            y = SuccessLabel::Successful;
        } else if (v == "0" || v == "unsuccessful") {
            y = SuccessLabel::Unsuccessful;
        } else {
            throw MalformedStream(name, ln + 1, "bad label '" + std::string(v) + "'");
        }
        if (!out.emplace(std::string(text::trim(cells[0])), y).second) {
            throw MalformedStream(name, ln + 1, "duplicate session_id");
        }
    }
    if (header) throw MalformedStream(name, 1, "missing header");
    return out;
}

std::map<std::string, SuccessLabel> read_labels(const std::filesystem::path& path) {
    return parse_labels(text::read_file(path), path.string());
}

std::string format_labels(const std::map<std::string, SuccessLabel>& labels) {
    std::string out = "session_id,success\n";
    for (const auto& [id, y] : labels) out += id + (y == SuccessLabel::Successful ? ",1\n" : ",0\n");
    return out;
}

Dataset build_dataset(const FeatureTable& table, const std::map<std::string, SuccessLabel>& labels, DropLog* log) {
    Dataset d;
    d.feature_names = table.feature_names;
    for (std::size_t r = 0; r < table.session_ids.size(); ++r) {
        const auto& id = table.session_ids[r];
        const auto label = labels.find(id);
        if (label == labels.end()) {
            if (log) log->unlabeled.push_back(id);
            continue;
        }
        const auto& vals = table.values[r];
        if (std::any_of(vals.begin(), vals.end(), [](const auto& v) { return !v.has_value(); })) {
            if (log) log->absent_features.push_back(id);
            continue;
        }
        Row row{id, {}, label->second};
        row.x.reserve(vals.size());
        for (const auto& v : vals) row.x.push_back(*v);
        d.rows.push_back(std::move(row));
    }
    return d;
}

Dataset select_columns(const Dataset& d, std::span<const std::string> names) {
    std::vector<std::size_t> idx;
    for (const auto& n : names) {
        const auto it = std::find(d.feature_names.begin(), d.feature_names.end(), n);
        if (it == d.feature_names.end()) throw Error(ErrorCode::BadArgument, "unknown feature column " + n);
        idx.push_back(static_cast<std::size_t>(it - d.feature_names.begin()));
    }
    Dataset out;
    out.feature_names.assign(names.begin(), names.end());
    for (const auto& r : d.rows) {
        Row row{r.session_id, {}, r.y};
        for (auto i : idx) row.x.push_back(r.x[i]);
        out.rows.push_back(std::move(row));
    }
    return out;
}

Scaler Scaler::fit(const Dataset& d) {
    const auto p = d.feature_names.size();
    const auto n = static_cast<double>(d.rows.size());
    Scaler s{std::vector<double>(p, 0.0), std::vector<double>(p, 1.0)};
    if (d.rows.empty()) return s;
    for (std::size_t j = 0; j < p; ++j) {
        double m = 0.0;
        for (const auto& r : d.rows) m += r.x[j];
        m /= n;
        double var = 0.0;
        for (const auto& r : d.rows) var += (r.x[j] - m) * (r.x[j] - m);
        const double sd = std::sqrt(var / n);
        s.mean[j] = m;
        s.scale[j] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

std::vector<double> Scaler::apply(std::span<const double> x) const {
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
    return out;
}

}// namespace mle::predict
