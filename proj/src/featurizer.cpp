#include "logembed/featurizer.hpp"

#include <algorithm>
#include <cmath>

namespace logembed {

std::vector<double> aggregate_embeddings(std::vector<std::vector<double>> embeddings, size_t d) {
    std::vector<double> out(3 * d, 0.0);
    if (embeddings.empty()) return out;
    for (const auto& e : embeddings)
        if (e.size() != d)
            throw Error(ErrorClass::DimensionMismatch, "embedding length != D in aggregation");

    // Canonical summation order makes the reduction independent of the
    // caller's pattern order.
    std::sort(embeddings.begin(), embeddings.end());

    const double n = static_cast<double>(embeddings.size());
    for (size_t di = 0; di < d; ++di) {
        double lo = embeddings[0][di];
        double hi = lo;
        double sum = 0.0, comp = 0.0; // Kahan
        for (const auto& e : embeddings) {
            const double x = e[di];
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            const double y = x - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        double mean = sum / n;
        mean = std::min(hi, std::max(lo, mean)); // exact mean lies in [lo, hi]
        out[di] = lo;
        out[d + di] = hi;
        out[2 * d + di] = mean;
    }
    return out;
}

LogFeatureVector featurize_log(const AutoencoderModel& model,
                               const std::vector<SparseBinaryVector>& patterns,
                               std::string log_id, Label label) {
    LogFeatureVector f;
    f.log_id = std::move(log_id);
    f.label = label;
    if (patterns.empty()) {
        f.empty_log = true;
        f.values.assign(3 * static_cast<size_t>(model.hidden_dim), 0.0);
        return f;
    }
    std::vector<std::vector<double>> embeddings;
    embeddings.reserve(patterns.size());
    for (const auto& v : patterns) embeddings.push_back(embed_pattern(model, v));
    f.values = aggregate_embeddings(std::move(embeddings), model.hidden_dim);
    return f;
}

void FeatureMatrix::add_row(std::string id, Label label, const std::vector<double>& row_values) {
    if (n_features == 0 && values.empty()) n_features = row_values.size();
    if (row_values.size() != n_features)
        throw Error(ErrorClass::DimensionMismatch, "feature row width mismatch");
    ids.push_back(std::move(id));
    labels.push_back(label);
    values.insert(values.end(), row_values.begin(), row_values.end());
}

std::string serialize_features(const FeatureMatrix& features) {
    std::string out = "log_id,label";
    for (size_t j = 0; j < features.n_features; ++j) {
        out += ",f";
        out += std::to_string(j);
    }
    out += '\n';
    for (size_t i = 0; i < features.rows(); ++i) {
        const std::string& id = features.ids[i];
        if (id.find_first_of(",\"\n\r") != std::string::npos)
            throw Error(ErrorClass::Io, "log id not representable in CSV: " + id);
        out += id;
        out += ',';
        out += label_name(features.labels[i]);
        const double* row = features.row(i);
        for (size_t j = 0; j < features.n_features; ++j) {
            out += ',';
            out += fmt_g9(row[j]);
        }
        out += '\n';
    }
    return out;
}

FeatureMatrix parse_features(const std::string& text) {
    auto lines = split_lines(text);
    if (lines.empty() || lines[0].rfind("log_id,label", 0) != 0)
        throw Error(ErrorClass::Parse, "feature file missing log_id,label header");

    size_t n_features = 0;
    {
        size_t cols = 1;
        for (char ch : lines[0])
            if (ch == ',') ++cols;
        if (cols < 2) throw Error(ErrorClass::Parse, "feature header too short");
        n_features = cols - 2;
    }

    FeatureMatrix m;
    m.n_features = n_features;
    for (size_t li = 1; li < lines.size(); ++li) {
        const std::string& line = lines[li];
        if (line.empty()) continue;
        std::vector<std::string> fields;
        size_t start = 0;
        while (true) {
            size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (fields.size() != n_features + 2)
            throw Error(ErrorClass::Parse, "feature row column count mismatch",
                        static_cast<long>(li + 1));
        m.ids.push_back(fields[0]);
        m.labels.push_back(label_from_name(fields[1]));
        for (size_t j = 0; j < n_features; ++j) {
            char* end = nullptr;
            const double v = std::strtod(fields[2 + j].c_str(), &end);
            if (end == nullptr || *end != '\0')
                throw Error(ErrorClass::Parse, "invalid float in feature file",
                            static_cast<long>(li + 1));
            m.values.push_back(v);
        }
    }
    return m;
}

void write_features(const std::string& path, const FeatureMatrix& features) {
    write_text_file(path, serialize_features(features));
}

FeatureMatrix read_features(const std::string& path) {
    require_artifact(path, "feature file");
    return parse_features(read_text_file(path));
}

}  // namespace logembed
