#include "wosr/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wosr {

using nlohmann::json;

std::string format_snr(float snr_db) {
    if (std::isnan(snr_db)) return "none";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", static_cast<double>(snr_db));
    return buf;
}

std::string MetricsReport::to_csv() const {
    std::ostringstream os;
    os << "class,snr_db,metric,value\n";
    char buf[40];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.9g", r.value);
        os << r.cls << "," << r.snr << "," << r.metric << "," << buf << "\n";
    }
    for (size_t i = 0; i < confusion.size(); ++i)
        for (size_t j = 0; j < confusion[i].size(); ++j)
            os << labels[i] << ",all,confusion:" << labels[j] << "," << confusion[i][j] << "\n";
    return os.str();
}

std::string MetricsReport::to_json() const {
    json j;
    j["phase"] = phase;
    j["labels"] = labels;
    j["confusion"] = confusion;
    json rj = json::array();
    for (const auto& r : rows)
        rj.push_back({{"class", r.cls}, {"snr_db", r.snr}, {"metric", r.metric},
                      {"value", r.value}});
    j["rows"] = rj;
    j["config_hash"] = config_hash;
    j["dataset_seed"] = dataset_seed;
    return j.dump(2) + "\n";
}

MetricsReport MetricsReport::from_json(const std::string& text) {
    MetricsReport m;
    try {
        const json j = json::parse(text);
        j.at("phase").get_to(m.phase);
        j.at("labels").get_to(m.labels);
        j.at("confusion").get_to(m.confusion);
        for (const auto& rj : j.at("rows")) {
            MetricRow r;
            rj.at("class").get_to(r.cls);
            rj.at("snr_db").get_to(r.snr);
            rj.at("metric").get_to(r.metric);
            rj.at("value").get_to(r.value);
            m.rows.push_back(std::move(r));
        }
        j.at("config_hash").get_to(m.config_hash);
        j.at("dataset_seed").get_to(m.dataset_seed);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("metrics: invalid JSON report: ") + e.what());
    }
    return m;
}

void MetricsReport::save(const std::string& path) const {
    auto write = [](const std::string& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write report: " + p);
        out << text;
        if (!out) throw IoError("failed writing report: " + p);
    };
    auto ends_with = [](const std::string& s, const std::string& suf) {
        return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
    };
    if (ends_with(path, ".csv")) {
        write(path, to_csv());
    } else if (ends_with(path, ".json")) {
        write(path, to_json());
    } else {
        write(path + ".csv", to_csv());
        write(path + ".json", to_json());
    }
}

double MetricsReport::row_value(const std::string& cls, const std::string& snr,
                                const std::string& metric) const {
    for (const auto& r : rows)
        if (r.cls == cls && r.snr == snr && r.metric == metric) return r.value;
    throw InvalidInput("metrics: no row (" + cls + ", " + snr + ", " + metric + ")");
}

bool MetricsReport::operator==(const MetricsReport& o) const {
    return phase == o.phase && labels == o.labels && confusion == o.confusion &&
           rows == o.rows && config_hash == o.config_hash && dataset_seed == o.dataset_seed;
}

}  // namespace wosr
