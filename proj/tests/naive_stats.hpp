// Test-only oracle: an independent, keep-everything-in-memory recomputation
// of the repository summary. Parses the flat files with its own splitting
// and uses plain two-pass moment formulas, so it shares no code path with
// the streaming implementation it checks.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace naive {

struct Moments {
    std::uint64_t count = 0;
    double mean = 0.0;
    double sd = 0.0;  // population
};

inline Moments moments_of(const std::vector<double>& xs) {
    Moments m;
    m.count = xs.size();
    if (xs.empty()) return m;
    double sum = 0.0;
    for (double x : xs) sum += x;
    m.mean = sum / static_cast<double>(xs.size());
    double ssq = 0.0;
    for (double x : xs) ssq += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ssq / static_cast<double>(xs.size()));
    return m;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, '\t')) out.push_back(field);
    if (!line.empty() && line.back() == '\t') out.push_back("");
    return out;
}

inline std::vector<std::vector<std::string>> read_table(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("naive: cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header) {
            header = false;
            continue;
        }
        if (!line.empty()) rows.push_back(split_tabs(line));
    }
    return rows;
}

// Seconds since the Unix epoch for "YYYY-MM-DD HH:MM:SS", via its own civil
// arithmetic (counts days year by year).
inline std::int64_t parse_stamp(const std::string& s) {
    const int y = std::stoi(s.substr(0, 4));
    const int mo = std::stoi(s.substr(5, 2));
    const int d = std::stoi(s.substr(8, 2));
    const int h = std::stoi(s.substr(11, 2));
    const int mi = std::stoi(s.substr(14, 2));
    const int sec = std::stoi(s.substr(17, 2));
    const auto leap = [](int year) {
        return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    };
    static const int month_days[12] = {31, 28, 31, 30, 31, 30,
                                       31, 31, 30, 31, 30, 31};
    std::int64_t days = 0;
    if (y >= 1970) {
        for (int yy = 1970; yy < y; ++yy) days += leap(yy) ? 366 : 365;
    } else {
        for (int yy = y; yy < 1970; ++yy) days -= leap(yy) ? 366 : 365;
    }
    for (int m = 1; m < mo; ++m) {
        days += month_days[m - 1];
        if (m == 2 && leap(y)) days += 1;
    }
    days += d - 1;
    return days * 86400LL + h * 3600LL + mi * 60LL + sec;
}

struct Summary {
    std::uint64_t n_patients = 0;
    Moments age;
    Moments poverty;
    std::map<std::string, std::uint64_t> gender;
    std::map<std::string, std::uint64_t> ethnicity;
    Moments admissions_per_patient;
    Moments los_days;
    std::uint64_t total_admissions = 0;
    std::uint64_t total_lab_rows = 0;
    std::map<std::string, Moments> labs;
};

inline Summary summarize(const std::string& dir, std::int64_t cutoff) {
    Summary s;
    const auto patients = read_table(dir + "/patients.tsv");
    const auto admissions = read_table(dir + "/admissions.tsv");
    const auto labs = read_table(dir + "/labs.tsv");

    s.n_patients = patients.size();
    std::vector<double> ages, poverty;
    std::map<std::string, std::uint64_t> adm_counts;
    for (const auto& row : patients) {
        ages.push_back(static_cast<double>(cutoff - parse_stamp(row[2])) /
                       (365.2425 * 86400.0));
        poverty.push_back(std::stod(row[6]));
        ++s.gender[row[1]];
        ++s.ethnicity[row[3]];
        adm_counts[row[0]] = 0;
    }
    s.age = moments_of(ages);
    s.poverty = moments_of(poverty);

    std::vector<double> los;
    for (const auto& row : admissions) {
        ++adm_counts.at(row[0]);
        los.push_back(static_cast<double>(parse_stamp(row[3]) -
                                          parse_stamp(row[2])) /
                      86400.0);
    }
    s.los_days = moments_of(los);
    s.total_admissions = admissions.size();
    std::vector<double> counts;
    for (const auto& [id, c] : adm_counts)
        counts.push_back(static_cast<double>(c));
    s.admissions_per_patient = moments_of(counts);

    std::map<std::string, std::vector<double>> lab_values;
    for (const auto& row : labs) lab_values[row[2]].push_back(std::stod(row[3]));
    for (const auto& [name, values] : lab_values)
        s.labs[name] = moments_of(values);
    s.total_lab_rows = labs.size();
    return s;
}

}  // namespace naive
