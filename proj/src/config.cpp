#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "csv.hpp"
#include "errors.hpp"

namespace emrsim {

namespace {

// Shortest decimal form that reparses to the same double at config magnitudes.
std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

bool is_header_row(const CsvRow& row, std::initializer_list<const char*> cols) {
    if (row.fields.size() != cols.size()) return false;
    std::size_t i = 0;
    for (const char* c : cols) {
        if (row.fields[i++] != c) return false;
    }
    return true;
}

std::string sanitize_text(std::string s) {
    for (char& c : s) {
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

}  // namespace

double CategoricalSpec::weight_total() const {
    double t = 0.0;
    for (const auto& l : levels) t += l.weight;
    return t;
}

double RangeBucketSpec::weight_total() const {
    double t = 0.0;
    for (const auto& b : buckets) t += b.weight;
    return t;
}

const CategoricalSpec* PopulationConfig::find_categorical(
    std::string_view name) const {
    for (const auto& s : categoricals)
        if (s.name == name) return &s;
    return nullptr;
}

const RangeBucketSpec* PopulationConfig::find_range(
    std::string_view name) const {
    for (const auto& s : ranges)
        if (s.name == name) return &s;
    return nullptr;
}

std::vector<std::size_t> ComplaintCatalog::usable_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i].sex == SexRestriction::none) out.push_back(i);
    return out;
}

double ComplaintCatalog::usable_weight_total() const {
    double t = 0.0;
    for (const auto& e : entries)
        if (e.sex == SexRestriction::none) t += e.weight;
    return t;
}

double ComplaintCatalog::category_mass(std::string_view category) const {
    double tagged = 0.0;
    double total = 0.0;
    for (const auto& e : entries) {
        if (e.sex != SexRestriction::none) continue;
        total += e.weight;
        for (const auto& c : e.categories) {
            if (c == category) {
                tagged += e.weight;
                break;
            }
        }
    }
    return total > 0.0 ? tagged / total : 0.0;
}

std::vector<std::string> ComplaintCatalog::categories() const {
    std::vector<std::string> out;
    for (const auto& e : entries) {
        if (e.sex != SexRestriction::none) continue;
        for (const auto& c : e.categories) {
            if (std::find(out.begin(), out.end(), c) == out.end())
                out.push_back(c);
        }
    }
    return out;
}

double AdmissionCountDist::weight_total() const {
    double t = 0.0;
    for (const auto& [k, w] : buckets) t += w;
    return t;
}

double AdmissionCountDist::mean() const {
    const double total = weight_total();
    double m = 0.0;
    for (const auto& [k, w] : buckets) m += k * w;
    return total > 0.0 ? m / total : 0.0;
}

double AdmissionCountDist::stddev() const {
    const double total = weight_total();
    if (total <= 0.0) return 0.0;
    const double m = mean();
    double ssq = 0.0;
    for (const auto& [k, w] : buckets) ssq += w * (k - m) * (k - m);
    return std::sqrt(ssq / total);
}

AdmissionCountDist default_admission_count_dist() {
    // Moment-matched to mean 3.6, SD 1.5 over 1..10 (discretized Gaussian,
    // weights rounded to 2 decimals; realized moments 3.6002 / 1.5005).
    return AdmissionCountDist{{{1, 7.87},
                               {2, 16.72},
                               {3, 24.28},
                               {4, 24.13},
                               {5, 16.38},
                               {6, 7.60},
                               {7, 2.41},
                               {8, 0.52},
                               {9, 0.08},
                               {10, 0.01}}};
}

// --- population ------------------------------------------------------------

PopulationConfig load_population_config(std::string_view categorical_text,
                                        std::string_view range_text,
                                        const std::string& categorical_name,
                                        const std::string& range_name) {
    PopulationConfig pc;
    std::unordered_set<std::string> closed;  // variables whose run has ended

    for (const CsvRow& row : parse_csv(categorical_text)) {
        if (is_header_row(row, {"variable", "value", "weight"})) continue;
        if (row.fields.size() != 3)
            throw ConfigError(categorical_name, row.line,
                              "expected `variable,value,weight`, got " +
                                  std::to_string(row.fields.size()) +
                                  " fields");
        const std::string& var = row.fields[0];
        if (var.empty())
            throw ConfigError(categorical_name, row.line,
                              "empty variable name");
        double weight = 0.0;
        if (!parse_double(row.fields[2], weight))
            throw ConfigError(categorical_name, row.line,
                              "non-numeric weight `" + row.fields[2] + "`");
        if (pc.categoricals.empty() || pc.categoricals.back().name != var) {
            if (closed.count(var))
                throw ConfigError(categorical_name, row.line,
                                  "variable `" + var + "` defined twice");
            if (!pc.categoricals.empty())
                closed.insert(pc.categoricals.back().name);
            pc.categoricals.push_back(CategoricalSpec{var, {}});
        }
        pc.categoricals.back().levels.push_back(
            CategoricalLevel{row.fields[1], weight});
    }
    for (const auto& spec : pc.categoricals) closed.insert(spec.name);

    for (const CsvRow& row : parse_csv(range_text)) {
        if (is_header_row(row, {"variable", "min", "max", "weight"})) continue;
        if (row.fields.size() != 4)
            throw ConfigError(range_name, row.line,
                              "expected `variable,min,max,weight`, got " +
                                  std::to_string(row.fields.size()) +
                                  " fields");
        const std::string& var = row.fields[0];
        if (var.empty())
            throw ConfigError(range_name, row.line, "empty variable name");
        if (closed.count(var) &&
            (pc.ranges.empty() || pc.ranges.back().name != var))
            throw ConfigError(range_name, row.line,
                              "variable `" + var + "` defined twice");

        double weight = 0.0;
        if (!parse_double(row.fields[3], weight))
            throw ConfigError(range_name, row.line,
                              "non-numeric weight `" + row.fields[3] + "`");

        RangeBucket bucket;
        bucket.weight = weight;
        DateTime lo_date = 0;
        DateTime hi_date = 0;
        const bool lo_is_date = parse_date(row.fields[1], lo_date);
        const bool hi_is_date = parse_date(row.fields[2], hi_date);
        bool is_date = false;
        if (lo_is_date && hi_is_date) {
            is_date = true;
            bucket.lo = static_cast<double>(lo_date);
            bucket.hi = static_cast<double>(hi_date);
        } else if (!lo_is_date && !hi_is_date) {
            if (!parse_double(row.fields[1], bucket.lo) ||
                !parse_double(row.fields[2], bucket.hi))
                throw ConfigError(range_name, row.line,
                                  "bounds are neither dates nor numbers");
        } else {
            throw ConfigError(range_name, row.line,
                              "mixed date and numeric bounds in one bucket");
        }

        if (pc.ranges.empty() || pc.ranges.back().name != var) {
            if (!pc.ranges.empty()) closed.insert(pc.ranges.back().name);
            pc.ranges.push_back(RangeBucketSpec{var, is_date, {}});
        } else if (pc.ranges.back().is_date != is_date) {
            throw ConfigError(range_name, row.line,
                              "variable `" + var +
                                  "` mixes date and numeric buckets");
        }
        pc.ranges.back().buckets.push_back(bucket);
        closed.insert(var);
    }
    return pc;
}

// --- labs -------------------------------------------------------------------

std::vector<LabSpec> load_lab_config(std::string_view text,
                                     const std::string& source_name) {
    std::vector<LabSpec> labs;
    std::unordered_set<std::string> titles;
    for (const CsvRow& row : parse_csv(text)) {
        if (is_header_row(row, {"title", "min", "max", "units"}) ||
            is_header_row(row, {"title", "min", "max", "units", "decimals"}))
            continue;
        if (row.fields.size() != 4 && row.fields.size() != 5)
            throw ConfigError(source_name, row.line,
                              "expected `title,min,max,units[,decimals]`");
        LabSpec lab;
        lab.title = sanitize_text(row.fields[0]);
        if (lab.title.empty())
            throw ConfigError(source_name, row.line, "empty lab title");
        if (!parse_double(row.fields[1], lab.min_value) ||
            !parse_double(row.fields[2], lab.max_value))
            throw ConfigError(source_name, row.line, "non-numeric lab bound");
        if (lab.min_value >= lab.max_value)
            throw ConfigError(source_name, row.line,
                              "lab `" + lab.title + "` has min >= max");
        lab.units = sanitize_text(row.fields[3]);
        if (row.fields.size() == 5) {
            if (!parse_int(row.fields[4], lab.decimals))
                throw ConfigError(source_name, row.line,
                                  "non-integer decimals");
        } else {
            // Display precision is not part of the source table; infer from
            // the range magnitude.
            lab.decimals = (lab.max_value - lab.min_value < 1.0) ? 3 : 1;
        }
        if (!titles.insert(lab.title).second)
            throw ConfigError(source_name, row.line,
                              "duplicate lab title `" + lab.title + "`");
        labs.push_back(std::move(lab));
    }
    return labs;
}

// --- complaints --------------------------------------------------------------

namespace {

SexRestriction parse_sex_restriction(const std::string& s,
                                     const std::string& source_name,
                                     int line) {
    if (s == "none") return SexRestriction::none;
    if (s == "male_only") return SexRestriction::male_only;
    if (s == "female_only") return SexRestriction::female_only;
    throw ConfigError(source_name, line,
                      "sex_restricted must be none|male_only|female_only, "
                      "got `" +
                          s + "`");
}

}  // namespace

ComplaintCatalog load_complaint_catalog(std::string_view text,
                                        const std::string& source_name) {
    ComplaintCatalog catalog;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = (nl == std::string_view::npos)
                                    ? text.substr(pos)
                                    : text.substr(pos, nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        if (stripped == "code,description,weight,categories,sex_restricted")
            continue;

        // Descriptions are free text and may contain commas, so the row is
        // split from both ends: first field is the code, last three are
        // weight, categories and sex_restricted.
        const std::size_t first = line.find(',');
        const std::size_t last = line.rfind(',');
        std::size_t second_last = std::string_view::npos;
        std::size_t third_last = std::string_view::npos;
        if (last != std::string_view::npos && last > 0) {
            second_last = line.rfind(',', last - 1);
            if (second_last != std::string_view::npos && second_last > 0)
                third_last = line.rfind(',', second_last - 1);
        }
        if (first == std::string_view::npos ||
            third_last == std::string_view::npos || third_last <= first)
            throw ConfigError(
                source_name, line_no,
                "expected `code,description,weight,categories,sex_restricted`");

        ComplaintEntry e;
        e.code = trim(line.substr(0, first));
        e.description = sanitize_text(
            trim(line.substr(first + 1, third_last - first - 1)));
        const std::string weight_text =
            trim(line.substr(third_last + 1, second_last - third_last - 1));
        const std::string categories_text =
            trim(line.substr(second_last + 1, last - second_last - 1));
        const std::string sex_text = trim(line.substr(last + 1));

        if (e.code.empty())
            throw ConfigError(source_name, line_no, "empty code");
        if (!parse_double(weight_text, e.weight))
            throw ConfigError(source_name, line_no,
                              "non-numeric weight `" + weight_text + "`");
        if (e.weight < 0.0)
            throw ConfigError(source_name, line_no,
                              "negative weight for code " + e.code);
        std::size_t cpos = 0;
        while (cpos <= categories_text.size() && !categories_text.empty()) {
            const std::size_t semi = categories_text.find(';', cpos);
            const std::string tag =
                trim(semi == std::string::npos
                         ? categories_text.substr(cpos)
                         : categories_text.substr(cpos, semi - cpos));
            if (!tag.empty()) e.categories.push_back(tag);
            if (semi == std::string::npos) break;
            cpos = semi + 1;
        }
        e.sex = parse_sex_restriction(sex_text, source_name, line_no);
        catalog.entries.push_back(std::move(e));
    }

    if (catalog.usable_indices().empty())
        throw ConfigError(source_name + ": no sex-unrestricted entries; "
                          "generation would have nothing to sample");
    if (!(catalog.usable_weight_total() > 0.0))
        throw ConfigError(source_name +
                          ": total weight of usable entries is zero");
    return catalog;
}

// --- params -------------------------------------------------------------------

namespace {

AdmissionCountDist parse_admission_dist(const std::string& text,
                                        const std::string& source_name,
                                        int line) {
    AdmissionCountDist dist;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string item =
            trim(comma == std::string::npos ? text.substr(pos)
                                            : text.substr(pos, comma - pos));
        if (!item.empty()) {
            const std::size_t colon = item.find(':');
            int count = 0;
            double weight = 0.0;
            if (colon == std::string::npos ||
                !parse_int(item.substr(0, colon), count) ||
                !parse_double(item.substr(colon + 1), weight))
                throw ConfigError(source_name, line,
                                  "admission_count_dist entries must be "
                                  "`count:weight`, got `" +
                                      item + "`");
            dist.buckets.emplace_back(count, weight);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (dist.buckets.empty())
        throw ConfigError(source_name, line, "empty admission_count_dist");
    return dist;
}

}  // namespace

GenerationParams load_generation_params(std::string_view text,
                                        const std::string& source_name) {
    GenerationParams params;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = (nl == std::string_view::npos)
                                    ? text.substr(pos)
                                    : text.substr(pos, nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source_name, line_no,
                              "expected `key=value`, got `" + stripped + "`");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));

        if (key == "n_patients") {
            if (!parse_u64(value, params.n_patients))
                throw ConfigError(source_name, line_no, "bad n_patients");
        } else if (key == "master_seed") {
            if (!parse_u64(value, params.master_seed))
                throw ConfigError(source_name, line_no, "bad master_seed");
        } else if (key == "admission_count_dist") {
            params.admission_count_dist =
                parse_admission_dist(value, source_name, line_no);
        } else if (key == "los_days_min") {
            if (!parse_int(value, params.los_days_min))
                throw ConfigError(source_name, line_no, "bad los_days_min");
        } else if (key == "los_days_max") {
            if (!parse_int(value, params.los_days_max))
                throw ConfigError(source_name, line_no, "bad los_days_max");
        } else if (key == "labs_per_type_max") {
            if (!parse_int(value, params.labs_per_type_max))
                throw ConfigError(source_name, line_no,
                                  "bad labs_per_type_max");
        } else if (key == "cutoff_date") {
            if (!parse_date(value, params.cutoff_date))
                throw ConfigError(source_name, line_no,
                                  "bad cutoff_date `" + value + "`");
        } else if (key == "max_age_years") {
            if (!parse_int(value, params.max_age_years))
                throw ConfigError(source_name, line_no, "bad max_age_years");
        } else if (key == "first_admission_offset_years") {
            if (!parse_double(value, params.first_admission_offset_years))
                throw ConfigError(source_name, line_no,
                                  "bad first_admission_offset_years");
        } else {
            throw ConfigError(source_name, line_no,
                              "unknown parameter `" + key + "`");
        }
    }
    return params;
}

ConfigSet load_config_dir(const std::string& dir) {
    ConfigSet cfg;
    const std::string pop_path = dir + "/population.csv";
    const std::string ranges_path = dir + "/population_ranges.csv";
    const std::string labs_path = dir + "/labs.csv";
    const std::string complaints_path = dir + "/complaints.csv";
    const std::string params_path = dir + "/params.cfg";

    cfg.population =
        load_population_config(read_file(pop_path), read_file(ranges_path),
                               "population.csv", "population_ranges.csv");
    cfg.labs = load_lab_config(read_file(labs_path), "labs.csv");
    cfg.catalog =
        load_complaint_catalog(read_file(complaints_path), "complaints.csv");
    cfg.params = load_generation_params(read_file(params_path), "params.cfg");
    return cfg;
}

// --- serialization ------------------------------------------------------------

std::string serialize_categoricals(const PopulationConfig& pc) {
    std::ostringstream out;
    out << "variable,value,weight\n";
    for (const auto& spec : pc.categoricals)
        for (const auto& level : spec.levels)
            out << spec.name << ',' << level.value << ','
                << format_g(level.weight) << '\n';
    return out.str();
}

std::string serialize_ranges(const PopulationConfig& pc) {
    std::ostringstream out;
    out << "variable,min,max,weight\n";
    for (const auto& spec : pc.ranges) {
        for (const auto& b : spec.buckets) {
            if (spec.is_date) {
                out << spec.name << ','
                    << format_date_slash(static_cast<DateTime>(b.lo)) << ','
                    << format_date_slash(static_cast<DateTime>(b.hi)) << ','
                    << format_g(b.weight) << '\n';
            } else {
                out << spec.name << ',' << format_g(b.lo) << ','
                    << format_g(b.hi) << ',' << format_g(b.weight) << '\n';
            }
        }
    }
    return out.str();
}

std::string serialize_labs(const std::vector<LabSpec>& labs) {
    std::ostringstream out;
    out << "title,min,max,units,decimals\n";
    for (const auto& lab : labs)
        out << lab.title << ',' << format_g(lab.min_value) << ','
            << format_g(lab.max_value) << ',' << lab.units << ','
            << lab.decimals << '\n';
    return out.str();
}

std::string serialize_complaints(const ComplaintCatalog& catalog) {
    std::ostringstream out;
    out << "code,description,weight,categories,sex_restricted\n";
    for (const auto& e : catalog.entries) {
        out << e.code << ',' << e.description << ',' << format_g(e.weight)
            << ',';
        for (std::size_t i = 0; i < e.categories.size(); ++i) {
            if (i) out << ';';
            out << e.categories[i];
        }
        out << ',';
        switch (e.sex) {
            case SexRestriction::none: out << "none"; break;
            case SexRestriction::male_only: out << "male_only"; break;
            case SexRestriction::female_only: out << "female_only"; break;
        }
        out << '\n';
    }
    return out.str();
}

std::string serialize_params(const GenerationParams& params) {
    std::ostringstream out;
    out << "n_patients=" << params.n_patients << '\n';
    out << "master_seed=" << params.master_seed << '\n';
    out << "admission_count_dist=";
    for (std::size_t i = 0; i < params.admission_count_dist.buckets.size();
         ++i) {
        const auto& [k, w] = params.admission_count_dist.buckets[i];
        if (i) out << ',';
        out << k << ':' << format_g(w);
    }
    out << '\n';
    out << "los_days_min=" << params.los_days_min << '\n';
    out << "los_days_max=" << params.los_days_max << '\n';
    out << "labs_per_type_max=" << params.labs_per_type_max << '\n';
    const CivilDateTime c = civil_from_datetime(params.cutoff_date);
    char date_buf[16];
    std::snprintf(date_buf, sizeof(date_buf), "%04d-%02d-%02d", c.year,
                  c.month, c.day);
    out << "cutoff_date=" << date_buf << '\n';
    out << "max_age_years=" << params.max_age_years << '\n';
    out << "first_admission_offset_years="
        << format_g(params.first_admission_offset_years) << '\n';
    return out.str();
}

// --- validation ----------------------------------------------------------------

namespace {

void check_weight_sum(const std::string& location, double total,
                      ValidationReport& report) {
    if (std::abs(total - 100.0) > kWeightSumTolerance)
        report.errors.push_back(
            {location, "weights sum to " + format_g(total) + ", expected 100"});
}

}  // namespace

ValidationReport validate(const ConfigSet& config) {
    ValidationReport report;
    const GenerationParams& params = config.params;

    // Categorical variables.
    for (const auto& spec : config.population.categoricals) {
        const std::string loc = "categorical `" + spec.name + "`";
        if (spec.levels.empty()) {
            report.errors.push_back({loc, "has no levels"});
            continue;
        }
        std::set<std::string> seen;
        for (const auto& level : spec.levels) {
            if (level.weight < 0.0)
                report.errors.push_back(
                    {loc, "level `" + level.value + "` has negative weight"});
            if (!seen.insert(level.value).second)
                report.errors.push_back(
                    {loc, "duplicate level value `" + level.value + "`"});
        }
        check_weight_sum(loc, spec.weight_total(), report);
    }

    // Range variables.
    for (const auto& spec : config.population.ranges) {
        const std::string loc = "range `" + spec.name + "`";
        if (spec.buckets.empty()) {
            report.errors.push_back({loc, "has no buckets"});
            continue;
        }
        for (std::size_t i = 0; i < spec.buckets.size(); ++i) {
            const auto& b = spec.buckets[i];
            if (b.weight < 0.0)
                report.errors.push_back({loc, "bucket has negative weight"});
            if (!(b.lo < b.hi))
                report.errors.push_back({loc, "bucket min must be < max"});
            if (i > 0 && spec.buckets[i - 1].hi > b.lo)
                report.errors.push_back(
                    {loc, "buckets overlap or are not sorted ascending"});
        }
        check_weight_sum(loc, spec.weight_total(), report);
    }

    // Required generation variables.
    for (const char* name :
         {kVarGender, kVarMaritalStatus, kVarLanguage, kVarEthnicity}) {
        if (!config.population.find_categorical(name))
            report.errors.push_back({"population",
                                     std::string("missing categorical `") +
                                         name + "`"});
    }
    const RangeBucketSpec* dob = config.population.find_range(kVarDateOfBirth);
    if (!dob) {
        report.errors.push_back(
            {"population", "missing range variable `DateOfBirth`"});
    } else if (!dob->is_date) {
        report.errors.push_back(
            {"range `DateOfBirth`", "buckets must be dates"});
    } else {
        const double day = static_cast<double>(kSecondsPerDay);
        const double horizon =
            static_cast<double>(params.cutoff_date) -
            params.first_admission_offset_years * kSecondsPerYear -
            params.los_days_max * day;
        for (const auto& b : dob->buckets) {
            const DateTime earliest = static_cast<DateTime>(b.lo);
            const int oldest = civil_age_years(earliest, params.cutoff_date);
            if (oldest > params.max_age_years)
                report.errors.push_back(
                    {"range `DateOfBirth`",
                     "bucket starting " + format_date_slash(earliest) +
                         " allows age " + std::to_string(oldest) +
                         " at cutoff, above max_age_years " +
                         std::to_string(params.max_age_years)});
            if (b.hi > horizon)
                report.errors.push_back(
                    {"range `DateOfBirth`",
                     "bucket ending " +
                         format_date_slash(static_cast<DateTime>(b.hi)) +
                         " leaves no admission window before the cutoff"});
        }
    }
    const RangeBucketSpec* poverty = config.population.find_range(kVarPoverty);
    if (!poverty) {
        report.errors.push_back(
            {"population",
             "missing range variable `PopulationPercentageBelowPoverty`"});
    } else if (poverty->is_date) {
        report.errors.push_back(
            {"range `PopulationPercentageBelowPoverty`",
             "buckets must be numeric percentages"});
    } else {
        for (const auto& b : poverty->buckets) {
            if (b.lo < 0.0 || b.hi > 100.0) {
                report.errors.push_back(
                    {"range `PopulationPercentageBelowPoverty`",
                     "buckets must lie within [0, 100]"});
                break;
            }
        }
    }

    // Labs.
    if (config.labs.empty())
        report.errors.push_back({"labs", "lab table is empty"});
    std::set<std::string> lab_titles;
    for (const auto& lab : config.labs) {
        const std::string loc = "lab `" + lab.title + "`";
        if (!(lab.min_value < lab.max_value))
            report.errors.push_back({loc, "min_value must be < max_value"});
        if (lab.decimals < 0 || lab.decimals > 6)
            report.errors.push_back({loc, "decimals must be in [0, 6]"});
        if (!lab_titles.insert(lab.title).second)
            report.errors.push_back({loc, "duplicate title"});
    }

    // Complaint catalog.
    std::set<std::string> codes;
    bool any_unrestricted = false;
    for (const auto& e : config.catalog.entries) {
        if (!codes.insert(e.code).second)
            report.errors.push_back(
                {"catalog", "duplicate code `" + e.code + "`"});
        if (e.weight < 0.0)
            report.errors.push_back(
                {"catalog", "code `" + e.code + "` has negative weight"});
        if (e.sex == SexRestriction::none) any_unrestricted = true;
    }
    if (!any_unrestricted)
        report.errors.push_back(
            {"catalog", "no sex-unrestricted entries to sample from"});
    else if (!(config.catalog.usable_weight_total() > 0.0))
        report.errors.push_back(
            {"catalog", "usable entries have zero total weight"});

    // Generation parameters.
    if (params.los_days_min < 1)
        report.errors.push_back({"params", "los_days_min must be >= 1"});
    if (params.los_days_min > params.los_days_max)
        report.errors.push_back(
            {"params", "los_days_min must be <= los_days_max"});
    if (params.labs_per_type_max < 1)
        report.errors.push_back({"params", "labs_per_type_max must be >= 1"});
    if (params.first_admission_offset_years < 0.0)
        report.errors.push_back(
            {"params", "first_admission_offset_years must be >= 0"});
    if (params.max_age_years < 1)
        report.errors.push_back({"params", "max_age_years must be >= 1"});
    double dist_total = 0.0;
    for (const auto& [k, w] : params.admission_count_dist.buckets) {
        if (k < 1 || k > 10)
            report.errors.push_back(
                {"params", "admission_count_dist support must be within "
                           "1..10, got " +
                               std::to_string(k)});
        if (w < 0.0)
            report.errors.push_back(
                {"params", "admission_count_dist has a negative weight"});
        dist_total += w;
    }
    if (!(dist_total > 0.0))
        report.errors.push_back(
            {"params", "admission_count_dist has zero total weight"});

    return report;
}

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    for (const auto& e : errors)
        out << "error: " << e.location << ": " << e.message << '\n';
    for (const auto& w : warnings)
        out << "warning: " << w.location << ": " << w.message << '\n';
    if (errors.empty() && warnings.empty()) out << "configuration OK\n";
    return out.str();
}

}  // namespace emrsim
