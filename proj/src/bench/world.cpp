#include "jobrec/bench/world.hpp"

#include "jobrec/error.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace jobrec::bench {

namespace {

using kgraph::Edge;
using kgraph::Label;
using kgraph::Node;
using kgraph::Relation;
using nlohmann::json;

// Vocabulary the stub rule table and gazetteer understand.
struct FamilySpec {
    const char* name;
    std::vector<const char*> roles;
    std::vector<const char*> skills;
};

const std::vector<FamilySpec>& family_pool() {
    static const std::vector<FamilySpec> f = {
        {"store operations",
         {"Cashier", "Stocker", "Team Lead", "Store Manager", "Department Manager", "Shift Supervisor"},
         {"customer service", "cash handling", "inventory", "scheduling", "visual merchandising"}},
        {"software engineering",
         {"Software Engineer", "Platform Engineer", "Site Reliability Engineer", "Engineering Manager",
          "Frontend Developer", "Backend Developer"},
         {"java", "python", "system design", "git", "code review"}},
        {"applied science",
         {"Data Scientist", "Machine Learning Engineer", "Research Scientist", "Data Analyst", "Applied Scientist",
          "Statistician"},
         {"statistics", "machine learning", "sql", "experimentation", "tensorflow"}},
        {"design",
         {"3D Designer", "UX Designer", "Visual Designer", "Design Manager", "Product Designer", "Illustrator"},
         {"blender", "3d modeling", "figma", "typography", "art direction"}},
        {"merchandising",
         {"Merchant", "Buyer", "Category Manager", "Pricing Analyst", "Assortment Analyst", "Merchandise Manager"},
         {"negotiation", "forecasting", "excel", "pricing", "vendor management"}},
        {"supply chain",
         {"Logistics Coordinator", "Warehouse Associate", "Supply Chain Analyst", "Transportation Manager",
          "Inventory Specialist", "Fulfillment Lead"},
         {"logistics", "routing", "warehouse safety", "procurement", "lean"}},
        {"marketing",
         {"Marketing Specialist", "Brand Manager", "Content Strategist", "Marketing Analyst", "Campaign Manager",
          "Copywriter"},
         {"copywriting", "seo", "branding", "campaign analytics", "social media"}},
        {"finance",
         {"Financial Analyst", "Accountant", "Payroll Specialist", "Finance Manager", "Auditor", "Controller"},
         {"accounting", "budgeting", "auditing", "financial modeling", "payroll"}},
    };
    return f;
}

const std::vector<const char*>& generic_skills() {
    static const std::vector<const char*> s = {"leadership", "communication", "project management",
                                               "analytics", "presentation", "mentoring"};
    return s;
}

const std::vector<std::pair<const char*, const char*>>& city_pool() {
    static const std::vector<std::pair<const char*, const char*>> c = {
        {"Seattle", "West"},   {"Sunnyvale", "West"}, {"Dallas", "Central"}, {"New York", "East"},
        {"Bentonville", "Central"}, {"Boise", "West"}, {"Chicago", "Central"}, {"Atlanta", "East"},
        {"Denver", "West"},    {"Austin", "Central"}, {"Boston", "East"},    {"Hoboken", "East"},
    };
    return c;
}

const char* const kLevels[] = {"", "Senior ", "Lead ", "Principal ", "Staff ", "Chief "};

std::string slug(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else if (!out.empty() && out.back() != '_') out += '_';
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

std::string family_id(const std::string& name) { return "f_" + slug(name); }

std::string padded(const char* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%03zu", prefix, i);
    return buf;
}

std::string iso_date(int year, int month, int day) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
    int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_) < p; }
    double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    template <typename T>
    std::vector<T> sample(std::vector<T> pool, std::size_t k) {
        k = std::min(k, pool.size());
        for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + index(pool.size() - i)]);
        pool.resize(k);
        return pool;
    }

private:
    std::mt19937_64 engine_;
};

const std::string& draw(const std::vector<std::pair<std::string, double>>& dist, Rng& rng) {
    double u = rng.unit();
    for (const auto& [to, p] : dist) {
        if (u < p) return to;
        u -= p;
    }
    return dist.back().first;
}

struct TitleInfo {
    std::string id;
    std::string name;
    std::size_t family;
    int education;
    std::vector<std::string> skills;
};

}  // namespace

void WorldConfig::validate() const {
    auto positive = [](std::size_t v, const char* name) {
        if (v == 0) throw Error(Errc::ConfigInvalid, std::string(name) + " must be positive");
    };
    positive(titles, "titles");
    positive(users, "users");
    positive(families, "families");
    positive(cities, "cities");
    positive(openings_per_title, "openings_per_title");
    positive(targets_per_title, "targets_per_title");
    positive(records_per_title, "records_per_title");
    positive(impressions_per_user, "impressions_per_user");
    positive(shown_per_impression, "shown_per_impression");
    if (titles < 2) throw Error(Errc::ConfigInvalid, "need at least two titles");
    if (families > family_pool().size()) throw Error(Errc::ConfigInvalid, "at most 8 families");
    if (cities > city_pool().size()) throw Error(Errc::ConfigInvalid, "at most 12 cities");
    if (!(modal_probability > 0.0 && modal_probability <= 1.0)) throw Error(Errc::ConfigInvalid, "modal_probability");
    for (double p : {favorite_click_rate, other_click_rate}) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::ConfigInvalid, "click rates must be probabilities");
    }
    if (first_year >= test_year) throw Error(Errc::ConfigInvalid, "first_year must precede test_year");
}

json WorldConfig::to_json() const {
    return {{"titles", titles},
            {"users", users},
            {"families", families},
            {"cities", cities},
            {"openings_per_title", openings_per_title},
            {"targets_per_title", targets_per_title},
            {"modal_probability", modal_probability},
            {"records_per_title", records_per_title},
            {"impressions_per_user", impressions_per_user},
            {"warmup_impressions", warmup_impressions},
            {"shown_per_impression", shown_per_impression},
            {"favorite_click_rate", favorite_click_rate},
            {"other_click_rate", other_click_rate},
            {"history_exchanges", history_exchanges},
            {"first_year", first_year},
            {"test_year", test_year}};
}

WorldConfig WorldConfig::from_json(const json& j) {
    WorldConfig c;
    for (const auto& [k, v] : j.items()) {
        if (!c.to_json().contains(k)) throw Error(Errc::ConfigInvalid, "unknown world config key " + k);
    }
    c.titles = j.value("titles", c.titles);
    c.users = j.value("users", c.users);
    c.families = j.value("families", c.families);
    c.cities = j.value("cities", c.cities);
    c.openings_per_title = j.value("openings_per_title", c.openings_per_title);
    c.targets_per_title = j.value("targets_per_title", c.targets_per_title);
    c.modal_probability = j.value("modal_probability", c.modal_probability);
    c.records_per_title = j.value("records_per_title", c.records_per_title);
    c.impressions_per_user = j.value("impressions_per_user", c.impressions_per_user);
    c.warmup_impressions = j.value("warmup_impressions", c.warmup_impressions);
    c.shown_per_impression = j.value("shown_per_impression", c.shown_per_impression);
    c.favorite_click_rate = j.value("favorite_click_rate", c.favorite_click_rate);
    c.other_click_rate = j.value("other_click_rate", c.other_click_rate);
    c.history_exchanges = j.value("history_exchanges", c.history_exchanges);
    c.first_year = j.value("first_year", c.first_year);
    c.test_year = j.value("test_year", c.test_year);
    c.validate();
    return c;
}

std::vector<TransitionRecord> SyntheticWorld::training() const {
    std::vector<TransitionRecord> out;
    for (const auto& r : transitions) {
        if (r.year < config.test_year) out.push_back(r);
    }
    return out;
}

std::vector<TransitionRecord> SyntheticWorld::test() const {
    std::vector<TransitionRecord> out;
    for (const auto& r : transitions) {
        if (r.year >= config.test_year) out.push_back(r);
    }
    return out;
}

const std::string& SyntheticWorld::modal_next(const std::string& title) const {
    auto it = planted.find(title);
    if (it == planted.end() || it->second.empty()) throw Error(Errc::NodeNotFound, "no planted transitions for " + title);
    return it->second.front().first;
}

SyntheticWorld gen_world(std::uint64_t seed, const WorldConfig& config) {
    config.validate();
    Rng rng(seed);
    SyntheticWorld w;
    w.seed = seed;
    w.config = config;
    auto& out = w.records;

    // Skills and families.
    std::set<std::string> skill_ids;
    for (std::size_t f = 0; f < config.families; ++f) {
        for (const char* s : family_pool()[f].skills) skill_ids.insert(s);
    }
    for (const char* s : generic_skills()) skill_ids.insert(s);
    for (const auto& s : skill_ids) {
        std::string resource = s;
        resource[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(resource[0])));
        out.push_back(Node{s, Label::Skill, {{"name", s}, {"resource", resource + " Fundamentals"}}});
    }
    for (std::size_t f = 0; f < config.families; ++f) {
        out.push_back(Node{family_id(family_pool()[f].name), Label::JobFamily, {{"name", std::string(family_pool()[f].name)}}});
    }

    // Titles.
    std::vector<TitleInfo> titles;
    for (std::size_t i = 0; i < config.titles; ++i) {
        const std::size_t f = i % config.families;
        const auto& spec = family_pool()[f];
        const std::size_t per_family = i / config.families;
        const std::size_t role = per_family % spec.roles.size();
        const std::size_t level = per_family / spec.roles.size();
        std::string name = std::string(kLevels[level % std::size(kLevels)]) + spec.roles[role];
        if (level >= std::size(kLevels)) name += " " + std::to_string(level / std::size(kLevels) + 1);
        TitleInfo t{"t_" + slug(name), name, f, static_cast<int>(std::min<std::size_t>(level + 1, 4)), {}};
        for (const char* s : rng.sample(spec.skills, 3)) t.skills.emplace_back(s);
        t.skills.emplace_back(generic_skills()[rng.index(generic_skills().size())]);
        std::sort(t.skills.begin(), t.skills.end());
        t.skills.erase(std::unique(t.skills.begin(), t.skills.end()), t.skills.end());
        titles.push_back(std::move(t));
    }
    for (const auto& t : titles) {
        const std::string family = family_pool()[t.family].name;
        out.push_back(Node{t.id, Label::JobTitle, {{"title", t.name}, {"job_family", family}}});
        out.push_back(Edge{t.id, family_id(family), Relation::InFamily, 1.0});
        for (const auto& s : t.skills) out.push_back(Edge{t.id, s, Relation::RequiresSkill, 1.0});
    }

    // Planted next-title distributions: the modal target takes
    // modal_probability, the rest share what is left in decreasing steps.
    for (std::size_t i = 0; i < titles.size(); ++i) {
        std::vector<std::size_t> same, other;
        for (std::size_t j = 0; j < titles.size(); ++j) {
            if (j == i) continue;
            (titles[j].family == titles[i].family ? same : other).push_back(j);
        }
        same = rng.sample(same, same.size());
        other = rng.sample(other, other.size());
        std::vector<std::size_t> targets;
        while (targets.size() < config.targets_per_title && (!same.empty() || !other.empty())) {
            auto& pool = (!same.empty() && (other.empty() || rng.chance(0.7))) ? same : other;
            targets.push_back(pool.back());
            pool.pop_back();
        }
        const std::size_t m = targets.size();
        std::vector<std::pair<std::string, double>> dist;
        const double rest = m == 1 ? 0.0 : 1.0 - config.modal_probability;
        const double steps = static_cast<double>((m - 1) * m) / 2.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double p = k == 0 ? (m == 1 ? 1.0 : config.modal_probability)
                                    : rest * static_cast<double>(m - k) / steps;
            dist.emplace_back(titles[targets[k]].id, p);
            out.push_back(Edge{titles[i].id, titles[targets[k]].id, Relation::TransitionsTo, round3(1.0 / p)});
        }
        w.planted[titles[i].id] = std::move(dist);
    }

    // Openings.
    std::vector<std::string> active_openings;
    std::map<std::string, std::size_t> opening_family;
    for (std::size_t i = 0; i < titles.size(); ++i) {
        const auto& t = titles[i];
        for (std::size_t n = 1; n <= config.openings_per_title; ++n) {
            const auto& [city, region] = city_pool()[rng.index(config.cities)];
            const bool active = n == 1 || rng.chance(0.85);
            const std::string id = "o_" + t.id.substr(2) + "_" + std::to_string(n);
            out.push_back(Node{id,
                               Label::Opening,
                               {{"city", std::string(city)},
                                {"region", std::string(region)},
                                {"job_family", std::string(family_pool()[t.family].name)},
                                {"education", std::int64_t{t.education}},
                                {"posting_date", kgraph::Date{iso_date(2026, rng.between(5, 9), rng.between(1, 28))}},
                                {"active", active}}});
            out.push_back(Edge{t.id, id, Relation::HasOpening, 1.0});
            if (active) {
                active_openings.push_back(id);
                opening_family[id] = t.family;
            }
        }
    }

    // Associates: users, then a few mentors.
    const std::size_t mentors = std::max<std::size_t>(1, config.users / 10);
    for (std::size_t u = 0; u < config.users + mentors; ++u) {
        const bool mentor = u >= config.users;
        const auto& t = titles[rng.index(titles.size())];
        const auto& [city, region] = city_pool()[rng.index(config.cities)];
        std::set<std::string> skills;
        for (const auto& s : t.skills) {
            if (mentor || rng.chance(0.6)) skills.insert(s);
        }
        if (!mentor) {
            auto it = skill_ids.begin();
            std::advance(it, static_cast<long>(rng.index(skill_ids.size())));
            skills.insert(*it);
        }
        const int education = std::clamp(t.education + rng.between(-1, 1), 0, agent::kEducationScaleMax);
        const std::string id = mentor ? padded("m_", u - config.users) : padded("u_", u);
        out.push_back(Node{id,
                           Label::Associate,
                           {{"name", id},
                            {"title", t.id},
                            {"city", std::string(city)},
                            {"mentor", mentor},
                            {"education", std::int64_t{education}}}});
        for (const auto& s : skills) out.push_back(Edge{id, s, Relation::HasSkill, 1.0});
        if (mentor) continue;
        agent::UserProfile p;
        p.user_id = id;
        p.current_title = t.id;
        p.skills = std::move(skills);
        p.location = city;
        p.region = region;
        p.education = education;
        w.profiles[id] = std::move(p);
        w.favorite_family[id] = family_pool()[rng.index(config.families)].name;
    }
    w.graph = std::make_shared<const kgraph::KnowledgeGraph>(kgraph::load_graph(out));

    // Click logs from the planted-preference model.
    std::int64_t ts = 1767225600000;  // 2026-01-01
    for (const auto& [user, profile] : w.profiles) {
        const auto& favorite = w.favorite_family.at(user);
        auto& interest = w.interests[user];
        for (std::size_t k = 0; k < config.warmup_impressions + config.impressions_per_user; ++k) {
            tuning::ClickRecord r{user, rng.sample(active_openings, config.shown_per_impression), {}, ts += 1000};
            for (const auto& o : r.shown) {
                const bool fav = family_pool()[opening_family.at(o)].name == favorite;
                if (rng.chance(fav ? config.favorite_click_rate : config.other_click_rate)) r.clicked.push_back(o);
            }
            if (k < config.warmup_impressions) {
                for (const auto& o : r.clicked) interest.record(family_pool()[opening_family.at(o)].name,
                                                                tools::InteractionKind::Click);
            } else {
                w.clicks.records.push_back(std::move(r));
            }
        }
    }

    // Transition records: training years per title, one test-year record per user.
    std::vector<std::string> user_ids;
    for (const auto& [id, p] : w.profiles) user_ids.push_back(id);
    for (const auto& t : titles) {
        for (std::size_t n = 0; n < config.records_per_title; ++n) {
            w.transitions.push_back({user_ids[rng.index(user_ids.size())], t.id, draw(w.planted.at(t.id), rng),
                                     rng.between(config.first_year, config.test_year - 1)});
        }
    }
    for (const auto& [id, p] : w.profiles) {
        w.transitions.push_back({id, p.current_title, draw(w.planted.at(p.current_title), rng), config.test_year});
    }

    // Application fixtures for about half of the users.
    std::vector<tools::ApplicationRecord> apps;
    const tools::Stage stages[] = {tools::Stage::Submitted, tools::Stage::Screening, tools::Stage::Interview,
                                   tools::Stage::Offer, tools::Stage::Rejected};
    for (const auto& id : user_ids) {
        if (!rng.chance(0.5)) continue;
        tools::ApplicationRecord a;
        a.user = id;
        a.opening = active_openings[rng.index(active_openings.size())];
        a.stage = stages[rng.index(std::size(stages))];
        a.updated_ms = 1790000000000 + static_cast<std::int64_t>(rng.index(1000)) * 3600000;
        if (a.stage == tools::Stage::Interview) a.interview_ms = a.updated_ms + 7 * 86400000LL;
        apps.push_back(std::move(a));
    }
    w.applications = tools::ApplicationStore(std::move(apps));

    // Earlier conversations, some relevant to later questions and some not.
    std::map<std::string, std::string> title_name;
    for (const auto& t : titles) title_name[t.id] = t.name;
    for (const auto& [id, p] : w.profiles) {
        const std::vector<std::pair<std::string, std::string>> pool = {
            {"I have worked as a " + title_name.at(p.current_title) + " for " + std::to_string(rng.between(1, 9)) +
                 " years.",
             "Thanks, I will take your experience into account."},
            {"I am most interested in " + w.favorite_family.at(id) + " roles.", "Noted, I will keep that in mind."},
            {"I would prefer to stay in " + p.location + ".", "Understood, I will favour openings near you."},
            {"What is the weather like today?", "I can only help with careers and job search."},
        };
        auto& history = w.histories[id];
        std::int64_t at = 1700000000000 + static_cast<std::int64_t>(rng.index(1000)) * 60000;
        for (const auto& [question, answer] : rng.sample(pool, config.history_exchanges)) {
            history.push_back({agent::Role::User, question, at += 60000});
            history.push_back({agent::Role::Assistant, answer, at += 1000});
        }
    }
    return w;
}

json to_json(const TransitionRecord& r) { return {{"user", r.user}, {"from", r.from}, {"to", r.to}, {"year", r.year}}; }

TransitionRecord transition_from_json(const json& j) {
    return {j.at("user").get<std::string>(), j.at("from").get<std::string>(), j.at("to").get<std::string>(),
            j.at("year").get<int>()};
}

std::map<std::string, std::string> serialize_world(const SyntheticWorld& w) {
    std::map<std::string, std::string> files;
    json planted = json::object();
    for (const auto& [t, dist] : w.planted) {
        for (const auto& [to, p] : dist) planted[t].push_back({{"to", to}, {"p", p}});
    }
    files["world.json"] = json{{"seed", w.seed},
                               {"config", w.config.to_json()},
                               {"favorite_family", w.favorite_family},
                               {"planted", planted}}
                              .dump(2);
    std::ostringstream graph;
    kgraph::write_records(graph, w.records);
    files["graph.jsonl"] = graph.str();
    json profiles = json::object();
    for (const auto& [id, p] : w.profiles) profiles[id] = agent::to_json(p);
    files["profiles.json"] = profiles.dump(2);
    json interests = json::object();
    for (const auto& [id, s] : w.interests) interests[id] = tools::to_json(s);
    files["interests.json"] = interests.dump(2);
    std::ostringstream clicks;
    w.clicks.write(clicks);
    files["clicks.jsonl"] = clicks.str();
    std::string transitions;
    for (const auto& r : w.transitions) transitions += to_json(r).dump() + "\n";
    files["transitions.jsonl"] = transitions;
    files["applications.json"] = w.applications.to_json().dump(2);
    json histories = json::object();
    for (const auto& [id, turns] : w.histories) {
        histories[id] = json::array();
        for (const auto& t : turns) histories[id].push_back(agent::to_json(t));
    }
    files["histories.json"] = histories.dump(2);
    return files;
}

void save_world(const SyntheticWorld& world, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    for (const auto& [name, text] : serialize_world(world)) {
        std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
        if (!(out << text)) throw Error(Errc::InvalidRecord, "cannot write " + dir + "/" + name);
    }
}

SyntheticWorld load_world(const std::string& dir) {
    auto read = [&](const std::string& name) {
        std::ifstream in(std::filesystem::path(dir) / name, std::ios::binary);
        if (!in) throw Error(Errc::InvalidRecord, "cannot read " + dir + "/" + name);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    SyntheticWorld w;
    try {
        const auto meta = json::parse(read("world.json"));
        w.seed = meta.at("seed").get<std::uint64_t>();
        w.config = WorldConfig::from_json(meta.at("config"));
        w.favorite_family = meta.at("favorite_family").get<std::map<std::string, std::string>>();
        for (const auto& [t, dist] : meta.at("planted").items()) {
            for (const auto& d : dist) w.planted[t].emplace_back(d.at("to").get<std::string>(), d.at("p").get<double>());
        }
        std::istringstream graph(read("graph.jsonl"));
        w.records = kgraph::read_records(graph);
        w.graph = std::make_shared<const kgraph::KnowledgeGraph>(kgraph::load_graph(w.records));
        const auto profiles = json::parse(read("profiles.json"));
        for (const auto& [id, p] : profiles.items()) w.profiles[id] = agent::profile_from_json(p);
        const auto interests = json::parse(read("interests.json"));
        for (const auto& [id, s] : interests.items()) w.interests[id] = tools::interest_from_json(s);
        std::istringstream clicks(read("clicks.jsonl"));
        w.clicks = tuning::ClickLog::read(clicks);
        std::istringstream transitions(read("transitions.jsonl"));
        for (std::string line; std::getline(transitions, line);) {
            if (!line.empty()) w.transitions.push_back(transition_from_json(json::parse(line)));
        }
        w.applications = tools::ApplicationStore::from_json(json::parse(read("applications.json")));
        const auto histories = json::parse(read("histories.json"));
        for (const auto& [id, turns] : histories.items()) {
            auto& history = w.histories[id];
            for (const auto& t : turns) history.push_back(agent::turn_from_json(t));
        }
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidRecord, "world " + dir + ": " + e.what());
    }
    return w;
}

}  // namespace jobrec::bench
