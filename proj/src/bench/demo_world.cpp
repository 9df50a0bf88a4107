#include "jobrec/bench/demo_world.hpp"

namespace jobrec::bench {

namespace {

using kgraph::Edge;
using kgraph::Label;
using kgraph::Node;
using kgraph::Record;
using kgraph::Relation;

struct TitleSpec {
    const char* id;
    const char* name;
    const char* aliases;
    const char* family;
    int education;
    std::vector<const char*> skills;
};

const std::vector<TitleSpec>& titles() {
    static const std::vector<TitleSpec> t = {
        {"t_cashier", "Cashier", "", "store operations", 0, {"customer service", "cash handling"}},
        {"t_csa", "Customer Service Associate", "csa", "store operations", 0, {"customer service", "inventory"}},
        {"t_team_lead", "Team Lead", "", "store operations", 1, {"leadership", "scheduling", "customer service"}},
        {"t_store_manager", "Store Manager", "", "store operations", 2, {"leadership", "budgeting", "scheduling"}},
        {"t_software_engineer", "Software Engineer", "swe", "software engineering", 2, {"java", "python", "sql", "git"}},
        {"t_senior_software_engineer", "Senior Software Engineer", "", "software engineering", 2,
         {"java", "python", "system design", "git"}},
        {"t_lead_software_engineer", "Lead Software Engineer", "lead engineer", "software engineering", 3,
         {"system design", "leadership", "java", "code review"}},
        {"t_engineering_manager", "Engineering Manager", "", "software engineering", 3,
         {"leadership", "budgeting", "hiring", "system design"}},
        {"t_ml_engineer", "Machine Learning Engineer", "ml engineer", "applied science", 3,
         {"python", "machine learning", "tensorflow", "sql"}},
        {"t_senior_ml_engineer", "Senior Machine Learning Engineer", "senior ml engineer", "applied science", 3,
         {"python", "machine learning", "tensorflow", "system design"}},
        {"t_data_scientist", "Data Scientist", "data science", "applied science", 3,
         {"python", "statistics", "sql", "machine learning"}},
        {"t_senior_data_scientist", "Senior Data Scientist", "", "applied science", 4,
         {"statistics", "machine learning", "python", "experimentation"}},
        {"t_3d_designer", "3D Designer", "", "design", 1, {"blender", "3d modeling", "texturing"}},
        {"t_senior_3d_designer", "Senior 3D Designer", "", "design", 2, {"blender", "3d modeling", "maya"}},
        {"t_principal_3d_designer", "Principal 3D Designer", "", "design", 2, {"maya", "art direction", "3d modeling"}},
        {"t_merchant", "Merchant", "buyer", "merchandising", 2, {"negotiation", "forecasting", "excel"}},
        {"t_senior_merchant", "Senior Merchant", "", "merchandising", 2, {"negotiation", "forecasting", "leadership"}},
        {"t_ecommerce_analyst", "Ecommerce Analyst", "", "ecommerce", 2, {"sql", "excel", "analytics"}},
        {"t_ecommerce_manager", "Ecommerce Manager", "", "ecommerce", 3, {"analytics", "leadership", "budgeting"}},
    };
    return t;
}

struct SkillSpec {
    const char* id;
    const char* resource;
};

const std::vector<SkillSpec>& skills() {
    static const std::vector<SkillSpec> s = {
        {"customer service", "Customer Experience Fundamentals"},
        {"cash handling", "Register Operations Basics"},
        {"inventory", "Inventory Control 101"},
        {"leadership", "Leading Teams"},
        {"scheduling", "Workforce Scheduling"},
        {"budgeting", "Budgeting for Managers"},
        {"java", "Java Programming Path"},
        {"python", "Python for Everyone"},
        {"sql", "SQL Essentials"},
        {"git", "Version Control with Git"},
        {"system design", "System Design Primer"},
        {"code review", "Effective Code Review"},
        {"hiring", "Structured Interviewing"},
        {"machine learning", "Machine Learning Foundations"},
        {"tensorflow", "Deep Learning with TensorFlow"},
        {"statistics", "Applied Statistics"},
        {"experimentation", "A/B Testing in Practice"},
        {"blender", "Blender Bootcamp"},
        {"3d modeling", "3D Modeling Techniques"},
        {"texturing", "Texturing and Materials"},
        {"maya", "Maya for Artists"},
        {"art direction", "Art Direction Studio"},
        {"negotiation", "Supplier Negotiation"},
        {"forecasting", "Demand Forecasting"},
        {"excel", "Excel for Analysts"},
        {"analytics", "Web Analytics"},
    };
    return s;
}

struct Transition {
    const char* from;
    const char* to;
    double weight;
};

const std::vector<Transition>& transitions() {
    static const std::vector<Transition> t = {
        {"t_cashier", "t_csa", 1.0},
        {"t_csa", "t_team_lead", 1.0},
        {"t_team_lead", "t_store_manager", 1.5},
        {"t_csa", "t_ecommerce_analyst", 2.5},
        {"t_team_lead", "t_merchant", 2.0},
        {"t_software_engineer", "t_senior_software_engineer", 1.0},
        {"t_senior_software_engineer", "t_lead_software_engineer", 1.0},
        {"t_lead_software_engineer", "t_engineering_manager", 1.5},
        {"t_senior_software_engineer", "t_ml_engineer", 2.0},
        {"t_senior_software_engineer", "t_engineering_manager", 2.5},
        {"t_software_engineer", "t_ml_engineer", 2.5},
        {"t_ml_engineer", "t_senior_ml_engineer", 1.0},
        {"t_senior_ml_engineer", "t_engineering_manager", 2.0},
        {"t_ml_engineer", "t_data_scientist", 2.0},
        {"t_data_scientist", "t_senior_data_scientist", 1.0},
        {"t_data_scientist", "t_ml_engineer", 1.5},
        {"t_3d_designer", "t_senior_3d_designer", 1.0},
        {"t_senior_3d_designer", "t_principal_3d_designer", 1.5},
        {"t_merchant", "t_senior_merchant", 1.0},
        {"t_merchant", "t_ecommerce_analyst", 1.5},
        {"t_ecommerce_analyst", "t_ecommerce_manager", 1.0},
        {"t_senior_merchant", "t_ecommerce_manager", 1.5},
        {"t_ecommerce_analyst", "t_data_scientist", 2.5},
    };
    return t;
}

const std::map<std::string, std::string>& regions() {
    static const std::map<std::string, std::string> r = {
        {"Seattle", "West"},      {"Sunnyvale", "West"}, {"Boise", "West"},    {"Bentonville", "Central"},
        {"Dallas", "Central"},    {"New York", "East"},  {"Hoboken", "East"},
    };
    return r;
}

struct OpeningSpec {
    const char* title;
    const char* city;
    bool active;
    const char* posted;
};

const std::vector<OpeningSpec>& openings() {
    static const std::vector<OpeningSpec> o = {
        {"t_cashier", "Bentonville", true, "2026-09-01"},
        {"t_cashier", "Dallas", true, "2026-09-03"},
        {"t_csa", "Dallas", true, "2026-08-20"},
        {"t_csa", "Boise", true, "2026-09-10"},
        {"t_team_lead", "Dallas", true, "2026-09-12"},
        {"t_team_lead", "Bentonville", true, "2026-08-28"},
        {"t_store_manager", "Boise", true, "2026-09-05"},
        {"t_store_manager", "Hoboken", false, "2026-06-01"},
        {"t_software_engineer", "Seattle", true, "2026-09-14"},
        {"t_software_engineer", "Bentonville", true, "2026-09-02"},
        {"t_senior_software_engineer", "Seattle", true, "2026-09-11"},
        {"t_senior_software_engineer", "Sunnyvale", true, "2026-08-30"},
        {"t_senior_software_engineer", "Hoboken", true, "2026-09-09"},
        {"t_lead_software_engineer", "Seattle", true, "2026-09-15"},
        {"t_lead_software_engineer", "Bentonville", true, "2026-09-08"},
        {"t_lead_software_engineer", "Sunnyvale", true, "2026-09-01"},
        {"t_engineering_manager", "Sunnyvale", true, "2026-09-13"},
        {"t_engineering_manager", "Seattle", true, "2026-09-04"},
        {"t_ml_engineer", "Seattle", true, "2026-09-16"},
        {"t_ml_engineer", "Seattle", true, "2026-09-07"},
        {"t_ml_engineer", "Seattle", true, "2026-08-25"},
        {"t_ml_engineer", "Seattle", false, "2026-05-12"},
        {"t_ml_engineer", "Sunnyvale", true, "2026-09-06"},
        {"t_ml_engineer", "Sunnyvale", false, "2026-04-30"},
        {"t_senior_ml_engineer", "Sunnyvale", true, "2026-09-10"},
        {"t_senior_ml_engineer", "Seattle", true, "2026-09-02"},
        {"t_data_scientist", "Dallas", true, "2026-09-12"},
        {"t_data_scientist", "Dallas", true, "2026-08-29"},
        {"t_data_scientist", "New York", true, "2026-09-03"},
        {"t_senior_data_scientist", "New York", true, "2026-09-14"},
        {"t_senior_data_scientist", "Bentonville", true, "2026-09-01"},
        {"t_3d_designer", "Hoboken", true, "2026-09-11"},
        {"t_3d_designer", "Sunnyvale", true, "2026-08-27"},
        {"t_senior_3d_designer", "Hoboken", true, "2026-09-05"},
        {"t_principal_3d_designer", "Sunnyvale", true, "2026-09-09"},
        {"t_merchant", "Bentonville", true, "2026-09-13"},
        {"t_merchant", "New York", true, "2026-09-02"},
        {"t_senior_merchant", "Bentonville", true, "2026-09-07"},
        {"t_ecommerce_analyst", "Hoboken", true, "2026-09-15"},
        {"t_ecommerce_analyst", "Bentonville", true, "2026-09-06"},
        {"t_ecommerce_manager", "Hoboken", true, "2026-09-10"},
    };
    return o;
}

struct AssociateSpec {
    const char* id;
    const char* name;
    const char* title;
    const char* city;
    bool mentor;
    int education;
    std::vector<const char*> skills;
};

const std::vector<AssociateSpec>& associates() {
    static const std::vector<AssociateSpec> a = {
        {"u_alex", "Alex", "t_senior_software_engineer", "Seattle", false, 2, {"java", "python", "git", "system design"}},
        {"u_sam", "Sam", "t_cashier", "Dallas", false, 0, {"customer service", "cash handling"}},
        {"u_jordan", "Jordan", "t_data_scientist", "Bentonville", false, 3, {"python", "statistics", "sql"}},
        {"u_riley", "Riley", "t_3d_designer", "Hoboken", false, 1, {"blender", "3d modeling"}},
        {"u_taylor", "Taylor", "t_merchant", "Bentonville", false, 2, {"negotiation", "excel"}},
        {"m_priya", "Priya", "t_senior_ml_engineer", "Seattle", true, 3,
         {"python", "machine learning", "tensorflow", "system design"}},
        {"m_omar", "Omar", "t_engineering_manager", "Sunnyvale", true, 3,
         {"leadership", "hiring", "budgeting", "system design"}},
        {"m_lin", "Lin", "t_senior_data_scientist", "New York", true, 4,
         {"statistics", "experimentation", "machine learning", "python"}},
        {"m_kate", "Kate", "t_principal_3d_designer", "Sunnyvale", true, 2, {"maya", "art direction", "3d modeling"}},
        {"m_diego", "Diego", "t_store_manager", "Boise", true, 2, {"leadership", "budgeting", "scheduling"}},
        {"m_ana", "Ana", "t_ecommerce_manager", "Hoboken", true, 3, {"analytics", "leadership", "sql"}},
        {"m_raj", "Raj", "t_lead_software_engineer", "Bentonville", true, 3, {"code review", "system design", "java"}},
    };
    return a;
}

std::string family_id(const std::string& name) {
    std::string id = "f_";
    for (char c : name) id += c == ' ' ? '_' : c;
    return id;
}

}  // namespace

std::vector<Record> demo_world_records() {
    std::vector<Record> out;
    for (const auto& s : skills()) {
        out.push_back(Node{s.id, Label::Skill, {{"name", std::string(s.id)}, {"resource", std::string(s.resource)}}});
    }
    std::map<std::string, bool> families;
    for (const auto& t : titles()) families[t.family] = true;
    for (const auto& [f, _] : families) {
        out.push_back(Node{family_id(f), Label::JobFamily, {{"name", f}}});
    }
    std::map<std::string, const TitleSpec*> by_id;
    for (const auto& t : titles()) {
        by_id[t.id] = &t;
        Node n{t.id, Label::JobTitle, {{"title", std::string(t.name)}, {"job_family", std::string(t.family)}}};
        if (*t.aliases) n.properties["aliases"] = std::string(t.aliases);
        out.push_back(std::move(n));
        out.push_back(Edge{t.id, family_id(t.family), Relation::InFamily, 1.0});
        for (const char* s : t.skills) out.push_back(Edge{t.id, s, Relation::RequiresSkill, 1.0});
    }
    for (const auto& tr : transitions()) out.push_back(Edge{tr.from, tr.to, Relation::TransitionsTo, tr.weight});

    std::map<std::string, int> seq;
    for (const auto& o : openings()) {
        const auto& t = *by_id.at(o.title);
        const std::string id = "o_" + std::string(o.title + 2) + "_" + std::to_string(++seq[o.title]);
        out.push_back(Node{id,
                           Label::Opening,
                           {{"city", std::string(o.city)},
                            {"region", regions().at(o.city)},
                            {"job_family", std::string(t.family)},
                            {"education", std::int64_t{t.education}},
                            {"posting_date", kgraph::Date{o.posted}},
                            {"active", o.active}}});
        out.push_back(Edge{o.title, id, Relation::HasOpening, 1.0});
    }
    for (const auto& a : associates()) {
        out.push_back(Node{a.id,
                           Label::Associate,
                           {{"name", std::string(a.name)},
                            {"title", std::string(a.title)},
                            {"city", std::string(a.city)},
                            {"mentor", a.mentor},
                            {"education", std::int64_t{a.education}}}});
        for (const char* s : a.skills) out.push_back(Edge{a.id, s, Relation::HasSkill, 1.0});
    }
    return out;
}

kgraph::KnowledgeGraph demo_world() { return kgraph::load_graph(demo_world_records()); }

std::map<std::string, agent::UserProfile> demo_profiles() {
    std::map<std::string, agent::UserProfile> out;
    for (const auto& a : associates()) {
        if (a.mentor) continue;
        agent::UserProfile p;
        p.user_id = a.id;
        p.current_title = a.title;
        for (const char* s : a.skills) p.skills.insert(s);
        p.location = a.city;
        p.region = regions().at(a.city);
        p.education = a.education;
        out[a.id] = std::move(p);
    }
    return out;
}

tools::ApplicationStore demo_applications() {
    // 2026-10-02 15:00 UTC and 2026-10-20 17:30 UTC.
    return tools::ApplicationStore({
        {"u_alex", "o_ml_engineer_1", tools::Stage::Interview, 1790953200000, 1792517400000},
        {"u_alex", "o_lead_software_engineer_2", tools::Stage::Submitted, 1790000000000, std::nullopt},
        {"u_jordan", "o_senior_data_scientist_1", tools::Stage::Screening, 1790500000000, std::nullopt},
    });
}

}  // namespace jobrec::bench
