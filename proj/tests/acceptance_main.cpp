// Acceptance suite: ten end-to-end checks, one pass/fail line each.
// Exit code is the number of failed checks.
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <copra/communities.hpp>
#include <copra/measures.hpp>
#include <copra/pipeline.hpp>
#include <copra/propaganda.hpp>
#include <copra/rng.hpp>
#include <copra/simnet.hpp>
#include <copra/stats.hpp>
#include <copra/synth.hpp>

#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

fs::path work_root() {
    static const fs::path root =
        fs::temp_directory_path() / ("copra_accept_" + std::to_string(::getpid()));
    fs::create_directories(root);
    return root;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(COPRA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "<unreadable:" + path + ">";
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. disparity backbone against numerical integration

Outcome check_backbone() {
    copra::Rng rng(101);
    const double alphas[] = {0.01, 0.05, 0.2};
    for (int trial = 0; trial < 100; ++trial) {
        const auto raw = oracles::random_graph(rng, 20, 41);  // <= 19 tree + 41 extra edges
        const copra::WeightedGraph g = oracles::to_graph(raw);
        const auto significances = oracles::edge_significances(raw);
        for (double alpha : alphas) {
            const copra::WeightedGraph kept = copra::backbone(g, {alpha});
            std::set<std::pair<std::string, std::string>> got;
            for (const auto& e : kept.edges()) {
                std::string a = kept.node_ids()[e.a], b = kept.node_ids()[e.b];
                got.insert({std::min(a, b), std::max(a, b)});
            }
            std::set<std::pair<std::string, std::string>> expected;
            for (const auto& e : oracles::backbone_from_significances(significances, alpha))
                expected.insert({std::min(e.a, e.b), std::max(e.a, e.b)});
            if (got != expected)
                return {false, "edge set mismatch on trial " + std::to_string(trial) +
                                   " at alpha " + fmt(alpha)};
        }
    }
    return {true, "100 graphs x 3 alpha levels, exact edge sets"};
}

// ---------------------------------------------------------------------------
// 2. community detection against exhaustive search

Outcome check_louvain() {
    copra::Rng rng(202);
    double min_margin = 1.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto raw = oracles::random_graph(rng, 8, 10);
        const copra::WeightedGraph g = oracles::to_graph(raw);
        const copra::CommunityAssignment assignment = copra::louvain(g);
        const double got = oracles::modularity_reference(g, assignment.labels);
        const double best = oracles::best_modularity_exhaustive(g);
        min_margin = std::min(min_margin, 0.05 - (best - got));
        if (got < best - 0.05)
            return {false, "trial " + std::to_string(trial) + ": modularity " + fmt(got) +
                               " vs optimum " + fmt(best)};
        if (oracles::single_move_improvable(g, assignment.labels))
            return {false, "trial " + std::to_string(trial) + ": single-move improvable"};
    }
    return {true, "50 graphs within 0.05 of exhaustive optimum, locally optimal"};
}

// ---------------------------------------------------------------------------
// 3. dismantling scores against re-simulation

Outcome check_dismantle() {
    copra::Rng rng(303);
    double suite_min = 1.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto raw = oracles::random_graph(rng, 10, 12);
        const copra::WeightedGraph g = oracles::to_graph(raw);
        const copra::CoordinationScores got = copra::dismantle(g);
        const std::map<std::string, double> expected = oracles::dismantle_reference(g);
        if (got != expected) return {false, "score mismatch on trial " + std::to_string(trial)};
        double hi = 0.0;
        for (const auto& [user, score] : got) {
            if (score < 0.0 || score > 1.0)
                return {false, "score outside [0,1] on trial " + std::to_string(trial)};
            hi = std::max(hi, score);
            suite_min = std::min(suite_min, score);
        }
        if (hi != 1.0) return {false, "max score " + fmt(hi) + " on trial " + std::to_string(trial)};
    }
    if (suite_min != 0.0) return {false, "no score reached 0 across the suite"};
    return {true, "20 graphs exact, scores span [0,1] with max 1.0"};
}

// ---------------------------------------------------------------------------
// 4. classifier: held-out accuracy, gradient, regularization path

Outcome check_classifier() {
    const std::string dir = (work_root() / "classifier").string();
    copra::ScenarioConfig scenario;
    copra::CommunityPlan plan;
    plan.size = 10;
    scenario.communities.push_back(plan);
    scenario.training_items = 1000;
    scenario.article_count = 2;
    scenario.chunks_per_user = 1;
    scenario.seed = 404;
    copra::generate(scenario, dir);

    const auto items = copra::load_training_corpus(dir + "/training.jsonl");
    if (items.size() != 1000) return {false, "expected 1000 training items"};
    const std::vector<copra::LabeledItem> train(items.begin(), items.begin() + 800);
    const copra::PropagandaModel model = copra::train_classifier(train, 0.01, 404);

    std::size_t correct = 0;
    for (std::size_t i = 800; i < items.size(); ++i) {
        copra::TextItem item;
        item.item_id = "held" + std::to_string(i);
        item.text = items[i].text;
        if (copra::score_item(model, item).label == (items[i].label == 1)) ++correct;
    }
    const double accuracy = static_cast<double>(correct) / 200.0;
    if (accuracy < 0.95) return {false, "held-out accuracy " + fmt(accuracy)};

    copra::Rng rng(405);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t dim = 4 + rng.below(5);
        const std::size_t count = 6 + rng.below(6);
        std::vector<copra::SparseVector> features(count);
        std::vector<double> targets(count);
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t d = 0; d < dim; ++d)
                if (rng.unit() < 0.6) features[i].emplace_back(d, rng.unit() * 4.0 - 2.0);
            targets[i] = rng.unit() < 0.5 ? 1.0 : -1.0;
        }
        std::vector<std::size_t> order(count);
        std::iota(order.begin(), order.end(), 0);
        const double lambda = 0.05 * (trial + 1);
        const copra::detail::LogisticObjective objective{features, targets, order, lambda, dim};
        std::vector<double> x(dim + 1), grad(dim + 1), scratch(dim + 1);
        for (auto& v : x) v = rng.unit() * 2.0 - 1.0;
        objective(x, grad);
        const double h = 1e-6;
        for (std::size_t d = 0; d <= dim; ++d) {
            std::vector<double> xp = x, xm = x;
            xp[d] += h;
            xm[d] -= h;
            const double fd = (objective(xp, scratch) - objective(xm, scratch)) / (2.0 * h);
            const double scale = std::max({std::abs(grad[d]), std::abs(fd), 1.0});
            if (std::abs(grad[d] - fd) / scale >= 1e-5)
                return {false, "gradient mismatch on trial " + std::to_string(trial) +
                                   " coordinate " + std::to_string(d)};
        }
    }

    const std::vector<copra::LabeledItem> small(items.begin(), items.begin() + 200);
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const copra::PropagandaModel m = copra::train_classifier(small, lambda, 404);
        double norm = 0.0;
        for (double w : m.weights) norm += w * w;
        norm = std::sqrt(norm);
        if (norm > prev * (1.0 + 1e-12))
            return {false, "weight norm grew at lambda " + fmt(lambda)};
        prev = norm;
    }
    return {true, "held-out accuracy " + fmt(accuracy) +
                      ", gradients within 1e-5, norms non-increasing"};
}

// ---------------------------------------------------------------------------
// 5. planted community and propaganda-ordering recovery

std::map<int, int> majority_map(const copra::GroundTruth& truth,
                                const std::map<std::string, int>& detected) {
    std::map<int, std::map<int, int>> overlap;
    for (const auto& [user, planted] : truth.users) {
        auto it = detected.find(user);
        if (it != detected.end()) ++overlap[planted.community][it->second];
    }
    std::map<int, int> mapping;
    for (const auto& [planted_label, counts] : overlap) {
        int best = -1, best_count = -1;
        for (const auto& [label, count] : counts)
            if (count > best_count) {
                best = label;
                best_count = count;
            }
        mapping[planted_label] = best;
    }
    return mapping;
}

Outcome check_planted_recovery() {
    std::vector<double> aris;
    int ordered = 0;
    for (int seed = 1; seed <= 10; ++seed) {
        const std::string dir = (work_root() / ("recovery_" + std::to_string(seed))).string();
        if (run_cli("synth --out " + dir + " --seed " + std::to_string(seed) +
                    " --communities 80:0.9:0.9,60:0.9:0.5,50:0.9:0.1"
                    " --training-items 400 --chunks-per-user 2") != 0)
            return {false, "synth failed for seed " + std::to_string(seed)};
        if (run_cli("run -c " + dir + "/config.ini") != 0)
            return {false, "pipeline failed for seed " + std::to_string(seed)};

        const copra::GroundTruth truth = copra::load_ground_truth(dir + "/ground_truth.json");
        const auto [assignment, scores] =
            copra::load_assignment_csv(dir + "/bundle/assignment.csv");
        std::map<std::string, int> planted;
        for (const auto& [user, p] : truth.users) planted[user] = p.community;
        aris.push_back(oracles::adjusted_rand_index(planted, assignment.labels));

        const auto series = copra::load_trend_csv(dir + "/bundle/trend_M1.csv");
        std::map<std::string, double> at_zero;
        for (const auto& s : series)
            if (!s.points.empty() && s.points.front().k == 0.0 && s.points.front().defined)
                at_zero[s.community] = s.points.front().value;

        const std::map<int, int> mapping = majority_map(truth, assignment.labels);
        if (mapping.size() == 3) {
            std::set<int> distinct;
            for (const auto& [_, label] : mapping) distinct.insert(label);
            if (distinct.size() == 3) {
                std::vector<double> values;
                bool have_all = true;
                for (int planted_label = 0; planted_label < 3; ++planted_label) {
                    const std::string name = assignment.display_name(mapping.at(planted_label));
                    if (!at_zero.count(name)) have_all = false;
                    else values.push_back(at_zero.at(name));
                }
                // planted propaganda rates 0.9 > 0.5 > 0.1
                if (have_all && values[0] > values[1] && values[1] > values[2]) ++ordered;
            }
        }
    }
    std::sort(aris.begin(), aris.end());
    const double median = (aris[4] + aris[5]) / 2.0;
    if (median < 0.9) return {false, "median ARI " + fmt(median)};
    if (ordered < 6)
        return {false, "propaganda ordering held in only " + std::to_string(ordered) + "/10 seeds"};
    return {true, "median ARI " + fmt(median) + ", ordering in " + std::to_string(ordered) +
                      "/10 seeds"};
}

// ---------------------------------------------------------------------------
// 6. correlation-sign recovery from planted gradients

bool correlation_row(const std::string& path, const std::string& community, double& r, double& p) {
    copra::csv::Reader reader(path);
    std::vector<std::string> fields;
    if (!reader.next(fields)) return false;  // header
    while (reader.next(fields)) {
        if (fields.size() < 3 || fields[0] != community) continue;
        if (fields[1].empty() || fields[2].empty()) return false;
        r = std::stod(fields[1]);
        p = std::stod(fields[2]);
        return true;
    }
    return false;
}

Outcome check_correlation_signs() {
    int seeds_ok = 0;
    for (int seed = 1; seed <= 10; ++seed) {
        bool seed_ok = true;
        for (const bool rising : {true, false}) {
            const std::string tag = rising ? "rise" : "fall";
            const std::string dir =
                (work_root() / ("signs_" + tag + "_" + std::to_string(seed))).string();
            fs::create_directories(dir);
            const std::string scenario_path = dir + "/scenario.json";
            {
                std::ofstream out(scenario_path);
                out << "{\n  \"seed\": " << seed << ",\n"
                    << "  \"training_items\": 400,\n  \"chunks_per_user\": 2,\n"
                    << "  \"communities\": [\n"
                    << "    {\"size\": 55, \"rho\": 0.6, \"rho_spread\": 0.8, \"pi\": 0.5, "
                    << "\"pi_gradient\": \"" << (rising ? "rising" : "falling") << "\"},\n"
                    << "    {\"size\": 45, \"rho\": 0.45, \"rho_spread\": 0.5, \"pi\": 0.5, "
                    << "\"pi_gradient\": \"" << (rising ? "falling" : "rising") << "\"}\n"
                    << "  ]\n}\n";
            }
            const std::string out_dir = dir + "/scn";
            if (run_cli("synth --out " + out_dir + " --scenario " + scenario_path) != 0)
                return {false, "synth failed (" + tag + ", seed " + std::to_string(seed) + ")"};
            if (run_cli("run -c " + out_dir + "/config.ini") != 0)
                return {false, "pipeline failed (" + tag + ", seed " + std::to_string(seed) + ")"};

            const copra::GroundTruth truth =
                copra::load_ground_truth(out_dir + "/ground_truth.json");
            const auto [assignment, scores] =
                copra::load_assignment_csv(out_dir + "/bundle/assignment.csv");
            const std::map<int, int> mapping = majority_map(truth, assignment.labels);
            if (!mapping.count(0)) {
                seed_ok = false;
                continue;
            }
            const std::string name = assignment.display_name(mapping.at(0));
            double r = 0.0, p = 1.0;
            if (!correlation_row(out_dir + "/bundle/correlation.csv", name, r, p)) {
                seed_ok = false;
                continue;
            }
            if (rising) seed_ok = seed_ok && r > 0.5 && p < 0.05;
            else seed_ok = seed_ok && r < -0.5 && p < 0.05;
        }
        if (seed_ok) ++seeds_ok;
    }
    if (seeds_ok < 8)
        return {false, "signs recovered in only " + std::to_string(seeds_ok) + "/10 seeds"};
    return {true, "signs recovered in " + std::to_string(seeds_ok) + "/10 seeds"};
}

// ---------------------------------------------------------------------------
// 7. measure arithmetic: exact mean and informativeness bounds

Outcome check_measure_arithmetic() {
    copra::Rng rng(707);
    copra::CommunityAssignment assignment;
    copra::UserPropaganda user_scores;
    copra::CoordinationScores coordination;
    for (int i = 0; i < 1000; ++i) {
        char name[16];
        std::snprintf(name, sizeof name, "u%04d", i);
        assignment.labels[name] = 0;
        user_scores[name] = rng.unit();
        coordination[name] = rng.unit();
    }
    assignment.community_count = 1;

    const std::vector<double> grid = {0.0, 0.37, 0.74};
    const copra::TrendSeries trend = copra::community_trend(user_scores, coordination, assignment,
                                                            0, copra::Phi::mean, grid);
    for (const auto& point : trend.points) {
        if (!point.defined) continue;
        long double sum = 0.0L;
        std::size_t count = 0;
        for (const auto& [user, value] : user_scores) {
            if (coordination.at(user) < point.k) continue;
            sum += value;
            ++count;
        }
        const double expected = static_cast<double>(sum / count);
        if (std::abs(point.value - expected) > 1e-12)
            return {false, "mean deviates by " + fmt(std::abs(point.value - expected)) +
                               " at k " + fmt(point.k)};
    }

    auto series = [](const std::string& name, const std::vector<double>& values) {
        copra::TrendSeries s;
        s.community = name;
        for (std::size_t i = 0; i < values.size(); ++i) {
            copra::TrendPoint p;
            p.k = static_cast<double>(i) / 10.0;
            p.value = values[i];
            p.defined = true;
            p.users = 1;
            s.points.push_back(p);
        }
        return s;
    };
    const std::vector<double> shape = {0.1, 0.3, 0.2, 0.5, 0.4};
    std::vector<double> mirrored;
    for (double v : shape) mirrored.push_back(1.0 - v);

    const double identical =
        copra::informativeness({series("a", shape), series("b", shape)}).informativeness;
    if (std::abs(identical) > 1e-9) return {false, "identical-pair score " + fmt(identical)};
    const double opposite =
        copra::informativeness({series("a", shape), series("b", mirrored)}).informativeness;
    if (std::abs(opposite - 1.0) > 1e-9) return {false, "anticorrelated-pair score " + fmt(opposite)};
    return {true, "mean exact to 1e-12, informativeness bounds 0 and 1"};
}

// ---------------------------------------------------------------------------
// 8. published-table arithmetic: delta formatting and share percentages

Outcome check_table_arithmetic() {
    copra::TrendSeries trend;
    trend.community = "LAB";
    for (double k : copra::default_k_grid()) {
        copra::TrendPoint p;
        p.k = k;
        p.value = k == 0.9 ? 0.359 : 0.285;  // endpoints drive the delta
        p.defined = true;
        trend.points.push_back(p);
    }
    const copra::DeltaStat stat = copra::delta(trend);
    char delta_buf[32], pct_buf[32], share_buf[32];
    std::snprintf(delta_buf, sizeof delta_buf, "%+.3f", stat.delta);
    if (std::string(delta_buf) != "+0.074") return {false, std::string("delta printed ") + delta_buf};
    if (!stat.delta_pct) return {false, "delta percentage missing"};
    std::snprintf(pct_buf, sizeof pct_buf, "%+.1f%%", *stat.delta_pct);
    if (std::string(pct_buf) != "+26.0%")
        return {false, std::string("delta percentage printed ") + pct_buf};
    std::snprintf(share_buf, sizeof share_buf, "%.1f", 100.0 * 179601.0 / 2064041.0);
    if (std::string(share_buf) != "8.7")
        return {false, std::string("distinct share printed ") + share_buf};
    return {true, "+0.074 with +26.0% from baseline 0.285; 179601/2064041 prints 8.7"};
}

// ---------------------------------------------------------------------------
// 9. thread-count invariance of the full bundle

Outcome check_determinism() {
    const std::string one = (work_root() / "threads_one").string();
    const std::string eight = (work_root() / "threads_eight").string();
    const std::string synth_args =
        " --seed 909 --communities 30:0.9:0.8,20:0.85:0.2 --training-items 200"
        " --chunks-per-user 2";
    if (run_cli("synth --out " + one + synth_args) != 0 ||
        run_cli("synth --out " + eight + synth_args) != 0)
        return {false, "scenario generation failed"};
    if (run_cli("run -c " + one + "/config.ini --threads 1") != 0)
        return {false, "single-thread pipeline failed"};
    if (run_cli("run -c " + eight + "/config.ini --threads 8") != 0)
        return {false, "eight-thread pipeline failed"};

    if (slurp(one + "/model.json") != slurp(eight + "/model.json"))
        return {false, "model files differ"};
    std::set<std::string> names_one, names_eight;
    for (const auto& entry : fs::directory_iterator(one + "/bundle"))
        names_one.insert(entry.path().filename().string());
    for (const auto& entry : fs::directory_iterator(eight + "/bundle"))
        names_eight.insert(entry.path().filename().string());
    if (names_one != names_eight) return {false, "bundle inventories differ"};
    for (const auto& name : names_one)
        if (slurp(one + "/bundle/" + name) != slurp(eight + "/bundle/" + name))
            return {false, name + " differs between thread counts"};
    return {true, std::to_string(names_one.size()) + " bundle files byte-identical at 1 vs 8 threads"};
}

// ---------------------------------------------------------------------------
// 10. correlation statistics against frozen references

Outcome check_pearson() {
    struct Case {
        std::vector<double> x, y;
        double r, p;
    };
    static const Case cases[] = {
        {{3.341, -2.752, -2.415, -3.595, -2.639, -4.573, -1.794, -2.711},
         {4.772, -4.793, 4.355, 2.046, 3.626, -0.796, 0.671, -0.311},
         0.48007790695079725, 0.22859834138392139},
        {{0.182, -1.816, -0.859, 2.369, 3.754, -4.174, 0.146, -3.8, 4.79, 0.393, -2.545},
         {-2.861, 4.811, -3.4, -2.949, 1.587, 0.744, 0.754, -1.834, 3.36, 2.088, 4.475},
         0.03536838488590071, 0.91777505437443449},
        {{3.839, -1.089, -3.601, -1.878, 3.744, -2.661, 2.394, 2.881, 0.183, 1.738, -0.217, -4.34},
         {3.342, -3.959, -0.928, 0.793, 1.803, 1.922, 0.827, 1.762, -1.481, -2.736, 1.105, 1.153},
         0.2554822872440253, 0.42287532853901266},
        {{4.341, 3.23, -4.676, 2.45, -4.275, -2.969, 3.562, -4.644, 1.375, 1.199, -1.818, 1.885},
         {-1.739, -4.829, 3.402, -3.471, -4.475, 4.609, 2.663, -3.789, 4.085, 1.949, -2.866, -3.999},
         -0.069094168410025993, 0.83104126959429883},
        {{4.035, -4.902, 1.844, 3.225, 1.526, 4.384, -3.106, 3.676},
         {-2.447, -3.352, 2.373, 4.158, -2.693, 1.992, 2.228, 4.436},
         0.38122232295176645, 0.35144274815040953},
        {{-0.026, 2.059, -2.385, -0.717, 4.897},
         {-2.317, -2.483, -1.732, 3.75, -0.242},
         -0.085327284952623148, 0.89148990345395943},
        {{0.333, 1.544, -2.478, -1.973, -3.999, 1.527, 4.53, 2.966},
         {4.109, 0.455, -4.879, 0.195, 4.347, 0.95, -4.401, 0.222},
         -0.31527442875761953, 0.44686440554100885},
        {{-2.369, 0.465, 4.912, 3.95},
         {-0.595, -0.148, 3.96, 0.658},
         0.80663420824188199, 0.19336579175811801},
        {{-3.098, -3.199, 2.048, 1.964, -1.235},
         {4.982, -2.04, -0.245, 1.594, 4.681},
         -0.18100951998375795, 0.77079630866852857},
        {{-1.474, 3.752, -2.458, 4.941, -1.135, 1.293, 3.363, 3.888, 3.405},
         {3.945, 0.725, -3.552, 2.907, 3.313, -1.066, -1.704, -4.835, -2.03},
         -0.18188323472806747, 0.63953378356879975},
    };
    double worst = 0.0;
    for (const auto& c : cases) {
        const auto res = copra::pearson(c.x, c.y);
        worst = std::max({worst, std::abs(res.r - c.r), std::abs(res.p - c.p)});
        if (std::abs(res.r - c.r) >= 1e-10 || std::abs(res.p - c.p) >= 1e-10)
            return {false, "deviation " + fmt(worst)};
    }
    return {true, "10 fixed pairs, worst deviation " + fmt(worst)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Outcome (*check)();
        double budget_seconds;  // 0 = no limit
    };
    const Criterion criteria[] = {
        {"backbone matches numerical-integration oracle", check_backbone, 10.0},
        {"community detection within 0.05 of exhaustive optimum", check_louvain, 60.0},
        {"dismantling scores match independent re-simulation", check_dismantle, 0.0},
        {"classifier accuracy, gradient and regularization path", check_classifier, 0.0},
        {"planted communities and propaganda ordering recovered", check_planted_recovery, 300.0},
        {"planted correlation signs recovered", check_correlation_signs, 0.0},
        {"measure aggregation arithmetic", check_measure_arithmetic, 0.0},
        {"published-table arithmetic", check_table_arithmetic, 0.0},
        {"bundle byte-identical across thread counts", check_determinism, 0.0},
        {"correlation statistics match frozen references", check_pearson, 0.0},
    };

    int failures = 0;
    int index = 0;
    for (const auto& criterion : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.check();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (outcome.pass && criterion.budget_seconds > 0.0 &&
            elapsed > criterion.budget_seconds) {
            outcome.pass = false;
            outcome.detail += "; over time budget of " + fmt(criterion.budget_seconds) + "s";
        }
        if (!outcome.pass) ++failures;
        std::printf("%s %2d %s (%s; %.1fs)\n", outcome.pass ? "PASS" : "FAIL", index,
                    criterion.name, outcome.detail.c_str(), elapsed);
        std::fflush(stdout);
    }

    std::error_code ec;
    fs::remove_all(work_root(), ec);
    return failures;
}
