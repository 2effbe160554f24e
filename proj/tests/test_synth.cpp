#include <copra/synth.hpp>

#include <copra/communities.hpp>
#include <copra/corpus.hpp>
#include <copra/propaganda.hpp>
#include <copra/simnet.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace copra;

namespace {

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("copra_synth_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }

    std::string str() const { return path.string(); }
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

ScenarioConfig small_scenario(std::uint64_t seed) {
    ScenarioConfig config;
    CommunityPlan a;
    a.size = 12;
    a.rho = 0.9;
    a.pi = 0.8;
    CommunityPlan b;
    b.size = 8;
    b.rho = 0.85;
    b.pi = 0.2;
    config.communities = {a, b};
    config.retweets_min = 10;
    config.retweets_max = 15;
    config.chunks_per_user = 1;
    config.training_items = 40;
    config.article_count = 4;
    config.seed = seed;
    return config;
}

}  // namespace

TEST_CASE("generation is byte-identical for a fixed seed") {
    TempDir d1, d2;
    generate(small_scenario(123), d1.str());
    generate(small_scenario(123), d2.str());
    for (const char* name :
         {"tweets.jsonl", "articles.jsonl", "signals.csv", "training.jsonl", "ground_truth.json"}) {
        INFO(name);
        const auto a = slurp(d1.path / name);
        REQUIRE_FALSE(a.empty());
        REQUIRE(a == slurp(d2.path / name));
    }
}

TEST_CASE("different seeds produce different corpora") {
    TempDir d1, d2;
    generate(small_scenario(1), d1.str());
    generate(small_scenario(2), d2.str());
    REQUIRE(slurp(d1.path / "tweets.jsonl") != slurp(d2.path / "tweets.jsonl"));
}

TEST_CASE("scenario validation rejects malformed plans") {
    TempDir d;
    auto config = small_scenario(0);

    config.communities.clear();
    REQUIRE_THROWS_AS(generate(config, d.str()), Error);

    config = small_scenario(0);
    config.communities[0].size = 1;
    REQUIRE_THROWS_AS(generate(config, d.str()), Error);

    config = small_scenario(0);
    config.communities[0].rho = 1.2;
    REQUIRE_THROWS_AS(generate(config, d.str()), Error);

    config = small_scenario(0);
    config.communities[0].pi = -0.1;
    REQUIRE_THROWS_AS(generate(config, d.str()), Error);

    config = small_scenario(0);
    config.communities[0].rho_spread = 1.5;
    REQUIRE_THROWS_AS(generate(config, d.str()), Error);

    config = small_scenario(0);
    config.communities[0].pi_gradient = "sideways";
    REQUIRE_THROWS_AS(generate(config, d.str()), Error);

    config = small_scenario(0);
    config.user_budget = 10;  // 20 planted users
    REQUIRE_THROWS_WITH(generate(config, d.str()),
                        Catch::Matchers::ContainsSubstring("budget"));

    config = small_scenario(0);
    config.retweets_min = 20;
    config.retweets_max = 10;
    REQUIRE_THROWS_AS(generate(config, d.str()), Error);

    config = small_scenario(0);
    config.training_items = 1;
    REQUIRE_THROWS_AS(generate(config, d.str()), Error);
}

TEST_CASE("ground truth round trips through its json file") {
    TempDir d;
    const auto truth = generate(small_scenario(7), d.str());
    const auto loaded = load_ground_truth(d.str() + "/ground_truth.json");
    REQUIRE(loaded.users.size() == truth.users.size());
    for (const auto& [user, planted] : truth.users) {
        const auto& back = loaded.users.at(user);
        REQUIRE(back.community == planted.community);
        REQUIRE(back.rho == planted.rho);
        REQUIRE(back.pi == planted.pi);
        REQUIRE(back.suspended == planted.suspended);
    }
}

TEST_CASE("planted users split across the configured communities") {
    TempDir d;
    const auto truth = generate(small_scenario(3), d.str());
    std::size_t c0 = 0, c1 = 0;
    for (const auto& [user, planted] : truth.users) {
        if (planted.community == 0) ++c0;
        if (planted.community == 1) ++c1;
    }
    REQUIRE(c0 == 12);
    REQUIRE(c1 == 8);
}

TEST_CASE("high cohesion makes within-community similarity dominate") {
    TempDir d;
    auto config = small_scenario(11);
    config.communities[0].rho = 1.0;
    config.communities[1].rho = 1.0;
    const auto truth = generate(config, d.str());

    const auto corpus = load_corpus(d.str() + "/tweets.jsonl");
    const auto vectors = build_retweet_vectors(corpus, select_superspreaders(corpus, 1.0));
    const auto net = similarity_network(vectors);

    double within = 0.0, cross = 0.0;
    std::size_t within_n = 0, cross_n = 0;
    for (const auto& e : net.edges()) {
        const auto& ua = net.id_of(e.a);
        const auto& ub = net.id_of(e.b);
        auto ia = truth.users.find(ua);
        auto ib = truth.users.find(ub);
        if (ia == truth.users.end() || ib == truth.users.end()) continue;
        if (ia->second.community == ib->second.community) {
            within += e.weight;
            ++within_n;
        } else {
            cross += e.weight;
            ++cross_n;
        }
    }
    REQUIRE(within_n > 0);
    const double within_mean = within / static_cast<double>(within_n);
    const double cross_mean = cross_n == 0 ? 0.0 : cross / static_cast<double>(cross_n);
    REQUIRE(within_mean > cross_mean);
}

TEST_CASE("zero cohesion leaves no significant structure") {
    TempDir d;
    auto config = small_scenario(13);
    config.communities[0].rho = 0.0;
    config.communities[1].rho = 0.0;
    generate(config, d.str());

    const auto corpus = load_corpus(d.str() + "/tweets.jsonl");
    const auto vectors = build_retweet_vectors(corpus, select_superspreaders(corpus, 1.0));
    const auto net = similarity_network(vectors);
    std::size_t kept_nodes = 0;
    try {
        const auto bb = backbone(net, {0.05});
        kept_nodes = bb.node_count();
    } catch (const Error&) {
        // an empty backbone is an acceptable outcome here
    }
    REQUIRE(kept_nodes < net.node_count() / 20 + 1);
}

TEST_CASE("training corpus is balanced and separable by vocabulary") {
    TempDir d;
    generate(small_scenario(17), d.str());
    const auto items = load_training_corpus(d.str() + "/training.jsonl");
    REQUIRE(items.size() == 40);
    std::size_t positives = 0;
    std::set<std::string> prop_vocab, neutral_vocab;
    for (const char* w : detail::propaganda_words()) prop_vocab.insert(w);
    for (const char* w : detail::neutral_words()) neutral_vocab.insert(w);
    for (const auto& item : items) {
        if (item.label == 1) ++positives;
        std::istringstream words(item.text);
        std::string w;
        while (words >> w) {
            if (item.label == 1) REQUIRE(prop_vocab.count(w));
            else REQUIRE(neutral_vocab.count(w));
        }
    }
    REQUIRE(positives == 20);
}

TEST_CASE("signals carry the planted automation and suspension flags") {
    TempDir d;
    auto config = small_scenario(19);
    config.communities[0].automation = 1.0;
    config.communities[0].suspension = 1.0;
    config.communities[1].automation = 0.0;
    config.communities[1].suspension = 0.0;
    const auto truth = generate(config, d.str());

    const auto corpus = load_corpus(d.str() + "/tweets.jsonl", std::nullopt,
                                    std::optional<std::string>(d.str() + "/signals.csv"));
    for (const auto& [user, planted] : truth.users) {
        const auto& signal = corpus.signals.at(user);
        if (planted.community == 0) {
            REQUIRE(signal.suspended);
            REQUIRE(signal.automation_score >= 0.5);
        } else {
            REQUIRE_FALSE(signal.suspended);
        }
    }
}

TEST_CASE("community argument parsing accepts the compact triple form") {
    const auto plans = parse_communities_arg("80:0.9:0.9,60:0.9:0.5,50:0.9:0.1");
    REQUIRE(plans.size() == 3);
    REQUIRE(plans[0].size == 80);
    REQUIRE(plans[0].rho == 0.9);
    REQUIRE(plans[2].pi == 0.1);
    REQUIRE(plans[0].automation == 0.0);

    const auto extended = parse_communities_arg("10:0.5:0.5:0.3:0.2");
    REQUIRE(extended[0].automation == 0.3);
    REQUIRE(extended[0].suspension == 0.2);

    REQUIRE_THROWS_AS(parse_communities_arg(""), Error);
    REQUIRE_THROWS_AS(parse_communities_arg("10:0.5"), Error);
    REQUIRE_THROWS_AS(parse_communities_arg("ten:0.5:0.5"), Error);
}

TEST_CASE("scenario files reject unknown keys") {
    TempDir d;
    const auto path = d.path / "scenario.json";
    {
        std::ofstream out(path);
        out << R"({"seed": 5, "communities": [{"size": 10, "rho": 0.9, "pi": 0.5}]})";
    }
    const auto config = load_scenario(path.string());
    REQUIRE(config.seed == 5);
    REQUIRE(config.communities.size() == 1);
    REQUIRE(config.communities[0].size == 10);

    {
        std::ofstream out(path);
        out << R"({"sede": 5})";
    }
    REQUIRE_THROWS_WITH(load_scenario(path.string()),
                        Catch::Matchers::ContainsSubstring("unknown scenario key"));

    {
        std::ofstream out(path);
        out << R"({"communities": [{"size": 10, "rh": 0.9}]})";
    }
    REQUIRE_THROWS_WITH(load_scenario(path.string()),
                        Catch::Matchers::ContainsSubstring("unknown community key"));
}

TEST_CASE("generated corpus loads cleanly with articles and signals") {
    TempDir d;
    generate(small_scenario(23), d.str());
    const auto corpus = load_corpus(d.str() + "/tweets.jsonl",
                                    std::optional<std::string>(d.str() + "/articles.jsonl"),
                                    std::optional<std::string>(d.str() + "/signals.csv"));
    REQUIRE(corpus.articles.size() == 4);
    REQUIRE(corpus.users.size() >= 20);  // planted users plus pool authors
    std::size_t linked = 0;
    for (const auto& links : corpus.article_links) linked += links.size();
    REQUIRE(linked > 0);
}
