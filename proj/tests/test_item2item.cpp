#include <catch2/catch.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <vector>

#include "gradient_check.hpp"
#include "synthetic.hpp"
#include "transrec/item2item.hpp"

using namespace transrec;
namespace fs = std::filesystem;

namespace {

fs::path test_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "transrec_i2i_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::shared_ptr<FeatureMatrix> random_features(std::size_t n_items, std::size_t dim,
                                               std::uint64_t seed) {
    auto fm = std::make_shared<FeatureMatrix>();
    fm->dim = dim;
    fm->rows.resize(n_items);
    Rng rng(seed);
    for (std::uint32_t i = 0; i < n_items; ++i) {
        fm->item_ids.push_back("it" + std::to_string(i));
        for (std::uint32_t c = 0; c < dim; ++c)
            if (rng.uniform() < 0.4) fm->rows[i].emplace_back(c, rng.uniform(0.2, 2.0));
    }
    return fm;
}

// scores from an explicit table, for definitional eval tests
class TableI2I final : public I2IModelBase {
public:
    TableI2I(std::shared_ptr<const FeatureMatrix> fm)
        : I2IModelBase(fm, 0), table_(fm->item_count() * fm->item_count(), 0.0) {}

    double& at(std::uint32_t i, std::uint32_t j) { return table_[i * n_items_ + j]; }

    std::string_view kind() const override { return "table-i2i"; }
    double edge_score(std::uint32_t i, std::uint32_t j) const override {
        return table_[i * n_items_ + j];
    }
    void pair_gradient(const Triple&, std::vector<ParamGrad>&) const override {}
    std::unique_ptr<I2IFrozenScorer> freeze() const override {
        struct F final : I2IFrozenScorer {
            const TableI2I* m;
            void scores_for_head(std::uint32_t head, std::span<double> out) const override {
                for (std::uint32_t j = 0; j < out.size(); ++j) out[j] = m->edge_score(head, j);
            }
        };
        auto f = std::make_unique<F>();
        f->m = this;
        return f;
    }

private:
    std::vector<double> table_;
};

// pairwise edge objective, enumerated exactly (test scale)
double edge_objective(const I2IModelBase& m, const EdgeDataset& ds) {
    double total = 0.0;
    for (auto e : ds.train_edges) {
        const Edge edge = ds.edges[e];
        const double pos = m.edge_score(edge.src, edge.dst);
        for (std::uint32_t j = 0; j < ds.n_items; ++j) {
            if (ds.linked(edge.src, j)) continue;
            total += log_sigmoid(pos - m.edge_score(edge.src, j));
        }
    }
    return total;
}

} // namespace

TEST_CASE("extract_features basics") {
    SECTION("a shared term counts once per document") {
        const std::vector<std::pair<std::string, std::string>> corpus = {
            {"a", "red Bicycle fast"}, {"b", "bicycle slow"}};
        const auto fm = extract_features(corpus, 100);
        REQUIRE(fm.item_count() == 2);
        std::size_t col = fm.dim;
        for (std::size_t c = 0; c < fm.vocab.size(); ++c)
            if (fm.vocab[c] == "bicycle") col = c;
        REQUIRE(col < fm.dim);
        auto count_of = [&](std::size_t row) {
            for (const auto& [c, v] : fm.rows[row])
                if (c == col) return v;
            return 0.0;
        };
        CHECK(count_of(0) == 1.0);
        CHECK(count_of(1) == 1.0);
    }
    SECTION("dim larger than the vocabulary keeps everything") {
        const std::vector<std::pair<std::string, std::string>> corpus = {{"a", "alpha beta"}};
        FeatureOptions opts;
        opts.bigrams = false;
        const auto fm = extract_features(corpus, 5000, opts);
        CHECK(fm.dim == 2);
    }
    SECTION("vocabulary ranking is frequency desc, then lexicographic") {
        const std::vector<std::pair<std::string, std::string>> corpus = {
            {"a", "zebra zebra apple banana"}};
        FeatureOptions opts;
        opts.bigrams = false;
        const auto fm = extract_features(corpus, 2, opts);
        REQUIRE(fm.vocab.size() == 2);
        CHECK(fm.vocab[0] == "zebra");  // frequency 2
        CHECK(fm.vocab[1] == "apple");  // tie at 1, lexicographic
    }
    SECTION("stop-words never enter the vocabulary") {
        const std::vector<std::pair<std::string, std::string>> corpus = {
            {"a", "the quick brown fox and the lazy dog"}};
        const auto fm = extract_features(corpus, 100);
        for (const auto& term : fm.vocab) {
            CHECK(term != "the");
            CHECK(term != "and");
        }
    }
    SECTION("adjacent bigrams are kept") {
        const std::vector<std::pair<std::string, std::string>> corpus = {
            {"a", "sharp knife cuts"}, {"b", "sharp knife"}};
        const auto fm = extract_features(corpus, 100);
        bool has_bigram = false;
        for (const auto& term : fm.vocab) has_bigram |= term == "sharp knife";
        CHECK(has_bigram);
    }
    SECTION("term filter hook prunes candidates") {
        const std::vector<std::pair<std::string, std::string>> corpus = {{"a", "keep drop keep"}};
        FeatureOptions opts;
        opts.bigrams = false;
        opts.term_filter = [](std::string_view t) { return t != "drop"; };
        const auto fm = extract_features(corpus, 100, opts);
        CHECK(fm.vocab == std::vector<std::string>{"keep"});
    }
    SECTION("empty vocabulary is an error") {
        const std::vector<std::pair<std::string, std::string>> corpus = {{"a", "the of and"}};
        CHECK_THROWS_AS(extract_features(corpus, 10), InputError);
    }
}

TEST_CASE("feature file round-trips") {
    const auto fm = random_features(6, 9, 71);
    const auto path = (test_dir() / "features.txt").string();
    save_features(path, *fm);
    const auto loaded = load_features(path);
    CHECK(loaded.dim == fm->dim);
    CHECK(loaded.item_ids == fm->item_ids);
    REQUIRE(loaded.rows.size() == fm->rows.size());
    for (std::size_t r = 0; r < fm->rows.size(); ++r) CHECK(loaded.rows[r] == fm->rows[r]);
}

TEST_CASE("i2i translation score structure") {
    auto fm = random_features(8, 10, 81);

    SECTION("matching embeddings reach the maximal score of zero") {
        I2ITransRecModel m(fm, 4); // E = 0, t = 0: every pair embeds to 0
        CHECK(m.edge_score(1, 2) == 0.0);
    }
    SECTION("t = 0 and f_i = f_j gives zero for any E") {
        auto same = std::make_shared<FeatureMatrix>();
        same->dim = 5;
        same->rows = {{{0, 1.0}, {2, 0.5}}, {{0, 1.0}, {2, 0.5}}};
        same->item_ids = {"x", "y"};
        Rng rng(82);
        auto m = I2ITransRecModel::random_init(same, 3, rng);
        std::fill(m.translation().begin(), m.translation().end(), 0.0);
        CHECK(m.edge_score(0, 1) == Approx(0.0).margin(1e-15));
        CHECK(m.edge_score(0, 1) <= 0.0);
    }
    SECTION("nonzero translation makes scoring directional") {
        Rng rng(83);
        auto m = I2ITransRecModel::random_init(fm, 4, rng);
        std::size_t asymmetric = 0, total = 0;
        for (std::uint32_t i = 0; i < 8; ++i)
            for (std::uint32_t j = 0; j < 8; ++j) {
                if (i == j) continue;
                ++total;
                if (m.edge_score(i, j) != m.edge_score(j, i)) ++asymmetric;
            }
        CHECK(double(asymmetric) / double(total) >= 0.99);
    }
}

TEST_CASE("wnn and lmt score structure") {
    auto fm = random_features(8, 10, 91);

    SECTION("wnn: identical rows score zero; zero weights flatten everything") {
        auto same = std::make_shared<FeatureMatrix>();
        same->dim = 4;
        same->rows = {{{1, 2.0}}, {{1, 2.0}}, {{0, 1.0}}};
        same->item_ids = {"x", "y", "z"};
        WnnModel m(same);
        CHECK(m.edge_score(0, 1) == 0.0);
        std::fill(m.raw_params().begin(), m.raw_params().end(), 0.0);
        CHECK(m.edge_score(0, 2) == 0.0);
        CHECK(m.edge_score(1, 2) == 0.0);
    }
    SECTION("wnn weights start at one, plain Euclidean") {
        WnnModel m(fm);
        for (double w : m.raw_params()) CHECK(w == 1.0);
    }
    SECTION("lmt: zero transform scores zero, symmetric in general") {
        LmtModel zero(fm, 3);
        CHECK(zero.edge_score(2, 5) == 0.0);
        Rng rng(92);
        auto m = LmtModel::random_init(fm, 3, rng);
        for (std::uint32_t i = 0; i < 8; ++i)
            for (std::uint32_t j = 0; j < 8; ++j)
                CHECK(m.edge_score(i, j) == m.edge_score(j, i));
    }
}

TEST_CASE("appending an all-zero feature column changes nothing") {
    auto fm = random_features(6, 7, 93);
    auto widened = std::make_shared<FeatureMatrix>(*fm);
    widened->dim = 8; // extra column, no row touches it

    Rng r1(94), r2(94);
    auto a = I2ITransRecModel::random_init(fm, 3, r1);
    auto b = I2ITransRecModel::random_init(widened, 3, r2);
    // copy the narrow embedding into the wide one, leaving the new row zero
    std::fill(b.raw_params().begin(), b.raw_params().end(), 0.0);
    std::copy(a.raw_params().begin(), a.raw_params().begin() + 7 * 3, b.raw_params().begin());
    std::copy(a.translation().begin(), a.translation().end(), b.translation().begin());

    WnnModel wa(fm), wb(widened);
    LmtModel la(fm, 3), lb(widened, 3);
    Rng r3(95);
    for (auto& x : la.raw_params()) x = r3.uniform(-0.5, 0.5);
    for (std::size_t k = 0; k < 3; ++k)
        std::copy(la.raw_params().begin() + k * 7, la.raw_params().begin() + (k + 1) * 7,
                  lb.raw_params().begin() + k * 8);

    for (std::uint32_t i = 0; i < 6; ++i)
        for (std::uint32_t j = 0; j < 6; ++j) {
            CHECK(a.edge_score(i, j) == Approx(b.edge_score(i, j)).margin(1e-12));
            CHECK(wa.edge_score(i, j) == Approx(wb.edge_score(i, j)).margin(1e-12));
            CHECK(la.edge_score(i, j) == Approx(lb.edge_score(i, j)).margin(1e-12));
        }
}

TEST_CASE("content model gradients match finite differences (spot check)") {
    auto fm = random_features(10, 8, 96);
    Rng rng(97);

    auto random_edge_triple = [&](std::size_t n) {
        Triple t{};
        t.user = 0;
        t.prev = static_cast<std::uint32_t>(rng.uniform_index(n));
        t.pos = static_cast<std::uint32_t>(rng.uniform_index(n));
        do {
            t.neg = static_cast<std::uint32_t>(rng.uniform_index(n));
        } while (t.neg == t.pos);
        return t;
    };

    auto i2i = I2ITransRecModel::random_init(fm, 4, rng);
    for (auto& x : i2i.raw_params()) x = rng.uniform(-0.5, 0.5);
    WnnModel wnn(fm);
    for (auto& x : wnn.raw_params()) x = rng.uniform(0.3, 1.5);
    auto lmt = LmtModel::random_init(fm, 4, rng);
    for (auto& x : lmt.raw_params()) x = rng.uniform(-0.5, 0.5);

    for (int trial = 0; trial < 10; ++trial) {
        for (RankingModel* m : {static_cast<RankingModel*>(&i2i),
                                static_cast<RankingModel*>(&wnn),
                                static_cast<RankingModel*>(&lmt)}) {
            const Triple t = random_edge_triple(10);
            const auto r = gradcheck::compare(*m, t);
            CHECK(r.coords_checked > 0);
            CHECK(r.max_rel_error < 1e-4);
        }
    }
}

TEST_CASE("frozen scorers match direct edge scores") {
    auto fm = random_features(9, 6, 98);
    Rng rng(99);
    auto i2i = I2ITransRecModel::random_init(fm, 3, rng);
    for (auto& x : i2i.raw_params()) x = rng.uniform(-0.6, 0.6);
    auto lmt = LmtModel::random_init(fm, 3, rng);
    WnnModel wnn(fm);
    for (auto& x : wnn.raw_params()) x = rng.uniform(0.2, 1.4);

    for (const I2IModelBase* m : {static_cast<const I2IModelBase*>(&i2i),
                                  static_cast<const I2IModelBase*>(&lmt),
                                  static_cast<const I2IModelBase*>(&wnn)}) {
        const auto frozen = m->freeze();
        std::vector<double> buf(9);
        for (std::uint32_t i = 0; i < 9; ++i) {
            frozen->scores_for_head(i, buf);
            for (std::uint32_t j = 0; j < 9; ++j)
                CHECK(buf[j] == Approx(m->edge_score(i, j)).margin(1e-12));
        }
    }
}

TEST_CASE("edge split partitions the edges reproducibly") {
    auto planted = synthetic::planted_edges(40, 12, 3, 6, 3.0, 55);
    auto& ds = planted.edges;

    std::size_t train = ds.count(EdgePart::Train), val = ds.count(EdgePart::Validation),
                test = ds.count(EdgePart::Test);
    CHECK(train + val + test == ds.edges.size());
    CHECK(double(train) / double(ds.edges.size()) == Approx(0.8).margin(0.08));
    CHECK(double(val) / double(ds.edges.size()) == Approx(0.1).margin(0.06));

    auto copy = ds;
    assign_edge_split(copy, 55);
    CHECK(copy.part == ds.part);
    assign_edge_split(copy, 56);
    CHECK(copy.part != ds.part);
}

TEST_CASE("load_edges resolves ids and rejects unknowns") {
    auto fm = random_features(3, 4, 101);
    const auto path = (test_dir() / "edges.tsv").string();
    std::ofstream(path) << "it0\tit1\nit1\tit2\n";
    const auto ds = load_edges(path, *fm);
    REQUIRE(ds.edges.size() == 2);
    CHECK(ds.edges[0].src == 0);
    CHECK(ds.edges[1].dst == 2);
    CHECK(ds.linked(0, 1));
    CHECK_FALSE(ds.linked(1, 0));

    std::ofstream(path) << "it0\tmystery\n";
    CHECK_THROWS_AS(load_edges(path, *fm), InputError);
}

TEST_CASE("eval_i2i extremes and oracle equivalence") {
    auto planted = synthetic::planted_edges(30, 10, 3, 5, 3.0, 66);
    const auto& ds = planted.edges;
    auto fm = planted.features;

    SECTION("a model scoring true test tails highest reaches AUC 1") {
        TableI2I perfect(fm);
        for (std::size_t e = 0; e < ds.edges.size(); ++e)
            if (ds.part[e] == static_cast<std::uint8_t>(EdgePart::Test))
                perfect.at(ds.edges[e].src, ds.edges[e].dst) = 1.0;
        const auto rep = eval_i2i(perfect, ds, EdgePart::Test, 10);
        CHECK(rep.auc == 1.0);
        CHECK(rep.hit_rate == 1.0);
    }

    SECTION("hit rate is monotone in K") {
        TableI2I m(fm);
        Rng rng(68);
        for (std::uint32_t i = 0; i < 30; ++i)
            for (std::uint32_t j = 0; j < 30; ++j) m.at(i, j) = rng.uniform(0.0, 1.0);
        double prev = 0.0;
        for (std::size_t k = 1; k <= 30; k += 3) {
            const double h = eval_i2i(m, ds, EdgePart::Test, k).hit_rate;
            CHECK(h >= prev);
            prev = h;
        }
    }

    SECTION("random scores match the double-loop oracle") {
        TableI2I m(fm);
        Rng rng(67);
        for (std::uint32_t i = 0; i < 30; ++i)
            for (std::uint32_t j = 0; j < 30; ++j) m.at(i, j) = rng.uniform(-1.0, 1.0);

        const auto rep = eval_i2i(m, ds, EdgePart::Test, 10);

        double auc_sum = 0.0;
        std::size_t n_edges = 0, hits = 0;
        for (std::size_t e = 0; e < ds.edges.size(); ++e) {
            if (ds.part[e] != static_cast<std::uint8_t>(EdgePart::Test)) continue;
            const Edge edge = ds.edges[e];
            const double truth = m.edge_score(edge.src, edge.dst);
            std::size_t wins = 0, n = 0, not_worse = 0;
            for (std::uint32_t j = 0; j < 30; ++j) {
                if (ds.linked(edge.src, j)) continue;
                ++n;
                if (truth > m.edge_score(edge.src, j)) ++wins;
                if (m.edge_score(edge.src, j) >= truth) ++not_worse;
            }
            ++n_edges;
            auc_sum += double(wins) / double(n);
            if (1 + not_worse <= 10) ++hits;
        }
        CHECK(rep.users_evaluated == n_edges);
        CHECK(std::fabs(rep.auc - auc_sum / double(n_edges)) < 1e-12);
        CHECK(std::fabs(rep.hit_rate - double(hits) / double(n_edges)) < 1e-12);
    }
}

TEST_CASE("train_i2i is deterministic and climbs the edge objective") {
    auto planted = synthetic::planted_edges(25, 8, 3, 5, 3.0, 77);
    TrainConfig cfg;
    cfg.k = 3;
    cfg.max_iterations = 4;
    cfg.patience = 4;
    cfg.lambda = 0.0;
    cfg.seed = 5;
    cfg.learning_rate = 0.02;

    std::vector<double> runs[2];
    for (int r = 0; r < 2; ++r) {
        Rng rng(cfg.seed, "init");
        auto m = I2ITransRecModel::random_init(planted.features, cfg.k, rng);
        train_i2i(m, planted.edges, cfg);
        runs[r] = m.raw_params();
    }
    CHECK(runs[0] == runs[1]);

    SECTION("objective increases over training, majority of seeds") {
        int improved = 0;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            Rng rng(seed, "init");
            auto m = I2ITransRecModel::random_init(planted.features, 3, rng);
            const double before = edge_objective(m, planted.edges);
            EdgeTask task(planted.edges);
            Rng sample_rng(seed, "sample");
            for (int step = 0; step < 800; ++step)
                m.sbpr_update(task.sample(sample_rng), 0.01, Regularization::uniform(0.0));
            if (edge_objective(m, planted.edges) > before) ++improved;
        }
        CHECK(improved >= 3);
    }
}

TEST_CASE("i2i model files round-trip through instantiate_i2i") {
    auto fm = random_features(7, 5, 111);
    Rng rng(112);
    auto m = I2ITransRecModel::random_init(fm, 3, rng);
    const auto path = (test_dir() / "i2i.bin").string();
    save_model(path, m, {}, fm->item_ids, {{"seed", "112"}});

    const auto saved = load_saved_model(path);
    const auto restored = instantiate_i2i(saved, fm);
    CHECK(restored->kind() == "i2i-transrec");
    CHECK(restored->raw_params() == m.raw_params());
    CHECK(restored->edge_score(1, 4) == m.edge_score(1, 4));

    SECTION("feature mismatch is rejected") {
        auto other = random_features(8, 5, 113);
        CHECK_THROWS_AS(instantiate_i2i(saved, other), InputError);
    }
}
