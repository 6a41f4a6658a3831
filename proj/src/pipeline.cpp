#include "mosaic/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>
#include <set>
#include <thread>

#include "mosaic/diagnostics.hpp"
#include "mosaic/error.hpp"

namespace mosaic::pipeline {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::set<std::string> selected_members(const std::vector<composition::CompositeService>& ranked) {
    if (ranked.empty()) return {};
    return {ranked.front().members.begin(), ranked.front().members.end()};
}

RelevantGroups groups_in_region(const RelevantGroups& groups, const Candidates& c) {
    std::set<std::string> region;
    for (const auto& s : c.in_region) region.insert(s.id);
    RelevantGroups out;
    for (const auto& g : groups) {
        std::vector<std::string> kept;
        for (const auto& id : g) {
            if (region.contains(id)) kept.push_back(id);
        }
        if (!kept.empty()) out.push_back(std::move(kept));
    }
    return out;
}

}  // namespace

ml::Prediction OracleClassifier::predict(const ml::PairFeatureRow& row) const {
    const bool c = labels_->composable(row.id_a, row.id_b);
    return {c, c ? 1.0 : 0.0};
}

RandomClassifier::RandomClassifier(double rate, std::uint64_t seed) : rate_(rate), seed_(seed) {
    if (!(rate >= 0.0 && rate <= 1.0)) fail(ErrorCode::InvalidArgument, "random classifier rate must be in [0, 1]");
}

ml::Prediction RandomClassifier::predict(const ml::PairFeatureRow& row) const {
    std::uint64_t h = fnv1a(row.id_a);
    h = fnv1a(std::string_view("\0", 1), h);
    h = fnv1a(row.id_b, h);
    const double u = static_cast<double>(splitmix(h ^ splitmix(seed_)) >> 11) * 0x1.0p-53;
    const bool c = u < rate_;
    return {c, c ? 1.0 : 0.0};
}

Candidates gather_candidates(const index::ServiceIndex& index, const geo::SceneQuery& q,
                             const PipelineOptions& opts) {
    geo::validate(q);
    Candidates c;
    c.in_region = index.query(q);
    c.counts.services_indexed = index.services().size();
    c.counts.services_in_region = c.in_region.size();
    if (c.in_region.size() < 2) {
        c.services = c.in_region;
        c.counts.services_after_heuristics = c.services.size();
        return c;
    }
    heuristics::HeuristicOutput out;
    if (opts.heuristics) {
        out = heuristics::run_heuristics(c.in_region, q, {opts.overlap_threshold, opts.top_k});
    } else {
        out = heuristics::pass_through(c.in_region, q);
    }
    c.services = std::move(out.services);
    c.redundant = std::move(out.redundant);
    c.rows = ml::build_feature_rows(out.pairs, c.services, q.center);
    c.counts.services_after_heuristics = c.services.size();
    c.counts.pairs_scored = out.scored_pairs;
    c.counts.pairs_relevant = out.relevant_pairs;
    c.counts.pairs_after_dedupe = c.rows.size();
    return c;
}

std::vector<composition::CompositeService> compose_candidates(const Candidates& c, const geo::SceneQuery& q,
                                                              const ml::Classifier& classifier,
                                                              std::size_t* composable_pairs) {
    composition::ComposabilityGraph g;
    for (const auto& s : c.services) g.add_node(s.id);
    std::size_t n = 0;
    for (const auto& row : c.rows) {
        const auto p = classifier.predict(row);
        if (!p.composable) continue;
        g.add_edge(row.id_a, row.id_b, p.score);
        ++n;
    }
    if (composable_pairs) *composable_pairs = n;
    const auto comps = composition::closure(g, c.services);
    return composition::rank_composites(comps, q);
}

ComposeResult compose(const index::ServiceIndex& index, const geo::SceneQuery& q, const ml::Classifier& classifier,
                      const PipelineOptions& opts) {
    auto cand = gather_candidates(index, q, opts);
    ComposeResult r;
    r.counts = cand.counts;
    r.redundant = cand.redundant;
    if (cand.services.empty()) {
        r.status = cand.in_region.empty() ? ComposeStatus::EmptyRegion : ComposeStatus::NoCandidates;
        return r;
    }
    r.status = ComposeStatus::Composed;
    r.composites = compose_candidates(cand, q, classifier, &r.counts.pairs_composable);
    r.counts.composites = r.composites.size();
    r.counts.selected_members = r.composites.front().members.size();

    const composition::Provenance prov{classifier.name(), opts.heuristics, opts.overlap_threshold};
    const std::size_t n_out = opts.all_components ? r.composites.size() : 1;
    for (std::size_t i = 0; i < n_out; ++i) {
        auto m = composition::layout(r.composites[i], cand.services, q, prov);
        if (auto issue = composition::check_manifest(m, r.composites[i], cand.services)) {
            warn("manifest check: " + *issue);
        }
        r.manifests.push_back(std::move(m));
    }
    return r;
}

// -----------------------------------------------------------------------------

TrainingRows training_rows(const index::ServiceIndex& index, const io::GroundTruthLabels& labels,
                           const std::vector<geo::SceneQuery>& queries, std::uint64_t seed,
                           const PipelineOptions& opts) {
    TrainingRows out;
    out.split = ml::split_dataset(queries.size(), seed);
    auto add_rows = [&](const std::vector<std::size_t>& qs, ml::Dataset& d) {
        for (auto qi : qs) {
            for (const auto& row : gather_candidates(index, queries[qi], opts).rows) {
                d.add(row.values, labels.composable(row.id_a, row.id_b));
            }
        }
    };
    add_rows(out.split.train, out.train);
    add_rows(out.split.validation, out.validation);
    return out;
}

const EvalCell* EvalTable::find(const std::string& model, bool heuristics) const {
    for (const auto& c : cells) {
        if (c.model == model && c.heuristics == heuristics) return &c;
    }
    return nullptr;
}

std::vector<ml::DatasetSplit> query_folds(std::size_t n_queries, std::size_t folds, std::uint64_t seed) {
    if (folds <= 1) return {ml::split_dataset(n_queries, seed)};
    if (folds < 3 || n_queries < folds) {
        fail(ErrorCode::InsufficientData, "rotation needs at least 3 folds and one query per fold");
    }
    std::vector<std::size_t> order(n_queries);
    std::iota(order.begin(), order.end(), std::size_t{0});
    ml::Rng rng(seed);
    rng.shuffle(order);
    std::vector<std::vector<std::size_t>> chunks(folds);
    for (std::size_t i = 0; i < n_queries; ++i) chunks[i * folds / n_queries].push_back(order[i]);
    std::vector<ml::DatasetSplit> out(folds);
    for (std::size_t f = 0; f < folds; ++f) {
        out[f].test = chunks[f];
        out[f].validation = chunks[(f + 1) % folds];
        for (std::size_t g = 0; g < folds; ++g) {
            if (g == f || g == (f + 1) % folds) continue;
            out[f].train.insert(out[f].train.end(), chunks[g].begin(), chunks[g].end());
        }
    }
    return out;
}

EvalTable evaluate_suite(const std::vector<geo::SocSenService>& services, const io::GroundTruthLabels& labels,
                         const std::vector<geo::SceneQuery>& queries, const EvalOptions& opts,
                         const std::vector<RelevantGroups>& scene_truth) {
    if (queries.empty()) fail(ErrorCode::InvalidQuery, "evaluation needs at least one query");
    if (!scene_truth.empty() && scene_truth.size() != queries.size()) {
        fail(ErrorCode::ShapeMismatch, "scene truth needs one entry per query");
    }
    for (const auto& m : opts.models) {
        if (m != "oracle" && m != "random") ml::parse_model_kind(m);
    }
    const index::ServiceIndex index(services);
    const auto folds = query_folds(queries.size(), opts.folds, opts.seed);

    EvalTable table;
    table.queries = queries.size();
    table.services = services.size();
    table.labeled_pairs = labels.size();
    table.folds = folds.size();
    for (const auto& f : folds) {
        table.train_queries += f.train.size();
        table.validation_queries += f.validation.size();
        table.test_queries += f.test.size();
    }

    // Candidates and reference sets depend only on the heuristics setting.
    struct Prepared {
        std::vector<Candidates> cands;
        std::vector<std::set<std::string>> reference;
        std::vector<RelevantGroups> scene;
        std::vector<ml::Dataset> train, validation;  // per fold
    };
    const OracleClassifier oracle(labels);
    std::vector<Prepared> prepared(opts.heuristics.size());
    for (std::size_t h = 0; h < opts.heuristics.size(); ++h) {
        PipelineOptions po = opts.pipeline;
        po.heuristics = opts.heuristics[h];
        auto& p = prepared[h];
        for (const auto& q : queries) {
            p.cands.push_back(gather_candidates(index, q, po));
            p.reference.push_back(p.cands.back().services.empty()
                                      ? std::set<std::string>{}
                                      : selected_members(compose_candidates(p.cands.back(), q, oracle)));
            if (!scene_truth.empty()) p.scene.push_back(groups_in_region(scene_truth[p.scene.size()], p.cands.back()));
        }
        auto rows_of = [&](const std::vector<std::size_t>& qs) {
            ml::Dataset d;
            for (auto qi : qs) {
                for (const auto& row : p.cands[qi].rows) d.add(row.values, labels.composable(row.id_a, row.id_b));
            }
            return d;
        };
        for (const auto& f : folds) {
            p.train.push_back(rows_of(f.train));
            p.validation.push_back(rows_of(f.validation));
        }
    }

    for (const auto& m : opts.models) {
        for (bool h : opts.heuristics) {
            EvalCell cell;
            cell.model = m;
            cell.heuristics = h;
            table.cells.push_back(std::move(cell));
        }
    }

    auto run_cell = [&](EvalCell& cell) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto h = static_cast<std::size_t>(
            std::find(opts.heuristics.begin(), opts.heuristics.end(), cell.heuristics) - opts.heuristics.begin());
        const auto& p = prepared[h];
        try {
            std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
            double sp = 0.0, sr = 0.0, sf = 0.0;
            ml::Metrics scene;
            for (std::size_t f = 0; f < folds.size(); ++f) {
                const auto& train = p.train[f];
                cell.train_rows += train.size();
                cell.validation_rows += p.validation[f].size();
                std::optional<ml::TrainedModel> trained;
                std::optional<RandomClassifier> random;
                const ml::Classifier* classifier = &oracle;
                if (cell.model == "random") {
                    const double rate = train.empty() ? 0.0 : double(train.positives()) / double(train.size());
                    random.emplace(rate, opts.seed);
                    classifier = &*random;
                } else if (cell.model != "oracle") {
                    trained.emplace(
                        ml::train_model(ml::parse_model_kind(cell.model), train, p.validation[f], opts.train));
                    classifier = &*trained;
                }

                for (auto qi : folds[f].test) {
                    const auto& c = p.cands[qi];
                    for (const auto& row : c.rows) {
                        const bool pred = classifier->predict(row).composable;
                        const bool truth = labels.composable(row.id_a, row.id_b);
                        tp += pred && truth;
                        fp += pred && !truth;
                        fn += !pred && truth;
                        tn += !pred && !truth;
                    }
                    cell.test_rows += c.rows.size();
                    if (c.services.empty()) continue;
                    const auto got = selected_members(compose_candidates(c, queries[qi], *classifier));
                    const auto mq = ml::evaluate_sets(got, p.reference[qi]);
                    sp += mq.precision;
                    sr += mq.recall;
                    sf += mq.f1;
                    if (!p.scene.empty()) {
                        const auto ms = ml::evaluate_groups(got, p.scene[qi]);
                        scene.tp += ms.tp;
                        scene.fp += ms.fp;
                        scene.fn += ms.fn;
                        scene.precision += ms.precision;
                        scene.recall += ms.recall;
                        scene.f1 += ms.f1;
                    }
                    ++cell.test_queries;
                }
            }
            cell.pairs = ml::metrics_from_counts(tp, fp, fn, tn);
            if (cell.test_queries == 0) fail(ErrorCode::EmptyEvaluation, "no test query has candidate services");
            const double n = static_cast<double>(cell.test_queries);
            cell.precision = sp / n;
            cell.recall = sr / n;
            cell.f1 = sf / n;
            if (!p.scene.empty()) {
                scene.precision /= n;
                scene.recall /= n;
                scene.f1 /= n;
                cell.scene = scene;
            }
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
        cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    std::size_t threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, table.cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < table.cells.size(); i = next++) run_cell(table.cells[i]);
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return table;
}

}  // namespace mosaic::pipeline
