#include "prunetx/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "prunetx/capacity.hpp"
#include "prunetx/config.hpp"
#include "prunetx/errors.hpp"
#include "prunetx/pruning.hpp"
#include "prunetx/simulate.hpp"
#include "prunetx/trellis.hpp"

namespace prunetx {

namespace {

ModKind parse_modulation(const std::string& s) {
    if (s == "qpsk") return ModKind::QPSK;
    if (s == "qam16") return ModKind::QAM16;
    throw ConfigError("field 'modulation': expected qpsk or qam16, got '" + s + "'");
}

CapacityMethod parse_method(const std::string& s) {
    if (s == "lower_bound") return CapacityMethod::ForwardLowerBound;
    if (s == "full") return CapacityMethod::Full;
    if (s == "high_snr") return CapacityMethod::HighSnrLimit;
    throw ConfigError("field 'method': expected lower_bound, full or high_snr, got '" + s + "'");
}

class CsvFile {
  public:
    CsvFile(const std::string& path, const std::string& subcommand, const ExperimentConfig& cfg) {
        out_.open(path, std::ios::binary);  // '\n' endings on every platform
        if (!out_) throw ConfigError("cannot open output file '" + path + "'");
        out_ << "# prunetx " << subcommand << "\n";
        std::stringstream cfgss(cfg.serialize());
        std::string line;
        while (std::getline(cfgss, line)) out_ << "# " << line << "\n";
    }

    void comment(const std::string& line) { out_ << "# " << line << "\n"; }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

std::string replace_suffix(const std::string& path, const std::string& suffix) {
    const std::string ext = ".csv";
    if (path.size() > ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0)
        return path.substr(0, path.size() - ext.size()) + suffix + ext;
    return path + suffix + ext;
}

struct ModelBundle {
    Constellation constellation;
    PulseShape pulse;
    TrellisModel trellis;
};

ModelBundle build_models(const ExperimentConfig& cfg, double alpha) {
    ModelBundle mb;
    mb.constellation = Constellation::make(parse_modulation(cfg.modulation));
    mb.pulse = build_pulse(alpha, cfg.D, cfg.osf);
    mb.trellis = build_trellis(mb.constellation, mb.pulse);
    return mb;
}

int run_taps(const ExperimentConfig& cfg) {
    const PulseShape pulse = build_pulse(cfg.alpha.front(), cfg.D, cfg.osf);
    CsvFile csv(cfg.out, "taps", cfg);
    csv.row({"n", "t", "h"});
    for (int n = 0; n < pulse.length(); ++n)
        csv.row({std::to_string(n), fmt_double(static_cast<double>(n) / pulse.osf),
                 fmt_double(pulse.taps[static_cast<std::size_t>(n)])});
    return 0;
}

int run_trajectory(const ExperimentConfig& cfg) {
    const double alpha = cfg.alpha.front();
    const double eta = cfg.eta.front();
    const std::uint64_t seed = cfg.seeds.front();
    const ModelBundle mb = build_models(cfg, alpha);

    std::optional<PruneSet> prune;
    if (eta > 0.0) {
        const EdgeMetrics metrics = compute_edge_metrics(mb.trellis);
        prune = select_prune_set(metrics, eta, cfg.split);
    }
    const auto inputs = random_symbols(mb.trellis.M(), cfg.n_symbols, seed);
    const EncodeResult enc = encode(mb.trellis, prune ? &*prune : nullptr, inputs);

    CsvFile csv(cfg.out, "trajectory", cfg);
    csv.row({"sample", "t", "re", "im", "mag"});
    for (std::size_t i = 0; i < enc.signal.samples.size(); ++i) {
        const cplx s = enc.signal.samples[i];
        csv.row({std::to_string(i), fmt_double(static_cast<double>(i) / cfg.osf),
                 fmt_double(s.real()), fmt_double(s.imag()), fmt_double(std::abs(s))});
    }
    return 0;
}

int run_papr(const ExperimentConfig& cfg) {
    CsvFile csv(cfg.out, "papr", cfg);
    csv.row({"modulation", "alpha", "D", "osf", "eta", "n_symbols", "seed", "es", "papr_max_db",
             "papr_ccdf_db"});
    for (double alpha : cfg.alpha) {
        const ModelBundle mb = build_models(cfg, alpha);
        std::optional<EdgeMetrics> metrics;
        const bool needs_metrics =
            std::any_of(cfg.eta.begin(), cfg.eta.end(), [](double e) { return e > 0.0; });
        if (needs_metrics) metrics = compute_edge_metrics(mb.trellis);
        for (double eta : cfg.eta) {
            std::optional<PruneSet> prune;
            if (eta > 0.0) prune = select_prune_set(*metrics, eta, cfg.split);
            const PruneSet* ps = prune ? &*prune : nullptr;
            for (std::uint64_t seed : cfg.seeds) {
                const double es = calibrate_es(mb.trellis, ps, 20000, derive_seed(seed, 0xE5ull));
                const PaprEstimate papr = measure_papr_run(mb.trellis, ps, cfg.n_symbols, seed);
                csv.row({cfg.modulation, fmt_double(alpha), std::to_string(cfg.D),
                         std::to_string(cfg.osf), fmt_double(eta), std::to_string(cfg.n_symbols),
                         std::to_string(seed), fmt_double(es), fmt_double(papr.papr_max_db()),
                         fmt_double(papr.papr_ccdf_db())});
            }
        }
    }
    return 0;
}

int run_prune_stats(const ExperimentConfig& cfg) {
    const double alpha = cfg.alpha.front();
    const double eta = cfg.eta.front();
    const ModelBundle mb = build_models(cfg, alpha);
    const EdgeMetrics metrics = compute_edge_metrics(mb.trellis);
    const PruneSet prune = select_prune_set(metrics, eta, cfg.split);

    {
        CsvFile csv(replace_suffix(cfg.out, "_metrics"), "prune-stats", cfg);
        csv.row({"bin_lo", "bin_hi", "count_peak2", "count_min2"});
        constexpr int kBins = 64;
        float top = 0.0f;
        for (float v : metrics.peak2) top = std::max(top, v);
        if (top <= 0.0f) top = 1.0f;
        std::vector<std::uint64_t> cp(kBins, 0), cm(kBins, 0);
        auto bin_of = [&](float v) {
            int b = static_cast<int>(static_cast<double>(v) / top * kBins);
            return std::clamp(b, 0, kBins - 1);
        };
        for (float v : metrics.peak2) ++cp[static_cast<std::size_t>(bin_of(v))];
        for (float v : metrics.min2) ++cm[static_cast<std::size_t>(bin_of(v))];
        for (int b = 0; b < kBins; ++b)
            csv.row({fmt_double(static_cast<double>(top) * b / kBins),
                     fmt_double(static_cast<double>(top) * (b + 1) / kBins),
                     std::to_string(cp[static_cast<std::size_t>(b)]),
                     std::to_string(cm[static_cast<std::size_t>(b)])});
    }
    {
        CsvFile csv(replace_suffix(cfg.out, "_survivors"), "prune-stats", cfg);
        csv.comment("achieved_eta = " + fmt_double(prune.achieved_eta));
        csv.row({"survivors", "count"});
        std::vector<std::uint64_t> lost(mb.trellis.num_states, 0);
        for (std::uint32_t e : prune.pruned_ids) ++lost[e / static_cast<std::uint32_t>(mb.trellis.M())];
        std::vector<std::uint64_t> hist(static_cast<std::size_t>(mb.trellis.M()) + 1, 0);
        for (std::uint64_t l : lost)
            ++hist[static_cast<std::size_t>(mb.trellis.M()) - static_cast<std::size_t>(l)];
        for (int s = 1; s <= mb.trellis.M(); ++s)
            csv.row({std::to_string(s), std::to_string(hist[static_cast<std::size_t>(s)])});
    }
    return 0;
}

int run_capacity(const ExperimentConfig& cfg) {
    const CapacityMethod method = parse_method(cfg.method);
    CsvFile csv(cfg.out, "capacity", cfg);
    csv.row({"modulation", "alpha", "D", "osf", "eta", "method", "es_n0_db", "n_symbols", "bits",
             "std_err"});
    for (double alpha : cfg.alpha) {
        const ModelBundle mb = build_models(cfg, alpha);
        std::optional<EdgeMetrics> metrics;
        const bool needs_metrics =
            std::any_of(cfg.eta.begin(), cfg.eta.end(), [](double e) { return e > 0.0; });
        if (needs_metrics) metrics = compute_edge_metrics(mb.trellis);
        for (double eta : cfg.eta) {
            std::optional<PruneSet> prune;
            if (eta > 0.0) prune = select_prune_set(*metrics, eta, cfg.split);
            const PruneSet* ps = prune ? &*prune : nullptr;
            auto emit = [&](const CapacityEstimate& est) {
                csv.row({cfg.modulation, fmt_double(alpha), std::to_string(cfg.D),
                         std::to_string(cfg.osf), fmt_double(eta), to_string(est.method),
                         fmt_double(est.es_n0_db), std::to_string(est.n_symbols),
                         fmt_double(est.bits_per_symbol), fmt_double(est.std_error)});
            };
            if (method == CapacityMethod::HighSnrLimit) {
                emit(high_snr_limit(mb.trellis, ps));
                continue;
            }
            for (double snr : cfg.es_n0_db)
                for (std::uint64_t seed : cfg.seeds) {
                    const CapacityEstimate est =
                        method == CapacityMethod::Full
                            ? estimate_capacity_full(mb.trellis, ps, snr, cfg.n_symbols,
                                                     cfg.window, seed)
                            : estimate_lower_bound(mb.trellis, ps, snr, cfg.n_symbols, seed);
                    emit(est);
                }
        }
    }
    return 0;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw ConfigError("CSV is missing column '" + name + "'");
    }
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV file '" + path + "'");
    CsvTable tab;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        if (tab.header.empty())
            tab.header = std::move(cells);
        else
            tab.rows.push_back(std::move(cells));
    }
    if (tab.header.empty()) throw ConfigError("CSV file '" + path + "' has no header");
    return tab;
}

int run_report(const ExperimentConfig& cfg, const std::string& papr_path,
               const std::string& capacity_path) {
    const CsvTable papr = read_csv(papr_path);
    const CsvTable cap = read_csv(capacity_path);

    // Mean papr_max_db per (modulation, alpha, D, osf, eta) across seeds.
    struct Acc {
        double sum = 0.0;
        int n = 0;
    };
    std::map<std::string, Acc> papr_by_key;
    const int p_mod = papr.col("modulation"), p_alpha = papr.col("alpha"), p_d = papr.col("D"),
              p_osf = papr.col("osf"), p_eta = papr.col("eta"), p_db = papr.col("papr_max_db");
    for (const auto& r : papr.rows) {
        const std::string key =
            r[p_mod] + "|" + r[p_alpha] + "|" + r[p_d] + "|" + r[p_osf] + "|" + r[p_eta];
        auto& acc = papr_by_key[key];
        acc.sum += std::stod(r[p_db]);
        ++acc.n;
    }

    // Capacity rows grouped by everything but eta; bits averaged over seeds.
    const int c_mod = cap.col("modulation"), c_alpha = cap.col("alpha"), c_d = cap.col("D"),
              c_osf = cap.col("osf"), c_eta = cap.col("eta"), c_method = cap.col("method"),
              c_db = cap.col("es_n0_db"), c_bits = cap.col("bits");
    struct EtaAcc {
        double sum = 0.0;
        int n = 0;
    };
    std::map<std::string, std::map<double, EtaAcc>> groups;
    std::map<std::string, std::vector<std::string>> group_info;
    for (const auto& r : cap.rows) {
        const std::string gkey =
            r[c_method] + "|" + r[c_db] + "|" + r[c_mod] + "|" + r[c_alpha] + "|" + r[c_d] + "|" + r[c_osf];
        auto& acc = groups[gkey][std::stod(r[c_eta])];
        acc.sum += std::stod(r[c_bits]);
        ++acc.n;
        group_info[gkey] = {r[c_mod], r[c_alpha], r[c_d], r[c_osf], r[c_method], r[c_db]};
    }

    CsvFile csv(cfg.out, "report", cfg);
    csv.row({"eta", "papr_db", "rho"});
    bool any = false;
    for (const auto& [gkey, etas] : groups) {
        const auto base = etas.find(0.0);
        if (base == etas.end()) continue;
        const double bits0 = base->second.sum / base->second.n;
        if (!(bits0 > 0.0)) continue;
        const auto& info = group_info[gkey];
        csv.comment("group: modulation=" + info[0] + " alpha=" + info[1] + " D=" + info[2] +
                    " osf=" + info[3] + " method=" + info[4] + " es_n0_db=" + info[5]);
        for (const auto& [eta, acc] : etas) {
            const std::string pkey =
                info[0] + "|" + info[1] + "|" + info[2] + "|" + info[3] + "|" + fmt_double(eta);
            const auto pit = papr_by_key.find(pkey);
            if (pit == papr_by_key.end()) continue;
            const double papr_db = pit->second.sum / pit->second.n;
            const double rho = (acc.sum / acc.n) / bits0;
            csv.row({fmt_double(eta), fmt_double(papr_db), fmt_double(rho)});
            any = true;
        }
    }
    if (!any)
        throw ConfigError("report: no joinable rows (need matching eta values in both CSVs and an "
                          "eta=0 capacity baseline)");
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Trellis-pruned Nyquist-filtered QPSK/16-QAM simulator"};
    app.require_subcommand(1);
    app.footer("Thread count is taken from the PRUNETX_THREADS environment variable.");

    std::string config_path, papr_csv, capacity_csv;
    // Flag values land in a key=value staging list so that flags always
    // override the config file, whatever the parse order.
    std::vector<std::pair<std::string, std::string>> overrides;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value config file");
        for (const char* key : {"modulation", "alpha", "D", "osf", "eta", "split", "es_n0_db",
                                "n_symbols", "seeds", "method", "window", "out"}) {
            const std::string k = key;
            sub->add_option_function<std::string>(
                "--" + k, [&overrides, k](const std::string& v) { overrides.emplace_back(k, v); },
                "override config key '" + k + "'");
        }
    };

    CLI::App* taps = app.add_subcommand("taps", "emit pulse taps as CSV (n,t,h)");
    CLI::App* trajectory =
        app.add_subcommand("trajectory", "emit one encoded run as CSV (sample,t,re,im,mag)");
    CLI::App* papr = app.add_subcommand("papr", "PAPR sweep over alpha x eta x seeds");
    CLI::App* prune_stats = app.add_subcommand(
        "prune-stats", "edge-metric histograms and per-state survivor counts");
    CLI::App* capacity = app.add_subcommand("capacity", "Monte Carlo capacity estimates");
    CLI::App* report = app.add_subcommand("report", "join PAPR and capacity CSVs (eta,papr_db,rho)");
    for (CLI::App* sub : {taps, trajectory, papr, prune_stats, capacity, report}) add_common(sub);
    report->add_option("--papr-csv", papr_csv, "papr subcommand output")->required();
    report->add_option("--capacity-csv", capacity_csv, "capacity subcommand output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = ExperimentConfig::parse_file(config_path);
        for (const auto& [k, v] : overrides) cfg.apply(k, v);
        cfg.validate();

        if (taps->parsed()) return run_taps(cfg);
        if (trajectory->parsed()) return run_trajectory(cfg);
        if (papr->parsed()) return run_papr(cfg);
        if (prune_stats->parsed()) return run_prune_stats(cfg);
        if (capacity->parsed()) return run_capacity(cfg);
        if (report->parsed()) return run_report(cfg, papr_csv, capacity_csv);
        std::cerr << "no subcommand given\n" << app.help() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace prunetx
