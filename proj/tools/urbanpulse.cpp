// urbanpulse: popular-area discovery, report enrichment, site scoring and
// comment reaction analysis from files.
//
// Exit status: 0 success, 1 runtime or data error, 2 configuration error,
// 3 no check-ins left after filtering.

#include <algorithm>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "urbanpulse/pipeline.hpp"

namespace up = urbanpulse::pipeline;

int main(int argc, char** argv) {
    CLI::App app{"Discover popular areas from check-ins and assess them with municipal reports and comments"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags override its keys")->check(CLI::ExistingFile);

    std::map<std::string, std::string> overrides;
    for (const auto& key : up::PipelineConfig::keys()) {
        std::string flag = key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        app.add_option("--" + flag, overrides[key], "config key '" + key + "'");
    }

    struct Command {
        const char* name;
        const char* help;
        up::StageResult (*run)(const up::PipelineConfig&);
    };
    const Command commands[] = {
        {"cluster", "DBSCAN over check-ins: clusters.geojson + clusters_summary.csv", up::cmd_cluster},
        {"enrich", "Join reports to cluster buffers: cluster_stats.csv + category_counts.json", up::cmd_enrich},
        {"score-sites", "Site-suitability matrix and ranking", up::cmd_score_sites},
        {"react", "Relevance-ranked comments with sentiment distributions", up::cmd_react},
        {"pipeline", "All stages plus manifest.json with SHA-256 digests", up::cmd_pipeline},
    };
    for (const auto& c : commands) {
        app.add_subcommand(c.name, c.help);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        up::PipelineConfig config;
        if (!config_path.empty()) {
            config = up::PipelineConfig::load(config_path);
        }
        for (const auto& key : up::PipelineConfig::keys()) {
            std::string flag = key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            if (app.count("--" + flag) > 0) {
                config.set(key, overrides[key]);
            }
        }

        for (const auto& c : commands) {
            if (app.got_subcommand(c.name)) {
                const auto result = c.run(config);
                for (const auto& m : result.messages) {
                    std::cout << m << '\n';
                }
                for (const auto& p : result.outputs) {
                    std::cout << "wrote " << p.string() << '\n';
                }
            }
        }
    } catch (const up::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const up::EmptyDatasetError& e) {
        std::cerr << "empty dataset: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
