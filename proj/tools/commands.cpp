#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cqm/cqs.hpp"
#include "cqm/decomposition.hpp"
#include "cqm/errors.hpp"
#include "cqm/galois.hpp"
#include "cqm/mub.hpp"
#include "cqm/qgroups.hpp"

namespace cqm::cli
{

    namespace fs = std::filesystem;

    namespace
    {
        // Bump when the layout of cached files changes.
        constexpr int cache_version = 1;

        struct Usage : UsageError
        {
            using UsageError::UsageError;
        };

        void require_dim(const RunConfig &cfg)
        {
            if (cfg.dim < 2)
                throw Usage("--dim must be at least 2");
            if (cfg.max_closure == 0)
                throw Usage("--max-closure must be positive");
            if (cfg.threads == 0)
                throw Usage("--threads must be positive");
        }

        void fail(Outcome &o, int code, const std::string &kind, const std::string &message, Json details = Json::object())
        {
            o.code = code;
            o.doc["failure"] = {{"kind", kind}, {"message", message}, {"details", std::move(details)}};
        }

        std::string read_file(const std::string &path)
        {
            std::ifstream in(path, std::ios::binary);
            if (!in)
                throw Usage("cannot read " + path);
            std::ostringstream s;
            s << in.rdbuf();
            return s.str();
        }

        void write_file(const std::string &path, const std::string &text)
        {
            std::ofstream out(path, std::ios::binary);
            if (!out || !(out << text))
                throw Usage("cannot write " + path);
        }

        std::optional<Json> cache_load(const std::string &name)
        {
            std::ifstream in(cache_dir() / name);
            if (!in)
                return std::nullopt;
            try
            {
                Json j = Json::parse(in);
                if (j.value("cache_version", 0) != cache_version)
                    return std::nullopt;
                j.erase("cache_version");
                return j;
            }
            catch (const nlohmann::json::exception &)
            {
                return std::nullopt;
            }
        }

        // Best effort: an unwritable cache directory is not an error.
        void cache_store(const std::string &name, Json j)
        {
            std::error_code ec;
            fs::create_directories(cache_dir(), ec);
            if (ec)
                return;
            j["cache_version"] = cache_version;
            auto tmp = cache_dir() / (name + ".tmp");
            {
                std::ofstream out(tmp);
                if (!out || !(out << j.dump()))
                    return;
            }
            fs::rename(tmp, cache_dir() / name, ec);
        }

        // Phi_m is recomputed every run; a cached copy that disagrees signals corruption.
        void check_phi_cache(std::uint32_t m, bool use)
        {
            if (!use)
                return;
            const auto &poly = CyclotomicField::get(m).cyclotomic_poly();
            const std::string name = "phi-" + std::to_string(m) + ".json";
            if (auto j = cache_load(name))
            {
                if (j->at("coeffs").get<std::vector<std::int64_t>>() != poly)
                    throw IntegrityError("cached Phi_" + std::to_string(m) + " differs from the computed polynomial");
                return;
            }
            cache_store(name, Json{{"m", m}, {"coeffs", poly}});
        }

        Json parse(const std::string &text) { return Json::parse(text); }

        struct Check
        {
            std::string name;
            Json expected, actual;
            bool pass() const { return expected == actual; }
        };

        Json checks_json(const std::vector<Check> &checks)
        {
            Json arr = Json::array();
            for (const auto &c : checks)
                arr.push_back({{"name", c.name}, {"expected", c.expected}, {"actual", c.actual}, {"pass", c.pass()}});
            return arr;
        }

        std::vector<std::size_t> sorted(std::vector<std::size_t> v)
        {
            std::sort(v.begin(), v.end());
            return v;
        }

        // Reference numbers for the dimension-2 and dimension-3 runs.
        std::vector<Check> calibration(std::uint32_t N, const std::vector<StepReport> &steps)
        {
            std::vector<Check> out;
            for (const auto &s : steps)
            {
                const std::string at = "step " + std::to_string(s.step) + " ";
                if (N == 2 && s.step == 0)
                    out.push_back({at + "states", 6, s.total});
                if (N == 2 && s.step == 1)
                {
                    out.push_back({at + "candidates", 48, s.candidates.fresh});
                    out.push_back({at + "kept", 24, s.kept});
                    out.push_back({at + "new orbit sizes", std::vector<std::size_t>{24}, sorted(s.new_orbit_sizes)});
                }
                if (N == 2 && s.step == 2)
                    out.push_back({at + "new orbit sizes", std::vector<std::size_t>(16, 24), sorted(s.new_orbit_sizes)});
                if (N == 3 && s.step == 0)
                    out.push_back({at + "states", 12, s.total});
                if (N == 3 && s.step == 1)
                {
                    out.push_back({at + "added", 153, s.added});
                    out.push_back({at + "new orbit sizes", std::vector<std::size_t>{9, 36, 108}, sorted(s.new_orbit_sizes)});
                }
            }
            return out;
        }

        std::string fixed12(double x)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.12f", x);
            std::string s = buf;
            if (s.find_first_not_of("-0.") == std::string::npos)
                return "0.000000000000";
            return s;
        }
    } // namespace

    fs::path cache_dir()
    {
        if (const char *d = std::getenv("CQM_CACHE_DIR"); d && *d)
            return d;
        if (const char *x = std::getenv("XDG_CACHE_HOME"); x && *x)
            return fs::path(x) / "cqm";
        if (const char *h = std::getenv("HOME"); h && *h)
            return fs::path(h) / ".cache" / "cqm";
        return fs::temp_directory_path() / "cqm-cache";
    }

    Outcome cmd_group(const RunConfig &cfg)
    {
        require_dim(cfg);
        const std::uint32_t N = cfg.dim;
        if (cfg.which != "wh" && cfg.which != "clifford" && cfg.which != "projective")
            throw Usage("--which must be wh, clifford or projective");
        const std::uint32_t m = conductor_for(N);
        check_phi_cache(m, cfg.use_cache);

        Outcome o;
        o.doc = {{"command", "group"}, {"dim", N}, {"which", cfg.which}, {"conductor", m}};
        const std::string cache_name = "group-" + cfg.which + "-" + std::to_string(N) + ".json";
        const bool cacheable = cfg.use_cache && cfg.out.empty();
        if (cacheable)
            if (auto hit = cache_load(cache_name); hit && hit->value("order", std::size_t{0}) <= cfg.max_closure)
            {
                for (auto &[k, v] : hit->items())
                    o.doc[k] = v;
                return o;
            }

        std::vector<UMatrix> gens;
        std::vector<std::string> names;
        if (cfg.which == "wh")
        {
            auto g = wh_generators(N, m);
            gens = {UMatrix::identity(N, m).scaled(g.tau), g.X, g.Z};
            names = {"tau", "X", "Z"};
        }
        else
        {
            gens = CliffordAction::make(N, m).gens;
            names = {"X", "F", "S"};
        }
        const bool projective = cfg.which == "projective";
        auto t0 = std::chrono::steady_clock::now();
        auto table = group_closure(gens, names, {.projective = projective, .max_size = cfg.max_closure, .threads = cfg.threads});
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        Json result{{"generators", names}, {"order", table.order()}};
        if (projective)
            result["scalar_order"] = table.scalar_order();
        else
        {
            auto c = center_of(table);
            std::vector<std::uint32_t> exps;
            for (const auto &s : c)
                exps.push_back(*s.root_of_unity_exponent());
            std::sort(exps.begin(), exps.end());
            result["center_order"] = c.size();
            result["center_exponents"] = exps;
            result["center_exponent_unit"] = std::lcm(2u, m);
        }
        if (cacheable)
            cache_store(cache_name, result);
        for (auto &[k, v] : result.items())
            o.doc[k] = v;
        if (cfg.timings)
            o.doc["seconds"] = secs;
        if (!cfg.out.empty())
            write_file(cfg.out, table.to_json());
        return o;
    }

    Outcome cmd_cqs(const RunConfig &cfg)
    {
        CqsRun run = [&] {
            if (!cfg.input.empty())
                return cqs_continue(StateSet::from_json(read_file(cfg.input)), cfg.steps, cfg.threads);
            require_dim(cfg);
            return cqs_generate(cfg.dim, cfg.steps, cfg.threads);
        }();
        const std::uint32_t N = run.set.dim();
        check_phi_cache(run.set.conductor(), cfg.use_cache);

        Outcome o;
        o.doc = {{"command", "cqs"}, {"dim", N}};
        Json steps = Json::array();
        for (const auto &s : run.steps)
        {
            Json j = parse(step_report_json(s));
            if (cfg.timings)
                j["seconds"] = s.seconds;
            steps.push_back(std::move(j));
        }
        o.doc["steps"] = std::move(steps);
        std::vector<std::size_t> orbit_sizes;
        for (const auto &orb : run.set.orbits())
            orbit_sizes.push_back(orb.size());
        o.doc["total"] = run.set.size();
        o.doc["conductor"] = run.set.conductor();
        o.doc["orbit_sizes"] = sorted(orbit_sizes);

        if (cfg.calibrate)
        {
            auto checks = calibration(N, run.steps);
            o.doc["calibration"] = checks_json(checks);
            std::vector<std::string> failing;
            for (const auto &c : checks)
                if (!c.pass())
                    failing.push_back(c.name);
            if (!failing.empty())
            {
                Json counts = Json::array();
                for (const auto &s : run.steps)
                    counts.push_back({{"step", s.step},
                                      {"raw", s.candidates.raw},
                                      {"dedup", s.candidates.distinct},
                                      {"fresh", s.candidates.fresh},
                                      {"kept", s.kept},
                                      {"rejected", s.rejected},
                                      {"added", s.added}});
                fail(o, AssertionFailed, "calibration", "interference counts differ from the reference values",
                     {{"failing", failing}, {"counts", counts}});
            }
        }
        if (!cfg.out.empty())
            write_file(cfg.out, run.set.to_json());
        return o;
    }

    Outcome cmd_mub(const RunConfig &cfg)
    {
        require_dim(cfg);
        const std::uint32_t N = cfg.dim;
        auto bs = mub_complete_set(N);
        auto rep = verify_mub(bs);

        Outcome o;
        o.doc = {{"command", "mub"}, {"dim", N}, {"bases", bs.bases.size()}};
        auto split = crt_split(N);
        o.doc["construction"] = split.factors[0] == split.primes[0] ? "eigenbases of X Z^k" : "Galois displacement classes";
        o.doc["verify"] = parse(rep.to_json());
        std::vector<std::string> failing;
        if (!rep.ok())
            failing.push_back("complete set fails verification");
        if (bs.bases.size() != N + 1)
            failing.push_back("complete set has " + std::to_string(bs.bases.size()) + " bases");

        if (cfg.from_orbit)
        {
            auto orbit = clifford_orbit(Ray::basis(N, 0, conductor_for(N)), CliffordAction::make(N));
            auto ex = extract_mubs_from_orbit(orbit);
            Json j = parse(ex.to_json());
            j.erase("basis_set");
            j["orbit_size"] = orbit.size();
            o.doc["extraction"] = std::move(j);
            if (!ex.complete)
                failing.push_back("orbit of |0> is not a union of MUBs: " + ex.obstruction);
        }
        if (!failing.empty())
            fail(o, AssertionFailed, "mub", "MUB checks failed", {{"failing", failing}});
        if (!cfg.out.empty())
            write_file(cfg.out, bs.to_json());
        return o;
    }

    Outcome cmd_crt(const RunConfig &cfg)
    {
        require_dim(cfg);
        const std::uint32_t N = cfg.dim;
        auto split = crt_split(N);

        Outcome o;
        o.doc = {{"command", "crt"}, {"dim", N}, {"factors", split.factors}, {"dual_units", split.dual_units}};
        Json energy = Json::array();
        bool identity = true;
        for (std::uint64_t k = 0; k < N; ++k)
        {
            Json comps = Json::array();
            for (const auto &e : energy_decompose(k, split))
                comps.push_back({{"k", e.k}, {"n", e.n}, {"frequency", e.frequency.to_string()}});
            bool holds = energy_identity_holds(k, split);
            identity = identity && holds;
            energy.push_back({{"k", k}, {"components", std::move(comps)}, {"identity", holds}});
        }
        o.doc["energy"] = std::move(energy);

        std::vector<std::string> failing;
        if (!identity)
            failing.push_back("energy identity");

        if (cfg.energy_only)
        {
            if (!failing.empty())
                fail(o, AssertionFailed, "crt", "decomposition checks failed", {{"failing", failing}});
            return o;
        }
        auto rep = clifford_product_check(N, {.full = cfg.full, .max_size = cfg.max_closure, .threads = cfg.threads});
        Json prod = parse(rep.to_json());
        if (cfg.timings)
        {
            prod["seconds_projective"] = rep.seconds_projective;
            prod["seconds_full"] = rep.seconds_full;
        }
        Json details = Json::object();
        if (!rep.skipped)
        {
            if (!rep.shift_factorizes)
                failing.push_back("shift factorization");
            for (const auto &[name, ok] : rep.membership)
                if (!ok)
                    failing.push_back("membership of " + name);
            if (!rep.projective_matches())
                failing.push_back("projective order");
            if (!rep.order_matches())
            {
                failing.push_back("order");
                std::uint64_t local_scalars = 1;
                for (std::size_t i = 0; i < rep.local_orders.size(); ++i)
                    local_scalars *= rep.local_orders[i] / rep.local_projective_orders[i];
                details = {{"order", rep.order},
                           {"direct_product_order", rep.direct_product_order},
                           {"scalar_order", rep.scalar_order},
                           {"direct_product_scalar_order", local_scalars},
                           {"order_source", rep.full_order ? "full closure" : "projective closure x scalar subgroup"}};
            }
        }
        prod["verdict"] = rep.skipped ? "skipped" : (failing.empty() ? "pass" : "fail");
        o.doc["product_check"] = std::move(prod);
        if (!failing.empty())
        {
            details["failing"] = failing;
            fail(o, AssertionFailed, "crt", "decomposition checks failed", std::move(details));
        }
        return o;
    }

    Outcome cmd_verify(const RunConfig &cfg)
    {
        require_dim(cfg);
        const std::uint32_t N = cfg.dim;
        const std::uint32_t m = conductor_for(N);
        auto g = wh_generators(N, m);
        auto F = fourier_matrix(N, m);
        auto t = tau(N, m);

        std::vector<std::pair<std::string, bool>> checks;
        checks.emplace_back("ZX = omega XZ", check_weyl_relation(N, m).holds);
        checks.emplace_back("Z = F X F^-1", F * g.X * F.inverse() == g.Z);
        checks.emplace_back("F unitary", F.is_unitary());
        checks.emplace_back("S unitary", s_matrix(N, m).is_unitary());

        std::size_t pairs = 0, bad = 0;
        std::vector<UMatrix> D;
        for (std::int64_t p1 = 0; p1 < N; ++p1)
            for (std::int64_t p2 = 0; p2 < N; ++p2)
                D.push_back(displacement(N, p1, p2, m));
        for (std::int64_t p1 = 0; p1 < N; ++p1)
            for (std::int64_t p2 = 0; p2 < N; ++p2)
                for (std::int64_t q1 = 0; q1 < N; ++q1)
                    for (std::int64_t q2 = 0; q2 < N; ++q2)
                    {
                        ++pairs;
                        auto rhs = displacement(N, p1 + q1, p2 + q2, m).scaled(t.pow(symplectic_form({p1, p2}, {q1, q2}, N)));
                        if (!(D[p1 * N + p2] * D[q1 * N + q2] == rhs))
                            ++bad;
                    }
        checks.emplace_back("D_p D_q = tau^sigma(p,q) D_(p+q)", bad == 0);

        Outcome o;
        o.doc = {{"command", "verify"}, {"dim", N}, {"conductor", m}};
        Json arr = Json::array();
        std::vector<std::string> failing;
        for (const auto &[name, ok] : checks)
        {
            arr.push_back({{"name", name}, {"pass", ok}});
            if (!ok)
                failing.push_back(name);
        }
        o.doc["checks"] = std::move(arr);
        o.doc["displacement_pairs"] = pairs;
        o.doc["displacement_failures"] = bad;
        if (!failing.empty())
            fail(o, AssertionFailed, "verify", "relation checks failed", {{"failing", failing}});
        return o;
    }

    Outcome cmd_bloch_export(const RunConfig &cfg)
    {
        StateSet set = [&] {
            if (!cfg.input.empty())
                return StateSet::from_json(read_file(cfg.input));
            require_dim(cfg);
            return cqs_generate(cfg.dim, cfg.steps, cfg.threads).set;
        }();
        if (set.dim() != 2)
            throw Usage("Bloch coordinates exist for dimension 2 only");

        std::vector<std::pair<std::string, std::size_t>> order;
        for (std::size_t i = 0; i < set.size(); ++i)
            order.emplace_back(set.states()[i].key(), i);
        std::sort(order.begin(), order.end());

        std::string csv = "x,y,z,generation\n";
        for (const auto &[key, i] : order)
        {
            const Ray &r = set.states()[i];
            double x = 0, y = 0, z = -1;
            if (!r[0].is_zero())
            {
                // canonical form (1, w)
                auto w = r[1].to_complex();
                double n = std::norm(w);
                x = 2 * w.real() / (1 + n);
                y = 2 * w.imag() / (1 + n);
                z = (1 - n) / (1 + n);
            }
            csv += fixed12(x) + "," + fixed12(y) + "," + fixed12(z) + "," + std::to_string(set.generation(i)) + "\n";
        }

        Outcome o;
        o.doc = {{"command", "bloch-export"}, {"dim", 2}, {"rows", set.size()}};
        if (!cfg.out.empty())
        {
            write_file(cfg.out, csv);
            o.doc["out"] = cfg.out;
        }
        o.csv = std::move(csv);
        return o;
    }

    Outcome cmd_galois(const RunConfig &cfg, std::uint32_t p, std::uint32_t l)
    {
        if (cfg.dim != 0)
        {
            // --dim q = p^l
            std::uint32_t q = cfg.dim, r = q;
            p = 2;
            while (p <= r && r % p != 0)
                ++p;
            l = 0;
            while (r % p == 0)
            {
                r /= p;
                ++l;
            }
            if (r != 1 || q < 2)
                throw Usage("--dim must be a prime power");
        }
        auto field = GaloisField::build(p, l);
        if (field.order() > 4096)
            throw Usage("tables are limited to fields of at most 4096 elements");

        Outcome o;
        o.doc = {{"command", "galois"}, {"field", parse(field.to_json())}, {"order", field.order()}};
        std::vector<std::uint32_t> divisors;
        for (std::uint32_t d = 1; d <= l; ++d)
            if (l % d == 0)
                divisors.push_back(d);
        o.doc["subfield_degrees"] = divisors;
        Json elems = Json::array();
        for (const auto &a : field.elements())
        {
            Json traces = Json::object();
            for (auto d : divisors)
                traces[std::to_string(d)] = a.trace(d).index();
            elems.push_back({{"index", a.index()},
                             {"coeffs", a.coeffs()},
                             {"value", a.to_string()},
                             {"trace", a.trace(1).prime_value()},
                             {"relative_traces", std::move(traces)}});
        }
        o.doc["elements"] = std::move(elems);
        return o;
    }

    Outcome run_guarded(const std::string &command, const std::function<Outcome()> &body)
    {
        Outcome o;
        auto error = [&](int code, const std::string &kind, const std::string &msg, Json details = Json::object()) {
            o = Outcome{};
            o.doc = {{"command", command}};
            fail(o, code, kind, msg, std::move(details));
        };
        try
        {
            o = body();
        }
        catch (const ResourceError &e)
        {
            error(CapExceeded, "resource", e.what(), {{"partial_size", e.partial_size()}});
        }
        catch (const UsageError &e)
        {
            error(BadUsage, "usage", e.what());
        }
        catch (const nlohmann::json::exception &e)
        {
            error(BadUsage, "usage", std::string("malformed JSON input: ") + e.what());
        }
        catch (const IntegrityError &e)
        {
            error(InternalError, "integrity", e.what());
        }
        catch (const std::exception &e)
        {
            error(InternalError, "internal", e.what());
        }
        return o;
    }

    std::string summary(const Json &doc)
    {
        std::string out;
        for (const auto &[k, v] : doc.items())
        {
            if (k == "elements" || k == "energy")
            {
                out += k + ": " + std::to_string(v.size()) + " rows\n";
                continue;
            }
            if (v.is_array() && !v.empty() && v.front().is_object())
            {
                out += k + ":\n";
                for (const auto &row : v)
                    out += "  " + row.dump() + "\n";
                continue;
            }
            out += k + ": " + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
        }
        return out;
    }

} // namespace cqm::cli
