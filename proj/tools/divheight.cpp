#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "divht/errors.hpp"
#include "divht/global.hpp"
#include "divht/local.hpp"
#include "divht/parse.hpp"
#include "divht/resultant.hpp"
#include "json.hpp"

using json = nlohmann::ordered_json;
using namespace divht;

namespace {

struct Options {
  std::string target;
  int N = -1;
  int d = -1;
  std::string map_arg;
  std::string map_file;
  std::string form_arg;
  std::string point_arg;
  std::string place_arg = "inf";
  std::string eps_arg = "0.5";
  int max_k = -1;
  std::string output = "text";
};

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ParseError(msg);
}

PolyMap load_map(const Options& o) {
  require(o.N >= 1, "--N is required (at least 1)");
  require(o.d >= 1, "--d is required (at least 1)");
  std::vector<std::string> comps;
  if (!o.map_file.empty()) {
    std::ifstream in(o.map_file);
    require(in.good(), "cannot open map file: " + o.map_file);
    std::string line;
    while (std::getline(in, line)) {
      std::string trimmed;
      for (char c : line)
        if (!isspace(static_cast<unsigned char>(c)) || !trimmed.empty())
          trimmed += c;
      while (!trimmed.empty() &&
             isspace(static_cast<unsigned char>(trimmed.back())))
        trimmed.pop_back();
      if (!trimmed.empty()) comps.push_back(trimmed);
    }
  } else {
    require(!o.map_arg.empty(), "--map or --map-file is required");
    comps = split_commas(o.map_arg);
  }
  return parse_map(comps, o.N, o.d);
}

HomogeneousForm load_form(const Options& o) {
  require(o.N >= 1, "--N is required (at least 1)");
  require(!o.form_arg.empty(), "--form is required");
  return parse_form(o.form_arg, o.N + 1);
}

std::vector<mpq_class> load_point(const Options& o) {
  require(o.N >= 1, "--N is required (at least 1)");
  require(!o.point_arg.empty(), "--point is required");
  return parse_point(o.point_arg, o.N + 1);
}

Place load_place(const Options& o) {
  if (o.place_arg == "inf" || o.place_arg == "oo") return Place::archimedean();
  for (char c : o.place_arg)
    require(isdigit(static_cast<unsigned char>(c)),
            "--place must be 'inf' or a prime");
  return Place::at_prime(mpz_class(o.place_arg));
}

mpq_class load_eps(const Options& o) {
  mpq_class eps = parse_rational(o.eps_arg);
  require(eps > 0, "--eps must be positive");
  return eps;
}

std::string fmt(double x) {
  char buf[40];
  snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json interval_json(const Interval& iv) {
  return {{"lo", iv.lo}, {"hi", iv.hi}, {"width", iv.width_up()}};
}

json enclosure_json(const Enclosure& e) {
  json j = {{"interval", interval_json(e.iv)}};
  if (e.padic) {
    j["padic"] = {{"p", e.p.get_str()},
                  {"exp_lo", rational_to_string(e.exp_lo)},
                  {"exp_hi", rational_to_string(e.exp_hi)},
                  {"exact", e.exact()}};
  }
  return j;
}

json budget_json(const ErrorBudget& b) {
  return {{"c8", b.c8.hi},
          {"c9", b.c9.hi},
          {"logC2", b.log_C2.hi},
          {"C1", b.C1.get_str()},
          {"h_hom", b.h.hi}};
}

json input_json(const Options& o) {
  json j;
  j["target"] = o.target;
  if (o.N >= 0) j["N"] = o.N;
  if (o.d >= 0) j["d"] = o.d;
  if (!o.map_arg.empty() || !o.map_file.empty()) {
    json comps = json::array();
    if (!o.map_file.empty())
      comps.push_back("@" + o.map_file);
    else
      for (const auto& c : split_commas(o.map_arg)) comps.push_back(c);
    j["map"] = comps;
  }
  if (!o.form_arg.empty()) j["form"] = o.form_arg;
  if (!o.point_arg.empty()) j["point"] = o.point_arg;
  if (o.target == "green") j["place"] = o.place_arg;
  j["eps"] = o.eps_arg;
  j["max_k"] = o.max_k;
  return j;
}

void emit(const Options& o, json& doc, const std::vector<std::string>& text,
          double ms) {
  doc["timing_ms"] = ms;
  if (o.output == "json") {
    std::cout << doc.dump(2) << "\n";
  } else {
    for (const auto& line : text) std::cout << line << "\n";
  }
}

std::string interval_text(const Interval& iv) {
  return "[" + fmt(iv.lo) + ", " + fmt(iv.hi) + "] width " +
         fmt(iv.width_up());
}

int run_resultant(const Options& o, json& doc, std::vector<std::string>& text,
                  std::chrono::steady_clock::time_point start) {
  PolyMap f = load_map(o);
  mpq_class res = resultant(f);
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  if (res == 0) {
    doc["result"] = {{"value", "0"}, {"certified", true}};
    doc["refusal"] = "not a morphism: resultant vanishes";
    text.push_back("0");
    text.push_back("not a morphism: resultant vanishes");
    emit(o, doc, text, ms);
    return 3;
  }
  doc["result"] = {{"value", rational_to_string(res)}, {"certified", true}};
  text.push_back(rational_to_string(res));
  emit(o, doc, text, ms);
  return 0;
}

int run_pushforward(const Options& o, json& doc,
                    std::vector<std::string>& text,
                    std::chrono::steady_clock::time_point start) {
  PolyMap f = load_map(o);
  HomogeneousForm phi = load_form(o);
  PushforwardResult pf = push_forward(f, phi);
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  std::string s = form_to_string(pf.form, "Y");
  doc["result"] = {{"value", s},
                   {"degree", pf.form.degree()},
                   {"certified", true}};
  text.push_back(s);
  emit(o, doc, text, ms);
  return 0;
}

int run_height(const Options& o, json& doc, std::vector<std::string>& text,
               std::chrono::steady_clock::time_point start) {
  HomogeneousForm phi = load_form(o);
  Interval h = philippon_height(phi);
  double raw = phi.is_zero() ? 0.0 : mahler_estimate(primitive_part(phi).form);
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  doc["result"] = {{"interval", interval_json(h)},
                   {"raw_estimate", raw},
                   {"certified", true}};
  text.push_back("height in " + interval_text(h));
  text.push_back("raw estimate " + fmt(raw));
  emit(o, doc, text, ms);
  return 0;
}

json height_report_json(const HeightReport& r) {
  return {{"interval", interval_json(r.value)},
          {"raw_estimate", r.raw.empty() ? 0.0 : r.raw.back()},
          {"certified", true},
          {"k_used", r.k_used},
          {"converged", r.converged},
          {"cycle", r.cycle},
          {"width_target", r.width_target},
          {"raw_sequence", r.raw}};
}

void divisor_report_out(const DivisorHeightReport& rep, json& doc,
                        std::vector<std::string>& text,
                        const std::string& label) {
  doc["result"] = height_report_json(rep.canonical);
  doc["result"]["naive"] = interval_json(rep.naive);
  doc["result"]["degree"] = rep.degree;
  doc["result"]["budget_kind"] = "refined-c8c9";
  doc["budget"] = budget_json(rep.budget);
  text.push_back(label + " in " + interval_text(rep.canonical.value));
  text.push_back("k_used " + std::to_string(rep.canonical.k_used) +
                 (rep.canonical.converged ? " converged" : " not converged") +
                 (rep.canonical.cycle ? " (cycle)" : ""));
  text.push_back("naive height in " + interval_text(rep.naive));
  if (!rep.canonical.raw.empty())
    text.push_back("raw estimate " + fmt(rep.canonical.raw.back()));
}

int run_canonical_height(const Options& o, json& doc,
                         std::vector<std::string>& text,
                         std::chrono::steady_clock::time_point start) {
  PolyMap f = load_map(o);
  HomogeneousForm phi = load_form(o);
  DivisorHeightReport rep =
      canonical_height_divisor(f, phi, load_eps(o), o.max_k);
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  divisor_report_out(rep, doc, text, "canonical height");
  emit(o, doc, text, ms);
  return 0;
}

int run_point_height(const Options& o, json& doc,
                     std::vector<std::string>& text,
                     std::chrono::steady_clock::time_point start) {
  PolyMap f = load_map(o);
  std::vector<mpq_class> q = load_point(o);
  HeightReport rep = canonical_height_point(f, q, load_eps(o), o.max_k);
  ErrorBudget eb = error_budget(f);
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  doc["result"] = height_report_json(rep);
  doc["budget"] = budget_json(eb);
  text.push_back("canonical height in " + interval_text(rep.value));
  text.push_back("k_used " + std::to_string(rep.k_used) +
                 (rep.converged ? " converged" : " not converged") +
                 (rep.cycle ? " (cycle)" : ""));
  if (!rep.raw.empty())
    text.push_back("raw estimate " + fmt(rep.raw.back()));
  emit(o, doc, text, ms);
  return 0;
}

int run_critical_height(const Options& o, json& doc,
                        std::vector<std::string>& text,
                        std::chrono::steady_clock::time_point start) {
  PolyMap f = load_map(o);
  DivisorHeightReport rep = critical_height(f, load_eps(o), o.max_k);
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  divisor_report_out(rep, doc, text, "critical height");
  doc["result"]["consistent_with_PCF"] = rep.consistent_with_zero;
  text.push_back(std::string("consistent_with_PCF ") +
                 (rep.consistent_with_zero ? "true" : "false"));
  emit(o, doc, text, ms);
  return 0;
}

int run_green(const Options& o, json& doc, std::vector<std::string>& text,
              std::chrono::steady_clock::time_point start) {
  PolyMap f = load_map(o);
  HomogeneousForm phi = load_form(o);
  std::vector<mpq_class> q = load_point(o);
  Place v = load_place(o);
  EscapeReport rep = green_pairing(f, phi, q, v, load_eps(o), o.max_k);
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  doc["result"] = enclosure_json(rep.value);
  doc["result"]["raw_estimate"] = rep.raw.empty() ? 0.0 : rep.raw.back();
  doc["result"]["certified"] = true;
  doc["result"]["k_used"] = rep.k_used;
  doc["result"]["converged"] = rep.converged;
  text.push_back("pairing at " + v.str() + " in " +
                 interval_text(rep.value.iv));
  text.push_back("k_used " + std::to_string(rep.k_used) +
                 (rep.converged ? " converged" : " not converged"));
  emit(o, doc, text, ms);
  return 0;
}

int run_lyapunov(const Options& o, json& doc, std::vector<std::string>& text,
                 std::chrono::steady_clock::time_point start) {
  PolyMap f = load_map(o);
  LyapunovReport rep = lyapunov_estimate(f, load_eps(o), o.max_k);
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  doc["result"] = {{"interval", interval_json(rep.value)},
                   {"greens", interval_json(rep.greens)},
                   {"raw_estimate", rep.value.mid()},
                   {"certified", rep.certified},
                   {"k_used", rep.k_used},
                   {"converged", rep.converged}};
  text.push_back("lyapunov exponent of the jacobian divisor in " +
                 interval_text(rep.value) + " (not certified as dynamical)");
  emit(o, doc, text, ms);
  return 0;
}

int run_budget(const Options& o, json& doc, std::vector<std::string>& text,
               std::chrono::steady_clock::time_point start) {
  PolyMap f = load_map(o);
  ErrorBudget eb = error_budget(f);
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  doc["result"] = {{"certified", true},
                   {"h_hom", interval_json(eb.h)},
                   {"c8", interval_json(eb.c8)},
                   {"c9", interval_json(eb.c9)},
                   {"b_upper", interval_json(eb.b_upper)},
                   {"b_lower", interval_json(eb.b_lower)},
                   {"C1", eb.C1.get_str()},
                   {"C2", eb.C2.get_str()},
                   {"logC2", interval_json(eb.log_C2)}};
  doc["budget"] = budget_json(eb);
  text.push_back("h_hom in " + interval_text(eb.h));
  text.push_back("c8 <= " + fmt(eb.c8.hi));
  text.push_back("c9 <= " + fmt(eb.c9.hi));
  text.push_back("per-degree budget upper " + fmt(eb.b_upper.hi) +
                 ", lower " + fmt(eb.b_lower.hi));
  text.push_back("C1 = " + eb.C1.get_str());
  text.push_back("C2 = " + eb.C2.get_str());
  emit(o, doc, text, ms);
  return 0;
}

int run_check(const Options& o, json& doc, std::vector<std::string>& text,
              std::chrono::steady_clock::time_point start) {
  PolyMap f = load_map(o);
  HomogeneousForm phi = load_form(o);
  TheoremCheck chk = theorem1_check(f, phi);
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  doc["result"] = {{"ok", chk.ok},
                   {"ok_refined", chk.ok_refined},
                   {"ok_coarse", chk.ok_coarse},
                   {"diff", interval_json(chk.diff)},
                   {"refined_lo", chk.refined_lo.lo},
                   {"refined_hi", chk.refined_hi.hi},
                   {"coarse_hi", chk.coarse.hi},
                   {"certified", true}};
  doc["budget"] = budget_json(chk.report.budget);
  text.push_back(std::string("check ") + (chk.ok ? "passed" : "FAILED"));
  text.push_back("difference in " + interval_text(chk.diff));
  text.push_back("refined bound [" + fmt(chk.refined_lo.lo) + ", " +
                 fmt(chk.refined_hi.hi) + "]");
  emit(o, doc, text, ms);
  return chk.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified heights of divisors and points under endomorphisms "
               "of projective space"};
  app.require_subcommand(1);
  Options o;

  const std::vector<std::pair<std::string, std::string>> targets = {
      {"resultant", "Macaulay resultant of the map's component forms"},
      {"pushforward", "direct image of the divisor cut by --form"},
      {"height", "naive (Philippon) height of the divisor cut by --form"},
      {"canonical-height", "certified canonical height of a divisor"},
      {"point-height", "certified canonical height of a rational point"},
      {"critical-height", "canonical height of the critical divisor"},
      {"green", "local pairing of a divisor against a point at one place"},
      {"lyapunov", "archimedean escape of the jacobian divisor minus log d"},
      {"budget", "error-budget constants of the map"},
      {"check", "audit the height-comparison bounds on one instance"}};
  for (const auto& [name, desc] : targets) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--N", o.N, "dimension of the projective space");
    sub->add_option("--d", o.d, "degree of each component form");
    sub->add_option("--map", o.map_arg, "comma-separated component forms");
    sub->add_option("--map-file", o.map_file, "file with one component per line");
    sub->add_option("--form", o.form_arg, "divisor form in X0..XN");
    sub->add_option("--point", o.point_arg, "comma-separated coordinates");
    sub->add_option("--place", o.place_arg, "'inf' or a prime (default inf)");
    sub->add_option("--eps", o.eps_arg, "target interval width (exact decimal)");
    sub->add_option("--max-k", o.max_k, "iteration cap (-1 for default)");
    sub->add_option("--output", o.output, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }
  o.target = app.get_subcommands().front()->get_name();

  auto start = std::chrono::steady_clock::now();
  json doc;
  doc["input"] = input_json(o);
  std::vector<std::string> text;
  try {
    if (o.target == "resultant") return run_resultant(o, doc, text, start);
    if (o.target == "pushforward") return run_pushforward(o, doc, text, start);
    if (o.target == "height") return run_height(o, doc, text, start);
    if (o.target == "canonical-height")
      return run_canonical_height(o, doc, text, start);
    if (o.target == "point-height")
      return run_point_height(o, doc, text, start);
    if (o.target == "critical-height")
      return run_critical_height(o, doc, text, start);
    if (o.target == "green") return run_green(o, doc, text, start);
    if (o.target == "lyapunov") return run_lyapunov(o, doc, text, start);
    if (o.target == "budget") return run_budget(o, doc, text, start);
    if (o.target == "check") return run_check(o, doc, text, start);
    std::cerr << "parse error: unknown target " << o.target << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const MathRefusal& e) {
    if (o.output == "json") {
      doc["refusal"] = e.what();
      std::cout << doc.dump(2) << "\n";
    }
    std::cerr << "refused: " << e.what() << "\n";
    return 3;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
