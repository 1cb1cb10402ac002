#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "lieform/manifest.hpp"

namespace {

using namespace lieform;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Input: return 1;
    case ErrorKind::Degenerate: return 2;
    case ErrorKind::Verification: return 3;
    case ErrorKind::Numerical: return 3;
  }
  return 1;
}

int thread_cap() {
  // single-threaded orchestration; the cap is honored trivially but validated
  if (const char* env = std::getenv("LIEFORM_THREADS")) {
    int n = std::atoi(env);
    return n > 0 ? n : 1;
  }
  return 1;
}

struct PipelineData {
  Coframe cf;
  InvariantSet inv;
  std::string classification = "nondegenerate";
  std::optional<LegendreField> lift;
  std::optional<ReductionResult> reduction;
  std::optional<catalog::FlatWebData> flatweb;
};

// Takes any resolved input to (coframe, invariants); surfaces pass through the
// classification gate and, when enabled, the frame reduction that recovers r.
PipelineData pipeline(const ResolvedInput& in, bool reduction_enabled) {
  PipelineData out;
  if (in.flatweb) {
    out.cf = *in.cf;
    out.inv = *in.inv;
    out.flatweb = in.flatweb;
    return out;
  }
  if (in.patch) {
    CurvatureData C = curvature_data(*in.patch);
    ClassificationReport rep = classify(C);
    out.classification = to_string(rep.verdict);
    if (!rep.nondegenerate())
      fail(ErrorKind::Degenerate, "input surface is degenerate: " + out.classification + " (" +
                                      std::to_string(rep.offending.size()) + " nodes)");
    out.cf = euclidean_coframe(C);
    out.lift = legendre_lift(*in.patch, C);
    if (reduction_enabled) {
      out.reduction = canonical_reduction(*out.lift);
      // reduced coframe and euclidean coframe agree up to a representative;
      // keep the euclidean one, transport the reduced invariants onto it
      RepresentativeMatch m = best_representative(out.cf, out.reduction->coframe);
      out.inv = apply_representative(out.reduction->invariants, m);
    } else {
      out.inv = extract_invariants(out.cf);
    }
    return out;
  }
  if (in.cf) {
    out.cf = *in.cf;
    if (in.inv)
      out.inv = *in.inv;
    else
      out.inv = extract_invariants(out.cf);
    return out;
  }
  if (in.lf) {
    out.reduction = canonical_reduction(*in.lf);
    out.cf = out.reduction->coframe;
    out.inv = out.reduction->invariants;
    out.lift = in.lf;
    return out;
  }
  fail(ErrorKind::Input, "input does not resolve to a usable dataset");
}

void export_common(const std::string& dir, const PipelineData& d) {
  if (dir.empty()) return;
  export_scalar_field(dir, "a1P", d.cf.a1.P);
  export_scalar_field(dir, "a1Q", d.cf.a1.Q);
  export_scalar_field(dir, "a2P", d.cf.a2.P);
  export_scalar_field(dir, "a2Q", d.cf.a2.Q);
  export_scalar_field(dir, "q1", d.inv.q1);
  export_scalar_field(dir, "q2", d.inv.q2);
  export_scalar_field(dir, "p1", d.inv.p1);
  export_scalar_field(dir, "p2", d.inv.p2);
  if (d.inv.has_r()) {
    export_scalar_field(dir, "r1", *d.inv.r1);
    export_scalar_field(dir, "r2", *d.inv.r2);
  }
}

void sample_forms(Report& rep, const Coframe& cf) {
  FormPack fp = form_pack(cf);
  const Grid& g = cf.grid();
  std::string rows = "[";
  int samples[5][2] = {{g.nu / 4, g.nv / 4}, {g.nu / 4, 3 * g.nv / 4}, {g.nu / 2, g.nv / 2},
                       {3 * g.nu / 4, g.nv / 4}, {3 * g.nu / 4, 3 * g.nv / 4}};
  bool first = true;
  for (auto& s : samples) {
    double dirs[3][2] = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
    for (auto& X : dirs) {
      if (!first) rows += ",";
      first = false;
      ExtReal b = fp.quotient(s[0], s[1], X[0], X[1]);
      rows += "{\"iu\":" + std::to_string(s[0]) + ",\"iv\":" + std::to_string(s[1]) +
              ",\"xu\":" + std::to_string(X[0]) + ",\"xv\":" + std::to_string(X[1]) +
              ",\"phi\":" + std::to_string(fp.phi(s[0], s[1], X[0], X[1])) +
              ",\"psi\":" + std::to_string(fp.psi(s[0], s[1], X[0], X[1])) + ",\"quotient\":" +
              (b.infinite ? std::string("\"inf\"") : std::to_string(b.value)) + "}";
    }
  }
  rows += "]";
  rep.set_json("form_samples", rows);
}

int cmd_invariants(const Manifest& m, const std::string& out_dir, const std::string& report_path,
                   const std::vector<std::string>& plots) {
  ResolvedInput in = resolve_input(*m.input);
  Report rep;
  rep.set("command", std::string("invariants"));
  rep.set("input", in.describe);
  PipelineData d;
  try {
    d = pipeline(in, m.reduction);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Degenerate) {
      rep.set("verdict", std::string(e.what()));
      rep.set("exit", 2);
      if (!report_path.empty()) rep.write(report_path);
      std::cout << rep.dump();
      return 2;
    }
    throw;
  }
  rep.set("classification", d.classification);
  rep.set("orientation", d.cf.orientation);
  rep.add_field_summary("q1", d.inv.q1);
  rep.add_field_summary("q2", d.inv.q2);
  rep.add_field_summary("p1", d.inv.p1);
  rep.add_field_summary("p2", d.inv.p2);
  if (d.inv.has_r()) {
    rep.add_field_summary("r1", *d.inv.r1);
    rep.add_field_summary("r2", *d.inv.r2);
  }
  rep.set("r_available", d.inv.has_r());
  WebData wd = web(d.cf, d.inv.q1, d.inv.q2);
  rep.add_field_summary("web_curvature", wd.curvature);
  rep.add_residual("web_identity", wd.identity_residual);
  rep.set("diagonally_cyclidic", wd.diagonally_cyclidic);
  if (d.reduction) rep.add_residual("canonical_pfaffian", d.reduction->max_residual);
  if (d.lift) rep.add_residual("contact", contact_residual(*d.lift));
  sample_forms(rep, d.cf);
  if (!out_dir.empty()) {
    export_common(out_dir, d);
    export_scalar_field(out_dir, "web_curvature", wd.curvature);
    for (const auto& p : plots) {
      if (p == "q1") export_csv(out_dir + "/q1.csv", d.inv.q1);
      if (p == "q2") export_csv(out_dir + "/q2.csv", d.inv.q2);
      if (p == "p1") export_csv(out_dir + "/p1.csv", d.inv.p1);
      if (p == "p2") export_csv(out_dir + "/p2.csv", d.inv.p2);
    }
    rep.set("exports", out_dir);
  }
  rep.set("exit", 0);
  if (!report_path.empty()) rep.write(report_path);
  std::cout << rep.dump();
  return 0;
}

int cmd_deformability(const Manifest& m, const std::string& out_dir,
                      const std::string& report_path) {
  ResolvedInput in = resolve_input(*m.input);
  Report rep;
  rep.set("command", std::string("deformability"));
  rep.set("input", in.describe);
  PipelineData d;
  try {
    d = pipeline(in, false);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Degenerate) {
      rep.set("verdict", std::string(e.what()));
      rep.set("exit", 2);
      if (!report_path.empty()) rep.write(report_path);
      std::cout << rep.dump();
      return 2;
    }
    throw;
  }
  SigmaForm s = sigma(d.inv, d.cf);
  SigmaCurvature omega = sigma_curvature(s, d.inv, d.cf);
  double omax = 0.0;
  for (int i = 0; i < s.grid.size(); ++i)
    omax = std::max(omax, omega.closed.v[i].cwiseAbs().maxCoeff());
  rep.add_residual("sigma_curvature_closed_form_max", omax);
  rep.add_residual("sigma_curvature_two_path_difference", omega.difference);
  rep.add_field_summary("p1", d.inv.p1);
  rep.add_field_summary("p2", d.inv.p2);

  ParallelSpace ps = d.flatweb && d.flatweb->has_solver ? d.flatweb->solver : solve_parallel(s);
  rep.set("dim", ps.dim);
  rep.add_spectrum(ps);
  std::string cls = "[";
  for (int k = 0; k < ps.dim; ++k) {
    if (k) cls += ",";
    cls += "\"" + to_string(classify_deformation(ps.basis[k])) + "\"";
  }
  cls += "]";
  rep.set_json("basis_classification", cls);

  if (d.flatweb) {
    std::string cand = "[";
    for (size_t k = 0; k < d.flatweb->candidates.size(); ++k) {
      if (k) cand += ",";
      cand += "{\"name\":\"" + d.flatweb->candidates[k].name +
              "\",\"residual\":" + std::to_string(d.flatweb->candidates[k].residual) + "}";
    }
    cand += "]";
    rep.set_json("candidate_sections", cand);
    rep.add_residual("liouville", d.flatweb->liouville_max);
    rep.set("r_source", d.flatweb->r_source);
  }
  if (!out_dir.empty()) {
    for (int k = 0; k < ps.dim; ++k) {
      export_scalar_field(out_dir, "w" + std::to_string(k) + "_1", ps.basis[k][0]);
      export_scalar_field(out_dir, "w" + std::to_string(k) + "_2", ps.basis[k][1]);
      export_scalar_field(out_dir, "w" + std::to_string(k) + "_3", ps.basis[k][2]);
    }
    rep.set("exports", out_dir);
  }
  rep.set("exit", 0);
  if (!report_path.empty()) rep.write(report_path);
  std::cout << rep.dump();
  return 0;
}

int cmd_deform(const Manifest& m, const std::string& out_dir, const std::string& report_path,
               int section, double scale) {
  ResolvedInput in = resolve_input(*m.input);
  Report rep;
  rep.set("command", std::string("deform"));
  rep.set("input", in.describe);
  PipelineData d;
  try {
    d = pipeline(in, m.reduction);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Degenerate) {
      rep.set("verdict", std::string(e.what()));
      rep.set("exit", 2);
      if (!report_path.empty()) rep.write(report_path);
      std::cout << rep.dump();
      return 2;
    }
    throw;
  }
  if (!d.inv.has_r())
    fail(ErrorKind::Degenerate, "deform: r unavailable for this input (reduction disabled or "
                                "invariants incomplete)");

  SigmaForm s = sigma(d.inv, d.cf);
  ParallelSpace ps = d.flatweb && d.flatweb->has_solver ? d.flatweb->solver : solve_parallel(s);
  rep.set("dim", ps.dim);
  rep.add_spectrum(ps);
  if (ps.dim < 1) fail(ErrorKind::Degenerate, "deform: the surface is not deformable (dim 0)");
  if (section < 0 || section >= ps.dim)
    fail(ErrorKind::Input, "deform: --section out of range for dim " + std::to_string(ps.dim));

  Section w{map(ps.basis[section][0], [scale](double x) { return scale * x; }),
            map(ps.basis[section][1], [scale](double x) { return scale * x; }),
            map(ps.basis[section][2], [scale](double x) { return scale * x; })};
  rep.set("section", section);
  rep.set("scale", scale);
  rep.set("section_class", to_string(classify_deformation(w)));

  if (scale == 0.0) {
    // trivial deformation: nothing to integrate differently
    rep.set("congruent", true);
    rep.set_json("contact_orders", "[2,2,2,2,2]");
    rep.set("exit", 0);
    if (!report_path.empty()) rep.write(report_path);
    std::cout << rep.dump();
    return 0;
  }

  DeformationResult res = deform(d.inv, d.cf, w);
  rep.add_residual("structure_alpha", res.verification.structure_residual_alpha);
  rep.add_residual("structure_deformed", res.verification.structure_residual_deformed);
  rep.add_residual("delta_closedness", res.verification.delta_residual);
  rep.add_residual("q_law", res.verification.max_q_error);
  rep.add_residual("p_law", res.verification.max_p_error);
  rep.add_residual("r_law", res.verification.max_r_error);
  std::string orders = "[";
  for (size_t k = 0; k < res.verification.contact_orders.size(); ++k) {
    if (k) orders += ",";
    orders += std::to_string(res.verification.contact_orders[k]);
  }
  orders += "]";
  rep.set_json("contact_orders", orders);
  rep.set("congruent", res.verification.congruent_to_original);

  if (!out_dir.empty()) {
    export_legendre_field(out_dir, "f_deformed", res.ft);
    export_scalar_field(out_dir, "rt1", *res.deformed.r1);
    export_scalar_field(out_dir, "rt2", *res.deformed.r2);
    std::vector<double> dfield(static_cast<size_t>(d.cf.grid().size()) * 36);
    for (int i = 0; i < d.cf.grid().size(); ++i)
      for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) dfield[36 * i + 6 * r + c] = res.D.v[i](r, c);
    export_array(out_dir, "D", dfield, {d.cf.grid().nv, d.cf.grid().nu, 6, 6});
    // re-loadable dataset carrying the deformed invariants
    Report ds;
    auto arr = [&](const ScalarField& f) {
      std::string a = "[";
      for (size_t i = 0; i < f.v.size(); ++i) {
        if (i) a += ",";
        char buf[32];
        snprintf(buf, sizeof(buf), "%.17g", f.v[i]);
        a += buf;
      }
      return a + "]";
    };
    Report dsr;
    dsr.set_json("a1P", arr(d.cf.a1.P));
    dsr.set_json("a1Q", arr(d.cf.a1.Q));
    dsr.set_json("a2P", arr(d.cf.a2.P));
    dsr.set_json("a2Q", arr(d.cf.a2.Q));
    dsr.set_json("q1", arr(res.deformed.q1));
    dsr.set_json("q2", arr(res.deformed.q2));
    dsr.set_json("p1", arr(res.deformed.p1));
    dsr.set_json("p2", arr(res.deformed.p2));
    dsr.set_json("r1", arr(*res.deformed.r1));
    dsr.set_json("r2", arr(*res.deformed.r2));
    dsr.write(out_dir + "/deformed_invariants.json");
    rep.set("exports", out_dir);
  }
  rep.set("exit", 0);
  if (!report_path.empty()) rep.write(report_path);
  std::cout << rep.dump();
  return 0;
}

int cmd_verify(const Manifest& m, const std::string& report_path) {
  if (!m.pair) fail(ErrorKind::Input, "verify: manifest must hold an input pair");
  ResolvedInput a = resolve_input(m.pair->first);
  ResolvedInput b = resolve_input(m.pair->second);
  Report rep;
  rep.set("command", std::string("verify"));
  rep.set("input_a", a.describe);
  rep.set("input_b", b.describe);
  PipelineData da = pipeline(a, true);
  PipelineData db = pipeline(b, true);
  if (!da.cf.grid().same(db.cf.grid())) fail(ErrorKind::Input, "verify: grid mismatch");

  RepresentativeMatch match = best_representative(da.cf, db.cf);
  Coframe cfb = apply_representative(db.cf, match);
  InvariantSet invb = apply_representative(db.inv, match);

  const Grid& g = da.cf.grid();
  double h2 = std::max(g.hu(), g.hv());
  h2 *= h2;
  double cf_scale = std::max({1.0, max_abs(da.cf.a1.P), max_abs(da.cf.a1.Q),
                              max_abs(da.cf.a2.P), max_abs(da.cf.a2.Q)});
  const double tol = 500.0 * h2 * cf_scale;
  bool same_coframe = match.distance <= tol;
  rep.set("coframe_distance", match.distance);
  rep.set("coframe_equal", same_coframe);
  rep.set("representative_swapped", match.swapped);
  rep.set("representative_flipped", match.flipped);

  auto field_close = [&](const ScalarField& x, const ScalarField& y) {
    double d = 0.0;
    for (int iv = 1; iv < g.nv - 1; ++iv)
      for (int iu = 1; iu < g.nu - 1; ++iu) d = std::max(d, std::abs(x.at(iu, iv) - y.at(iu, iv)));
    return d;
  };
  double qdist = std::max(field_close(da.inv.q1, invb.q1), field_close(da.inv.q2, invb.q2));
  double pdist = std::max(field_close(da.inv.p1, invb.p1), field_close(da.inv.p2, invb.p2));
  rep.set("q_distance", qdist);
  rep.set("p_distance", pdist);
  bool same_qp = qdist <= tol && pdist <= tol;
  bool deformation = same_coframe && same_qp;
  rep.set("deformation", deformation);

  bool congruent_verdict = false;
  if (da.inv.has_r() && invb.has_r()) {
    double rdist = std::max(field_close(*da.inv.r1, *invb.r1), field_close(*da.inv.r2, *invb.r2));
    double rtol = 500.0 * h2 * std::max({1.0, max_abs(*da.inv.r1), max_abs(*da.inv.r2)});
    rep.set("r_distance", rdist);
    congruent_verdict = deformation && rdist <= rtol;
  }
  rep.set("congruent", congruent_verdict);

  // quotient-of-forms comparison at sampled nodes and directions
  FormPack fa = form_pack(da.cf), fb = form_pack(cfb);
  bool quotient_same = true;
  double dirs[3][2] = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.7}};
  for (int iu = g.nu / 4; iu < g.nu; iu += g.nu / 4)
    for (int iv = g.nv / 4; iv < g.nv; iv += g.nv / 4)
      for (auto& X : dirs) {
        ExtReal qa = fa.quotient(iu, iv, X[0], X[1]);
        ExtReal qb = fb.quotient(iu, iv, X[0], X[1]);
        if (!qa.agrees(qb, 1e3 * h2)) quotient_same = false;
      }
  rep.set("quotient_equal", quotient_same);
  rep.set("exit", 0);
  if (!report_path.empty()) rep.write(report_path);
  std::cout << rep.dump();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lie-sphere invariants, deformability, and deformation of Legendre surfaces"};
  app.require_subcommand(1);
  (void)thread_cap();

  std::string manifest_path, out_dir, report_path;
  std::vector<std::string> tol_overrides, plots;
  int section = 0;
  double scale = 1.0;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--manifest", manifest_path, "input manifest (JSON)")->required();
    c->add_option("--out", out_dir, "directory for exported arrays");
    c->add_option("--report", report_path, "write the JSON report to this file");
    c->add_option("--tol", tol_overrides, "tolerance overrides key=value");
  };

  CLI::App* inv = app.add_subcommand("invariants", "classify and compute the invariant fields");
  add_common(inv);
  inv->add_option("--plot", plots, "export CSV plot data for the named fields");
  CLI::App* defo =
      app.add_subcommand("deformability", "decide deformability (dim of the parallel space)");
  add_common(defo);
  CLI::App* def = app.add_subcommand("deform", "synthesize and verify a deformation");
  add_common(def);
  def->add_option("--section", section, "basis section index");
  def->add_option("--scale", scale, "section scale factor");
  CLI::App* ver = app.add_subcommand("verify", "compare two inputs (deformation / congruence)");
  add_common(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    Manifest m = parse_manifest(manifest_path);
    if (inv->parsed()) return cmd_invariants(m, out_dir, report_path, plots);
    if (defo->parsed()) return cmd_deformability(m, out_dir, report_path);
    if (def->parsed()) return cmd_deform(m, out_dir, report_path, section, scale);
    if (ver->parsed()) return cmd_verify(m, report_path);
  } catch (const lieform::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
