use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use dirikit::beurling::{decompose, verify_jump_transform};
use dirikit::families::generate;
use dirikit::metrics::{
    canonical_intrinsic_metric, default_intrinsic_samples, is_intrinsic, resistance_matrix,
    verify_intrinsic_bijection, verify_resistance_isometry,
};
use dirikit::orderiso::certify;
use dirikit::random::{random_connected_form, random_permutation, IntertwinedPair};
use dirikit::random::{random_doob_pair, random_relabel_pair, relabel_pair, stream};
use dirikit::search::{find_intertwiners, spectra_match};
use dirikit::spectral::{is_irreducible, is_recurrent};
use dirikit::{
    Error, FamilyParams, GraphForm, PseudoMetric, Reason, SearchOptions, Tol, VerificationReport,
};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};
use crate::json::{self, format_f64, num, num_array, vertex_map};
use crate::{Cli, Command, Io, Transform, EXIT_FALSE, EXIT_OK};

pub struct Output {
    pub value: Value,
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(value: Value, text: String) -> Self {
        Self {
            value,
            text,
            code: EXIT_OK,
        }
    }

    fn verdict(value: Value, text: String, verdict: bool) -> Self {
        Self {
            value,
            text,
            code: if verdict { EXIT_OK } else { EXIT_FALSE },
        }
    }
}

pub fn dispatch(cli: &Cli, tol: Tol, io: &mut Io<'_>) -> Result<Output> {
    let mut input = Input { io };
    match &cli.command {
        Command::Check { graph } => check(&input.graph(graph)?),
        Command::Search {
            g1,
            g2,
            max,
            spectral_tol,
        } => {
            let opts = SearchOptions {
                tol,
                max_solutions: *max,
                spectral_tol: *spectral_tol,
                jobs: cli.jobs,
            };
            search(&input.graph(g1)?, &input.graph(g2)?, &opts)
        }
        Command::Certify { files, pair } => {
            let (q1, q2, u) = match (pair, files.as_slice()) {
                (Some(p), []) => {
                    let mut bundle = match input.value(p)? {
                        Value::Object(m) => m,
                        _ => return Err(CliError::Input(format!("{p}: expected an object"))),
                    };
                    let mut take = |k: &str| {
                        bundle
                            .remove(k)
                            .ok_or_else(|| CliError::Input(format!("{p}: missing key \"{k}\"")))
                    };
                    let q1 = json::graph_from_value(take("g1")?, p)?;
                    let q2 = json::graph_from_value(take("g2")?, p)?;
                    let u = json::iso_from_value(take("u")?, q1.space(), q2.space(), p)?;
                    (q1, q2, u)
                }
                (None, [f1, f2, fu]) => {
                    let q1 = input.graph(f1)?;
                    let q2 = input.graph(f2)?;
                    let v = input.value(fu)?;
                    let u = json::iso_from_value(v, q1.space(), q2.space(), fu)?;
                    (q1, q2, u)
                }
                _ => {
                    return Err(CliError::Usage(
                        "certify needs G1 G2 U or --pair FILE".into(),
                    ))
                }
            };
            certify_all(&q1, &q2, &u, tol)
        }
        Command::Resistance { graph } => resistance(&input.graph(graph)?),
        Command::Intrinsic { graph, metric } => {
            let q = input.graph(graph)?;
            match metric {
                None => intrinsic_canonical(&q, tol),
                Some(f) => {
                    let v = input.value(f)?;
                    let d = json::metric_from_value(v, q.len(), f)?;
                    intrinsic_check(&q, &d, tol)
                }
            }
        }
        Command::Decompose { graph } => decompose_cmd(&input.graph(graph)?),
        Command::Gen {
            family,
            n,
            conductance,
            measure,
            killing,
        } => {
            let params = FamilyParams {
                conductance: *conductance,
                measure: *measure,
                killing: *killing,
            };
            let q = generate(*family, *n, params)?;
            Ok(Output::ok(json::graph_to_value(&q), graph_text(&q)))
        }
        Command::GenPair {
            transform,
            n,
            scale,
            killing,
            dir,
        } => gen_pair(*transform, *n, *scale, *killing, cli.seed, dir.as_deref()),
    }
}

struct Input<'a, 'b> {
    io: &'a mut Io<'b>,
}

impl Input<'_, '_> {
    fn read(&mut self, name: &str) -> Result<String> {
        if name == "-" {
            let mut s = String::new();
            self.io
                .stdin
                .read_to_string(&mut s)
                .map_err(|e| CliError::Io {
                    path: "<stdin>".into(),
                    message: e.to_string(),
                })?;
            Ok(s)
        } else {
            fs::read_to_string(name).map_err(|e| CliError::Io {
                path: name.into(),
                message: e.to_string(),
            })
        }
    }

    fn value(&mut self, name: &str) -> Result<Value> {
        let text = self.read(name)?;
        json::parse_value(&text, name)
    }

    fn graph(&mut self, name: &str) -> Result<GraphForm> {
        let v = self.value(name)?;
        json::graph_from_value(v, name)
    }
}

fn check(q: &GraphForm) -> Result<Output> {
    let g = q.generator();
    let spectrum = &g.spectral().eigenvalues;
    let irreducible = is_irreducible(q);
    let recurrent = is_recurrent(q);
    let mut v = Map::new();
    v.insert("vertices".into(), q.len().into());
    v.insert("edges".into(), q.edge_count().into());
    v.insert("total_mass".into(), num(q.space().total_mass()));
    v.insert("irreducible".into(), irreducible.into());
    v.insert("recurrent".into(), recurrent.into());
    v.insert("spectrum".into(), num_array(spectrum));

    let mut t = String::new();
    let _ = writeln!(t, "vertices     {}", q.len());
    let _ = writeln!(t, "edges        {}", q.edge_count());
    let _ = writeln!(t, "total mass   {}", format_f64(q.space().total_mass()));
    let _ = writeln!(t, "irreducible  {irreducible}");
    let _ = writeln!(t, "recurrent    {recurrent}");
    let _ = writeln!(t, "spectrum     {}", join(spectrum));
    Ok(Output::ok(Value::Object(v), t))
}

fn search(q1: &GraphForm, q2: &GraphForm, opts: &SearchOptions) -> Result<Output> {
    let found = find_intertwiners(q1, q2, opts)?;
    let reason = if !found.is_empty() {
        None
    } else if q1.len() != q2.len() {
        Some(Reason::Size)
    } else if !spectra_match(q1, q2, opts.spectral_tol) {
        Some(Reason::Spectrum)
    } else {
        Some(Reason::Exhausted)
    };
    let equivalent = reason.is_none();

    let mut v = Map::new();
    v.insert(
        "verdict".into(),
        if equivalent {
            "equivalent"
        } else {
            "inequivalent"
        }
        .into(),
    );
    v.insert(
        "reason".into(),
        reason.map_or(Value::Null, |r| r.as_str().into()),
    );
    v.insert("count".into(), found.len().into());
    v.insert(
        "limit_reached".into(),
        (found.len() >= opts.max_solutions).into(),
    );
    v.insert(
        "intertwiners".into(),
        Value::Array(found.iter().map(json::iso_to_value).collect()),
    );

    let mut t = String::new();
    match reason {
        None => {
            let _ = writeln!(t, "equivalent: {} intertwiner(s)", found.len());
        }
        Some(r) => {
            let _ = writeln!(t, "inequivalent ({})", r.as_str());
        }
    }
    let (s1, s2) = (q1.space(), q2.space());
    for (k, u) in found.iter().enumerate() {
        let _ = writeln!(t, "#{k}");
        for (y, &x) in u.tau().iter().enumerate() {
            let _ = writeln!(
                t,
                "  {} <- {}  h = {}",
                s2.vertex(y),
                s1.vertex(x),
                format_f64(u.scaling()[y])
            );
        }
    }
    Ok(Output::verdict(Value::Object(v), t, equivalent))
}

fn certify_all(q1: &GraphForm, q2: &GraphForm, u: &dirikit::OrderIso, tol: Tol) -> Result<Output> {
    let recurrent = is_recurrent(q1) && is_recurrent(q2);
    let mut report = VerificationReport::new();
    let alpha = match certify(u, q1, q2, tol) {
        Ok(cert) => {
            let alpha = cert.alpha;
            let intertwined = cert.report.verdict();
            report.absorb("orderiso.", cert.report);
            if intertwined {
                report.absorb("beurling.", verify_jump_transform(u, q1, q2, tol)?);
                if recurrent {
                    report.absorb("resistance.", verify_resistance_isometry(u, q1, q2, tol)?);
                    let samples = default_intrinsic_samples(q1)?;
                    report.absorb(
                        "intrinsic.",
                        verify_intrinsic_bijection(u, q1, q2, &samples, tol)?,
                    );
                }
            }
            alpha
        }
        Err(Error::NotIntertwining { residual, bound }) => {
            report.record("orderiso.intertwining", residual, bound);
            None
        }
        Err(e) => return Err(e.into()),
    };
    let (beta, ratio) = (u.beta(), u.scaling_ratio());
    let verdict = report.verdict();
    let h_constant = tol.accepts(ratio - 1.0, 1.0);

    let mut v = Map::new();
    v.insert("verdict".into(), verdict.into());
    v.insert("beta".into(), num(beta));
    v.insert("scaling_ratio".into(), num(ratio));
    v.insert("h_constant".into(), h_constant.into());
    v.insert("alpha".into(), alpha.map_or(Value::Null, num));
    v.insert("recurrent".into(), recurrent.into());
    v.insert("h".into(), vertex_map(u.target(), u.scaling()));
    v.insert("report".into(), json::report_to_value(&report));

    let mut t = String::new();
    let _ = writeln!(t, "β             {}", format_f64(beta));
    let _ = writeln!(t, "max h / min h {}", format_f64(ratio));
    if let Some(a) = alpha {
        let _ = writeln!(t, "α             {}", format_f64(a));
    }
    let _ = writeln!(t, "recurrent     {recurrent}");
    t.push_str(&report_text(&report));
    Ok(Output::verdict(Value::Object(v), t, verdict))
}

fn resistance(q: &GraphForm) -> Result<Output> {
    let r = resistance_matrix(q)?;
    Ok(Output::ok(json::metric_to_value(&r), metric_text(q, &r)))
}

fn intrinsic_canonical(q: &GraphForm, tol: Tol) -> Result<Output> {
    let d = canonical_intrinsic_metric(q)?;
    let c = is_intrinsic(q, &d, tol)?;
    let mut t = metric_text(q, &d);
    let _ = writeln!(t, "slack {}", join(&c.slack));
    Ok(Output::ok(json::metric_to_value(&d), t))
}

fn intrinsic_check(q: &GraphForm, d: &PseudoMetric, tol: Tol) -> Result<Output> {
    let c = is_intrinsic(q, d, tol)?;
    let space = q.space();
    let mut report = VerificationReport::new();
    for (x, (&s, &m)) in c.slack.iter().zip(q.measure()).enumerate() {
        report
            .record(format!("slack.{}", space.vertex(x)), -s, tol.bound(m))
            .with_detail(format!("m - Σ b d² = {}", format_f64(s)));
    }
    let mut v = Map::new();
    v.insert("intrinsic".into(), c.intrinsic.into());
    v.insert("slack".into(), vertex_map(space, &c.slack));
    v.insert("report".into(), json::report_to_value(&report));
    Ok(Output::verdict(
        Value::Object(v),
        report_text(&report),
        c.intrinsic,
    ))
}

fn decompose_cmd(q: &GraphForm) -> Result<Output> {
    let jk = decompose(q);
    let space = jk.space();
    let mut t = String::new();
    for (x, y, j) in jk.jumps() {
        let _ = writeln!(
            t,
            "J({}, {}) = {}",
            space.vertex(x),
            space.vertex(y),
            format_f64(j)
        );
    }
    for (x, &k) in jk.killing().iter().enumerate() {
        let _ = writeln!(t, "k({}) = {}", space.vertex(x), format_f64(k));
    }
    Ok(Output::ok(json::jump_killing_to_value(&jk), t))
}

fn gen_pair(
    transform: Transform,
    n: usize,
    scale: Option<f64>,
    killing: bool,
    seed: u64,
    dir: Option<&Path>,
) -> Result<Output> {
    let mut rng = stream(seed, 0);
    let pair: IntertwinedPair = match transform {
        Transform::Relabel => {
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            match scale {
                None => random_relabel_pair(&mut rng, n, killing),
                Some(k) if k.is_finite() && k > 0.0 => {
                    let q1 = random_connected_form(&mut rng, n, killing);
                    let tau = random_permutation(&mut rng, n);
                    relabel_pair(&q1, &tau, k)?
                }
                Some(k) => {
                    return Err(CliError::Usage(format!(
                        "--scale must be finite and positive, got {k}"
                    )))
                }
            }
        }
        Transform::Doob => {
            if scale.is_some() || killing {
                return Err(CliError::Usage(
                    "--scale and --killing apply to relabel only".into(),
                ));
            }
            if n < 2 {
                return Err(CliError::Usage("doob pairs need --n >= 2".into()));
            }
            random_doob_pair(&mut rng, n)
        }
    };
    let g1 = json::graph_to_value(&pair.q1);
    let g2 = json::graph_to_value(&pair.q2);
    let u = json::iso_to_value(&pair.iso);
    if let Some(dir) = dir {
        for (name, v) in [("g1.json", &g1), ("g2.json", &g2), ("u.json", &u)] {
            let path = dir.join(name);
            fs::write(&path, json::render(v)).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        }
    }
    let mut t = String::new();
    t.push_str("G1\n");
    t.push_str(&graph_text(&pair.q1));
    t.push_str("G2\n");
    t.push_str(&graph_text(&pair.q2));
    let _ = writeln!(t, "U  (β = {})", format_f64(pair.iso.beta()));
    let (s1, s2) = (pair.iso.source(), pair.iso.target());
    for (y, &x) in pair.iso.tau().iter().enumerate() {
        let _ = writeln!(
            t,
            "  {} <- {}  h = {}",
            s2.vertex(y),
            s1.vertex(x),
            format_f64(pair.iso.scaling()[y])
        );
    }
    let mut v = Map::new();
    v.insert("g1".into(), g1);
    v.insert("g2".into(), g2);
    v.insert("u".into(), u);
    Ok(Output::ok(Value::Object(v), t))
}

fn join(xs: &[f64]) -> String {
    xs.iter()
        .map(|&x| format_f64(x))
        .collect::<Vec<_>>()
        .join(" ")
}

fn graph_text(q: &GraphForm) -> String {
    let space = q.space();
    let mut t = String::new();
    for (x, id) in space.vertices().iter().enumerate() {
        let _ = write!(t, "  {id}  m = {}", format_f64(space.measure()[x]));
        if q.killing()[x] != 0.0 {
            let _ = write!(t, "  c = {}", format_f64(q.killing()[x]));
        }
        t.push('\n');
    }
    for (i, j, b) in q.edges() {
        let _ = writeln!(
            t,
            "  {} -- {}  b = {}",
            space.vertex(i),
            space.vertex(j),
            format_f64(b)
        );
    }
    t
}

fn metric_text(q: &GraphForm, d: &PseudoMetric) -> String {
    let mut t = String::new();
    for (x, row) in d.rows().iter().enumerate() {
        let _ = writeln!(t, "{}  {}", q.space().vertex(x), join(row));
    }
    t
}

fn report_text(r: &VerificationReport) -> String {
    let mut t = String::new();
    for c in r.checks() {
        let _ = write!(
            t,
            "{} {}  residual {:.3e} / tol {:.3e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.residual,
            c.tol
        );
        if let Some(d) = &c.detail {
            let _ = write!(t, "  ({d})");
        }
        t.push('\n');
    }
    let _ = writeln!(t, "verdict {}", r.verdict());
    t
}
