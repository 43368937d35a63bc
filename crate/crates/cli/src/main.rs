//! `dualform`: verify chain complexes over integral group rings.
//!
//! Exit status: 0 when every check passes, 1 when a verification fails,
//! 2 on usage or input errors. Queries (`homology`, `asd`, `obstruction`)
//! report their finding as data, so a negative answer still exits 0.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dualform_core::complex::{
    dualize_complex, end_scalars, euler_characteristic, homology, homology_all, is_alg5, is_chain_map,
    validate_complex, ChainComplex, Coefficients,
};
use dualform_core::dual_form::{
    assemble_dual_form, asd_check, dual_head_segment, matrix_strings, normalize_duality, obstruction_check,
    recognize_dual_form, solve_chain_isomorphism, tail_segment, to_dual_form_stage6, DualFormView,
};
use dualform_core::io::{map_from_json, map_to_json, parse_value, read_complex, to_pretty, write_complex};
use dualform_core::lens::{asd_parameter, LensInstance};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::json;

use report::{Report, Verdict};

#[derive(Parser)]
#[command(name = "dualform", version, about = "Verify dual forms of chain complexes over integral group rings")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoeffArg {
    Integral,
    Trivial,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a complex, test the 5-complex conditions and look for dual form.
    Check { file: PathBuf },
    /// Homology with integral (cover) or trivial coefficients.
    Homology {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "integral")]
        coefficients: CoeffArg,
        /// Report a single degree.
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Run the simple-homotopy pipeline and write the result.
    Dualform {
        file: PathBuf,
        /// Where to write the resulting complex.
        #[arg(short, long)]
        output: PathBuf,
        /// Also conjugate to a dual form through an explicit isomorphism.
        #[arg(long)]
        assemble: bool,
        /// Candidate maps the isomorphism search may try.
        #[arg(long, default_value_t = 2000)]
        budget: usize,
    },
    /// Normalize a duality map `C* -> C` of a dual form.
    Normalize { file: PathBuf, mapfile: PathBuf },
    /// Is the middle differential antisymmetric?
    Asd { file: PathBuf },
    /// Parity obstruction to an antisymmetric dual form.
    Obstruction { file: PathBuf },
    /// Build and verify the lens space complex over Z[C_n].
    Lens {
        /// Order of the cyclic group.
        #[arg(long)]
        n: usize,
        /// Sweep n..=TO instead of a single order.
        #[arg(long)]
        to: Option<usize>,
        /// Worker threads for a sweep.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// For n = 4k + 1, build the antisymmetric form.
        #[arg(long)]
        asd: bool,
        /// Write the complex (single order only).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the duality map of the emitted complex.
        #[arg(long)]
        map_out: Option<PathBuf>,
    },
}

/// Problems with the invocation or its input files (exit 2).
struct InputError(String);

type Outcome = Result<Report, InputError>;

fn load(path: &Path) -> Result<ChainComplex, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    read_complex(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn save(path: &Path, text: &str) -> Result<(), InputError> {
    std::fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn group_table(c: &ChainComplex, coeffs: Coefficients) -> Vec<String> {
    homology_all(c, coeffs).map(|v| v.iter().map(ToString::to_string).collect()).unwrap_or_default()
}

fn need_dual_form(c: &ChainComplex, path: &Path) -> Result<DualFormView, InputError> {
    recognize_dual_form(c).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn check(file: &Path) -> Outcome {
    let mut r = Report::new("check");
    r.input("file", file.display().to_string());
    r.phase("load");
    let c = load(file)?;
    r.phase("check");
    let val = validate_complex(&c);
    r.verdict(
        "composition_zero",
        match val.failures.first() {
            None => Ok(()),
            Some(w) => Err(format!("d_{} d_{} has entry ({}, {}) = {}", w.degree, w.degree + 1, w.row, w.col, w.value)),
        },
    );
    let alg = is_alg5(&c);
    r.check("alg5", alg.member(), || alg.failures().join(", "));
    r.data("ranks", c.ranks().iter().rev().collect::<Vec<_>>());
    r.data("group_order", c.group().order());
    r.data("euler_characteristic", euler_characteristic(&c));
    r.data("alg5", &alg);
    match recognize_dual_form(&c) {
        Ok(v) => r.data("dual_form", v.summary()),
        Err(e) => {
            r.data("dual_form", serde_json::Value::Null);
            r.data("dual_form_diagnostic", e.to_string());
        }
    }
    Ok(r)
}

fn homology_cmd(file: &Path, coefficients: CoeffArg, degree: Option<usize>) -> Outcome {
    let coeffs = match coefficients {
        CoeffArg::Integral => Coefficients::Integral,
        CoeffArg::Trivial => Coefficients::Trivial,
    };
    let mut r = Report::new("homology");
    r.input("file", file.display().to_string());
    r.input("coefficients", coeffs);
    r.input("degree", degree);
    r.phase("load");
    let c = load(file)?;
    r.phase("homology");
    if !validate_complex(&c).valid() {
        return Err(InputError(format!("{}: not a chain complex (d d != 0)", file.display())));
    }
    match degree {
        Some(d) => {
            let h = homology(&c, d, coeffs).map_err(|e| InputError(e.to_string()))?;
            r.data(&format!("H_{d}"), h.to_string());
            r.data("group", &h);
        }
        None => r.data("table", group_table(&c, coeffs)),
    }
    Ok(r)
}

fn dualform_cmd(file: &Path, output: &Path, assemble: bool, budget: usize) -> Outcome {
    let mut r = Report::new("dualform");
    r.input("file", file.display().to_string());
    r.input("output", output.display().to_string());
    r.input("assemble", assemble);
    r.input("budget", budget);
    r.phase("load");
    let c = load(file)?;
    r.phase("pipeline");
    let st = match to_dual_form_stage6(&c) {
        Ok(st) => st,
        Err(e) => {
            r.verdict("input_alg5", Err(e.to_string()));
            return Ok(r);
        }
    };
    r.verdict("input_alg5", Ok(()));
    r.data("moves", &st.log);
    let bad = st.log.iter().find(|m| !m.verified);
    r.check("moves_verified", bad.is_none(), || format!("move {} did not verify", bad.map_or(0, |m| m.step)));
    r.phase("verify");
    preserved(&mut r, "stage6", &c, &st.complex);
    let mut out = st.complex.clone();
    r.data("stage6_ranks", st.complex.ranks().iter().rev().collect::<Vec<_>>());
    if let Err(e) = recognize_dual_form(&st.complex) {
        r.data("stage6_dual_form_diagnostic", e.to_string());
    }
    if assemble {
        r.phase("isomorphism");
        let found = tail_segment(&st.complex)
            .and_then(|t| dual_head_segment(&st.complex).map(|h| (t, h)))
            .and_then(|(t, h)| solve_chain_isomorphism(&t, &h, budget));
        match found {
            Ok(Some(iso)) => {
                r.verdict("isomorphism_found", Ok(()));
                r.data("strategy", iso.strategy);
                r.data("attempts", iso.attempts);
                r.phase("assemble");
                match assemble_dual_form(&st.complex, &iso) {
                    Ok(asm) => {
                        r.verdict("assembled_dual_form", Ok(()));
                        preserved(&mut r, "assembled", &c, &asm.complex);
                        r.data("dual_form", asm.view.summary());
                        out = asm.complex;
                    }
                    Err(e) => r.verdict("assembled_dual_form", Err(e.to_string())),
                }
            }
            Ok(None) => r.verdict("isomorphism_found", Err(format!("nothing found within budget {budget}"))),
            Err(e) => r.verdict("isomorphism_found", Err(e.to_string())),
        }
    }
    r.phase("write");
    save(output, &write_complex(&out))?;
    Ok(r)
}

fn preserved(r: &mut Report, label: &str, before: &ChainComplex, after: &ChainComplex) {
    let alg = is_alg5(after);
    r.check(&format!("{label}_alg5"), alg.member(), || alg.failures().join(", "));
    for (name, coeffs) in [("integral", Coefficients::Integral), ("trivial", Coefficients::Trivial)] {
        let (a, b) = (group_table(before, coeffs), group_table(after, coeffs));
        let first = a.iter().zip(&b).position(|(x, y)| x != y);
        r.check(&format!("{label}_{name}_homology"), a == b && !a.is_empty(), || match first {
            Some(d) => format!("degree {d}: {} became {}", a[d], b[d]),
            None => "homology could not be computed".into(),
        });
    }
}

fn normalize_cmd(file: &Path, mapfile: &Path) -> Outcome {
    let mut r = Report::new("normalize");
    r.input("file", file.display().to_string());
    r.input("mapfile", mapfile.display().to_string());
    r.phase("load");
    let c = load(file)?;
    let map_text = std::fs::read_to_string(mapfile).map_err(|e| InputError(format!("{}: {e}", mapfile.display())))?;
    let phi = parse_value(&map_text)
        .and_then(|v| map_from_json(&v, &dualize_complex(&c), &c))
        .map_err(|e| InputError(format!("{}: {e}", mapfile.display())))?;
    r.phase("normalize");
    let view = match recognize_dual_form(&c) {
        Ok(v) => {
            r.verdict("dual_form", Ok(()));
            v
        }
        Err(e) => {
            r.verdict("dual_form", Err(e.to_string()));
            return Ok(r);
        }
    };
    let rep = is_chain_map(&phi);
    r.verdict(
        "phi_chain_map",
        match rep.failures.first() {
            None => Ok(()),
            Some(w) => Err(format!("square {} entry ({}, {}) = {}", w.degree, w.row, w.col, w.value)),
        },
    );
    if let Ok((x, y)) = end_scalars(&phi) {
        r.data("end_scalars", [x.to_string(), y.to_string()]);
    }
    if !rep.is_chain_map() {
        return Ok(r);
    }
    match normalize_duality(&view, &phi) {
        Ok(nd) => {
            r.check("psi_chain_map", nd.psi_failures.is_empty(), || format!("{:?}", nd.psi_failures[0]));
            r.check("homotopy", nd.homotopy_report.verified(), || match nd.homotopy_report.failures.first() {
                Some(w) => format!("degree {} entry ({}, {}) = {}", w.degree, w.row, w.col, w.value),
                None => "end scalars differ".into(),
            });
            r.check("central_square", nd.central_square, || "d3 theta2 != theta1 d3*".into());
            r.data("normalized", nd.summary());
        }
        Err(e) => r.verdict("normalization", Err(e.to_string())),
    }
    Ok(r)
}

fn asd_cmd(file: &Path) -> Outcome {
    let mut r = Report::new("asd");
    r.input("file", file.display().to_string());
    r.phase("load");
    let c = load(file)?;
    let v = need_dual_form(&c, file)?;
    r.phase("asd");
    r.data("asd_check", asd_check(&v));
    r.data("d3", matrix_strings(&v.d3));
    Ok(r)
}

fn obstruction_cmd(file: &Path) -> Outcome {
    let mut r = Report::new("obstruction");
    r.input("file", file.display().to_string());
    r.phase("load");
    let c = load(file)?;
    let v = need_dual_form(&c, file)?;
    r.phase("obstruction");
    let rep = obstruction_check(&v).map_err(|e| InputError(e.to_string()))?;
    r.check("h3_cross_check", rep.cross_check, || {
        format!("rank H_3 = {} but rank J - rank d3 = {} - {}", rep.h3_free_rank, rep.j_rank, rep.form_rank)
    });
    r.data("obstructed", rep.obstructed);
    r.data("report", &rep);
    Ok(r)
}

/// Verdicts and data for one lens space; verdict names carry the order.
fn lens_one(n: usize, asd: bool) -> (Vec<Verdict>, serde_json::Value, Option<(String, String)>) {
    let mut r = Report::new("lens");
    let inst = match LensInstance::new(n) {
        Ok(i) => i,
        Err(e) => {
            r.verdict(&format!("lens({n})"), Err(e.to_string()));
            return (r.verdicts, json!({"n": n}), None);
        }
    };
    let alg = is_alg5(&inst.a);
    r.check("alg5", alg.member(), || alg.failures().join(", "));
    let phi_rep = is_chain_map(&inst.phi);
    r.check("duality_map", phi_rep.is_chain_map(), || format!("{:?}", phi_rep.failures.first()));
    let one = BigInt::from(1);
    let xy_ok = phi_rep.end_scalars.as_ref().is_some_and(|(x, y)| *x == one && *y == -&one);
    r.check("end_scalars", xy_ok, || format!("{:?}", phi_rep.end_scalars));
    let mut data = serde_json::Map::new();
    data.insert("n".into(), json!(n));
    match recognize_dual_form(&inst.a) {
        Ok(v) => {
            r.check("j_rank_congruence", v.j_rank % n == n - 1, || format!("j_rank = {}", v.j_rank));
            let normalized = normalize_duality(&v, &inst.phi).map(|nd| nd.verified()).unwrap_or(false);
            r.check("normalize", normalized, || "normalization did not verify".into());
            if let Ok(obs) = obstruction_check(&v) {
                data.insert("obstructed".into(), json!(obs.obstructed));
            }
        }
        Err(e) => r.verdict("dual_form", Err(e.to_string())),
    }
    data.insert("trivial_homology".into(), json!(group_table(&inst.a, Coefficients::Trivial)));
    let status = if n.is_multiple_of(2) {
        "obstructed"
    } else if asd_parameter(n).is_some() {
        "antisymmetric"
    } else {
        "unknown"
    };
    data.insert("asd_status".into(), json!(status));

    let mut emitted = (write_complex(&inst.a), to_pretty(&map_to_json(&inst.phi)));
    if asd {
        match &inst.transform {
            Some(t) => {
                let ids = t.unit.identities();
                r.check("asd_identities", ids.all(), || format!("{ids:?}"));
                r.check("asd_check", t.asd, || "d3* != -d3".into());
                r.check("asd_homotopy", t.homotopy_report.verified(), || format!("{:?}", t.homotopy_report.failures.first()));
                data.insert("k".into(), json!(t.unit.k));
                data.insert("alpha".into(), json!(t.unit.alpha.to_string()));
                data.insert("beta".into(), json!(t.unit.beta.to_string()));
                data.insert("beta_inv".into(), json!(t.unit.beta_inv.to_string()));
                data.insert("x".into(), json!(t.x.to_string()));
                data.insert("asd_check".into(), json!(t.asd));
                data.insert("diagonal_sign".into(), json!(t.sign));
                emitted = (write_complex(&t.a_prime), to_pretty(&map_to_json(&t.composite)));
            }
            None => {
                let plain = recognize_dual_form(&inst.a).map(|v| asd_check(&v)).unwrap_or(false);
                data.insert("asd_check".into(), json!(plain));
            }
        }
    }
    let verdicts = r
        .verdicts
        .into_iter()
        .map(|v| Verdict { check: format!("lens({n}) {}", v.check), ..v })
        .collect();
    (verdicts, serde_json::Value::Object(data), Some(emitted))
}

fn lens_cmd(n: usize, to: Option<usize>, jobs: usize, asd: bool, output: Option<&Path>, map_out: Option<&Path>) -> Outcome {
    let mut r = Report::new("lens");
    r.input("n", n);
    r.input("to", to);
    r.input("asd", asd);
    if n < 2 {
        return Err(InputError(format!("--n must be at least 2, got {n}")));
    }
    r.phase("lens");
    match to {
        None => {
            let (verdicts, data, emitted) = lens_one(n, asd);
            r.verdicts = verdicts;
            if let serde_json::Value::Object(m) = data {
                r.data = m;
            }
            r.phase("write");
            if let Some((complex, map)) = emitted {
                if let Some(p) = output {
                    save(p, &complex)?;
                }
                if let Some(p) = map_out {
                    save(p, &map)?;
                }
            }
        }
        Some(m) => {
            if output.is_some() || map_out.is_some() {
                return Err(InputError("--output and --map-out take a single order, not a sweep".into()));
            }
            if m < n {
                return Err(InputError(format!("empty range {n}..={m}")));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| InputError(e.to_string()))?;
            let results: Vec<_> = pool.install(|| (n..=m).into_par_iter().map(|k| lens_one(k, asd)).collect());
            let mut instances = Vec::new();
            for (verdicts, data, _) in results {
                r.verdicts.extend(verdicts);
                instances.push(data);
            }
            r.data("instances", instances);
        }
    }
    Ok(r)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check { file } => check(file),
        Command::Homology { file, coefficients, degree } => homology_cmd(file, *coefficients, *degree),
        Command::Dualform { file, output, assemble, budget } => dualform_cmd(file, output, *assemble, *budget),
        Command::Normalize { file, mapfile } => normalize_cmd(file, mapfile),
        Command::Asd { file } => asd_cmd(file),
        Command::Obstruction { file } => obstruction_cmd(file),
        Command::Lens { n, to, jobs, asd, output, map_out } => {
            lens_cmd(*n, *to, *jobs, *asd, output.as_deref(), map_out.as_deref())
        }
    };
    match outcome {
        Ok(mut report) => {
            print!("{}", report.render(cli.json));
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
