use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use fano12::bounds::{self, HigherRank, Ledger, OrbitVerdict};
use fano12::dplattice::{self, ConstructionTarget, DPLattice, LatticeClass};
use fano12::enumerate;
use fano12::linkeq::{self, SolutionReport, SolveOptions, DEFAULT_MODULUS_BOUND};
use fano12::reftable::ReferenceTable;
use fano12::Rational;

#[derive(Parser)]
#[command(name = "fano12", version, about = "Exact numerics for two-ray links through genus-12 Fano threefolds")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Reference table TSV (defaults to the bundled table).
    #[arg(long, global = true)]
    ref_table: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MODULUS_BOUND, global = true)]
    modulus_bound: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
    Text,
}

#[derive(Args, Clone, Copy)]
struct GenusArgs {
    #[arg(long, default_value_t = 12)]
    genus: i64,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the two-ray links and print the realized ones.
    Links {
        #[command(flatten)]
        g: GenusArgs,
        #[arg(long, default_value_t = 2)]
        rank: u32,
    },
    /// Solve one of the link equations.
    #[command(subcommand)]
    Solve(SolveCmd),
    /// Class-group rank bounds.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// del Pezzo lattice computations.
    #[command(subcommand)]
    Dp(DpCmd),
    /// Numerics of the P1-bundle over the plane.
    #[command(subcommand)]
    Bundle(BundleCmd),
    /// Print the loaded reference table.
    Table,
}

#[derive(Subcommand)]
enum SolveCmd {
    /// 11a^2 - ab - b^2 = delta.
    E5 {
        #[command(flatten)]
        g: GenusArgs,
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
        #[arg(long)]
        beta: Option<i64>,
    },
    /// Two conic bundles.
    Cc {
        #[command(flatten)]
        g: GenusArgs,
        #[arg(long)]
        deg: i64,
        #[arg(long)]
        beta: Option<i64>,
    },
    /// Conic bundle against del Pezzo fibration.
    Cd {
        #[command(flatten)]
        g: GenusArgs,
        #[arg(long)]
        deg: i64,
    },
    /// Two del Pezzo fibrations.
    Dd {
        #[command(flatten)]
        g: GenusArgs,
        #[arg(long)]
        fiber: i64,
    },
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Rank bound at (-K)^3 = 24.
    Prop24,
    /// Rank bound for plane-free genus-12 threefolds.
    Le10,
    /// Orbit divisibility for a surface of the given degree.
    Orbit {
        #[arg(long)]
        degree: i64,
    },
    /// Existence of a surface of degree prime to 11.
    SurfaceDegree,
    /// Combined verdict.
    Verdict {
        #[command(flatten)]
        g: GenusArgs,
        #[arg(long)]
        planes_allowed: bool,
    },
}

#[derive(Subcommand)]
enum DpCmd {
    /// Lines on a del Pezzo surface.
    Lines {
        #[arg(long)]
        degree: u32,
    },
    /// Test a class for nefness, e.g. `--class 4,-1,-1,-1,-1,-1`.
    NefCheck {
        #[arg(long)]
        degree: u32,
        #[arg(long, allow_hyphen_values = true)]
        class: String,
    },
    /// Check the surface construction for P3, Q or V5.
    Construction {
        #[arg(long)]
        target: String,
        #[arg(long)]
        degree: Option<u32>,
        /// Override the curve class.
        #[arg(long, allow_hyphen_values = true)]
        curve: Option<String>,
    },
    /// The chain of four lines on the quintic surface.
    Chain {
        #[arg(long, default_value_t = 4)]
        base_rank: u32,
    },
}

#[derive(Subcommand)]
enum BundleCmd {
    Numerics,
}

/// Everything a command prints, in each format.
struct Output {
    json: Value,
    text: String,
    tsv: String,
    ok: bool,
}

struct Failure {
    kind: &'static str,
    message: String,
    code: u8,
}

impl Failure {
    fn input(kind: &'static str, e: impl ToString) -> Self {
        Failure { kind, message: e.to_string(), code: 2 }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn kcube_of(g: GenusArgs) -> Rational {
    Rational::integer(2 * g.genus - 2)
}

fn parse_class(s: &str) -> Result<LatticeClass, Failure> {
    let coords = s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::input("InvalidClass", format!("{s:?}: {e}")))?;
    Ok(LatticeClass::new(coords))
}

fn solve_output(report: SolutionReport, extra: Value) -> Output {
    let check = match report.certificate() {
        Some(cert) => linkeq::verify_certificate(&report.form, cert),
        None => Ok(()),
    };
    let points_ok = report.points().iter().all(|(a, b)| report.form.is_solution(a, b));
    let ok = check.is_ok() && points_ok;
    let points: Vec<String> = report.points().iter().map(|(a, b)| format!("({a}, {b})")).collect();
    let kind = report.certificate().map(|c| c.kind()).unwrap_or("-");
    let mut text = format!("form: {}\nstatus: {}\n", report.form.describe(), report.status_name());
    if !points.is_empty() {
        text.push_str(&format!("points: {}\n", points.join(" ")));
    }
    if report.certificate().is_some() {
        text.push_str(&format!("certificate: {kind} (replay {})\n", if check.is_ok() { "ok" } else { "FAILED" }));
    }
    if let Some(e) = &report.exclusion {
        text.push_str(&format!("excluded: {e}\n"));
    }
    if let Value::Object(m) = &extra {
        for (k, v) in m {
            text.push_str(&format!("{k}: {v}\n"));
        }
    }
    let tsv = format!(
        "form\tstatus\tcertificate\tpoints\n{}\t{}\t{}\t{}\n",
        report.form.describe(),
        report.status_name(),
        kind,
        points.join(" ")
    );
    let json = json!({
        "report": to_value(&report),
        "audit": report.audit(),
        "replay": check.err().unwrap_or_else(|| "ok".into()),
        "extra": extra,
    });
    Output { json, text, tsv, ok }
}

fn ledger_tsv(ledger: &Ledger) -> String {
    let mut out = String::from("step\tclaim\tlhs\trel\trhs\tholds\n");
    for (i, s) in ledger.steps.iter().enumerate() {
        out.push_str(&format!("{}\t{}\t{}\t{}\t{}\t{}\n", i + 1, s.claim, s.lhs, s.rel.symbol(), s.rhs, s.holds()));
    }
    out
}

fn ledger_output(ledger: &Ledger, json: Value) -> Output {
    Output { ok: ledger.verify().is_ok(), text: ledger.to_text(), tsv: ledger_tsv(ledger), json }
}

fn load_table(path: &Option<PathBuf>) -> Result<ReferenceTable, Failure> {
    match path {
        Some(p) => ReferenceTable::load(p).map_err(|e| Failure::input("ReferenceTable", e)),
        None => Ok(ReferenceTable::bundled()),
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let opts = SolveOptions { modulus_bound: cli.modulus_bound, ..SolveOptions::default() };
    if cli.modulus_bound < 2 {
        return Err(Failure::input("InvalidModulusBound", "modulus bound must be at least 2"));
    }
    let table = load_table(&cli.ref_table)?;
    let link_err = |e: linkeq::LinkEqError| Failure::input("LinkEquation", e);
    Ok(match &cli.command {
        Command::Links { g, rank } => {
            let ledger = enumerate::enumerate_links(g.genus, *rank, &table, &opts).map_err(|e| match e {
                enumerate::EnumerateError::UnsupportedGenus(_) => Failure::input("UnsupportedGenus", e),
                enumerate::EnumerateError::UnsupportedRank(_) => Failure::input("UnsupportedRank", e),
                other => Failure { kind: "Enumeration", message: other.to_string(), code: 1 },
            })?;
            Output {
                ok: ledger.revalidate().is_ok(),
                json: ledger.to_json(),
                text: ledger.to_text(),
                tsv: ledger.to_tsv(),
            }
        }
        Command::Solve(cmd) => match cmd {
            SolveCmd::E5 { g, delta, beta } => {
                solve_output(linkeq::solve_e5_pair(&kcube_of(*g), *delta, *beta, &opts).map_err(link_err)?, json!({}))
            }
            SolveCmd::Cc { g, deg, beta } => {
                solve_output(linkeq::solve_cc(&kcube_of(*g), *deg, *beta, &opts).map_err(link_err)?, json!({}))
            }
            SolveCmd::Cd { g, deg } => {
                let cd = linkeq::solve_cd(&kcube_of(*g), *deg, &opts).map_err(link_err)?;
                let extra = json!({
                    "discriminant": cd.discriminant.to_string(),
                    "fiber_degree": cd.fiber_degree.as_ref().map(|f| f.to_string()),
                    "chosen": cd.chosen.as_ref().map(|(a, b)| [a.to_string(), b.to_string()]),
                });
                solve_output(cd.report, extra)
            }
            SolveCmd::Dd { g, fiber } => {
                solve_output(linkeq::solve_dd(&kcube_of(*g), *fiber).map_err(link_err)?, json!({}))
            }
        },
        Command::Bounds(cmd) => {
            let fail = |e: bounds::BoundsError| match e {
                bounds::BoundsError::UnsupportedGenus(_) => Failure::input("UnsupportedGenus", e),
                bounds::BoundsError::InvalidSurfaceDegree(_) => Failure::input("InvalidSurfaceDegree", e),
                other => Failure { kind: "Bounds", message: other.to_string(), code: 1 },
            };
            match cmd {
                BoundsCmd::Prop24 => {
                    let r = bounds::prop24_certify(&table).map_err(fail)?;
                    let mut out = ledger_output(&r.ledger, to_value(&r));
                    out.text.push_str(&format!("bound: {}\n", r.bound));
                    out
                }
                BoundsCmd::Le10 => {
                    let r = bounds::le10_certify(&table).map_err(fail)?;
                    let mut out = ledger_output(&r.ledger, to_value(&r));
                    out.text.push_str(&format!("bound: {}\n", r.bound));
                    out
                }
                BoundsCmd::SurfaceDegree => {
                    let l = bounds::surface_degree_ledger(&table).map_err(fail)?;
                    ledger_output(&l, to_value(&l))
                }
                BoundsCmd::Orbit { degree } => {
                    let v = bounds::orbit_divisibility(*degree).map_err(fail)?;
                    let text = match &v {
                        OrbitVerdict::DivisibleBy11 { min_orbit, rank_lower_bound, .. } => format!(
                            "degree {degree}: orbit size divisible by 11 (least {min_orbit}), r >= {rank_lower_bound}\n"
                        ),
                        OrbitVerdict::NoConclusion { reason, .. } => {
                            format!("degree {degree}: no conclusion ({reason})\n")
                        }
                    };
                    let tsv =
                        format!("degree\tverdict\n{degree}\t{}\n", to_value(&v)["verdict"].as_str().unwrap_or(""));
                    Output { json: to_value(&v), text, tsv, ok: true }
                }
                BoundsCmd::Verdict { g, planes_allowed } => {
                    let v = bounds::main_theorem_verdict(g.genus, *planes_allowed, &table).map_err(fail)?;
                    let higher = match &v.higher_rank {
                        HigherRank::Contradiction { lower, upper } => {
                            format!("r > 2: contradiction, r >= {lower} and r <= {upper}")
                        }
                        HigherRank::NoConclusion { reason } => format!("r > 2: no conclusion ({reason})"),
                    };
                    let rows: Vec<String> = v
                        .rank_two
                        .iter()
                        .map(|r| format!("r = 2: row {}: {} | {}", r.label, r.left.describe(), r.right.describe()))
                        .collect();
                    let ok = v.le10.as_ref().is_none_or(|l| l.verify().is_ok()) && v.surface_degree.verify().is_ok();
                    let text = format!("{higher}\n{}\n", rows.join("\n"));
                    let tsv = format!("case\tverdict\nr>2\t{higher}\n{}\n", rows.join("\n").replace(": row", "\trow"));
                    Output { json: to_value(&v), text, tsv, ok }
                }
            }
        }
        Command::Dp(cmd) => {
            let dp_fail = |e: dplattice::DpError| match e {
                dplattice::DpError::ConstructionViolated(_) => {
                    Failure { kind: "ConstructionViolated", message: e.to_string(), code: 1 }
                }
                other => Failure::input("Lattice", other),
            };
            match cmd {
                DpCmd::Lines { degree } => {
                    let l = DPLattice::new(*degree).map_err(dp_fail)?;
                    let lines = l.exceptional_classes();
                    let names: Vec<String> = lines.iter().map(|c| c.to_string()).collect();
                    let ok = lines.iter().all(|c| l.anti_degree(c) == 1 && l.square(c) == -1);
                    Output {
                        json: json!({ "degree": degree, "count": lines.len(), "lines": to_value(&lines), "names": names }),
                        text: format!("{} lines\n{}\n", names.len(), names.join("\n")),
                        tsv: format!(
                            "line\tcoords\n{}",
                            lines.iter().map(|c| format!("{c}\t{:?}\n", c.coords)).collect::<String>()
                        ),
                        ok,
                    }
                }
                DpCmd::NefCheck { degree, class } => {
                    let l = DPLattice::new(*degree).map_err(dp_fail)?;
                    let d = l.class(parse_class(class)?.coords).map_err(dp_fail)?;
                    let failures = l.nef_failures(&d);
                    let nef = failures.is_empty();
                    let fails: Vec<Value> =
                        failures.iter().map(|(c, v)| json!({ "class": c.to_string(), "pairing": v })).collect();
                    Output {
                        json: json!({ "class": d.to_string(), "nef": nef, "square": l.square(&d), "failures": fails }),
                        text: format!("{d}: {} (D^2 = {})\n", if nef { "nef" } else { "not nef" }, l.square(&d)),
                        tsv: format!("class\tnef\tsquare\n{d}\t{nef}\t{}\n", l.square(&d)),
                        ok: nef,
                    }
                }
                DpCmd::Construction { target, degree, curve } => {
                    let t = ConstructionTarget::parse(target)
                        .ok_or_else(|| Failure::input("InvalidTarget", format!("unknown target {target:?}")))?;
                    let curve = curve.as_deref().map(parse_class).transpose()?;
                    let r = dplattice::construction_check_with(t, degree.unwrap_or(t.surface_degree()), curve)
                        .map_err(dp_fail)?;
                    let lines: Vec<String> = r.trivial_lines.iter().map(|c| c.to_string()).collect();
                    Output {
                        text: format!(
                            "{}: B = {}, pa = {}, -K.B = {}, D = {}, D^2 = {}, trivial line {}, (-K_Y)^3 = {}\n",
                            r.target,
                            r.curve,
                            r.pa,
                            r.anti_degree,
                            r.restricted,
                            r.restricted_square,
                            lines.join(", "),
                            r.ring_kcube
                        ),
                        tsv: format!(
                            "target\tB\tpa\tanti_degree\tD2\ttrivial\tkcube\n{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                            r.target,
                            r.curve,
                            r.pa,
                            r.anti_degree,
                            r.restricted_square,
                            lines.join(","),
                            r.ring_kcube
                        ),
                        json: to_value(&r),
                        ok: true,
                    }
                }
                DpCmd::Chain { base_rank } => {
                    let l = DPLattice::new(5).map_err(dp_fail)?;
                    let r = dplattice::reducible_construction(&l, &dplattice::four_line_chain(&l), *base_rank)
                        .map_err(dp_fail)?;
                    let comps: Vec<String> = r.components.iter().map(|c| c.to_string()).collect();
                    Output {
                        text: format!("{} = {}, pa = {}, r = {}\n", comps.join(" + "), r.total, r.pa, r.rank),
                        tsv: format!(
                            "components\ttotal\tpa\trank\n{}\t{}\t{}\t{}\n",
                            comps.join(","),
                            r.total,
                            r.pa,
                            r.rank
                        ),
                        json: to_value(&r),
                        ok: r.is_chain,
                    }
                }
            }
        }
        Command::Bundle(BundleCmd::Numerics) => {
            let fail = |e: dplattice::DpError| Failure { kind: "Bundle", message: e.to_string(), code: 1 };
            let b = dplattice::pe_numerics().map_err(fail)?;
            let q = dplattice::quartic_section_check().map_err(fail)?;
            let m = &b.monomials;
            let text = format!(
                "c1^2 = {}, c2 = {}\nM^3 = {}, M^2.F = {}, M.F^2 = {}, F^3 = {}, (-K)^3 = {}\n\
                 dim|M+F| >= {}, dim|M+2F| >= {}\n(M+F)^2.K = {}, (M+F)^2.F = {}, (M+2F).(M+F)^2 = {}\n\
                 2(-K)^2.M = {}\nK_S^2 = {}\n",
                b.c1sq,
                b.c2,
                m[0],
                m[1],
                m[2],
                m[3],
                b.kcube,
                b.dim_bounds[0],
                b.dim_bounds[1],
                b.mf2_k,
                b.mf2_f,
                b.m2f_mf2,
                b.two_k2_m,
                q.ksq
            );
            let tsv = format!(
                "M3\tM2F\tMF2\tF3\tkcube\tdim_MF\tdim_M2F\n{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                m[0], m[1], m[2], m[3], b.kcube, b.dim_bounds[0], b.dim_bounds[1]
            );
            let ok = b.kcube == 22 && b.two_k2_m.is_negative() && q.ksq == 4;
            Output { json: json!({ "bundle": to_value(&b), "quartic_section": to_value(&q) }), text, tsv, ok }
        }
        Command::Table => {
            Output { json: to_value(&table), text: table.to_tsv(), tsv: table.to_tsv(), ok: table.validate().is_ok() }
        }
    })
}

// A closed pipe (e.g. `| head`) is not an error worth reporting.
fn emit(text: &str) {
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => emit(&(serde_json::to_string_pretty(&out.json).expect("json") + "\n")),
                Format::Tsv => emit(&out.tsv),
                Format::Text => emit(&out.text),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            let report = json!({ "error": { "kind": f.kind, "message": f.message, "exit_code": f.code } });
            emit(&(serde_json::to_string_pretty(&report).expect("json") + "\n"));
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
