use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use econet::config::{parse_years, NormalizationArg};
use econet::emit::{var_csv, OutDir};
use econet::error::{Result, StageExt};
use econet::ingest::{covariates_csv, flows_csv, prices_csv};
use econet::pipeline::{
    load_inputs, load_prices, run_pipeline, simulate, year_network, Provenance,
};
use econet::{write_report, CliError, Format, Formats, Overrides, RunConfig};
use econet_core::econometrics::table::var_text;
use econet_core::netcore::export::{layer_edge_csv, tree_dot, tree_edge_csv};
use econet_core::timeseries::{log_returns, pearson_correlation};

#[derive(Parser)]
#[command(
    name = "econet",
    version,
    about = "Multiplex financial/trade networks and their regressions"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Generator seed (gravity mode)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write only this format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Years, e.g. `2001-2009` or `2001,2005`
    #[arg(long, global = true, value_parser = |s: &str| parse_years(s).map(YearList))]
    years: Option<YearList>,
    #[arg(long, global = true, value_enum)]
    normalization: Option<NormalizationArg>,
    /// Wide prices CSV (file mode)
    #[arg(long, global = true)]
    prices: Option<PathBuf>,
    #[arg(long, global = true)]
    trade: Option<PathBuf>,
    #[arg(long, global = true)]
    fdi: Option<PathBuf>,
    #[arg(long, global = true)]
    covariates: Option<PathBuf>,
}

/// Parsed `--years`; a newtype so clap treats the list as one value.
#[derive(Clone)]
struct YearList(Vec<i32>);

#[derive(Subcommand)]
enum Command {
    /// Log returns per year
    Returns,
    /// Return correlation matrices per year
    Corr,
    /// Eigenvector centralities of every layer
    Evc,
    /// Minimum spanning trees of the return correlation network
    Mst,
    /// Layer edge lists and correlation/trade pair tables
    Multiplex {
        /// Origin country for pair tables (repeatable)
        #[arg(long)]
        origin: Vec<String>,
    },
    /// Generate a synthetic economy and export it as input files
    GravitySim,
    /// Yearly cross-section regressions
    Regress,
    /// Panel fixed/random effects and the Hausman test
    Panel,
    /// 2SLS and LIML, one column per year
    Iv,
    /// Per-country VAR(2) of return and trade centrality
    Var,
    /// Full pipeline and every output
    Report,
}

fn config(c: &Common) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if c.config.is_none() && c.prices.is_none() {
        cfg.gravity = Some(Default::default());
    }
    cfg.apply(&Overrides {
        seed: c.seed,
        out: c.out.clone(),
        years: c.years.as_ref().map(|y| y.0.clone()),
        normalization: c.normalization,
        prices: c.prices.clone(),
        trade: c.trade.clone(),
        fdi: c.fdi.clone(),
        covariates: c.covariates.clone(),
    });
    cfg.validate()?;
    Ok(cfg)
}

fn formats(c: &Common, cfg: &RunConfig, allowed: &[Format], default: Format) -> Result<Formats> {
    match c.format {
        Some(f) if !allowed.contains(&f) => Err(CliError::Config(format!(
            "--format {f:?} not supported here; use one of {allowed:?}"
        ))),
        Some(f) => Ok(Formats::only(f)),
        None if allowed.len() > 1 || default == Format::Json => Ok(Formats {
            csv: cfg.emit.tables && allowed.contains(&Format::Csv),
            json: cfg.emit.json && allowed.contains(&Format::Json),
            dot: cfg.emit.dot && allowed.contains(&Format::Dot),
            txt: cfg.emit.tables && allowed.contains(&Format::Txt),
            edge_lists: cfg.emit.edge_lists,
        }),
        None => Ok(Formats::only(default)),
    }
}

fn wide_csv(entities: &[String], periods: &[String], values: &[Vec<f64>]) -> String {
    let mut out = format!("date,{}\n", entities.join(","));
    for (t, p) in periods.iter().enumerate() {
        let row: Vec<String> = values.iter().map(|r| r[t].to_string()).collect();
        out.push_str(&format!("{p},{}\n", row.join(",")));
    }
    out
}

fn matrix_csv(entities: &[String], m: &[Vec<f64>]) -> String {
    let mut out = format!("entity,{}\n", entities.join(","));
    for (e, row) in entities.iter().zip(m) {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&format!("{e},{}\n", cells.join(",")));
    }
    out
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let c = &cli.common;
    let cfg = config(c)?;
    let prov = Provenance::of(&cfg);
    let dir: &Path = &cfg.run.out;
    match cli.command {
        Command::Returns | Command::Corr => {
            let returns_cmd = matches!(cli.command, Command::Returns);
            let f = formats(c, &cfg, &[Format::Csv, Format::Json], Format::Csv)?;
            let mut out = OutDir::create(dir, &prov)?;
            let mut json = Vec::new();
            for (year, prices) in load_prices(&cfg)? {
                let r = log_returns(&prices).stage(format!("returns {year}"))?;
                if returns_cmd {
                    if f.csv {
                        out.csv(
                            &format!("returns_{year}.csv"),
                            &wide_csv(r.entities(), r.periods(), r.returns()),
                        )?;
                    }
                    json.push(serde_json::json!({ "year": year, "returns": r }));
                } else {
                    let rho = pearson_correlation(&r).stage(format!("correlation {year}"))?;
                    if f.csv {
                        out.csv(
                            &format!("corr_{year}.csv"),
                            &matrix_csv(rho.entities(), rho.rho()),
                        )?;
                    }
                    json.push(serde_json::json!({ "year": year, "correlation": rho }));
                }
            }
            if f.json {
                let name = if returns_cmd {
                    "returns.json"
                } else {
                    "corr.json"
                };
                out.json(
                    name,
                    &serde_json::json!({ "provenance": prov, "years": json }),
                )?;
            }
            Ok(out.written)
        }
        Command::Evc | Command::Mst | Command::Multiplex { .. } => {
            let origins = match &cli.command {
                Command::Multiplex { origin } if !origin.is_empty() => origin.clone(),
                _ => cfg.run.pair_origins.clone(),
            };
            let allowed: &[Format] = match cli.command {
                Command::Mst => &[Format::Csv, Format::Json, Format::Dot],
                _ => &[Format::Csv, Format::Json],
            };
            let f = formats(c, &cfg, allowed, Format::Csv)?;
            let mut out = OutDir::create(dir, &prov)?;
            let mut nets = Vec::new();
            for inp in load_inputs(&cfg)? {
                let net = year_network(&inp, cfg.normalization(), &origins)?;
                let y = net.year;
                match cli.command {
                    Command::Evc if f.csv => {
                        out.csv(&format!("centrality_{y}.csv"), &net.centrality.to_csv())?
                    }
                    Command::Mst => {
                        if f.csv || f.edge_lists {
                            out.csv(&format!("mst_{y}.csv"), &tree_edge_csv(&net.mst))?;
                        }
                        if f.dot {
                            out.dot(
                                &format!("mst_{y}.dot"),
                                &tree_dot(&net.mst, &format!("mst_{y}"), Some(&net.bands)),
                            )?;
                        }
                    }
                    Command::Multiplex { .. } if f.csv => {
                        for (name, layer) in [("trade", &inp.trade), ("fdi", &inp.fdi)] {
                            out.csv(&format!("{name}_edges_{y}.csv"), &layer_edge_csv(layer))?;
                        }
                        for p in &net.pairs {
                            out.csv(&format!("pairs_{y}_{}.csv", p.origin), &p.to_csv())?;
                        }
                    }
                    _ => {}
                }
                nets.push(net);
            }
            if f.json {
                out.json(
                    "networks.json",
                    &serde_json::json!({ "provenance": prov, "years": nets }),
                )?;
            }
            Ok(out.written)
        }
        Command::GravitySim => {
            if cfg.gravity.is_none() {
                return Err(CliError::Config(
                    "gravity-sim needs [gravity] parameters".into(),
                ));
            }
            let (economies, cov) = simulate(&cfg)?;
            let mut out = OutDir::create(dir, &prov)?;
            let panels: Vec<_> = economies.iter().map(|e| &e.prices).collect();
            out.csv("prices.csv", &prices_csv(&panels))?;
            let years = &cfg.run.years;
            let trade: Vec<_> = years
                .iter()
                .copied()
                .zip(economies.iter().map(|e| &e.trade))
                .collect();
            let fdi: Vec<_> = years
                .iter()
                .copied()
                .zip(economies.iter().map(|e| &e.fdi))
                .collect();
            out.csv("trade.csv", &flows_csv(&trade))?;
            out.csv("fdi.csv", &flows_csv(&fdi))?;
            out.csv("covariates.csv", &covariates_csv(&cov))?;
            let truth: Vec<_> = economies.iter().map(|e| &e.truth).collect();
            out.json(
                "truth.json",
                &serde_json::json!({ "provenance": prov, "truth": truth }),
            )?;
            let mut file_cfg = cfg.clone();
            file_cfg.gravity = None;
            file_cfg.input = Some(econet::config::InputPaths {
                prices: "prices.csv".into(),
                trade: Some("trade.csv".into()),
                fdi: Some("fdi.csv".into()),
                covariates: Some("covariates.csv".into()),
            });
            file_cfg.run.out = "report".into();
            let path = dir.join("run.toml");
            std::fs::write(&path, file_cfg.to_toml()).map_err(|e| CliError::io(&path, e))?;
            out.written.push(path);
            Ok(out.written)
        }
        Command::Regress | Command::Panel | Command::Iv | Command::Var => {
            let f = formats(
                c,
                &cfg,
                &[Format::Csv, Format::Json, Format::Txt],
                Format::Txt,
            )?;
            let report = run_pipeline(&cfg)?;
            let mut out = OutDir::create(dir, &prov)?;
            let mut tables = Vec::new();
            let mut text = String::new();
            let mut csvs = Vec::new();
            match cli.command {
                Command::Regress => {
                    for y in &report.yearly {
                        tables.push(serde_json::to_value(&y.cross_section).expect("serializes"));
                        text.push_str(&y.cross_section.to_text());
                        text.push('\n');
                        csvs.push((
                            format!("cross_section_{}.csv", y.network.year),
                            y.cross_section.to_csv(),
                        ));
                    }
                }
                Command::Panel => {
                    let p = report.panel.as_ref().ok_or_else(|| {
                        CliError::Config("panel stage needs at least two years".into())
                    })?;
                    tables.push(serde_json::to_value(p).expect("serializes"));
                    text = format!("{}{}\n", p.table.to_text(), p.hausman_line);
                    csvs.push(("panel.csv".into(), p.table.to_csv()));
                }
                Command::Iv => {
                    for (t, name) in report.iv.iter().zip(["iv_2sls.csv", "iv_liml.csv"]) {
                        tables.push(serde_json::to_value(t).expect("serializes"));
                        text.push_str(&t.to_text());
                        text.push('\n');
                        csvs.push((name.to_string(), t.to_csv()));
                    }
                }
                _ => {
                    for v in &report.var {
                        tables.push(serde_json::to_value(v).expect("serializes"));
                        text.push_str(&var_text(&v.title, &v.result));
                        text.push('\n');
                        csvs.push((format!("var_{}.csv", v.entity), var_csv(&v.result)));
                    }
                }
            }
            if f.txt {
                out.txt("tables.txt", &text)?;
            }
            if f.csv {
                for (name, body) in &csvs {
                    out.csv(name, body)?;
                }
            }
            if f.json {
                out.json("tables.json", &serde_json::json!({ "provenance": prov, "tables": tables, "notes": report.notes }))?;
            }
            Ok(out.written)
        }
        Command::Report => {
            let f = formats(
                c,
                &cfg,
                &[Format::Csv, Format::Json, Format::Dot, Format::Txt],
                Format::Json,
            )?;
            let report = run_pipeline(&cfg)?;
            write_report(&report, dir, f)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(files) => {
            let mut stdout = std::io::stdout().lock();
            for f in files {
                if writeln!(stdout, "{}", f.display()).is_err() {
                    break;
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
