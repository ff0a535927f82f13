//! The five subcommands. Each reads a parsed config, computes, and writes its outputs
//! into the output directory.

use std::fs::File;
use std::path::{Path, PathBuf};

use ednet::approx::{catalog, certify, ApproxPlan};
use ednet::presets;
use ednet::rates::{lambda_table, rate_table, DependenceSpec};
use ednet::simulate::{lag_embed_with, Scaler, Series};
use ednet::train::{
    best_cell, empirical_risk, forecast_errors, naive_predict, run_sweep, sweep_table_csv, train_sgd, SweepSpec, TrainConfig,
};
use ednet::{rng, Architecture, Network};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{CertifyConfig, EvaluateConfig, Preset, RatesConfig, SimulateConfig, TrainCommandConfig};
use crate::provenance::Provenance;
use crate::Failure;

/// Where the multi-site weather data can be obtained; printed, never downloaded.
pub const FETCH_NOTE: &str = "The multi-site temperature data are the daily station observations of the \
Deutscher Wetterdienst, available at \
https://opendata.dwd.de/climate_environment/CDC/observations_germany/climate/daily/kl/historical \
(daily mean temperature, one CSV per station). Convert them to the series format t,x1,...,xd \
and pass the file as `data` to the train command. Nothing is downloaded by this tool.";

pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self, Failure> {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Output { dir: dir.to_path_buf() })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn text(&self, name: &str, contents: &str) -> Result<PathBuf, Failure> {
        let path = self.path(name);
        std::fs::write(&path, contents).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, Failure> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Numeric(format!("cannot serialize {name}: {e}")))?;
        s.push('\n');
        self.text(name, &s)
    }
}

fn read_series(path: &Path) -> Result<Series, Failure> {
    let file = File::open(path).map_err(|e| Failure::Config(format!("cannot open series {}: {e}", path.display())))?;
    Series::read_csv(file).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

pub fn simulate(cfg: &SimulateConfig, out: &Output) -> Result<(), Failure> {
    let seed = cfg.seed.unwrap_or(0);
    let prov = Provenance::new("simulate", cfg, seed);
    let generator = cfg.model.build(seed)?;
    let r = generator.lags();
    if cfg.n < r + 1 {
        return Err(Failure::Config(format!("n = {} is too short: need at least r + 1 = {} steps", cfg.n, r + 1)));
    }
    let series = generator.generate(cfg.n, cfg.burn_in)?;
    let mut buf = Vec::new();
    series.write_csv(&mut buf, &prov.comment_lines())?;
    let csv = out.text("series.csv", &String::from_utf8(buf).expect("csv is utf-8"))?;
    out.json(
        "series.json",
        &json!({
            "provenance": prov,
            "model": cfg.model,
            "d": series.dim(),
            "r": r,
            "n": cfg.n,
            "burn_in": cfg.burn_in,
            "seed": seed,
        }),
    )?;
    println!("wrote {} ({} steps, d = {})", csv.display(), series.len(), series.dim());
    Ok(())
}

/// A training run with every preset default and override applied.
struct TrainPlan {
    series: Series,
    n_train: usize,
    r: usize,
    normalize: bool,
    arch: Option<Architecture>,
    train: TrainConfig,
    sweep: Option<SweepSpec>,
}

fn resolve(cfg: &TrainCommandConfig, seed: u64) -> Result<TrainPlan, Failure> {
    let mut plan = match (cfg.preset, &cfg.data) {
        (Some(_), Some(_)) => return Err(Failure::Config("give either `preset` or `data`, not both".into())),
        (None, None) => return Err(Failure::Config("one of `preset` or `data` is required".into())),
        (Some(Preset::Seasonal), None) => {
            let p = presets::seasonal(seed);
            TrainPlan {
                series: p.series()?,
                n_train: p.n_train,
                r: 1,
                normalize: p.sweep.normalize,
                arch: None,
                train: p.train,
                sweep: Some(p.sweep),
            }
        }
        (Some(preset), None) => {
            let p = if preset == Preset::LowD { presets::low_d(seed) } else { presets::high_d(seed) };
            TrainPlan {
                series: p.series()?,
                n_train: p.n_train,
                r: p.model.r,
                normalize: false,
                arch: Some(p.arch),
                train: p.train,
                sweep: None,
            }
        }
        (None, Some(path)) => {
            let series = read_series(path)?;
            let train = cfg.train.clone().ok_or_else(|| Failure::Config("`train` settings are required with `data`".into()))?;
            TrainPlan { n_train: series.len(), series, r: 1, normalize: false, arch: None, train, sweep: None }
        }
    };
    if let Some(n) = cfg.n_train {
        plan.n_train = n;
    }
    if let Some(r) = cfg.r {
        plan.r = r;
    }
    if let Some(t) = &cfg.train {
        plan.train = t.clone();
    }
    if let Some(e) = cfg.epochs {
        plan.train.epochs = e;
    }
    plan.train.seed = seed;
    if let Some(a) = &cfg.architecture {
        let arch = Architecture::new(a.widths.clone())?;
        plan.arch = Some(match a.bottleneck {
            Some(l) => arch.with_bottleneck(l)?,
            None => arch,
        });
    }
    if let Some(s) = &cfg.sweep {
        plan.sweep = Some(s.clone());
    }
    if let Some(n) = cfg.normalize {
        plan.normalize = n;
        if let Some(s) = plan.sweep.as_mut() {
            s.normalize = n;
        }
    }
    plan.train.validate()?;
    cfg.weight.validate()?;
    if plan.n_train > plan.series.len() {
        return Err(Failure::Config(format!("n_train = {} exceeds the {} rows of the series", plan.n_train, plan.series.len())));
    }
    Ok(plan)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    provenance: serde_json::Value,
    r: usize,
    scaler: Option<Scaler>,
    network: serde_json::Value,
}

fn network_value(net: &Network) -> Result<serde_json::Value, Failure> {
    Ok(serde_json::from_str(&net.to_json()?).expect("network JSON parses"))
}

pub fn train(cfg: &TrainCommandConfig, out: &Output) -> Result<(), Failure> {
    let seed = cfg.seed.or(cfg.train.as_ref().map(|t| t.seed)).unwrap_or(0);
    let prov = Provenance::new("train", cfg, seed);
    let plan = resolve(cfg, seed)?;
    let train_part = plan.series.slice(0..plan.n_train);
    let test_part = plan.series.slice(plan.n_train..plan.series.len());

    if let Some(spec) = &plan.sweep {
        if test_part.is_empty() {
            return Err(Failure::Config("a sweep needs held-out rows: n_train must be below the series length".into()));
        }
        let cells = run_sweep(&train_part, &test_part, spec, &plan.train, &cfg.weight)?;
        let table = format!("{}{}", prov.csv_header(), sweep_table_csv(&cells, spec));
        let path = out.text("sweep.csv", &table)?;
        let best = best_cell(&cells).copied();
        out.json("sweep.json", &json!({ "provenance": prov, "cells": cells, "best": best }))?;
        print!("{}", sweep_table_csv(&cells, spec));
        if let Some(b) = best {
            println!("best r = {} m = {}: held-out risk {:.6} (naive {:.6})", b.r, b.m, b.test_risk, b.naive_risk);
        }
        println!("wrote {}", path.display());
        return Ok(());
    }

    let arch = plan.arch.clone().ok_or_else(|| Failure::Config("`architecture` is required with `data`".into()))?;
    let d = plan.series.dim();
    if arch.output_dim() != d || arch.input_dim() != plan.r * d {
        return Err(Failure::Config(format!(
            "architecture maps {} → {} but the data need r·d = {} → d = {}",
            arch.input_dim(),
            arch.output_dim(),
            plan.r * d,
            d
        )));
    }
    if plan.n_train < plan.r + 1 {
        return Err(Failure::Config(format!("n_train = {} leaves no training pairs for r = {}", plan.n_train, plan.r)));
    }
    let scaler = if plan.normalize { Some(Scaler::fit(&train_part)?) } else { None };
    let train_data = lag_embed_with(&train_part, plan.r, scaler.clone())?;
    let test_data = if test_part.is_empty() {
        None
    } else {
        // held-out pairs start from the last training states
        let with_prefix = plan.series.slice(plan.n_train - plan.r..plan.series.len());
        Some(lag_embed_with(&with_prefix, plan.r, scaler.clone())?)
    };
    let mut init = rng::stream(seed, rng::STREAM_INIT);
    let net = Network::initial(arch, &mut init)?;
    let (net, report) = train_sgd(&net, &train_data, &plan.train, &cfg.weight, test_data.as_ref())?;

    let final_train = empirical_risk(&net, &train_data, &cfg.weight)?;
    let final_test = test_data.as_ref().map(|t| empirical_risk(&net, t, &cfg.weight)).transpose()?;
    let naive_test = test_data.as_ref().map(|t| naive_predict(t, &cfg.weight)).transpose()?;
    let model = ModelFile { provenance: serde_json::to_value(&prov).expect("plain data"), r: plan.r, scaler, network: network_value(&net)? };
    let model_path = out.json("model.json", &model)?;
    out.text("curve.csv", &format!("{}{}", prov.csv_header(), report.curve_csv()))?;
    out.json(
        "train.json",
        &json!({
            "provenance": prov,
            "epochs": plan.train.epochs,
            "n_train": plan.n_train,
            "r": plan.r,
            "train_risk": final_train,
            "test_risk": final_test,
            "naive_test_risk": naive_test,
            "pruned_mass": report.pruned_mass,
        }),
    )?;
    match (final_test, naive_test) {
        (Some(t), Some(n)) => println!("train risk {final_train:.6}, held-out risk {t:.6} (naive {n:.6})"),
        _ => println!("train risk {final_train:.6}"),
    }
    println!("wrote {}", model_path.display());
    Ok(())
}

pub fn evaluate(cfg: &EvaluateConfig, out: &Output) -> Result<(), Failure> {
    let seed = cfg.seed.unwrap_or(0);
    let prov = Provenance::new("evaluate", cfg, seed);
    let text = std::fs::read_to_string(&cfg.model)
        .map_err(|e| Failure::Config(format!("cannot read model {}: {e}", cfg.model.display())))?;
    let model: ModelFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("{} is not a model file written by train: {e}", cfg.model.display())))?;
    let net = Network::from_json(&model.network.to_string())?;
    if let Some(r) = cfg.r {
        if r != model.r {
            return Err(Failure::Config(format!("config asks for r = {r} but the model was trained with r = {}", model.r)));
        }
    }
    cfg.weight.validate()?;
    let series = read_series(&cfg.data)?;
    let d = series.dim();
    if net.input_dim() != model.r * d || net.output_dim() != d {
        return Err(Failure::Config(format!(
            "lag mismatch: the model maps {} → {} inputs but the data with r = {} give {} → {d}",
            net.input_dim(),
            net.output_dim(),
            model.r,
            model.r * d
        )));
    }
    if cfg.start >= series.len() {
        return Err(Failure::Config(format!("start = {} is past the {} rows of the data", cfg.start, series.len())));
    }
    let data = lag_embed_with(&series.slice(cfg.start..series.len()), model.r, model.scaler.clone())?;
    let risk = empirical_risk(&net, &data, &cfg.weight)?;
    let naive = naive_predict(&data, &cfg.weight)?;
    let steps = forecast_errors(&net, &data, cfg.k)?;
    out.json(
        "metrics.json",
        &json!({
            "provenance": prov,
            "pairs": data.len(),
            "risk": risk,
            "naive_risk": naive,
            "forecast_errors": steps,
        }),
    )?;
    println!("risk {risk:.6}, naive {naive:.6}");
    for (j, e) in steps.iter().enumerate() {
        println!("  {}-step forecast error {e:.6}", j + 1);
    }
    Ok(())
}

pub fn certify_cmd(cfg: &CertifyConfig, out: &Output) -> Result<(), Failure> {
    let seed = cfg.seed.unwrap_or(0);
    let prov = Provenance::new("certify", cfg, seed);
    let f = catalog::by_name(&cfg.function)?;
    let n = cfg.n.unwrap_or_else(|| ApproxPlan::minimal_n(&f));
    let (_, cert) = certify(&f, n, cfg.m, cfg.sup_cap, seed)?;
    let holds = cert.holds();
    out.json("certificate.json", &json!({ "provenance": prov, "holds": holds, "certificate": cert }))?;
    println!(
        "{} N = {} m = {}: sup error {:.3e} (bound {:.3e}), Lipschitz {:.4} (bound {:.4})",
        cert.function, cert.n, cert.m, cert.measured_sup, cert.sup_bound, cert.measured_lip, cert.lip_bound
    );
    if !holds {
        return Err(Failure::Numeric("measured quantities exceed their certified bounds".into()));
    }
    Ok(())
}

fn default_xs() -> Vec<f64> {
    (0..=24).map(|i| 10f64.powf(-6.0 + i as f64 / 4.0)).collect()
}

pub fn rates(cfg: &RatesConfig, out: &Output) -> Result<(), Failure> {
    let seed = cfg.seed.unwrap_or(0);
    let prov = Provenance::new("rates", cfg, seed);
    cfg.dependence.validate()?;
    cfg.profile.exponent()?;
    let alpha = match (cfg.alpha, &cfg.dependence) {
        (Some(a), _) => a,
        (None, DependenceSpec::MixingPolynomial { alpha, .. }) => *alpha,
        (None, _) => return Err(Failure::Config("`alpha` is required unless the dependence is polynomial mixing".into())),
    };
    let xs = cfg.xs.clone().unwrap_or_else(default_xs);
    let ns = cfg.ns.clone().unwrap_or_else(|| vec![1e2, 1e3, 1e4, 1e5, 1e6]);

    let mut lambda = prov.csv_header();
    lambda.push_str("x,lambda,envelope\n");
    for row in lambda_table(&cfg.dependence, &xs)? {
        let env = row.envelope.map(|e| format!("{e:?}")).unwrap_or_default();
        lambda.push_str(&format!("{:?},{:?},{env}\n", row.x, row.lambda));
    }
    let mut table = prov.csv_header();
    table.push_str("n,N,predicted_rate,bound\n");
    for row in rate_table(&cfg.dependence, alpha, &cfg.profile, &ns)? {
        table.push_str(&format!("{:?},{},{:?},{:?}\n", row.n, row.big_n, row.predicted_rate, row.bound));
    }
    out.text("lambda.csv", &lambda)?;
    let path = out.text("rates.csv", &table)?;
    print!("{}", table.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect::<String>());
    println!("wrote {}", path.display());
    Ok(())
}
